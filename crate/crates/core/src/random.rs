//! Seeded random instances for audits and property tests.
//!
//! Honest protocol execution never draws from here; randomness inside a
//! protocol lives in dice subsystems.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::numerics::{self, c, ComplexMatrix, ComplexVector, C64};

pub type AuditRng = ChaCha8Rng;

pub fn rng(seed: u64) -> AuditRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex Gaussian sample.
fn gaussian<R: Rng>(rng: &mut R) -> C64 {
    // Box-Muller
    let u1: f64 = rng.gen::<f64>().max(f64::MIN_POSITIVE);
    let u2: f64 = rng.gen();
    let r = (-2.0 * u1.ln()).sqrt();
    let t = std::f64::consts::TAU * u2;
    c(r * t.cos(), r * t.sin()) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn ginibre<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| gaussian(rng))
}

pub fn unit_vector<R: Rng>(rng: &mut R, dim: usize) -> ComplexVector {
    let v = ComplexVector::from_fn(dim, |_, _| gaussian(rng));
    let n = v.norm();
    v.unscale(n)
}

/// Haar-distributed unitary (QR of a Ginibre matrix with phase correction).
pub fn unitary<R: Rng>(rng: &mut R, dim: usize) -> ComplexMatrix {
    let qr = ginibre(rng, dim, dim).qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0, 0.0) };
        for x in q.column_mut(j).iter_mut() {
            *x *= phase;
        }
    }
    q
}

/// Random density matrix of the given rank (Ginibre ensemble, unit trace).
pub fn density<R: Rng>(rng: &mut R, dim: usize, rank: usize) -> ComplexMatrix {
    let g = ginibre(rng, dim, rank.clamp(1, dim));
    let rho = &g * g.adjoint();
    let tr = numerics::trace(&rho).re;
    numerics::hermitize(&rho.unscale(tr))
}

/// Random POVM with `outcomes` elements: `E_i = S^{-1/2} G_i S^{-1/2}` with `S = Σ G_i`.
pub fn povm<R: Rng>(rng: &mut R, dim: usize, outcomes: usize) -> Vec<ComplexMatrix> {
    let n = outcomes.max(1);
    let mut ranks: Vec<usize> = (0..n).map(|_| rng.gen_range(1..=dim)).collect();
    // the ranks must cover the space or the elements only sum to a projector
    let covered: usize = ranks.iter().sum();
    if covered < dim {
        ranks[n - 1] += dim - covered;
    }
    let parts: Vec<ComplexMatrix> = ranks
        .iter()
        .map(|&rank| {
            let g = ginibre(rng, dim, rank);
            &g * g.adjoint()
        })
        .collect();
    let total = parts
        .iter()
        .fold(ComplexMatrix::zeros(dim, dim), |acc, p| acc + p);
    let inv_root = numerics::psd_pinv_sqrt(&total, 0.0).expect("sum of Gram matrices is PSD");
    parts
        .iter()
        .map(|p| numerics::hermitize(&(&inv_root * p * &inv_root)))
        .collect()
}
