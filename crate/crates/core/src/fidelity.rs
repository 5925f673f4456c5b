//! Fidelity between density matrices, computed three ways, plus trace distance.
//!
//! * [`fidelity`]: `F = Tr sqrt(ρ₁^{1/2} ρ₀ ρ₁^{1/2})`.
//! * [`fidelity_purification`]: a maximally parallel pair of purifications,
//!   whose overlap is `F`.
//! * [`fidelity_povm`]: a projective measurement whose Bhattacharyya sum
//!   `Σ_b sqrt(Tr ρ₀E_b) sqrt(Tr ρ₁E_b)` is `F`.
//!
//! Fidelity here is the amplitude-style quantity (not its square).

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::hilbert::{DensityMatrix, StateVector, SubsystemLayout};
use crate::numerics::{self, ComplexMatrix};
use crate::random;
use crate::tolerance;

/// Label of the ancilla added by purifications.
pub const PURIFIER: &str = "E";

/// Eigenvalues of `ρ₁` above this (relative to the largest) span the support
/// used for the pseudo-inverse in the measurement witness.
const PINV_CUTOFF: f64 = 1e-12;

/// Positive operators summing to the identity.
#[derive(Debug, Clone)]
pub struct Povm {
    elements: Vec<ComplexMatrix>,
}

impl Povm {
    pub fn new(elements: Vec<ComplexMatrix>) -> Result<Self> {
        let first = elements
            .first()
            .ok_or_else(|| Error::validation("povm", "no elements"))?;
        let d = first.nrows();
        let mut total = ComplexMatrix::zeros(d, d);
        for (i, e) in elements.iter().enumerate() {
            if e.shape() != (d, d) {
                return Err(Error::DimensionMismatch(format!(
                    "POVM element {i} is {}x{}, expected {d}x{d}",
                    e.nrows(),
                    e.ncols()
                )));
            }
            let eig = numerics::eig_hermitian(e)?;
            if let Some(&min) = eig.eigenvalues.last() {
                if min < -tolerance::VALIDATION {
                    return Err(Error::NotPsd { eigenvalue: min });
                }
            }
            total += e;
        }
        let deviation = numerics::frobenius(&(total - numerics::identity(d)));
        if deviation > tolerance::VALIDATION {
            return Err(Error::validation(
                "povm",
                format!("elements sum to the identity only within {deviation:.3e}"),
            ));
        }
        Ok(Povm { elements })
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    pub fn dim(&self) -> usize {
        self.elements[0].nrows()
    }

    /// Outcome probabilities `Tr(ρ E_b)`.
    pub fn probabilities(&self, rho: &DensityMatrix) -> Result<Vec<f64>> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "POVM of dimension {} on a state of dimension {}",
                self.dim(),
                rho.dim()
            )));
        }
        Ok(self
            .elements
            .iter()
            .map(|e| (rho.matrix() * e).trace().re.max(0.0))
            .collect())
    }

    /// `Σ_b sqrt(Tr ρ₀E_b) · sqrt(Tr ρ₁E_b)`
    pub fn bhattacharyya(&self, rho0: &DensityMatrix, rho1: &DensityMatrix) -> Result<f64> {
        let p = self.probabilities(rho0)?;
        let q = self.probabilities(rho1)?;
        Ok(p.iter().zip(&q).map(|(a, b)| (a * b).sqrt()).sum())
    }
}

/// Purifications `ψ₀, ψ₁` of two states on the system plus an ancilla `E`.
#[derive(Debug, Clone)]
pub struct PurificationPair {
    pub psi0: StateVector,
    pub psi1: StateVector,
    /// `|<ψ₀|ψ₁>|`
    pub overlap: f64,
}

/// Closed-form fidelity `Tr sqrt(ρ₁^{1/2} ρ₀ ρ₁^{1/2})`, clamped to `[0, 1]`.
pub fn fidelity(rho0: &DensityMatrix, rho1: &DensityMatrix) -> Result<f64> {
    rho0.check_same_dim(rho1)?;
    let root1 = numerics::psd_sqrt(rho1.matrix())?;
    let inner = numerics::hermitize(&(&root1 * rho0.matrix() * &root1));
    let eig = numerics::eig_hermitian(&inner)?;
    let f: f64 = numerics::clamp_psd_spectrum(&eig.eigenvalues)?
        .into_iter()
        .map(f64::sqrt)
        .sum();
    Ok(f.clamp(0.0, 1.0))
}

/// Amplitude matrix (system × ancilla) of the canonical purification
/// `Σ_k sqrt(λ_k) |v_k> ⊗ |k>`.
fn canonical_amplitudes(rho: &DensityMatrix) -> Result<ComplexMatrix> {
    let eig = numerics::eig_hermitian(rho.matrix())?;
    let weights = numerics::clamp_psd_spectrum(&eig.eigenvalues)?;
    let mut m = eig.eigenvectors;
    for (j, w) in weights.iter().enumerate() {
        m.column_mut(j).scale_mut(w.sqrt());
    }
    Ok(m)
}

fn purified_layout(rho: &DensityMatrix) -> Result<SubsystemLayout> {
    let ancilla = SubsystemLayout::with_cap([(PURIFIER, rho.dim())], usize::MAX)?;
    rho.layout().concat(&ancilla)
}

fn purification_from(rho: &DensityMatrix, m: &ComplexMatrix) -> Result<StateVector> {
    let labels: Vec<&str> = rho.layout().labels().collect();
    let layout = purified_layout(rho)?;
    let tr = numerics::frobenius(m);
    StateVector::from_amplitude_matrix(layout, &labels, &m.unscale(tr))
}

/// Canonical purification with an ancilla of the same dimension as the system.
pub fn canonical_purification(rho: &DensityMatrix) -> Result<StateVector> {
    purification_from(rho, &canonical_amplitudes(rho)?)
}

/// Maximally parallel purifications.
///
/// `ψ₁` is the canonical purification of `ρ₁`. `ψ₀` is the canonical
/// purification of `ρ₀` rotated on the ancilla by the adjoint of the unitary
/// polar factor of the cross-Gram operator `X = M₁† M₀`, which makes
/// `<ψ₁|ψ₀> = Tr|X| = F`.
pub fn fidelity_purification(rho0: &DensityMatrix, rho1: &DensityMatrix) -> Result<PurificationPair> {
    rho0.check_same_dim(rho1)?;
    let m0 = canonical_amplitudes(rho0)?;
    let m1 = canonical_amplitudes(rho1)?;
    let gram = m1.adjoint() * &m0;
    let polar = numerics::polar(&gram, true)?;
    let aligned = m0 * polar.unitary.adjoint();
    let psi0 = purification_from(rho0, &aligned)?;
    let psi1 = purification_from(rho1, &m1)?;
    let overlap = psi0.overlap(&psi1)?;
    Ok(PurificationPair {
        psi0,
        psi1,
        overlap,
    })
}

/// Projective measurement attaining the minimum of the Bhattacharyya sum.
///
/// On the support of `ρ₁` the measurement diagonalizes
/// `M = ρ₁^{-1/2} sqrt(ρ₁^{1/2} ρ₀ ρ₁^{1/2}) ρ₁^{-1/2}`; the kernel of `ρ₁`
/// is appended as one extra element.
pub fn fidelity_povm(rho0: &DensityMatrix, rho1: &DensityMatrix) -> Result<(f64, Povm)> {
    rho0.check_same_dim(rho1)?;
    let d = rho1.dim();
    let eig = numerics::eig_hermitian(rho1.matrix())?;
    let weights = numerics::clamp_psd_spectrum(&eig.eigenvalues)?;
    let top = weights.first().copied().unwrap_or(0.0);
    let rank = weights.iter().filter(|&&w| w > PINV_CUTOFF * top).count();
    let support = eig.eigenvectors.columns(0, rank).into_owned();

    let restricted = numerics::hermitize(&(support.adjoint() * rho0.matrix() * &support));
    let roots: Vec<f64> = weights[..rank].iter().map(|w| w.sqrt()).collect();
    let scaled = ComplexMatrix::from_fn(rank, rank, |i, j| restricted[(i, j)] * roots[i] * roots[j]);
    let middle = numerics::psd_sqrt(&numerics::hermitize(&scaled))?;
    let m = ComplexMatrix::from_fn(rank, rank, |i, j| middle[(i, j)] / (roots[i] * roots[j]));
    let basis = numerics::eig_hermitian(&numerics::hermitize(&m))?.eigenvectors;

    let mut elements: Vec<ComplexMatrix> = (0..rank)
        .map(|k| {
            let v = &support * basis.column(k);
            numerics::outer(&v)
        })
        .collect();
    if rank < d {
        let projector = &support * support.adjoint();
        elements.push(numerics::hermitize(&(numerics::identity(d) - projector)));
    }
    let povm = Povm::new(elements)?;
    let value = povm.bhattacharyya(rho0, rho1)?;
    Ok((value, povm))
}

/// `D = ½ Tr|ρ₀ − ρ₁|`
pub fn trace_distance(rho0: &DensityMatrix, rho1: &DensityMatrix) -> Result<f64> {
    rho0.check_same_dim(rho1)?;
    let diff = numerics::hermitize(&(rho0.matrix() - rho1.matrix()));
    let eig = numerics::eig_hermitian(&diff)?;
    let d: f64 = eig.eigenvalues.iter().map(|l| l.abs()).sum::<f64>() / 2.0;
    Ok(d.clamp(0.0, 1.0))
}

/// Optimal one-shot probability of telling the two states apart: `½ + D/2`.
pub fn guess_probability(rho0: &DensityMatrix, rho1: &DensityMatrix) -> Result<f64> {
    Ok(0.5 + trace_distance(rho0, rho1)? / 2.0)
}

/// All three routes side by side.
#[derive(Debug, Clone, Serialize)]
pub struct FidelitySummary {
    pub closed_form: f64,
    pub purification_overlap: f64,
    pub povm_value: f64,
    pub max_discrepancy: f64,
    pub fidelity_squared: f64,
    pub trace_distance: f64,
}

pub fn summarize(rho0: &DensityMatrix, rho1: &DensityMatrix) -> Result<FidelitySummary> {
    let closed_form = fidelity(rho0, rho1)?;
    let purification_overlap = fidelity_purification(rho0, rho1)?.overlap;
    let (povm_value, _) = fidelity_povm(rho0, rho1)?;
    let max_discrepancy = [
        (closed_form - purification_overlap).abs(),
        (closed_form - povm_value).abs(),
        (purification_overlap - povm_value).abs(),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    Ok(FidelitySummary {
        closed_form,
        purification_overlap,
        povm_value,
        max_discrepancy,
        fidelity_squared: closed_form * closed_form,
        trace_distance: trace_distance(rho0, rho1)?,
    })
}

/// Outcome of a randomized audit against a witness.
#[derive(Debug, Clone, Serialize)]
pub struct AuditSummary {
    pub samples: usize,
    pub witness: f64,
    /// Smallest sampled POVM sum, or largest sampled purification overlap.
    pub extreme: f64,
    /// Samples that beat the witness by more than the validation tolerance.
    pub violations: usize,
}

/// Random POVMs never give a Bhattacharyya sum below the witness value.
pub fn audit_povms<R: Rng>(
    rho0: &DensityMatrix,
    rho1: &DensityMatrix,
    samples: usize,
    rng: &mut R,
) -> Result<AuditSummary> {
    let (witness, _) = fidelity_povm(rho0, rho1)?;
    let d = rho0.dim();
    let mut extreme = f64::INFINITY;
    let mut violations = 0;
    for _ in 0..samples {
        let outcomes = rng.gen_range(2..=d + 2);
        let povm = Povm {
            elements: random::povm(rng, d, outcomes),
        };
        let value = povm.bhattacharyya(rho0, rho1)?;
        extreme = extreme.min(value);
        if value < witness - tolerance::VALIDATION {
            violations += 1;
        }
    }
    Ok(AuditSummary {
        samples,
        witness,
        extreme,
        violations,
    })
}

/// Random purifications never overlap more than the maximally parallel pair.
pub fn audit_purifications<R: Rng>(
    rho0: &DensityMatrix,
    rho1: &DensityMatrix,
    samples: usize,
    rng: &mut R,
) -> Result<AuditSummary> {
    let witness = fidelity_purification(rho0, rho1)?.overlap;
    let m0 = canonical_amplitudes(rho0)?;
    let psi1 = canonical_purification(rho1)?;
    let mut extreme: f64 = 0.0;
    let mut violations = 0;
    for _ in 0..samples {
        let w = random::unitary(rng, rho0.dim());
        let psi0 = purification_from(rho0, &(&m0 * w))?;
        let value = psi0.overlap(&psi1)?;
        extreme = extreme.max(value);
        if value > witness + tolerance::VALIDATION {
            violations += 1;
        }
    }
    Ok(AuditSummary {
        samples,
        witness,
        extreme,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::c;

    fn qubit(m: [[f64; 2]; 2]) -> DensityMatrix {
        DensityMatrix::from_matrix(
            "B",
            ComplexMatrix::from_row_slice(2, 2, &[c(m[0][0], 0.0), c(m[0][1], 0.0), c(m[1][0], 0.0), c(m[1][1], 0.0)]),
        )
        .unwrap()
    }

    #[test]
    fn orthogonal_pure_states() {
        let zero = qubit([[1.0, 0.0], [0.0, 0.0]]);
        let one = qubit([[0.0, 0.0], [0.0, 1.0]]);
        assert!(fidelity(&zero, &one).unwrap().abs() < 1e-12);
        let (value, povm) = fidelity_povm(&zero, &one).unwrap();
        assert!(value.abs() < 1e-9);
        // one projector spans the support of |1><1|, the other is its kernel
        assert_eq!(povm.elements().len(), 2);
        assert!((trace_distance(&zero, &one).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pure_versus_maximally_mixed() {
        // ρ₁^{1/2} = I/√2, so the inner operator is |0><0|/2 and F = 1/√2.
        let zero = qubit([[1.0, 0.0], [0.0, 0.0]]);
        let mixed = qubit([[0.5, 0.0], [0.0, 0.5]]);
        let expected = std::f64::consts::FRAC_1_SQRT_2;
        assert!((fidelity(&zero, &mixed).unwrap() - expected).abs() < 1e-12);
        assert!((fidelity_purification(&zero, &mixed).unwrap().overlap - expected).abs() < 1e-12);
        assert!((fidelity_povm(&zero, &mixed).unwrap().0 - expected).abs() < 1e-12);
    }

    #[test]
    fn identical_states() {
        let rho = qubit([[0.7, 0.2], [0.2, 0.3]]);
        assert!((fidelity(&rho, &rho).unwrap() - 1.0).abs() < 1e-12);
        assert!((fidelity_povm(&rho, &rho).unwrap().0 - 1.0).abs() < 1e-12);
        assert!(trace_distance(&rho, &rho).unwrap() < 1e-12);
        let pair = fidelity_purification(&rho, &rho).unwrap();
        assert!((pair.overlap - 1.0).abs() < 1e-12);
    }

    #[test]
    fn purifications_reproduce_marginals() {
        let rho0 = qubit([[0.7, 0.2], [0.2, 0.3]]);
        let rho1 = qubit([[0.4, -0.1], [-0.1, 0.6]]);
        let pair = fidelity_purification(&rho0, &rho1).unwrap();
        let back0 = pair.psi0.partial_trace(&["B"]).unwrap();
        let back1 = pair.psi1.partial_trace(&["B"]).unwrap();
        assert!(numerics::frobenius(&(back0.matrix() - rho0.matrix())) < 1e-12);
        assert!(numerics::frobenius(&(back1.matrix() - rho1.matrix())) < 1e-12);
    }

    #[test]
    fn dimension_mismatch() {
        let a = qubit([[1.0, 0.0], [0.0, 0.0]]);
        let b = DensityMatrix::maximally_mixed(SubsystemLayout::single("B", 3).unwrap());
        assert!(matches!(fidelity(&a, &b), Err(Error::DimensionMismatch(_))));
        assert!(matches!(fidelity_povm(&a, &b), Err(Error::DimensionMismatch(_))));
        assert!(matches!(fidelity_purification(&a, &b), Err(Error::DimensionMismatch(_))));
        assert!(matches!(trace_distance(&a, &b), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn povm_validation() {
        assert!(Povm::new(vec![numerics::identity(2).scale(0.5)]).is_err());
        assert!(Povm::new(vec![numerics::identity(2)]).is_ok());
    }
}
