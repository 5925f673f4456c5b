use std::f64::consts::FRAC_1_SQRT_2;

use eprb::fidelity;
use eprb::hilbert::DensityMatrix;
use eprb::numerics::{self, c, ComplexMatrix, ComplexVector};
use eprb::random;
use proptest::prelude::*;

fn pair(seed: u64, dim: usize) -> (DensityMatrix, DensityMatrix) {
    let mut r = random::rng(seed);
    let rank0 = 1 + (seed as usize) % dim;
    let rank1 = 1 + (seed as usize / 7) % dim;
    let a = random::density(&mut r, dim, rank0);
    let b = random::density(&mut r, dim, rank1);
    (DensityMatrix::from_matrix("X", a).unwrap(), DensityMatrix::from_matrix("X", b).unwrap())
}

fn state(m: ComplexMatrix) -> DensityMatrix {
    DensityMatrix::from_matrix("X", m).unwrap()
}

fn ket(v: &[f64]) -> ComplexVector {
    ComplexVector::from_iterator(v.len(), v.iter().map(|&x| c(x, 0.0)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn three_routes_agree(seed in any::<u64>(), dim in 2usize..=6) {
        let (a, b) = pair(seed, dim);
        let s = fidelity::summarize(&a, &b).unwrap();
        prop_assert!(s.max_discrepancy <= 1e-6);
        prop_assert!((0.0..=1.0 + 1e-9).contains(&s.closed_form));
    }

    #[test]
    fn symmetric(seed in any::<u64>(), dim in 2usize..=6) {
        let (a, b) = pair(seed, dim);
        let f = fidelity::fidelity(&a, &b).unwrap();
        let g = fidelity::fidelity(&b, &a).unwrap();
        prop_assert!((f - g).abs() <= 1e-8);
    }

    #[test]
    fn unitarily_invariant(seed in any::<u64>(), dim in 2usize..=6) {
        let (a, b) = pair(seed, dim);
        let u = random::unitary(&mut random::rng(seed ^ 0x5555), dim);
        let f = fidelity::fidelity(&a, &b).unwrap();
        let g = fidelity::fidelity(&a.conjugated(&u).unwrap(), &b.conjugated(&u).unwrap()).unwrap();
        prop_assert!((f - g).abs() <= 1e-8);
    }

    #[test]
    fn fuchs_van_de_graaf(seed in any::<u64>(), dim in 2usize..=6) {
        let (a, b) = pair(seed, dim);
        let f = fidelity::fidelity(&a, &b).unwrap();
        let d = fidelity::trace_distance(&a, &b).unwrap();
        prop_assert!(1.0 - f <= d + 1e-9);
        prop_assert!(d <= (1.0 - f * f).max(0.0).sqrt() + 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(20))]

    #[test]
    fn random_measurements_and_purifications_do_not_beat_the_witnesses(seed in any::<u64>(), dim in 2usize..=5) {
        let (a, b) = pair(seed, dim);
        let mut r = random::rng(seed);
        let povms = fidelity::audit_povms(&a, &b, 100, &mut r).unwrap();
        prop_assert_eq!(povms.violations, 0);
        prop_assert!(povms.extreme >= povms.witness - 1e-9);
        let purifications = fidelity::audit_purifications(&a, &b, 100, &mut r).unwrap();
        prop_assert_eq!(purifications.violations, 0);
        prop_assert!(purifications.extreme <= purifications.witness + 1e-9);
    }
}

#[test]
fn qubit_example_matches_a_brute_force_search() {
    let zero = state(numerics::outer(&ket(&[1.0, 0.0])));
    let mixed = state(numerics::identity(2).scale(0.5));
    let s = fidelity::summarize(&zero, &mixed).unwrap();
    for v in [s.closed_form, s.purification_overlap, s.povm_value] {
        assert!((v - FRAC_1_SQRT_2).abs() < 1e-9);
    }

    // Purifications of I/2 are (1/√2) Σ_i |i>⊗W|i>; against |0>|0> the overlap
    // is |W_00|/√2. Scan single-qubit unitaries for the best value.
    let steps = 200;
    let mut best: f64 = 0.0;
    for i in 0..=steps {
        let t = std::f64::consts::FRAC_PI_2 * i as f64 / steps as f64;
        for j in 0..8 {
            let phi = std::f64::consts::TAU * j as f64 / 8.0;
            let w00 = c(t.cos() * phi.cos(), t.cos() * phi.sin());
            best = best.max(w00.norm() * FRAC_1_SQRT_2);
        }
    }
    assert!((best - s.purification_overlap).abs() < 1e-6);

    let audit = fidelity::audit_povms(&zero, &mixed, 1000, &mut random::rng(8)).unwrap();
    assert_eq!(audit.violations, 0);
}

#[test]
fn extreme_cases() {
    let p0 = state(numerics::outer(&ket(&[1.0, 0.0])));
    let p1 = state(numerics::outer(&ket(&[0.0, 1.0])));
    assert!(fidelity::fidelity(&p0, &p1).unwrap().abs() < 1e-12);
    let (value, witness) = fidelity::fidelity_povm(&p0, &p1).unwrap();
    assert!(value.abs() < 1e-12);
    assert!(witness.elements().len() >= 2);
    assert!((fidelity::trace_distance(&p0, &p1).unwrap() - 1.0).abs() < 1e-12);
    assert!((fidelity::guess_probability(&p0, &p1).unwrap() - 1.0).abs() < 1e-12);

    let (a, _) = pair(3, 4);
    assert!((fidelity::fidelity(&a, &a).unwrap() - 1.0).abs() < 1e-9);
    assert!(fidelity::trace_distance(&a, &a).unwrap() < 1e-12);
    let pur = fidelity::fidelity_purification(&a, &a).unwrap();
    assert!((pur.overlap - 1.0).abs() < 1e-9);
    let povm = fidelity::Povm::new(vec![numerics::identity(4)]).unwrap();
    assert!((povm.bhattacharyya(&a, &a).unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn canonical_purification_reduces_to_the_input() {
    let (a, _) = pair(5, 3);
    let psi = fidelity::canonical_purification(&a).unwrap();
    let back = psi.partial_trace(&["X"]).unwrap();
    assert!(numerics::frobenius(&(back.matrix() - a.matrix())) < 1e-10);
}

#[test]
fn mismatched_dimensions() {
    let a = state(numerics::identity(2).scale(0.5));
    let b = state(numerics::identity(3).scale(1.0 / 3.0));
    assert!(matches!(fidelity::fidelity(&a, &b), Err(eprb::Error::DimensionMismatch(_))));
}
