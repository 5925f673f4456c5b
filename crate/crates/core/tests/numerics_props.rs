use eprb::numerics::{self, c, ComplexMatrix};
use eprb::random;
use proptest::prelude::*;

fn hermitian(seed: u64, dim: usize) -> ComplexMatrix {
    let g = random::ginibre(&mut random::rng(seed), dim, dim);
    numerics::hermitize(&(&g + g.adjoint()))
}

fn psd(seed: u64, dim: usize, rank: usize) -> ComplexMatrix {
    random::density(&mut random::rng(seed), dim, rank)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn eig_reconstructs(seed in any::<u64>(), dim in 1usize..=8) {
        let h = hermitian(seed, dim);
        let eig = numerics::eig_hermitian(&h).unwrap();
        prop_assert!(numerics::frobenius(&(eig.reconstruct() - &h)) <= 1e-10);
        prop_assert!(eig.eigenvalues.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(numerics::unitary_deviation(&eig.eigenvectors) <= 1e-10);
    }

    #[test]
    fn svd_reconstructs(seed in any::<u64>(), rows in 1usize..=8, cols in 1usize..=8) {
        let m = random::ginibre(&mut random::rng(seed), rows, cols);
        let s = numerics::svd(&m).unwrap();
        prop_assert!(numerics::frobenius(&(s.reconstruct() - &m)) <= 1e-10);
        prop_assert!(numerics::unitary_deviation(&s.u) <= 1e-10);
        prop_assert!(numerics::unitary_deviation(&s.v) <= 1e-10);
    }

    #[test]
    fn sqrt_squares_back(seed in any::<u64>(), dim in 1usize..=8, rank in 1usize..=8) {
        let rho = psd(seed, dim, rank);
        let s = numerics::psd_sqrt(&rho).unwrap();
        prop_assert!(numerics::frobenius(&(&s * &s - &rho)) <= 1e-9);
        prop_assert!(numerics::hermitian_deviation(&s) <= 1e-12);
    }

    #[test]
    fn polar_reconstructs_and_is_unitary(seed in any::<u64>(), dim in 1usize..=8, rank in 0usize..=8) {
        let mut r = random::rng(seed);
        let m = random::ginibre(&mut r, dim, rank.min(dim)) * random::ginibre(&mut r, rank.min(dim), dim);
        let p = numerics::polar(&m, true).unwrap();
        prop_assert!(numerics::unitary_deviation(&p.unitary) <= 1e-9);
        prop_assert!(numerics::frobenius(&(&p.unitary * &p.positive - &m)) <= 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn sqrt_scales_with_root_of_factor(seed in any::<u64>(), dim in 1usize..=6) {
        let rho = psd(seed, dim, dim);
        let s = numerics::psd_sqrt(&rho).unwrap();
        for k in [0.5, 2.0, 4.0] {
            let scaled = numerics::psd_sqrt(&rho.scale(k)).unwrap();
            prop_assert!(numerics::frobenius(&(scaled - s.scale(f64::sqrt(k)))) <= 1e-9);
        }
    }
}

#[test]
fn diagonal_examples() {
    let d = ComplexMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(3.0, 0.0), c(1.0, 0.0)]));
    let eig = numerics::eig_hermitian(&d).unwrap();
    assert_eq!(eig.eigenvalues, vec![3.0, 1.0]);
    assert!(numerics::frobenius(&(eig.eigenvectors - numerics::identity(2))) < 1e-12);

    let eig = numerics::eig_hermitian(&numerics::identity(2)).unwrap();
    assert_eq!(eig.eigenvalues, vec![1.0, 1.0]);

    let s = numerics::svd(&numerics::identity(3)).unwrap();
    assert!(s.singular_values.iter().all(|&x| (x - 1.0).abs() < 1e-12));
}

#[test]
fn sqrt_and_polar_examples() {
    let half = numerics::identity(2).scale(0.5);
    let s = numerics::psd_sqrt(&half).unwrap();
    assert!(numerics::frobenius(&(s - numerics::identity(2).scale(f64::sqrt(0.5)))) < 1e-12);

    let two = numerics::identity(3).scale(2.0);
    let p = numerics::polar(&two, true).unwrap();
    assert!(numerics::frobenius(&(p.unitary - numerics::identity(3))) < 1e-12);
    assert!(numerics::frobenius(&(p.positive - two)) < 1e-12);

    let u = random::unitary(&mut random::rng(4), 4);
    let p = numerics::polar(&u, true).unwrap();
    assert!(numerics::frobenius(&(p.unitary - &u)) < 1e-9);
    assert!(numerics::frobenius(&(p.positive - numerics::identity(4))) < 1e-9);
}

#[test]
fn bad_inputs_are_rejected() {
    let mut m = numerics::identity(2);
    m[(0, 1)] = c(1.0, 0.0);
    assert!(matches!(numerics::eig_hermitian(&m), Err(eprb::Error::NotHermitian { .. })));
    m[(0, 1)] = c(f64::NAN, 0.0);
    assert!(matches!(numerics::check_finite(&m), Err(eprb::Error::NonFinite)));
    let neg = numerics::identity(2).scale(-1.0);
    assert!(matches!(numerics::psd_sqrt(&neg), Err(eprb::Error::NotPsd { .. })));
}
