//! Small operator builders used by the builtin protocols and the examples.

use crate::error::{Error, Result};
use crate::hilbert::{self, SubsystemLayout};
use crate::numerics::{self, c, ComplexMatrix, ComplexVector};

/// Permutation matrix sending basis state `digits` to `map(digits)`, with the
/// first entry of `dims` most significant. Fails if `map` is not a bijection.
pub fn permutation(dims: &[usize], map: impl Fn(&[usize]) -> Vec<usize>) -> Result<ComplexMatrix> {
    let layout = SubsystemLayout::with_cap(
        dims.iter().enumerate().map(|(i, &d)| (format!("x{i}"), d)),
        usize::MAX,
    )?;
    let n = layout.total_dim();
    let mut m = ComplexMatrix::zeros(n, n);
    let mut hit = vec![false; n];
    for col in 0..n {
        let row = layout.index_of(&map(&layout.digits_of(col)))?;
        if std::mem::replace(&mut hit[row], true) {
            return Err(Error::BadParams(format!("digit map is not a bijection (row {row} hit twice)")));
        }
        m[(row, col)] = c(1.0, 0.0);
    }
    Ok(m)
}

/// Matrix on `scope` (given order) acting as `op` on `target ⊆ scope` and as
/// the identity on the rest of `scope`.
pub fn embed<S: AsRef<str>, T: AsRef<str>>(
    layout: &SubsystemLayout,
    scope: &[S],
    target: &[T],
    op: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let local = layout.select(scope)?;
    for t in target {
        local.position(t.as_ref())?;
    }
    let n = local.total_dim();
    let mut m = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let mut e = ComplexVector::zeros(n);
        e[j] = c(1.0, 0.0);
        let col = hilbert::apply_operator(&local, &e, target, op)?;
        m.set_column(j, &col);
    }
    Ok(m)
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
}

pub fn hadamard() -> ComplexMatrix {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_row_slice(2, 2, &[c(r, 0.0), c(r, 0.0), c(r, 0.0), c(-r, 0.0)])
}

/// `n`-fold tensor power.
pub fn tensor_power(m: &ComplexMatrix, n: usize) -> ComplexMatrix {
    (0..n).fold(numerics::identity(1), |acc, _| numerics::kron(&acc, m))
}

/// Discrete Fourier transform on a `d`-level system.
pub fn dft(d: usize) -> ComplexMatrix {
    let scale = 1.0 / (d as f64).sqrt();
    ComplexMatrix::from_fn(d, d, |j, k| {
        let angle = 2.0 * std::f64::consts::PI * ((j * k) % d) as f64 / d as f64;
        c(scale * angle.cos(), scale * angle.sin())
    })
}

/// Real rotation `[[cos, −sin], [sin, cos]]`.
pub fn rotation(theta: f64) -> ComplexMatrix {
    let (s, co) = theta.sin_cos();
    ComplexMatrix::from_row_slice(2, 2, &[c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0)])
}

/// `Σ_k P_k ⊗ U_k + (I − Σ_k P_k) ⊗ I` for orthogonal projectors `P_k`.
pub fn controlled(branches: &[(ComplexMatrix, ComplexMatrix)]) -> Result<ComplexMatrix> {
    let (p0, u0) = branches
        .first()
        .ok_or_else(|| Error::BadParams("controlled operator without branches".into()))?;
    let (dc, dt) = (p0.nrows(), u0.nrows());
    let mut rest = numerics::identity(dc);
    let mut out = ComplexMatrix::zeros(dc * dt, dc * dt);
    for (p, u) in branches {
        out += numerics::kron(p, u);
        rest -= p;
    }
    out += numerics::kron(&rest, &numerics::identity(dt));
    numerics::check_unitary(&out)?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cnot_from_digit_map() {
        let cnot = permutation(&[2, 2], |d| vec![d[0], d[0] ^ d[1]]).unwrap();
        let expected = numerics::kron(
            &ComplexMatrix::from_diagonal(&ComplexVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)])),
            &numerics::identity(2),
        ) + numerics::kron(
            &ComplexMatrix::from_diagonal(&ComplexVector::from_vec(vec![c(0.0, 0.0), c(1.0, 0.0)])),
            &pauli_x(),
        );
        assert_eq!(cnot, expected);
    }

    #[test]
    fn non_bijection_is_rejected() {
        assert!(permutation(&[2], |_| vec![0]).is_err());
    }

    #[test]
    fn embedding_matches_kron() {
        let l = SubsystemLayout::new([("A", 2), ("B", 3), ("C", 2)]).unwrap();
        let m = embed(&l, &["A", "C"], &["C"], &pauli_x()).unwrap();
        assert_eq!(m, numerics::kron(&numerics::identity(2), &pauli_x()));
        let swapped = embed(&l, &["C", "A"], &["C"], &pauli_x()).unwrap();
        assert_eq!(swapped, numerics::kron(&pauli_x(), &numerics::identity(2)));
    }

    #[test]
    fn dft_is_unitary() {
        for d in 1..6 {
            assert!(numerics::unitary_deviation(&dft(d)) < 1e-12);
        }
    }
}
