//! Dense complex linear algebra: Hermitian eigendecomposition, SVD, PSD square
//! roots and polar decomposition.
//!
//! The iterative kernels come from `nalgebra`; this module adds validation,
//! residual checks, and a deterministic output convention:
//!
//! * eigenvalues and singular values are sorted descending;
//! * every vector is phase-fixed so that its first significant component is
//!   real and positive (singular pairs are rotated jointly);
//! * ties in the spectrum are broken by lexicographic order of the
//!   phase-fixed amplitudes.
//!
//! With that convention the basis returned for a degenerate eigenspace is
//! reproducible from run to run, which the attack constructions rely on.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerance;

pub type C64 = Complex64;
pub type ComplexMatrix = DMatrix<C64>;
pub type ComplexVector = DVector<C64>;

const MAX_SWEEPS: usize = 10_000;
const SIGNIFICANT: f64 = 1e-8;
/// Columns of `m V` below this fraction of the largest count as zero.
const NUMERICAL_ZERO_SVD: f64 = 1e-14;

pub const fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Hermitian eigendecomposition with eigenvalues sorted descending.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub eigenvalues: Vec<f64>,
    /// Eigenvectors as columns, in the order of `eigenvalues`.
    pub eigenvectors: ComplexMatrix,
}

impl HermitianEigen {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let mut scaled = self.eigenvectors.clone();
        for (j, &lambda) in self.eigenvalues.iter().enumerate() {
            scaled.column_mut(j).scale_mut(lambda);
        }
        &scaled * self.eigenvectors.adjoint()
    }
}

/// Full singular value decomposition `m = u * diag(s) * v^†`.
///
/// `u` is `rows x rows` and `v` is `cols x cols`; only the first
/// `min(rows, cols)` columns of each pair with a singular value. The remaining
/// columns complete each factor to a unitary.
#[derive(Debug, Clone)]
pub struct Svd {
    pub u: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub v: ComplexMatrix,
}

impl Svd {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let k = self.singular_values.len();
        let mut us = self.u.columns(0, k).into_owned();
        for (j, &s) in self.singular_values.iter().enumerate() {
            us.column_mut(j).scale_mut(s);
        }
        us * self.v.columns(0, k).adjoint()
    }

    pub fn rank(&self, cutoff: f64) -> usize {
        self.singular_values.iter().filter(|&&s| s > cutoff).count()
    }
}

/// Polar decomposition `m = unitary * positive`.
#[derive(Debug, Clone)]
pub struct Polar {
    pub unitary: ComplexMatrix,
    pub positive: ComplexMatrix,
}

pub fn frobenius(m: &ComplexMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn trace(m: &ComplexMatrix) -> C64 {
    m.diagonal().iter().sum()
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// `|v><v|`
pub fn outer(v: &ComplexVector) -> ComplexMatrix {
    v * v.adjoint()
}

pub fn check_finite(m: &ComplexMatrix) -> Result<()> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Err(Error::EmptyMatrix);
    }
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

fn relative_residual(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    frobenius(&(a - b)) / frobenius(a).max(1.0)
}

/// `‖h − h†‖_F / max(1, ‖h‖_F)`
pub fn hermitian_deviation(h: &ComplexMatrix) -> f64 {
    if !h.is_square() {
        return f64::INFINITY;
    }
    relative_residual(h, &h.adjoint())
}

/// `‖u†u − I‖_F`, infinite for non-square input.
pub fn unitary_deviation(u: &ComplexMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    frobenius(&(u.adjoint() * u - identity(u.nrows())))
}

pub fn check_unitary(u: &ComplexMatrix) -> Result<()> {
    check_finite(u)?;
    let deviation = unitary_deviation(u);
    if deviation > tolerance::VALIDATION {
        return Err(Error::NotUnitary { deviation });
    }
    Ok(())
}

pub fn check_hermitian(h: &ComplexMatrix) -> Result<()> {
    check_finite(h)?;
    let deviation = hermitian_deviation(h);
    if deviation > tolerance::VALIDATION {
        return Err(Error::NotHermitian { deviation });
    }
    Ok(())
}

/// Average of `h` and `h†`, removing roundoff asymmetry.
pub fn hermitize(h: &ComplexMatrix) -> ComplexMatrix {
    (h + h.adjoint()).unscale(2.0)
}

/// Multiplies a vector by the phase that makes its first significant component
/// real and positive; returns that phase.
fn phase_fix(v: &mut nalgebra::DVectorViewMut<'_, C64>) -> C64 {
    let scale = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let lead = v.iter().copied().find(|z| z.norm() > SIGNIFICANT * scale.max(1e-300));
    match lead {
        Some(z) => {
            let phase = z.conj() / z.norm();
            for x in v.iter_mut() {
                *x *= phase;
            }
            phase
        }
        None => c(1.0, 0.0),
    }
}

fn lexicographic(a: &[C64], b: &[C64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        for (p, q) in [(x.re, y.re), (x.im, y.im)] {
            if (p - q).abs() > 1e-12 {
                return q.total_cmp(&p);
            }
        }
    }
    Ordering::Equal
}

fn ties(a: f64, b: f64, scale: f64) -> bool {
    (a - b).abs() <= tolerance::RECONSTRUCTION * scale.max(1.0)
}

/// Order of columns: value descending, ties by lexicographic order of the column.
fn canonical_order(values: &[f64], columns: &ComplexMatrix) -> Vec<usize> {
    let scale = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[j].total_cmp(&values[i]));
    // Stabilize runs of near-equal values by their vectors.
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && ties(values[order[start]], values[order[end]], scale) {
            end += 1;
        }
        if end - start > 1 {
            order[start..end].sort_by(|&i, &j| {
                let a: Vec<C64> = columns.column(i).iter().copied().collect();
                let b: Vec<C64> = columns.column(j).iter().copied().collect();
                lexicographic(&a, &b)
            });
        }
        start = end;
    }
    order
}

fn permute_columns(m: &ComplexMatrix, order: &[usize]) -> ComplexMatrix {
    ComplexMatrix::from_fn(m.nrows(), order.len(), |i, j| m[(i, order[j])])
}

/// Eigendecomposition of a Hermitian matrix.
pub fn eig_hermitian(h: &ComplexMatrix) -> Result<HermitianEigen> {
    check_hermitian(h)?;
    let sym = hermitize(h);
    let eig = nalgebra::SymmetricEigen::try_new(sym, f64::EPSILON, MAX_SWEEPS)
        .ok_or(Error::NoConvergence("Hermitian eigendecomposition"))?;
    let mut vectors = eig.eigenvectors;
    for j in 0..vectors.ncols() {
        phase_fix(&mut vectors.column_mut(j));
    }
    let values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let order = canonical_order(&values, &vectors);
    let out = HermitianEigen {
        eigenvalues: order.iter().map(|&i| values[i]).collect(),
        eigenvectors: permute_columns(&vectors, &order),
    };
    let residual = relative_residual(h, &out.reconstruct());
    if residual > tolerance::RECONSTRUCTION {
        return Err(Error::ResidualExceeded {
            what: "eigendecomposition",
            residual,
            bound: tolerance::RECONSTRUCTION,
        });
    }
    Ok(out)
}

/// Extends orthonormal columns to a full unitary by Gram-Schmidt against the
/// standard basis, taken in index order.
pub fn complete_unitary(q: &ComplexMatrix) -> ComplexMatrix {
    let n = q.nrows();
    let mut cols: Vec<ComplexVector> = q.column_iter().map(|c| c.into_owned()).collect();
    let mut e = 0;
    while cols.len() < n && e < n {
        let mut v = ComplexVector::zeros(n);
        v[e] = c(1.0, 0.0);
        for _ in 0..2 {
            for u in &cols {
                let proj = u.dotc(&v);
                v -= u * proj;
            }
        }
        let norm = v.norm();
        if norm > 1e-6 {
            cols.push(v.unscale(norm));
        }
        e += 1;
    }
    ComplexMatrix::from_columns(&cols)
}

/// Thin factors `(u, s, v)` from nalgebra, or `None` if they do not reproduce `m`.
///
/// nalgebra's complex SVD occasionally returns a wrong factorization for
/// rank-deficient input, so the result is always checked.
fn svd_direct(m: &ComplexMatrix) -> Option<(ComplexMatrix, Vec<f64>, ComplexMatrix)> {
    let raw = nalgebra::SVD::try_new(m.clone(), true, true, f64::EPSILON, MAX_SWEEPS)?;
    let u = raw.u?;
    let v = raw.v_t?.adjoint();
    let s: Vec<f64> = raw.singular_values.iter().copied().collect();
    let mut us = u.clone();
    for (j, &x) in s.iter().enumerate() {
        us.column_mut(j).scale_mut(x);
    }
    (relative_residual(m, &(us * v.adjoint())) <= tolerance::RECONSTRUCTION).then_some((u, s, v))
}

/// Thin factors through the Gram matrix: `V` diagonalizes `m^† m`, and the
/// columns of `m V` are orthonormalized in order of decreasing norm.
fn svd_gram(m: &ComplexMatrix) -> Result<(ComplexMatrix, Vec<f64>, ComplexMatrix)> {
    if m.nrows() < m.ncols() {
        let (u, s, v) = svd_gram(&m.adjoint())?;
        return Ok((v, s, u));
    }
    let eig = eig_hermitian(&hermitize(&(m.adjoint() * m)))?;
    let b = m * &eig.eigenvectors;
    let norms: Vec<f64> = b.column_iter().map(|c| c.norm()).collect();
    let mut order: Vec<usize> = (0..norms.len()).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let tiny = NUMERICAL_ZERO_SVD * norms.iter().fold(0.0_f64, |a, &x| a.max(x));
    let mut us: Vec<ComplexVector> = Vec::new();
    let mut s = Vec::with_capacity(order.len());
    for &j in &order {
        let mut x = b.column(j).into_owned();
        for _ in 0..2 {
            for u in &us {
                let proj = u.dotc(&x);
                x -= u * proj;
            }
        }
        let n = x.norm();
        if n > tiny && norms[j] > tiny {
            us.push(x.unscale(n));
            s.push(n);
        } else {
            break;
        }
    }
    let kept = us.len();
    s.resize(order.len(), 0.0);
    let partial = if kept == 0 {
        ComplexMatrix::zeros(m.nrows(), 0)
    } else {
        ComplexMatrix::from_columns(&us)
    };
    let u = complete_unitary(&partial).columns(0, order.len()).into_owned();
    let v = permute_columns(&eig.eigenvectors, &order);
    Ok((u, s, v))
}

/// Singular value decomposition with unitary completion of both factors.
pub fn svd(m: &ComplexMatrix) -> Result<Svd> {
    check_finite(m)?;
    let (rows, cols) = m.shape();
    let k = rows.min(cols);
    let (mut u, values, mut v) = match svd_direct(m) {
        Some(f) => f,
        None => svd_gram(m)?,
    };
    for j in 0..k {
        let phase = phase_fix(&mut u.column_mut(j));
        // keep u_j v_j^† unchanged
        for x in v.column_mut(j).iter_mut() {
            *x *= phase;
        }
    }
    let order = canonical_order(&values, &u);
    let mut u = complete_unitary(&permute_columns(&u, &order));
    let mut v = complete_unitary(&permute_columns(&v, &order));
    for j in k..rows {
        phase_fix(&mut u.column_mut(j));
    }
    for j in k..cols {
        phase_fix(&mut v.column_mut(j));
    }
    let out = Svd {
        u,
        singular_values: order.iter().map(|&i| values[i].max(0.0)).collect(),
        v,
    };
    let residual = relative_residual(m, &out.reconstruct());
    if residual > tolerance::RECONSTRUCTION {
        return Err(Error::ResidualExceeded {
            what: "singular value decomposition",
            residual,
            bound: tolerance::RECONSTRUCTION,
        });
    }
    Ok(out)
}

/// Clamps roundoff-level eigenvalues of a PSD matrix; rejects genuinely negative ones.
pub(crate) fn clamp_psd_spectrum(values: &[f64]) -> Result<Vec<f64>> {
    let top = values.iter().fold(0.0_f64, |m, &v| m.max(v));
    values
        .iter()
        .map(|&v| {
            if v < -tolerance::NEGATIVE_CLAMP {
                Err(Error::NotPsd { eigenvalue: v })
            } else if v <= tolerance::NUMERICAL_ZERO * top.max(1.0) {
                Ok(0.0)
            } else {
                Ok(v)
            }
        })
        .collect()
}

fn spectral_map(eig: &HermitianEigen, values: &[f64]) -> ComplexMatrix {
    let mut scaled = eig.eigenvectors.clone();
    for (j, &f) in values.iter().enumerate() {
        scaled.column_mut(j).scale_mut(f);
    }
    hermitize(&(&scaled * eig.eigenvectors.adjoint()))
}

/// Principal square root of a positive semidefinite matrix.
pub fn psd_sqrt(rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = eig_hermitian(rho)?;
    let roots: Vec<f64> = clamp_psd_spectrum(&eig.eigenvalues)?
        .into_iter()
        .map(f64::sqrt)
        .collect();
    let root = spectral_map(&eig, &roots);
    let residual = relative_residual(rho, &(&root * &root));
    if residual > tolerance::SQRT_RECONSTRUCTION {
        return Err(Error::ResidualExceeded {
            what: "PSD square root",
            residual,
            bound: tolerance::SQRT_RECONSTRUCTION,
        });
    }
    Ok(root)
}

/// Inverse square root on the support (eigenvalues above `cutoff`), zero on the kernel.
pub fn psd_pinv_sqrt(rho: &ComplexMatrix, cutoff: f64) -> Result<ComplexMatrix> {
    let eig = eig_hermitian(rho)?;
    let values: Vec<f64> = clamp_psd_spectrum(&eig.eigenvalues)?
        .into_iter()
        .map(|v| if v > cutoff { v.sqrt().recip() } else { 0.0 })
        .collect();
    Ok(spectral_map(&eig, &values))
}

/// Polar decomposition `m = W P` with `P = sqrt(m† m)`.
///
/// For square input `W` is always a full unitary: on a rank-deficient input
/// the k-th left-null direction of the SVD is mapped to the k-th right-null
/// direction. For rectangular input `W` is the partial isometry
/// `U_thin V_thin†`, and `square` must be false.
pub fn polar(m: &ComplexMatrix, square: bool) -> Result<Polar> {
    check_finite(m)?;
    if square && !m.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "unitary polar factor requested for a {}x{} matrix",
            m.nrows(),
            m.ncols()
        )));
    }
    let dec = svd(m)?;
    let k = dec.singular_values.len();
    let unitary = if m.is_square() {
        &dec.u * dec.v.adjoint()
    } else {
        dec.u.columns(0, k) * dec.v.columns(0, k).adjoint()
    };
    let mut vs = dec.v.columns(0, k).into_owned();
    for (j, &s) in dec.singular_values.iter().enumerate() {
        vs.column_mut(j).scale_mut(s);
    }
    let positive = hermitize(&(vs * dec.v.columns(0, k).adjoint()));
    let residual = relative_residual(m, &(&unitary * &positive));
    if residual > tolerance::SQRT_RECONSTRUCTION {
        return Err(Error::ResidualExceeded {
            what: "polar decomposition",
            residual,
            bound: tolerance::SQRT_RECONSTRUCTION,
        });
    }
    Ok(Polar { unitary, positive })
}

/// Trace norm `Tr|m|`, the sum of singular values.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    Ok(svd(m)?.singular_values.iter().sum())
}

/// Orthogonal projector onto the span of eigenvectors with eigenvalue at least `cutoff`.
pub fn support_projector(rho: &ComplexMatrix, cutoff: f64) -> Result<ComplexMatrix> {
    Ok(support_basis(rho, cutoff)?.map_or_else(
        || ComplexMatrix::zeros(rho.nrows(), rho.ncols()),
        |basis| &basis * basis.adjoint(),
    ))
}

/// Orthonormal basis (columns) of the support, `None` if the support is empty.
pub fn support_basis(rho: &ComplexMatrix, cutoff: f64) -> Result<Option<ComplexMatrix>> {
    let eig = eig_hermitian(rho)?;
    let rank = eig.eigenvalues.iter().filter(|&&v| v >= cutoff).count();
    Ok((rank > 0).then(|| eig.eigenvectors.columns(0, rank).into_owned()))
}
