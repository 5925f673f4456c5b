use crate::error::{Error, Result};
use crate::numerics::{self, c, ComplexMatrix, ComplexVector, C64};
use crate::tolerance;

use super::{DensityMatrix, SubsystemLayout};

/// Normalized pure state on a labeled product space.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    layout: SubsystemLayout,
    amplitudes: ComplexVector,
}

impl StateVector {
    pub fn new(layout: SubsystemLayout, amplitudes: ComplexVector) -> Result<Self> {
        if amplitudes.len() != layout.total_dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for layout {layout} of dimension {}",
                amplitudes.len(),
                layout.total_dim()
            )));
        }
        if !amplitudes.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > tolerance::VALIDATION {
            return Err(Error::NotNormalized { norm });
        }
        Ok(StateVector { layout, amplitudes })
    }

    pub fn from_vec(layout: SubsystemLayout, amplitudes: Vec<C64>) -> Result<Self> {
        Self::new(layout, ComplexVector::from_vec(amplitudes))
    }

    /// Rescales to unit norm; fails only on a zero or non-finite vector.
    pub fn normalized(layout: SubsystemLayout, amplitudes: ComplexVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::NotNormalized { norm });
        }
        Self::new(layout, amplitudes.unscale(norm))
    }

    /// Computational basis state, one digit per subsystem.
    pub fn basis(layout: SubsystemLayout, digits: &[usize]) -> Result<Self> {
        let index = layout.index_of(digits)?;
        let mut amps = ComplexVector::zeros(layout.total_dim());
        amps[index] = c(1.0, 0.0);
        Ok(StateVector {
            layout,
            amplitudes: amps,
        })
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &ComplexVector {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        let layout = self.layout.concat(&other.layout)?;
        Ok(StateVector {
            layout,
            amplitudes: self.amplitudes.kronecker(&other.amplitudes),
        })
    }

    /// `(U ⊗ I)|ψ>`, with `U` acting on `labels` in the given order.
    pub fn apply_on<S: AsRef<str>>(&self, labels: &[S], u: &ComplexMatrix) -> Result<StateVector> {
        let expected = self.layout.dim_of(labels)?;
        if u.nrows() != expected || u.ncols() != expected {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} unitary on subsystems of total dimension {expected}",
                u.nrows(),
                u.ncols()
            )));
        }
        numerics::check_unitary(u)?;
        Ok(StateVector {
            layout: self.layout.clone(),
            amplitudes: apply_operator(&self.layout, &self.amplitudes, labels, u)?,
        })
    }

    /// Applies an arbitrary operator (e.g. a projector); the result is not normalized.
    pub fn apply_operator<S: AsRef<str>>(
        &self,
        labels: &[S],
        op: &ComplexMatrix,
    ) -> Result<ComplexVector> {
        apply_operator(&self.layout, &self.amplitudes, labels, op)
    }

    /// `<ψ|Π|ψ>` for an operator on `labels`.
    pub fn expectation<S: AsRef<str>>(&self, labels: &[S], op: &ComplexMatrix) -> Result<C64> {
        Ok(self.amplitudes.dotc(&self.apply_operator(labels, op)?))
    }

    /// `<self|other>`; the layouts must match exactly.
    pub fn inner(&self, other: &StateVector) -> Result<C64> {
        if self.layout != other.layout {
            return Err(Error::DimensionMismatch(format!(
                "inner product between layouts {} and {}",
                self.layout, other.layout
            )));
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// `|<self|other>|`
    pub fn overlap(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm())
    }

    /// Same state with subsystems rearranged into `target`'s order.
    pub fn permuted(&self, target: &SubsystemLayout) -> Result<StateVector> {
        if target.len() != self.layout.len()
            || target
                .systems()
                .iter()
                .any(|s| self.layout.dim(&s.label).ok() != Some(s.dim))
        {
            return Err(Error::DimensionMismatch(format!(
                "cannot rearrange {} into {target}",
                self.layout
            )));
        }
        let labels: Vec<&str> = target.labels().collect();
        let offsets = self.layout.offsets(&labels)?;
        let amps = ComplexVector::from_iterator(
            offsets.len(),
            offsets.iter().map(|&o| self.amplitudes[o]),
        );
        Ok(StateVector {
            layout: target.clone(),
            amplitudes: amps,
        })
    }

    /// Amplitudes reshaped into a matrix: rows indexed by `row_labels` (given
    /// order), columns by the remaining labels (layout order).
    pub fn amplitude_matrix<S: AsRef<str>>(&self, row_labels: &[S]) -> Result<ComplexMatrix> {
        let rows = self.layout.offsets(row_labels)?;
        let cols = self.layout.offsets(&self.layout.complement(row_labels))?;
        Ok(ComplexMatrix::from_fn(rows.len(), cols.len(), |i, j| {
            self.amplitudes[rows[i] + cols[j]]
        }))
    }

    /// Inverse of [`amplitude_matrix`](Self::amplitude_matrix).
    pub fn from_amplitude_matrix<S: AsRef<str>>(
        layout: SubsystemLayout,
        row_labels: &[S],
        m: &ComplexMatrix,
    ) -> Result<StateVector> {
        let rows = layout.offsets(row_labels)?;
        let cols = layout.offsets(&layout.complement(row_labels))?;
        if m.shape() != (rows.len(), cols.len()) {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} amplitude matrix for a {}x{} reshape",
                m.nrows(),
                m.ncols(),
                rows.len(),
                cols.len()
            )));
        }
        let mut amps = ComplexVector::zeros(layout.total_dim());
        for (i, &r) in rows.iter().enumerate() {
            for (j, &cc) in cols.iter().enumerate() {
                amps[r + cc] = m[(i, j)];
            }
        }
        StateVector::new(layout, amps)
    }

    /// Reduced state on `keep` (returned in layout order).
    pub fn partial_trace<S: AsRef<str>>(&self, keep: &[S]) -> Result<DensityMatrix> {
        if keep.is_empty() {
            return Err(Error::EmptyKeepSet);
        }
        let keep = self.layout.in_layout_order(keep)?;
        let m = self.amplitude_matrix(&keep)?;
        let rho = numerics::hermitize(&(&m * m.adjoint()));
        Ok(DensityMatrix::from_parts_unchecked(
            self.layout.select(&keep)?,
            rho,
        ))
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from_parts_unchecked(self.layout.clone(), numerics::outer(&self.amplitudes))
    }
}

/// Applies `op` on `labels` to a raw amplitude vector.
pub(crate) fn apply_operator<S: AsRef<str>>(
    layout: &SubsystemLayout,
    amplitudes: &ComplexVector,
    labels: &[S],
    op: &ComplexMatrix,
) -> Result<ComplexVector> {
    let local = layout.offsets(labels)?;
    if op.nrows() != local.len() || op.ncols() != local.len() {
        return Err(Error::DimensionMismatch(format!(
            "{}x{} operator on subsystems of total dimension {}",
            op.nrows(),
            op.ncols(),
            local.len()
        )));
    }
    let rest = layout.offsets(&layout.complement(labels))?;
    let mut out = ComplexVector::zeros(amplitudes.len());
    let mut gathered = ComplexVector::zeros(local.len());
    for &base in &rest {
        for (k, &o) in local.iter().enumerate() {
            gathered[k] = amplitudes[base + o];
        }
        let mapped = op * &gathered;
        for (k, &o) in local.iter().enumerate() {
            out[base + o] = mapped[k];
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qubits(labels: &[&str]) -> SubsystemLayout {
        SubsystemLayout::new(labels.iter().map(|l| (*l, 2))).unwrap()
    }

    fn x() -> ComplexMatrix {
        ComplexMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
    }

    #[test]
    fn tensor_of_basis_states() {
        let a = StateVector::basis(qubits(&["A"]), &[0]).unwrap();
        let b = StateVector::basis(qubits(&["B"]), &[0]).unwrap();
        let ab = a.tensor(&b).unwrap();
        assert_eq!(ab.amplitudes()[0], c(1.0, 0.0));
        assert_eq!(ab.layout().total_dim(), 4);
    }

    #[test]
    fn tensor_plus_zero() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = StateVector::from_vec(qubits(&["A"]), vec![c(s, 0.0), c(s, 0.0)]).unwrap();
        let zero = StateVector::basis(qubits(&["B"]), &[0]).unwrap();
        let v = plus.tensor(&zero).unwrap();
        let expected = [s, 0.0, s, 0.0];
        for (a, e) in v.amplitudes().iter().zip(expected) {
            assert!((a - c(e, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn tensor_label_clash() {
        let a = StateVector::basis(qubits(&["A"]), &[0]).unwrap();
        assert!(matches!(a.tensor(&a), Err(Error::LabelClash(_))));
    }

    #[test]
    fn bit_flip_on_a() {
        let s = StateVector::basis(qubits(&["A", "B"]), &[0, 0]).unwrap();
        let flipped = s.apply_on(&["A"], &x()).unwrap();
        let expected = StateVector::basis(qubits(&["A", "B"]), &[1, 0]).unwrap();
        assert!((flipped.overlap(&expected).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn apply_rejects_non_unitary_and_wrong_size() {
        let s = StateVector::basis(qubits(&["A", "B"]), &[0, 0]).unwrap();
        let mut bad = x();
        bad[(0, 0)] = c(1.0, 0.0);
        assert!(matches!(s.apply_on(&["A"], &bad), Err(Error::NotUnitary { .. })));
        assert!(matches!(
            s.apply_on(&["A"], &numerics::identity(4)),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn product_state_partial_trace() {
        let s = StateVector::basis(qubits(&["A", "B"]), &[0, 1]).unwrap();
        let rho = s.partial_trace(&["B"]).unwrap();
        assert!((rho.matrix()[(1, 1)] - c(1.0, 0.0)).norm() < 1e-15);
        assert!(rho.matrix()[(0, 0)].norm() < 1e-15);
        assert!(matches!(
            s.partial_trace::<&str>(&[]),
            Err(Error::EmptyKeepSet)
        ));
    }

    #[test]
    fn bell_state_marginal_is_maximally_mixed() {
        // (|00> + |11>)/sqrt2: tracing A leaves ½(|0><0| + |1><1|), summed by hand.
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let bell = StateVector::from_vec(
            qubits(&["A", "B"]),
            vec![c(s, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(s, 0.0)],
        )
        .unwrap();
        let rho = bell.partial_trace(&["B"]).unwrap();
        let expected = numerics::identity(2).scale(0.5);
        assert!(numerics::frobenius(&(rho.matrix() - expected)) < 1e-15);
    }

    #[test]
    fn permutation_round_trip() {
        let l = SubsystemLayout::new([("A", 2), ("B", 3)]).unwrap();
        let amps: Vec<C64> = (0..6).map(|i| c(i as f64, 0.0)).collect();
        let s = StateVector::normalized(l.clone(), ComplexVector::from_vec(amps)).unwrap();
        let swapped = SubsystemLayout::new([("B", 3), ("A", 2)]).unwrap();
        let p = s.permuted(&swapped).unwrap();
        // |a=1,b=2> sits at index 5 in (A,B) and at index 2*2+1 = 5 in (B,A)
        assert_eq!(p.amplitudes()[2 * 2 + 1], s.amplitudes()[5]);
        assert_eq!(p.amplitudes()[1], s.amplitudes()[3]);
        assert_eq!(p.permuted(&l).unwrap(), s);
    }
}
