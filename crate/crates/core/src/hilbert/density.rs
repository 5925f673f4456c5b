use crate::error::{Error, Result};
use crate::numerics::{self, ComplexMatrix};
use crate::tolerance;

use super::SubsystemLayout;

/// Unit-trace positive semidefinite operator on a labeled product space.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    layout: SubsystemLayout,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity (roundoff clamped).
    pub fn new(layout: SubsystemLayout, matrix: ComplexMatrix) -> Result<Self> {
        let d = layout.total_dim();
        if matrix.shape() != (d, d) {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix for layout {layout} of dimension {d}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        numerics::check_hermitian(&matrix)?;
        let trace = numerics::trace(&matrix).re;
        if (trace - 1.0).abs() > tolerance::VALIDATION {
            return Err(Error::BadTrace { trace });
        }
        let eig = numerics::eig_hermitian(&matrix)?;
        numerics::clamp_psd_spectrum(&eig.eigenvalues)?;
        Ok(DensityMatrix {
            layout,
            matrix: numerics::hermitize(&matrix),
        })
    }

    /// Unlabeled convenience: a single subsystem named `label`.
    pub fn from_matrix(label: &str, matrix: ComplexMatrix) -> Result<Self> {
        let layout = SubsystemLayout::single(label, matrix.nrows())?;
        Self::new(layout, matrix)
    }

    pub(crate) fn from_parts_unchecked(layout: SubsystemLayout, matrix: ComplexMatrix) -> Self {
        debug_assert_eq!(layout.total_dim(), matrix.nrows());
        DensityMatrix { layout, matrix }
    }

    pub fn maximally_mixed(layout: SubsystemLayout) -> Self {
        let d = layout.total_dim();
        DensityMatrix {
            layout,
            matrix: numerics::identity(d).unscale(d as f64),
        }
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// Spectrum, descending, with roundoff-level negatives clamped to zero.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        numerics::clamp_psd_spectrum(&numerics::eig_hermitian(&self.matrix)?.eigenvalues)
    }

    /// `Tr ρ²`
    pub fn purity(&self) -> f64 {
        (&self.matrix * &self.matrix).trace().re
    }

    /// `U ρ U†` for a unitary on the whole space.
    pub fn conjugated(&self, u: &ComplexMatrix) -> Result<DensityMatrix> {
        if u.nrows() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} unitary on a {}-dimensional state",
                u.nrows(),
                u.ncols(),
                self.dim()
            )));
        }
        numerics::check_unitary(u)?;
        Ok(DensityMatrix {
            layout: self.layout.clone(),
            matrix: numerics::hermitize(&(u * &self.matrix * u.adjoint())),
        })
    }

    /// Reduced state on `keep` (returned in layout order).
    pub fn partial_trace<S: AsRef<str>>(&self, keep: &[S]) -> Result<DensityMatrix> {
        if keep.is_empty() {
            return Err(Error::EmptyKeepSet);
        }
        let keep = self.layout.in_layout_order(keep)?;
        let kept = self.layout.offsets(&keep)?;
        let traced = self.layout.offsets(&self.layout.complement(&keep))?;
        let out = ComplexMatrix::from_fn(kept.len(), kept.len(), |i, j| {
            traced
                .iter()
                .map(|&t| self.matrix[(kept[i] + t, kept[j] + t)])
                .sum()
        });
        Ok(DensityMatrix {
            layout: self.layout.select(&keep)?,
            matrix: numerics::hermitize(&out),
        })
    }

    pub(crate) fn check_same_dim(&self, other: &DensityMatrix) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(format!(
                "density matrices of dimension {} and {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(())
    }
}
