use crate::error::{Error, Result};
use crate::numerics::{self, ComplexMatrix};

use super::{StateVector, SubsystemLayout};

/// `|ψ> = Σ_k s_k |a_k> ⊗ |b_k>` across a bipartition.
#[derive(Debug, Clone)]
pub struct SchmidtForm {
    /// `s_k = sqrt(λ_k)`, descending; length `min(dim_a, dim_b)`.
    pub coefficients: Vec<f64>,
    /// Columns `|a_k>` on `side_a`.
    pub basis_a: ComplexMatrix,
    /// Columns `|b_k>` on `side_b`.
    pub basis_b: ComplexMatrix,
    /// Labels of the first side, in the order the cut was given.
    pub side_a: SubsystemLayout,
    /// Remaining labels, in layout order.
    pub side_b: SubsystemLayout,
    layout: SubsystemLayout,
}

impl SchmidtForm {
    /// `λ_k = s_k²`
    pub fn weights(&self) -> Vec<f64> {
        self.coefficients.iter().map(|s| s * s).collect()
    }

    pub fn rank(&self, cutoff: f64) -> usize {
        self.coefficients.iter().filter(|&&s| s > cutoff).count()
    }

    pub fn reconstruct(&self) -> Result<StateVector> {
        let k = self.coefficients.len();
        let mut a = self.basis_a.clone();
        for (j, &s) in self.coefficients.iter().enumerate() {
            a.column_mut(j).scale_mut(s);
        }
        let m = a * self.basis_b.columns(0, k).transpose();
        let labels: Vec<&str> = self.side_a.labels().collect();
        StateVector::from_amplitude_matrix(self.layout.clone(), &labels, &m)
    }
}

/// Schmidt decomposition from the SVD of the amplitude matrix reshaped by the cut.
pub fn schmidt<S: AsRef<str>>(state: &StateVector, side_a: &[S]) -> Result<SchmidtForm> {
    let layout = state.layout();
    if side_a.is_empty() || side_a.len() >= layout.len() {
        return Err(Error::InvalidCut(format!(
            "{} of {} subsystems on one side",
            side_a.len(),
            layout.len()
        )));
    }
    for l in side_a {
        if !layout.contains(l.as_ref()) {
            return Err(Error::InvalidCut(format!("unknown label `{}`", l.as_ref())));
        }
    }
    let side_b = layout.complement(side_a);
    let m = state.amplitude_matrix(side_a)?;
    let dec = numerics::svd(&m)?;
    let k = dec.singular_values.len();
    Ok(SchmidtForm {
        coefficients: dec.singular_values,
        basis_a: dec.u.columns(0, k).into_owned(),
        // m = U S V†, so the second-side vectors are the conjugated columns of V.
        basis_b: dec.v.columns(0, k).map(|z| z.conj()),
        side_a: layout.select(side_a)?,
        side_b: layout.select(&side_b)?,
        layout: layout.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::c;

    #[test]
    fn product_state_has_one_coefficient() {
        let l = SubsystemLayout::new([("A", 2), ("B", 3)]).unwrap();
        let s = StateVector::basis(l, &[1, 2]).unwrap();
        let f = schmidt(&s, &["A"]).unwrap();
        assert!((f.coefficients[0] - 1.0).abs() < 1e-14);
        assert!(f.coefficients[1].abs() < 1e-14);
    }

    #[test]
    fn bell_state_has_equal_coefficients() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let l = SubsystemLayout::new([("A", 2), ("B", 2)]).unwrap();
        let bell = StateVector::from_vec(l, vec![c(r, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(r, 0.0)]).unwrap();
        let f = schmidt(&bell, &["B"]).unwrap();
        for s in &f.coefficients {
            assert!((s - r).abs() < 1e-14);
        }
        let back = f.reconstruct().unwrap();
        assert!((back.overlap(&bell).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_degenerate_cuts() {
        let l = SubsystemLayout::new([("A", 2), ("B", 2)]).unwrap();
        let s = StateVector::basis(l, &[0, 0]).unwrap();
        assert!(matches!(schmidt::<&str>(&s, &[]), Err(Error::InvalidCut(_))));
        assert!(matches!(schmidt(&s, &["A", "B"]), Err(Error::InvalidCut(_))));
        assert!(matches!(schmidt(&s, &["Z"]), Err(Error::InvalidCut(_))));
    }
}
