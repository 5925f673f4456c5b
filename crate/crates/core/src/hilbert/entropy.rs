use crate::error::{Error, Result};

use super::{DensityMatrix, StateVector};

/// Anything that can be reduced to a labeled marginal.
pub trait Reducible {
    fn labels(&self) -> Vec<String>;
    fn reduce(&self, keep: &[String]) -> Result<DensityMatrix>;
    /// Entropy of the full state in bits.
    fn entropy(&self) -> Result<f64>;
}

impl Reducible for StateVector {
    fn labels(&self) -> Vec<String> {
        self.layout().labels().map(str::to_string).collect()
    }

    fn reduce(&self, keep: &[String]) -> Result<DensityMatrix> {
        self.partial_trace(keep)
    }

    fn entropy(&self) -> Result<f64> {
        Ok(0.0)
    }
}

impl Reducible for DensityMatrix {
    fn labels(&self) -> Vec<String> {
        self.layout().labels().map(str::to_string).collect()
    }

    fn reduce(&self, keep: &[String]) -> Result<DensityMatrix> {
        self.partial_trace(keep)
    }

    fn entropy(&self) -> Result<f64> {
        von_neumann_entropy(self)
    }
}

/// `S(ρ) = −Σ λ log₂ λ` in bits, with `0·log 0 = 0`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let s: f64 = rho
        .eigenvalues()?
        .into_iter()
        .filter(|&l| l > 0.0)
        .map(|l| -l * l.log2())
        .sum();
    Ok(s.clamp(0.0, (rho.dim() as f64).log2()))
}

/// `I(X:Y) = S(ρ_X) + S(ρ_Y) − S(ρ_XY)` in bits, where `X = side_a` and
/// `Y` is every other subsystem of the state.
pub fn mutual_information<R: Reducible, S: AsRef<str>>(state: &R, side_a: &[S]) -> Result<f64> {
    let labels = state.labels();
    let x: Vec<String> = side_a.iter().map(|s| s.as_ref().to_string()).collect();
    if x.is_empty() || x.len() >= labels.len() || x.iter().any(|l| !labels.contains(l)) {
        return Err(Error::InvalidCut(format!(
            "{x:?} is not a proper subset of {labels:?}"
        )));
    }
    let y: Vec<String> = labels.iter().filter(|l| !x.contains(l)).cloned().collect();
    let sx = von_neumann_entropy(&state.reduce(&x)?)?;
    let sy = von_neumann_entropy(&state.reduce(&y)?)?;
    Ok(sx + sy - state.entropy()?)
}
