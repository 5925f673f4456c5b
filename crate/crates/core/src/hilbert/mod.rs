//! Labeled multi-subsystem state algebra.
//!
//! A [`SubsystemLayout`] names each tensor factor; [`StateVector`] and
//! [`DensityMatrix`] carry one. Operators are applied to named subsets of
//! subsystems in any order, and marginals are taken by naming what to keep.

mod density;
mod entropy;
mod layout;
mod schmidt;
mod state;

pub use density::DensityMatrix;
pub use entropy::{mutual_information, von_neumann_entropy, Reducible};
pub use layout::{Subsystem, SubsystemLayout};
pub use schmidt::{schmidt, SchmidtForm};
pub use state::StateVector;

pub(crate) use state::apply_operator;

/// Reduced state of either a pure or a mixed state.
pub fn partial_trace<R: Reducible, S: AsRef<str>>(state: &R, keep: &[S]) -> crate::Result<DensityMatrix> {
    if keep.is_empty() {
        return Err(crate::Error::EmptyKeepSet);
    }
    let keep: Vec<String> = keep.iter().map(|s| s.as_ref().to_string()).collect();
    state.reduce(&keep)
}
