//! Every numerical threshold used by the crate lives here.

use serde::Serialize;

/// Input validation: Hermiticity, normalization, unitarity, completeness.
pub const VALIDATION: f64 = 1e-9;
/// Residual bound for eigen and singular value decompositions (relative Frobenius).
pub const RECONSTRUCTION: f64 = 1e-10;
/// Residual bound for square roots and polar factors.
pub const SQRT_RECONSTRUCTION: f64 = 1e-9;
/// Agreement between independent routes to the same quantity.
pub const EQUIVALENCE: f64 = 1e-6;
/// Eigenvalues in `[-NEGATIVE_CLAMP, 0)` are treated as roundoff and clamped to zero.
pub const NEGATIVE_CLAMP: f64 = 1e-10;
/// Eigenvalues below this multiple of the largest one are indistinguishable from zero.
pub const NUMERICAL_ZERO: f64 = 1e-14;
/// Channel idleness after commitment is checked at this tolerance (warning only).
pub const CHANNEL_IDLE: f64 = 1e-6;
/// Maximum pairwise fidelity of conditioned states for a last round to be truncated.
pub const TRUNCATION_ORTHOGONALITY: f64 = 1e-6;
/// Eigenvalues at or above this count toward the support of a density matrix.
pub const SUPPORT_CUTOFF: f64 = 1e-9;
/// Outcomes at or below this probability are dropped when conditioning.
pub const NEGLIGIBLE_PROBABILITY: f64 = 1e-12;
/// Default cap on the total Hilbert-space dimension.
pub const DEFAULT_MAX_DIM: usize = 4096;

/// Named tolerance profile, echoed in every report.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub profile: &'static str,
    pub validation: f64,
    pub reconstruction: f64,
    pub sqrt_reconstruction: f64,
    pub equivalence: f64,
    pub truncation_orthogonality: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        profile: "default",
        validation: VALIDATION,
        reconstruction: RECONSTRUCTION,
        sqrt_reconstruction: SQRT_RECONSTRUCTION,
        equivalence: EQUIVALENCE,
        truncation_orthogonality: TRUNCATION_ORTHOGONALITY,
    };

    /// Tighter pass/fail gates for reports; the kernels themselves are unchanged.
    pub const STRICT: Tolerances = Tolerances {
        profile: "strict",
        validation: 1e-11,
        reconstruction: 1e-12,
        sqrt_reconstruction: 1e-11,
        equivalence: 1e-8,
        truncation_orthogonality: 1e-8,
    };

    pub fn by_name(name: &str) -> Option<Tolerances> {
        match name {
            "default" => Some(Self::DEFAULT),
            "strict" => Some(Self::STRICT),
            _ => None,
        }
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Dimension cap in effect: `EPRB_MAX_DIM` if set and parseable, else [`DEFAULT_MAX_DIM`].
pub fn max_dim() -> usize {
    std::env::var("EPRB_MAX_DIM")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&v: &usize| v > 0)
        .unwrap_or(DEFAULT_MAX_DIM)
}
