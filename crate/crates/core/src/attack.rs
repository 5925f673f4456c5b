//! Alice's coherent cheating strategy against bit commitment.
//!
//! Alice commits to 0 honestly. Before opening she rotates everything outside
//! Bob's machine by the unitary that brings `|0>_com` as close as possible to
//! `|1>_com`, then opens 1. The rotation is the unitary polar factor of
//! `M₁M₀†`, where `M_b` is the amplitude matrix of `|b>_com` with rows on
//! Alice's side and columns on Bob's; its overlap is `‖M₁M₀†‖₁`, the fidelity
//! of Bob's two commitment marginals.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fidelity;
use crate::hilbert::{DensityMatrix, StateVector};
use crate::numerics::{self, ComplexMatrix};
use crate::protocol::{self, party_labels, round_scope, CommitmentProtocol, Party};
use crate::random;
use crate::tolerance;

/// How well Bob can tell the two commitments apart.
#[derive(Debug, Clone, Serialize)]
pub struct HidingReport {
    /// `F(ρ₀ᶜᵒᵐ, ρ₁ᶜᵒᵐ)` on Bob's subsystems.
    pub fidelity: f64,
    pub fidelity_squared: f64,
    /// `δ = 1 − F`
    pub delta: f64,
    pub trace_distance: f64,
    /// `½ + D/2`
    pub bob_guess_probability: f64,
}

/// Result of constructing (and optionally running) the attack.
#[derive(Debug, Clone, Serialize)]
pub struct AttackReport {
    pub protocol: String,
    /// Subsystems the cheating unitary acts on, in matrix order.
    pub cheat_labels: Vec<String>,
    #[serde(skip)]
    pub cheat_unitary: ComplexMatrix,
    /// `|<1_com| U |0_com>|`, an amplitude.
    pub achieved_overlap: f64,
    /// Probability Bob accepts the flipped opening, from the end-to-end run.
    /// `None` until [`simulate_attack`] runs.
    pub bob_acceptance: Option<f64>,
    /// Acceptance if Alice instead swaps her encodings without touching the channel.
    pub naive_acceptance: Option<f64>,
    /// Change in Bob's marginal caused by the rotation (Frobenius norm).
    pub bob_marginal_drift: f64,
    pub hiding: HidingReport,
}

/// Bob's marginals of the two commitment states.
pub fn commitment_marginals(p: &CommitmentProtocol) -> Result<(DensityMatrix, DensityMatrix)> {
    let (s0, s1) = protocol::commitment_states(p)?;
    let bob = party_labels(p.layout(), Party::Bob);
    if bob.is_empty() {
        return Err(Error::validation("subsystems", "Bob owns no subsystem"));
    }
    Ok((s0.partial_trace(&bob)?, s1.partial_trace(&bob)?))
}

pub fn hiding_report(p: &CommitmentProtocol) -> Result<HidingReport> {
    let (r0, r1) = commitment_marginals(p)?;
    let f = fidelity::fidelity(&r0, &r1)?;
    let d = fidelity::trace_distance(&r0, &r1)?;
    Ok(HidingReport {
        fidelity: f,
        fidelity_squared: f * f,
        delta: 1.0 - f,
        trace_distance: d,
        bob_guess_probability: 0.5 + d / 2.0,
    })
}

/// Unitary polar factor of `M₁M₀†`.
fn align(m0: &ComplexMatrix, m1: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(numerics::polar(&(m1 * m0.adjoint()), true)?.unitary)
}

/// Unitary on `cut` taking `s0` to `s1` when their marginals on the rest agree.
pub fn ideal_cheat_unitary<S: AsRef<str>>(s0: &StateVector, s1: &StateVector, cut: &[S]) -> Result<ComplexMatrix> {
    if s0.layout() != s1.layout() {
        return Err(Error::DimensionMismatch(format!(
            "states on {} and {}",
            s0.layout(),
            s1.layout()
        )));
    }
    let rest = s0.layout().complement(cut);
    if cut.is_empty() || rest.is_empty() {
        return Err(Error::InvalidCut("both sides must be non-empty".into()));
    }
    let r0 = s0.partial_trace(&rest)?;
    let r1 = s1.partial_trace(&rest)?;
    let deviation = numerics::frobenius(&(r0.matrix() - r1.matrix()));
    if deviation > tolerance::EQUIVALENCE {
        return Err(Error::NotIdealHiding { deviation });
    }
    let u = align(&s0.amplitude_matrix(cut)?, &s1.amplitude_matrix(cut)?)?;
    let overlap = s1.overlap(&s0.apply_on(cut, &u)?)?;
    if overlap < 1.0 - 1e-8 {
        return Err(Error::ResidualExceeded {
            what: "ideal cheat overlap",
            residual: 1.0 - overlap,
            bound: 1e-8,
        });
    }
    Ok(u)
}

/// Best rotation of `|0>_com` towards `|1>_com` on Alice's subsystems and the channel.
pub fn optimal_cheat(p: &CommitmentProtocol) -> Result<AttackReport> {
    let (s0, s1) = protocol::commitment_states(p)?;
    let labels = round_scope(p.layout(), Party::Alice);
    let u = align(&s0.amplitude_matrix(&labels)?, &s1.amplitude_matrix(&labels)?)?;
    let rotated = s0.apply_on(&labels, &u)?;
    let bob = party_labels(p.layout(), Party::Bob);
    let drift = numerics::frobenius(&(rotated.partial_trace(&bob)?.matrix() - s0.partial_trace(&bob)?.matrix()));
    Ok(AttackReport {
        protocol: p.name().to_string(),
        cheat_labels: labels,
        cheat_unitary: u,
        achieved_overlap: s1.overlap(&rotated)?.clamp(0.0, 1.0),
        bob_acceptance: None,
        naive_acceptance: None,
        bob_marginal_drift: drift,
        hiding: hiding_report(p)?,
    })
}

/// Commit 0, rotate, open 1, and let Bob verify.
pub fn simulate_attack(p: &CommitmentProtocol) -> Result<AttackReport> {
    let mut report = optimal_cheat(p)?;
    let (s0, _) = protocol::commitment_states(p)?;
    let cheated = s0.apply_on(&report.cheat_labels, &report.cheat_unitary)?;
    let final_state = protocol::apply_rounds(p.layout(), cheated, p.open_rounds(), p.commit_rounds().len(), None)?;
    report.bob_acceptance = Some(protocol::verify_opening(p, &final_state, 1)?);
    let naive = protocol::run_with_claim(p, 0, 1, false)?;
    report.naive_acceptance = Some(protocol::verify_opening(p, &naive.final_state, 1)?);
    Ok(report)
}

/// One point of the hiding/binding tradeoff.
#[derive(Debug, Clone, Serialize)]
pub struct TradeoffPoint {
    pub theta: f64,
    pub achieved_overlap: f64,
    pub bob_acceptance: f64,
    pub fidelity: f64,
    pub trace_distance: f64,
    pub bob_guess_probability: f64,
}

/// Runs the attack on `theta-commit` for each angle.
pub fn theta_sweep(thetas: &[f64]) -> Result<Vec<TradeoffPoint>> {
    thetas
        .iter()
        .map(|&theta| {
            let p = protocol::builtin(
                "theta-commit",
                &[("theta".to_string(), format!("{theta:?}"))].into_iter().collect(),
            )?
            .into_commitment()?;
            let r = simulate_attack(&p)?;
            Ok(TradeoffPoint {
                theta,
                achieved_overlap: r.achieved_overlap,
                bob_acceptance: r.bob_acceptance.unwrap_or(0.0),
                fidelity: r.hiding.fidelity,
                trace_distance: r.hiding.trace_distance,
                bob_guess_probability: r.hiding.bob_guess_probability,
            })
        })
        .collect()
}

/// Largest overlap reached by random unitaries on the cheat subsystems.
pub fn random_cheat_overlap<R: Rng>(p: &CommitmentProtocol, samples: usize, rng: &mut R) -> Result<f64> {
    let (s0, s1) = protocol::commitment_states(p)?;
    let labels = round_scope(p.layout(), Party::Alice);
    let d = p.layout().dim_of(&labels)?;
    let mut best: f64 = 0.0;
    for _ in 0..samples {
        let u = random::unitary(rng, d);
        best = best.max(s1.overlap(&s0.apply_on(&labels, &u)?)?);
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::SubsystemLayout;
    use crate::numerics::c;

    #[test]
    fn product_case() {
        let l = SubsystemLayout::new([("A", 2), ("B", 2)]).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let s0 = StateVector::from_vec(l.clone(), vec![c(r, 0.0), c(r, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        let s1 = StateVector::from_vec(l, vec![c(0.0, 0.0), c(0.0, 0.0), c(r, 0.0), c(r, 0.0)]).unwrap();
        let u = ideal_cheat_unitary(&s0, &s1, &["A"]).unwrap();
        assert!(numerics::unitary_deviation(&u) < 1e-12);
        assert!((s1.overlap(&s0.apply_on(&["A"], &u).unwrap()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn unequal_marginals_are_rejected() {
        let l = SubsystemLayout::new([("A", 2), ("B", 2)]).unwrap();
        let s0 = StateVector::basis(l.clone(), &[0, 0]).unwrap();
        let s1 = StateVector::basis(l, &[0, 1]).unwrap();
        assert!(matches!(ideal_cheat_unitary(&s0, &s1, &["A"]), Err(Error::NotIdealHiding { .. })));
    }
}
