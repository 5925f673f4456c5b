use crate::error::{Error, Result};
use crate::hilbert::{StateVector, SubsystemLayout};
use crate::numerics::{self, ComplexMatrix};
use crate::tolerance;

use super::model::{party_labels, round_scope, CoinTossProtocol, CommitmentProtocol, Party, Round};

/// Joint state right after a round.
#[derive(Debug, Clone)]
pub struct Snapshot {
    /// 1-based position in the full round sequence.
    pub round: usize,
    pub actor: Party,
    pub state: StateVector,
}

/// Checkpoints of one honest commitment run.
#[derive(Debug, Clone)]
pub struct ExecutionTrace {
    pub committed: u8,
    pub claimed: u8,
    pub initial: StateVector,
    /// End of the commit phase.
    pub after_commit: StateVector,
    /// End of the opening phase.
    pub final_state: StateVector,
    /// Empty unless requested.
    pub snapshots: Vec<Snapshot>,
}

/// Applies `rounds` in order; round numbers in snapshots start at `first + 1`.
pub fn apply_rounds(
    layout: &SubsystemLayout,
    mut state: StateVector,
    rounds: &[Round],
    first: usize,
    mut snapshots: Option<&mut Vec<Snapshot>>,
) -> Result<StateVector> {
    for (i, round) in rounds.iter().enumerate() {
        state = state.apply_on(&round_scope(layout, round.actor), &round.unitary)?;
        let drift = (state.norm() - 1.0).abs();
        if drift > tolerance::VALIDATION {
            return Err(Error::ResidualExceeded {
                what: "norm after round",
                residual: drift,
                bound: tolerance::VALIDATION,
            });
        }
        if let Some(s) = snapshots.as_deref_mut() {
            s.push(Snapshot {
                round: first + i + 1,
                actor: round.actor,
                state: state.clone(),
            });
        }
    }
    Ok(state)
}

/// Honest run committing and opening `bit`.
pub fn run_honest(p: &CommitmentProtocol, bit: u8, snapshots: bool) -> Result<ExecutionTrace> {
    run_with_claim(p, bit, bit, snapshots)
}

/// The two end-of-commit joint states `|0>_com`, `|1>_com`.
pub fn commitment_states(p: &CommitmentProtocol) -> Result<(StateVector, StateVector)> {
    let commit = |b| apply_rounds(p.layout(), p.initial_state(b)?, p.commit_rounds(), 0, None);
    Ok((commit(0)?, commit(1)?))
}

/// Final joint state of the honest run for `bit`; Bob accepts a claim of
/// `bit` by projecting onto it.
pub fn honest_final(p: &CommitmentProtocol, bit: u8) -> Result<StateVector> {
    let after = apply_rounds(p.layout(), p.initial_state(bit)?, p.commit_rounds(), 0, None)?;
    apply_rounds(p.layout(), after, p.open_rounds(), p.commit_rounds().len(), None)
}

/// Probability that Bob accepts `claimed` on `final_state`.
pub fn verify_opening(p: &CommitmentProtocol, final_state: &StateVector, claimed: u8) -> Result<f64> {
    if final_state.layout() != p.layout() {
        return Err(Error::DimensionMismatch(format!(
            "final state on {}, protocol layout is {}",
            final_state.layout(),
            p.layout()
        )));
    }
    let reference = honest_final(p, claimed)?;
    let amplitude = reference.overlap(final_state)?;
    Ok((amplitude * amplitude).clamp(0.0, 1.0))
}

/// Unitary on Alice's labels exchanging her two encodings and acting as the
/// identity on their orthogonal complement.
pub fn claim_switch(p: &CommitmentProtocol) -> ComplexMatrix {
    let a0 = p.alice_state(0).amplitudes();
    let a1 = p.alice_state(1).amplitudes();
    let d = a0.len();
    numerics::identity(d) - numerics::outer(a0) - numerics::outer(a1) + a1 * a0.adjoint() + a0 * a1.adjoint()
}

/// Commits `committed` honestly, then opens as if the bit were `claimed`.
///
/// When the two differ, Alice swaps her encodings at the start of the opening
/// phase without touching the channel. This is the naive way of changing her
/// mind, as opposed to the coherent attack in [`crate::attack`].
pub fn run_with_claim(p: &CommitmentProtocol, committed: u8, claimed: u8, snapshots: bool) -> Result<ExecutionTrace> {
    let layout = p.layout();
    let mut snaps = Vec::new();
    let initial = p.initial_state(committed)?;
    let after_commit = apply_rounds(layout, initial.clone(), p.commit_rounds(), 0, snapshots.then_some(&mut snaps))?;
    let mut state = after_commit.clone();
    if committed != claimed {
        state = state.apply_on(&party_labels(layout, Party::Alice), &claim_switch(p))?;
    }
    let final_state = apply_rounds(
        layout,
        state,
        p.open_rounds(),
        p.commit_rounds().len(),
        snapshots.then_some(&mut snaps),
    )?;
    Ok(ExecutionTrace {
        committed,
        claimed,
        initial,
        after_commit,
        final_state,
        snapshots: snaps,
    })
}

/// Honest coin-toss run; snapshots are collected into `snapshots` if given.
pub fn final_state(p: &CoinTossProtocol, snapshots: Option<&mut Vec<Snapshot>>) -> Result<StateVector> {
    apply_rounds(p.layout(), p.initial_state()?, p.rounds(), 0, snapshots)
}
