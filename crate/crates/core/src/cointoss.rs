//! Ideal coin tossing and the last-round truncation argument.
//!
//! Before sending the last message, its sender can already measure the
//! outcome: pull its final projectors back through its own last unitary.
//! If the receiver's states conditioned on those outcomes have orthogonal
//! supports, the receiver can read the outcome without the last message, so
//! the round can be dropped without changing the outcome table. Repeating
//! down to zero rounds leaves two parties with correlated outcomes and no
//! communication, which a product initial state cannot provide.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fidelity;
use crate::hilbert::{self, DensityMatrix, StateVector, SubsystemLayout};
use crate::numerics::{self, ComplexMatrix, ComplexVector};
use crate::protocol::{self, ops, party_labels, round_scope, CoinTossProtocol, Party};
use crate::tolerance;

/// Largest receiver-state dimension whose matrices are written into reports.
const REPORTED_MATRIX_DIM: usize = 16;

pub const OUTCOMES: [&str; 3] = ["0", "1", "invalid"];

/// `table[x][y]` = probability that Alice outputs `x` and Bob outputs `y`.
pub type OutcomeTable = [[f64; 3]; 3];

/// Joint outcome table of both parties' final measurements on `state`.
pub fn outcome_table(p: &CoinTossProtocol, state: &StateVector) -> Result<OutcomeTable> {
    let layout = p.layout();
    let scope_a = p.measurement_scope(Party::Alice);
    let scope_b = p.measurement_scope(Party::Bob);
    let mut table = [[0.0; 3]; 3];
    for (x, pa) in p.outcome_projectors(Party::Alice).iter().enumerate() {
        let va = state.apply_operator(&scope_a, pa)?;
        for (y, pb) in p.outcome_projectors(Party::Bob).iter().enumerate() {
            let v = hilbert::apply_operator(layout, &va, &scope_b, pb)?;
            table[x][y] = v.norm_squared();
        }
    }
    Ok(table)
}

fn table_deviation(a: &OutcomeTable, b: &OutcomeTable) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn binary_entropy(p: [f64; 2]) -> f64 {
    p.iter().filter(|&&x| x > 0.0).map(|&x| -x * x.log2()).sum()
}

fn matrix_pairs(m: &ComplexMatrix) -> Vec<Vec<[f64; 2]>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

/// Receiver state given one outcome of the sender's early measurement.
#[derive(Debug, Clone, Serialize)]
pub struct ConditionedState {
    pub outcome: &'static str,
    pub probability: f64,
    pub rank: usize,
    pub eigenvalues: Vec<f64>,
    /// Written only for small receivers.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrix: Option<Vec<Vec<[f64; 2]>>>,
    #[serde(skip)]
    pub state: DensityMatrix,
}

#[derive(Debug, Clone, Serialize)]
pub struct PairFidelity {
    pub outcomes: [&'static str; 2],
    pub fidelity: f64,
}

/// Everything learned by conditioning on the last sender's outcome.
#[derive(Debug, Clone, Serialize)]
pub struct Conditioning {
    /// 1-based index of the round being examined.
    pub round: usize,
    pub conditioning: Party,
    pub receiver: Party,
    /// Indexed like [`OUTCOMES`]; omitted outcomes count as 0.
    pub probabilities: [f64; 3],
    pub states: Vec<ConditionedState>,
    pub pairwise: Vec<PairFidelity>,
    pub max_fidelity: f64,
    /// Sender's projectors on its labels and the channel, before the round.
    #[serde(skip)]
    pub pulled_back: [ComplexMatrix; 3],
    #[serde(skip)]
    pub pre_state: StateVector,
}

/// Conditions on the sender's outcome just before round `round`, which
/// must be the last one.
pub fn conditioned_states(p: &CoinTossProtocol, round: usize) -> Result<Conditioning> {
    let n = p.rounds().len();
    if round == 0 || round != n {
        return Err(Error::LastRoundActorMismatch { round, rounds: n });
    }
    let layout = p.layout();
    let last = &p.rounds()[n - 1];
    let sender = last.actor;
    let receiver = sender.other();
    let scope = round_scope(layout, sender);
    let measured = p.measurement_scope(sender);
    if let Some(outside) = measured.iter().find(|l| !scope.contains(l)) {
        return Err(Error::PullBackScope {
            party: sender.name(),
            round,
            reason: format!("`{outside}` is not in the sender's hands"),
        });
    }

    let u = &last.unitary;
    let mut pulled = Vec::with_capacity(3);
    for proj in p.outcome_projectors(sender) {
        let lifted = ops::embed(layout, &scope, &measured, proj)?;
        pulled.push(numerics::hermitize(&(u.adjoint() * lifted * u)));
    }
    let pulled_back: [ComplexMatrix; 3] = pulled.try_into().expect("three outcomes");

    let pre_state = protocol::apply_rounds(layout, p.initial_state()?, &p.rounds()[..n - 1], 0, None)?;
    let held = party_labels(layout, receiver);
    let mut probabilities = [0.0; 3];
    let mut states = Vec::new();
    for (x, proj) in pulled_back.iter().enumerate() {
        let v = pre_state.apply_operator(&scope, proj)?;
        let prob = v.norm_squared();
        probabilities[x] = prob;
        if prob <= tolerance::NEGLIGIBLE_PROBABILITY {
            continue;
        }
        let rho = StateVector::normalized(layout.clone(), v)?.partial_trace(&held)?;
        let eigenvalues = rho.eigenvalues()?;
        states.push(ConditionedState {
            outcome: OUTCOMES[x],
            probability: prob,
            rank: eigenvalues.iter().filter(|&&l| l >= tolerance::SUPPORT_CUTOFF).count(),
            eigenvalues,
            matrix: (rho.dim() <= REPORTED_MATRIX_DIM).then(|| matrix_pairs(rho.matrix())),
            state: rho,
        });
    }

    let mut pairwise = Vec::new();
    for i in 0..states.len() {
        for j in i + 1..states.len() {
            pairwise.push(PairFidelity {
                outcomes: [states[i].outcome, states[j].outcome],
                fidelity: fidelity::fidelity(&states[i].state, &states[j].state)?,
            });
        }
    }
    let max_fidelity = pairwise.iter().map(|f| f.fidelity).fold(0.0, f64::max);
    Ok(Conditioning {
        round,
        conditioning: sender,
        receiver,
        probabilities,
        states,
        pairwise,
        max_fidelity,
        pulled_back,
        pre_state,
    })
}

/// Orthonormal bases of nearly orthogonal subspaces, symmetrically orthogonalized.
fn lowdin(bases: &[ComplexMatrix]) -> Result<Vec<ComplexMatrix>> {
    let d = bases[0].nrows();
    let total: usize = bases.iter().map(|b| b.ncols()).sum();
    let mut joined = ComplexMatrix::zeros(d, total);
    let mut at = 0;
    for b in bases {
        joined.columns_mut(at, b.ncols()).copy_from(b);
        at += b.ncols();
    }
    let gram = numerics::hermitize(&(joined.adjoint() * &joined));
    let ortho = joined * numerics::psd_pinv_sqrt(&gram, tolerance::SUPPORT_CUTOFF)?;
    let mut out = Vec::with_capacity(bases.len());
    let mut at = 0;
    for b in bases {
        out.push(ortho.columns(at, b.ncols()).into_owned());
        at += b.ncols();
    }
    Ok(out)
}

/// A successful truncation with its dual-execution check.
#[derive(Debug, Clone)]
pub struct Truncation {
    pub protocol: CoinTossProtocol,
    pub conditioning: Conditioning,
    pub table_before: OutcomeTable,
    pub table_after: OutcomeTable,
    pub table_deviation: f64,
}

/// Drops the last round.
///
/// The receiver's new measurement projects onto the supports of its
/// conditioned states, with the remaining space assigned to `invalid`; the
/// sender's new measurement is its pulled-back projectors. Both protocols
/// are executed and their outcome tables must agree.
pub fn truncate_last_round(p: &CoinTossProtocol) -> Result<Truncation> {
    let n = p.rounds().len();
    let cond = conditioned_states(p, n)?;
    truncate_with(p, cond)
}

fn truncate_with(p: &CoinTossProtocol, cond: Conditioning) -> Result<Truncation> {
    if cond.max_fidelity > tolerance::TRUNCATION_ORTHOGONALITY {
        return Err(Error::TruncationUnsound {
            max_fidelity: cond.max_fidelity,
        });
    }
    let layout = p.layout();
    let receiver = cond.receiver;
    let dim = layout.dim_of(&party_labels(layout, receiver))?;

    let mut present = Vec::new();
    let mut bases = Vec::new();
    for s in &cond.states {
        if let Some(b) = numerics::support_basis(s.state.matrix(), tolerance::SUPPORT_CUTOFF)? {
            present.push(OUTCOMES.iter().position(|o| *o == s.outcome).expect("known outcome"));
            bases.push(b);
        }
    }
    let mut receiver_ms = [
        ComplexMatrix::zeros(dim, dim),
        ComplexMatrix::zeros(dim, dim),
        ComplexMatrix::zeros(dim, dim),
    ];
    if !bases.is_empty() {
        for (x, q) in present.into_iter().zip(lowdin(&bases)?) {
            receiver_ms[x] = numerics::hermitize(&(&q * q.adjoint()));
        }
    }
    receiver_ms[2] = numerics::hermitize(&(numerics::identity(dim) - &receiver_ms[0] - &receiver_ms[1]));

    let sender_ms = cond.pulled_back.clone();
    let (outcome_a, outcome_b) = match receiver {
        Party::Alice => (receiver_ms, sender_ms),
        Party::Bob => (sender_ms, receiver_ms),
    };
    let n = p.rounds().len();
    let truncated = CoinTossProtocol::new(
        p.name(),
        layout.clone(),
        p.init_a().clone(),
        p.init_bc().clone(),
        p.rounds()[..n - 1].to_vec(),
        outcome_a,
        outcome_b,
        p.prescribed(),
        cond.conditioning,
    )?;

    let table_before = outcome_table(p, &protocol::final_state(p, None)?)?;
    let table_after = outcome_table(&truncated, &protocol::final_state(&truncated, None)?)?;
    let deviation = table_deviation(&table_before, &table_after);
    if deviation > tolerance::VALIDATION {
        return Err(Error::TruncationMismatch { deviation });
    }
    Ok(Truncation {
        protocol: truncated,
        conditioning: cond,
        table_before,
        table_after,
        table_deviation: deviation,
    })
}

/// Honest-run diagnostics against the ideal coin-toss conditions.
#[derive(Debug, Clone, Serialize)]
pub struct IdealCheck {
    pub table: OutcomeTable,
    /// Alice's and Bob's outcome distributions.
    pub alice: [f64; 3],
    pub bob: [f64; 3],
    pub prescribed: [f64; 2],
    /// Probability that the two outcomes differ.
    pub disagreement: f64,
    pub agreement_ok: bool,
    pub distribution_ok: bool,
    pub invalid_ok: bool,
    /// Largest fidelity between the receiver's states conditioned on the
    /// last sender's outcome; `None` for a zero-round protocol.
    pub last_round_max_fidelity: Option<f64>,
    pub last_round_ok: bool,
    pub ideal: bool,
}

pub fn check_ideal(p: &CoinTossProtocol) -> Result<IdealCheck> {
    let table = outcome_table(p, &protocol::final_state(p, None)?)?;
    let mut alice = [0.0; 3];
    let mut bob = [0.0; 3];
    let mut disagreement = 0.0;
    for (x, row) in table.iter().enumerate() {
        for (y, &v) in row.iter().enumerate() {
            alice[x] += v;
            bob[y] += v;
            if x != y {
                disagreement += v;
            }
        }
    }
    let prescribed = p.prescribed();
    let tol = tolerance::VALIDATION;
    let distribution_ok = (0..2).all(|x| (alice[x] - prescribed[x]).abs() <= tol && (bob[x] - prescribed[x]).abs() <= tol);
    let invalid_ok = alice[2] <= tol && bob[2] <= tol;
    let agreement_ok = disagreement <= tol;
    let last_round_max_fidelity = match p.rounds().len() {
        0 => None,
        n => Some(conditioned_states(p, n)?.max_fidelity),
    };
    let last_round_ok = last_round_max_fidelity.is_none_or(|f| f <= tolerance::TRUNCATION_ORTHOGONALITY);
    Ok(IdealCheck {
        table,
        alice,
        bob,
        prescribed,
        disagreement,
        agreement_ok,
        distribution_ok,
        invalid_ok,
        last_round_max_fidelity,
        last_round_ok,
        ideal: agreement_ok && distribution_ok && invalid_ok && last_round_ok,
    })
}

/// One step of the induction.
#[derive(Debug, Clone, Serialize)]
pub struct InductionRecord {
    #[serde(flatten)]
    pub conditioning: Conditioning,
    pub truncated: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table_deviation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict")]
pub enum Verdict {
    /// Every round was dropped, leaving correlated outcomes without communication.
    LemmaContradiction {
        truncated_rounds: usize,
        /// Mutual information between Alice and Bob-plus-channel in the initial state.
        initial_mutual_information: f64,
        /// Entropy of the prescribed outcome, which ideal agreement would share.
        prescribed_information: f64,
        /// Mutual information between the registers Alice measures in the
        /// zero-round protocol and everything else. Nonzero only when the
        /// channel carried correlations before the first round.
        final_cut_information: f64,
    },
    /// Conditioning before `round` left the receiver's states overlapping.
    NotIdealAtRound {
        round: usize,
        max_fidelity: f64,
        outcomes: [&'static str; 2],
    },
    StructuralFailure { round: usize, reason: String },
}

#[derive(Debug, Clone, Serialize)]
pub struct InductionReport {
    pub protocol: String,
    pub rounds: usize,
    pub records: Vec<InductionRecord>,
    #[serde(flatten)]
    pub verdict: Verdict,
}

/// Truncates rounds from the end until one cannot be dropped or none remain.
pub fn backward_induction(p: &CoinTossProtocol) -> Result<InductionReport> {
    let rounds = p.rounds().len();
    let mut records = Vec::new();
    let mut current = p.clone();
    let verdict = loop {
        let n = current.rounds().len();
        if n == 0 {
            break zero_round_verdict(&current, rounds)?;
        }
        let cond = match conditioned_states(&current, n) {
            Ok(c) => c,
            Err(e) => {
                break Verdict::StructuralFailure {
                    round: n,
                    reason: e.to_string(),
                }
            }
        };
        if cond.max_fidelity > tolerance::TRUNCATION_ORTHOGONALITY {
            let worst = cond
                .pairwise
                .iter()
                .max_by(|a, b| a.fidelity.total_cmp(&b.fidelity))
                .expect("a positive fidelity needs a pair");
            let verdict = Verdict::NotIdealAtRound {
                round: n,
                max_fidelity: cond.max_fidelity,
                outcomes: worst.outcomes,
            };
            records.push(InductionRecord {
                conditioning: cond,
                truncated: false,
                table_deviation: None,
            });
            break verdict;
        }
        match truncate_with(&current, cond.clone()) {
            Ok(t) => {
                records.push(InductionRecord {
                    conditioning: t.conditioning,
                    truncated: true,
                    table_deviation: Some(t.table_deviation),
                });
                current = t.protocol;
            }
            Err(e) if e.is_numerical_failure() => return Err(e),
            Err(e) => {
                records.push(InductionRecord {
                    conditioning: cond,
                    truncated: false,
                    table_deviation: None,
                });
                break Verdict::StructuralFailure {
                    round: n,
                    reason: e.to_string(),
                };
            }
        }
    };
    Ok(InductionReport {
        protocol: p.name().to_string(),
        rounds,
        records,
        verdict,
    })
}

fn zero_round_verdict(p: &CoinTossProtocol, truncated_rounds: usize) -> Result<Verdict> {
    let prescribed_information = binary_entropy(p.prescribed());
    if prescribed_information <= tolerance::VALIDATION {
        return Ok(Verdict::StructuralFailure {
            round: 0,
            reason: "the prescribed outcome is deterministic, so no correlation is required".into(),
        });
    }
    let initial = p.initial_state()?;
    let alice = party_labels(p.layout(), Party::Alice);
    let initial_mutual_information = hilbert::mutual_information(&initial, &alice)?;
    let measured = p.measurement_scope(Party::Alice);
    let final_cut_information = if measured.len() < p.layout().len() {
        hilbert::mutual_information(&initial, &measured)?
    } else {
        0.0
    };
    Ok(Verdict::LemmaContradiction {
        truncated_rounds,
        initial_mutual_information,
        prescribed_information,
        final_cut_information,
    })
}

/// A unitary on named subsystems of one side.
#[derive(Debug, Clone)]
pub struct LocalOp {
    pub labels: Vec<String>,
    pub unitary: ComplexMatrix,
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaStep {
    pub side: Party,
    pub labels: Vec<String>,
    pub mutual_information: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaTrace {
    pub initial_mutual_information: f64,
    pub steps: Vec<LemmaStep>,
    pub max_mutual_information: f64,
}

/// Applies local unitaries alternately (Alice first) to `init_a ⊗ init_b`
/// and records the mutual information across the cut after each one.
pub fn lemma_check(init_a: &StateVector, init_b: &StateVector, ops_a: &[LocalOp], ops_b: &[LocalOp]) -> Result<LemmaTrace> {
    let side_a: Vec<String> = init_a.layout().labels().map(str::to_string).collect();
    let side_b: Vec<String> = init_b.layout().labels().map(str::to_string).collect();
    for (side, ops, own) in [("Alice", ops_a, &side_a), ("Bob", ops_b, &side_b)] {
        for op in ops {
            if op.labels.is_empty() || op.labels.iter().any(|l| !own.contains(l)) {
                return Err(Error::NonLocalOperation {
                    side,
                    labels: op.labels.clone(),
                });
            }
        }
    }
    let mut state = init_a.tensor(init_b)?;
    let initial_mutual_information = hilbert::mutual_information(&state, &side_a)?;
    let mut steps = Vec::new();
    for k in 0..ops_a.len().max(ops_b.len()) {
        for (party, ops) in [(Party::Alice, ops_a), (Party::Bob, ops_b)] {
            if let Some(op) = ops.get(k) {
                state = state.apply_on(&op.labels, &op.unitary)?;
                steps.push(LemmaStep {
                    side: party,
                    labels: op.labels.clone(),
                    mutual_information: hilbert::mutual_information(&state, &side_a)?,
                });
            }
        }
    }
    let max_mutual_information = steps
        .iter()
        .map(|s| s.mutual_information)
        .fold(initial_mutual_information, f64::max);
    Ok(LemmaTrace {
        initial_mutual_information,
        steps,
        max_mutual_information,
    })
}

/// Product of labeled single-system states, for building lemma inputs.
pub fn product_state(factors: &[(&str, ComplexVector)]) -> Result<StateVector> {
    let mut state: Option<StateVector> = None;
    for (label, v) in factors {
        let s = StateVector::normalized(SubsystemLayout::single(*label, v.len())?, v.clone())?;
        state = Some(match state {
            None => s,
            Some(acc) => acc.tensor(&s)?,
        });
    }
    state.ok_or_else(|| Error::validation("factors", "empty product"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::builtin;
    use std::collections::BTreeMap;

    fn toy(rounds: usize) -> CoinTossProtocol {
        let params: BTreeMap<String, String> = [("rounds".to_string(), rounds.to_string())].into_iter().collect();
        builtin("orthogonal-toy", &params).unwrap().into_cointoss().unwrap()
    }

    #[test]
    fn toy_is_ideal() {
        let check = check_ideal(&toy(4)).unwrap();
        assert!(check.ideal, "{check:?}");
        assert!((check.alice[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn conditioning_requires_last_round() {
        assert!(matches!(
            conditioned_states(&toy(4), 3),
            Err(Error::LastRoundActorMismatch { round: 3, rounds: 4 })
        ));
        assert!(conditioned_states(&toy(0), 0).is_err());
    }

    #[test]
    fn single_truncation_reaches_zero_rounds() {
        let t = truncate_last_round(&toy(1)).unwrap();
        assert!(t.protocol.rounds().is_empty());
        assert!(t.table_deviation < 1e-12);
    }

    #[test]
    fn zero_rounds_contradiction() {
        let report = backward_induction(&toy(0)).unwrap();
        assert!(report.records.is_empty());
        assert!(matches!(report.verdict, Verdict::LemmaContradiction { truncated_rounds: 0, .. }));
    }
}
