//! Reports produced by the `eprb` binary.
//!
//! Each report echoes the command, the SHA-256 of its input, the tool
//! version, the tolerance profile and (for audits) the seed, followed by the
//! results. Output is a pure function of those, so reruns are byte-identical.

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::attack::{self, AttackReport, TradeoffPoint};
use crate::bounds::{self, Enumeration, Gain, LedgerTrace};
use crate::cointoss::{self, IdealCheck, InductionReport, OutcomeTable};
use crate::error::{Error, Result};
use crate::fidelity::{self, AuditSummary};
use crate::hilbert::{self, DensityMatrix, SubsystemLayout};
use crate::numerics::{c, ComplexMatrix};
use crate::protocol::{self, party_labels, CoinTossProtocol, CommitmentProtocol, Party, Protocol};
use crate::random;
use crate::tolerance::Tolerances;

pub const TOOL: &str = "eprb";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Settings shared by every command.
#[derive(Debug, Clone)]
pub struct Invocation {
    pub command: Vec<String>,
    pub tolerances: Tolerances,
    pub seed: u64,
    pub snapshots: bool,
}

impl Default for Invocation {
    fn default() -> Self {
        Invocation {
            command: Vec::new(),
            tolerances: Tolerances::DEFAULT,
            seed: 0,
            snapshots: false,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report<T: Serialize> {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: Vec<String>,
    pub input_digest: String,
    pub tolerances: Tolerances,
    pub seed: u64,
    pub warnings: Vec<String>,
    pub results: T,
}

impl<T: Serialize> Report<T> {
    fn new(inv: &Invocation, input_digest: String, warnings: Vec<String>, results: T) -> Self {
        Report {
            tool: TOOL,
            version: VERSION,
            command: inv.command.clone(),
            input_digest,
            tolerances: inv.tolerances,
            seed: inv.seed,
            warnings,
            results,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        protocol::to_json_string(self)
    }

    /// One `path: value` line per leaf.
    pub fn to_text(&self) -> Result<String> {
        let value = serde_json::to_value(self).map_err(|e| Error::Parse(e.to_string()))?;
        let mut out = String::new();
        flatten(&value, String::new(), &mut out);
        Ok(out)
    }
}

fn flatten(v: &Value, path: String, out: &mut String) {
    let join = |key: &str| if path.is_empty() { key.to_string() } else { format!("{path}.{key}") };
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                flatten(x, join(k), out);
            }
        }
        Value::Array(items) if items.iter().all(|x| !x.is_object() && !x.is_array()) => {
            let parts: Vec<String> = items.iter().map(scalar).collect();
            out.push_str(&format!("{path}: [{}]\n", parts.join(", ")));
        }
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                flatten(x, format!("{path}[{i}]"), out);
            }
        }
        _ => out.push_str(&format!("{path}: {}\n", scalar(v))),
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Number(n) => match n.as_f64() {
            Some(x) if !n.is_i64() && !n.is_u64() => format!("{x:.12}"),
            _ => n.to_string(),
        },
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Hex SHA-256 of a byte string.
pub fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Digest of the protocol document, regenerated for builtins.
pub fn protocol_digest(p: &Protocol) -> Result<String> {
    Ok(digest(protocol::serialize_protocol(p)?.as_bytes()))
}

type MatrixDoc = Vec<Vec<[f64; 2]>>;

fn matrix_doc(m: &ComplexMatrix) -> MatrixDoc {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

/// Density matrix from a JSON document: either a bare matrix of `[re, im]`
/// pairs or `{"label": ..., "matrix": ...}`.
pub fn parse_density(text: &str, default_label: &str) -> Result<DensityMatrix> {
    #[derive(serde::Deserialize)]
    #[serde(untagged)]
    enum Input {
        Bare(MatrixDoc),
        Labeled {
            #[serde(default)]
            label: Option<String>,
            matrix: MatrixDoc,
        },
    }
    let input: Input = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let (label, rows) = match input {
        Input::Bare(m) => (default_label.to_string(), m),
        Input::Labeled { label, matrix } => (label.unwrap_or_else(|| default_label.to_string()), matrix),
    };
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(Error::validation("matrix", "must be a non-empty square array of [re, im] pairs"));
    }
    let m = ComplexMatrix::from_fn(n, n, |i, j| c(rows[i][j][0], rows[i][j][1]));
    let layout = SubsystemLayout::single(label, n)?;
    DensityMatrix::new(layout, m).map_err(|e| Error::validation("matrix", e.to_string()))
}

#[derive(Debug, Clone, Serialize)]
pub struct Witnesses {
    pub povm: Vec<MatrixDoc>,
    pub purification0: Vec<[f64; 2]>,
    pub purification1: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize)]
pub struct FidelityResults {
    pub dimension: usize,
    pub closed_form: f64,
    pub purification_overlap: f64,
    pub povm_value: f64,
    pub max_discrepancy: f64,
    /// All three agree within the equivalence tolerance.
    pub consistent: bool,
    pub fidelity_squared: f64,
    pub trace_distance: f64,
    pub guess_probability: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witnesses: Option<Witnesses>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub povm_audit: Option<AuditSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub purification_audit: Option<AuditSummary>,
}

/// Three fidelities of a pair, optional witnesses, optional seeded audits.
pub fn fidelity_report(
    inv: &Invocation,
    rho0: &DensityMatrix,
    rho1: &DensityMatrix,
    input_digest: String,
    witnesses: bool,
    audit_samples: usize,
) -> Result<Report<FidelityResults>> {
    let summary = fidelity::summarize(rho0, rho1)?;
    let witnesses = if witnesses {
        let (_, povm) = fidelity::fidelity_povm(rho0, rho1)?;
        let pair = fidelity::fidelity_purification(rho0, rho1)?;
        let amps = |s: &hilbert::StateVector| s.amplitudes().iter().map(|z| [z.re, z.im]).collect();
        Some(Witnesses {
            povm: povm.elements().iter().map(matrix_doc).collect(),
            purification0: amps(&pair.psi0),
            purification1: amps(&pair.psi1),
        })
    } else {
        None
    };
    let (povm_audit, purification_audit) = if audit_samples > 0 {
        let mut rng = random::rng(inv.seed);
        (
            Some(fidelity::audit_povms(rho0, rho1, audit_samples, &mut rng)?),
            Some(fidelity::audit_purifications(rho0, rho1, audit_samples, &mut rng)?),
        )
    } else {
        (None, None)
    };
    let results = FidelityResults {
        dimension: rho0.dim(),
        closed_form: summary.closed_form,
        purification_overlap: summary.purification_overlap,
        povm_value: summary.povm_value,
        max_discrepancy: summary.max_discrepancy,
        consistent: summary.max_discrepancy <= inv.tolerances.equivalence,
        fidelity_squared: summary.fidelity_squared,
        trace_distance: summary.trace_distance,
        guess_probability: 0.5 + summary.trace_distance / 2.0,
        witnesses,
        povm_audit,
        purification_audit,
    };
    Ok(Report::new(inv, input_digest, Vec::new(), results))
}

/// Bob's two commitment marginals, for `fidelity` on a protocol.
pub fn protocol_marginals(p: &CommitmentProtocol) -> Result<(DensityMatrix, DensityMatrix)> {
    attack::commitment_marginals(p)
}

#[derive(Debug, Clone, Serialize)]
pub struct AttackResults {
    #[serde(flatten)]
    pub attack: AttackReport,
    /// `|achieved_overlap − F| ≤ equivalence tolerance`.
    pub optimal: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Vec<TradeoffPoint>>,
    pub notes: Vec<&'static str>,
}

pub fn attack_report(
    inv: &Invocation,
    p: &CommitmentProtocol,
    input_digest: String,
    sweep: Option<&[f64]>,
) -> Result<Report<AttackResults>> {
    let attack = attack::simulate_attack(p)?;
    let optimal = (attack.achieved_overlap - attack.hiding.fidelity).abs() <= inv.tolerances.equivalence;
    let sweep = sweep.map(attack::theta_sweep).transpose()?;
    let results = AttackResults {
        attack,
        optimal,
        sweep,
        notes: vec![
            "achieved_overlap and fidelity are amplitudes; bob_acceptance and fidelity_squared are probabilities",
            "the commit phase is honest for bit 0; the rotation acts on Alice's subsystems and the channel",
        ],
    };
    Ok(Report::new(inv, input_digest, p.warnings().to_vec(), results))
}

#[derive(Debug, Clone, Serialize)]
pub struct CointossResults {
    pub ideal: IdealCheck,
    pub induction: InductionReport,
}

pub fn cointoss_report(inv: &Invocation, p: &CoinTossProtocol, input_digest: String) -> Result<Report<CointossResults>> {
    let results = CointossResults {
        ideal: cointoss::check_ideal(p)?,
        induction: cointoss::backward_induction(p)?,
    };
    Ok(Report::new(inv, input_digest, Vec::new(), results))
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundRow {
    pub epsilon: f64,
    pub min_rounds: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundsResults {
    pub target: f64,
    pub table: Vec<BoundRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ledger: Option<LedgerTrace>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub enumeration: Option<Enumeration>,
    pub note: &'static str,
}

pub fn bounds_report(
    inv: &Invocation,
    epsilons: &[f64],
    target: f64,
    schedule: Option<(&[Gain], String)>,
) -> Result<Report<BoundsResults>> {
    let table = epsilons
        .iter()
        .map(|&epsilon| {
            Ok(BoundRow {
                epsilon,
                min_rounds: bounds::min_rounds(epsilon, target)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let first = *epsilons
        .first()
        .ok_or_else(|| Error::validation("epsilon", "at least one value is needed"))?;
    let (ledger, input_digest) = match schedule {
        Some((gains, d)) => (Some(bounds::ledger_simulate(gains, first)?), d),
        None => (None, digest(format!("{epsilons:?}/{target:?}").as_bytes())),
    };
    let enumeration = if bounds::min_rounds(first, 1.0)? <= 6 {
        Some(bounds::enumerate_short_schedules(first, &bounds::default_grid(first))?)
    } else {
        None
    };
    let results = BoundsResults {
        target,
        table,
        ledger,
        enumeration,
        note: "a similar N·ε bound on coin-toss cheating probability is conjectural and not checked here",
    };
    Ok(Report::new(inv, input_digest, Vec::new(), results))
}

#[derive(Debug, Clone, Serialize)]
pub struct SnapshotSummary {
    pub round: usize,
    pub actor: Party,
    pub norm: f64,
    /// Entropy of Bob's subsystems in bits.
    pub bob_entropy: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CommitRun {
    pub bit: u8,
    pub norm: f64,
    pub acceptance: f64,
    pub bob_entropy_after_commit: f64,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub snapshots: Vec<SnapshotSummary>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunResults {
    pub protocol: String,
    pub kind: &'static str,
    pub dimension: usize,
    pub subsystems: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub commitment: Vec<CommitRun>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outcome_table: Option<OutcomeTable>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub snapshots: Vec<SnapshotSummary>,
}

fn bob_entropy(state: &hilbert::StateVector) -> Result<f64> {
    let bob = party_labels(state.layout(), Party::Bob);
    if bob.is_empty() {
        return Ok(0.0);
    }
    hilbert::von_neumann_entropy(&state.partial_trace(&bob)?)
}

fn summarize_snapshots(snaps: &[protocol::Snapshot]) -> Result<Vec<SnapshotSummary>> {
    snaps
        .iter()
        .map(|s| {
            Ok(SnapshotSummary {
                round: s.round,
                actor: s.actor,
                norm: s.state.norm(),
                bob_entropy: bob_entropy(&s.state)?,
            })
        })
        .collect()
}

/// Honest execution of either protocol kind.
pub fn run_report(inv: &Invocation, p: &Protocol, input_digest: String) -> Result<Report<RunResults>> {
    let layout = p.layout();
    let mut results = RunResults {
        protocol: p.name().to_string(),
        kind: p.kind(),
        dimension: layout.total_dim(),
        subsystems: layout.systems().iter().map(|s| format!("{}:{}", s.label, s.dim)).collect(),
        commitment: Vec::new(),
        outcome_table: None,
        snapshots: Vec::new(),
    };
    let mut warnings = Vec::new();
    match p {
        Protocol::Commitment(c) => {
            warnings = c.warnings().to_vec();
            for bit in 0..2u8 {
                let trace = protocol::run_honest(c, bit, inv.snapshots)?;
                results.commitment.push(CommitRun {
                    bit,
                    norm: trace.final_state.norm(),
                    acceptance: protocol::verify_opening(c, &trace.final_state, bit)?,
                    bob_entropy_after_commit: bob_entropy(&trace.after_commit)?,
                    snapshots: summarize_snapshots(&trace.snapshots)?,
                });
            }
        }
        Protocol::CoinToss(t) => {
            let mut snaps = Vec::new();
            let state = protocol::final_state(t, inv.snapshots.then_some(&mut snaps))?;
            results.outcome_table = Some(cointoss::outcome_table(t, &state)?);
            results.snapshots = summarize_snapshots(&snaps)?;
        }
    }
    Ok(Report::new(inv, input_digest, warnings, results))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bare_and_labeled_density_inputs() {
        let bare = parse_density("[[[1,0],[0,0]],[[0,0],[0,0]]]", "B").unwrap();
        assert_eq!(bare.layout().labels().next(), Some("B"));
        let labeled = parse_density(r#"{"label":"X","matrix":[[[0.5,0],[0,0]],[[0,0],[0.5,0]]]}"#, "B").unwrap();
        assert_eq!(labeled.layout().labels().next(), Some("X"));
        assert!(parse_density("[[[1,0]]", "B").is_err());
        assert!(matches!(parse_density("[[[2,0]]]", "B"), Err(Error::Validation { .. })));
    }

    #[test]
    fn text_rendering_flattens_paths() {
        let inv = Invocation::default();
        let r = bounds_report(&inv, &[0.5], 1.0, None).unwrap();
        let text = r.to_text().unwrap();
        assert!(text.contains("results.table[0].min_rounds: 2"));
    }
}
