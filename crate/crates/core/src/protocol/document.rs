use std::collections::BTreeMap;
use std::io;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{StateVector, SubsystemLayout};
use crate::numerics::{c, ComplexMatrix, ComplexVector};

use super::model::{channel_labels, party_labels, CoinTossProtocol, CommitmentProtocol, Party, Protocol, Round};

const FORMAT_VERSION: u32 = 1;

type MatrixDoc = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SubsystemDoc {
    label: String,
    dim: usize,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RoundDoc {
    actor: Party,
    matrix: MatrixDoc,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    format_version: u32,
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    subsystems: Vec<SubsystemDoc>,
    states: BTreeMap<String, Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    commit_rounds: Option<Vec<RoundDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    open_rounds: Option<Vec<RoundDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rounds: Option<Vec<RoundDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    outcome_measurements: Option<BTreeMap<String, Vec<MatrixDoc>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    prescribed: Option<[f64; 2]>,
}

/// JSON with objects indented, arrays on one line, and every float written
/// with 17 significant digits so that parsing it back is exact.
pub(crate) struct DocFormatter {
    indent: usize,
    arrays: usize,
    has_value: bool,
}

impl DocFormatter {
    pub(crate) fn new() -> Self {
        DocFormatter {
            indent: 0,
            arrays: 0,
            has_value: false,
        }
    }

    fn newline<W: ?Sized + io::Write>(&self, w: &mut W) -> io::Result<()> {
        w.write_all(b"\n")?;
        for _ in 0..self.indent {
            w.write_all(b"  ")?;
        }
        Ok(())
    }
}

impl serde_json::ser::Formatter for DocFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.arrays += 1;
        w.write_all(b"[")
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.arrays -= 1;
        w.write_all(b"]")
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        if first {
            Ok(())
        } else {
            w.write_all(b",")
        }
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        if self.arrays == 0 {
            self.indent += 1;
            self.has_value = false;
        }
        w.write_all(b"{")
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        if self.arrays == 0 {
            self.indent -= 1;
            if self.has_value {
                self.newline(w)?;
            }
        }
        w.write_all(b"}")
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        if !first {
            w.write_all(b",")?;
        }
        if self.arrays == 0 {
            self.newline(w)?;
        }
        Ok(())
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        w.write_all(if self.arrays == 0 { b": " } else { b":" })
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, _w: &mut W) -> io::Result<()> {
        self.has_value = true;
        Ok(())
    }
}

/// Serializes any value in the document style, with a trailing newline.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, DocFormatter::new());
    value
        .serialize(&mut ser)
        .map_err(|e| Error::Parse(format!("serialization failed: {e}")))?;
    out.push(b'\n');
    String::from_utf8(out).map_err(|e| Error::Parse(e.to_string()))
}

fn matrix_doc(m: &ComplexMatrix) -> MatrixDoc {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

fn state_doc(s: &StateVector) -> Vec<[f64; 2]> {
    s.amplitudes().iter().map(|z| [z.re, z.im]).collect()
}

fn rounds_doc(rounds: &[Round]) -> Vec<RoundDoc> {
    rounds
        .iter()
        .map(|r| RoundDoc {
            actor: r.actor,
            matrix: matrix_doc(&r.unitary),
        })
        .collect()
}

fn subsystems_doc(layout: &SubsystemLayout) -> Vec<SubsystemDoc> {
    layout
        .systems()
        .iter()
        .map(|s| SubsystemDoc {
            label: s.label.clone(),
            dim: s.dim,
        })
        .collect()
}

/// Document text for a protocol.
pub fn serialize_protocol(p: &Protocol) -> Result<String> {
    let doc = match p {
        Protocol::Commitment(p) => Document {
            format_version: FORMAT_VERSION,
            kind: "commitment".into(),
            name: Some(p.name().to_string()),
            subsystems: subsystems_doc(p.layout()),
            states: [
                ("alice0".to_string(), state_doc(p.alice_state(0))),
                ("alice1".to_string(), state_doc(p.alice_state(1))),
                ("bob_init".to_string(), state_doc(p.bob_init())),
            ]
            .into_iter()
            .collect(),
            commit_rounds: Some(rounds_doc(p.commit_rounds())),
            open_rounds: Some(rounds_doc(p.open_rounds())),
            rounds: None,
            outcome_measurements: None,
            prescribed: None,
        },
        Protocol::CoinToss(p) => Document {
            format_version: FORMAT_VERSION,
            kind: "cointoss".into(),
            name: Some(p.name().to_string()),
            subsystems: subsystems_doc(p.layout()),
            states: [
                ("init_a".to_string(), state_doc(p.init_a())),
                ("init_bc".to_string(), state_doc(p.init_bc())),
            ]
            .into_iter()
            .collect(),
            commit_rounds: None,
            open_rounds: None,
            rounds: Some(rounds_doc(p.rounds())),
            outcome_measurements: Some(
                [Party::Alice, Party::Bob]
                    .into_iter()
                    .map(|party| {
                        (
                            party.tag().to_string(),
                            p.outcome_projectors(party).iter().map(matrix_doc).collect(),
                        )
                    })
                    .collect(),
            ),
            prescribed: Some(p.prescribed()),
        },
    };
    to_json_string(&doc)
}

fn parse_matrix(doc: &MatrixDoc, field: &str) -> Result<ComplexMatrix> {
    let n = doc.len();
    if n == 0 {
        return Err(Error::validation(field, "empty matrix"));
    }
    for (i, row) in doc.iter().enumerate() {
        if row.len() != n {
            return Err(Error::validation(
                format!("{field}[{i}]"),
                format!("row has {} entries, expected {n}", row.len()),
            ));
        }
    }
    Ok(ComplexMatrix::from_fn(n, n, |i, j| c(doc[i][j][0], doc[i][j][1])))
}

fn parse_state(states: &BTreeMap<String, Vec<[f64; 2]>>, key: &str, layout: SubsystemLayout) -> Result<StateVector> {
    let field = format!("states.{key}");
    let amps = states
        .get(key)
        .ok_or_else(|| Error::validation(&field, "missing"))?;
    StateVector::new(layout, ComplexVector::from_iterator(amps.len(), amps.iter().map(|p| c(p[0], p[1]))))
        .map_err(|e| Error::validation(field, e.to_string()))
}

fn parse_rounds(rounds: &Option<Vec<RoundDoc>>, field: &str) -> Result<Vec<Round>> {
    let rounds = rounds
        .as_ref()
        .ok_or_else(|| Error::validation(field, "missing"))?;
    rounds
        .iter()
        .enumerate()
        .map(|(i, r)| Ok(Round::new(r.actor, parse_matrix(&r.matrix, &format!("{field}[{i}].matrix"))?)))
        .collect()
}

fn check_keys(states: &BTreeMap<String, Vec<[f64; 2]>>, allowed: &[&str]) -> Result<()> {
    if let Some(extra) = states.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(Error::validation(format!("states.{extra}"), "unexpected state"));
    }
    Ok(())
}

fn forbid<T>(value: &Option<T>, field: &str, kind: &str) -> Result<()> {
    if value.is_some() {
        return Err(Error::validation(field, format!("not allowed for kind `{kind}`")));
    }
    Ok(())
}

/// Parses and validates a protocol document.
pub fn load_protocol(text: &str) -> Result<Protocol> {
    let doc: Document = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if doc.format_version != FORMAT_VERSION {
        return Err(Error::validation(
            "format_version",
            format!("unsupported version {}, expected {FORMAT_VERSION}", doc.format_version),
        ));
    }
    let layout = SubsystemLayout::new(doc.subsystems.iter().map(|s| (s.label.clone(), s.dim)))
        .map_err(|e| Error::validation("subsystems", e.to_string()))?;
    let alice_layout = layout.select(&party_labels(&layout, Party::Alice))?;
    let mut bc = party_labels(&layout, Party::Bob);
    bc.extend(channel_labels(&layout));
    let bc_layout = layout.select(&bc)?;
    let name = doc.name.clone().unwrap_or_else(|| doc.kind.clone());

    match doc.kind.as_str() {
        "commitment" => {
            check_keys(&doc.states, &["alice0", "alice1", "bob_init"])?;
            forbid(&doc.rounds, "rounds", "commitment")?;
            forbid(&doc.outcome_measurements, "outcome_measurements", "commitment")?;
            forbid(&doc.prescribed, "prescribed", "commitment")?;
            let p = CommitmentProtocol::new(
                name,
                layout,
                parse_state(&doc.states, "alice0", alice_layout.clone())?,
                parse_state(&doc.states, "alice1", alice_layout)?,
                parse_state(&doc.states, "bob_init", bc_layout)?,
                parse_rounds(&doc.commit_rounds, "commit_rounds")?,
                parse_rounds(&doc.open_rounds, "open_rounds")?,
            )?;
            Ok(Protocol::Commitment(p))
        }
        "cointoss" => {
            check_keys(&doc.states, &["init_a", "init_bc"])?;
            forbid(&doc.commit_rounds, "commit_rounds", "cointoss")?;
            forbid(&doc.open_rounds, "open_rounds", "cointoss")?;
            let rounds = parse_rounds(&doc.rounds, "rounds")?;
            let measurements = doc
                .outcome_measurements
                .as_ref()
                .ok_or_else(|| Error::validation("outcome_measurements", "missing"))?;
            if let Some(extra) = measurements.keys().find(|k| Party::from_tag(k).is_none()) {
                return Err(Error::validation(format!("outcome_measurements.{extra}"), "unknown party"));
            }
            let projectors = |party: Party| -> Result<[ComplexMatrix; 3]> {
                let field = format!("outcome_measurements.{}", party.tag());
                let list = measurements
                    .get(party.tag())
                    .ok_or_else(|| Error::validation(&field, "missing"))?;
                if list.len() != 3 {
                    return Err(Error::validation(
                        &field,
                        format!("{} projectors, expected 3 (0, 1, invalid)", list.len()),
                    ));
                }
                let parsed = list
                    .iter()
                    .enumerate()
                    .map(|(i, m)| parse_matrix(m, &format!("{field}[{i}]")))
                    .collect::<Result<Vec<_>>>()?;
                Ok(parsed.try_into().expect("three projectors"))
            };
            let outcome_a = projectors(Party::Alice)?;
            let outcome_b = projectors(Party::Bob)?;
            let holder = match rounds.last() {
                Some(r) => r.actor.other(),
                None => {
                    let own = layout.dim_of(&party_labels(&layout, Party::Alice))?;
                    if outcome_a[0].nrows() != own {
                        Party::Alice
                    } else {
                        Party::Bob
                    }
                }
            };
            let p = CoinTossProtocol::new(
                name,
                layout,
                parse_state(&doc.states, "init_a", alice_layout)?,
                parse_state(&doc.states, "init_bc", bc_layout)?,
                rounds,
                outcome_a,
                outcome_b,
                doc.prescribed.unwrap_or([0.5, 0.5]),
                holder,
            )?;
            Ok(Protocol::CoinToss(p))
        }
        other => Err(Error::validation(
            "kind",
            format!("`{other}` is neither `commitment` nor `cointoss`"),
        )),
    }
}
