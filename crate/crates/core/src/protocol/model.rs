use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{StateVector, SubsystemLayout};
use crate::numerics::{self, ComplexMatrix};
use crate::tolerance;

/// One of the two protocol participants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Party {
    #[serde(rename = "A")]
    Alice,
    #[serde(rename = "B")]
    Bob,
}

impl Party {
    pub fn other(self) -> Party {
        match self {
            Party::Alice => Party::Bob,
            Party::Bob => Party::Alice,
        }
    }

    /// Label prefix of the party's subsystems.
    pub fn tag(self) -> &'static str {
        match self {
            Party::Alice => "A",
            Party::Bob => "B",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Party::Alice => "Alice",
            Party::Bob => "Bob",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Party> {
        match tag {
            "A" => Some(Party::Alice),
            "B" => Some(Party::Bob),
            _ => None,
        }
    }
}

impl fmt::Display for Party {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Who holds a subsystem.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Owner {
    Party(Party),
    Channel,
}

/// Owner from the label prefix: `X` or `X.<name>` with `X ∈ {A, B, C}`.
pub fn owner_of(label: &str) -> Option<Owner> {
    let head = label.split_once('.').map_or(label, |(h, rest)| if rest.is_empty() { "" } else { h });
    match head {
        "A" => Some(Owner::Party(Party::Alice)),
        "B" => Some(Owner::Party(Party::Bob)),
        "C" => Some(Owner::Channel),
        _ => None,
    }
}

pub fn party_labels(layout: &SubsystemLayout, party: Party) -> Vec<String> {
    layout
        .labels()
        .filter(|l| owner_of(l) == Some(Owner::Party(party)))
        .map(str::to_string)
        .collect()
}

pub fn channel_labels(layout: &SubsystemLayout) -> Vec<String> {
    layout
        .labels()
        .filter(|l| owner_of(l) == Some(Owner::Channel))
        .map(str::to_string)
        .collect()
}

/// Subsystems a round of `actor` acts on: the actor's labels, then the channel's.
pub fn round_scope(layout: &SubsystemLayout, actor: Party) -> Vec<String> {
    let mut scope = party_labels(layout, actor);
    scope.extend(channel_labels(layout));
    scope
}

fn check_ownership(layout: &SubsystemLayout) -> Result<()> {
    for label in layout.labels() {
        if owner_of(label).is_none() {
            return Err(Error::validation(
                format!("subsystems.{label}"),
                "label must be A, B, C or start with `A.`, `B.`, `C.`",
            ));
        }
    }
    Ok(())
}

/// A single message: the actor's unitary on its subsystems plus the channel.
#[derive(Debug, Clone, PartialEq)]
pub struct Round {
    pub actor: Party,
    pub unitary: ComplexMatrix,
}

impl Round {
    pub fn new(actor: Party, unitary: ComplexMatrix) -> Self {
        Round { actor, unitary }
    }
}

fn check_rounds(layout: &SubsystemLayout, groups: &[(&str, &[Round])]) -> Result<()> {
    let mut previous: Option<Party> = None;
    for (field, rounds) in groups {
        for (i, round) in rounds.iter().enumerate() {
            let path = format!("{field}[{i}]");
            let dim = layout.dim_of(&round_scope(layout, round.actor))?;
            if round.unitary.shape() != (dim, dim) {
                return Err(Error::validation(
                    format!("{path}.matrix"),
                    format!(
                        "{}x{} matrix, expected {dim}x{dim} for {} plus channel",
                        round.unitary.nrows(),
                        round.unitary.ncols(),
                        round.actor
                    ),
                ));
            }
            numerics::check_finite(&round.unitary)
                .map_err(|e| Error::validation(format!("{path}.matrix"), e.to_string()))?;
            let deviation = numerics::unitary_deviation(&round.unitary);
            if deviation > tolerance::VALIDATION {
                return Err(Error::validation(
                    format!("{path}.matrix"),
                    format!("not unitary (deviation {deviation:.3e})"),
                ));
            }
            if previous == Some(round.actor) {
                return Err(Error::validation(
                    format!("{path}.actor"),
                    format!("{} acts twice in a row", round.actor),
                ));
            }
            previous = Some(round.actor);
        }
    }
    Ok(())
}

fn check_state_layout(state: &StateVector, expected: &SubsystemLayout, field: &str) -> Result<()> {
    if state.layout() != expected {
        return Err(Error::validation(
            field,
            format!("state lives on {}, expected {expected}", state.layout()),
        ));
    }
    Ok(())
}

/// Layout of the named labels (in the given order) taken from `layout`.
fn sub_layout(layout: &SubsystemLayout, labels: &[String]) -> Result<SubsystemLayout> {
    layout.select(labels)
}

/// Bit commitment: commit phase, then opening phase, fixed round counts.
#[derive(Debug, Clone, PartialEq)]
pub struct CommitmentProtocol {
    name: String,
    layout: SubsystemLayout,
    alice: [StateVector; 2],
    bob_init: StateVector,
    commit_rounds: Vec<Round>,
    open_rounds: Vec<Round>,
    warnings: Vec<String>,
}

impl CommitmentProtocol {
    /// `alice0`, `alice1` live on Alice's labels (layout order); `bob_init`
    /// on Bob's labels followed by the channel's.
    pub fn new(
        name: impl Into<String>,
        layout: SubsystemLayout,
        alice0: StateVector,
        alice1: StateVector,
        bob_init: StateVector,
        commit_rounds: Vec<Round>,
        open_rounds: Vec<Round>,
    ) -> Result<Self> {
        check_ownership(&layout)?;
        let alice_labels = party_labels(&layout, Party::Alice);
        if alice_labels.is_empty() {
            return Err(Error::validation("subsystems", "Alice owns no subsystem"));
        }
        let alice_layout = sub_layout(&layout, &alice_labels)?;
        check_state_layout(&alice0, &alice_layout, "states.alice0")?;
        check_state_layout(&alice1, &alice_layout, "states.alice1")?;
        let mut bc = party_labels(&layout, Party::Bob);
        bc.extend(channel_labels(&layout));
        if bc.is_empty() {
            return Err(Error::validation("subsystems", "Bob and the channel own no subsystem"));
        }
        check_state_layout(&bob_init, &sub_layout(&layout, &bc)?, "states.bob_init")?;
        let overlap = alice0.overlap(&alice1)?;
        if overlap > tolerance::VALIDATION {
            return Err(Error::validation(
                "states.alice1",
                format!("encodings of 0 and 1 must be orthogonal, overlap {overlap:.3e}"),
            ));
        }
        check_rounds(&layout, &[("commit_rounds", &commit_rounds), ("open_rounds", &open_rounds)])?;
        let mut p = CommitmentProtocol {
            name: name.into(),
            layout,
            alice: [alice0, alice1],
            bob_init,
            commit_rounds,
            open_rounds,
            warnings: Vec::new(),
        };
        p.warnings = p.channel_idle_warnings()?;
        Ok(p)
    }

    /// After the commit phase the channel should be back in one fixed pure state.
    fn channel_idle_warnings(&self) -> Result<Vec<String>> {
        let channel = channel_labels(&self.layout);
        if channel.is_empty() {
            return Ok(Vec::new());
        }
        let (s0, s1) = super::commitment_states(self)?;
        let r0 = s0.partial_trace(&channel)?;
        let r1 = s1.partial_trace(&channel)?;
        let mut warnings = Vec::new();
        for (b, r) in [(0, &r0), (1, &r1)] {
            let impurity = 1.0 - r.purity();
            if impurity > tolerance::CHANNEL_IDLE {
                warnings.push(format!(
                    "channel is not in a pure state after committing {b} (1 - purity = {impurity:.3e})"
                ));
            }
        }
        let gap = numerics::frobenius(&(r0.matrix() - r1.matrix()));
        if gap > tolerance::CHANNEL_IDLE {
            warnings.push(format!("channel state after the commit phase depends on the bit ({gap:.3e})"));
        }
        Ok(warnings)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn alice_state(&self, bit: u8) -> &StateVector {
        &self.alice[usize::from(bit != 0)]
    }

    pub fn bob_init(&self) -> &StateVector {
        &self.bob_init
    }

    pub fn commit_rounds(&self) -> &[Round] {
        &self.commit_rounds
    }

    pub fn open_rounds(&self) -> &[Round] {
        &self.open_rounds
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    /// `|alice_b> ⊗ |bob_init>` arranged in layout order.
    pub fn initial_state(&self, bit: u8) -> Result<StateVector> {
        self.alice_state(bit).tensor(&self.bob_init)?.permuted(&self.layout)
    }
}

/// Coin tossing with three-outcome projective measurements at the end.
///
/// At the end of the protocol the channel sits with the receiver of the last
/// round; that party's outcome projectors act on its own labels followed by
/// the channel's. The other party's projectors act on its own labels only.
#[derive(Debug, Clone, PartialEq)]
pub struct CoinTossProtocol {
    name: String,
    layout: SubsystemLayout,
    init_a: StateVector,
    init_bc: StateVector,
    rounds: Vec<Round>,
    outcomes: [[ComplexMatrix; 3]; 2],
    prescribed: [f64; 2],
    final_holder: Party,
}

impl CoinTossProtocol {
    /// `final_holder` must be the receiver of the last round; for a
    /// zero-round protocol either party may hold the channel.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        name: impl Into<String>,
        layout: SubsystemLayout,
        init_a: StateVector,
        init_bc: StateVector,
        rounds: Vec<Round>,
        outcome_a: [ComplexMatrix; 3],
        outcome_b: [ComplexMatrix; 3],
        prescribed: [f64; 2],
        final_holder: Party,
    ) -> Result<Self> {
        check_ownership(&layout)?;
        let alice_layout = sub_layout(&layout, &party_labels(&layout, Party::Alice))?;
        check_state_layout(&init_a, &alice_layout, "states.init_a")?;
        let mut bc = party_labels(&layout, Party::Bob);
        bc.extend(channel_labels(&layout));
        check_state_layout(&init_bc, &sub_layout(&layout, &bc)?, "states.init_bc")?;
        check_rounds(&layout, &[("rounds", &rounds)])?;
        if let Some(last) = rounds.last() {
            if final_holder != last.actor.other() {
                return Err(Error::validation(
                    "outcome_measurements",
                    format!("the channel ends with {}, not {final_holder}", last.actor.other()),
                ));
            }
        }
        if prescribed.iter().any(|p| !(0.0..=1.0).contains(p))
            || (prescribed[0] + prescribed[1] - 1.0).abs() > tolerance::VALIDATION
        {
            return Err(Error::validation("prescribed", "must be two probabilities summing to 1"));
        }
        let p = CoinTossProtocol {
            name: name.into(),
            layout,
            init_a,
            init_bc,
            rounds,
            outcomes: [outcome_a, outcome_b],
            prescribed,
            final_holder,
        };
        for party in [Party::Alice, Party::Bob] {
            p.check_measurement(party)?;
        }
        Ok(p)
    }

    fn check_measurement(&self, party: Party) -> Result<()> {
        let dim = self.layout.dim_of(&self.measurement_scope(party))?;
        let ms = self.outcome_projectors(party);
        let field = |i: usize| format!("outcome_measurements.{}[{i}]", party.tag());
        let mut total = ComplexMatrix::zeros(dim, dim);
        for (i, m) in ms.iter().enumerate() {
            if m.shape() != (dim, dim) {
                return Err(Error::validation(
                    field(i),
                    format!("{}x{} projector, expected {dim}x{dim}", m.nrows(), m.ncols()),
                ));
            }
            numerics::check_finite(m).map_err(|e| Error::validation(field(i), e.to_string()))?;
            let herm = numerics::hermitian_deviation(m);
            let idem = numerics::frobenius(&(m * m - m));
            if herm > tolerance::VALIDATION || idem > tolerance::VALIDATION {
                return Err(Error::validation(field(i), "not an orthogonal projector"));
            }
            for (j, other) in ms.iter().enumerate().skip(i + 1) {
                if numerics::frobenius(&(m * other)) > tolerance::VALIDATION {
                    return Err(Error::validation(field(j), format!("overlaps outcome {i}")));
                }
            }
            total += m;
        }
        if numerics::frobenius(&(total - numerics::identity(dim))) > tolerance::VALIDATION {
            return Err(Error::validation(
                format!("outcome_measurements.{}", party.tag()),
                "projectors do not sum to the identity",
            ));
        }
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn init_a(&self) -> &StateVector {
        &self.init_a
    }

    pub fn init_bc(&self) -> &StateVector {
        &self.init_bc
    }

    pub fn rounds(&self) -> &[Round] {
        &self.rounds
    }

    /// Projectors for outcomes `0`, `1`, `invalid`.
    pub fn outcome_projectors(&self, party: Party) -> &[ComplexMatrix; 3] {
        &self.outcomes[party as usize]
    }

    pub fn prescribed(&self) -> [f64; 2] {
        self.prescribed
    }

    pub fn final_holder(&self) -> Party {
        self.final_holder
    }

    /// Labels the party's outcome projectors act on.
    pub fn measurement_scope(&self, party: Party) -> Vec<String> {
        if party == self.final_holder {
            round_scope(&self.layout, party)
        } else {
            party_labels(&self.layout, party)
        }
    }

    pub fn initial_state(&self) -> Result<StateVector> {
        self.init_a.tensor(&self.init_bc)?.permuted(&self.layout)
    }
}

/// Either protocol kind, as produced by builtins and documents.
#[derive(Debug, Clone, PartialEq)]
pub enum Protocol {
    Commitment(CommitmentProtocol),
    CoinToss(CoinTossProtocol),
}

impl Protocol {
    pub fn name(&self) -> &str {
        match self {
            Protocol::Commitment(p) => p.name(),
            Protocol::CoinToss(p) => p.name(),
        }
    }

    pub fn layout(&self) -> &SubsystemLayout {
        match self {
            Protocol::Commitment(p) => p.layout(),
            Protocol::CoinToss(p) => p.layout(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Protocol::Commitment(_) => "commitment",
            Protocol::CoinToss(_) => "cointoss",
        }
    }

    pub fn into_commitment(self) -> Result<CommitmentProtocol> {
        match self {
            Protocol::Commitment(p) => Ok(p),
            Protocol::CoinToss(p) => Err(Error::validation(
                "kind",
                format!("`{}` is a coin-toss protocol, expected a commitment", p.name()),
            )),
        }
    }

    pub fn into_cointoss(self) -> Result<CoinTossProtocol> {
        match self {
            Protocol::CoinToss(p) => Ok(p),
            Protocol::Commitment(p) => Err(Error::validation(
                "kind",
                format!("`{}` is a commitment protocol, expected a coin toss", p.name()),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ownership_from_prefix() {
        assert_eq!(owner_of("A"), Some(Owner::Party(Party::Alice)));
        assert_eq!(owner_of("A.dice"), Some(Owner::Party(Party::Alice)));
        assert_eq!(owner_of("B.guess"), Some(Owner::Party(Party::Bob)));
        assert_eq!(owner_of("C"), Some(Owner::Channel));
        assert_eq!(owner_of("C."), None);
        assert_eq!(owner_of("AB"), None);
        assert_eq!(owner_of("D"), None);
    }

    #[test]
    fn scope_is_actor_then_channel() {
        let l = SubsystemLayout::new([("C", 2), ("A", 2), ("B", 3), ("A.x", 2)]).unwrap();
        assert_eq!(round_scope(&l, Party::Alice), vec!["A", "A.x", "C"]);
        assert_eq!(round_scope(&l, Party::Bob), vec!["B", "C"]);
    }
}
