use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::FRAC_PI_4;

use crate::error::{Error, Result};
use crate::hilbert::{StateVector, SubsystemLayout};
use crate::numerics::{self, c, ComplexMatrix, ComplexVector};
use crate::tolerance;

use super::exec;
use super::model::{
    channel_labels, party_labels, round_scope, CoinTossProtocol, CommitmentProtocol, Party, Protocol, Round,
};
use super::ops;

/// Names accepted by [`builtin`].
pub fn builtin_names() -> &'static [&'static str] {
    &["bb84-commit", "direct-send", "theta-commit", "orthogonal-toy", "coin-from-commit"]
}

struct Params<'a> {
    values: &'a BTreeMap<String, String>,
    used: BTreeSet<&'a str>,
}

impl<'a> Params<'a> {
    fn new(values: &'a BTreeMap<String, String>) -> Self {
        Params {
            values,
            used: BTreeSet::new(),
        }
    }

    fn raw(&mut self, key: &'a str) -> Option<&'a str> {
        self.used.insert(key);
        self.values.get(key).map(String::as_str)
    }

    fn f64(&mut self, key: &'a str, default: f64) -> Result<f64> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => v
                .trim()
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::BadParams(format!("{key}={v} is not a finite number"))),
        }
    }

    fn usize(&mut self, key: &'a str, default: usize) -> Result<usize> {
        match self.raw(key) {
            None => Ok(default),
            Some(v) => v
                .trim()
                .parse::<usize>()
                .map_err(|_| Error::BadParams(format!("{key}={v} is not a non-negative integer"))),
        }
    }

    /// Rejects parameters nobody asked for.
    fn finish(self, name: &str) -> Result<()> {
        let unknown: Vec<&String> = self.values.keys().filter(|k| !self.used.contains(k.as_str())).collect();
        if unknown.is_empty() {
            Ok(())
        } else {
            Err(Error::BadParams(format!("{name} does not take {unknown:?}")))
        }
    }
}

/// Builds a named protocol. Parameters:
///
/// * `bb84-commit`: `n` message qubits (default 1)
/// * `direct-send`: none
/// * `theta-commit`: `theta` (default π/4)
/// * `orthogonal-toy`: `rounds` (default 4), `pad_a`, `pad_b` extra idle qubits (default 0)
/// * `coin-from-commit`: `base` commitment builtin (default `bb84-commit`); other
///   parameters go to the base
pub fn builtin(name: &str, params: &BTreeMap<String, String>) -> Result<Protocol> {
    let mut p = Params::new(params);
    let protocol = match name {
        "bb84-commit" => {
            let n = p.usize("n", 1)?;
            p.finish(name)?;
            Protocol::Commitment(bb84_commit(n)?)
        }
        "direct-send" => {
            p.finish(name)?;
            Protocol::Commitment(direct_send()?)
        }
        "theta-commit" => {
            let theta = p.f64("theta", FRAC_PI_4)?;
            p.finish(name)?;
            Protocol::Commitment(theta_commit(theta)?)
        }
        "orthogonal-toy" => {
            let rounds = p.usize("rounds", 4)?;
            let pad_a = p.usize("pad_a", 0)?;
            let pad_b = p.usize("pad_b", 0)?;
            p.finish(name)?;
            Protocol::CoinToss(orthogonal_toy(rounds, pad_a, pad_b)?)
        }
        "coin-from-commit" => {
            let base_name = p.raw("base").unwrap_or("bb84-commit").to_string();
            let rest: BTreeMap<String, String> = params
                .iter()
                .filter(|(k, _)| k.as_str() != "base")
                .map(|(k, v)| (k.clone(), v.clone()))
                .collect();
            let base = builtin(&base_name, &rest)?.into_commitment().map_err(|_| {
                Error::BadParams(format!("base `{base_name}` is not a commitment protocol"))
            })?;
            Protocol::CoinToss(coin_from_commit(&base)?)
        }
        _ => return Err(Error::UnknownBuiltin(name.to_string())),
    };
    Ok(protocol)
}

fn qubit_layout(labels: &[(&str, usize)]) -> Result<SubsystemLayout> {
    SubsystemLayout::new(labels.iter().map(|(l, d)| (*l, *d)))
}

fn pow2(n: usize) -> Result<usize> {
    u32::try_from(n)
        .ok()
        .and_then(|n| 1usize.checked_shl(n))
        .filter(|&d| d <= tolerance::max_dim())
        .ok_or_else(|| Error::BadParams(format!("2^{n} exceeds the dimension cap")))
}

/// Product of single-subsystem states given as (label, vector), reordered to `target`.
fn product_state(layout: &SubsystemLayout, factors: &[(&str, ComplexVector)]) -> Result<StateVector> {
    let mut state: Option<StateVector> = None;
    for (label, v) in factors {
        let s = StateVector::new(SubsystemLayout::with_cap([(*label, v.len())], usize::MAX)?, v.clone())?;
        state = Some(match state {
            None => s,
            Some(acc) => acc.tensor(&s)?,
        });
    }
    let labels: Vec<&str> = factors.iter().map(|(l, _)| *l).collect();
    state
        .ok_or_else(|| Error::BadParams("empty product state".into()))?
        .permuted(&layout.select(&labels)?)
}

fn ket(dim: usize, k: usize) -> ComplexVector {
    let mut v = ComplexVector::zeros(dim);
    v[k] = c(1.0, 0.0);
    v
}

fn uniform(dim: usize) -> ComplexVector {
    ComplexVector::from_element(dim, c(1.0 / (dim as f64).sqrt(), 0.0))
}

fn swap_two() -> Result<ComplexMatrix> {
    ops::permutation(&[2, 2], |d| vec![d[1], d[0]])
}

/// Basis-choice commitment over `n` message qubits.
///
/// Alice holds the bit in `A` and `n` dice qubits in `|+>`. She copies the
/// dice into the message part of the channel and, for bit 1, applies a
/// Hadamard to every message qubit. Bob swaps the message into `B`. To open,
/// Alice swaps her bit and dice into the channel.
pub fn bb84_commit(n: usize) -> Result<CommitmentProtocol> {
    if n == 0 {
        return Err(Error::BadParams("bb84-commit needs n >= 1".into()));
    }
    let m = pow2(n)?;
    let mask = m - 1;
    let layout = qubit_layout(&[("A", 2), ("A.dice", m), ("B", m), ("C", 2 * m)])?;
    let alice = |b: usize| product_state(&layout, &[("A", ket(2, b)), ("A.dice", uniform(m))]);
    let bob_init = product_state(&layout, &[("B", ket(m, 0)), ("C", ket(2 * m, 0))])?;

    let dims = [2, m, 2 * m];
    let copy = ops::permutation(&dims, |d| vec![d[0], d[1], (d[2] & !mask) | ((d[2] & mask) ^ d[1])])?;
    let one = numerics::outer(&ket(2, 1));
    let basis = ops::controlled(&[(
        one,
        numerics::kron(&numerics::identity(m), &numerics::kron(&numerics::identity(2), &ops::tensor_power(&ops::hadamard(), n))),
    )])?;
    let commit_a = Round::new(Party::Alice, basis * copy);
    let commit_b = Round::new(
        Party::Bob,
        ops::permutation(&[m, 2 * m], |d| vec![d[1] & mask, (d[1] & !mask) | d[0]])?,
    );
    let open = Round::new(
        Party::Alice,
        ops::permutation(&dims, |d| vec![d[2] >> n, d[2] & mask, (d[0] << n) | d[1]])?,
    );
    CommitmentProtocol::new(
        format!("bb84-commit(n={n})"),
        layout.clone(),
        alice(0)?,
        alice(1)?,
        bob_init,
        vec![commit_a, commit_b],
        vec![open],
    )
}

fn one_qubit_commitment(name: String, commit_a: ComplexMatrix) -> Result<CommitmentProtocol> {
    let layout = qubit_layout(&[("A", 2), ("B", 2), ("C", 2)])?;
    let alice = |b: usize| product_state(&layout, &[("A", ket(2, b))]);
    let bob_init = product_state(&layout, &[("B", ket(2, 0)), ("C", ket(2, 0))])?;
    CommitmentProtocol::new(
        name,
        layout.clone(),
        alice(0)?,
        alice(1)?,
        bob_init,
        vec![Round::new(Party::Alice, commit_a), Round::new(Party::Bob, swap_two()?)],
        vec![Round::new(Party::Alice, swap_two()?)],
    )
}

/// Alice copies her bit into the channel and Bob stores it: binding, not hiding.
pub fn direct_send() -> Result<CommitmentProtocol> {
    one_qubit_commitment("direct-send".into(), ops::permutation(&[2, 2], |d| vec![d[0], d[0] ^ d[1]])?)
}

/// Bit 0 sends `|0>`, bit 1 sends `cos θ|0> + sin θ|1>`.
pub fn theta_commit(theta: f64) -> Result<CommitmentProtocol> {
    let rotate = ops::controlled(&[(numerics::outer(&ket(2, 1)), ops::rotation(theta))])?;
    one_qubit_commitment(format!("theta-commit(theta={theta})"), rotate)
}

/// Coin toss in which Bob's initial Bell pair is split by Alice's first round,
/// so both outcomes are fixed before any later round runs. Later rounds only
/// scramble idle padding (`pad_a`, `pad_b` qubits) with a Fourier transform.
pub fn orthogonal_toy(rounds: usize, pad_a: usize, pad_b: usize) -> Result<CoinTossProtocol> {
    let mut entries = vec![("A".to_string(), 2)];
    if pad_a > 0 {
        entries.push(("A.pad".into(), pow2(pad_a)?));
    }
    entries.push(("B".into(), 2));
    if pad_b > 0 {
        entries.push(("B.pad".into(), pow2(pad_b)?));
    }
    entries.push(("C".into(), 2));
    let layout = SubsystemLayout::new(entries)?;
    let pad = |party: Party| -> Option<String> {
        let label = format!("{}.pad", party.tag());
        layout.contains(&label).then_some(label)
    };

    let mut alice = vec![("A", ket(2, 0))];
    if pad_a > 0 {
        alice.push(("A.pad", ket(layout.dim("A.pad")?, 0)));
    }
    let init_a = product_state(&layout, &alice)?;

    let mut bc_labels = party_labels(&layout, Party::Bob);
    bc_labels.extend(channel_labels(&layout));
    let bc_layout = layout.select(&bc_labels)?;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = ComplexVector::zeros(bc_layout.total_dim());
    for x in 0..2 {
        let digits: Vec<usize> = bc_layout
            .labels()
            .map(|l| if l == "B" || l == "C" { x } else { 0 })
            .collect();
        amps[bc_layout.index_of(&digits)?] = c(r, 0.0);
    }
    let init_bc = StateVector::new(bc_layout, amps)?;

    let mut list = Vec::with_capacity(rounds);
    for k in 0..rounds {
        let actor = if k % 2 == 0 { Party::Alice } else { Party::Bob };
        let scope = round_scope(&layout, actor);
        let mut u = numerics::identity(layout.dim_of(&scope)?);
        if k == 0 {
            u = ops::embed(&layout, &scope, &["A", "C"], &swap_two()?)?;
        }
        if let Some(label) = pad(actor) {
            u = ops::embed(&layout, &scope, &[label.as_str()], &ops::dft(layout.dim(&label)?))? * u;
        }
        list.push(Round::new(actor, u));
    }
    let holder = list.last().map_or(Party::Bob, |r: &Round| r.actor.other());

    let measurement = |party: Party| -> Result<[ComplexMatrix; 3]> {
        let scope = if party == holder {
            round_scope(&layout, party)
        } else {
            party_labels(&layout, party)
        };
        let d = layout.dim_of(&scope)?;
        let proj = |x| ops::embed(&layout, &scope, &[party.tag()], &numerics::outer(&ket(2, x)));
        Ok([proj(0)?, proj(1)?, ComplexMatrix::zeros(d, d)])
    };
    CoinTossProtocol::new(
        format!("orthogonal-toy(rounds={rounds},pad_a={pad_a},pad_b={pad_b})"),
        layout.clone(),
        init_a,
        init_bc,
        list,
        measurement(Party::Alice)?,
        measurement(Party::Bob)?,
        [0.5, 0.5],
        holder,
    )
}

/// Lifts a base round onto the extended layout.
fn lift(base: &SubsystemLayout, layout: &SubsystemLayout, round: &Round) -> Result<Round> {
    let scope = round_scope(layout, round.actor);
    let unitary = ops::embed(layout, &scope, &round_scope(base, round.actor), &round.unitary)?;
    Ok(Round::new(round.actor, unitary))
}

/// Concatenates rounds, merging consecutive rounds of the same actor.
fn merge(rounds: Vec<Round>) -> Vec<Round> {
    let mut out: Vec<Round> = Vec::with_capacity(rounds.len());
    for r in rounds {
        match out.last_mut() {
            Some(prev) if prev.actor == r.actor => prev.unitary = &r.unitary * &prev.unitary,
            _ => out.push(r),
        }
    }
    out
}

/// Coin toss from a commitment: Alice commits to a random bit `a`, Bob
/// announces a random guess `g`, Alice opens, and both output `a ⊕ g`.
///
/// Alice's coin is a dice qubit `A.coin` entangled with her encoding; Bob's
/// guess is `B.guess` in `|+>`, sent through `C.guess` and kept by Alice in
/// `A.guess`. Bob reads `a` off his part of the base protocol's final state,
/// which must be pure and different for the two bits.
pub fn coin_from_commit(base: &CommitmentProtocol) -> Result<CoinTossProtocol> {
    let base_layout = base.layout();
    let extra = SubsystemLayout::new([("A.coin", 2), ("A.guess", 2), ("B.guess", 2), ("C.guess", 2)])?;
    let layout = base_layout.concat(&extra)?;
    let r = std::f64::consts::FRAC_1_SQRT_2;

    let a0 = base.alice_state(0);
    let a1 = base.alice_state(1);
    let superposed = StateVector::new(
        a0.layout().clone(),
        (a0.amplitudes() + a1.amplitudes()).scale(r),
    )?;
    let init_a = superposed.tensor(&product_state(&extra, &[("A.coin", ket(2, 0)), ("A.guess", ket(2, 0))])?)?;
    let mut bc = party_labels(&layout, Party::Bob);
    bc.extend(channel_labels(&layout));
    let init_bc = base
        .bob_init()
        .tensor(&product_state(&extra, &[("B.guess", uniform(2)), ("C.guess", ket(2, 0))])?)?
        .permuted(&layout.select(&bc)?)?;

    let alice_base = party_labels(base_layout, Party::Alice);
    let alice_scope = round_scope(&layout, Party::Alice);
    let bob_scope = round_scope(&layout, Party::Bob);
    let mut copy_target = alice_base.clone();
    copy_target.push("A.coin".into());
    let copy = ops::controlled(&[
        (numerics::outer(a0.amplitudes()), numerics::identity(2)),
        (numerics::outer(a1.amplitudes()), ops::pauli_x()),
    ])?;

    let mut rounds = vec![Round::new(Party::Alice, ops::embed(&layout, &alice_scope, &copy_target, &copy)?)];
    for round in base.commit_rounds() {
        rounds.push(lift(base_layout, &layout, round)?);
    }
    let cnot = ops::permutation(&[2, 2], |d| vec![d[0], d[0] ^ d[1]])?;
    rounds.push(Round::new(Party::Bob, ops::embed(&layout, &bob_scope, &["B.guess", "C.guess"], &cnot)?));
    rounds.push(Round::new(
        Party::Alice,
        ops::embed(&layout, &alice_scope, &["C.guess", "A.guess"], &swap_two()?)?,
    ));
    for round in base.open_rounds() {
        rounds.push(lift(base_layout, &layout, round)?);
    }
    let rounds = merge(rounds);
    let holder = rounds.last().map_or(Party::Bob, |r| r.actor.other());

    // Alice outputs coin ⊕ guess.
    let a_scope = if holder == Party::Alice {
        alice_scope.clone()
    } else {
        party_labels(&layout, Party::Alice)
    };
    let parity = |x: usize| {
        ComplexMatrix::from_diagonal(&ComplexVector::from_fn(4, |i, _| {
            c(if (i >> 1) ^ (i & 1) == x { 1.0 } else { 0.0 }, 0.0)
        }))
    };
    let da = layout.dim_of(&a_scope)?;
    let outcome_a = [
        ops::embed(&layout, &a_scope, &["A.coin", "A.guess"], &parity(0))?,
        ops::embed(&layout, &a_scope, &["A.coin", "A.guess"], &parity(1))?,
        ComplexMatrix::zeros(da, da),
    ];

    // Bob decodes a from his record of the base protocol and outputs a ⊕ g.
    let mut held = party_labels(base_layout, Party::Bob);
    if holder == Party::Bob {
        held.extend(channel_labels(base_layout));
    }
    if held.is_empty() {
        return Err(Error::BadParams("Bob holds nothing of the base protocol at the end".into()));
    }
    let mut records = Vec::with_capacity(2);
    for bit in 0..2u8 {
        let rho = exec::honest_final(base, bit)?.partial_trace(&held)?;
        let eig = numerics::eig_hermitian(rho.matrix())?;
        if eig.eigenvalues[0] < 1.0 - tolerance::VALIDATION {
            return Err(Error::BadParams(format!(
                "Bob's record of bit {bit} in the base protocol is mixed (top eigenvalue {:.6})",
                eig.eigenvalues[0]
            )));
        }
        records.push(eig.eigenvectors.column(0).into_owned());
    }
    if records[0].dotc(&records[1]).norm() > tolerance::VALIDATION {
        return Err(Error::BadParams("Bob's records of the two bits are not orthogonal".into()));
    }
    // The base state of `held` is reduced in layout order.
    let held = base_layout.in_layout_order(&held)?;
    let b_scope = if holder == Party::Bob {
        bob_scope.clone()
    } else {
        party_labels(&layout, Party::Bob)
    };
    let mut target = held.clone();
    target.push("B.guess".into());
    let mut outcome_b: Vec<ComplexMatrix> = Vec::with_capacity(3);
    for x in 0..2 {
        let mut op = ComplexMatrix::zeros(records[0].len() * 2, records[0].len() * 2);
        for a in 0..2 {
            let g = a ^ x;
            op += numerics::kron(&numerics::outer(&records[a]), &numerics::outer(&ket(2, g)));
        }
        outcome_b.push(numerics::hermitize(&ops::embed(&layout, &b_scope, &target, &op)?));
    }
    let db = layout.dim_of(&b_scope)?;
    outcome_b.push(numerics::hermitize(&(numerics::identity(db) - &outcome_b[0] - &outcome_b[1])));
    let outcome_b: [ComplexMatrix; 3] = outcome_b.try_into().expect("three outcomes");

    CoinTossProtocol::new(
        format!("coin-from-commit({})", base.name()),
        layout.clone(),
        init_a,
        init_bc,
        rounds,
        outcome_a,
        outcome_b,
        [0.5, 0.5],
        holder,
    )
}
