//! Round bound for two-party computation.
//!
//! Both parties must end up knowing one bit, information only arrives with
//! messages, and at no point may one party be ahead of the other by more
//! than `ε` bits. Information is an abstract quantity supplied by a schedule,
//! measured in bits; nothing here is computed from quantum states.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocol::Party;
use crate::tolerance;

/// Slack when comparing accumulated information against thresholds.
const LEDGER_SLACK: f64 = 1e-12;

/// Smallest `N` with `N·ε ≥ target`.
pub fn min_rounds(epsilon: f64, target: f64) -> Result<u64> {
    if !(epsilon > 0.0) {
        return Err(Error::NonPositiveEpsilon(epsilon));
    }
    if !(target > 0.0) || !target.is_finite() {
        return Err(Error::NonPositiveTarget(target));
    }
    let estimate = (target / epsilon).ceil();
    if !(estimate < u64::MAX as f64) {
        return Err(Error::BadParams(format!("target/epsilon = {estimate} is too large")));
    }
    // Repair the estimate so the defining inequality holds in floating point.
    let mut n = estimate.max(1.0) as u64;
    while (n as f64) * epsilon < target {
        n += 1;
    }
    while n > 1 && ((n - 1) as f64) * epsilon >= target {
        n -= 1;
    }
    Ok(n)
}

/// One message: `actor` sends, the other party learns `bits`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Gain {
    pub actor: Party,
    pub bits: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LedgerStep {
    pub round: usize,
    pub actor: Party,
    pub info_a: f64,
    pub info_b: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct LedgerTrace {
    pub epsilon: f64,
    pub steps: Vec<LedgerStep>,
    /// 1-based round of the first imbalance above `ε`.
    pub first_violation: Option<usize>,
    pub valid: bool,
    /// Both parties hold a full bit at the end.
    pub reached: bool,
    pub min_rounds: u64,
    /// False only if a valid schedule reached the goal in fewer than `min_rounds`.
    pub consistent: bool,
}

/// Walks the schedule, crediting each gain to the receiver (clamped to `[0, 1]`).
pub fn ledger_simulate(gains: &[Gain], epsilon: f64) -> Result<LedgerTrace> {
    let needed = min_rounds(epsilon, 1.0)?;
    let mut info = [0.0_f64; 2];
    let mut steps = Vec::with_capacity(gains.len());
    let mut first_violation = None;
    for (i, g) in gains.iter().enumerate() {
        if !(g.bits >= 0.0) || !g.bits.is_finite() {
            return Err(Error::validation(format!("schedule[{i}].bits"), "gains must be finite and non-negative"));
        }
        let receiver = g.actor.other() as usize;
        info[receiver] = (info[receiver] + g.bits).clamp(0.0, 1.0);
        if first_violation.is_none() && (info[0] - info[1]).abs() > epsilon + LEDGER_SLACK {
            first_violation = Some(i + 1);
        }
        steps.push(LedgerStep {
            round: i + 1,
            actor: g.actor,
            info_a: info[0],
            info_b: info[1],
        });
    }
    let valid = first_violation.is_none();
    let reached = info.iter().all(|&x| x >= 1.0 - tolerance::VALIDATION);
    Ok(LedgerTrace {
        epsilon,
        steps,
        first_violation,
        valid,
        reached,
        min_rounds: needed,
        consistent: !(valid && reached && (gains.len() as u64) < needed),
    })
}

/// Result of enumerating every schedule up to a length.
#[derive(Debug, Clone, Serialize)]
pub struct Enumeration {
    pub epsilon: f64,
    pub grid: Vec<f64>,
    /// Every length below `min_rounds(ε, 1)` was enumerated.
    pub max_length: usize,
    pub schedules: u64,
    /// A valid schedule reaching both bits that is shorter than the bound.
    pub counterexample: Option<Vec<Gain>>,
}

/// Gains `{0, ε/2, ε, 3ε/2, 2ε, 1}` capped at one bit. A party that is behind
/// can catch up by up to `2ε` in one message, so the grid goes past `ε`.
pub fn default_grid(epsilon: f64) -> Vec<f64> {
    let mut grid: Vec<f64> = [0.0, 0.5, 1.0, 1.5, 2.0]
        .iter()
        .map(|k| (k * epsilon).min(1.0))
        .chain(std::iter::once(1.0))
        .collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

/// Enumerates all schedules shorter than `min_rounds(ε, 1)` with either
/// actor and any gain from `grid`, looking for one that is valid and reaches
/// a full bit on both sides.
pub fn enumerate_short_schedules(epsilon: f64, grid: &[f64]) -> Result<Enumeration> {
    let needed = min_rounds(epsilon, 1.0)?;
    let max_length = usize::try_from(needed - 1).map_err(|_| Error::BadParams("bound too large".into()))?;
    let choices: Vec<Gain> = [Party::Alice, Party::Bob]
        .iter()
        .flat_map(|&actor| grid.iter().map(move |&bits| Gain { actor, bits }))
        .collect();
    let total = (0..=max_length as u32).try_fold(0u64, |acc, l| {
        (choices.len() as u64).checked_pow(l).and_then(|n| acc.checked_add(n))
    });
    if total.is_none_or(|t| t > 50_000_000) {
        return Err(Error::BadParams(format!(
            "enumeration over {} choices and length {max_length} is too large",
            choices.len()
        )));
    }
    let mut schedules = 0u64;
    let mut counterexample = None;
    'outer: for len in 0..=max_length {
        let mut digits = vec![0usize; len];
        loop {
            let schedule: Vec<Gain> = digits.iter().map(|&d| choices[d]).collect();
            schedules += 1;
            let trace = ledger_simulate(&schedule, epsilon)?;
            if trace.valid && trace.reached {
                counterexample = Some(schedule);
                break 'outer;
            }
            // odometer increment
            let mut k = 0;
            while k < len {
                digits[k] += 1;
                if digits[k] < choices.len() {
                    break;
                }
                digits[k] = 0;
                k += 1;
            }
            if k == len {
                break;
            }
        }
    }
    Ok(Enumeration {
        epsilon,
        grid: grid.to_vec(),
        max_length,
        schedules,
        counterexample,
    })
}
