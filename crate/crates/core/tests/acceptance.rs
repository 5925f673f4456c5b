//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use eprb::attack;
use eprb::bounds;
use eprb::cointoss::{self, LocalOp, Verdict};
use eprb::fidelity;
use eprb::hilbert::{self, DensityMatrix, StateVector, SubsystemLayout};
use eprb::numerics::{self, ComplexMatrix};
use eprb::protocol::{self, Party};
use eprb::random;

type Outcome = Result<String, String>;

fn check(ok: bool, msg: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn e(err: eprb::Error) -> String {
    err.to_string()
}

/// Fidelity from nalgebra primitives only: `‖√ρ₀ √ρ₁‖₁`.
fn oracle_fidelity(rho0: &ComplexMatrix, rho1: &ComplexMatrix) -> f64 {
    fn sqrt(m: &ComplexMatrix) -> ComplexMatrix {
        let eig = m.clone().symmetric_eigen();
        let d = eig.eigenvalues.map(|l| numerics::c(l.max(0.0).sqrt(), 0.0));
        &eig.eigenvectors * ComplexMatrix::from_diagonal(&d) * eig.eigenvectors.adjoint()
    }
    (sqrt(rho0) * sqrt(rho1)).svd(false, false).singular_values.sum()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = random::rng(1);
    let mut worst: f64 = 0.0;
    let mut audit_pairs = Vec::new();
    for dim in 2..=6 {
        for k in 0..100 {
            let rank0 = 1 + k % dim;
            let rank1 = 1 + (k / dim) % dim;
            let r0 = random::density(&mut rng, dim, rank0);
            let r1 = random::density(&mut rng, dim, rank1);
            let oracle = oracle_fidelity(&r0, &r1);
            let rho0 = DensityMatrix::from_matrix("X", r0).map_err(e)?;
            let rho1 = DensityMatrix::from_matrix("X", r1).map_err(e)?;
            let s = fidelity::summarize(&rho0, &rho1).map_err(e)?;
            for v in [s.closed_form, s.purification_overlap, s.povm_value] {
                worst = worst.max((v - oracle).abs());
            }
            worst = worst.max(s.max_discrepancy);
            if k < 2 {
                audit_pairs.push((rho0, rho1));
            }
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    check(worst <= 1e-6, format!("routes disagree by {worst:.3e}"))?;
    check(elapsed < 30.0, format!("500 pairs took {elapsed:.1}s"))?;

    let mut below: f64 = 0.0;
    for (rho0, rho1) in &audit_pairs {
        let a = fidelity::audit_povms(rho0, rho1, 1000, &mut rng).map_err(e)?;
        below = below.max(a.witness - a.extreme);
        check(a.violations == 0, format!("{} random POVMs beat the witness", a.violations))?;
    }
    check(below <= 1e-9, format!("a random POVM is {below:.3e} below the witness"))?;
    Ok(format!(
        "500 pairs, max deviation {worst:.1e}, {elapsed:.2}s; {} audited pairs x 1000 POVMs",
        audit_pairs.len()
    ))
}

fn criterion_2() -> Outcome {
    let mut parts = Vec::new();
    for n in 1..=3 {
        let p = protocol::bb84_commit(n).map_err(e)?;
        let h = attack::hiding_report(&p).map_err(e)?;
        check((h.fidelity - 1.0).abs() <= 1e-9, format!("n={n}: hiding fidelity {}", h.fidelity))?;
        let r = attack::simulate_attack(&p).map_err(e)?;
        let accept = r.bob_acceptance.unwrap_or(0.0);
        check(accept >= 1.0 - 1e-8, format!("n={n}: acceptance {accept}"))?;

        // Replay the flipped run by hand and compare with Bob's honest reference.
        let (s0, _) = protocol::commitment_states(&p).map_err(e)?;
        let cheated = s0.apply_on(&r.cheat_labels, &r.cheat_unitary).map_err(e)?;
        let opened = protocol::apply_rounds(p.layout(), cheated, p.open_rounds(), p.commit_rounds().len(), None)
            .map_err(e)?;
        let replay = protocol::honest_final(&p, 1).map_err(e)?.overlap(&opened).map_err(e)?.powi(2);
        check((replay - accept).abs() <= 1e-9, format!("n={n}: replay gives {replay}"))?;
        parts.push(format!("n={n} F={:.10} accept={accept:.10}", h.fidelity));
    }
    Ok(parts.join(", "))
}

fn criterion_3() -> Outcome {
    let thetas: Vec<f64> = (0..5).map(|k| k as f64 * PI / 8.0).collect();
    let sweep = attack::theta_sweep(&thetas).map_err(e)?;
    let mut worst: f64 = 0.0;
    for pt in &sweep {
        let t = pt.theta;
        for (got, want) in [
            (pt.achieved_overlap, t.cos()),
            (pt.bob_acceptance, t.cos().powi(2)),
            (pt.bob_guess_probability, 0.5 + t.sin() / 2.0),
            (pt.achieved_overlap, pt.fidelity),
        ] {
            worst = worst.max((got - want).abs());
        }
    }
    check(worst <= 1e-6, format!("max deviation {worst:.3e}"))?;
    Ok(format!("{} angles, max deviation {worst:.1e}", sweep.len()))
}

fn criterion_4() -> Outcome {
    let toy = protocol::orthogonal_toy(4, 0, 0).map_err(e)?;
    let report = cointoss::backward_induction(&toy).map_err(e)?;
    match &report.verdict {
        Verdict::LemmaContradiction { truncated_rounds, .. } => {
            check(*truncated_rounds == 4, format!("truncated {truncated_rounds} rounds"))?
        }
        v => return Err(format!("toy verdict {v:?}")),
    }
    check(report.records.len() == 4 && report.records.iter().all(|r| r.truncated), "not every round truncated")?;

    // Independent replay: truncate step by step and re-execute each protocol.
    let mut current = toy;
    let mut worst: f64 = 0.0;
    for _ in 0..4 {
        current = cointoss::truncate_last_round(&current).map_err(e)?.protocol;
        let table = cointoss::outcome_table(&current, &protocol::final_state(&current, None).map_err(e)?).map_err(e)?;
        worst = worst.max((table[0][0] - 0.5).abs()).max((table[1][1] - 0.5).abs());
        let off: f64 = (0..3)
            .flat_map(|i| (0..3).map(move |j| (i, j)))
            .filter(|&(i, j)| !(i == j && i < 2))
            .map(|(i, j)| table[i][j].abs())
            .sum();
        worst = worst.max(off);
    }
    check(worst <= 1e-9, format!("outcome distribution drifted by {worst:.3e}"))?;

    let base = protocol::bb84_commit(1).map_err(e)?;
    let coin = protocol::coin_from_commit(&base).map_err(e)?;
    let report = cointoss::backward_induction(&coin).map_err(e)?;
    let (round, fid) = match report.verdict {
        Verdict::NotIdealAtRound { round, max_fidelity, .. } => (round, max_fidelity),
        v => return Err(format!("coin-from-commit verdict {v:?}")),
    };
    check(fid > 1e-6, format!("offending fidelity {fid}"))?;
    Ok(format!(
        "toy: 4 truncations, drift {worst:.1e}, contradiction; coin-from-commit: not ideal at round {round}, F={fid:.6}"
    ))
}

fn criterion_5() -> Outcome {
    let mut rng = random::rng(5);
    let la = SubsystemLayout::new([("A.0", 2), ("A.1", 3)]).map_err(e)?;
    let lb = SubsystemLayout::new([("B.0", 2), ("B.1", 2), ("B.2", 2)]).map_err(e)?;
    let init_a = StateVector::new(la.clone(), random::unit_vector(&mut rng, la.total_dim())).map_err(e)?;
    let init_b = StateVector::new(lb.clone(), random::unit_vector(&mut rng, lb.total_dim())).map_err(e)?;
    let ops = |layout: &SubsystemLayout, rng: &mut random::AuditRng| -> Result<Vec<LocalOp>, String> {
        let labels: Vec<String> = layout.labels().map(str::to_string).collect();
        (0..20)
            .map(|k| {
                let pick: Vec<String> = match k % 3 {
                    0 => labels.clone(),
                    1 => vec![labels[k % labels.len()].clone()],
                    _ => labels[..2].to_vec(),
                };
                let d = layout.dim_of(&pick).map_err(e)?;
                Ok(LocalOp {
                    labels: pick,
                    unitary: random::unitary(rng, d),
                })
            })
            .collect()
    };
    let ops_a = ops(&la, &mut rng)?;
    let ops_b = ops(&lb, &mut rng)?;
    let trace = cointoss::lemma_check(&init_a, &init_b, &ops_a, &ops_b).map_err(e)?;
    check(trace.steps.len() == 40, "expected 40 steps")?;
    check(
        trace.max_mutual_information <= 1e-9,
        format!("mutual information reached {:.3e}", trace.max_mutual_information),
    )?;
    Ok(format!("40 local unitaries, max I(A:B) = {:.1e}", trace.max_mutual_information))
}

fn criterion_6() -> Outcome {
    for (eps, n) in [(1.0, 1), (0.5, 2), (0.25, 4), (0.1, 10), (0.01, 100)] {
        let got = bounds::min_rounds(eps, 1.0).map_err(e)?;
        check(got == n, format!("min_rounds({eps}) = {got}, expected {n}"))?;
    }
    let mut total = 0;
    for k in 1..=6 {
        let eps = 1.0 / k as f64;
        let en = bounds::enumerate_short_schedules(eps, &bounds::default_grid(eps)).map_err(e)?;
        total += en.schedules;
        if let Some(c) = en.counterexample {
            return Err(format!("eps=1/{k}: short schedule {c:?}"));
        }
    }
    Ok(format!("table exact; {total} short schedules enumerated for 1/eps = 1..6, none valid"))
}

fn psd_checks(rho: &DensityMatrix, what: &str) -> Result<(), String> {
    let m = rho.matrix();
    let tr = numerics::trace(m);
    check((tr.re - 1.0).abs() <= 1e-9 && tr.im.abs() <= 1e-9, format!("{what}: trace {tr}"))?;
    check(numerics::hermitian_deviation(m) <= 1e-9, format!("{what}: not Hermitian"))?;
    let eig = numerics::eig_hermitian(m).map_err(e)?;
    let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    check(min >= -1e-10, format!("{what}: eigenvalue {min:.3e}"))?;
    let res = numerics::frobenius(&(eig.reconstruct() - m));
    check(res <= 1e-10, format!("{what}: eigen residual {res:.3e}"))?;
    let s = numerics::psd_sqrt(m).map_err(e)?;
    let res = numerics::frobenius(&(&s * &s - m));
    check(res <= 1e-9, format!("{what}: sqrt residual {res:.3e}"))
}

fn criterion_7() -> Outcome {
    let toy = protocol::orthogonal_toy(10, 5, 4).map_err(e)?;
    let dim = toy.layout().total_dim();
    check(dim == 4096, format!("toy dimension {dim}"))?;

    let start = Instant::now();
    let mut snaps = Vec::new();
    let fin = protocol::final_state(&toy, Some(&mut snaps)).map_err(e)?;
    let run_time = start.elapsed().as_secs_f64();
    check(run_time < 5.0, format!("10-round run took {run_time:.2}s"))?;
    check(snaps.len() == 10, "missing snapshots")?;
    for s in &snaps {
        let drift = (s.state.norm() - 1.0).abs();
        check(drift <= 1e-9, format!("norm drift {drift:.3e} after round {}", s.round))?;
    }

    for party in [Party::Alice, Party::Bob] {
        let rho = fin.partial_trace(&protocol::party_labels(toy.layout(), party)).map_err(e)?;
        psd_checks(&rho, party.name())?;
    }
    let table = cointoss::outcome_table(&toy, &fin).map_err(e)?;
    let mass: f64 = table.iter().flatten().sum();
    check((mass - 1.0).abs() <= 1e-9, format!("outcome mass {mass}"))?;

    let report = cointoss::backward_induction(&toy).map_err(e)?;
    check(
        matches!(report.verdict, Verdict::LemmaContradiction { truncated_rounds: 10, .. }),
        format!("4096 verdict {:?}", report.verdict),
    )?;
    let dev = report
        .records
        .iter()
        .map(|r| r.table_deviation.unwrap_or(f64::INFINITY))
        .fold(0.0, f64::max);
    check(dev <= 1e-9, format!("dual execution deviation {dev:.3e}"))?;

    let mut rng = random::rng(7);
    let g = random::ginibre(&mut rng, 64, 64);
    let svd = numerics::svd(&g).map_err(e)?;
    let scale = numerics::frobenius(&g);
    let res = numerics::frobenius(&(svd.reconstruct() - &g)) / scale;
    check(res <= 1e-10, format!("svd residual {res:.3e}"))?;
    let polar = numerics::polar(&g, true).map_err(e)?;
    let res = numerics::frobenius(&(&polar.unitary * &polar.positive - &g)) / scale;
    check(res <= 1e-9, format!("polar residual {res:.3e}"))?;
    check(numerics::unitary_deviation(&polar.unitary) <= 1e-9, "polar factor not unitary")?;

    let big = protocol::bb84_commit(3).map_err(e)?;
    let r = attack::simulate_attack(&big).map_err(e)?;
    check(r.bob_acceptance.unwrap_or(0.0) >= 1.0 - 1e-8, "bb84(3) attack failed")?;
    let bob = hilbert::partial_trace(&protocol::honest_final(&big, 0).map_err(e)?, &["B"]).map_err(e)?;
    psd_checks(&bob, "bb84(3) Bob")?;

    Ok(format!("dim 4096: 10 rounds in {run_time:.3}s, induction deviation {dev:.1e}"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 7] = [
        ("fidelity triple equivalence", criterion_1),
        ("ideal-commitment attack", criterion_2),
        ("non-ideal tradeoff", criterion_3),
        ("backward induction", criterion_4),
        ("local operations keep mutual information zero", criterion_5),
        ("round bound", criterion_6),
        ("numerical hygiene at dimension 4096", criterion_7),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {why}", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
