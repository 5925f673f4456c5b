// Backward induction on two coin tosses: the orthogonal toy collapses to
// zero rounds, while the one built from a commitment stops early.

use eprb::cointoss::{self, Verdict};
use eprb::protocol;

pub fn run_example() -> eprb::Result<()> {
    let toy = protocol::orthogonal_toy(4, 1, 1)?;
    let ideal = cointoss::check_ideal(&toy)?;
    println!("{}: ideal = {}, table diagonal = {:?}", toy.name(), ideal.ideal, [ideal.table[0][0], ideal.table[1][1]]);

    let report = cointoss::backward_induction(&toy)?;
    for r in &report.records {
        println!(
            "  round {} sent by {}: max fidelity {:.2e}, dropped = {}",
            r.conditioning.round, r.conditioning.conditioning, r.conditioning.max_fidelity, r.truncated
        );
    }
    if let Verdict::LemmaContradiction {
        truncated_rounds,
        initial_mutual_information,
        final_cut_information,
        ..
    } = &report.verdict
    {
        println!(
            "  contradiction after {truncated_rounds} truncations: I(A:BC) = {initial_mutual_information:.3}, \
             channel correlation = {final_cut_information:.3} bits"
        );
    }

    let coin = protocol::coin_from_commit(&protocol::bb84_commit(1)?)?;
    let report = cointoss::backward_induction(&coin)?;
    println!("{}: {:?}", coin.name(), report.verdict);
    assert!(matches!(report.verdict, Verdict::NotIdealAtRound { .. }));
    Ok(())
}

fn main() -> eprb::Result<()> {
    run_example()
}
