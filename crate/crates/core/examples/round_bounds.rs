// How many messages two parties need when neither may get ahead by more
// than ε bits.

use eprb::bounds::{self, Gain};
use eprb::protocol::Party;

pub fn run_example() -> eprb::Result<()> {
    for eps in [1.0, 0.5, 0.25, 0.1, 0.01] {
        println!("eps = {eps:<5} -> at least {} rounds", bounds::min_rounds(eps, 1.0)?);
    }

    // Leapfrogging by ε per message reaches a full bit on both sides.
    let eps = 0.25;
    let mut gains = Vec::new();
    for k in 0..5 {
        let actor = if k % 2 == 0 { Party::Alice } else { Party::Bob };
        let bits = if k == 0 || k == 4 { eps } else { 2.0 * eps };
        gains.push(Gain { actor, bits });
    }
    let trace = bounds::ledger_simulate(&gains, eps)?;
    for s in &trace.steps {
        println!("round {} ({}): A knows {:.2}, B knows {:.2}", s.round, s.actor, s.info_a, s.info_b);
    }
    println!("valid = {}, reached = {}, consistent = {}", trace.valid, trace.reached, trace.consistent);

    let en = bounds::enumerate_short_schedules(eps, &bounds::default_grid(eps))?;
    println!("{} shorter schedules checked, counterexample: {:?}", en.schedules, en.counterexample);
    Ok(())
}

fn main() -> eprb::Result<()> {
    run_example()
}
