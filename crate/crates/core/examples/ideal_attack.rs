// Coherent bit flip against the dice-based commitment. Bob's view of the
// two commitments is identical, so a rotation on Alice's side (and the
// channel she still controls) turns one commitment into the other.

use eprb::attack;
use eprb::protocol;

pub fn run_example() -> eprb::Result<()> {
    for n in 1..=2 {
        let p = protocol::bb84_commit(n)?;
        let hiding = attack::hiding_report(&p)?;
        let r = attack::simulate_attack(&p)?;
        println!(
            "{}: F = {:.9}, overlap = {:.9}, Bob accepts = {:.9}, naive switch accepted = {:.3}",
            p.name(),
            hiding.fidelity,
            r.achieved_overlap,
            r.bob_acceptance.unwrap_or(0.0),
            r.naive_acceptance.unwrap_or(0.0),
        );
        println!("  rotation acts on {:?}", r.cheat_labels);
        assert!(r.bob_acceptance.unwrap_or(0.0) > 1.0 - 1e-8);
    }

    // Sending the bit in the clear hides nothing and leaves nothing to rotate.
    let r = attack::simulate_attack(&protocol::direct_send()?)?;
    println!("direct-send: Bob accepts = {:.3}", r.bob_acceptance.unwrap_or(0.0));
    Ok(())
}

fn main() -> eprb::Result<()> {
    run_example()
}
