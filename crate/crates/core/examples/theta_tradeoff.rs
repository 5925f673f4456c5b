// A commitment that hides only partially: the better Bob can guess the
// bit, the less Alice can gain by rotating.

use std::f64::consts::PI;

use eprb::attack;

pub fn run_example() -> eprb::Result<()> {
    let thetas: Vec<f64> = (0..=4).map(|k| k as f64 * PI / 8.0).collect();
    println!("{:>8} {:>10} {:>10} {:>10} {:>10}", "theta", "overlap", "accept", "F", "guess");
    for pt in attack::theta_sweep(&thetas)? {
        println!(
            "{:>8.4} {:>10.6} {:>10.6} {:>10.6} {:>10.6}",
            pt.theta, pt.achieved_overlap, pt.bob_acceptance, pt.fidelity, pt.bob_guess_probability
        );
        assert!((pt.achieved_overlap - pt.theta.cos()).abs() < 1e-6);
    }
    Ok(())
}

fn main() -> eprb::Result<()> {
    run_example()
}
