// Schmidt decomposition of a partially entangled two-qutrit state, and the
// entropy of either half.

use eprb::hilbert::{self, StateVector, SubsystemLayout};
use eprb::numerics::c;

pub fn run_example() -> eprb::Result<()> {
    let layout = SubsystemLayout::new([("A", 3), ("B", 3)])?;
    let mut amps = vec![c(0.0, 0.0); 9];
    amps[0] = c(0.8, 0.0);
    amps[4] = c(0.0, 0.5);
    amps[8] = c(0.1, 0.0);
    let psi = StateVector::normalized(layout, amps.into())?;

    let form = hilbert::schmidt(&psi, &["A"])?;
    println!("coefficients {:?}", form.coefficients);
    println!("weights      {:?}", form.weights());
    let back = form.reconstruct()?;
    println!("reconstruction overlap {:.12}", back.overlap(&psi)?);

    let rho_a = psi.partial_trace(&["A"])?;
    println!("S(A) = {:.6} bits", hilbert::von_neumann_entropy(&rho_a)?);
    println!("I(A:B) = {:.6} bits", hilbert::mutual_information(&psi, &["A"])?);
    Ok(())
}

fn main() -> eprb::Result<()> {
    run_example()
}
