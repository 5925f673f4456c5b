// Fidelity of two qubit states by the closed form, by parallel
// purifications and by an optimal measurement.

use eprb::fidelity;
use eprb::hilbert::DensityMatrix;
use eprb::numerics::{self, c, ComplexMatrix};

pub fn run_example() -> eprb::Result<()> {
    let zero = ComplexMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
    let mixed = numerics::identity(2).scale(0.5);
    let rho0 = DensityMatrix::from_matrix("X", zero)?;
    let rho1 = DensityMatrix::from_matrix("X", mixed)?;

    let s = fidelity::summarize(&rho0, &rho1)?;
    println!("closed form      {:.10}", s.closed_form);
    println!("purifications    {:.10}", s.purification_overlap);
    println!("measurement      {:.10}", s.povm_value);
    println!("trace distance   {:.10}", s.trace_distance);
    assert!((s.closed_form - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9);

    let (_, povm) = fidelity::fidelity_povm(&rho0, &rho1)?;
    println!("witness has {} outcomes", povm.elements().len());
    let pair = fidelity::fidelity_purification(&rho0, &rho1)?;
    println!("purified on {}", pair.psi0.layout());

    let audit = fidelity::audit_povms(&rho0, &rho1, 200, &mut eprb::random::rng(0))?;
    println!("200 random measurements, smallest sum {:.6}", audit.extreme);
    assert_eq!(audit.violations, 0);
    Ok(())
}

fn main() -> eprb::Result<()> {
    run_example()
}
