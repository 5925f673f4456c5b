// Local unitaries never create correlation between two sides that start
// in a product state.

use eprb::cointoss::{self, LocalOp};
use eprb::numerics::{c, ComplexVector};
use eprb::protocol::ops;
use eprb::random;

pub fn run_example() -> eprb::Result<()> {
    let plus = ComplexVector::from_vec(vec![c(1.0, 0.0), c(1.0, 0.0)]);
    let zero = ComplexVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
    let init_a = cointoss::product_state(&[("A.0", plus.clone()), ("A.1", zero)])?;
    let init_b = cointoss::product_state(&[("B.0", plus)])?;

    let mut rng = random::rng(3);
    let ops_a: Vec<LocalOp> = (0..5)
        .map(|_| LocalOp {
            labels: vec!["A.0".into(), "A.1".into()],
            unitary: random::unitary(&mut rng, 6),
        })
        .collect();
    let ops_b = vec![LocalOp {
        labels: vec!["B.0".into()],
        unitary: ops::hadamard(),
    }];

    let trace = cointoss::lemma_check(&init_a, &init_b, &ops_a, &ops_b)?;
    for s in &trace.steps {
        println!("{} on {:?}: I(A:B) = {:.2e}", s.side, s.labels, s.mutual_information);
    }
    assert!(trace.max_mutual_information < 1e-9);

    // An operation reaching across the cut is refused.
    let bad = [LocalOp {
        labels: vec!["B.0".into()],
        unitary: ops::hadamard(),
    }];
    println!("{}", cointoss::lemma_check(&init_a, &init_b, &bad, &[]).unwrap_err());
    Ok(())
}

fn main() -> eprb::Result<()> {
    run_example()
}
