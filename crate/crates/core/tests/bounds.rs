use eprb::bounds::{self, Gain};
use eprb::protocol::Party;
use proptest::prelude::*;

proptest! {
    #[test]
    fn exact_ceiling(k in 1u32..=100) {
        let eps = k as f64 / 100.0;
        let n = bounds::min_rounds(eps, 1.0).unwrap();
        prop_assert!(n as f64 * eps >= 1.0);
        prop_assert!(((n - 1) as f64) * eps < 1.0);
    }

    #[test]
    fn any_epsilon(eps in 1e-4f64..=1.0, target in 0.1f64..=4.0) {
        let n = bounds::min_rounds(eps, target).unwrap();
        prop_assert!(n as f64 * eps >= target);
        prop_assert!(n == 1 || ((n - 1) as f64) * eps < target);
    }

    #[test]
    fn ledger_never_goes_negative_or_past_one(bits in proptest::collection::vec(0.0f64..0.6, 0..12)) {
        let gains: Vec<Gain> = bits
            .iter()
            .enumerate()
            .map(|(i, &b)| Gain { actor: if i % 2 == 0 { Party::Alice } else { Party::Bob }, bits: b })
            .collect();
        let t = bounds::ledger_simulate(&gains, 0.3).unwrap();
        for s in &t.steps {
            prop_assert!((0.0..=1.0).contains(&s.info_a) && (0.0..=1.0).contains(&s.info_b));
        }
        prop_assert!(t.consistent);
    }
}

#[test]
fn bound_grows_without_limit() {
    let mut last = 0;
    for k in 0..12 {
        let eps = 0.5f64.powi(k);
        let n = bounds::min_rounds(eps, 1.0).unwrap();
        assert!(n > last || k == 0);
        last = n;
    }
    assert!(last >= 2048);
}

#[test]
fn no_short_schedule_exists() {
    for k in 1..=6 {
        let eps = 1.0 / k as f64;
        for grid in [vec![0.0, eps], bounds::default_grid(eps)] {
            let e = bounds::enumerate_short_schedules(eps, &grid).unwrap();
            assert!(e.counterexample.is_none(), "eps = 1/{k}");
            assert_eq!(e.max_length as u64, bounds::min_rounds(eps, 1.0).unwrap() - 1);
        }
    }
}

#[test]
fn schedule_json() {
    let gains: Vec<Gain> =
        serde_json::from_str(r#"[{"actor":"A","bits":0.5},{"actor":"B","bits":1.0},{"actor":"A","bits":0.5}]"#).unwrap();
    let t = bounds::ledger_simulate(&gains, 0.5).unwrap();
    assert!(t.valid && t.reached && t.consistent);
    assert_eq!(t.min_rounds, 2);
    assert!(serde_json::from_str::<Vec<Gain>>(r#"[{"actor":"C","bits":0.5}]"#).is_err());
}

#[test]
fn errors() {
    assert!(matches!(bounds::min_rounds(0.0, 1.0), Err(eprb::Error::NonPositiveEpsilon(_))));
    assert!(matches!(bounds::min_rounds(0.1, -1.0), Err(eprb::Error::NonPositiveTarget(_))));
    assert!(bounds::ledger_simulate(&[], -0.5).is_err());
}
