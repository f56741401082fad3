use lie_control::states::{equivalent, spectrum, transport_witness, DiscreteState};
use num_rational::Rational64;
use proptest::prelude::*;

/// Weights `c_i / Σc` from positive integer counts.
fn state() -> impl Strategy<Value = DiscreteState<Rational64>> {
    prop::collection::vec(1i64..6, 1..6).prop_map(|counts| {
        let total: i64 = counts.iter().sum();
        DiscreteState::new(counts.iter().enumerate().map(|(i, &c)| (format!("s{i}"), Rational64::new(c, total))))
            .unwrap()
    })
}

fn to_float(s: &DiscreteState<Rational64>) -> DiscreteState<f64> {
    DiscreteState::new(s.atoms().iter().map(|(l, w)| (l.clone(), *w.numer() as f64 / *w.denom() as f64))).unwrap()
}

proptest! {
    #[test]
    fn relabeling_preserves_class(s in state(), shift in 0usize..7) {
        let relabeled = s.relabeled(|l| format!("t{}{l}", shift)).unwrap();
        prop_assert!(equivalent(&s, &relabeled));
        prop_assert_eq!(spectrum(&s), spectrum(&relabeled));
        let m = transport_witness(&s, &relabeled).unwrap();
        prop_assert!(m.preserves_weights(&s, &relabeled));
    }

    #[test]
    fn witness_exists_iff_equivalent(a in state(), b in state()) {
        let eq = equivalent(&a, &b);
        prop_assert_eq!(eq, equivalent(&b, &a));
        match transport_witness(&a, &b) {
            Ok(m) => prop_assert!(eq && m.preserves_weights(&a, &b)),
            Err(_) => prop_assert!(!eq),
        }
    }

    #[test]
    fn float_path_agrees_with_exact(a in state(), b in state()) {
        prop_assert_eq!(equivalent(&a, &b), equivalent(&to_float(&a), &to_float(&b)));
    }
}
