use m2s_core::probe::distribution;
use m2s_core::{exact_interval_prob, max_interval_prob, mc_interval_prob, WeightedSum};
use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use proptest::prelude::*;

fn weights() -> impl Strategy<Value = WeightedSum> {
    prop::collection::vec(prop_oneof![1i64..=6, -6i64..=-1], 0..12).prop_map(|a| WeightedSum::new(a).unwrap())
}

/// Enumerates sign vectors directly.
fn direct(w: &WeightedSum, delta: i64, h: i64) -> BigRational {
    let a = w.weights();
    let hits = (0..1u64 << a.len())
        .filter(|m| {
            let s: i64 = a
                .iter()
                .enumerate()
                .map(|(k, &x)| if (m >> k) & 1 == 1 { x } else { -x })
                .sum();
            (s + h).abs() <= delta
        })
        .count();
    BigRational::new(hits.into(), (1u64 << a.len()).into())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn exact_matches_enumeration(w in weights(), delta in 0i64..6, h in -20i64..20) {
        prop_assert_eq!(exact_interval_prob(&w, delta, h).unwrap(), direct(&w, delta, h));
    }

    #[test]
    fn mass_symmetry_and_monotonicity(w in weights(), d1 in 0i64..5, extra in 0i64..5, h in -15i64..15) {
        let total: BigUint = distribution(&w).unwrap().iter().sum();
        prop_assert_eq!(total, BigUint::from(1u32) << w.len());
        let p1 = exact_interval_prob(&w, d1, h).unwrap();
        prop_assert!(p1 <= exact_interval_prob(&w, d1 + extra, h).unwrap());
        prop_assert_eq!(p1, exact_interval_prob(&w, d1, -h).unwrap());
    }

    #[test]
    fn max_is_maximal(w in weights(), delta in 0i64..4) {
        let (h, v) = max_interval_prob(&w, delta).unwrap();
        prop_assert_eq!(exact_interval_prob(&w, delta, h).unwrap(), v.clone());
        let span = w.span() as i64;
        for g in -span - delta - 3..=span + delta + 3 {
            let p = exact_interval_prob(&w, delta, g).unwrap();
            prop_assert!(p <= v);
            if g < h {
                prop_assert!(p < v);
            }
        }
    }
}

#[test]
fn mc_is_reproducible_across_runs_and_workers() {
    let w = WeightedSum::new(vec![1, 3, 3, 1, 2, 5]).unwrap();
    let a = mc_interval_prob(&w, 2, 1, 100_000, 42, 1).unwrap();
    let b = mc_interval_prob(&w, 2, 1, 100_000, 42, 3).unwrap();
    assert_eq!(a, b);
    let exact = exact_interval_prob(&w, 2, 1).unwrap().to_f64().unwrap();
    assert!((a.estimate - exact).abs() <= 4.0 * a.std_error);
}
