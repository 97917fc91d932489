//! Property tests: serialization round trips, the formal-group identity for
//! the exponential, and Poincare-series laws on randomized spaces.

use liouville_core::novikov::NovikovSeries;
use liouville_core::{direct_sum, tensor_product, FieldTag, GradedSpace, Grading, Progression};
use num::bigint::BigInt;
use num::BigRational;
use proptest::prelude::*;

fn rr(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn arb_space() -> impl Strategy<Value = GradedSpace> {
    let dims = proptest::collection::vec((-6i64..=6, 1usize..=3), 0..4);
    let tails = proptest::collection::vec((0i64..=4, 1i64..=3, 1usize..=2), 0..2);
    (dims, tails).prop_map(|(dims, tails)| {
        let mut v = GradedSpace::zero(FieldTag::rationals(), Grading::Integer);
        for (d, n) in dims {
            v.add_degree(d, n, Vec::new()).unwrap();
        }
        for (first, step, dim) in tails {
            v.add_progression(Progression {
                first: first + 7,
                step,
                dim,
            })
            .unwrap();
        }
        v
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn graded_space_text_round_trips(v in arb_space()) {
        let text = v.to_text();
        let back = GradedSpace::from_text(&text).unwrap();
        prop_assert_eq!(&back, &v);
        prop_assert_eq!(back.to_text(), text);
    }

    #[test]
    fn poincare_series_laws(a in arb_space(), b in arb_space()) {
        let sum = direct_sum(&a, &b).unwrap();
        for d in -10i64..=20 {
            prop_assert_eq!(sum.dim_at(d), a.dim_at(d) + b.dim_at(d));
        }
        // products need at most one tailed factor
        if a.is_finite() || b.is_finite() {
            let prod = tensor_product(&a, &b).unwrap();
            for d in -10i64..=20 {
                let conv: usize = (-16i64..=26)
                    .map(|x| a.dim_at(x) * b.dim_at(d - x))
                    .sum();
                prop_assert_eq!(prod.dim_at(d), conv);
            }
        }
    }

    #[test]
    fn exponential_inverse_identity(
        terms in proptest::collection::vec(((1i64..=6, 1i64..=3), (-4i64..=4, 1i64..=3)), 0..4)
    ) {
        let trunc = rr(5, 1);
        let pairs: Vec<(BigRational, BigRational)> = terms
            .into_iter()
            .map(|((en, ed), (cn, cd))| (rr(en, ed), rr(cn, cd)))
            .collect();
        let a = NovikovSeries::from_terms(&pairs, trunc.clone()).unwrap();
        let product = a.exp().unwrap().mul(&a.scale(&rr(-1, 1)).exp().unwrap());
        prop_assert_eq!(product, NovikovSeries::one(trunc).unwrap());
    }
}
