//! Property tests over small random inputs.

use proptest::prelude::*;

use posflag::building::{
    brute_force_assignment, compare_markings, intersect_apartments, intersection_transport,
    tropical_assignment, DifferenceCone, Marking, NormSplitTest, WeylElement,
};
use posflag::{ExtRational, Field, GenPoly, Matrix, Rational, ValuedScalar};

fn rational() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=3).prop_map(|(n, d)| Rational::new(n, d))
}

fn poly() -> impl Strategy<Value = GenPoly> {
    prop::collection::vec((rational(), (-5i64..=5, 1i64..=3)), 1..=3).prop_map(|terms| {
        GenPoly::from_terms(
            terms
                .into_iter()
                .map(|(e, (n, d))| (e, Rational::new(n, d)))
                .collect(),
        )
    })
}

fn scalar() -> impl Strategy<Value = ValuedScalar> {
    (poly(), poly()).prop_map(|(n, d)| {
        if d.is_zero() {
            ValuedScalar::from_poly(n)
        } else {
            ValuedScalar::new(n, d).expect("nonzero denominator")
        }
    })
}

fn nonzero_scalar() -> impl Strategy<Value = ValuedScalar> {
    scalar().prop_filter("nonzero", |x| !x.is_zero())
}

fn invertible(d: usize) -> impl Strategy<Value = Matrix<ValuedScalar>> {
    prop::collection::vec(poly(), d * d)
        .prop_map(move |v| {
            let entries = v.into_iter().map(ValuedScalar::from_poly).collect();
            Matrix::new(d, d, entries).expect("square")
        })
        .prop_filter("invertible", |m| !m.determinant().unwrap().is_zero())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn ring_axioms(x in scalar(), y in scalar(), z in scalar()) {
        prop_assert_eq!(x.plus(&y), y.plus(&x));
        prop_assert_eq!(x.times(&y), y.times(&x));
        prop_assert_eq!(x.plus(&y).plus(&z), x.plus(&y.plus(&z)));
        prop_assert_eq!(x.times(&y).times(&z), x.times(&y.times(&z)));
        prop_assert_eq!(x.times(&y.plus(&z)), x.times(&y).plus(&x.times(&z)));
        prop_assert!(x.minus(&x).is_zero());
    }

    #[test]
    fn inverse_and_division(x in nonzero_scalar(), y in scalar()) {
        prop_assert!(x.times(&x.inverse().unwrap()).is_one());
        prop_assert_eq!(y.divide(&x).unwrap().times(&x), y);
    }

    #[test]
    fn valuation_is_ultrametric(x in scalar(), y in scalar()) {
        let (vx, vy) = (x.valuation(), y.valuation());
        prop_assert_eq!(x.times(&y).valuation(), vx.add(&vy));
        let vs = x.plus(&y).valuation();
        prop_assert!(vs >= vx.clone().min(vy.clone()));
        if vx != vy {
            prop_assert_eq!(vs, vx.min(vy));
        }
    }

    #[test]
    fn order_is_compatible(x in scalar(), y in scalar(), z in scalar()) {
        let xy = x.compare(&y);
        prop_assert_eq!(x.plus(&z).compare(&y.plus(&z)), xy);
        if z.is_positive() {
            prop_assert_eq!(x.times(&z).compare(&y.times(&z)), xy);
        }
        prop_assert!(x.times(&x).is_nonnegative());
    }

    #[test]
    fn scalar_json_round_trip(x in scalar()) {
        let json = serde_json::to_string(&x).unwrap();
        let back: ValuedScalar = serde_json::from_str(&json).unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn assignment_matches_enumeration(
        d in 1usize..=5,
        seed in prop::collection::vec(prop::option::weighted(0.8, rational()), 25),
    ) {
        let v: Vec<Vec<ExtRational>> = (0..d)
            .map(|i| {
                (0..d)
                    .map(|j| seed[i * 5 + j].clone().map_or(ExtRational::Infinity, ExtRational::Finite))
                    .collect()
            })
            .collect();
        prop_assert_eq!(tropical_assignment(&v), brute_force_assignment(&v));
    }

    #[test]
    fn markings_compare_with_themselves(b in invertible(3), perm in Just(vec![2usize, 0, 1])) {
        let m = Marking::new(b).unwrap();
        let w = compare_markings(&m, &m).unwrap();
        prop_assert!(w.is_identity());
        let p = m.permuted(&perm);
        let w = compare_markings(&m, &p).unwrap();
        prop_assert_eq!(w.perm(), &perm[..]);
    }

    #[test]
    fn intersection_is_symmetric_up_to_transport(b1 in invertible(3), b2 in invertible(3)) {
        let m1 = Marking::new(b1).unwrap().named("a");
        let m2 = Marking::new(b2).unwrap().named("b");
        let forward = intersect_apartments(&m1, &m2).unwrap();
        let backward = intersect_apartments(&m2, &m1).unwrap();
        match intersection_transport(&m1, &m2).unwrap() {
            Some(w) => prop_assert_eq!(forward.transport(&w, "b"), backward),
            None => prop_assert!(forward.is_empty() && backward.is_empty()),
        }
    }

    #[test]
    fn cone_points_split_the_norm(b1 in invertible(3), b2 in invertible(3)) {
        let m1 = Marking::new(b1).unwrap();
        let m2 = Marking::new(b2).unwrap();
        let cone: DifferenceCone = intersect_apartments(&m1, &m2).unwrap();
        if let Some(p) = cone.interior_point() {
            prop_assert!(NormSplitTest::new(&m1, &m2).unwrap().contains(&p).unwrap());
        }
    }

    #[test]
    fn weyl_action_preserves_the_slice(
        z in prop::collection::vec(rational(), 3),
        x in prop::collection::vec(rational(), 2),
    ) {
        let w = WeylElement::translation_by(&z);
        let last = &(&Rational::one() - &x[0]) - &x[1];
        let p = vec![x[0].clone(), x[1].clone(), last];
        let q = w.apply(&p);
        let total = q.iter().fold(Rational::zero(), |a, b| &a + b);
        prop_assert_eq!(total, Rational::one());
    }
}
