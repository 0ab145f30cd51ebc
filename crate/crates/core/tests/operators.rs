use eqalg_core::ast::SelectOp;
use eqalg_core::model::numbered_domain;
use eqalg_core::ops;
use eqalg_oracle as oracle;
use eqalg_oracle::gen::{random_relation, random_type};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn setup(seed: u64) -> (ChaCha8Rng, Vec<eqalg_core::Atom>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(1..=4);
    (rng, numbered_domain(n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn binary_operators_match_oracle(seed in any::<u64>()) {
        let (mut rng, atoms) = setup(seed);
        let ty = random_type(&mut rng, 2);
        let a = random_relation(&mut rng, ty, &atoms, 5);
        let b = random_relation(&mut rng, ty, &atoms, 5);
        let (oa, ob) = (oracle::from_relation(&a), oracle::from_relation(&b));
        prop_assert_eq!(oracle::from_relation(&ops::union(&a, &b).unwrap()), oracle::union(&oa, &ob));
        prop_assert_eq!(oracle::from_relation(&ops::difference(&a, &b).unwrap()), oracle::difference(&oa, &ob));
        let t2 = random_type(&mut rng, 1);
        let c = random_relation(&mut rng, t2, &atoms, 4);
        let p = ops::product(&a, &c);
        prop_assert_eq!(oracle::from_relation(&p), oracle::product(&oa, &oracle::from_relation(&c)));
        prop_assert_eq!(ops::product_size(&a, &c), u128::from(p.size()));
        prop_assert_eq!(p.size(), oracle::size(&oracle::from_relation(&p)));
    }

    #[test]
    fn unary_operators_match_oracle(seed in any::<u64>()) {
        let (mut rng, atoms) = setup(seed);
        let ty = random_type(&mut rng, 2);
        let a = random_relation(&mut rng, ty, &atoms, 5);
        let oa = oracle::from_relation(&a);
        let k = ty.arity();

        let cols: Vec<usize> = (0..rng.gen_range(1..=3)).map(|_| rng.gen_range(1..=k)).collect();
        prop_assert_eq!(oracle::from_relation(&ops::project(&a, &cols).unwrap()), oracle::project(&oa, &cols));

        let (i, j) = (rng.gen_range(1..=k), rng.gen_range(1..=k));
        if ty.component(i - 1) == ty.component(j - 1) {
            for op in [SelectOp::Eq, SelectOp::Neq] {
                prop_assert_eq!(oracle::from_relation(&ops::select(&a, i, op, j).unwrap()), oracle::select(&oa, i, op, j));
            }
        } else {
            prop_assert!(ops::select(&a, i, SelectOp::Eq, j).is_err());
        }

        let mut nest_cols: Vec<usize> = (1..=k).filter(|_| rng.gen_bool(0.5)).collect();
        if nest_cols.is_empty() {
            nest_cols.push(1);
        }
        let nested = ops::nest(&a, &nest_cols).unwrap();
        prop_assert_eq!(oracle::from_relation(&nested), oracle::nest(&oa, &nest_cols, k));

        // the appended column is always nested, so unnest has something to work on
        let u = ops::unnest(&nested, k + 1).unwrap();
        prop_assert_eq!(oracle::from_relation(&u), oracle::unnest(&oracle::from_relation(&nested), k + 1));
        prop_assert_eq!(ops::unnest_size(&nested, k + 1), u128::from(u.size()));
        for c in 1..=k {
            if !ty.component(c - 1).unwrap().is_atom() {
                prop_assert_eq!(oracle::from_relation(&ops::unnest(&a, c).unwrap()), oracle::unnest(&oa, c));
            }
        }

        if a.len() <= 6 {
            let p = ops::powerset(&a).unwrap();
            prop_assert_eq!(oracle::from_relation(&p), oracle::powerset(&oa));
            prop_assert_eq!(ops::powerset_size(&a), Some(u128::from(p.size())));
        }
    }

    #[test]
    fn nest_then_unnest_restores_the_input(seed in any::<u64>()) {
        let (mut rng, atoms) = setup(seed);
        let ty = random_type(&mut rng, 2);
        let a = random_relation(&mut rng, ty, &atoms, 5);
        let k = ty.arity();
        let col = rng.gen_range(1..=k);
        let back = ops::project(&ops::unnest(&ops::nest(&a, &[col]).unwrap(), k + 1).unwrap(), &(1..=k).collect::<Vec<_>>()).unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn union_and_difference_laws(seed in any::<u64>()) {
        let (mut rng, atoms) = setup(seed);
        let ty = random_type(&mut rng, 2);
        let a = random_relation(&mut rng, ty, &atoms, 5);
        let b = random_relation(&mut rng, ty, &atoms, 5);
        let u = ops::union(&a, &b).unwrap();
        prop_assert_eq!(&u, &ops::union(&b, &a).unwrap());
        prop_assert!(a.is_subset(&u) && b.is_subset(&u));
        let d = ops::difference(&a, &b).unwrap();
        prop_assert!(ops::intersection(&d, &b).unwrap().is_empty());
        prop_assert_eq!(ops::union(&d, &ops::intersection(&a, &b).unwrap()).unwrap(), a);
    }
}
