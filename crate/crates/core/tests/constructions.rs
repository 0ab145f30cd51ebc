use eqalg_core::constructions::{
    build_nest_sparse_expr, build_parity_eq, build_singleton_eq, build_tc_powerset_expr, construction_expr,
    tc_sparse_via_harness, warshall_tc,
};
use eqalg_core::model::{enumerate_relations, numbered_domain};
use eqalg_core::{eval, solve_nonempty, Database, EvalBudget, RelationType};
use eqalg_oracle as oracle;
use eqalg_oracle::gen::random_digraph;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn budget() -> EvalBudget {
    EvalBudget::default().unlimited_space()
}

fn with_r(n: usize, r: eqalg_core::Relation) -> Database {
    Database::new(numbered_domain(n), vec![("R".to_string(), r)]).unwrap()
}

#[test]
fn parity_solution_counts() {
    let eq = build_parity_eq();
    for (n, count) in [(1, 0), (2, 2), (3, 0), (4, 12)] {
        let db = Database::with_domain(numbered_domain(n)).unwrap();
        let (out, _) = eval(&eq.to_solve(), &db, &budget()).unwrap();
        assert_eq!(out.len(), count, "n = {n}");
        let (some, _) = solve_nonempty(&eq.vars, &eq.lhs, &eq.rhs, &db, &budget()).unwrap();
        assert_eq!(some, n % 2 == 0);
    }
}

#[test]
fn singleton_solutions_are_the_domain_atoms() {
    let eq = build_singleton_eq();
    for n in 1..=6 {
        let db = Database::with_domain(numbered_domain(n)).unwrap();
        let (out, m) = eval(&eq.to_solve(), &db, &budget()).unwrap();
        assert_eq!(out.len(), n);
        assert_eq!(m.solves[0].candidates_tested, 1 << n);
        assert!(out.values().iter().all(|v| v.as_relation().unwrap().len() == 1));
    }
}

#[test]
fn tc_powerset_on_every_small_digraph() {
    let e = build_tc_powerset_expr();
    let binary = RelationType::flat(2).unwrap();
    for n in 1..=2 {
        for r in enumerate_relations(binary, &numbered_domain(n)).unwrap() {
            let db = with_r(n, r.clone());
            let (tc, _) = eval(&e, &db, &budget()).unwrap();
            assert_eq!(oracle::from_relation(&tc), oracle::transitive_closure(&oracle::from_relation(&r)));
            assert_eq!(tc, warshall_tc(&r).unwrap());
        }
    }
}

#[test]
fn tc_sparse_on_random_digraphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let n = rng.gen_range(1..=6);
        let r = random_digraph(&mut rng, &numbered_domain(n), 0.3);
        let db = with_r(n, r.clone());
        let tc = tc_sparse_via_harness(&db, &budget()).unwrap().expect("run satisfies its equation");
        assert_eq!(oracle::from_relation(&tc), oracle::transitive_closure(&oracle::from_relation(&r)));
    }
}

#[test]
fn nest_sparse_agrees_with_nest() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let e = build_nest_sparse_expr();
    for _ in 0..20 {
        let n = rng.gen_range(1..=4);
        let r = random_digraph(&mut rng, &numbered_domain(n), 0.4);
        let db = with_r(n, r.clone());
        let (out, _) = eval(&e, &db, &budget()).unwrap();
        assert_eq!(oracle::from_relation(&out), oracle::nest(&oracle::from_relation(&r), &[2], 2));
    }
}

#[test]
fn powerset_constructions_match_powerset() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..10 {
        let n = rng.gen_range(1..=3);
        let r = random_digraph(&mut rng, &numbered_domain(n), 0.3);
        let db = with_r(n, r.clone());
        let (out, _) = eval(&construction_expr("powerset", &db).unwrap(), &db, &budget()).unwrap();
        assert_eq!(oracle::from_relation(&out), oracle::powerset(&oracle::from_relation(&r)));
    }
}
