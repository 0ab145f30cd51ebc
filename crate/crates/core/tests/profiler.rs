use eqalg_core::constructions::{build_nest_sparse_equation, build_powerset_eq, build_singleton_eq};
use eqalg_core::parser::{parse_schema, parse_type};
use eqalg_core::profiler::{classify, profile, DbGenerator, GrowthClass};
use eqalg_core::{eval, EvalBudget};

#[test]
fn solution_counts_agree_with_eval() {
    let gen = DbGenerator::random_flat(parse_schema("R:(0,0)").unwrap(), 0.4, 17);
    let eq = build_nest_sparse_equation();
    let report = profile(&eq, &gen, 1..=5, &EvalBudget::default()).unwrap();
    assert_eq!(report.points.len(), 5);
    for p in &report.points {
        let (r, _) = eval(&eq.to_solve(), &gen.generate(p.n).unwrap(), &EvalBudget::default()).unwrap();
        assert_eq!(p.solutions_found, r.len() as u64, "n = {}", p.n);
    }
}

#[test]
fn a_larger_n_does_not_flip_canonical_classes() {
    let singleton = build_singleton_eq();
    let dom = DbGenerator::domain_only();
    for hi in 4..=7 {
        let r = profile(&singleton, &dom, 1..=hi, &EvalBudget::default()).unwrap();
        assert_eq!(r.growth, GrowthClass::PolyLike(1), "1..{hi}");
    }
    let full = DbGenerator::random_flat(parse_schema("R:(0)").unwrap(), 1.0, 0);
    let powerset = build_powerset_eq(parse_type("(0)").unwrap());
    for hi in 4..=7 {
        let r = profile(&powerset, &full, 1..=hi, &EvalBudget::default()).unwrap();
        assert_eq!(r.growth, GrowthClass::ExponentialLike, "1..{hi}");
    }
}

#[test]
fn polynomial_series_of_higher_degree() {
    let ns: Vec<usize> = (2..=7).collect();
    let cubes: Vec<f64> = ns.iter().map(|&n| (n * n * n) as f64).collect();
    assert_eq!(classify(&ns, &cubes), GrowthClass::PolyLike(3));
    let squares: Vec<f64> = ns.iter().map(|&n| (3 * n * n) as f64).collect();
    assert_eq!(classify(&ns, &squares), GrowthClass::PolyLike(2));
}

#[test]
fn reports_depend_only_on_seed() {
    let schema = parse_schema("R:(0,0)").unwrap();
    let eq = build_nest_sparse_equation();
    let a = profile(&eq, &DbGenerator::random_flat(schema.clone(), 0.5, 9), 1..=4, &EvalBudget::default()).unwrap();
    let b = profile(&eq, &DbGenerator::random_flat(schema, 0.5, 9), 1..=4, &EvalBudget::default()).unwrap();
    assert_eq!(a.document(), b.document());
    assert_eq!(a.table(), b.table());
}
