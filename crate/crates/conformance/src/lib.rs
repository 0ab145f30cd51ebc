//! The acceptance criteria, each checked against an independent oracle.
//!
//! Every criterion is a function returning an [`Outcome`]; [`run_all`] runs
//! them in order. A criterion passes only if its check holds and it finishes
//! within its time limit.

use std::fmt;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use eqalg_core::ast::{disequation_to_equation, equation_to_disequation, SelectOp};
use eqalg_core::constructions::{
    build_nest_sparse_expr, build_parity_eq, build_powerset_eq, build_run, build_singleton_eq, build_tc_powerset_expr,
    check_run_candidate, tc_sparse_via_harness, warshall_tc,
};
use eqalg_core::model::{enumerate_relations, numbered_domain, Atom, Relation, RelationType, Value};
use eqalg_core::ops;
use eqalg_core::parser::{parse_expr, parse_schema, parse_type};
use eqalg_core::profiler::{meter_expression, profile, DbGenerator, GrowthClass, Verdict};
use eqalg_core::{eval, infer_type, solve_nonempty, Database, EvalBudget, EvalError, Expr, Schema};
use eqalg_oracle as oracle;
use eqalg_oracle::gen::{permute_database, random_database, random_digraph, random_relation, random_type, ExprGen};

/// Seed shared by every randomized criterion.
pub const SEED: u64 = 20_240_601;

#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: u32,
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub limit: Option<Duration>,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let limit = match self.limit {
            Some(l) => format!(" (limit {}s)", l.as_secs()),
            None => String::new(),
        };
        write!(
            f,
            "{} {:>2} {}: {} [{:.2}s{}]",
            if self.pass { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.elapsed.as_secs_f64(),
            limit
        )
    }
}

pub type Check = fn() -> Result<String, String>;

/// `(id, name, time limit in seconds, check)`.
pub const CRITERIA: &[(u32, &str, Option<u64>, Check)] = &[
    (1, "operator oracle", Some(10), operators),
    (2, "powerset equivalence", Some(5), powerset_equivalence),
    (3, "parity", Some(30), parity),
    (4, "singleton", Some(5), singleton),
    (5, "transitive closure via powerset", Some(300), tc_powerset),
    (6, "transitive closure via sparse equation", Some(120), tc_sparse),
    (7, "nesting without nest", Some(60), nest_sparse),
    (8, "rewrite preservation", None, rewrites),
    (9, "profiler dichotomy", None, dichotomy),
    (10, "genericity", None, genericity),
    (11, "space accounting", None, space),
];

pub fn run(id: u32) -> Option<Outcome> {
    let &(id, name, limit, check) = CRITERIA.iter().find(|c| c.0 == id)?;
    let limit = limit.map(Duration::from_secs);
    let start = Instant::now();
    let result = check();
    let elapsed = start.elapsed();
    let (mut pass, mut detail) = match result {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    if let Some(l) = limit {
        if elapsed > l {
            pass = false;
            detail = format!("{detail}; over the time limit");
        }
    }
    Some(Outcome {
        id,
        name,
        pass,
        detail,
        elapsed,
        limit,
    })
}

pub fn run_all() -> Vec<Outcome> {
    CRITERIA.iter().filter_map(|c| run(c.0)).collect()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: impl fmt::Display) -> String {
    e.to_string()
}

fn rng(salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(SEED ^ salt)
}

fn budget() -> EvalBudget {
    EvalBudget::default().unlimited_space()
}

fn with_r(n: usize, r: Relation) -> Result<Database, String> {
    Database::new(numbered_domain(n), vec![("R".to_string(), r)]).map_err(err)
}

/// Evaluates and also checks the result against the inferred type.
fn eval_typed(e: &Expr, db: &Database, budget: &EvalBudget) -> Result<Relation, String> {
    let ty = infer_type(e, &Schema::from_database(db)).map_err(err)?;
    let (r, _) = eval(e, db, budget).map_err(err)?;
    ensure(r.ty() == ty, || format!("result type {} differs from inferred {}", r.ty(), ty))?;
    Ok(r)
}

fn operators() -> Result<String, String> {
    let mut rng = rng(1);
    let mut checks = 0;
    for i in 0..300 {
        let n = rng.gen_range(1..=4);
        let atoms = numbered_domain(n);
        let ty = random_type(&mut rng, 2);
        let a = random_relation(&mut rng, ty, &atoms, 5);
        let b = random_relation(&mut rng, ty, &atoms, 5);
        let (oa, ob) = (oracle::from_relation(&a), oracle::from_relation(&b));
        let mismatch = |op: &str| format!("relation {i}: {op} differs from the oracle");
        let same = |r: Result<Relation, ops::OpError>, o: oracle::ORel| r.map(|r| oracle::from_relation(&r) == o).unwrap_or(false);

        let names: Vec<String> = atoms.iter().map(|a| a.as_str().to_string()).collect();
        ensure(oracle::from_relation(&ops::domain(&atoms)) == oracle::domain(&names), || mismatch("D"))?;
        ensure(same(ops::union(&a, &b), oracle::union(&oa, &ob)), || mismatch("union"))?;
        ensure(same(ops::difference(&a, &b), oracle::difference(&oa, &ob)), || mismatch("minus"))?;
        let tc = random_type(&mut rng, 1);
        let c = random_relation(&mut rng, tc, &atoms, 4);
        ensure(
            same(Ok(ops::product(&a, &c)), oracle::product(&oa, &oracle::from_relation(&c))),
            || mismatch("times"),
        )?;
        let k = ty.arity();
        let cols: Vec<usize> = (0..rng.gen_range(1..=3)).map(|_| rng.gen_range(1..=k)).collect();
        ensure(same(ops::project(&a, &cols), oracle::project(&oa, &cols)), || mismatch("project"))?;
        let (i1, j1) = (rng.gen_range(1..=k), rng.gen_range(1..=k));
        if ty.component(i1 - 1) == ty.component(j1 - 1) {
            for op in [SelectOp::Eq, SelectOp::Neq] {
                ensure(same(ops::select(&a, i1, op, j1), oracle::select(&oa, i1, op, j1)), || mismatch("select"))?;
            }
        }
        let mut nest_cols: Vec<usize> = (1..=k).filter(|_| rng.gen_bool(0.5)).collect();
        if nest_cols.is_empty() {
            nest_cols.push(rng.gen_range(1..=k));
        }
        let nested = ops::nest(&a, &nest_cols).map_err(err)?;
        ensure(oracle::from_relation(&nested) == oracle::nest(&oa, &nest_cols, k), || mismatch("nest"))?;
        ensure(
            same(ops::unnest(&nested, k + 1), oracle::unnest(&oracle::from_relation(&nested), k + 1)),
            || mismatch("unnest"),
        )?;
        for col in (1..=k).filter(|&c| !ty.component(c - 1).expect("column").is_atom()) {
            ensure(same(ops::unnest(&a, col), oracle::unnest(&oa, col)), || mismatch("unnest"))?;
        }
        if a.len() <= 8 {
            ensure(same(ops::powerset(&a), oracle::powerset(&oa)), || mismatch("powerset"))?;
        }
        checks += 1;
    }
    Ok(format!("{checks} random relations, nine operators each"))
}

fn powerset_equivalence() -> Result<String, String> {
    let mut cases = 0;
    let unary = RelationType::flat(1).map_err(err)?;
    let binary = RelationType::flat(2).map_err(err)?;
    let families = [(unary, 1), (unary, 2), (unary, 3), (binary, 2)];
    for (ty, n) in families {
        let eq = build_powerset_eq(ty).to_solve();
        for r in enumerate_relations(ty, &numbered_domain(n)).map_err(err)? {
            let db = with_r(n, r.clone())?;
            let solved = eval_typed(&eq, &db, &budget())?;
            let direct = eval_typed(&Expr::powerset(Expr::name("R")), &db, &budget())?;
            ensure(solved == direct, || format!("n = {n}, R = {}: solve differs from powerset", r.len()))?;
            ensure(
                oracle::from_relation(&solved) == oracle::powerset(&oracle::from_relation(&r)),
                || format!("n = {n}: powerset differs from the oracle"),
            )?;
            cases += 1;
        }
    }
    Ok(format!("{cases} relations"))
}

fn parity() -> Result<String, String> {
    let eq = build_parity_eq();
    let mut tested = Vec::new();
    for n in 1..=4 {
        let db = Database::with_domain(numbered_domain(n)).map_err(err)?;
        let (some, m) = solve_nonempty(&eq.vars, &eq.lhs, &eq.rhs, &db, &EvalBudget::default()).map_err(err)?;
        ensure(some == (n % 2 == 0), || format!("n = {n}: nonempty = {some}"))?;
        tested.push(format!("n={n}:{}", m.candidates_tested()));
    }
    let db = Database::with_domain(numbered_domain(4)).map_err(err)?;
    let (all, m) = eval(&eq.to_solve(), &db, &EvalBudget::default()).map_err(err)?;
    ensure(all.len() == 12, || format!("n = 4: {} solutions", all.len()))?;
    Ok(format!(
        "solvable exactly for n in {{2,4}}; candidates tested {}; all {} candidates at n=4 give 12 solutions",
        tested.join(" "),
        m.candidates_tested()
    ))
}

fn singleton() -> Result<String, String> {
    let eq = build_singleton_eq().to_solve();
    let mut counts = Vec::new();
    for n in 1..=6 {
        let db = Database::with_domain(numbered_domain(n)).map_err(err)?;
        let r = eval_typed(&eq, &db, &EvalBudget::default())?;
        let expected = oracle::domain(&db.domain().iter().map(|a| a.as_str().to_string()).collect::<Vec<_>>());
        let got: oracle::ORel = oracle::from_relation(&r)
            .into_iter()
            .flat_map(|t| match &t[0] {
                oracle::OVal::Set(s) if s.len() == 1 => s.clone(),
                _ => oracle::ORel::new(),
            })
            .collect();
        ensure(r.len() == n && got == expected, || format!("n = {n}: {} solutions", r.len()))?;
        counts.push(r.len().to_string());
    }
    Ok(format!("counts {}", counts.join(",")))
}

fn check_tc(e: &Expr, n: usize, r: Relation) -> Result<(), String> {
    let db = with_r(n, r.clone())?;
    let tc = eval_typed(e, &db, &budget())?;
    let expected = warshall_tc(&r).map_err(err)?;
    ensure(tc == expected, || format!("n = {n}: result differs from Warshall"))?;
    ensure(
        oracle::from_relation(&tc) == oracle::transitive_closure(&oracle::from_relation(&r)),
        || format!("n = {n}: result differs from the fixpoint oracle"),
    )
}

fn tc_powerset() -> Result<String, String> {
    let e = build_tc_powerset_expr();
    let binary = RelationType::flat(2).map_err(err)?;
    let mut count = 0;
    for r in enumerate_relations(binary, &numbered_domain(3)).map_err(err)? {
        check_tc(&e, 3, r)?;
        count += 1;
    }
    let mut rng = rng(5);
    let atoms = numbered_domain(4);
    for _ in 0..50 {
        check_tc(&e, 4, random_digraph(&mut rng, &atoms, 0.5))?;
    }
    Ok(format!("{count} digraphs at n=3, 50 at n=4"))
}

/// `run` with one tuple removed or one absent tuple added.
fn mutate(rng: &mut ChaCha8Rng, run: &Relation, atoms: &[Atom]) -> Result<Relation, String> {
    let mut rows: Vec<Vec<Value>> = run.tuples().map(<[Value]>::to_vec).collect();
    if !rows.is_empty() && rng.gen_bool(0.5) {
        rows.remove(rng.gen_range(0..rows.len()));
    } else {
        loop {
            let t: Vec<Value> = (0..6).map(|_| Value::Atom(atoms[rng.gen_range(0..atoms.len())])).collect();
            if !run.contains(&t) {
                rows.push(t);
                break;
            }
        }
    }
    Relation::from_tuples(run.ty(), rows).map_err(err)
}

fn tc_sparse() -> Result<String, String> {
    let mut rng = rng(6);
    let mut mutants = 0;
    let mut largest = 0;
    for i in 0..100 {
        let n = rng.gen_range(1..=8);
        let atoms = numbered_domain(n);
        let r = random_digraph(&mut rng, &atoms, 0.2);
        let db = with_r(n, r.clone())?;
        let run = build_run(&r).map_err(err)?;
        largest = largest.max(run.len());
        // the harness checks Run against the equation before using it
        let tc = tc_sparse_via_harness(&db, &budget())
            .map_err(err)?
            .ok_or_else(|| format!("digraph {i}: Run violates the equation"))?;
        let mutant = mutate(&mut rng, &run, &atoms)?;
        let check = check_run_candidate(&db, &mutant, &budget()).map_err(err)?;
        ensure(!check.holds(), || format!("digraph {i}: a mutant of Run satisfies the equation"))?;
        mutants += 1;
        ensure(tc == warshall_tc(&r).map_err(err)?, || format!("digraph {i}: result differs from Warshall"))?;
        ensure(
            oracle::from_relation(&tc) == oracle::transitive_closure(&oracle::from_relation(&r)),
            || format!("digraph {i}: result differs from the fixpoint oracle"),
        )?;
    }
    Ok(format!("100 digraphs, {mutants} mutants rejected, largest Run {largest} tuples"))
}

fn nest_sparse() -> Result<String, String> {
    let e = build_nest_sparse_expr();
    let mut rng = rng(7);
    for i in 0..50 {
        let n = rng.gen_range(1..=5);
        let r = random_digraph(&mut rng, &numbered_domain(n), 0.4);
        let db = with_r(n, r.clone())?;
        let out = eval_typed(&e, &db, &EvalBudget::default())?;
        ensure(out == ops::nest(&r, &[2]).map_err(err)?, || format!("relation {i}: differs from nest[2]"))?;
        ensure(
            oracle::from_relation(&out) == oracle::nest(&oracle::from_relation(&r), &[2], 2),
            || format!("relation {i}: differs from the oracle"),
        )?;
    }
    Ok("50 relations".into())
}

fn rewrites() -> Result<String, String> {
    let mut rng = rng(8);
    let schema = parse_schema("R:(0,0), S:(0)").map_err(err)?;
    let mut nonempty = 0;
    for i in 0..50 {
        let n = rng.gen_range(1..=3);
        let db = random_database(&mut rng, n, &schema, 4);
        let var_ty = RelationType::flat(rng.gen_range(1..=2)).map_err(err)?;
        let mut gen = ExprGen::new(&schema);
        gen.solves = false;
        let eq = gen.equation(&mut rng, &[], var_ty, 2);
        let original = eq.to_solve();
        let (lhs, rhs) = disequation_to_equation(&equation_to_disequation(&eq.lhs, &eq.rhs));
        let rewritten = Expr::solve(eq.vars.clone(), lhs, rhs);
        let expected = oracle::eval(&original, &db);
        let a = eval_typed(&original, &db, &EvalBudget::default())?;
        let b = eval_typed(&rewritten, &db, &EvalBudget::default())?;
        ensure(oracle::from_relation(&a) == expected, || format!("equation {i}: differs from brute force"))?;
        ensure(a == b, || format!("equation {i}: rewriting changed the solutions"))?;
        if !a.is_empty() {
            nonempty += 1;
        }
    }
    Ok(format!("50 equations, {nonempty} with solutions"))
}

fn dichotomy() -> Result<String, String> {
    let singleton = profile(&build_singleton_eq(), &DbGenerator::domain_only(), 1..=5, &EvalBudget::default())
        .map_err(err)?;
    ensure(singleton.growth == GrowthClass::PolyLike(1), || {
        format!("singleton classified {}", singleton.growth)
    })?;
    let full = DbGenerator::random_flat(parse_schema("R:(0)").map_err(err)?, 1.0, SEED);
    let eq = build_powerset_eq(parse_type("(0)").map_err(err)?);
    let powerset = profile(&eq, &full, 1..=4, &EvalBudget::default()).map_err(err)?;
    let counts: Vec<u64> = powerset.points.iter().map(|p| p.solutions_found).collect();
    ensure(counts == [2, 4, 8, 16], || format!("powerset counts {counts:?}"))?;
    ensure(powerset.growth == GrowthClass::ExponentialLike, || {
        format!("powerset classified {}", powerset.growth)
    })?;
    for (p, n) in singleton.points.iter().zip(1..) {
        let db = Database::with_domain(numbered_domain(n)).map_err(err)?;
        let direct = eval_typed(&build_singleton_eq().to_solve(), &db, &EvalBudget::default())?;
        ensure(p.solutions_found == direct.len() as u64, || format!("n = {n}: profile disagrees with eval"))?;
    }
    let nested = parse_expr("solve{(Y:((0))) | Y = Y}").map_err(err)?;
    let non_flat = meter_expression(&nested, &DbGenerator::domain_only(), 1..=2, &EvalBudget::default()).map_err(err)?;
    ensure(non_flat.verdict == Verdict::NonFlat, || "nested variable not flagged".into())?;
    let again = profile(&eq, &full, 1..=4, &EvalBudget::default()).map_err(err)?;
    ensure(again.document() == powerset.document(), || "reports differ between runs".into())?;
    Ok(format!(
        "singleton {}, powerset {} with counts 2,4,8,16, nested variable {}",
        singleton.growth, powerset.growth, non_flat.verdict
    ))
}

fn genericity() -> Result<String, String> {
    let mut rng = rng(10);
    let schema = parse_schema("R:(0,0), S:(0), N:((0),0)").map_err(err)?;
    let mut pairs = 0;
    while pairs < 20 {
        let n = rng.gen_range(2..=3);
        let db = random_database(&mut rng, n, &schema, 4);
        let (e, _) = ExprGen::new(&schema).expr(&mut rng, &[], 3);
        let r = match eval(&e, &db, &EvalBudget::default()) {
            Ok((r, _)) => r,
            Err(EvalError::Budget(_)) => continue,
            Err(other) => return Err(other.to_string()),
        };
        for _ in 0..20 {
            let (moved, f) = permute_database(&mut rng, &db);
            let s = eval_typed(&e, &moved, &EvalBudget::default())?;
            ensure(r.map_atoms(&f) == s, || format!("pair {pairs}: eval does not commute with a permutation"))?;
        }
        pairs += 1;
    }
    Ok("20 expressions x 20 permutations".into())
}

fn space() -> Result<String, String> {
    let poly = |g: &GrowthClass| matches!(g, GrowthClass::PolyLike(k) if *k <= 3);
    let singleton = meter_expression(
        &build_singleton_eq().to_solve(),
        &DbGenerator::domain_only(),
        2..=5,
        &EvalBudget::default(),
    )
    .map_err(err)?;
    let dense = DbGenerator::random_flat(parse_schema("R:(0,0)").map_err(err)?, 1.0, SEED);
    let nesting = meter_expression(&build_nest_sparse_expr(), &dense, 2..=5, &EvalBudget::default()).map_err(err)?;
    let powerset = parse_expr("powerset(times(D,D))").map_err(err)?;
    let blowup = meter_expression(&powerset, &DbGenerator::domain_only(), 2..=4, &budget()).map_err(err)?;
    let peaks = |r: &eqalg_core::profiler::ProfileReport| {
        r.points.iter().map(|p| p.peak_space_units.to_string()).collect::<Vec<_>>().join(",")
    };
    let detail = format!(
        "singleton peaks {} -> {}; nest-sparse peaks {} -> {}; powerset(D x D) peaks {} -> {}",
        peaks(&singleton),
        singleton.growth,
        peaks(&nesting),
        nesting.growth,
        peaks(&blowup),
        blowup.growth
    );
    let complete = singleton.truncated.is_none() && nesting.truncated.is_none() && blowup.truncated.is_none();
    if complete && poly(&singleton.growth) && poly(&nesting.growth) && blowup.growth == GrowthClass::ExponentialLike {
        Ok(detail)
    } else {
        Err(detail)
    }
}
