//! Concrete equations and expressions: parity, singletons, powersets,
//! transitive closure (two ways) and nesting without `nest`.

use thiserror::Error;

use crate::ast::{Binder, Equation, Expr};
use crate::eval::{eval, EvalBudget, EvalError};
use crate::model::{Database, ModelError, Relation, RelationType, Value};
use crate::ops;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("expected a flat binary relation, found type {0}")]
    NotBinary(RelationType),
    #[error("the database has no relation named `{0}`")]
    MissingRelation(String),
    #[error("unknown construction `{0}`")]
    Unknown(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

fn binary() -> RelationType {
    RelationType::flat(2).expect("arity 2")
}

fn check_binary(r: &Relation) -> Result<(), ConstructionError> {
    if r.ty() != binary() {
        return Err(ConstructionError::NotBinary(r.ty()));
    }
    Ok(())
}

fn x(name: &str) -> Expr {
    Expr::name(name)
}

// ---------------------------------------------------------------------------
// Binary relation powers and the Run relation
// ---------------------------------------------------------------------------

/// `S ∘ T = π_{1,4} σ_{2=3} (S × T)`.
pub fn compose(s: &Relation, t: &Relation) -> Result<Relation, ConstructionError> {
    check_binary(s)?;
    check_binary(t)?;
    let joined = ops::select(&ops::product(s, t), 2, crate::ast::SelectOp::Eq, 3).expect("arity 4");
    Ok(ops::project(&joined, &[1, 4]).expect("arity 4"))
}

/// `R^i`, `R^{≤i}` and `R^{=i}` for one exponent `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Power {
    pub power: Relation,
    pub upto: Relation,
    pub exact: Relation,
}

/// Powers of `R` for `i = 1..=|R|+1`; `powers[i-1]` holds exponent `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PowerTable {
    pub r: Relation,
    pub powers: Vec<Power>,
}

impl PowerTable {
    pub fn get(&self, i: usize) -> &Power {
        &self.powers[i - 1]
    }
}

pub fn build_power_table(r: &Relation) -> Result<PowerTable, ConstructionError> {
    check_binary(r)?;
    let mut powers: Vec<Power> = Vec::with_capacity(r.len() + 1);
    powers.push(Power {
        power: r.clone(),
        upto: r.clone(),
        exact: r.clone(),
    });
    for _ in 2..=r.len() + 1 {
        let prev = powers.last().expect("non-empty");
        let power = compose(&prev.power, r)?;
        let exact = ops::difference(&power, &prev.upto).expect("same type");
        let upto = ops::union(&prev.upto, &power).expect("same type");
        powers.push(Power { power, upto, exact });
    }
    Ok(PowerTable { r: r.clone(), powers })
}

/// `Run = ⋃_{i=1}^{|R|} R^{≤i} × R^{≤i+1} × R^{=i+1}`.
pub fn build_run(r: &Relation) -> Result<Relation, ConstructionError> {
    let table = build_power_table(r)?;
    let mut run = Relation::empty(RelationType::flat(6).expect("arity 6"));
    for i in 1..=r.len() {
        let block = ops::product(&ops::product(&table.get(i).upto, &table.get(i + 1).upto), &table.get(i + 1).exact);
        run = ops::union(&run, &block).expect("same type");
    }
    Ok(run)
}

/// Transitive closure by Warshall's algorithm on an adjacency matrix.
#[allow(clippy::needless_range_loop)]
pub fn warshall_tc(r: &Relation) -> Result<Relation, ConstructionError> {
    check_binary(r)?;
    let mut atoms: Vec<Value> = r.values().to_vec();
    atoms.sort();
    atoms.dedup();
    let n = atoms.len();
    let index = |v: &Value| atoms.binary_search(v).expect("present");
    let mut m = vec![vec![false; n]; n];
    for t in r.tuples() {
        m[index(&t[0])][index(&t[1])] = true;
    }
    for k in 0..n {
        for i in 0..n {
            if m[i][k] {
                for j in 0..n {
                    if m[k][j] {
                        m[i][j] = true;
                    }
                }
            }
        }
    }
    let mut rows = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if m[i][j] {
                rows.push(vec![atoms[i].clone(), atoms[j].clone()]);
            }
        }
    }
    Ok(Relation::from_tuples(binary(), rows)?)
}

// ---------------------------------------------------------------------------
// The Run equation
// ---------------------------------------------------------------------------

/// Algebra over the sections of a 6-ary `X`, keyed by columns 5 and 6.
struct Sections;

impl Sections {
    /// Keys `(x5,x6)`.
    fn p() -> Expr {
        Expr::project([5, 6], x("X"))
    }

    /// `(x5,x6,x1,x2)`: the first halves.
    fn hat() -> Expr {
        Expr::project([5, 6, 1, 2], x("X"))
    }

    /// `(x5,x6,x3,x4)`: the second halves.
    fn check() -> Expr {
        Expr::project([5, 6, 3, 4], x("X"))
    }

    /// `(x5,x6,x1,x2,x3,x4)`.
    fn tilde() -> Expr {
        Expr::project([5, 6, 1, 2, 3, 4], x("X"))
    }

    /// Keyed composition `(k, a, c)` for `(k, a, b) ∈ s` and `(b, c) ∈ R`.
    fn compose_r(s: Expr) -> Expr {
        Expr::project([1, 2, 3, 6], Expr::select_eq(4, 5, Expr::times(s, x("R"))))
    }

    /// Key pairs `(k, k')` whose section `s1(k)` is not contained in `s2(k')`.
    fn not_subset(s1: Expr, s2: Expr) -> Expr {
        let left = Expr::project([1, 2, 5, 6, 3, 4], Expr::times(s1, Self::p()));
        let right = Expr::times(Self::p(), s2);
        Expr::project([1, 2, 3, 4], Expr::minus(left, right))
    }

    /// Key pairs `(k, k')` with `s1(k) ≠ s2(k')`.
    fn differ(s1: Expr, s2: Expr) -> Expr {
        Expr::union(
            Self::not_subset(s1.clone(), s2.clone()),
            Expr::project([3, 4, 1, 2], Self::not_subset(s2, s1)),
        )
    }

    /// Key pairs `(k, k')` with `s1(k) = s2(k')`.
    fn agree(s1: Expr, s2: Expr) -> Expr {
        Expr::minus(Expr::times(Self::p(), Self::p()), Self::differ(s1, s2))
    }

    /// Keys `k` with `hat(k) ≠ R`.
    fn hat_not_r() -> Expr {
        let pr = Expr::times(Self::p(), x("R"));
        Expr::project([1, 2], Expr::sym_diff(Self::hat(), pr))
    }
}

/// The violation witnesses of each condition on `X`, labelled.
///
/// `X` is `Run` exactly when all of them are empty.
pub fn run_conditions() -> Vec<(&'static str, Expr)> {
    use Sections as S;
    let pr = || Expr::times(S::p(), x("R"));
    let join = Expr::project(
        [1, 2, 3, 4, 7, 8],
        Expr::select_eq(2, 6, Expr::select_eq(1, 5, Expr::times(S::hat(), S::check()))),
    );
    let diag = Expr::project([1, 2, 1, 2], S::p());
    let diff = Expr::minus(S::check(), S::hat());
    let r2 = Expr::minus(
        Expr::project([1, 4], Expr::select_eq(2, 3, Expr::times(x("R"), x("R")))),
        x("R"),
    );
    let grow = Expr::project([1, 2], Expr::minus(S::compose_r(S::check()), S::check()));
    vec![
        ("product", Expr::minus(join, S::tilde())),
        ("contains-r", Expr::minus(pr(), S::hat())),
        (
            "step",
            Expr::sym_diff(Expr::union(S::hat(), S::compose_r(S::hat())), S::check()),
        ),
        (
            "new-key",
            Expr::union(Expr::minus(diag.clone(), S::check()), Expr::intersect(diag, S::hat())),
        ),
        (
            "same-stage",
            Expr::union(
                Expr::minus(diff.clone(), Expr::times(S::p(), S::p())),
                Expr::intersect(diff, S::differ(S::hat(), S::hat())),
            ),
        ),
        (
            "first-stage",
            Expr::union(
                Expr::minus(r2.clone(), S::p()),
                Expr::intersect(r2, S::hat_not_r()),
            ),
        ),
        (
            "next-stage",
            Expr::minus(grow, Expr::project([1, 2], S::agree(S::check(), S::hat()))),
        ),
        (
            "previous-stage",
            Expr::minus(S::hat_not_r(), Expr::project([1, 2], S::agree(S::hat(), S::check()))),
        ),
    ]
}

/// `X : (0,0,0,0,0,0)` with the union of all condition witnesses equated to empty.
///
/// The witnesses have different arities, so each is cut down to its first column.
pub fn build_run_equation() -> Equation {
    let body = run_conditions()
        .into_iter()
        .map(|(_, e)| Expr::project([1], e))
        .reduce(Expr::union)
        .expect("non-empty");
    Equation::empty(
        vec![Binder::new("X", RelationType::flat(6).expect("arity 6"))],
        body,
    )
}

/// `π_{4,5} μ_1 {(X) | run = ∅} ∪ R`: the middle columns of the unique solution,
/// or `R` itself when the solution is empty.
pub fn build_tc_sparse_expr() -> Expr {
    tc_sparse_downstream(build_run_equation().to_solve())
}

/// The part of the transitive-closure pipeline after the solve.
pub fn tc_sparse_downstream(solutions: Expr) -> Expr {
    Expr::union(Expr::project([4, 5], Expr::unnest(1, solutions)), x("R"))
}

/// Outcome of checking a supplied candidate against the Run equation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunCheck {
    /// Whether both sides of the assembled equation agree.
    pub equation: bool,
    /// Labels of the conditions the candidate violates.
    pub violated: Vec<&'static str>,
}

impl RunCheck {
    pub fn holds(&self) -> bool {
        self.equation
    }
}

/// Evaluates every condition of the Run equation with `X` bound to `candidate`.
pub fn check_run_candidate(db: &Database, candidate: &Relation, budget: &EvalBudget) -> Result<RunCheck, ConstructionError> {
    let db = db.with_relation("X", candidate.clone())?;
    let mut violated = Vec::new();
    for (label, e) in run_conditions() {
        let (r, _) = eval(&e, &db, budget)?;
        if !r.is_empty() {
            violated.push(label);
        }
    }
    let eq = build_run_equation();
    let (lhs, _) = eval(&eq.lhs, &db, budget)?;
    let (rhs, _) = eval(&eq.rhs, &db, budget)?;
    Ok(RunCheck {
        equation: lhs == rhs,
        violated,
    })
}

/// Transitive closure of `R` through the Run equation, with `build_run` as the
/// supplied candidate instead of enumerating all 6-ary relations.
///
/// Returns `None` when the candidate fails the equation.
pub fn tc_sparse_via_harness(db: &Database, budget: &EvalBudget) -> Result<Option<Relation>, ConstructionError> {
    let r = db
        .relation("R")
        .ok_or_else(|| ConstructionError::MissingRelation("R".into()))?;
    let run = build_run(r)?;
    if !check_run_candidate(db, &run, budget)?.holds() {
        return Ok(None);
    }
    let solutions = Relation::from_tuples(
        RelationType::tuple(vec![run.ty()]).expect("non-empty"),
        vec![vec![Value::Relation(run)]],
    )?;
    let db = db.with_relation("Sol", solutions)?;
    let (tc, _) = eval(&tc_sparse_downstream(x("Sol")), &db, budget)?;
    Ok(Some(tc))
}

// ---------------------------------------------------------------------------
// Transitive closure through the powerset-style solve
// ---------------------------------------------------------------------------

/// Empty iff `T` contains `R` and is transitively closed.
pub fn e_tc(t: Expr) -> Expr {
    let tt = Expr::project([1, 4], Expr::select_eq(2, 3, Expr::times(t.clone(), t.clone())));
    Expr::union(Expr::minus(tt, t.clone()), Expr::minus(x("R"), t))
}

/// The members of `s : ((τ))` that have no proper subset in `s`.
pub fn e_min(s: Expr) -> Expr {
    // all pairs (T, T') of members
    let w = Expr::project([1, 3], Expr::unnest(2, Expr::nest([1], s.clone())));
    // pairs with T' not contained in T
    let not_sub = Expr::project(
        [1, 2],
        Expr::minus(Expr::unnest(2, w.clone()), Expr::unnest(1, w.clone())),
    );
    let sub = Expr::minus(w, not_sub);
    let non_minimal = Expr::project([1], Expr::select_neq(1, 2, sub));
    Expr::minus(s, non_minimal)
}

/// `{(T) | e_tc = ∅}`: all transitively closed supersets of `R`.
pub fn tc_supersets_expr() -> Expr {
    Expr::solve(vec![Binder::new("T", binary())], e_tc(x("T")), Expr::minus(x("R"), x("R")))
}

/// `π_{2,3} μ_1 e_min({(T) | e_tc = ∅})`.
pub fn build_tc_powerset_expr() -> Expr {
    Expr::project([2, 3], Expr::unnest(1, e_min(tc_supersets_expr())))
}

// ---------------------------------------------------------------------------
// Small equations
// ---------------------------------------------------------------------------

/// `X : (0,0)` is a fixpoint-free matching of the domain: solvable iff the domain is even.
pub fn build_parity_eq() -> Equation {
    let xx = || Expr::times(x("X"), x("X"));
    let p1 = || Expr::project([1], x("X"));
    let p2 = || Expr::project([2], x("X"));
    let both = || Expr::union(p1(), p2());
    let body = [
        Expr::project([1], Expr::select_neq(2, 4, Expr::select_eq(1, 3, xx()))),
        Expr::project([2], Expr::select_eq(2, 4, Expr::select_neq(1, 3, xx()))),
        Expr::minus(p1(), Expr::minus(p1(), p2())),
        Expr::minus(Expr::Domain, both()),
        Expr::minus(both(), Expr::Domain),
    ]
    .into_iter()
    .reduce(Expr::union)
    .expect("non-empty");
    Equation::empty(vec![Binder::new("X", binary())], body)
}

/// `X : (0)` is a singleton.
///
/// `π_1 σ_{1≠2}(X × X)` is non-empty when `X` has two elements and
/// `D − π_1(D × X)` is non-empty when `X` is empty.
pub fn build_singleton_eq() -> Equation {
    let unary = RelationType::flat(1).expect("arity 1");
    let two = Expr::project([1], Expr::select_neq(1, 2, Expr::times(x("X"), x("X"))));
    let none = Expr::minus(Expr::Domain, Expr::project([1], Expr::times(Expr::Domain, x("X"))));
    Equation::empty(vec![Binder::new("X", unary)], Expr::union(two, none))
}

/// `{(X) | X ∪ R = R}` for `X` of the type of `R`.
pub fn build_powerset_eq(ty: RelationType) -> Equation {
    Equation::new(vec![Binder::new("X", ty)], Expr::union(x("X"), x("R")), x("R"))
}

/// `{(Y) | Y ∪ P = P}` where `P` is the powerset equation's solution set.
pub fn build_powerset_of_powerset_eq(ty: RelationType) -> Equation {
    let inner = build_powerset_eq(ty).to_solve();
    let outer_ty = RelationType::tuple(vec![ty]).expect("non-empty");
    Equation::new(
        vec![Binder::new("Y", outer_ty)],
        Expr::union(x("Y"), inner.clone()),
        inner,
    )
}

/// `X = {x}` with `x ∈ π_1(R)` and `Y = {y | (x,y) ∈ R}`.
///
/// `X = Y = ∅` also satisfies it; that solution disappears under `unnest[1]`.
pub fn build_nest_sparse_equation() -> Equation {
    let unary = RelationType::flat(1).expect("arity 1");
    let body = [
        Expr::project([1], Expr::select_neq(1, 2, Expr::times(x("X"), x("X")))),
        Expr::minus(x("X"), Expr::project([1], x("R"))),
        Expr::sym_diff(x("Y"), Expr::project([3], Expr::select_eq(1, 2, Expr::times(x("X"), x("R"))))),
    ]
    .into_iter()
    .reduce(Expr::union)
    .expect("non-empty");
    Equation::empty(vec![Binder::new("X", unary), Binder::new("Y", unary)], body)
}

/// `nest[2](R)` for `R : (0,0)` without `nest`: unnest the solutions `(X, Y, x)`
/// and join them back to `R` on `x`.
pub fn build_nest_sparse_expr() -> Expr {
    let triples = Expr::unnest(1, build_nest_sparse_equation().to_solve());
    Expr::project([4, 5, 2], Expr::select_eq(3, 4, Expr::times(triples, x("R"))))
}

// ---------------------------------------------------------------------------
// Registry
// ---------------------------------------------------------------------------

/// Named constructions addressable from the command line.
pub const CONSTRUCTIONS: &[(&str, &str)] = &[
    ("parity", "X:(0,0) pairs up the domain; solvable iff the domain size is even"),
    ("singleton", "X:(0) is a singleton subset of the domain"),
    ("powerset", "{(X) | X ∪ R = R}: all subsets of R"),
    ("powerset-of-powerset", "{(Y) | Y ⊆ {(X) | X ⊆ R}}"),
    ("tc-powerset", "transitive closure of R via the minimal transitively closed superset"),
    ("tc-sparse", "transitive closure of R via the unique solution of the Run equation"),
    ("nest-sparse", "nest[2](R) via a sparse equation, without the nest operator"),
];

/// The expression a construction evaluates on `db`.
///
/// Equations are returned as their solution expressions. Constructions over
/// `R` take its type from `db`.
pub fn construction_expr(name: &str, db: &Database) -> Result<Expr, ConstructionError> {
    let r_type = || {
        db.relation("R")
            .map(Relation::ty)
            .ok_or_else(|| ConstructionError::MissingRelation("R".into()))
    };
    let binary_r = || -> Result<(), ConstructionError> {
        let ty = r_type()?;
        if ty != binary() {
            return Err(ConstructionError::NotBinary(ty));
        }
        Ok(())
    };
    Ok(match name {
        "parity" => build_parity_eq().to_solve(),
        "singleton" => build_singleton_eq().to_solve(),
        "powerset" => build_powerset_eq(r_type()?).to_solve(),
        "powerset-of-powerset" => build_powerset_of_powerset_eq(r_type()?).to_solve(),
        "tc-powerset" => {
            binary_r()?;
            build_tc_powerset_expr()
        }
        "tc-sparse" => {
            binary_r()?;
            build_tc_sparse_expr()
        }
        "nest-sparse" => {
            binary_r()?;
            build_nest_sparse_expr()
        }
        other => return Err(ConstructionError::Unknown(other.to_string())),
    })
}

/// The equation behind a named equation construction, for profiling.
pub fn construction_equation(name: &str, db: &Database) -> Result<Equation, ConstructionError> {
    match name {
        "parity" => Ok(build_parity_eq()),
        "singleton" => Ok(build_singleton_eq()),
        "nest-sparse" => Ok(build_nest_sparse_equation()),
        "tc-powerset" => Ok(Equation::from_solve(&tc_supersets_expr()).expect("solve")),
        "tc-sparse" => Ok(build_run_equation()),
        _ => {
            let e = construction_expr(name, db)?;
            Ok(Equation::from_solve(&e).expect("solve"))
        }
    }
}
