//! Compositional evaluation with candidate-by-candidate solving and space metering.
//!
//! Every intermediate result is charged to a live-space counter while it is
//! held; the peak of that counter is reported as `peak_space_units`. Relations
//! read from the database and the current values of solve variables are not
//! charged as intermediates, but each candidate assignment is charged while it
//! is being tested, and accepted solutions stay charged until the solve returns.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use thiserror::Error;

use crate::ast::{Binder, Expr, ExprPath, SelectOp};
use crate::model::{count_relations, Database, ModelError, Relation, RelationType, TupleUniverse, Value};
use crate::ops;
use crate::typecheck::{check_expr, Schema, TypeError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalBudget {
    /// Largest candidate space a single solve may enumerate.
    pub max_candidates: BigUint,
    /// Largest peak of live intermediate space.
    pub max_space_units: u64,
    /// Largest number of solutions a single solve invocation may collect.
    pub max_solutions: u64,
}

impl Default for EvalBudget {
    fn default() -> EvalBudget {
        EvalBudget {
            max_candidates: BigUint::from(10_000_000u32),
            max_space_units: 10_000_000,
            max_solutions: 1_000_000,
        }
    }
}

impl EvalBudget {
    pub fn unlimited_space(mut self) -> EvalBudget {
        self.max_space_units = u64::MAX;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveMetrics {
    pub path: ExprPath,
    /// Candidates per invocation: the product of the variables' relation counts.
    pub candidate_space: BigUint,
    pub invocations: u64,
    pub candidates_tested: u64,
    pub solutions_found: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EvalMetrics {
    pub peak_space_units: u64,
    /// One entry per solve node, in the order they were first invoked.
    pub solves: Vec<SolveMetrics>,
}

impl EvalMetrics {
    pub fn candidates_tested(&self) -> u64 {
        self.solves.iter().map(|s| s.candidates_tested).sum()
    }

    pub fn solutions_found(&self) -> u64 {
        self.solves.iter().map(|s| s.solutions_found).sum()
    }
}

impl fmt::Display for EvalMetrics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "peak_space_units: {}", self.peak_space_units)?;
        for s in &self.solves {
            writeln!(
                f,
                "solve {}: candidate_space={} invocations={} candidates_tested={} solutions_found={}",
                s.path, s.candidate_space, s.invocations, s.candidates_tested, s.solutions_found
            )?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BudgetCap {
    Candidates,
    SpaceUnits,
    Solutions,
}

impl fmt::Display for BudgetCap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BudgetCap::Candidates => "max_candidates",
            BudgetCap::SpaceUnits => "max_space_units",
            BudgetCap::Solutions => "max_solutions",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("budget {cap} exceeded at {path}: needs {required}, limit {limit}")]
pub struct BudgetExceeded {
    pub cap: BudgetCap,
    pub path: ExprPath,
    pub required: String,
    pub limit: String,
    /// Metrics gathered up to the point of failure.
    pub partial: EvalMetrics,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error(transparent)]
    Budget(Box<BudgetExceeded>),
    #[error("internal invariant violated at {path}: {message}")]
    Internal { path: ExprPath, message: String },
}

impl EvalError {
    pub fn budget(&self) -> Option<&BudgetExceeded> {
        match self {
            EvalError::Budget(b) => Some(b),
            _ => None,
        }
    }
}

// ---------------------------------------------------------------------------
// Plans
// ---------------------------------------------------------------------------

struct Plan {
    ty: RelationType,
    path: ExprPath,
    node: Node,
}

enum Node {
    Const(Relation),
    Domain,
    Var(usize),
    Union(Box<Plan>, Box<Plan>),
    Difference(Box<Plan>, Box<Plan>),
    Product(Box<Plan>, Box<Plan>),
    Project(Vec<usize>, Box<Plan>),
    Select(usize, SelectOp, usize, Box<Plan>),
    Nest(Vec<usize>, Box<Plan>),
    Unnest(usize, Box<Plan>),
    Powerset(Box<Plan>),
    Solve(Box<SolvePlan>),
}

struct SolvePlan {
    id: usize,
    vars: Vec<(usize, RelationType)>,
    lhs: Plan,
    rhs: Plan,
}

struct Compiler<'a> {
    db: &'a Database,
    scopes: Vec<(String, usize, RelationType)>,
    slots: usize,
    solves: usize,
}

impl Compiler<'_> {
    fn internal(path: &ExprPath, message: impl Into<String>) -> EvalError {
        EvalError::Internal {
            path: path.clone(),
            message: message.into(),
        }
    }

    fn compile(&mut self, e: &Expr, path: ExprPath) -> Result<Plan, EvalError> {
        let child = |c: &mut Self, label: &'static str, e: &Expr| c.compile(e, path.child(label)).map(Box::new);
        let op = |r: Result<RelationType, ops::OpError>, path: &ExprPath| {
            r.map_err(|err| Self::internal(path, err.to_string()))
        };
        let (ty, node) = match e {
            Expr::Name(n) => {
                if let Some((_, slot, ty)) = self.scopes.iter().rev().find(|(name, ..)| name == n) {
                    (*ty, Node::Var(*slot))
                } else if let Some(r) = self.db.relation(n) {
                    (r.ty(), Node::Const(r.clone()))
                } else {
                    return Err(Self::internal(&path, format!("unknown name `{n}`")));
                }
            }
            Expr::Domain => (RelationType::flat(1).expect("arity 1"), Node::Domain),
            Expr::Union(a, b) | Expr::Difference(a, b) => {
                let (la, lb) = if matches!(e, Expr::Union(..)) {
                    ("union.left", "union.right")
                } else {
                    ("minus.left", "minus.right")
                };
                let (a, b) = (child(self, la, a)?, child(self, lb, b)?);
                if a.ty != b.ty {
                    return Err(Self::internal(&path, "operand types differ"));
                }
                let ty = a.ty;
                if matches!(e, Expr::Union(..)) {
                    (ty, Node::Union(a, b))
                } else {
                    (ty, Node::Difference(a, b))
                }
            }
            Expr::Product(a, b) => {
                let (a, b) = (child(self, "times.left", a)?, child(self, "times.right", b)?);
                (a.ty.concat(&b.ty).expect("relation types"), Node::Product(a, b))
            }
            Expr::Project { columns, input } => {
                let input = child(self, "project", input)?;
                (op(ops::project_type(input.ty, columns), &path)?, Node::Project(columns.clone(), input))
            }
            Expr::Select {
                left,
                op: sop,
                right,
                input,
            } => {
                let input = child(self, "select", input)?;
                (input.ty, Node::Select(*left, *sop, *right, input))
            }
            Expr::Nest { columns, input } => {
                let input = child(self, "nest", input)?;
                (op(ops::nest_type(input.ty, columns), &path)?, Node::Nest(columns.clone(), input))
            }
            Expr::Unnest { column, input } => {
                let input = child(self, "unnest", input)?;
                (op(ops::unnest_type(input.ty, *column), &path)?, Node::Unnest(*column, input))
            }
            Expr::Powerset(input) => {
                let input = child(self, "powerset", input)?;
                (ops::powerset_type(input.ty), Node::Powerset(input))
            }
            Expr::Solve { vars, lhs, rhs } => {
                let id = self.solves;
                self.solves += 1;
                let depth = self.scopes.len();
                let mut slots = Vec::with_capacity(vars.len());
                for Binder { name, ty } in vars {
                    let slot = self.slots;
                    self.slots += 1;
                    self.scopes.push((name.clone(), slot, *ty));
                    slots.push((slot, *ty));
                }
                let lhs = self.compile(lhs, path.child("solve.lhs"))?;
                let rhs = self.compile(rhs, path.child("solve.rhs"))?;
                self.scopes.truncate(depth);
                let ty = RelationType::tuple(vars.iter().map(|b| b.ty).collect())
                    .map_err(|err| Self::internal(&path, err.to_string()))?;
                (
                    ty,
                    Node::Solve(Box::new(SolvePlan {
                        id,
                        vars: slots,
                        lhs,
                        rhs,
                    })),
                )
            }
        };
        Ok(Plan { ty, path, node })
    }
}

// ---------------------------------------------------------------------------
// Execution
// ---------------------------------------------------------------------------

struct SolveState {
    universes: Option<Vec<TupleUniverse>>,
    metrics: Option<usize>,
}

struct Machine<'a> {
    db: &'a Database,
    budget: &'a EvalBudget,
    env: Vec<Option<Relation>>,
    solves: Vec<SolveState>,
    domain: Option<Relation>,
    live: u64,
    metrics: EvalMetrics,
    /// Stop the outermost solve at its first solution.
    first_only: bool,
}

impl Machine<'_> {
    fn budget_error(&self, cap: BudgetCap, path: &ExprPath, required: String, limit: String) -> EvalError {
        let mut partial = self.metrics.clone();
        if cap == BudgetCap::SpaceUnits {
            partial.peak_space_units = partial.peak_space_units.max(self.live);
        }
        EvalError::Budget(Box::new(BudgetExceeded {
            cap,
            path: path.clone(),
            required,
            limit,
            partial,
        }))
    }

    fn charge(&mut self, units: u64, path: &ExprPath) -> Result<(), EvalError> {
        let after = self.live.saturating_add(units);
        if after > self.budget.max_space_units {
            return Err(self.budget_error(
                BudgetCap::SpaceUnits,
                path,
                after.to_string(),
                self.budget.max_space_units.to_string(),
            ));
        }
        self.live = after;
        self.metrics.peak_space_units = self.metrics.peak_space_units.max(after);
        Ok(())
    }

    /// Refuses an operation whose exact output size is known to exceed the cap.
    fn precheck(&self, predicted: Option<u128>, path: &ExprPath) -> Result<(), EvalError> {
        let total = predicted.and_then(|p| p.checked_add(self.live as u128));
        match total {
            Some(t) if t <= self.budget.max_space_units as u128 => Ok(()),
            _ => Err(self.budget_error(
                BudgetCap::SpaceUnits,
                path,
                total.map_or_else(|| "more than 2^128".to_string(), |t| t.to_string()),
                self.budget.max_space_units.to_string(),
            )),
        }
    }

    fn release(&mut self, r: &Relation) {
        self.live -= r.size();
    }

    fn run(&mut self, plan: &Plan, top: bool) -> Result<Relation, EvalError> {
        let out = match &plan.node {
            Node::Const(r) => return Ok(r.clone()),
            Node::Var(slot) => return Ok(self.env[*slot].clone().expect("bound variable")),
            Node::Domain => {
                let d = self
                    .domain
                    .get_or_insert_with(|| ops::domain(self.db.domain()))
                    .clone();
                self.charge(d.size(), &plan.path)?;
                return Ok(d);
            }
            Node::Union(a, b) | Node::Difference(a, b) | Node::Product(a, b) => {
                let x = self.run(a, false)?;
                let y = self.run(b, false)?;
                let out = match &plan.node {
                    Node::Union(..) => ops::union(&x, &y),
                    Node::Difference(..) => ops::difference(&x, &y),
                    _ => {
                        self.precheck(Some(ops::product_size(&x, &y)), &plan.path)?;
                        Ok(ops::product(&x, &y))
                    }
                };
                let out = self.op_result(out, &plan.path)?;
                self.charge(out.size(), &plan.path)?;
                self.release_child(a, &x);
                self.release_child(b, &y);
                out
            }
            Node::Project(_, input)
            | Node::Select(.., input)
            | Node::Nest(_, input)
            | Node::Unnest(_, input)
            | Node::Powerset(input) => {
                let x = self.run(input, false)?;
                let out = match &plan.node {
                    Node::Project(cols, _) => ops::project(&x, cols),
                    Node::Select(l, op, r, _) => ops::select(&x, *l, *op, *r),
                    Node::Nest(cols, _) => ops::nest(&x, cols),
                    Node::Unnest(c, _) => {
                        self.precheck(Some(ops::unnest_size(&x, *c)), &plan.path)?;
                        ops::unnest(&x, *c)
                    }
                    _ => {
                        self.precheck(ops::powerset_size(&x), &plan.path)?;
                        ops::powerset(&x)
                    }
                };
                let out = self.op_result(out, &plan.path)?;
                self.charge(out.size(), &plan.path)?;
                self.release_child(input, &x);
                out
            }
            Node::Solve(s) => self.solve(plan, s, top && self.first_only)?,
        };
        if out.ty() != plan.ty {
            return Err(Compiler::internal(
                &plan.path,
                format!("result has type {} but {} was inferred", out.ty(), plan.ty),
            ));
        }
        Ok(out)
    }

    fn op_result(&self, r: Result<Relation, ops::OpError>, path: &ExprPath) -> Result<Relation, EvalError> {
        r.map_err(|e| Compiler::internal(path, e.to_string()))
    }

    /// Leaves are views of the database or of solve variables and were never charged.
    fn release_child(&mut self, child: &Plan, r: &Relation) {
        if !matches!(child.node, Node::Const(_) | Node::Var(_)) {
            self.release(r);
        }
    }

    fn solve(&mut self, plan: &Plan, s: &SolvePlan, first_only: bool) -> Result<Relation, EvalError> {
        let mut space = BigUint::one();
        for (_, ty) in &s.vars {
            match count_relations(*ty, self.db.domain().len()) {
                Ok(c) => space *= c,
                Err(ModelError::CountOverflow(_)) => {
                    return Err(self.budget_error(
                        BudgetCap::Candidates,
                        &plan.path,
                        "more than 2^(2^32)".to_string(),
                        self.budget.max_candidates.to_string(),
                    ))
                }
                Err(e) => return Err(Compiler::internal(&plan.path, e.to_string())),
            }
        }
        let enumerable = space.to_u64().is_some_and(|c| c < 1 << 63);
        if space > self.budget.max_candidates || !enumerable {
            return Err(self.budget_error(
                BudgetCap::Candidates,
                &plan.path,
                space.to_string(),
                self.budget.max_candidates.to_string(),
            ));
        }
        let metrics_index = match self.solves[s.id].metrics {
            Some(i) => i,
            None => {
                self.metrics.solves.push(SolveMetrics {
                    path: plan.path.clone(),
                    candidate_space: space.clone(),
                    invocations: 0,
                    candidates_tested: 0,
                    solutions_found: 0,
                });
                let i = self.metrics.solves.len() - 1;
                self.solves[s.id].metrics = Some(i);
                i
            }
        };
        self.metrics.solves[metrics_index].invocations += 1;
        if self.solves[s.id].universes.is_none() {
            let universes = s
                .vars
                .iter()
                .map(|(_, ty)| TupleUniverse::new(*ty, self.db.domain()))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| Compiler::internal(&plan.path, e.to_string()))?;
            self.solves[s.id].universes = Some(universes);
        }
        let universes = self.solves[s.id].universes.take().expect("built above");
        let result = self.enumerate(plan, s, &universes, metrics_index, first_only);
        self.solves[s.id].universes = Some(universes);
        for (slot, _) in &s.vars {
            self.env[*slot] = None;
        }
        result
    }

    fn enumerate(
        &mut self,
        plan: &Plan,
        s: &SolvePlan,
        universes: &[TupleUniverse],
        metrics_index: usize,
        first_only: bool,
    ) -> Result<Relation, EvalError> {
        let p = s.vars.len();
        let mut masks = vec![0u64; p];
        for (slot, ty) in &s.vars {
            self.env[*slot] = Some(Relation::empty(*ty));
        }
        let mut solutions: Vec<Value> = Vec::new();
        let mut found = 0u64;
        loop {
            let candidate: u64 = s.vars.iter().map(|(slot, _)| self.env[*slot].as_ref().unwrap().size()).sum();
            self.charge(candidate, &plan.path)?;
            let lhs = self.run(&s.lhs, false)?;
            let rhs = self.run(&s.rhs, false)?;
            let equal = lhs == rhs;
            self.release_child(&s.lhs, &lhs);
            self.release_child(&s.rhs, &rhs);
            self.metrics.solves[metrics_index].candidates_tested += 1;
            if equal {
                found += 1;
                self.metrics.solves[metrics_index].solutions_found += 1;
                if found > self.budget.max_solutions {
                    return Err(self.budget_error(
                        BudgetCap::Solutions,
                        &plan.path,
                        found.to_string(),
                        self.budget.max_solutions.to_string(),
                    ));
                }
                self.charge(1 + candidate, &plan.path)?;
                solutions.extend(
                    s.vars
                        .iter()
                        .map(|(slot, _)| Value::Relation(self.env[*slot].clone().unwrap())),
                );
            }
            self.live -= candidate;
            if equal && first_only {
                break;
            }
            // odometer over the variables, the first one fastest
            let mut i = 0;
            loop {
                if i == p {
                    return Ok(Relation::from_flat(plan.ty, solutions));
                }
                let width = universes[i].len();
                masks[i] += 1;
                let carry = width < 64 && masks[i] >> width != 0;
                if carry {
                    masks[i] = 0;
                }
                self.env[s.vars[i].0] = Some(universes[i].subset_from_mask(masks[i]));
                if !carry {
                    break;
                }
                i += 1;
            }
        }
        Ok(Relation::from_flat(plan.ty, solutions))
    }
}

fn prepare(e: &Expr, db: &Database) -> Result<(Plan, usize, usize), EvalError> {
    check_expr(e, &Schema::from_database(db))?;
    let mut c = Compiler {
        db,
        scopes: Vec::new(),
        slots: 0,
        solves: 0,
    };
    let plan = c.compile(e, ExprPath::root())?;
    Ok((plan, c.slots, c.solves))
}

fn execute(e: &Expr, db: &Database, budget: &EvalBudget, first_only: bool) -> Result<(Relation, EvalMetrics), EvalError> {
    let (plan, slots, solves) = prepare(e, db)?;
    let mut m = Machine {
        db,
        budget,
        env: vec![None; slots],
        solves: (0..solves)
            .map(|_| SolveState {
                universes: None,
                metrics: None,
            })
            .collect(),
        domain: None,
        live: 0,
        metrics: EvalMetrics::default(),
        first_only,
    };
    let out = m.run(&plan, true)?;
    Ok((out, m.metrics))
}

/// Typechecks `e` against `db` and evaluates it.
pub fn eval(e: &Expr, db: &Database, budget: &EvalBudget) -> Result<(Relation, EvalMetrics), EvalError> {
    execute(e, db, budget, false)
}

/// The solution set of `e1 = e2` over `vars`.
pub fn solve(
    vars: &[Binder],
    e1: &Expr,
    e2: &Expr,
    db: &Database,
    budget: &EvalBudget,
) -> Result<(Relation, EvalMetrics), EvalError> {
    eval(&Expr::solve(vars.to_vec(), e1.clone(), e2.clone()), db, budget)
}

/// Whether `e1 = e2` has a solution, stopping at the first one found.
pub fn solve_nonempty(
    vars: &[Binder],
    e1: &Expr,
    e2: &Expr,
    db: &Database,
    budget: &EvalBudget,
) -> Result<(bool, EvalMetrics), EvalError> {
    let e = Expr::solve(vars.to_vec(), e1.clone(), e2.clone());
    let (r, m) = execute(&e, db, budget, true)?;
    Ok((!r.is_empty(), m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse_database, parse_expr, parse_type, render_relation};

    fn run(db: &str, e: &str) -> (String, EvalMetrics) {
        let (db, _) = parse_database(db).unwrap();
        let (r, m) = eval(&parse_expr(e).unwrap(), &db, &EvalBudget::default()).unwrap();
        (render_relation(&r), m)
    }

    #[test]
    fn union_of_unaries() {
        let db = "domain [a,b] relations { R : (0) = [[a]] S : (0) = [[b]] }";
        assert_eq!(run(db, "union(R,S)").0, "[[a],[b]]");
    }

    #[test]
    fn powerset_of_binary_domain() {
        let db = "domain [a,b] relations { R : (0) = [[a],[b]] }";
        assert_eq!(run(db, "powerset(R)").0, "[[[]],[[[a]]],[[[a],[b]]],[[[b]]]]");
    }

    #[test]
    fn powerset_equation() {
        let db = "domain [a,b] relations { R : (0) = [[a]] }";
        let (out, m) = run(db, "solve{(X:(0)) | union(X,R) = R}");
        assert_eq!(out, "[[[]],[[[a]]]]");
        assert_eq!(m.solves.len(), 1);
        assert_eq!(m.solves[0].candidates_tested, 4);
        assert_eq!(m.solves[0].solutions_found, 2);
        assert_eq!(m.solves[0].candidate_space, BigUint::from(4u32));
    }

    #[test]
    fn singleton_equation_on_three() {
        let db = "domain [a,b,c]";
        let e = "solve{(X:(0)) | union(project[1](select[1!=2](times(X,X))), minus(D,project[1](times(D,X)))) = empty}";
        assert_eq!(run(db, e).0, "[[[[a]]],[[[b]]],[[[c]]]]");
    }

    #[test]
    fn trivial_equation_is_nonempty_at_once() {
        let (db, _) = parse_database("domain [a,b,c]").unwrap();
        let x = Binder::new("X", parse_type("(0,0)").unwrap());
        let (ok, m) = solve_nonempty(&[x], &Expr::name("X"), &Expr::name("X"), &db, &EvalBudget::default()).unwrap();
        assert!(ok);
        assert_eq!(m.solves[0].candidates_tested, 1);
    }

    #[test]
    fn two_variable_odometer() {
        let db = "domain [a,b]";
        let (out, m) = run(db, "solve{(X:(0),Y:(0)) | X = Y}");
        assert_eq!(out, "[[[],[]],[[[a]],[[a]]],[[[a],[b]],[[a],[b]]],[[[b]],[[b]]]]");
        assert_eq!(m.solves[0].candidates_tested, 16);
    }

    #[test]
    fn nested_solve_inside_solve() {
        let db = "domain [a] relations { R : (0) = [[a]] }";
        let (out, m) = run(db, "solve{(Y:((0))) | union(Y, solve{(X:(0)) | union(X,R) = R}) = solve{(Z:(0)) | union(Z,R) = R}}");
        assert_eq!(out, "[[[]],[[[[]]]],[[[[]],[[[a]]]]],[[[[[a]]]]]]");
        // Y ranges over the 4 subsets of {({}),({(a)})}
        assert_eq!(m.solves[0].candidates_tested, 4);
        assert_eq!(m.solves[0].solutions_found, 4);
        assert_eq!(m.solves[1].invocations, 4);
    }

    #[test]
    fn candidate_budget_refuses_before_enumerating() {
        let (db, _) = parse_database("domain [a,b,c]").unwrap();
        let e = parse_expr("solve{(X:(0,0,0)) | X = X}").unwrap();
        let err = eval(&e, &db, &EvalBudget::default()).unwrap_err();
        let b = err.budget().unwrap();
        assert_eq!(b.cap, BudgetCap::Candidates);
        assert_eq!(b.path.to_string(), "/");
        assert_eq!(b.partial.candidates_tested(), 0);
        assert_eq!(b.required, "134217728");
    }

    #[test]
    fn space_budget_names_the_node() {
        let (db, _) = parse_database("domain [a,b,c,d]").unwrap();
        let e = parse_expr("project[1](powerset(times(D,D)))").unwrap();
        let budget = EvalBudget {
            max_space_units: 1000,
            ..EvalBudget::default()
        };
        let b = eval(&e, &db, &budget).unwrap_err().budget().unwrap().clone();
        assert_eq!(b.cap, BudgetCap::SpaceUnits);
        assert_eq!(b.path.to_string(), "/project");
    }

    #[test]
    fn solution_budget() {
        let (db, _) = parse_database("domain [a,b]").unwrap();
        let e = parse_expr("solve{(X:(0)) | X = X}").unwrap();
        let budget = EvalBudget {
            max_solutions: 3,
            ..EvalBudget::default()
        };
        let b = eval(&e, &db, &budget).unwrap_err().budget().unwrap().clone();
        assert_eq!(b.cap, BudgetCap::Solutions);
        assert_eq!(b.partial.solutions_found(), 4);
    }

    #[test]
    fn ill_typed_is_rejected() {
        let (db, _) = parse_database("domain [a] relations { R : (0) = [] S : (0,0) = [] }").unwrap();
        let err = eval(&parse_expr("union(R,S)").unwrap(), &db, &EvalBudget::default()).unwrap_err();
        assert!(matches!(err, EvalError::Type(_)));
    }

    #[test]
    fn metering_counts_live_intermediates() {
        // D: 2 tuples + 2 atoms; D×D: 4 tuples + 8 atoms, both live at once
        let (_, m) = run("domain [a,b]", "times(D,D)");
        assert_eq!(m.peak_space_units, 4 + 4 + 12);
        let (_, m) = run("domain [a,b] relations { R : (0) = [[a]] }", "R");
        assert_eq!(m.peak_space_units, 0);
    }
}
