//! Expressions of the equation algebra.
//!
//! Column indices are 1-based throughout, matching the usual subscript
//! notation `π_{1,2}`, `σ_{1=3}`, `ν_2`, `μ_1`.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::model::RelationType;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SelectOp {
    Eq,
    Neq,
}

/// A relation variable bound by a solution expression.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Binder {
    pub name: String,
    pub ty: RelationType,
}

impl Binder {
    pub fn new(name: impl Into<String>, ty: RelationType) -> Binder {
        Binder {
            name: name.into(),
            ty,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Name(String),
    Domain,
    Union(Box<Expr>, Box<Expr>),
    Difference(Box<Expr>, Box<Expr>),
    Product(Box<Expr>, Box<Expr>),
    Project {
        columns: Vec<usize>,
        input: Box<Expr>,
    },
    Select {
        left: usize,
        op: SelectOp,
        right: usize,
        input: Box<Expr>,
    },
    Nest {
        columns: Vec<usize>,
        input: Box<Expr>,
    },
    Unnest {
        column: usize,
        input: Box<Expr>,
    },
    Powerset(Box<Expr>),
    /// `{(X1,...,Xp) | lhs = rhs}`
    Solve {
        vars: Vec<Binder>,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
}

impl Expr {
    pub fn name(name: impl Into<String>) -> Expr {
        Expr::Name(name.into())
    }

    pub fn union(a: Expr, b: Expr) -> Expr {
        Expr::Union(Box::new(a), Box::new(b))
    }

    pub fn minus(a: Expr, b: Expr) -> Expr {
        Expr::Difference(Box::new(a), Box::new(b))
    }

    pub fn times(a: Expr, b: Expr) -> Expr {
        Expr::Product(Box::new(a), Box::new(b))
    }

    pub fn project(columns: impl Into<Vec<usize>>, input: Expr) -> Expr {
        Expr::Project {
            columns: columns.into(),
            input: Box::new(input),
        }
    }

    pub fn select_eq(left: usize, right: usize, input: Expr) -> Expr {
        Expr::Select {
            left,
            op: SelectOp::Eq,
            right,
            input: Box::new(input),
        }
    }

    pub fn select_neq(left: usize, right: usize, input: Expr) -> Expr {
        Expr::Select {
            left,
            op: SelectOp::Neq,
            right,
            input: Box::new(input),
        }
    }

    pub fn nest(columns: impl Into<Vec<usize>>, input: Expr) -> Expr {
        Expr::Nest {
            columns: columns.into(),
            input: Box::new(input),
        }
    }

    pub fn unnest(column: usize, input: Expr) -> Expr {
        Expr::Unnest {
            column,
            input: Box::new(input),
        }
    }

    pub fn powerset(input: Expr) -> Expr {
        Expr::Powerset(Box::new(input))
    }

    pub fn solve(vars: Vec<Binder>, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Solve {
            vars,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }

    /// `(a - b) ∪ (b - a)`
    pub fn sym_diff(a: Expr, b: Expr) -> Expr {
        Expr::union(Expr::minus(a.clone(), b.clone()), Expr::minus(b, a))
    }

    /// `a ∩ b`, written `a - (a - b)`.
    pub fn intersect(a: Expr, b: Expr) -> Expr {
        Expr::minus(a.clone(), Expr::minus(a, b))
    }

    /// Direct subexpressions with their path labels.
    pub fn children(&self) -> Vec<(&'static str, &Expr)> {
        match self {
            Expr::Name(_) | Expr::Domain => vec![],
            Expr::Union(a, b) => vec![("union.left", a), ("union.right", b)],
            Expr::Difference(a, b) => vec![("minus.left", a), ("minus.right", b)],
            Expr::Product(a, b) => vec![("times.left", a), ("times.right", b)],
            Expr::Project { input, .. } => vec![("project", input)],
            Expr::Select { input, .. } => vec![("select", input)],
            Expr::Nest { input, .. } => vec![("nest", input)],
            Expr::Unnest { input, .. } => vec![("unnest", input)],
            Expr::Powerset(input) => vec![("powerset", input)],
            Expr::Solve { lhs, rhs, .. } => vec![("solve.lhs", lhs), ("solve.rhs", rhs)],
        }
    }

    /// Number of nodes.
    pub fn node_count(&self) -> usize {
        1 + self.children().iter().map(|(_, c)| c.node_count()).sum::<usize>()
    }

    /// Nesting depth of the tree.
    pub fn depth(&self) -> usize {
        1 + self.children().iter().map(|(_, c)| c.depth()).max().unwrap_or(0)
    }

    /// Every relation variable bound anywhere in the expression.
    pub fn binders(&self) -> Vec<&Binder> {
        let mut out = Vec::new();
        self.collect_binders(&mut out);
        out
    }

    fn collect_binders<'a>(&'a self, out: &mut Vec<&'a Binder>) {
        if let Expr::Solve { vars, .. } = self {
            out.extend(vars);
        }
        for (_, c) in self.children() {
            c.collect_binders(out);
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::parser::render_expr(self))
    }
}

/// Location of a subexpression, as the list of edges taken from the root.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct ExprPath(Vec<&'static str>);

impl ExprPath {
    pub fn root() -> ExprPath {
        ExprPath::default()
    }

    pub fn child(&self, step: &'static str) -> ExprPath {
        let mut steps = self.0.clone();
        steps.push(step);
        ExprPath(steps)
    }

    pub fn steps(&self) -> &[&'static str] {
        &self.0
    }
}

impl fmt::Display for ExprPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("/");
        }
        for s in &self.0 {
            write!(f, "/{s}")?;
        }
        Ok(())
    }
}

/// Relation names occurring free in `e`.
pub fn free_names(e: &Expr) -> BTreeSet<String> {
    match e {
        Expr::Name(n) => BTreeSet::from([n.clone()]),
        Expr::Domain => BTreeSet::new(),
        Expr::Solve { vars, lhs, rhs } => {
            let mut free = free_names(lhs);
            free.extend(free_names(rhs));
            for v in vars {
                free.remove(&v.name);
            }
            free
        }
        other => other
            .children()
            .into_iter()
            .flat_map(|(_, c)| free_names(c))
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ViolationKind {
    /// The name occurs free in the whole expression and is also bound inside it.
    FreeAndBound,
    /// A solution expression rebinds a name bound by an enclosing one.
    Shadowed,
    /// The same name appears twice in one binder list.
    DuplicateBinder,
    /// A relation variable was declared with the atom type 0.
    AtomTypedBinder,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("binding violation on `{name}` at {path}: {}", describe(.kind))]
pub struct BindingViolation {
    pub name: String,
    pub kind: ViolationKind,
    pub path: ExprPath,
}

fn describe(kind: &ViolationKind) -> &'static str {
    match kind {
        ViolationKind::FreeAndBound => "name is free in the expression and also becomes bound",
        ViolationKind::Shadowed => "name is already bound by an enclosing solution expression",
        ViolationKind::DuplicateBinder => "variables of one solution expression must be distinct",
        ViolationKind::AtomTypedBinder => "relation variables cannot have type 0",
    }
}

/// Checks the binding restrictions on solution expressions.
pub fn check_bindings(e: &Expr) -> Result<(), BindingViolation> {
    let free = free_names(e);
    let mut bound = Vec::new();
    walk_bindings(e, &free, &mut bound, &ExprPath::root())
}

fn walk_bindings(
    e: &Expr,
    free: &BTreeSet<String>,
    enclosing: &mut Vec<String>,
    path: &ExprPath,
) -> Result<(), BindingViolation> {
    let pushed = if let Expr::Solve { vars, .. } = e {
        for (i, v) in vars.iter().enumerate() {
            let violation = |kind| BindingViolation {
                name: v.name.clone(),
                kind,
                path: path.clone(),
            };
            if v.ty.is_atom() {
                return Err(violation(ViolationKind::AtomTypedBinder));
            }
            if vars[..i].iter().any(|w| w.name == v.name) {
                return Err(violation(ViolationKind::DuplicateBinder));
            }
            if free.contains(&v.name) {
                return Err(violation(ViolationKind::FreeAndBound));
            }
            if enclosing.contains(&v.name) {
                return Err(violation(ViolationKind::Shadowed));
            }
        }
        enclosing.extend(vars.iter().map(|v| v.name.clone()));
        vars.len()
    } else {
        0
    };
    for (step, child) in e.children() {
        walk_bindings(child, free, enclosing, &path.child(step))?;
    }
    enclosing.truncate(enclosing.len() - pushed);
    Ok(())
}

/// An equation `lhs = rhs` over the relation variables `vars`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Equation {
    pub vars: Vec<Binder>,
    pub lhs: Expr,
    pub rhs: Expr,
}

impl Equation {
    pub fn new(vars: Vec<Binder>, lhs: Expr, rhs: Expr) -> Equation {
        Equation { vars, lhs, rhs }
    }

    /// The equation `body = ∅`, with `∅` written as `body - body`.
    pub fn empty(vars: Vec<Binder>, body: Expr) -> Equation {
        let rhs = empty_for(&body);
        Equation::new(vars, body, rhs)
    }

    /// The solution expression `{(X1,...,Xp) | lhs = rhs}`.
    pub fn to_solve(&self) -> Expr {
        Expr::solve(self.vars.clone(), self.lhs.clone(), self.rhs.clone())
    }

    pub fn from_solve(e: &Expr) -> Option<Equation> {
        match e {
            Expr::Solve { vars, lhs, rhs } => Some(Equation::new(vars.clone(), (**lhs).clone(), (**rhs).clone())),
            _ => None,
        }
    }
}

/// The empty relation of `e`'s own type, as `e - e`.
pub fn empty_for(e: &Expr) -> Expr {
    Expr::minus(e.clone(), e.clone())
}

/// Rewrites `lhs = rhs` as the disequation `D - π1(D × (lhs Δ rhs)) ≠ ∅`,
/// returning its body.
pub fn equation_to_disequation(lhs: &Expr, rhs: &Expr) -> Expr {
    Expr::minus(
        Expr::Domain,
        Expr::project([1], Expr::times(Expr::Domain, Expr::sym_diff(lhs.clone(), rhs.clone()))),
    )
}

/// Rewrites the disequation `body ≠ ∅` as the equation `π1(D × body) = D`.
pub fn disequation_to_equation(body: &Expr) -> (Expr, Expr) {
    (Expr::project([1], Expr::times(Expr::Domain, body.clone())), Expr::Domain)
}
