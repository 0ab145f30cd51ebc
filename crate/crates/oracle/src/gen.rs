//! Seeded random relations, databases, expressions and equations.

use rand::seq::SliceRandom;
use rand::Rng;

use eqalg_core::ast::{Binder, Equation, Expr};
use eqalg_core::model::{canonicalize, numbered_domain, Atom, Database, RawValue, Relation, RelationType, Value};
use eqalg_core::Schema;

/// Largest arity a generated expression may reach.
pub const MAX_ARITY: usize = 4;

/// A random type of nesting depth at most `depth` (at least 1) and arity at most 3.
pub fn random_type<R: Rng>(rng: &mut R, depth: usize) -> RelationType {
    let arity = rng.gen_range(1..=3);
    let comps = (0..arity)
        .map(|_| {
            if depth > 1 && rng.gen_bool(0.3) {
                random_type(rng, depth - 1)
            } else {
                RelationType::atom()
            }
        })
        .collect();
    RelationType::tuple(comps).expect("non-empty")
}

fn random_raw<R: Rng>(rng: &mut R, ty: RelationType, atoms: &[Atom], max_rows: usize) -> RawValue {
    match ty.components() {
        None => RawValue::Atom(atoms.choose(rng).expect("non-empty domain").as_str().to_string()),
        Some(comps) => {
            let rows = rng.gen_range(0..=max_rows);
            RawValue::Set(
                (0..rows)
                    .map(|_| {
                        comps
                            .iter()
                            .map(|c| random_raw(rng, *c, atoms, (max_rows / 2).max(1)))
                            .collect()
                    })
                    .collect(),
            )
        }
    }
}

/// A random relation of type `ty` with at most `max_rows` tuples before deduplication.
pub fn random_relation<R: Rng>(rng: &mut R, ty: RelationType, atoms: &[Atom], max_rows: usize) -> Relation {
    match canonicalize(&random_raw(rng, ty, atoms, max_rows), ty).expect("well typed") {
        Value::Relation(r) => r,
        Value::Atom(_) => unreachable!("relation type"),
    }
}

/// A random flat binary relation where each pair is present with probability `p`.
pub fn random_digraph<R: Rng>(rng: &mut R, atoms: &[Atom], p: f64) -> Relation {
    let mut rows = Vec::new();
    for a in atoms {
        for b in atoms {
            if rng.gen_bool(p) {
                rows.push(vec![Value::Atom(*a), Value::Atom(*b)]);
            }
        }
    }
    Relation::from_tuples(RelationType::flat(2).expect("arity 2"), rows).expect("well typed")
}

/// A database over `x1..xn` with one random relation per schema entry.
pub fn random_database<R: Rng>(rng: &mut R, n: usize, schema: &Schema, max_rows: usize) -> Database {
    let atoms = numbered_domain(n);
    let rels: Vec<(String, Relation)> = schema
        .iter()
        .map(|(name, ty)| (name.to_string(), random_relation(rng, ty, &atoms, max_rows)))
        .collect();
    Database::new(atoms, rels).expect("valid database")
}

/// A random permutation of the domain applied to every relation.
pub fn permute_database<R: Rng>(rng: &mut R, db: &Database) -> (Database, impl Fn(Atom) -> Atom) {
    let from = db.domain().to_vec();
    let mut to = from.clone();
    to.shuffle(rng);
    let f = move |a: Atom| to[from.binary_search(&a).expect("domain atom")];
    (db.map_atoms(&f).expect("bijection"), f)
}

/// Builds random well-typed expressions over a schema.
pub struct ExprGen<'a> {
    pub schema: &'a Schema,
    /// Allow `solve` nodes (with one flat variable of arity at most 2).
    pub solves: bool,
    /// Allow `powerset` (only of single-column projections).
    pub powersets: bool,
    pub fresh: usize,
}

impl<'a> ExprGen<'a> {
    pub fn new(schema: &'a Schema) -> ExprGen<'a> {
        ExprGen {
            schema,
            solves: true,
            powersets: true,
            fresh: 0,
        }
    }

    fn leaves(&self, vars: &[(String, RelationType)]) -> Vec<(Expr, RelationType)> {
        let mut out: Vec<(Expr, RelationType)> =
            self.schema.iter().map(|(n, t)| (Expr::name(n), t)).collect();
        out.extend(vars.iter().map(|(n, t)| (Expr::name(n.as_str()), *t)));
        out.push((Expr::Domain, RelationType::flat(1).expect("arity 1")));
        out
    }

    /// A random expression and its type.
    pub fn expr<R: Rng>(&mut self, rng: &mut R, vars: &[(String, RelationType)], depth: usize) -> (Expr, RelationType) {
        let leaves = self.leaves(vars);
        if depth == 0 || rng.gen_bool(0.2) {
            return leaves.choose(rng).expect("D is always there").clone();
        }
        let (a, ta) = self.expr(rng, vars, depth - 1);
        let comps = ta.components().expect("relation").to_vec();
        match rng.gen_range(0..10) {
            0 | 1 => {
                let b = self.of_type(rng, vars, depth - 1, ta, &a);
                if rng.gen_bool(0.5) {
                    (Expr::union(a, b), ta)
                } else {
                    (Expr::minus(a, b), ta)
                }
            }
            2 => {
                let (b, tb) = self.expr(rng, vars, depth - 1);
                if ta.arity() + tb.arity() <= MAX_ARITY {
                    (Expr::times(a, b), ta.concat(&tb).expect("relations"))
                } else {
                    (a, ta)
                }
            }
            3 => {
                let k = rng.gen_range(1..=comps.len().min(2));
                let cols: Vec<usize> = (0..k).map(|_| rng.gen_range(1..=comps.len())).collect();
                let ty = RelationType::tuple(cols.iter().map(|&c| comps[c - 1]).collect()).expect("non-empty");
                (Expr::project(cols, a), ty)
            }
            4 => {
                let pairs: Vec<(usize, usize)> = (1..=comps.len())
                    .flat_map(|i| (1..=comps.len()).map(move |j| (i, j)))
                    .filter(|&(i, j)| i != j && comps[i - 1] == comps[j - 1])
                    .collect();
                match pairs.choose(rng) {
                    Some(&(i, j)) if rng.gen_bool(0.5) => (Expr::select_eq(i, j, a), ta),
                    Some(&(i, j)) => (Expr::select_neq(i, j, a), ta),
                    None => (a, ta),
                }
            }
            5 if comps.len() >= 2 && comps.len() < MAX_ARITY => {
                let col = rng.gen_range(1..=comps.len());
                let inner = RelationType::tuple(vec![comps[col - 1]]).expect("non-empty");
                let mut out = comps.clone();
                out.push(inner);
                (Expr::nest([col], a), RelationType::tuple(out).expect("non-empty"))
            }
            6 => {
                let nested: Vec<usize> = (1..=comps.len()).filter(|&c| !comps[c - 1].is_atom()).collect();
                match nested.choose(rng) {
                    Some(&c) if comps.len() + comps[c - 1].arity() <= MAX_ARITY => {
                        let mut out = comps.clone();
                        out.extend_from_slice(comps[c - 1].components().expect("relation"));
                        (Expr::unnest(c, a), RelationType::tuple(out).expect("non-empty"))
                    }
                    _ => (a, ta),
                }
            }
            7 if self.powersets => {
                let col = rng.gen_range(1..=comps.len());
                let inner = RelationType::tuple(vec![comps[col - 1]]).expect("non-empty");
                // keep the base small: a single column of a schema relation or of D
                let base = leaves.choose(rng).expect("non-empty").clone();
                let bcomps = base.1.components().expect("relation");
                if bcomps[0] == comps[col - 1] && bcomps[0].is_atom() {
                    let p = Expr::powerset(Expr::project([1], base.0));
                    (p, RelationType::tuple(vec![inner]).expect("non-empty"))
                } else {
                    (a, ta)
                }
            }
            8 if self.solves => {
                let var_ty = RelationType::flat(rng.gen_range(1..=2)).expect("arity");
                let eq = self.equation(rng, vars, var_ty, depth - 1);
                let ty = RelationType::tuple(vec![var_ty]).expect("non-empty");
                (eq.to_solve(), ty)
            }
            _ => (a, ta),
        }
    }

    /// A random expression of type `ty`; falls back to a selection of `like`.
    pub fn of_type<R: Rng>(
        &mut self,
        rng: &mut R,
        vars: &[(String, RelationType)],
        depth: usize,
        ty: RelationType,
        like: &Expr,
    ) -> Expr {
        for _ in 0..8 {
            let (e, t) = self.expr(rng, vars, depth);
            if t == ty {
                return e;
            }
        }
        let same: Vec<Expr> = self.leaves(vars).into_iter().filter(|(_, t)| *t == ty).map(|(e, _)| e).collect();
        match same.choose(rng) {
            Some(e) => e.clone(),
            None => like.clone(),
        }
    }

    /// A random equation in one fresh variable of type `var_ty`.
    pub fn equation<R: Rng>(
        &mut self,
        rng: &mut R,
        vars: &[(String, RelationType)],
        var_ty: RelationType,
        depth: usize,
    ) -> Equation {
        self.fresh += 1;
        let name = format!("V{}", self.fresh);
        let mut inner = vars.to_vec();
        inner.push((name.clone(), var_ty));
        // solves inside solves multiply enumeration cost; keep bodies flat
        let solves = std::mem::replace(&mut self.solves, false);
        let x = Expr::name(name.as_str());
        let (lhs, t) = match rng.gen_range(0..3) {
            0 => (Expr::union(x.clone(), self.of_type(rng, &inner, depth, var_ty, &x)), var_ty),
            1 => (x.clone(), var_ty),
            _ => self.expr(rng, &inner, depth.max(1)),
        };
        let rhs = self.of_type(rng, &inner, depth, t, &lhs);
        self.solves = solves;
        Equation::new(vec![Binder::new(name, var_ty)], lhs, rhs)
    }
}
