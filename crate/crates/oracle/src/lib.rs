//! Naive set-comprehension semantics for the algebra.
//!
//! Values are plain `BTreeSet`s of tuples. Nothing here calls into the
//! evaluator or the operator kernels of `eqalg-core`; the core crate is used
//! only for the syntax tree, the type descriptors and the raw value format.

pub mod gen;

use std::collections::{BTreeMap, BTreeSet};

use eqalg_core::ast::{Expr, SelectOp};
use eqalg_core::model::{Database, RawValue, Relation, RelationType};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OVal {
    Atom(String),
    Set(ORel),
}

pub type Tuple = Vec<OVal>;
pub type ORel = BTreeSet<Tuple>;

pub fn from_raw(raw: &RawValue) -> OVal {
    match raw {
        RawValue::Atom(a) => OVal::Atom(a.clone()),
        RawValue::Set(rows) => OVal::Set(rows.iter().map(|t| t.iter().map(from_raw).collect()).collect()),
    }
}

pub fn to_raw(v: &OVal) -> RawValue {
    match v {
        OVal::Atom(a) => RawValue::Atom(a.clone()),
        OVal::Set(rows) => RawValue::Set(rows.iter().map(|t| t.iter().map(to_raw).collect()).collect()),
    }
}

pub fn from_relation(r: &Relation) -> ORel {
    match from_raw(&r.to_raw()) {
        OVal::Set(s) => s,
        OVal::Atom(_) => unreachable!("relations convert to sets"),
    }
}

pub fn domain(atoms: &[String]) -> ORel {
    atoms.iter().map(|a| vec![OVal::Atom(a.clone())]).collect()
}

pub fn union(a: &ORel, b: &ORel) -> ORel {
    a.union(b).cloned().collect()
}

pub fn difference(a: &ORel, b: &ORel) -> ORel {
    a.difference(b).cloned().collect()
}

pub fn product(a: &ORel, b: &ORel) -> ORel {
    let mut out = ORel::new();
    for s in a {
        for t in b {
            out.insert(s.iter().chain(t).cloned().collect());
        }
    }
    out
}

pub fn project(a: &ORel, cols: &[usize]) -> ORel {
    a.iter().map(|t| cols.iter().map(|&c| t[c - 1].clone()).collect()).collect()
}

pub fn select(a: &ORel, i: usize, op: SelectOp, j: usize) -> ORel {
    a.iter()
        .filter(|t| (t[i - 1] == t[j - 1]) == (op == SelectOp::Eq))
        .cloned()
        .collect()
}

/// `{ t ++ (π_I {s ∈ a | s agrees with t outside I}) | t ∈ a }`.
pub fn nest(a: &ORel, cols: &[usize], arity: usize) -> ORel {
    let rest: Vec<usize> = (1..=arity).filter(|c| !cols.contains(c)).collect();
    let agree = |s: &Tuple, t: &Tuple| rest.iter().all(|&c| s[c - 1] == t[c - 1]);
    a.iter()
        .map(|t| {
            let group: ORel = a
                .iter()
                .filter(|s| agree(s, t))
                .map(|s| cols.iter().map(|&c| s[c - 1].clone()).collect())
                .collect();
            let mut row = t.clone();
            row.push(OVal::Set(group));
            row
        })
        .collect()
}

/// `{ t ++ u | t ∈ a, u ∈ t_i }`.
pub fn unnest(a: &ORel, i: usize) -> ORel {
    let mut out = ORel::new();
    for t in a {
        if let OVal::Set(inner) = &t[i - 1] {
            for u in inner {
                out.insert(t.iter().chain(u).cloned().collect());
            }
        }
    }
    out
}

pub fn powerset(a: &ORel) -> ORel {
    let items: Vec<&Tuple> = a.iter().collect();
    let mut out = ORel::new();
    for mask in 0u64..1 << items.len() {
        let subset: ORel = items
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, t)| (*t).clone())
            .collect();
        out.insert(vec![OVal::Set(subset)]);
    }
    out
}

/// Every value of type `ty` over `atoms`.
pub fn all_values(ty: RelationType, atoms: &[String]) -> Vec<OVal> {
    match ty.components() {
        None => atoms.iter().map(|a| OVal::Atom(a.clone())).collect(),
        Some(comps) => {
            let mut tuples: Vec<Tuple> = vec![Vec::new()];
            for c in comps {
                let choices = all_values(*c, atoms);
                tuples = tuples
                    .into_iter()
                    .flat_map(|t| {
                        choices.iter().map(move |v| {
                            let mut t = t.clone();
                            t.push(v.clone());
                            t
                        })
                    })
                    .collect();
            }
            let mut out = Vec::new();
            for mask in 0u64..1 << tuples.len() {
                out.push(OVal::Set(
                    tuples
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| mask >> i & 1 == 1)
                        .map(|(_, t)| t.clone())
                        .collect(),
                ));
            }
            out
        }
    }
}

#[derive(Debug, Clone)]
pub struct OracleDb {
    pub atoms: Vec<String>,
    pub relations: BTreeMap<String, ORel>,
}

impl OracleDb {
    pub fn from_database(db: &Database) -> OracleDb {
        OracleDb {
            atoms: db.domain().iter().map(|a| a.as_str().to_string()).collect(),
            relations: db.relations().map(|(n, r)| (n.to_string(), from_relation(r))).collect(),
        }
    }
}

fn arity_of(e: &Expr, db: &Database, env: &[(String, RelationType)]) -> usize {
    // only needed for nest; read it off the core typechecker's view of names
    let mut schema = eqalg_core::Schema::from_database(db);
    for (n, t) in env {
        let _ = schema.insert(n.clone(), *t);
    }
    eqalg_core::infer_type(e, &schema).expect("well typed").arity()
}

/// Evaluates `e` by direct set comprehension, solving equations by trying
/// every assignment of the variables.
pub fn eval(e: &Expr, db: &Database) -> ORel {
    let odb = OracleDb::from_database(db);
    let mut env = Vec::new();
    let mut types = Vec::new();
    go(e, db, &odb, &mut env, &mut types)
}

fn go(
    e: &Expr,
    db: &Database,
    odb: &OracleDb,
    env: &mut Vec<(String, ORel)>,
    types: &mut Vec<(String, RelationType)>,
) -> ORel {
    match e {
        Expr::Name(n) => env
            .iter()
            .rev()
            .find(|(m, _)| m == n)
            .map(|(_, r)| r.clone())
            .or_else(|| odb.relations.get(n).cloned())
            .expect("bound name"),
        Expr::Domain => domain(&odb.atoms),
        Expr::Union(a, b) => union(&go(a, db, odb, env, types), &go(b, db, odb, env, types)),
        Expr::Difference(a, b) => difference(&go(a, db, odb, env, types), &go(b, db, odb, env, types)),
        Expr::Product(a, b) => product(&go(a, db, odb, env, types), &go(b, db, odb, env, types)),
        Expr::Project { columns, input } => project(&go(input, db, odb, env, types), columns),
        Expr::Select { left, op, right, input } => select(&go(input, db, odb, env, types), *left, *op, *right),
        Expr::Nest { columns, input } => {
            let arity = arity_of(input, db, types);
            nest(&go(input, db, odb, env, types), columns, arity)
        }
        Expr::Unnest { column, input } => unnest(&go(input, db, odb, env, types), *column),
        Expr::Powerset(input) => powerset(&go(input, db, odb, env, types)),
        Expr::Solve { vars, lhs, rhs } => {
            let choices: Vec<Vec<OVal>> = vars.iter().map(|v| all_values(v.ty, &odb.atoms)).collect();
            let mut out = ORel::new();
            let mut idx = vec![0usize; vars.len()];
            loop {
                let depth = env.len();
                for (v, (choice, i)) in vars.iter().zip(choices.iter().zip(&idx)) {
                    let OVal::Set(r) = &choice[*i] else { unreachable!() };
                    env.push((v.name.clone(), r.clone()));
                    types.push((v.name.clone(), v.ty));
                }
                let l = go(lhs, db, odb, env, types);
                let r = go(rhs, db, odb, env, types);
                let assignment: Tuple = env[depth..].iter().map(|(_, r)| OVal::Set(r.clone())).collect();
                env.truncate(depth);
                types.truncate(depth);
                if l == r {
                    out.insert(assignment);
                }
                let mut k = 0;
                loop {
                    if k == idx.len() {
                        return out;
                    }
                    idx[k] += 1;
                    if idx[k] < choices[k].len() {
                        break;
                    }
                    idx[k] = 0;
                    k += 1;
                }
            }
        }
    }
}

/// Transitive closure of a binary relation by iterating to a fixpoint.
pub fn transitive_closure(r: &ORel) -> ORel {
    let mut tc = r.clone();
    loop {
        let mut next = tc.clone();
        for s in &tc {
            for t in &tc {
                if s[1] == t[0] {
                    next.insert(vec![s[0].clone(), t[1].clone()]);
                }
            }
        }
        if next.len() == tc.len() {
            return tc;
        }
        tc = next;
    }
}

/// Size in space units: tuples plus atom occurrences, recursively.
pub fn size(r: &ORel) -> u64 {
    r.iter()
        .map(|t| {
            1 + t
                .iter()
                .map(|v| match v {
                    OVal::Atom(_) => 1,
                    OVal::Set(s) => size(s),
                })
                .sum::<u64>()
        })
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use eqalg_core::parser::{parse_database, parse_expr};

    fn a(s: &str) -> OVal {
        OVal::Atom(s.into())
    }

    #[test]
    fn nest_by_hand() {
        let r: ORel = [vec![a("a"), a("b")], vec![a("a"), a("c")], vec![a("b"), a("b")]].into();
        let n = nest(&r, &[2], 2);
        let bc: ORel = [vec![a("b")], vec![a("c")]].into();
        let b: ORel = [vec![a("b")]].into();
        let expected: ORel = [
            vec![a("a"), a("b"), OVal::Set(bc.clone())],
            vec![a("a"), a("c"), OVal::Set(bc)],
            vec![a("b"), a("b"), OVal::Set(b)],
        ]
        .into();
        assert_eq!(n, expected);
    }

    #[test]
    fn brute_force_solve() {
        let db = parse_database("domain [a,b] relations { R : (0) = [[a]] }").unwrap().0;
        let out = eval(&parse_expr("solve{(X:(0)) | union(X,R) = R}").unwrap(), &db);
        assert_eq!(out.len(), 2);
    }

    #[test]
    fn closure() {
        let r: ORel = [vec![a("a"), a("b")], vec![a("b"), a("c")]].into();
        assert_eq!(transitive_closure(&r).len(), 3);
        assert!(transitive_closure(&ORel::new()).is_empty());
    }

    #[test]
    fn value_counts() {
        let t = eqalg_core::parse_type("((0))").unwrap();
        assert_eq!(all_values(t, &["a".into()]).len(), 4);
    }
}
