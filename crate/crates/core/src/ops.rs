//! The algebra's operators on canonical relations.
//!
//! Every function takes and returns canonical relations. Column indices are
//! 1-based, as in the surface syntax.

use std::collections::HashMap;

use thiserror::Error;

use crate::ast::SelectOp;
use crate::model::{Atom, Relation, RelationType, Value};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OpError {
    #[error("operand types differ: {left} vs {right}")]
    TypeMismatch { left: RelationType, right: RelationType },
    #[error("column {index} is out of range for arity {arity}")]
    IndexOutOfRange { index: usize, arity: usize },
    #[error("column list is empty")]
    EmptyColumns,
    #[error("column {0} holds atoms, not relations")]
    AtomColumn(usize),
    #[error("selection compares columns of types {left} and {right}")]
    SelectMismatch { left: RelationType, right: RelationType },
    #[error("powerset of a relation with {0} tuples is too large to materialize")]
    TooLarge(usize),
}

fn check_index(index: usize, arity: usize) -> Result<(), OpError> {
    if index == 0 || index > arity {
        Err(OpError::IndexOutOfRange { index, arity })
    } else {
        Ok(())
    }
}

fn same_type(a: &Relation, b: &Relation) -> Result<(), OpError> {
    if a.ty() != b.ty() {
        return Err(OpError::TypeMismatch {
            left: a.ty(),
            right: b.ty(),
        });
    }
    Ok(())
}

pub fn domain(atoms: &[Atom]) -> Relation {
    let mut atoms = atoms.to_vec();
    atoms.sort();
    atoms.dedup();
    Relation::from_sorted(RelationType::flat(1).expect("arity 1"), atoms.into_iter().map(Value::Atom).collect())
}

pub fn union(a: &Relation, b: &Relation) -> Result<Relation, OpError> {
    same_type(a, b)?;
    if a.is_empty() {
        return Ok(b.clone());
    }
    if b.is_empty() {
        return Ok(a.clone());
    }
    let k = a.arity();
    let (x, y) = (a.values(), b.values());
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() && j < y.len() {
        let (s, t) = (&x[i..i + k], &y[j..j + k]);
        match s.cmp(t) {
            std::cmp::Ordering::Less => {
                out.extend_from_slice(s);
                i += k;
            }
            std::cmp::Ordering::Greater => {
                out.extend_from_slice(t);
                j += k;
            }
            std::cmp::Ordering::Equal => {
                out.extend_from_slice(s);
                i += k;
                j += k;
            }
        }
    }
    out.extend_from_slice(&x[i..]);
    out.extend_from_slice(&y[j..]);
    Ok(Relation::from_sorted(a.ty(), out))
}

pub fn difference(a: &Relation, b: &Relation) -> Result<Relation, OpError> {
    same_type(a, b)?;
    if a.is_empty() || b.is_empty() {
        return Ok(a.clone());
    }
    let k = a.arity();
    let (x, y) = (a.values(), b.values());
    let mut out = Vec::with_capacity(x.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() {
        let s = &x[i..i + k];
        while j < y.len() && y[j..j + k] < *s {
            j += k;
        }
        if j >= y.len() || y[j..j + k] != *s {
            out.extend_from_slice(s);
        }
        i += k;
    }
    Ok(Relation::from_sorted(a.ty(), out))
}

pub fn intersection(a: &Relation, b: &Relation) -> Result<Relation, OpError> {
    difference(a, &difference(a, b)?)
}

/// Exact space units of `a × b` without building it.
pub fn product_size(a: &Relation, b: &Relation) -> u128 {
    let (na, nb) = (a.len() as u128, b.len() as u128);
    let (va, vb) = (a.size() as u128 - na, b.size() as u128 - nb);
    na * nb + nb * va + na * vb
}

pub fn product(a: &Relation, b: &Relation) -> Relation {
    let ty = a.ty().concat(&b.ty()).expect("relation types");
    let mut out = Vec::with_capacity(a.len() * b.len() * ty.arity());
    for s in a.tuples() {
        for t in b.tuples() {
            out.extend_from_slice(s);
            out.extend_from_slice(t);
        }
    }
    Relation::from_sorted(ty, out)
}

/// Output type of `project[columns]` on type `ty`; repeated columns are allowed.
pub fn project_type(ty: RelationType, columns: &[usize]) -> Result<RelationType, OpError> {
    if columns.is_empty() {
        return Err(OpError::EmptyColumns);
    }
    let comps = ty.components().expect("relation type");
    for &c in columns {
        check_index(c, comps.len())?;
    }
    Ok(RelationType::tuple(columns.iter().map(|&c| comps[c - 1]).collect()).expect("non-empty"))
}

pub fn project(a: &Relation, columns: &[usize]) -> Result<Relation, OpError> {
    let ty = project_type(a.ty(), columns)?;
    let mut out = Vec::with_capacity(a.len() * columns.len());
    for t in a.tuples() {
        out.extend(columns.iter().map(|&c| t[c - 1].clone()));
    }
    Ok(Relation::from_flat(ty, out))
}

pub fn select(a: &Relation, left: usize, op: SelectOp, right: usize) -> Result<Relation, OpError> {
    let comps = a.ty().components().expect("relation type");
    check_index(left, comps.len())?;
    check_index(right, comps.len())?;
    if comps[left - 1] != comps[right - 1] {
        return Err(OpError::SelectMismatch {
            left: comps[left - 1],
            right: comps[right - 1],
        });
    }
    let want = op == SelectOp::Eq;
    let mut out = Vec::new();
    for t in a.tuples() {
        if (t[left - 1] == t[right - 1]) == want {
            out.extend_from_slice(t);
        }
    }
    Ok(Relation::from_sorted(a.ty(), out))
}

pub fn nest_type(ty: RelationType, columns: &[usize]) -> Result<RelationType, OpError> {
    let inner = project_type(ty, columns)?;
    let mut comps = ty.components().expect("relation type").to_vec();
    comps.push(inner);
    Ok(RelationType::tuple(comps).expect("non-empty"))
}

/// Appends to each tuple the set of its `columns`-projections over all tuples
/// agreeing with it on the remaining columns.
pub fn nest(a: &Relation, columns: &[usize]) -> Result<Relation, OpError> {
    let ty = nest_type(a.ty(), columns)?;
    let comps = a.ty().components().expect("relation type");
    let inner_ty = ty.component(comps.len()).expect("nested column");
    let rest: Vec<usize> = (1..=comps.len()).filter(|c| !columns.contains(c)).collect();
    let mut groups: HashMap<Vec<Value>, Vec<Value>> = HashMap::new();
    for t in a.tuples() {
        let key: Vec<Value> = rest.iter().map(|&c| t[c - 1].clone()).collect();
        groups
            .entry(key)
            .or_default()
            .extend(columns.iter().map(|&c| t[c - 1].clone()));
    }
    let nested: HashMap<Vec<Value>, Value> = groups
        .into_iter()
        .map(|(k, flat)| (k, Value::Relation(Relation::from_flat(inner_ty, flat))))
        .collect();
    let mut out = Vec::with_capacity(a.len() * (comps.len() + 1));
    let mut key = Vec::with_capacity(rest.len());
    for t in a.tuples() {
        key.clear();
        key.extend(rest.iter().map(|&c| t[c - 1].clone()));
        out.extend_from_slice(t);
        out.push(nested[&key].clone());
    }
    Ok(Relation::from_sorted(ty, out))
}

pub fn unnest_type(ty: RelationType, column: usize) -> Result<RelationType, OpError> {
    let comps = ty.components().expect("relation type");
    check_index(column, comps.len())?;
    let inner = comps[column - 1].components().ok_or(OpError::AtomColumn(column))?;
    let mut out = comps.to_vec();
    out.extend_from_slice(inner);
    Ok(RelationType::tuple(out).expect("non-empty"))
}

/// Exact space units of `unnest[column](a)` without building it.
pub fn unnest_size(a: &Relation, column: usize) -> u128 {
    let mut total = 0u128;
    for t in a.tuples() {
        if let Value::Relation(inner) = &t[column - 1] {
            let row: u128 = t.iter().map(|v| v.size() as u128).sum();
            let n = inner.len() as u128;
            total += n * (1 + row) + (inner.size() as u128 - n);
        }
    }
    total
}

/// Pairs each tuple with every member of its `column`-th component,
/// keeping the nested column.
pub fn unnest(a: &Relation, column: usize) -> Result<Relation, OpError> {
    let ty = unnest_type(a.ty(), column)?;
    let mut out = Vec::new();
    for t in a.tuples() {
        if let Value::Relation(inner) = &t[column - 1] {
            for u in inner.tuples() {
                out.extend_from_slice(t);
                out.extend_from_slice(u);
            }
        }
    }
    Ok(Relation::from_sorted(ty, out))
}

pub fn powerset_type(ty: RelationType) -> RelationType {
    RelationType::tuple(vec![ty]).expect("non-empty")
}

/// Exact space units of `powerset(a)`, or `None` if it does not fit in a u128.
pub fn powerset_size(a: &Relation) -> Option<u128> {
    let m = a.len() as u32;
    if m >= 100 {
        return None;
    }
    // every tuple of `a` sits in half of the 2^m subsets
    let subsets = 1u128 << m;
    let per_tuple = if m == 0 { 0 } else { 1u128 << (m - 1) };
    subsets.checked_add(per_tuple.checked_mul(a.size() as u128)?)
}

pub fn powerset(a: &Relation) -> Result<Relation, OpError> {
    let m = a.len();
    if m >= 32 {
        return Err(OpError::TooLarge(m));
    }
    let k = a.arity();
    let data = a.values();
    let mut subsets: Vec<Value> = (0u64..1 << m)
        .map(|mask| {
            let mut flat = Vec::with_capacity(mask.count_ones() as usize * k);
            for i in 0..m {
                if mask >> i & 1 == 1 {
                    flat.extend_from_slice(&data[i * k..(i + 1) * k]);
                }
            }
            Value::Relation(Relation::from_sorted(a.ty(), flat))
        })
        .collect();
    subsets.sort_unstable();
    Ok(Relation::from_sorted(powerset_type(a.ty()), subsets))
}
