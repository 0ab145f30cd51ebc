//! Type inference for equation algebra expressions.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::ast::{check_bindings, BindingViolation, Expr, ExprPath};
use crate::model::{Database, RelationType};

/// Relation names with their (non-atom) types.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Schema(BTreeMap<String, RelationType>);

impl Schema {
    pub fn new() -> Schema {
        Schema::default()
    }

    pub fn from_database(db: &Database) -> Schema {
        Schema(db.relations().map(|(n, r)| (n.to_string(), r.ty())).collect())
    }

    pub fn insert(&mut self, name: impl Into<String>, ty: RelationType) -> Result<(), SchemaError> {
        let name = name.into();
        if ty.is_atom() {
            return Err(SchemaError::AtomType(name));
        }
        if self.0.contains_key(&name) {
            return Err(SchemaError::Duplicate(name));
        }
        self.0.insert(name, ty);
        Ok(())
    }

    pub fn with(mut self, name: impl Into<String>, ty: RelationType) -> Result<Schema, SchemaError> {
        self.insert(name, ty)?;
        Ok(self)
    }

    pub fn get(&self, name: &str) -> Option<RelationType> {
        self.0.get(name).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, RelationType)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemaError {
    #[error("relation `{0}` cannot have type 0")]
    AtomType(String),
    #[error("relation `{0}` declared twice")]
    Duplicate(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TypeErrorKind {
    UnknownName(String),
    /// Operands of ∪ or − differ.
    OperandMismatch {
        op: &'static str,
        left: RelationType,
        right: RelationType,
    },
    /// The two sides of an equation differ.
    EquationMismatch { lhs: RelationType, rhs: RelationType },
    IndexOutOfRange { index: usize, arity: usize },
    /// Selection compares columns of different types.
    SelectMismatch { left: RelationType, right: RelationType },
    UnnestAtomColumn(usize),
    EmptyColumnList,
    Binding(BindingViolation),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("type error at {path}: {kind}")]
pub struct TypeError {
    pub path: ExprPath,
    pub kind: TypeErrorKind,
}

impl fmt::Display for TypeErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeErrorKind::UnknownName(n) => write!(f, "unknown relation name `{n}`"),
            TypeErrorKind::OperandMismatch { op, left, right } => {
                write!(f, "type mismatch in {op}: {left} vs {right}")
            }
            TypeErrorKind::EquationMismatch { lhs, rhs } => {
                write!(f, "type mismatch between equation sides: {lhs} vs {rhs}")
            }
            TypeErrorKind::IndexOutOfRange { index, arity } => {
                write!(f, "column {index} out of range for arity {arity}")
            }
            TypeErrorKind::SelectMismatch { left, right } => {
                write!(f, "selection compares columns of types {left} and {right}")
            }
            TypeErrorKind::UnnestAtomColumn(i) => write!(f, "cannot unnest column {i} of type 0"),
            TypeErrorKind::EmptyColumnList => f.write_str("empty column list"),
            TypeErrorKind::Binding(v) => write!(f, "{v}"),
        }
    }
}

/// Checks bindings, then infers the type of `e`.
pub fn check_expr(e: &Expr, schema: &Schema) -> Result<RelationType, TypeError> {
    check_bindings(e).map_err(|v| TypeError {
        path: v.path.clone(),
        kind: TypeErrorKind::Binding(v),
    })?;
    infer_type(e, schema)
}

/// Infers the relation type of `e` under `schema`.
pub fn infer_type(e: &Expr, schema: &Schema) -> Result<RelationType, TypeError> {
    let mut scope = Vec::new();
    infer(e, schema, &mut scope, &ExprPath::root())
}

fn column(
    ty: RelationType,
    index: usize,
    path: &ExprPath,
) -> Result<RelationType, TypeError> {
    let arity = ty.arity();
    if index == 0 || index > arity {
        return Err(TypeError {
            path: path.clone(),
            kind: TypeErrorKind::IndexOutOfRange { index, arity },
        });
    }
    Ok(ty.component(index - 1).expect("checked index"))
}

fn infer(
    e: &Expr,
    schema: &Schema,
    scope: &mut Vec<(String, RelationType)>,
    path: &ExprPath,
) -> Result<RelationType, TypeError> {
    let err = |kind| TypeError {
        path: path.clone(),
        kind,
    };
    let tuple = |comps: Vec<RelationType>| {
        RelationType::tuple(comps).map_err(|_| TypeError {
            path: path.clone(),
            kind: TypeErrorKind::EmptyColumnList,
        })
    };
    match e {
        Expr::Name(n) => scope
            .iter()
            .rev()
            .find(|(m, _)| m == n)
            .map(|(_, t)| *t)
            .or_else(|| schema.get(n))
            .ok_or_else(|| err(TypeErrorKind::UnknownName(n.clone()))),
        Expr::Domain => Ok(RelationType::flat(1).expect("arity 1")),
        Expr::Union(a, b) | Expr::Difference(a, b) => {
            let (op, l_step, r_step) = match e {
                Expr::Union(..) => ("union", "union.left", "union.right"),
                _ => ("minus", "minus.left", "minus.right"),
            };
            let left = infer(a, schema, scope, &path.child(l_step))?;
            let right = infer(b, schema, scope, &path.child(r_step))?;
            if left != right {
                return Err(err(TypeErrorKind::OperandMismatch { op, left, right }));
            }
            Ok(left)
        }
        Expr::Product(a, b) => {
            let left = infer(a, schema, scope, &path.child("times.left"))?;
            let right = infer(b, schema, scope, &path.child("times.right"))?;
            Ok(left.concat(&right).expect("relation types"))
        }
        Expr::Project { columns, input } => {
            let t = infer(input, schema, scope, &path.child("project"))?;
            let comps = columns
                .iter()
                .map(|&i| column(t, i, path))
                .collect::<Result<Vec<_>, _>>()?;
            tuple(comps)
        }
        Expr::Select { left, right, input, .. } => {
            let t = infer(input, schema, scope, &path.child("select"))?;
            let (l, r) = (column(t, *left, path)?, column(t, *right, path)?);
            if l != r {
                return Err(err(TypeErrorKind::SelectMismatch { left: l, right: r }));
            }
            Ok(t)
        }
        Expr::Nest { columns, input } => {
            let t = infer(input, schema, scope, &path.child("nest"))?;
            let nested = columns
                .iter()
                .map(|&i| column(t, i, path))
                .collect::<Result<Vec<_>, _>>()?;
            let nested = tuple(nested)?;
            let mut comps = t.components().expect("relation type").to_vec();
            comps.push(nested);
            tuple(comps)
        }
        Expr::Unnest { column: i, input } => {
            let t = infer(input, schema, scope, &path.child("unnest"))?;
            let inner = column(t, *i, path)?;
            let inner_comps = inner
                .components()
                .ok_or_else(|| err(TypeErrorKind::UnnestAtomColumn(*i)))?;
            let mut comps = t.components().expect("relation type").to_vec();
            comps.extend_from_slice(inner_comps);
            tuple(comps)
        }
        Expr::Powerset(input) => {
            let t = infer(input, schema, scope, &path.child("powerset"))?;
            tuple(vec![t])
        }
        Expr::Solve { vars, lhs, rhs } => {
            let mark = scope.len();
            scope.extend(vars.iter().map(|v| (v.name.clone(), v.ty)));
            let l = infer(lhs, schema, scope, &path.child("solve.lhs"));
            let r = infer(rhs, schema, scope, &path.child("solve.rhs"));
            scope.truncate(mark);
            let (l, r) = (l?, r?);
            if l != r {
                return Err(err(TypeErrorKind::EquationMismatch { lhs: l, rhs: r }));
            }
            tuple(vars.iter().map(|v| v.ty).collect())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DatabaseViolation {
    MissingRelation(String),
    UnexpectedRelation(String),
    WrongType {
        name: String,
        expected: RelationType,
        found: RelationType,
    },
    AtomOutsideDomain { name: String, atom: String },
    EmptyDomain,
}

impl fmt::Display for DatabaseViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DatabaseViolation::MissingRelation(n) => write!(f, "relation `{n}` is in the schema but not the database"),
            DatabaseViolation::UnexpectedRelation(n) => write!(f, "relation `{n}` is not in the schema"),
            DatabaseViolation::WrongType { name, expected, found } => {
                write!(f, "relation `{name}` has type {found}, schema says {expected}")
            }
            DatabaseViolation::AtomOutsideDomain { name, atom } => {
                write!(f, "relation `{name}` mentions atom `{atom}` outside the domain")
            }
            DatabaseViolation::EmptyDomain => f.write_str("the domain is empty"),
        }
    }
}

/// Verifies that `db` matches `schema` exactly; returns every violation found.
pub fn typecheck_database(db: &Database, schema: &Schema) -> Result<(), Vec<DatabaseViolation>> {
    let mut violations = Vec::new();
    if db.domain().is_empty() {
        violations.push(DatabaseViolation::EmptyDomain);
    }
    for (name, expected) in schema.iter() {
        match db.relation(name) {
            None => violations.push(DatabaseViolation::MissingRelation(name.to_string())),
            Some(r) if r.ty() != expected => violations.push(DatabaseViolation::WrongType {
                name: name.to_string(),
                expected,
                found: r.ty(),
            }),
            Some(_) => {}
        }
    }
    for (name, rel) in db.relations() {
        if schema.get(name).is_none() {
            violations.push(DatabaseViolation::UnexpectedRelation(name.to_string()));
        }
        let mut outside = std::collections::BTreeSet::new();
        for v in rel.values() {
            v.for_each_atom(&mut |a| {
                if db.domain().binary_search(&a).is_err() {
                    outside.insert(a.to_string());
                }
            });
        }
        violations.extend(outside.into_iter().map(|atom| DatabaseViolation::AtomOutsideDomain {
            name: name.to_string(),
            atom,
        }));
    }
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::Binder;
    use crate::parser::{parse_database, parse_expr, parse_type};

    fn ty(s: &str) -> RelationType {
        parse_type(s).unwrap()
    }

    fn schema(entries: &[(&str, &str)]) -> Schema {
        let mut s = Schema::new();
        for (n, t) in entries {
            s.insert(*n, ty(t)).unwrap();
        }
        s
    }

    fn infer_str(e: &str, s: &Schema) -> Result<RelationType, TypeError> {
        check_expr(&parse_expr(e).unwrap(), s)
    }

    #[test]
    fn nest_appends_nested_column() {
        let s = schema(&[("R", "(0,0)")]);
        assert_eq!(infer_str("nest[2](R)", &s).unwrap(), ty("(0,0,(0))"));
        assert_eq!(infer_str("nest[2,1](R)", &s).unwrap(), ty("(0,0,(0,0))"));
    }

    #[test]
    fn powerset_of_square() {
        assert_eq!(infer_str("powerset(times(D,D))", &Schema::new()).unwrap(), ty("((0,0))"));
    }

    #[test]
    fn union_mismatch() {
        let s = schema(&[("R", "(0,0)"), ("S", "(0)")]);
        let e = infer_str("union(R,S)", &s).unwrap_err();
        assert!(matches!(e.kind, TypeErrorKind::OperandMismatch { op: "union", .. }));
        assert_eq!(e.path, ExprPath::root());
    }

    #[test]
    fn operator_rules() {
        let s = schema(&[("R", "(0,0)"), ("N", "(0,(0,0))")]);
        assert_eq!(infer_str("D", &s).unwrap(), ty("(0)"));
        assert_eq!(infer_str("times(R,N)", &s).unwrap(), ty("(0,0,0,(0,0))"));
        assert_eq!(infer_str("project[2,2,1](N)", &s).unwrap(), ty("((0,0),(0,0),0)"));
        assert_eq!(infer_str("select[1!=2](R)", &s).unwrap(), ty("(0,0)"));
        assert_eq!(infer_str("unnest[2](N)", &s).unwrap(), ty("(0,(0,0),0,0)"));
        assert_eq!(infer_str("powerset(R)", &s).unwrap(), ty("((0,0))"));
        assert_eq!(
            infer_str("solve{(X:(0,0),Y:(0)) | union(X,R) = R}", &s).unwrap(),
            ty("((0,0),(0))")
        );
    }

    #[test]
    fn error_kinds_carry_paths() {
        let s = schema(&[("R", "(0,0)"), ("N", "(0,(0,0))")]);
        let e = infer_str("union(R, project[3](R))", &s).unwrap_err();
        assert_eq!(e.kind, TypeErrorKind::IndexOutOfRange { index: 3, arity: 2 });
        assert_eq!(e.path.to_string(), "/union.right");

        let e = infer_str("unnest[1](N)", &s).unwrap_err();
        assert_eq!(e.kind, TypeErrorKind::UnnestAtomColumn(1));

        let e = infer_str("select[1=2](N)", &s).unwrap_err();
        assert!(matches!(e.kind, TypeErrorKind::SelectMismatch { .. }));

        let e = infer_str("times(R, Q)", &s).unwrap_err();
        assert_eq!(e.kind, TypeErrorKind::UnknownName("Q".into()));
        assert_eq!(e.path.to_string(), "/times.right");

        let e = infer_str("solve{(X:(0)) | X = R}", &s).unwrap_err();
        assert!(matches!(e.kind, TypeErrorKind::EquationMismatch { .. }));

        let bad = Expr::times(
            Expr::name("X"),
            Expr::solve(vec![Binder::new("X", ty("(0)"))], Expr::name("X"), Expr::name("X")),
        );
        let e = check_expr(&bad, &schema(&[("X", "(0)")])).unwrap_err();
        assert!(matches!(e.kind, TypeErrorKind::Binding(_)));
    }

    #[test]
    fn database_conformance() {
        let (db, s) = parse_database("domain [a,b] relations { R : (0,0) = [[a,b]] }").unwrap();
        assert_eq!(typecheck_database(&db, &s), Ok(()));

        let missing = schema(&[("R", "(0,0)"), ("S", "(0)")]);
        let errs = typecheck_database(&db, &missing).unwrap_err();
        assert_eq!(errs, vec![DatabaseViolation::MissingRelation("S".into())]);

        let wrong = schema(&[("R", "(0)")]);
        assert!(matches!(
            typecheck_database(&db, &wrong).unwrap_err()[0],
            DatabaseViolation::WrongType { .. }
        ));
        assert!(matches!(
            typecheck_database(&db, &Schema::new()).unwrap_err()[0],
            DatabaseViolation::UnexpectedRelation(_)
        ));
    }

    #[test]
    fn atoms_outside_domain_are_reported() {
        // Database::new refuses such databases, so the file parser rejects them too.
        let err = parse_database("domain [a,b] relations { R : (0,0) = [[a,c]] }").unwrap_err();
        assert!(err.to_string().contains("not in the domain"), "{err}");
    }
}
