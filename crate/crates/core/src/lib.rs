//! Nested relational algebra extended with a solution operator.
//!
//! Expressions are parsed with [`parser::parse_expr`], checked with
//! [`typecheck::check_expr`] and evaluated with [`eval::eval`].

pub mod ast;
pub mod constructions;
pub mod eval;
pub mod model;
pub mod ops;
pub mod parser;
pub mod profiler;
pub mod typecheck;

pub use ast::{Binder, Equation, Expr, ExprPath, SelectOp};
pub use eval::{eval, solve, solve_nonempty, BudgetCap, BudgetExceeded, EvalBudget, EvalError, EvalMetrics, SolveMetrics};
pub use model::{Atom, Database, ModelError, RawValue, Relation, RelationType, Value};
pub use parser::{parse_database, parse_expr, parse_type, render_relation, ParseError};
pub use typecheck::{check_expr, infer_type, Schema, TypeError};
