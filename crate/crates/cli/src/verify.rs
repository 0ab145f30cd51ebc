//! Running constructions and comparing them with their oracles.

use eqalg_core::constructions::{build_run, check_run_candidate, tc_sparse_via_harness, warshall_tc};
use eqalg_core::ops;
use eqalg_core::parser::render_relation;
use eqalg_core::{eval, Database, EvalBudget, Expr, Relation};
use eqalg_oracle as oracle;

use crate::CliError;

pub struct ConstructionResult {
    pub relation: Relation,
    pub rendered: String,
}

pub fn run_construction(name: &str, e: &Expr, db: &Database, budget: &EvalBudget) -> Result<ConstructionResult, CliError> {
    let mut rendered = String::new();
    let relation = if name == "tc-sparse" {
        // the 6-ary variable cannot be enumerated; check the Run candidate instead
        let r = db.relation("R").ok_or_else(|| CliError::User("database has no relation `R`".into()))?;
        let run = build_run(r)?;
        let check = check_run_candidate(db, &run, budget)?;
        rendered.push_str(&format!(
            "run candidate: {} tuples, equation {}\n",
            run.len(),
            if check.holds() { "holds" } else { "fails" }
        ));
        tc_sparse_via_harness(db, budget)?
            .ok_or_else(|| CliError::Internal(format!("Run violates {:?}", check.violated)))?
    } else {
        eval(e, db, budget)?.0
    };
    if relation.is_empty() && matches!(e, Expr::Solve { .. }) {
        rendered.push_str("no solution\n");
    } else {
        if matches!(e, Expr::Solve { .. }) {
            rendered.push_str(&format!("solutions: {}\n", relation.len()));
        }
        rendered.push_str(&format!("result: {}\n", render_relation(&relation)));
    }
    Ok(ConstructionResult { relation, rendered })
}

fn require_r(db: &Database) -> Result<oracle::ORel, String> {
    db.relation("R").map(oracle::from_relation).ok_or_else(|| "database has no relation `R`".into())
}

/// Compares a construction's result with an oracle that does not use it.
///
/// Returns the name of the oracle on agreement.
pub fn against_oracle(name: &str, db: &Database, result: &ConstructionResult) -> Result<&'static str, String> {
    let got = oracle::from_relation(&result.relation);
    let n = db.domain().len();
    let agree = |ok: bool, what: &'static str| if ok { Ok(what) } else { Err(format!("differs from {what}")) };
    match name {
        "parity" => agree(result.relation.is_empty() == (n % 2 == 1), "solvable iff the domain size is even"),
        "singleton" => {
            let singletons = got.iter().all(|t| matches!(&t[0], oracle::OVal::Set(s) if s.len() == 1));
            agree(singletons && got.len() == n, "one solution per domain atom")
        }
        "powerset" => agree(got == oracle::powerset(&require_r(db)?), "oracle powerset"),
        "powerset-of-powerset" => {
            let p = oracle::powerset(&require_r(db)?);
            agree(got == oracle::powerset(&p), "oracle powerset of the powerset")
        }
        "tc-powerset" | "tc-sparse" => {
            let r = db.relation("R").ok_or("database has no relation `R`")?;
            let w = warshall_tc(r).map_err(|e| e.to_string())?;
            agree(result.relation == w, "warshall_tc")?;
            agree(got == oracle::transitive_closure(&oracle::from_relation(r)), "warshall_tc and fixpoint oracle")
        }
        "nest-sparse" => {
            let r = db.relation("R").ok_or("database has no relation `R`")?;
            let nested = ops::nest(r, &[2]).map_err(|e| e.to_string())?;
            agree(result.relation == nested, "nest[2]")?;
            agree(got == oracle::nest(&oracle::from_relation(r), &[2], 2), "nest[2] and oracle nest")
        }
        other => Err(format!("no oracle registered for `{other}`")),
    }
}
