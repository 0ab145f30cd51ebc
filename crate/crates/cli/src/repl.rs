//! Line-oriented interactive loop.

use std::io::{self, BufRead, IsTerminal, Write};
use std::path::Path;

use eqalg_core::parser::{parse_expr, render_relation};
use eqalg_core::{check_expr, eval, Database, EvalBudget, Schema};

use crate::load_database;

const HELP: &str = "\
:load FILE   load a database
:type EXPR   show the type of an expression
:metrics     toggle evaluation metrics
:quit        leave
anything else is evaluated as an expression";

struct State {
    db: Option<Database>,
    metrics: bool,
    budget: EvalBudget,
}

impl State {
    fn line(&mut self, line: &str) -> Result<Option<String>, String> {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            return Ok(Some(String::new()));
        }
        if line == ":quit" || line == ":q" {
            return Ok(None);
        }
        if line == ":help" {
            return Ok(Some(format!("{HELP}\n")));
        }
        if line == ":metrics" {
            self.metrics = !self.metrics;
            return Ok(Some(format!("metrics {}\n", if self.metrics { "on" } else { "off" })));
        }
        if let Some(path) = line.strip_prefix(":load") {
            let db = load_database(Path::new(path.trim())).map_err(|e| e.to_string())?;
            let msg = format!("loaded {} atoms, {} relations\n", db.domain().len(), Schema::from_database(&db).len());
            self.db = Some(db);
            return Ok(Some(msg));
        }
        let db = self.db.as_ref().ok_or("no database loaded; use :load FILE")?;
        let schema = Schema::from_database(db);
        if let Some(text) = line.strip_prefix(":type") {
            let e = parse_expr(text).map_err(|e| format!("error: {e}"))?;
            let ty = check_expr(&e, &schema).map_err(|e| format!("error: {e}"))?;
            return Ok(Some(format!("{ty}\n")));
        }
        if line.starts_with(':') {
            return Err(format!("unknown command `{line}`; try :help"));
        }
        let e = parse_expr(line).map_err(|e| format!("error: {e}"))?;
        let ty = check_expr(&e, &schema).map_err(|e| format!("error: {e}"))?;
        let (r, m) = eval(&e, db, &self.budget).map_err(|e| format!("error: {e}"))?;
        let mut out = format!("{} : {ty}\n", render_relation(&r));
        if self.metrics {
            out.push_str(&m.to_string());
        }
        Ok(Some(out))
    }
}

pub fn run(input: impl BufRead, out: &mut impl Write, db: Option<&Path>, budget: EvalBudget) -> io::Result<()> {
    let interactive = io::stdin().is_terminal();
    let mut state = State {
        db: None,
        metrics: false,
        budget,
    };
    if let Some(p) = db {
        match state.line(&format!(":load {}", p.display())) {
            Ok(Some(msg)) => out.write_all(msg.as_bytes())?,
            Ok(None) => {}
            Err(e) => writeln!(out, "{e}")?,
        }
    }
    let prompt = |out: &mut dyn Write| -> io::Result<()> {
        if interactive {
            write!(out, "eqalg> ")?;
            out.flush()?;
        }
        Ok(())
    };
    prompt(out)?;
    for line in input.lines() {
        match state.line(&line?) {
            Ok(Some(text)) => out.write_all(text.as_bytes())?,
            Ok(None) => return Ok(()),
            Err(e) => writeln!(out, "{e}")?,
        }
        prompt(out)?;
    }
    Ok(())
}
