//! `eqalg`: evaluate, solve, check and profile equation-algebra expressions.

mod repl;
mod verify;

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;

use eqalg_core::constructions::{construction_equation, construction_expr, ConstructionError, CONSTRUCTIONS};
use eqalg_core::model::numbered_domain;
use eqalg_core::parser::{parse_database, parse_expr, parse_schema, render_expr, render_relation};
use eqalg_core::profiler::{meter_expression, profile, DbGenerator, ProfileError, ProfileReport};
use eqalg_core::{check_expr, eval, solve_nonempty, Database, EvalBudget, EvalError, Expr, ParseError, Schema};

#[derive(Parser)]
#[command(name = "eqalg", version, about = "Interpreter for nested relational algebra with equations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Typecheck and evaluate an expression.
    Eval {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        expr: ExprArg,
        #[command(flatten)]
        budget: BudgetArgs,
        /// Print evaluation metrics to stderr.
        #[arg(long)]
        metrics: bool,
    },
    /// Solve an equation `(X:τ, ...) | lhs = rhs`.
    Solve {
        #[command(flatten)]
        input: Input,
        /// The equation text.
        #[arg(long)]
        eq: String,
        /// Only decide whether a solution exists.
        #[arg(long)]
        nonempty: bool,
        #[command(flatten)]
        budget: BudgetArgs,
        #[arg(long)]
        metrics: bool,
    },
    /// Validate a database and, if given, typecheck an expression against it.
    Check {
        #[command(flatten)]
        input: Input,
        /// Expression text.
        #[arg(long, conflicts_with = "expr_file")]
        expr: Option<String>,
        #[arg(long)]
        expr_file: Option<PathBuf>,
    },
    /// Profile solution counts or peak space over growing domains.
    Profile {
        /// A construction name or a file holding a solve expression.
        #[arg(long)]
        eq: String,
        /// Inclusive range `A..B` of domain sizes.
        #[arg(long, default_value = "1..5", value_parser = parse_range)]
        n_range: (usize, usize),
        #[arg(long, value_enum)]
        gen: Option<GenArg>,
        /// Relation schema for `--gen flat`, e.g. `R:(0,0)`.
        #[arg(long)]
        schema: Option<String>,
        /// Tuple inclusion probability for `--gen flat`.
        #[arg(long, default_value_t = 1.0)]
        density: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = SeriesArg::Solutions)]
        series: SeriesArg,
        /// Also write the machine-readable report here.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Run a named construction and optionally compare it with its oracle.
    Construction {
        #[arg(long, required_unless_present = "list")]
        name: Option<String>,
        #[command(flatten)]
        input: Input,
        #[arg(long)]
        verify: bool,
        /// List the available constructions.
        #[arg(long)]
        list: bool,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Interactive loop: `:load FILE`, `:type EXPR`, `:metrics`, `:quit`.
    Repl {
        #[arg(long)]
        db: Option<PathBuf>,
        #[command(flatten)]
        budget: BudgetArgs,
    },
    /// Run the acceptance criteria.
    Selftest {
        /// Run only these criteria.
        #[arg(long)]
        criterion: Vec<u32>,
    },
}

#[derive(Args)]
struct Input {
    /// Database file.
    #[arg(long, conflicts_with = "domain_size")]
    db: Option<PathBuf>,
    /// Use the domain `x1..xN` with no relations instead of a file.
    #[arg(long)]
    domain_size: Option<usize>,
}

#[derive(Args)]
struct ExprArg {
    /// Expression text.
    #[arg(long, required_unless_present = "expr_file", conflicts_with = "expr_file")]
    expr: Option<String>,
    /// File holding the expression.
    #[arg(long)]
    expr_file: Option<PathBuf>,
}

#[derive(Args, Clone)]
pub struct BudgetArgs {
    #[arg(long, env = "EQALG_MAX_CANDIDATES")]
    max_candidates: Option<BigUint>,
    #[arg(long, env = "EQALG_MAX_SPACE")]
    max_space: Option<u64>,
    #[arg(long, env = "EQALG_MAX_SOLUTIONS")]
    max_solutions: Option<u64>,
}

impl BudgetArgs {
    pub fn budget(&self) -> EvalBudget {
        let mut b = EvalBudget::default();
        if let Some(c) = &self.max_candidates {
            b.max_candidates = c.clone();
        }
        if let Some(s) = self.max_space {
            b.max_space_units = s;
        }
        if let Some(s) = self.max_solutions {
            b.max_solutions = s;
        }
        b
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum GenArg {
    /// Domain only, no relations.
    Domain,
    /// Random flat relations per `--schema` and `--density`.
    Flat,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SeriesArg {
    Solutions,
    Space,
}

fn parse_range(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once("..").ok_or("expected A..B")?;
    let a: usize = a.trim().parse().map_err(|_| format!("bad range start `{a}`"))?;
    let b: usize = b.trim().parse().map_err(|_| format!("bad range end `{b}`"))?;
    if a == 0 || a > b {
        return Err("range must satisfy 1 <= A <= B".into());
    }
    Ok((a, b))
}

#[derive(Debug)]
pub enum CliError {
    User(String),
    Budget(String),
    Internal(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::User(_) => 1,
            CliError::Budget(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::User(m) => write!(f, "error: {m}"),
            CliError::Budget(m) => write!(f, "error: {m}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> CliError {
        match e {
            EvalError::Type(t) => CliError::User(t.to_string()),
            EvalError::Budget(b) => CliError::Budget(b.to_string()),
            e @ EvalError::Internal { .. } => CliError::Internal(e.to_string()),
        }
    }
}

impl From<ConstructionError> for CliError {
    fn from(e: ConstructionError) -> CliError {
        match e {
            ConstructionError::Eval(e) => e.into(),
            other => CliError::User(other.to_string()),
        }
    }
}

impl From<ProfileError> for CliError {
    fn from(e: ProfileError) -> CliError {
        match e {
            ProfileError::Eval(e) => e.into(),
            other => CliError::User(other.to_string()),
        }
    }
}

fn parse_err(what: &str, e: ParseError) -> CliError {
    CliError::User(format!("{what}:{e}"))
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::User(format!("{}: {e}", path.display())))
}

pub fn load_database(path: &Path) -> Result<Database, CliError> {
    let text = read(path)?;
    parse_database(&text)
        .map(|(db, _)| db)
        .map_err(|e| parse_err(&path.display().to_string(), e))
}

fn database(input: &Input) -> Result<Database, CliError> {
    match (&input.db, input.domain_size) {
        (Some(p), _) => load_database(p),
        (None, Some(n)) if n > 0 => Database::with_domain(numbered_domain(n)).map_err(|e| CliError::User(e.to_string())),
        (None, Some(_)) => Err(CliError::User("the domain must not be empty".into())),
        (None, None) => Err(CliError::User("one of --db or --domain-size is required".into())),
    }
}

fn expression(text: Option<&str>, file: Option<&Path>) -> Result<Expr, CliError> {
    match (text, file) {
        (Some(t), _) => parse_expr(t).map_err(|e| parse_err("expr", e)),
        (None, Some(p)) => parse_expr(&read(p)?).map_err(|e| parse_err(&p.display().to_string(), e)),
        (None, None) => Err(CliError::User("an expression is required".into())),
    }
}

/// Parses `(X:τ) | lhs = rhs` by wrapping it in `solve{...}`.
fn equation(text: &str) -> Result<Expr, CliError> {
    const PREFIX: &str = "solve{";
    parse_expr(&format!("{PREFIX}{text}}}")).map_err(|mut e| {
        if e.line == 1 {
            e.column = e.column.saturating_sub(PREFIX.len()).max(1);
        }
        parse_err("eq", e)
    })
}

fn typed(e: &Expr, db: &Database) -> Result<(), CliError> {
    check_expr(e, &Schema::from_database(db)).map_err(|t| CliError::User(t.to_string()))?;
    Ok(())
}

fn cmd_eval(input: &Input, expr: &ExprArg, budget: &BudgetArgs, metrics: bool, out: &mut String) -> Result<(), CliError> {
    let db = database(input)?;
    let e = expression(expr.expr.as_deref(), expr.expr_file.as_deref())?;
    typed(&e, &db)?;
    let (r, m) = eval(&e, &db, &budget.budget())?;
    out.push_str(&render_relation(&r));
    out.push('\n');
    if metrics {
        eprint!("{m}");
    }
    Ok(())
}

fn cmd_solve(input: &Input, eq: &str, nonempty: bool, budget: &BudgetArgs, metrics: bool, out: &mut String) -> Result<(), CliError> {
    let db = database(input)?;
    let e = equation(eq)?;
    typed(&e, &db)?;
    let Expr::Solve { vars, lhs, rhs } = &e else {
        unreachable!("parsed from a solve wrapper")
    };
    let m = if nonempty {
        let (some, m) = solve_nonempty(vars, lhs, rhs, &db, &budget.budget())?;
        out.push_str(if some { "solution exists\n" } else { "no solution\n" });
        m
    } else {
        let (r, m) = eval(&e, &db, &budget.budget())?;
        out.push_str(&format!("solutions: {}\n{}\n", r.len(), render_relation(&r)));
        m
    };
    if metrics {
        eprint!("{m}");
    }
    Ok(())
}

fn cmd_check(input: &Input, expr: Option<&str>, file: Option<&Path>, out: &mut String) -> Result<(), CliError> {
    let db = database(input)?;
    let schema = Schema::from_database(&db);
    out.push_str(&format!("database ok: {} atoms, {} relations\n", db.domain().len(), schema.len()));
    if expr.is_some() || file.is_some() {
        let e = expression(expr, file)?;
        let ty = check_expr(&e, &schema).map_err(|t| CliError::User(t.to_string()))?;
        out.push_str(&format!("type: {ty}\n"));
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_profile(
    eq: &str,
    (a, b): (usize, usize),
    gen: Option<GenArg>,
    schema: Option<&str>,
    density: f64,
    seed: u64,
    series: SeriesArg,
    out_file: Option<&Path>,
    budget: &BudgetArgs,
    out: &mut String,
) -> Result<(), CliError> {
    let named = CONSTRUCTIONS.iter().any(|(n, _)| *n == eq);
    let default_schema = match eq {
        "powerset" | "powerset-of-powerset" => Some("R:(0)"),
        "tc-powerset" | "tc-sparse" | "nest-sparse" => Some("R:(0,0)"),
        _ => None,
    };
    let schema = schema.or(default_schema.filter(|_| named));
    let generator = match (gen, schema) {
        (Some(GenArg::Domain), _) | (None, None) => DbGenerator::domain_only(),
        (Some(GenArg::Flat), None) => return Err(CliError::User("--gen flat needs --schema".into())),
        (_, Some(s)) => {
            let schema = parse_schema(s).map_err(|e| parse_err("schema", e))?;
            DbGenerator::random_flat(schema, density, seed)
        }
    };
    let e = if named {
        let sample = generator.generate(1)?;
        match series {
            SeriesArg::Solutions => construction_equation(eq, &sample)?.to_solve(),
            SeriesArg::Space => construction_expr(eq, &sample)?,
        }
    } else {
        expression(None, Some(Path::new(eq)))?
    };
    let budget = budget.budget();
    let report: ProfileReport = match (series, &e) {
        (SeriesArg::Solutions, Expr::Solve { vars, lhs, rhs }) => profile(
            &eqalg_core::Equation::new(vars.clone(), (**lhs).clone(), (**rhs).clone()),
            &generator,
            a..=b,
            &budget,
        )?,
        (SeriesArg::Solutions, _) => {
            return Err(CliError::User("--series solutions needs a solve expression".into()))
        }
        (SeriesArg::Space, e) => meter_expression(e, &generator, a..=b, &budget)?,
    };
    out.push_str(&report.table());
    if let Some(p) = out_file {
        fs::write(p, report.document()).map_err(|e| CliError::User(format!("{}: {e}", p.display())))?;
    }
    match &report.truncated {
        Some(why) => Err(CliError::Budget(format!("profile truncated at {why}"))),
        None => Ok(()),
    }
}

fn cmd_construction(name: &str, input: &Input, check: bool, budget: &BudgetArgs, out: &mut String) -> Result<(), CliError> {
    let db = database(input)?;
    let e = construction_expr(name, &db)?;
    out.push_str(&format!("construction: {name}\n"));
    out.push_str(&format!("expression: {}\n", render_expr(&e)));
    let result = verify::run_construction(name, &e, &db, &budget.budget())?;
    out.push_str(&result.rendered);
    if check {
        match verify::against_oracle(name, &db, &result) {
            Ok(oracle) => out.push_str(&format!("verify: PASS ({oracle})\n")),
            Err(why) => {
                out.push_str(&format!("verify: FAIL ({why})\n"));
                return Err(CliError::Internal(format!("{name} disagrees with its oracle")));
            }
        }
    }
    Ok(())
}

fn cmd_selftest(criteria: &[u32], out: &mut String) -> Result<(), CliError> {
    let ids: Vec<u32> = if criteria.is_empty() {
        eqalg_conformance::CRITERIA.iter().map(|c| c.0).collect()
    } else {
        criteria.to_vec()
    };
    let mut failed = 0;
    for id in ids {
        let o = eqalg_conformance::run(id).ok_or_else(|| CliError::User(format!("no criterion {id}")))?;
        // progress goes out as each criterion finishes
        println!("{o}");
        if !o.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        out.push_str(&format!("{failed} criteria failed\n"));
        return Err(CliError::Internal("acceptance criteria failed".into()));
    }
    Ok(())
}

fn run(cli: Cli, out: &mut String) -> Result<(), CliError> {
    match cli.command {
        Command::Eval { input, expr, budget, metrics } => cmd_eval(&input, &expr, &budget, metrics, out),
        Command::Solve { input, eq, nonempty, budget, metrics } => cmd_solve(&input, &eq, nonempty, &budget, metrics, out),
        Command::Check { input, expr, expr_file } => cmd_check(&input, expr.as_deref(), expr_file.as_deref(), out),
        Command::Profile { eq, n_range, gen, schema, density, seed, series, out: file, budget } => cmd_profile(
            &eq,
            n_range,
            gen,
            schema.as_deref(),
            density,
            seed,
            series,
            file.as_deref(),
            &budget,
            out,
        ),
        Command::Construction { list: true, .. } => {
            for (name, about) in CONSTRUCTIONS {
                out.push_str(&format!("{name:<22} {about}\n"));
            }
            Ok(())
        }
        Command::Construction { name, input, verify, budget, .. } => {
            cmd_construction(name.as_deref().unwrap_or_default(), &input, verify, &budget, out)
        }
        Command::Repl { db, budget } => {
            let stdin = std::io::stdin();
            repl::run(stdin.lock(), &mut std::io::stdout(), db.as_deref(), budget.budget())
                .map_err(|e| CliError::Internal(e.to_string()))
        }
        Command::Selftest { criterion } => cmd_selftest(&criterion, out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = String::new();
    let result = run(cli, &mut out);
    let mut stdout = std::io::stdout();
    let _ = stdout.write_all(out.as_bytes());
    let _ = stdout.flush();
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.code())
        }
    }
}
