use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

fn eqalg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eqalg"))
        .args(args)
        .env_remove("EQALG_MAX_CANDIDATES")
        .env_remove("EQALG_MAX_SPACE")
        .env_remove("EQALG_MAX_SOLUTIONS")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn eval_projection() {
    let o = eqalg(&["eval", "--db", &fixture("pair.txt"), "--expr", "project[1](R)"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "[[a]]\n");
}

#[test]
fn eval_powerset_equation_with_metrics() {
    let o = eqalg(&[
        "eval",
        "--db",
        &fixture("unary.txt"),
        "--expr",
        "solve{(X:(0)) | union(X,R) = R}",
        "--metrics",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "[[[]],[[[a]]]]\n");
    assert!(stderr(&o).contains("candidates_tested=4 solutions_found=2"));
}

#[test]
fn ill_typed_expression_exits_1_with_path() {
    let o = eqalg(&["eval", "--db", &fixture("pair.txt"), "--expr", "times(R, union(R, D))"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("/times.right"), "{}", stderr(&o));
    let o = eqalg(&["eval", "--db", &fixture("pair.txt"), "--expr", "union(R,"]);
    assert_eq!(o.status.code(), Some(1));
    let o = eqalg(&["eval", "--db", "no/such/file", "--expr", "D"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn budget_exceeded_exits_2() {
    let o = eqalg(&["eval", "--domain-size", "3", "--expr", "solve{(X:(0)) | X = X}", "--max-candidates", "5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("max_candidates"));
}

#[test]
fn flags_override_environment_budgets() {
    let run = |flag: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_eqalg"));
        c.args(["eval", "--domain-size", "3", "--expr", "solve{(X:(0)) | X = X}"]);
        if let Some(f) = flag {
            c.args(["--max-candidates", f]);
        }
        c.env("EQALG_MAX_CANDIDATES", "5").output().unwrap()
    };
    assert_eq!(run(None).status.code(), Some(2));
    assert_eq!(run(Some("8")).status.code(), Some(0));
}

#[test]
fn solve_and_nonempty() {
    let o = eqalg(&["solve", "--db", &fixture("unary.txt"), "--eq", "(X:(0)) | union(X,R) = R"]);
    assert_eq!(stdout(&o), "solutions: 2\n[[[]],[[[a]]]]\n");
    let o = eqalg(&["solve", "--domain-size", "3", "--eq", "(X:(0)) | X = D", "--nonempty"]);
    assert_eq!(stdout(&o), "solution exists\n");
    let o = eqalg(&["solve", "--domain-size", "3", "--eq", "(X:(0)) | X = minus(X, X", "--nonempty"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("eq:1:"), "{}", stderr(&o));
}

#[test]
fn check_reports_type() {
    let o = eqalg(&["check", "--db", &fixture("pair.txt"), "--expr", "nest[2](R)"]);
    assert_eq!(stdout(&o), "database ok: 2 atoms, 1 relations\ntype: (0,0,(0))\n");
}

#[test]
fn constructions_verify_against_oracles() {
    for (name, db) in [
        ("tc-powerset", "cycle.txt"),
        ("tc-sparse", "chain.txt"),
        ("nest-sparse", "chain.txt"),
        ("powerset", "unary.txt"),
    ] {
        let o = eqalg(&["construction", "--name", name, "--db", &fixture(db), "--verify"]);
        assert_eq!(o.status.code(), Some(0), "{name}: {}", stderr(&o));
        assert!(stdout(&o).contains("verify: PASS"), "{name}");
    }
    let o = eqalg(&["construction", "--name", "tc-sparse", "--db", &fixture("chain.txt")]);
    assert!(stdout(&o).contains("result: [[a,b],[a,c],[a,d],[b,c],[b,d],[c,d],[d,d]]"));
}

#[test]
fn parity_on_three_atoms_has_no_solution() {
    let o = eqalg(&["construction", "--name", "parity", "--domain-size", "3", "--verify"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("no solution\n") && out.contains("verify: PASS"));
}

#[test]
fn unknown_construction_is_a_user_error() {
    let o = eqalg(&["construction", "--name", "nope", "--domain-size", "2"]);
    assert_eq!(o.status.code(), Some(1));
    let o = eqalg(&["construction", "--list"]);
    assert!(stdout(&o).lines().count() >= 7);
}

#[test]
fn profile_examples() {
    let o = eqalg(&["profile", "--eq", "singleton", "--n-range", "1..5"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("growth (solutions): POLY_LIKE(1)"));
    let o = eqalg(&["profile", "--eq", "powerset", "--n-range", "1..4"]);
    assert!(stdout(&o).contains("EXPONENTIAL_LIKE"));
    let o = eqalg(&["profile", "--eq", &fixture("non_flat.txt"), "--n-range", "1..2"]);
    assert!(stdout(&o).contains("verdict: NON_FLAT"));
}

#[test]
fn truncated_profile_exits_2_with_partial_report() {
    let o = eqalg(&["profile", "--eq", "singleton", "--n-range", "1..8", "--max-candidates", "64"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).contains("truncated: n = 7"));
}

#[test]
fn profile_writes_report_document() {
    let path = std::env::temp_dir().join(format!("eqalg-report-{}.txt", std::process::id()));
    let p = path.display().to_string();
    let o = eqalg(&["profile", "--eq", "singleton", "--n-range", "1..3", "--out", &p]);
    assert_eq!(o.status.code(), Some(0));
    let doc = std::fs::read_to_string(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert!(doc.contains("growth [POLY_LIKE,1]"), "{doc}");
}

#[test]
fn output_is_reproducible() {
    let args = ["profile", "--eq", "nest-sparse", "--gen", "flat", "--density", "0.5", "--seed", "3", "--n-range", "1..4"];
    assert_eq!(stdout(&eqalg(&args)), stdout(&eqalg(&args)));
}

#[test]
fn repl_session() {
    use std::io::Write;
    let mut child = Command::new(env!("CARGO_BIN_EXE_eqalg"))
        .arg("repl")
        .stdin(std::process::Stdio::piped())
        .stdout(std::process::Stdio::piped())
        .spawn()
        .unwrap();
    let script = format!(
        ":load {}\nD\n:type times(R,D)\nsolve{{(X:(0,0)) | union(X,R) = R}}\nfoo(\n:quit\nD\n",
        fixture("pair.txt")
    );
    child.stdin.take().unwrap().write_all(script.as_bytes()).unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "loaded 2 atoms, 1 relations\n[[a],[b]] : (0)\n(0,0,0)\n[[[]],[[[a,b]]]] : ((0,0))\nerror: 1:1: unknown keyword `foo`\n"
    );
}

#[test]
fn selftest_runs_a_single_criterion() {
    let o = eqalg(&["selftest", "--criterion", "4"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("PASS  4 singleton"));
}
