use std::process::ExitCode;

use eqalg_conformance::{run, CRITERIA};

fn main() -> ExitCode {
    let mut failed = Vec::new();
    for c in CRITERIA {
        let o = run(c.0).expect("listed criterion");
        println!("{o}");
        if !o.pass {
            failed.push(o.id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", CRITERIA.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
