//! Acceptance criteria. Each criterion prints one PASS/FAIL line, and the
//! process exits nonzero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use fmtlab::verify::{run_one, VerifyConfig};

fn main() -> ExitCode {
    let cfg = VerifyConfig::default();
    let mut failed = Vec::new();
    for id in 1..=10 {
        let start = Instant::now();
        let c = run_one(id, &cfg).expect("criteria are numbered 1 to 10");
        println!("{c} ({:.1}s)", start.elapsed().as_secs_f64());
        if !c.passed {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 10 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
