//! Prints one PASS/FAIL line per acceptance criterion; exits non-zero if
//! any criterion fails or exceeds its time limit.

mod common;

use std::panic;
use std::process::ExitCode;
use std::time::Instant;

fn main() -> ExitCode {
    let mut failed = 0;
    for c in common::criteria::all() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(c.check).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into());
            Err(msg)
        });
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(detail) if elapsed > c.limit => Err(format!(
                "{detail}; took {:.1}s, limit {}s",
                elapsed.as_secs_f64(),
                c.limit.as_secs()
            )),
            other => other,
        };
        let secs = elapsed.as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {}: {}: {detail} [{secs:.2}s]", c.id, c.title),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {}: {}: {why} [{secs:.2}s]", c.id, c.title);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
