//! Run every property suite at its default size and print one line per check.

use qdiscord::suites::{run_suites, Suite, SuiteConfig};
use qdiscord::Result;

fn main() -> Result<()> {
    let seed = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(0);
    let report = run_suites(
        &Suite::ALL,
        &SuiteConfig {
            seed,
            ..SuiteConfig::default()
        },
    )?;
    for r in &report.results {
        println!(
            "{:<5} {:<34} trials {:>5}  worst {:>+11.3e}  tol {:.0e}",
            if r.pass { "ok" } else { "FAIL" },
            r.name,
            r.trials,
            r.worst_gap,
            r.tolerance
        );
    }
    println!("all pass: {}", report.pass);
    Ok(())
}
