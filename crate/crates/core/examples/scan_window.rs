//! Per-q search over a grid of Tsallis exponents. Points outside (2, 3) are
//! reported as "none found at this budget", which is not a proof of anything.

use qdiscord::search::{linspace, scan_window, Finding, KindFamily, SearchConfig};
use qdiscord::Result;

fn main() -> Result<()> {
    let cfg = SearchConfig {
        restarts: 20,
        local_steps: 1500,
        ..SearchConfig::default()
    };
    let mut grid = vec![1.0, 1.5];
    grid.extend(linspace(2.0, 3.0, 11));
    grid.extend([3.5, 4.0]);
    for e in scan_window(KindFamily::Tsallis, &grid, &cfg)? {
        let tag = match e.finding {
            Finding::ViolationFound => "violation",
            Finding::NoneFoundAtBudget => "none found",
        };
        println!("q = {:<4.2} best {:>+12.4e}  {tag}", e.q, e.best_value);
    }
    Ok(())
}
