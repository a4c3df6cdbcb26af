//! Find a violating instance and sweep its discord over q in [1, 4],
//! writing `q,discord` CSV to stdout (or to the path given).
//!
//! `cargo run --release --example sweep [out.csv]`

use qdiscord::io::write_atomic;
use qdiscord::search::{find_violation, linspace, sweep_q, SearchConfig};
use qdiscord::Result;

fn main() -> Result<()> {
    let cfg = SearchConfig {
        restarts: 40,
        ..SearchConfig::default()
    };
    let cert = find_violation(&cfg)?.expect("no violation found at this budget");
    let povm = cert.povm.expect("FSA certificates carry a POVM");
    let sweep = sweep_q(&cert.rho_ab, &povm, &linspace(1.0, 4.0, 301))?;

    let (q_min, d_min) = sweep
        .q_grid
        .iter()
        .zip(&sweep.discord_values)
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(q, d)| (*q, *d))
        .unwrap();
    let negative: Vec<f64> = sweep.negative_points(1e-9).map(|(q, _)| q).collect();
    eprintln!("minimum {d_min:.4e} at q = {q_min}");
    if let (Some(lo), Some(hi)) = (negative.first(), negative.last()) {
        eprintln!("negative for q in [{lo}, {hi}] on this grid");
    }

    match std::env::args().nth(1) {
        Some(path) => write_atomic(path.as_ref(), sweep.to_csv().as_bytes())?,
        None => print!("{}", sweep.to_csv()),
    }
    Ok(())
}
