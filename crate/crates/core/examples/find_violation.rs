//! Search for a two-qubit state and projective measurement with negative
//! Tsallis discord at q = 2.5, then replay the certificate from its JSON.
//!
//! `cargo run --release --example find_violation [restarts] [seed]`

use qdiscord::infotheory::{fsa_condition, BipartiteInstance, FsaInstance};
use qdiscord::search::{find_violation, SearchConfig, ViolationCertificate};
use qdiscord::Result;

fn main() -> Result<()> {
    let mut args = std::env::args().skip(1);
    let restarts = args.next().and_then(|s| s.parse().ok()).unwrap_or(50);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(0);
    let cfg = SearchConfig {
        restarts,
        seed,
        ..SearchConfig::default()
    };

    let Some(cert) = find_violation(&cfg)? else {
        println!("nothing below -1e-6 with {restarts} restarts");
        return Ok(());
    };
    println!(
        "discord {:.6e} at q = {} (restart {}, {:.2?})",
        cert.discord_value, cert.q, cert.restart, cert.wall_time
    );

    let replayed = ViolationCertificate::from_json(&cert.to_json())?;
    println!("replayed discord {:.6e}", replayed.reevaluate()?);

    let povm = replayed
        .povm
        .clone()
        .expect("FSA certificates carry a POVM");
    let inst = FsaInstance::I(BipartiteInstance::new(replayed.rho_ab.clone(), povm)?);
    let report = fsa_condition(replayed.kind, &inst, 1e-9)?;
    println!(
        "{} holds: {} (gap {:.3e})",
        report.label, report.holds, report.gap
    );
    println!("{}", cert.to_json());
    Ok(())
}
