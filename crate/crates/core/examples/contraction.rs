//! Tr|rho - sigma|^q for pure inputs does not increase under a channel.

use qdiscord::entropy::schatten_q_distance;
use qdiscord::states::{random_channel, random_pure, KrausChannel};
use qdiscord::{Result, Rng};

fn main() -> Result<()> {
    let mut rng = Rng::new(5);
    let rho = random_pure(&[3], &mut rng)?;
    let sigma = random_pure(&[3], &mut rng)?;
    let channels = [
        ("depolarizing(0.3)", KrausChannel::depolarizing(3, 0.3)?),
        ("random 3->2, 2 Kraus", random_channel(3, 2, 2, &mut rng)?),
        ("random 3->3, 4 Kraus", random_channel(3, 3, 4, &mut rng)?),
    ];
    for (name, ch) in &channels {
        println!("{name}:");
        let (a, b) = (ch.apply(&rho)?, ch.apply(&sigma)?);
        for q in [1.0, 1.5, 2.0, 2.5, 3.0] {
            let before = schatten_q_distance(&rho, &sigma, q)?;
            let after = schatten_q_distance(&a, &b, q)?;
            println!("  q = {q:<3}  {before:.10} -> {after:.10}");
        }
    }
    Ok(())
}
