//! Plain additivity on products and generalized additivity on
//! classical-quantum states. Only the von Neumann entropy has both.

use qdiscord::infotheory::{additivity_gap, generalized_additivity_gap};
use qdiscord::states::{haar_isometry, random_density};
use qdiscord::{EntropyKind, Result, Rng};

fn main() -> Result<()> {
    let mut rng = Rng::new(8);
    let rho_a = random_density(&[2], 2, &mut rng)?;
    let rho_b = random_density(&[3], 3, &mut rng)?;
    let basis = haar_isometry(3, 3, &mut rng)?;
    let states_b = (0..3)
        .map(|_| random_density(&[2], 2, &mut rng))
        .collect::<Result<Vec<_>>>()?;
    let probs = [0.5, 0.3, 0.2];

    println!("{:<16} {:>14} {:>14}", "kind", "product gap", "cq gap");
    for kind in [
        EntropyKind::VonNeumann,
        EntropyKind::renyi(0.5),
        EntropyKind::tsallis(2.0),
        EntropyKind::Quadratic,
    ] {
        let plain = additivity_gap(kind, &rho_a, &rho_b)?;
        let cq = generalized_additivity_gap(kind, &probs, &basis, &states_b)?;
        println!(
            "{:<16} {plain:>14.3e} {:>14.3e}",
            kind.to_string(),
            cq.generalized
        );
    }
    Ok(())
}
