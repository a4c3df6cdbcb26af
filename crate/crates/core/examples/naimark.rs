//! A rank-1 POVM and its Naimark extension give the same measured Holevo
//! quantity; coarse-graining the POVM can only lower it.

use qdiscord::holevo_measured;
use qdiscord::states::{coarse_grain, naimark_extend, random_density, Povm};
use qdiscord::{EntropyKind, Result, Rng};

fn main() -> Result<()> {
    let mut rng = Rng::new(3);
    let rho = random_density(&[2, 2], 3, &mut rng)?;
    let trine = Povm::trine();
    let ext = naimark_extend(&trine)?;
    let lifted = ext.lift(&rho)?;
    println!(
        "trine on a qubit -> projective measurement on dimension {} (is projective: {})",
        ext.projective.dim(),
        ext.projective.is_projective(1e-12)
    );

    let coarse = coarse_grain(&trine, &[vec![0, 1], vec![2]])?;
    for kind in [
        EntropyKind::VonNeumann,
        EntropyKind::Quadratic,
        EntropyKind::tsallis(2.5),
        EntropyKind::renyi(0.5),
    ] {
        let fine = holevo_measured(kind, &rho, &trine)?;
        let naimark = holevo_measured(kind, &lifted, &ext.projective)?;
        let grained = holevo_measured(kind, &rho, &coarse)?;
        println!(
            "{:<16} POVM {fine:.12}  extension {naimark:.12}  coarse {grained:.12}",
            kind.to_string()
        );
    }
    Ok(())
}
