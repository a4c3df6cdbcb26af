//! The quadratic Holevo quantity equals the probability-weighted sum of
//! pairwise squared Hilbert-Schmidt distances.

use qdiscord::infotheory::holevo_quadratic_pairwise;
use qdiscord::states::random_density;
use qdiscord::{holevo, Ensemble, EntropyKind, Result, Rng};

fn main() -> Result<()> {
    let mut rng = Rng::new(11);
    println!(
        "{:>3} {:>3} {:>20} {:>20} {:>10}",
        "d", "m", "chi_Q", "pairwise", "diff"
    );
    for (d, m) in [(2, 2), (2, 5), (3, 3), (4, 2), (4, 5)] {
        let states = (0..m)
            .map(|_| random_density(&[d], 1 + rng.below(d), &mut rng))
            .collect::<Result<Vec<_>>>()?;
        let mut probs: Vec<f64> = (0..m).map(|_| 0.1 + rng.uniform()).collect();
        let total: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|p| *p /= total);
        let ens = Ensemble::new(probs, states)?;

        let direct = holevo(EntropyKind::Quadratic, &ens)?;
        let pairwise = holevo_quadratic_pairwise(&ens)?;
        println!(
            "{d:>3} {m:>3} {direct:>20.16} {pairwise:>20.16} {:>10.1e}",
            (direct - pairwise).abs()
        );
    }
    Ok(())
}
