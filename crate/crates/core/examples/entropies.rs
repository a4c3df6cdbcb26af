//! The four entropy families on a few spectra, and the approach to the
//! von Neumann value as q -> 1.

use qdiscord::states::named;
use qdiscord::{entropy, DensityMatrix, EntropyKind, Result};

fn main() -> Result<()> {
    let kinds = [
        EntropyKind::VonNeumann,
        EntropyKind::renyi(0.5),
        EntropyKind::tsallis(0.5),
        EntropyKind::tsallis(2.0),
        EntropyKind::tsallis(2.5),
        EntropyKind::Quadratic,
    ];
    let states = [
        ("|0><0|", DensityMatrix::diagonal(vec![2], &[1.0, 0.0])?),
        (
            "diag(3/4, 1/4)",
            DensityMatrix::diagonal(vec![2], &[0.75, 0.25])?,
        ),
        ("I/2", DensityMatrix::maximally_mixed(vec![2])),
        ("Bell, reduced", named::bell().reduce(&[0])?),
        ("Bell, joint", named::bell()),
    ];

    print!("{:<16}", "state");
    for k in &kinds {
        print!("{:>16}", k.to_string());
    }
    println!();
    for (name, rho) in &states {
        print!("{name:<16}");
        for k in &kinds {
            print!("{:>16.10}", entropy(*k, rho)?);
        }
        println!();
    }

    let rho = DensityMatrix::diagonal(vec![3], &[0.5, 0.3, 0.2])?;
    let vn = entropy(EntropyKind::VonNeumann, &rho)?;
    println!("\nTsallis(q) - S(rho) on diag(0.5, 0.3, 0.2):");
    for eps in [1e-1, 1e-2, 1e-3, 1e-4, 1e-7] {
        let above = entropy(EntropyKind::tsallis(1.0 + eps), &rho)? - vn;
        let below = entropy(EntropyKind::tsallis(1.0 - eps), &rho)? - vn;
        println!("  q = 1 +/- {eps:e}: {above:+.3e} / {below:+.3e}");
    }
    Ok(())
}
