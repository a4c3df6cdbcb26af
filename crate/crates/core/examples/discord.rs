//! Mutual information, measured Holevo quantity and discord for standard
//! two-qubit states under Z- and X-basis measurements on the first qubit.

use qdiscord::infotheory::discord_breakdown;
use qdiscord::states::named;
use qdiscord::{DensityMatrix, EntropyKind, Povm, Result};

fn main() -> Result<()> {
    let states: [(&str, DensityMatrix); 3] = [
        ("classical", named::classical()),
        ("Bell", named::bell()),
        ("Werner(0.5)", named::werner(0.5)?),
    ];
    let povms = [("Z", Povm::computational(2)), ("X", Povm::qubit_x())];
    let kinds = [
        EntropyKind::VonNeumann,
        EntropyKind::Quadratic,
        EntropyKind::tsallis(2.5),
    ];

    println!(
        "{:<12} {:<3} {:<16} {:>12} {:>12} {:>12}",
        "state", "P", "kind", "S(a:b)", "chi(P,b)", "discord"
    );
    for (sname, rho) in &states {
        for (pname, povm) in &povms {
            for kind in kinds {
                let b = discord_breakdown(kind, rho, povm)?;
                println!(
                    "{sname:<12} {pname:<3} {:<16} {:>12.8} {:>12.8} {:>12.8}",
                    kind.to_string(),
                    b.mutual_information,
                    b.holevo_measured,
                    b.discord
                );
            }
        }
    }
    Ok(())
}
