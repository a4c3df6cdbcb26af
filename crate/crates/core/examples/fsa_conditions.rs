//! The four equivalent firm-subadditivity conditions and the stronger von
//! Neumann versions, evaluated on one random instance of each shape.

use qdiscord::infotheory::{
    fsa_condition, vn_strong_condition, BipartiteInstance, EnsembleChannelInstance, FsaInstance,
    PureTripartiteInstance, StrongInstance, TripartiteInstance, DEFAULT_TOLERANCE,
};
use qdiscord::states::{purify, random_channel, random_density, random_povm, random_pure};
use qdiscord::{ConditionReport, Ensemble, EntropyKind, Result, Rng};

fn show(r: &ConditionReport) {
    println!(
        "  {:<9} lhs {:>11.7}  rhs {:>11.7}  gap {:>+11.3e}  {}",
        r.label,
        r.lhs,
        r.rhs,
        r.gap,
        if r.holds { "holds" } else { "FAILS" }
    );
}

fn main() -> Result<()> {
    let mut rng = Rng::new(2024);
    let tol = DEFAULT_TOLERANCE;

    let rho_ab = random_density(&[2, 3], 3, &mut rng)?;
    let povm = random_povm(2, 3, true, &mut rng)?;
    let bi = BipartiteInstance::new(rho_ab.clone(), povm.clone())?;
    let pure = PureTripartiteInstance::new(purify(&rho_ab)?, povm)?;

    let pure_ens = Ensemble::new(
        vec![0.2, 0.5, 0.3],
        (0..3)
            .map(|_| random_pure(&[3], &mut rng))
            .collect::<Result<_>>()?,
    )?;
    let channel = random_channel(3, 2, 3, &mut rng)?;
    let ec = EnsembleChannelInstance::new_pure(pure_ens, channel.clone())?;

    let instances = [
        FsaInstance::I(bi.clone()),
        FsaInstance::II(bi.clone()),
        FsaInstance::III(pure),
        FsaInstance::IV(ec),
    ];
    for kind in [
        EntropyKind::VonNeumann,
        EntropyKind::Quadratic,
        EntropyKind::tsallis(2.5),
    ] {
        println!("{kind}:");
        for inst in &instances {
            show(&fsa_condition(kind, inst, tol)?);
        }
    }

    let mixed_ens = Ensemble::new(
        vec![0.6, 0.4],
        (0..2)
            .map(|_| random_density(&[3], 2, &mut rng))
            .collect::<Result<_>>()?,
    )?;
    let tri = TripartiteInstance::new(
        random_density(&[2, 2, 2], 4, &mut rng)?,
        random_povm(2, 2, false, &mut rng)?,
    )?;
    println!("von Neumann, strong forms:");
    for inst in [
        StrongInstance::I(bi.clone()),
        StrongInstance::II(bi),
        StrongInstance::III(tri),
        StrongInstance::IV(EnsembleChannelInstance::new(mixed_ens, channel)?),
    ] {
        show(&vn_strong_condition(&inst, tol)?);
    }
    Ok(())
}
