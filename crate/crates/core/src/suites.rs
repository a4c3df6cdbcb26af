//! Randomized property suites for every inequality and identity the crate
//! implements.
//!
//! Each suite draws `trials` random instances. Trial `t` owns its generator,
//! seeded from the base seed, the suite and `t`, so the outcome is the same
//! however the trials are spread across threads.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entropy::{entropy, schatten_q_distance, EntropyKind};
use crate::error::{Error, Result};
use crate::infotheory::{
    discord_identity_gap, fsa_condition, generalized_additivity_gap, holevo, holevo_measured,
    holevo_quadratic_pairwise, mutual_information, ssa_gap, vn_strong_condition, BipartiteInstance,
    EnsembleChannelInstance, FsaInstance, PureTripartiteInstance, StrongInstance,
    TripartiteInstance, DEFAULT_TOLERANCE,
};
use crate::states::{
    coarse_grain, haar_isometry, naimark_extend, purify, random_channel, random_density,
    random_povm, random_projective_povm, random_pure, DensityMatrix, Ensemble, KrausChannel, Povm,
    Rng,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    /// The four firm-subadditivity conditions for von Neumann and quadratic entropy.
    Thm2,
    /// The strengthened von Neumann conditions.
    Thm3,
    /// Contraction of `Tr|ρ−σ|^q` under channels for pure inputs.
    Lemma4,
    /// Discord through the purification.
    Eq10,
    /// Quadratic Holevo quantity as a pairwise distance sum.
    Eq25,
    /// Generalized and plain additivity.
    Eq27,
    /// Subadditivity.
    Sa,
    Concavity,
    /// Strong subadditivity.
    Ssa,
    /// Measured Holevo quantity is unchanged by a Naimark extension.
    Naimark,
    /// Measured Holevo quantity does not grow under coarse-graining.
    CoarseGrain,
}

impl Suite {
    pub const ALL: [Suite; 11] = [
        Suite::Thm2,
        Suite::Thm3,
        Suite::Lemma4,
        Suite::Eq10,
        Suite::Eq25,
        Suite::Eq27,
        Suite::Sa,
        Suite::Concavity,
        Suite::Ssa,
        Suite::Naimark,
        Suite::CoarseGrain,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Thm2 => "thm2",
            Suite::Thm3 => "thm3",
            Suite::Lemma4 => "lemma4",
            Suite::Eq10 => "eq10",
            Suite::Eq25 => "eq25",
            Suite::Eq27 => "eq27",
            Suite::Sa => "sa",
            Suite::Concavity => "concavity",
            Suite::Ssa => "ssa",
            Suite::Naimark => "naimark",
            Suite::CoarseGrain => "coarse_grain",
        }
    }

    pub fn default_trials(self) -> usize {
        match self {
            Suite::Thm2 | Suite::Sa => 1000,
            Suite::Eq10 | Suite::Eq27 | Suite::Naimark => 200,
            _ => 500,
        }
    }

    fn tag(self) -> u64 {
        Suite::ALL.iter().position(|s| *s == self).unwrap() as u64 + 1
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown suite {s:?}")))
    }
}

/// How a check's gaps are judged.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GapMode {
    /// Inequality: worst is the smallest gap, passes when `worst ≥ −tolerance`.
    Inequality,
    /// Identity: worst is the largest deviation, passes when `worst < tolerance`.
    Identity,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub suite: Suite,
    pub name: String,
    pub trials: usize,
    pub mode: GapMode,
    pub worst_gap: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub results: Vec<SuiteResult>,
    pub pass: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct SuiteConfig {
    /// Overrides each suite's default count.
    pub trials: Option<usize>,
    pub seed: u64,
    /// Slack for inequality checks. Identity checks keep their own bounds.
    pub tolerance: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            trials: None,
            seed: 0,
            tolerance: DEFAULT_TOLERANCE,
        }
    }
}

struct Check {
    name: String,
    mode: GapMode,
    tolerance: f64,
}

impl Check {
    fn ineq(name: impl Into<String>, tol: f64) -> Self {
        Self {
            name: name.into(),
            mode: GapMode::Inequality,
            tolerance: tol,
        }
    }

    fn ident(name: impl Into<String>, tol: f64) -> Self {
        Self {
            name: name.into(),
            mode: GapMode::Identity,
            tolerance: tol,
        }
    }
}

fn trial_seed(seed: u64, suite: Suite, trial: usize) -> u64 {
    // splitmix64 finalizer over the combined key
    let mut z =
        seed ^ suite.tag().wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (trial as u64).rotate_left(32);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn run<F>(
    suite: Suite,
    checks: Vec<Check>,
    trials: usize,
    seed: u64,
    trial: F,
) -> Result<Vec<SuiteResult>>
where
    F: Fn(&mut Rng) -> Result<Vec<f64>> + Sync,
{
    let gaps: Vec<Vec<f64>> = (0..trials)
        .into_par_iter()
        .map(|t| trial(&mut Rng::new(trial_seed(seed, suite, t))))
        .collect::<Result<_>>()?;
    Ok(checks
        .into_iter()
        .enumerate()
        .map(|(i, c)| {
            let column = gaps.iter().map(|g| g[i]);
            let (worst_gap, pass) = match c.mode {
                GapMode::Inequality => {
                    let w = column.fold(f64::INFINITY, f64::min);
                    (w, w >= -c.tolerance)
                }
                GapMode::Identity => {
                    let w = column.fold(0.0, f64::max);
                    (w, w < c.tolerance)
                }
            };
            SuiteResult {
                suite,
                name: c.name,
                trials,
                mode: c.mode,
                worst_gap,
                tolerance: c.tolerance,
                pass: pass && trials > 0,
            }
        })
        .collect())
}

const BIPARTITE_DIMS: [(usize, usize); 4] = [(2, 2), (2, 3), (3, 3), (2, 4)];

/// Flat Dirichlet sample.
fn random_probs(n: usize, rng: &mut Rng) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| -(1.0 - rng.uniform()).ln()).collect();
    let total: f64 = w.iter().sum();
    w.iter().map(|x| x / total).collect()
}

fn random_mixed(dims: &[usize], rng: &mut Rng) -> Result<DensityMatrix> {
    let d: usize = dims.iter().product();
    let rank = 1 + rng.below(d);
    random_density(dims, rank, rng)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum PovmClass {
    Projective,
    Rank1,
    Coarse,
}

fn random_povm_of(class: PovmClass, d: usize, rng: &mut Rng) -> Result<Povm> {
    match class {
        PovmClass::Projective => random_projective_povm(d, rng),
        PovmClass::Rank1 => random_povm(d, d + 1 + rng.below(2), true, rng),
        PovmClass::Coarse => {
            let fine = random_povm(d, d + 2, true, rng);
            let n = d + 2;
            let cut = 1 + rng.below(n - 1);
            coarse_grain(&fine?, &[(0..cut).collect(), (cut..n).collect()])
        }
    }
}

/// A random bipartite state with a POVM on `a`, cycling through dimensions and
/// POVM classes.
fn bipartite_instance(rng: &mut Rng) -> Result<BipartiteInstance> {
    let (da, db) = BIPARTITE_DIMS[rng.below(BIPARTITE_DIMS.len())];
    let class = [PovmClass::Projective, PovmClass::Rank1, PovmClass::Coarse][rng.below(3)];
    let state = random_mixed(&[da, db], rng)?;
    let povm = random_povm_of(class, da, rng)?;
    BipartiteInstance::new(state, povm)
}

fn random_ensemble(d: usize, pure: bool, rng: &mut Rng) -> Result<Ensemble> {
    let m = 2 + rng.below(3);
    let states = (0..m)
        .map(|_| {
            if pure {
                random_pure(&[d], rng)
            } else {
                random_mixed(&[d], rng)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Ensemble::new(random_probs(m, rng), states)
}

/// Random channel out of dimension `d_in` with enough Kraus operators for the
/// dilation to exist.
fn any_channel(d_in: usize, rng: &mut Rng) -> Result<KrausChannel> {
    let d_out = 2 + rng.below(3);
    let min_k = d_in.div_ceil(d_out);
    random_channel(d_in, d_out, min_k + rng.below(3), rng)
}

fn ensemble_channel(pure: bool, rng: &mut Rng) -> Result<EnsembleChannelInstance> {
    let d = 2 + rng.below(2);
    let ens = random_ensemble(d, pure, rng)?;
    let ch = any_channel(d, rng)?;
    if pure {
        EnsembleChannelInstance::new_pure(ens, ch)
    } else {
        EnsembleChannelInstance::new(ens, ch)
    }
}

fn thm2(trials: usize, seed: u64, tol: f64) -> Result<Vec<SuiteResult>> {
    let kinds = [EntropyKind::VonNeumann, EntropyKind::Quadratic];
    let checks = kinds
        .iter()
        .flat_map(|k| ["i", "ii", "iii", "iv"].map(|v| Check::ineq(format!("Thm2.{v}[{k}]"), tol)))
        .collect();
    run(Suite::Thm2, checks, trials, seed, |rng| {
        let bi = bipartite_instance(rng)?;
        let da = bi.state.dims()[0];
        let n = da + rng.below(2);
        let rank1 = if n == da {
            random_projective_povm(da, rng)?
        } else {
            random_povm(da, n, true, rng)?
        };
        let pure = PureTripartiteInstance::new(purify(&bi.state)?, rank1)?;
        let ec = ensemble_channel(true, rng)?;
        let instances = [
            FsaInstance::I(bi.clone()),
            FsaInstance::II(bi),
            FsaInstance::III(pure),
            FsaInstance::IV(ec),
        ];
        let mut gaps = Vec::with_capacity(8);
        for k in kinds {
            for inst in &instances {
                gaps.push(fsa_condition(k, inst, tol)?.gap);
            }
        }
        Ok(gaps)
    })
}

fn thm3(trials: usize, seed: u64, tol: f64) -> Result<Vec<SuiteResult>> {
    let checks = vec![
        Check::ineq("Thm3.i", tol),
        Check::ineq("Thm3.ii", tol),
        Check::ineq("Thm3.iii", tol),
        Check::ineq("Thm3.iv", tol),
        Check::ineq("Thm2.i - Thm3.i", tol),
    ];
    run(Suite::Thm3, checks, trials, seed, |rng| {
        let bi = bipartite_instance(rng)?;
        let class = [PovmClass::Projective, PovmClass::Rank1, PovmClass::Coarse][rng.below(3)];
        let tri = TripartiteInstance::new(
            random_mixed(&[2, 2, 2], rng)?,
            random_povm_of(class, 2, rng)?,
        )?;
        let ec = ensemble_channel(false, rng)?;
        let g1 = vn_strong_condition(&StrongInstance::I(bi.clone()), tol)?.gap;
        let g2 = vn_strong_condition(&StrongInstance::II(bi.clone()), tol)?.gap;
        let g3 = vn_strong_condition(&StrongInstance::III(tri), tol)?.gap;
        let g4 = vn_strong_condition(&StrongInstance::IV(ec), tol)?.gap;
        let weak = fsa_condition(EntropyKind::VonNeumann, &FsaInstance::I(bi), tol)?.gap;
        Ok(vec![g1, g2, g3, g4, weak - g1])
    })
}

pub const LEMMA4_EXPONENTS: [f64; 5] = [1.0, 1.5, 2.0, 2.5, 3.0];

fn lemma4(trials: usize, seed: u64, tol: f64) -> Result<Vec<SuiteResult>> {
    let checks = LEMMA4_EXPONENTS
        .iter()
        .map(|q| Check::ineq(format!("lemma4[q={q}]"), tol))
        .collect();
    run(Suite::Lemma4, checks, trials, seed, |rng| {
        let d = 2 + rng.below(2);
        let rho = random_pure(&[d], rng)?;
        let sigma = random_pure(&[d], rng)?;
        let ch = any_channel(d, rng)?;
        let (out_rho, out_sigma) = (ch.apply(&rho)?, ch.apply(&sigma)?);
        LEMMA4_EXPONENTS
            .iter()
            .map(|&q| {
                Ok(schatten_q_distance(&rho, &sigma, q)?
                    - schatten_q_distance(&out_rho, &out_sigma, q)?)
            })
            .collect()
    })
}

pub const EQ10_KINDS: [EntropyKind; 5] = [
    EntropyKind::VonNeumann,
    EntropyKind::Quadratic,
    EntropyKind::tsallis(1.5),
    EntropyKind::tsallis(2.5),
    EntropyKind::renyi(0.5),
];

fn eq10(trials: usize, seed: u64) -> Result<Vec<SuiteResult>> {
    let checks = EQ10_KINDS
        .iter()
        .map(|k| Check::ident(format!("eq10[{k}]"), 1e-9))
        .collect();
    run(Suite::Eq10, checks, trials, seed, |rng| {
        let (da, db) = BIPARTITE_DIMS[rng.below(BIPARTITE_DIMS.len())];
        let state = random_mixed(&[da, db], rng)?;
        let class = [PovmClass::Projective, PovmClass::Rank1][rng.below(2)];
        let povm = random_povm_of(class, da, rng)?;
        EQ10_KINDS
            .iter()
            .map(|&k| discord_identity_gap(k, &state, &povm))
            .collect()
    })
}

fn eq25(trials: usize, seed: u64) -> Result<Vec<SuiteResult>> {
    run(
        Suite::Eq25,
        vec![Check::ident("eq25", 1e-10)],
        trials,
        seed,
        |rng| {
            let d = 1 + rng.below(4);
            let m = 1 + rng.below(5);
            let states = (0..m)
                .map(|_| random_mixed(&[d], rng))
                .collect::<Result<Vec<_>>>()?;
            let ens = Ensemble::new(random_probs(m, rng), states)?;
            Ok(vec![(holevo(EntropyKind::Quadratic, &ens)?
                - holevo_quadratic_pairwise(&ens)?)
            .abs()])
        },
    )
}

fn eq27(trials: usize, seed: u64) -> Result<Vec<SuiteResult>> {
    let (vn, renyi) = (EntropyKind::VonNeumann, EntropyKind::renyi(0.5));
    let checks = vec![
        Check::ident(format!("eq27[{vn}]"), 1e-9),
        Check::ident(format!("eq26[{vn}]"), 1e-9),
        Check::ident(format!("eq26[{renyi}]"), 1e-9),
    ];
    run(Suite::Eq27, checks, trials, seed, |rng| {
        let da = 2 + rng.below(2);
        let db = 2 + rng.below(2);
        let n = 1 + rng.below(da);
        let basis = haar_isometry(da, n, rng)?;
        let states = (0..n)
            .map(|_| random_mixed(&[db], rng))
            .collect::<Result<Vec<_>>>()?;
        let probs = random_probs(n, rng);
        let v = generalized_additivity_gap(vn, &probs, &basis, &states)?;
        let r = generalized_additivity_gap(renyi, &probs, &basis, &states)?;
        Ok(vec![v.generalized, v.plain, r.plain])
    })
}

pub const SA_KINDS: [EntropyKind; 5] = [
    EntropyKind::VonNeumann,
    EntropyKind::Quadratic,
    EntropyKind::tsallis(1.5),
    EntropyKind::tsallis(2.0),
    EntropyKind::tsallis(3.0),
];

fn sa(trials: usize, seed: u64, tol: f64) -> Result<Vec<SuiteResult>> {
    let checks = SA_KINDS
        .iter()
        .map(|k| Check::ineq(format!("sa[{k}]"), tol))
        .collect();
    run(Suite::Sa, checks, trials, seed, |rng| {
        let (da, db) = BIPARTITE_DIMS[rng.below(BIPARTITE_DIMS.len())];
        let state = random_mixed(&[da, db], rng)?;
        SA_KINDS
            .iter()
            .map(|&k| mutual_information(k, &state))
            .collect()
    })
}

pub const CONCAVE_KINDS: [EntropyKind; 7] = [
    EntropyKind::VonNeumann,
    EntropyKind::Quadratic,
    EntropyKind::tsallis(0.5),
    EntropyKind::tsallis(1.5),
    EntropyKind::tsallis(2.5),
    EntropyKind::renyi(0.5),
    EntropyKind::renyi(0.9),
];

fn concavity(trials: usize, seed: u64, tol: f64) -> Result<Vec<SuiteResult>> {
    let checks = CONCAVE_KINDS
        .iter()
        .map(|k| Check::ineq(format!("concavity[{k}]"), tol))
        .collect();
    run(Suite::Concavity, checks, trials, seed, |rng| {
        let d = 2 + rng.below(3);
        let p = rng.uniform();
        let r1 = random_mixed(&[d], rng)?;
        let r2 = random_mixed(&[d], rng)?;
        let mix = Ensemble::new(vec![p, 1.0 - p], vec![r1.clone(), r2.clone()])?.average();
        CONCAVE_KINDS
            .iter()
            .map(|&k| Ok(entropy(k, &mix)? - p * entropy(k, &r1)? - (1.0 - p) * entropy(k, &r2)?))
            .collect()
    })
}

fn ssa(trials: usize, seed: u64, tol: f64) -> Result<Vec<SuiteResult>> {
    run(
        Suite::Ssa,
        vec![Check::ineq("ssa", tol)],
        trials,
        seed,
        |rng| Ok(vec![ssa_gap(&random_mixed(&[2, 2, 2], rng)?)?]),
    )
}

const POVM_KINDS: [EntropyKind; 5] = [
    EntropyKind::VonNeumann,
    EntropyKind::Quadratic,
    EntropyKind::tsallis(1.5),
    EntropyKind::tsallis(2.5),
    EntropyKind::renyi(0.5),
];

fn naimark(trials: usize, seed: u64) -> Result<Vec<SuiteResult>> {
    let checks = POVM_KINDS
        .iter()
        .map(|k| Check::ident(format!("naimark[{k}]"), 1e-9))
        .collect();
    run(Suite::Naimark, checks, trials, seed, |rng| {
        let (da, db) = BIPARTITE_DIMS[rng.below(3)];
        let state = random_mixed(&[da, db], rng)?;
        let rank1 = rng.below(2) == 0;
        let n = if rank1 {
            da + rng.below(2)
        } else {
            2 + rng.below(2)
        };
        let povm = random_povm(da, n, rank1, rng)?;
        let ext = naimark_extend(&povm)?;
        let lifted = ext.lift(&state)?;
        POVM_KINDS
            .iter()
            .map(|&k| {
                Ok((holevo_measured(k, &state, &povm)?
                    - holevo_measured(k, &lifted, &ext.projective)?)
                .abs())
            })
            .collect()
    })
}

fn coarse(trials: usize, seed: u64, tol: f64) -> Result<Vec<SuiteResult>> {
    let checks = POVM_KINDS
        .iter()
        .map(|k| Check::ineq(format!("coarse_grain[{k}]"), tol))
        .collect();
    run(Suite::CoarseGrain, checks, trials, seed, |rng| {
        let (da, db) = BIPARTITE_DIMS[rng.below(BIPARTITE_DIMS.len())];
        let state = random_mixed(&[da, db], rng)?;
        let n = 3 + rng.below(3);
        let fine = random_povm(da, n, rng.below(2) == 0, rng)?;
        let blocks = 2 + rng.below(n - 2);
        // every block gets one index, the rest are assigned at random
        let mut partition: Vec<Vec<usize>> = (0..blocks).map(|b| vec![b]).collect();
        for j in blocks..n {
            partition[rng.below(blocks)].push(j);
        }
        let coarse = coarse_grain(&fine, &partition)?;
        POVM_KINDS
            .iter()
            .map(|&k| Ok(holevo_measured(k, &state, &fine)? - holevo_measured(k, &state, &coarse)?))
            .collect()
    })
}

pub fn run_suite(suite: Suite, cfg: &SuiteConfig) -> Result<Vec<SuiteResult>> {
    let trials = cfg.trials.unwrap_or_else(|| suite.default_trials());
    let (seed, tol) = (cfg.seed, cfg.tolerance);
    match suite {
        Suite::Thm2 => thm2(trials, seed, tol),
        Suite::Thm3 => thm3(trials, seed, tol),
        Suite::Lemma4 => lemma4(trials, seed, tol),
        Suite::Eq10 => eq10(trials, seed),
        Suite::Eq25 => eq25(trials, seed),
        Suite::Eq27 => eq27(trials, seed),
        Suite::Sa => sa(trials, seed, tol),
        Suite::Concavity => concavity(trials, seed, tol),
        Suite::Ssa => ssa(trials, seed, tol),
        Suite::Naimark => naimark(trials, seed),
        Suite::CoarseGrain => coarse(trials, seed, tol),
    }
}

pub fn run_suites(suites: &[Suite], cfg: &SuiteConfig) -> Result<SuiteReport> {
    let mut results = Vec::new();
    for &s in suites {
        results.extend(run_suite(s, cfg)?);
    }
    let pass = results.iter().all(|r| r.pass);
    Ok(SuiteReport {
        seed: cfg.seed,
        results,
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_suite_passes_small() {
        let cfg = SuiteConfig {
            trials: Some(12),
            seed: 5,
            ..SuiteConfig::default()
        };
        let report = run_suites(&Suite::ALL, &cfg).unwrap();
        for r in &report.results {
            assert!(r.pass, "{r:?}");
            assert_eq!(r.trials, 12);
        }
        assert!(report.pass);
    }

    #[test]
    fn suites_are_deterministic() {
        let cfg = SuiteConfig {
            trials: Some(6),
            seed: 9,
            ..SuiteConfig::default()
        };
        assert_eq!(
            run_suite(Suite::Thm2, &cfg).unwrap(),
            run_suite(Suite::Thm2, &cfg).unwrap()
        );
    }

    #[test]
    fn names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(s.name().parse::<Suite>().unwrap(), s);
        }
        assert!("thm9".parse::<Suite>().is_err());
    }

    #[test]
    fn zero_trials_do_not_pass() {
        let cfg = SuiteConfig {
            trials: Some(0),
            ..SuiteConfig::default()
        };
        assert!(run_suite(Suite::Eq25, &cfg)
            .unwrap()
            .iter()
            .all(|r| !r.pass));
    }

    #[test]
    fn trial_seeds_differ() {
        let a = trial_seed(0, Suite::Thm2, 0);
        assert_ne!(a, trial_seed(0, Suite::Thm2, 1));
        assert_ne!(a, trial_seed(0, Suite::Thm3, 0));
        assert_ne!(a, trial_seed(1, Suite::Thm2, 0));
    }
}
