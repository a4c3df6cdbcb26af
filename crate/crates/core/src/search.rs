//! Sweeps of the discord over the entropy exponent, and a randomized
//! derivative-free search for states and measurements that violate firm
//! subadditivity (negative discord) or plain subadditivity (negative mutual
//! information).
//!
//! The search runs Nelder–Mead over an unconstrained real parameterization:
//!
//! - the state is `L L† / Tr(L L†)` for a lower-triangular complex `L` with
//!   real diagonal (`d²` reals for total dimension `d`);
//! - the POVM is `T^{-1/2} A_j T^{-1/2}` with Ginibre-style blocks
//!   `A_j = G_j G_j†` whose entries are parameters (`G_j` is a column when
//!   the POVM is rank 1);
//! - when the `q` range is not a single point, one more parameter is mapped
//!   into it through a logistic function.
//!
//! Restarts are independent: restart `i` draws its starting point from
//! `Rng::new(seed + i)`, so results do not depend on thread scheduling.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::entropy::EntropyKind;
use crate::error::{Error, Result};
use crate::infotheory::{discord, mutual_information};
use crate::io;
use crate::linalg::ComplexMatrix;
use crate::states::{povm_from_blocks, DensityMatrix, Povm, Rng};

/// A certificate must be at least this far below zero.
pub const VIOLATION_MARGIN: f64 = 1e-6;

/// Which inequality the search tries to break.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// Minimize the discord `δ_K(P_a, b)`.
    Fsa,
    /// Minimize the mutual information `S_K(a:b)`.
    Sa,
}

/// Entropy family with the exponent left open.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KindFamily {
    VonNeumann,
    Renyi,
    Tsallis,
    Quadratic,
}

impl KindFamily {
    pub fn at(self, q: f64) -> EntropyKind {
        match self {
            KindFamily::VonNeumann => EntropyKind::VonNeumann,
            KindFamily::Renyi => EntropyKind::renyi(q),
            KindFamily::Tsallis => EntropyKind::tsallis(q),
            KindFamily::Quadratic => EntropyKind::Quadratic,
        }
    }

    pub fn has_exponent(self) -> bool {
        matches!(self, KindFamily::Renyi | KindFamily::Tsallis)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub family: KindFamily,
    pub objective: Objective,
    /// `(d_a, d_b)`.
    pub dims: (usize, usize),
    pub povm_outcomes: usize,
    /// Rank-1 POVM blocks; with `povm_outcomes == d_a` this gives a
    /// projective measurement.
    pub povm_rank1: bool,
    /// Inclusive; a single point fixes `q`.
    pub q_range: (f64, f64),
    pub restarts: usize,
    /// Nelder–Mead iterations per restart.
    pub local_steps: usize,
    pub seed: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            family: KindFamily::Tsallis,
            objective: Objective::Fsa,
            dims: (2, 2),
            povm_outcomes: 2,
            povm_rank1: true,
            q_range: (2.5, 2.5),
            restarts: 200,
            local_steps: 2000,
            seed: 0,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        let (da, db) = self.dims;
        if da < 2 || db < 1 {
            return Err(Error::Config(format!(
                "dims {:?}: need d_a >= 2 and d_b >= 1",
                self.dims
            )));
        }
        if self.povm_outcomes < 2 {
            return Err(Error::Config("povm_outcomes must be at least 2".into()));
        }
        if self.povm_rank1 && self.povm_outcomes < da {
            return Err(Error::Config(format!(
                "{} rank-1 elements cannot sum to the identity on dimension {da}",
                self.povm_outcomes
            )));
        }
        if self.restarts == 0 || self.local_steps == 0 {
            return Err(Error::Config(
                "restarts and local_steps must be at least 1".into(),
            ));
        }
        let (lo, hi) = self.q_range;
        if self.family.has_exponent() {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(Error::Config(format!("bad q range ({lo}, {hi})")));
            }
            self.family
                .at(lo)
                .validate()
                .map_err(|e| Error::Config(e.to_string()))?;
            self.family
                .at(hi)
                .validate()
                .map_err(|e| Error::Config(e.to_string()))?;
        }
        Ok(())
    }

    fn varies_q(&self) -> bool {
        self.family.has_exponent() && self.q_range.0 < self.q_range.1
    }

    fn total_dim(&self) -> usize {
        self.dims.0 * self.dims.1
    }

    fn block_cols(&self) -> usize {
        if self.povm_rank1 {
            1
        } else {
            self.dims.0
        }
    }

    fn state_params(&self) -> usize {
        self.total_dim().pow(2)
    }

    fn povm_params(&self) -> usize {
        match self.objective {
            Objective::Fsa => 2 * self.povm_outcomes * self.dims.0 * self.block_cols(),
            Objective::Sa => 0,
        }
    }

    pub fn parameter_count(&self) -> usize {
        self.state_params() + self.povm_params() + usize::from(self.varies_q())
    }
}

/// A decoded point of the search space.
#[derive(Clone, Debug)]
pub struct Candidate {
    pub state: DensityMatrix,
    pub povm: Option<Povm>,
    pub q: f64,
}

fn decode_state(cfg: &SearchConfig, x: &[f64]) -> Result<DensityMatrix> {
    let d = cfg.total_dim();
    let mut l = ComplexMatrix::zeros(d, d);
    let mut k = 0;
    for i in 0..d {
        l[(i, i)] = Complex64::new(x[k], 0.0);
        k += 1;
        for j in 0..i {
            l[(i, j)] = Complex64::new(x[k], x[k + 1]);
            k += 2;
        }
    }
    DensityMatrix::from_unnormalized(vec![cfg.dims.0, cfg.dims.1], &(&l * &l.adjoint()))
}

fn decode_povm(cfg: &SearchConfig, x: &[f64]) -> Result<Povm> {
    let da = cfg.dims.0;
    let cols = cfg.block_cols();
    let per = 2 * da * cols;
    let blocks: Vec<ComplexMatrix> = x
        .chunks_exact(per)
        .map(|c| {
            let g = ComplexMatrix::from_fn(da, cols, |i, j| {
                let k = 2 * (i * cols + j);
                Complex64::new(c[k], c[k + 1])
            });
            &g * &g.adjoint()
        })
        .collect();
    povm_from_blocks(&blocks)
}

fn decode_q(cfg: &SearchConfig, x: Option<&f64>) -> f64 {
    let (lo, hi) = cfg.q_range;
    match x {
        Some(&t) if cfg.varies_q() => lo + (hi - lo) / (1.0 + (-t).exp()),
        _ => lo,
    }
}

/// Maps a parameter vector to a validated state, POVM and exponent.
pub fn decode(cfg: &SearchConfig, x: &[f64]) -> Result<Candidate> {
    if x.len() != cfg.parameter_count() {
        return Err(Error::Config(format!(
            "expected {} parameters, got {}",
            cfg.parameter_count(),
            x.len()
        )));
    }
    let (sp, pp) = (cfg.state_params(), cfg.povm_params());
    let state = decode_state(cfg, &x[..sp])?;
    let povm = match cfg.objective {
        Objective::Fsa => Some(decode_povm(cfg, &x[sp..sp + pp])?),
        Objective::Sa => None,
    };
    let q = decode_q(cfg, x.get(sp + pp));
    Ok(Candidate { state, povm, q })
}

fn evaluate(
    objective: Objective,
    kind: EntropyKind,
    state: &DensityMatrix,
    povm: Option<&Povm>,
) -> Result<f64> {
    match (objective, povm) {
        (Objective::Fsa, Some(p)) => discord(kind, state, p),
        (Objective::Fsa, None) => Err(Error::Config("FSA objective needs a POVM".into())),
        (Objective::Sa, _) => mutual_information(kind, state),
    }
}

fn objective_value(cfg: &SearchConfig, x: &[f64]) -> f64 {
    decode(cfg, x)
        .and_then(|c| evaluate(cfg.objective, cfg.family.at(c.q), &c.state, c.povm.as_ref()))
        .ok()
        .filter(|v| v.is_finite())
        .unwrap_or(f64::INFINITY)
}

/// Nelder–Mead coefficients.
#[derive(Clone, Copy, Debug)]
pub struct NelderMead {
    pub reflection: f64,
    pub expansion: f64,
    pub contraction: f64,
    pub shrink: f64,
    /// Edge length of the initial simplex.
    pub initial_step: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self {
            reflection: 1.0,
            expansion: 2.0,
            contraction: 0.5,
            shrink: 0.5,
            initial_step: 0.25,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Minimum {
    pub x: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evaluations: usize,
}

impl NelderMead {
    /// Minimizes `f` from `x0` for at most `max_iter` iterations. Stops early
    /// once the simplex has collapsed in both position and value.
    pub fn minimize(&self, f: impl Fn(&[f64]) -> f64, x0: &[f64], max_iter: usize) -> Minimum {
        let n = x0.len();
        let mut evaluations = 0;
        let mut eval = |x: &[f64]| {
            evaluations += 1;
            f(x)
        };
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
        simplex.push((x0.to_vec(), eval(x0)));
        for i in 0..n {
            let mut x = x0.to_vec();
            x[i] += self.initial_step;
            let v = eval(&x);
            simplex.push((x, v));
        }

        let mut iterations = 0;
        while iterations < max_iter {
            iterations += 1;
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let (best, worst) = (simplex[0].1, simplex[n].1);
            let spread = simplex
                .iter()
                .skip(1)
                .flat_map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()))
                .fold(0.0, f64::max);
            if (worst - best).abs() <= 1e-15 * (1.0 + best.abs()) && spread <= 1e-10 {
                break;
            }

            let mut centroid = vec![0.0; n];
            for (x, _) in &simplex[..n] {
                for (c, xi) in centroid.iter_mut().zip(x) {
                    *c += xi / n as f64;
                }
            }
            let along = |t: f64, from: &[f64]| -> Vec<f64> {
                centroid
                    .iter()
                    .zip(from)
                    .map(|(c, w)| c + t * (c - w))
                    .collect()
            };

            let worst_x = simplex[n].0.clone();
            let xr = along(self.reflection, &worst_x);
            let fr = eval(&xr);
            if fr < best {
                let xe = along(self.reflection * self.expansion, &worst_x);
                let fe = eval(&xe);
                simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
                continue;
            }
            if fr < simplex[n - 1].1 {
                simplex[n] = (xr, fr);
                continue;
            }
            let (xc, fc) = if fr < worst {
                let xc = along(self.reflection * self.contraction, &worst_x);
                let fc = eval(&xc);
                (xc, fc)
            } else {
                let xc = along(-self.contraction, &worst_x);
                let fc = eval(&xc);
                (xc, fc)
            };
            if fc < fr.min(worst) {
                simplex[n] = (xc, fc);
                continue;
            }
            let anchor = simplex[0].0.clone();
            for (x, v) in simplex.iter_mut().skip(1) {
                for (xi, a) in x.iter_mut().zip(&anchor) {
                    *xi = a + self.shrink * (*xi - a);
                }
                *v = eval(x);
            }
        }
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (x, value) = simplex.swap_remove(0);
        Minimum {
            x,
            value,
            iterations,
            evaluations,
        }
    }
}

/// Result of one restart.
#[derive(Clone, Debug)]
pub struct RestartResult {
    pub index: usize,
    pub value: f64,
    pub x: Vec<f64>,
    pub evaluations: usize,
}

/// Everything a search run produced, certified or not.
#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub config: SearchConfig,
    /// Objective value of each restart, in restart order.
    pub restart_values: Vec<f64>,
    /// Running minimum over `restart_values`.
    pub best_so_far: Vec<f64>,
    pub best_restart: usize,
    /// Objective at the best point, re-evaluated on the validated candidate.
    pub best_value: f64,
    pub best: Candidate,
    pub evaluations: usize,
    pub wall_time: Duration,
}

fn run_restart(cfg: &SearchConfig, index: usize, nm: &NelderMead) -> RestartResult {
    let mut rng = Rng::new(cfg.seed.wrapping_add(index as u64));
    let x0: Vec<f64> = (0..cfg.parameter_count()).map(|_| rng.normal()).collect();
    let m = nm.minimize(|x| objective_value(cfg, x), &x0, cfg.local_steps);
    RestartResult {
        index,
        value: m.value,
        x: m.x,
        evaluations: m.evaluations,
    }
}

/// Runs every restart and keeps the lowest objective (ties go to the lower
/// restart index).
pub fn search(cfg: &SearchConfig) -> Result<SearchOutcome> {
    cfg.validate()?;
    let start = Instant::now();
    let nm = NelderMead::default();
    let results: Vec<RestartResult> = (0..cfg.restarts)
        .into_par_iter()
        .map(|i| run_restart(cfg, i, &nm))
        .collect();

    let mut best_idx = 0;
    let mut best_so_far = Vec::with_capacity(results.len());
    for (i, r) in results.iter().enumerate() {
        if r.value < results[best_idx].value {
            best_idx = i;
        }
        best_so_far.push(results[best_idx].value);
    }
    let best_point = &results[best_idx];
    let best = certify(cfg, &best_point.x)?;
    let best_value = evaluate(
        cfg.objective,
        cfg.family.at(best.q),
        &best.state,
        best.povm.as_ref(),
    )?;
    Ok(SearchOutcome {
        config: cfg.clone(),
        restart_values: results.iter().map(|r| r.value).collect(),
        best_so_far,
        best_restart: best_idx,
        best_value,
        best,
        evaluations: results.iter().map(|r| r.evaluations).sum(),
        wall_time: start.elapsed(),
    })
}

/// Decodes and fully re-validates a point: the state goes through every
/// density-matrix check and the POVM through every POVM check.
fn certify(cfg: &SearchConfig, x: &[f64]) -> Result<Candidate> {
    let c = decode(cfg, x)?;
    let state = DensityMatrix::new(c.state.dims().to_vec(), c.state.matrix().clone())?;
    let povm = match c.povm {
        Some(p) => {
            let p = Povm::new(p.elements().to_vec())?;
            if cfg.povm_rank1 {
                if let Some(j) = p.first_non_rank1(1e-9)? {
                    return Err(Error::NotRank1(j));
                }
            }
            Some(p)
        }
        None => None,
    };
    Ok(Candidate {
        state,
        povm,
        q: c.q,
    })
}

/// A reproducible witness of a negative discord (or mutual information).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ViolationCertificate {
    pub objective: Objective,
    pub kind: EntropyKind,
    pub q: f64,
    pub rho_ab: DensityMatrix,
    /// Absent for the subadditivity objective.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub povm: Option<Povm>,
    /// Discord for [`Objective::Fsa`]; the mutual information for [`Objective::Sa`].
    pub discord_value: f64,
    pub seed: u64,
    pub restart: usize,
    pub restarts: usize,
    pub local_steps: usize,
    /// Not serialized, so identical configurations give identical bytes.
    #[serde(skip)]
    pub wall_time: Duration,
}

impl ViolationCertificate {
    /// Recomputes the objective from the stored state and POVM.
    pub fn reevaluate(&self) -> Result<f64> {
        evaluate(self.objective, self.kind, &self.rho_ab, self.povm.as_ref())
    }

    pub fn to_json(&self) -> String {
        io::to_pretty_json(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

impl SearchOutcome {
    /// A certificate when the best value is below `-VIOLATION_MARGIN`.
    pub fn certificate(&self) -> Option<ViolationCertificate> {
        (self.best_value < -VIOLATION_MARGIN).then(|| ViolationCertificate {
            objective: self.config.objective,
            kind: self.config.family.at(self.best.q),
            q: self.best.q,
            rho_ab: self.best.state.clone(),
            povm: self.best.povm.clone(),
            discord_value: self.best_value,
            seed: self.config.seed,
            restart: self.best_restart,
            restarts: self.config.restarts,
            local_steps: self.config.local_steps,
            wall_time: self.wall_time,
        })
    }
}

/// Best certificate found within the budget, or `None`.
pub fn find_violation(cfg: &SearchConfig) -> Result<Option<ViolationCertificate>> {
    Ok(search(cfg)?.certificate())
}

/// Discord as a function of the Tsallis exponent for a fixed instance.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SweepResult {
    pub q_grid: Vec<f64>,
    pub discord_values: Vec<f64>,
    pub state: DensityMatrix,
    pub povm: Povm,
}

impl SweepResult {
    pub fn to_csv(&self) -> String {
        io::sweep_csv(&self.q_grid, &self.discord_values)
    }

    /// Grid points with discord below `-threshold`.
    pub fn negative_points(&self, threshold: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.q_grid
            .iter()
            .zip(&self.discord_values)
            .filter(move |(_, d)| **d < -threshold)
            .map(|(q, d)| (*q, *d))
    }

    /// Discord at the grid point closest to `q`.
    pub fn value_near(&self, q: f64) -> Option<f64> {
        self.q_grid
            .iter()
            .zip(&self.discord_values)
            .min_by(|a, b| (a.0 - q).abs().total_cmp(&(b.0 - q).abs()))
            .map(|(_, d)| *d)
    }
}

/// `δ_T(P_a, b)` at each `q`; `q = 1` uses the von Neumann limit.
pub fn sweep_q(rho_ab: &DensityMatrix, povm: &Povm, q_grid: &[f64]) -> Result<SweepResult> {
    if q_grid.is_empty() {
        return Err(Error::Config("empty q grid".into()));
    }
    if q_grid.iter().any(|q| !(*q > 0.0 && q.is_finite())) {
        return Err(Error::Config("q grid must lie in (0, inf)".into()));
    }
    if q_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config("q grid must be strictly increasing".into()));
    }
    let discord_values = q_grid
        .iter()
        .map(|&q| discord(EntropyKind::tsallis(q), rho_ab, povm))
        .collect::<Result<Vec<_>>>()?;
    if let Some(i) = discord_values.iter().position(|v| !v.is_finite()) {
        return Err(Error::Config(format!(
            "non-finite discord at q = {}",
            q_grid[i]
        )));
    }
    Ok(SweepResult {
        q_grid: q_grid.to_vec(),
        discord_values,
        state: rho_ab.clone(),
        povm: povm.clone(),
    })
}

/// `steps` evenly spaced points from `from` to `to` inclusive; one step gives `[from]`.
pub fn linspace(from: f64, to: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![from],
        _ => (0..steps)
            .map(|i| from + (to - from) * i as f64 / (steps - 1) as f64)
            .collect(),
    }
}

/// What a window scan found at one `q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Finding {
    ViolationFound,
    /// Nothing below the margin at this budget; says nothing about existence.
    NoneFoundAtBudget,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WindowEntry {
    pub q: f64,
    pub best_value: f64,
    pub finding: Finding,
    pub restarts: usize,
    pub local_steps: usize,
}

/// Runs the search at each fixed `q` of the grid using `cfg`'s budget.
pub fn scan_window(
    family: KindFamily,
    q_grid: &[f64],
    cfg: &SearchConfig,
) -> Result<Vec<WindowEntry>> {
    q_grid
        .iter()
        .map(|&q| {
            let point = SearchConfig {
                family,
                q_range: (q, q),
                ..cfg.clone()
            };
            let out = search(&point)?;
            let finding = if out.certificate().is_some() {
                Finding::ViolationFound
            } else {
                Finding::NoneFoundAtBudget
            };
            Ok(WindowEntry {
                q,
                best_value: out.best_value,
                finding,
                restarts: point.restarts,
                local_steps: point.local_steps,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::named;

    #[test]
    fn nelder_mead_finds_quadratic_minimum() {
        let f = |x: &[f64]| (x[0] - 1.0).powi(2) + 10.0 * (x[1] + 2.0).powi(2);
        let m = NelderMead::default().minimize(f, &[0.0, 0.0], 2000);
        assert!((m.x[0] - 1.0).abs() < 1e-6 && (m.x[1] + 2.0).abs() < 1e-6);
        assert!(m.iterations < 2000, "converged early");
    }

    #[test]
    fn nelder_mead_rosenbrock() {
        let f = |x: &[f64]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2);
        let m = NelderMead::default().minimize(f, &[-1.2, 1.0], 5000);
        assert!(m.value < 1e-10, "{}", m.value);
    }

    #[test]
    fn parameterization_sizes() {
        let cfg = SearchConfig::default();
        assert_eq!(cfg.parameter_count(), 16 + 2 * 2 * 2);
        let cfg = SearchConfig {
            q_range: (2.0, 3.0),
            ..SearchConfig::default()
        };
        assert_eq!(cfg.parameter_count(), 16 + 8 + 1);
        let cfg = SearchConfig {
            objective: Objective::Sa,
            ..SearchConfig::default()
        };
        assert_eq!(cfg.parameter_count(), 16);
    }

    #[test]
    fn decoded_points_are_valid() {
        let cfg = SearchConfig {
            q_range: (2.0, 3.0),
            ..SearchConfig::default()
        };
        let mut rng = Rng::new(3);
        for _ in 0..50 {
            let x: Vec<f64> = (0..cfg.parameter_count())
                .map(|_| 3.0 * rng.normal())
                .collect();
            let c = certify(&cfg, &x).unwrap();
            assert!(c.q > 2.0 && c.q < 3.0);
            assert!(c.povm.unwrap().is_projective(1e-9));
        }
    }

    #[test]
    fn config_validation() {
        let ok = SearchConfig::default();
        assert!(ok.validate().is_ok());
        for bad in [
            SearchConfig {
                restarts: 0,
                ..ok.clone()
            },
            SearchConfig {
                q_range: (3.0, 2.0),
                ..ok.clone()
            },
            SearchConfig {
                q_range: (-1.0, 2.0),
                ..ok.clone()
            },
            SearchConfig {
                family: KindFamily::Renyi,
                q_range: (1.5, 1.5),
                ..ok.clone()
            },
            SearchConfig {
                povm_outcomes: 1,
                ..ok.clone()
            },
            SearchConfig {
                dims: (3, 2),
                povm_outcomes: 2,
                ..ok.clone()
            },
        ] {
            assert!(matches!(bad.validate(), Err(Error::Config(_))), "{bad:?}");
        }
    }

    #[test]
    fn sweep_examples() {
        let grid = linspace(0.5, 4.0, 36);
        let zero = sweep_q(&named::classical(), &Povm::computational(2), &grid).unwrap();
        assert!(zero.discord_values.iter().all(|d| d.abs() < 1e-12));

        let bell = sweep_q(&named::bell(), &Povm::qubit_x(), &linspace(1.0, 3.0, 21)).unwrap();
        for (q, d) in bell.q_grid.iter().zip(&bell.discord_values) {
            // Oracle: for the Bell state, S_T(a:b) = 2 S_T(I/2), χ = S_T(I/2).
            let s_half = if (q - 1.0).abs() < 1e-6 {
                std::f64::consts::LN_2
            } else {
                (2.0 * 0.5f64.powf(*q) - 1.0) / (1.0 - q)
            };
            assert!((d - s_half).abs() < 1e-12 && *d > 0.0, "q={q}");
        }

        let single = sweep_q(&named::bell(), &Povm::qubit_x(), &linspace(1.5, 4.0, 1)).unwrap();
        assert_eq!(single.q_grid, vec![1.5]);
        assert!(sweep_q(&named::bell(), &Povm::qubit_x(), &[2.0, 1.0]).is_err());
        assert!(sweep_q(&named::bell(), &Povm::qubit_x(), &[0.0, 1.0]).is_err());
    }

    #[test]
    fn small_search_is_deterministic_and_monotone() {
        let cfg = SearchConfig {
            restarts: 6,
            local_steps: 300,
            seed: 17,
            ..SearchConfig::default()
        };
        let a = search(&cfg).unwrap();
        let b = search(&cfg).unwrap();
        assert_eq!(a.restart_values, b.restart_values);
        assert_eq!(a.best_restart, b.best_restart);
        assert!(a.best_so_far.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(
            *a.best_so_far.last().unwrap(),
            a.restart_values[a.best_restart]
        );
    }

    #[test]
    fn quadratic_search_stays_non_negative() {
        let cfg = SearchConfig {
            family: KindFamily::Quadratic,
            restarts: 8,
            local_steps: 800,
            ..SearchConfig::default()
        };
        let out = search(&cfg).unwrap();
        assert!(out.best_value >= -1e-9, "{}", out.best_value);
        assert!(out.certificate().is_none());
    }
}
