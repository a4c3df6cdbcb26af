//! Mutual information, Holevo quantities, conditional entropies and the
//! generalized discord `δ_K(P_a,b) = S_K(a:b) − χ_K(P_a,b)`, together with
//! evaluators for the inequalities that relate them.
//!
//! Every composite state is indexed `a, b, (c)`; POVMs always act on the
//! first subsystem.

use serde::{Deserialize, Serialize};

use crate::entropy::{entropy, hs_distance, EntropyKind};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::states::{
    measure_ensemble, measure_joint, measure_local, purify, DensityMatrix, Ensemble, KrausChannel,
    Povm,
};

/// Slack used for inequality checks throughout.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

/// Eigenvalue threshold for "rank 1" and "pure" checks.
const RANK_TOL: f64 = 1e-9;

/// Outcome of checking one inequality `lhs ≤ rhs`.
///
/// `gap = rhs − lhs`, so a non-negative gap means the condition holds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub label: String,
    pub lhs: f64,
    pub rhs: f64,
    pub gap: f64,
    pub holds: bool,
    pub tolerance: f64,
}

impl ConditionReport {
    pub fn new(label: impl Into<String>, lhs: f64, rhs: f64, tolerance: f64) -> Self {
        let gap = rhs - lhs;
        Self {
            label: label.into(),
            lhs,
            rhs,
            gap,
            holds: gap >= -tolerance,
            tolerance,
        }
    }
}

fn require_bipartite(rho: &DensityMatrix) -> Result<(usize, usize)> {
    match rho.dims() {
        [a, b] => Ok((*a, *b)),
        d => Err(Error::dims(format!(
            "expected a bipartite state, got dims {d:?}"
        ))),
    }
}

fn require_tripartite(rho: &DensityMatrix) -> Result<(usize, usize, usize)> {
    match rho.dims() {
        [a, b, c] => Ok((*a, *b, *c)),
        d => Err(Error::dims(format!(
            "expected a tripartite state, got dims {d:?}"
        ))),
    }
}

/// `S_K(a:b) = S_K(ρ_a) + S_K(ρ_b) − S_K(ρ_ab)`. Never clamped: non-subadditive
/// kinds can return negative values.
pub fn mutual_information(kind: EntropyKind, rho_ab: &DensityMatrix) -> Result<f64> {
    require_bipartite(rho_ab)?;
    let sa = entropy(kind, &rho_ab.reduce(&[0])?)?;
    let sb = entropy(kind, &rho_ab.reduce(&[1])?)?;
    Ok(sa + sb - entropy(kind, rho_ab)?)
}

/// `χ_K({p_j, ρ_j}) = S_K(Σ p_j ρ_j) − Σ p_j S_K(ρ_j)`.
pub fn holevo(kind: EntropyKind, ens: &Ensemble) -> Result<f64> {
    let mut avg = 0.0;
    for (p, s) in ens.probs().iter().zip(ens.states()) {
        avg += p * entropy(kind, s)?;
    }
    Ok(entropy(kind, &ens.average())? - avg)
}

/// `Σ_{j<j'} p_j p_j' D_HS(ρ_j, ρ_j')`, which equals the quadratic Holevo quantity.
pub fn holevo_quadratic_pairwise(ens: &Ensemble) -> Result<f64> {
    let (p, s) = (ens.probs(), ens.states());
    let mut total = 0.0;
    for j in 0..p.len() {
        for k in j + 1..p.len() {
            total += p[j] * p[k] * hs_distance(&s[j], &s[k])?;
        }
    }
    Ok(total)
}

/// Measures subsystem 0 and keeps the listed subsystems of what remains
/// (indices relative to the unmeasured factors).
fn measured_ensemble_on(
    rho: &DensityMatrix,
    povm: &Povm,
    keep: Option<&[usize]>,
) -> Result<Ensemble> {
    let ens = measure_ensemble(rho, povm)?;
    match keep {
        None => Ok(ens),
        Some(keep) => {
            let states = ens
                .states()
                .iter()
                .map(|s| s.reduce(keep))
                .collect::<Result<Vec<_>>>()?;
            Ok(Ensemble::from_trusted(ens.probs().to_vec(), states))
        }
    }
}

/// `χ_K(P_a, b)`: Holevo quantity of the ensemble `P_a` induces on everything
/// except `a`.
pub fn holevo_measured(kind: EntropyKind, rho_ab: &DensityMatrix, povm: &Povm) -> Result<f64> {
    holevo(kind, &measure_ensemble(rho_ab, povm)?)
}

/// Which conditional entropy to evaluate after measuring `a`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConditionalTarget {
    /// `S_K(ρ_b|P_a) = Σ p_j S_K(ρ_bj)`.
    B,
    /// `S_K(ρ_a|P_a) = Σ p_j S_K(K_j ρ_a K_j†/p_j)`.
    A,
    /// `S_K(a:b|P_a) = Σ p_j [S_K(ρ_aj) + S_K(ρ_bj) − S_K(ρ_abj)]`.
    Joint,
}

pub fn conditional_entropy(
    kind: EntropyKind,
    rho_ab: &DensityMatrix,
    povm: &Povm,
    target: ConditionalTarget,
) -> Result<f64> {
    require_bipartite(rho_ab)?;
    let weighted = |ens: &Ensemble, f: &dyn Fn(&DensityMatrix) -> Result<f64>| -> Result<f64> {
        let mut total = 0.0;
        for (p, s) in ens.probs().iter().zip(ens.states()) {
            total += p * f(s)?;
        }
        Ok(total)
    };
    match target {
        ConditionalTarget::B => weighted(&measure_ensemble(rho_ab, povm)?, &|s| entropy(kind, s)),
        ConditionalTarget::A => {
            let rho_a = rho_ab.reduce(&[0])?;
            weighted(&measure_local(&rho_a, povm)?, &|s| entropy(kind, s))
        }
        ConditionalTarget::Joint => weighted(&measure_joint(rho_ab, povm)?, &|s| {
            mutual_information(kind, s)
        }),
    }
}

/// Components of a discord evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiscordBreakdown {
    pub mutual_information: f64,
    pub holevo_measured: f64,
    pub discord: f64,
}

pub fn discord_breakdown(
    kind: EntropyKind,
    rho_ab: &DensityMatrix,
    povm: &Povm,
) -> Result<DiscordBreakdown> {
    let mi = mutual_information(kind, rho_ab)?;
    let chi = holevo_measured(kind, rho_ab, povm)?;
    Ok(DiscordBreakdown {
        mutual_information: mi,
        holevo_measured: chi,
        discord: mi - chi,
    })
}

/// `δ_K(P_a, b)`, not minimized over measurements; its sign is unconstrained
/// for kinds that are not firmly subadditive.
pub fn discord(kind: EntropyKind, rho_ab: &DensityMatrix, povm: &Povm) -> Result<f64> {
    Ok(discord_breakdown(kind, rho_ab, povm)?.discord)
}

fn require_rank1(povm: &Povm) -> Result<()> {
    match povm.first_non_rank1(RANK_TOL)? {
        Some(j) => Err(Error::NotRank1(j)),
        None => Ok(()),
    }
}

/// `|δ_K(N_a, c) − [S_K(ρ_a) − χ_K(N_a, b)]|` with `c` purifying `ρ_ab`.
///
/// The left side is computed on `ρ_ac` of the purification, the right side
/// on `ρ_ab` directly.
pub fn discord_identity_gap(
    kind: EntropyKind,
    rho_ab: &DensityMatrix,
    rank1_povm: &Povm,
) -> Result<f64> {
    require_bipartite(rho_ab)?;
    require_rank1(rank1_povm)?;
    let abc = purify(rho_ab)?;
    let rho_ac = abc.reduce(&[0, 2])?;
    let lhs = discord(kind, &rho_ac, rank1_povm)?;
    let rhs = entropy(kind, &rho_ab.reduce(&[0])?)? - holevo_measured(kind, rho_ab, rank1_povm)?;
    Ok((lhs - rhs).abs())
}

/// `S(a:bc) − S(a:b)` for the von Neumann entropy.
pub fn ssa_gap(rho_abc: &DensityMatrix) -> Result<f64> {
    let (a, b, c) = require_tripartite(rho_abc)?;
    let grouped = rho_abc.with_dims(vec![a, b * c])?;
    let ab = rho_abc.reduce(&[0, 1])?;
    Ok(mutual_information(EntropyKind::VonNeumann, &grouped)?
        - mutual_information(EntropyKind::VonNeumann, &ab)?)
}

/// `Σ_j p_j |w_j⟩⟨w_j| ⊗ ρ_bj` for orthonormal columns `w_j` of `basis`.
pub fn classical_quantum_state(
    probs: &[f64],
    basis: &ComplexMatrix,
    states_b: &[DensityMatrix],
) -> Result<DensityMatrix> {
    if probs.len() != states_b.len() || probs.len() > basis.cols() {
        return Err(Error::dims(format!(
            "{} probabilities, {} conditional states, {} basis vectors",
            probs.len(),
            states_b.len(),
            basis.cols()
        )));
    }
    let gram = &basis.adjoint() * basis;
    let dev = gram.max_abs_diff(&ComplexMatrix::identity(basis.cols()));
    if dev > RANK_TOL {
        return Err(Error::NotOrthonormal(dev));
    }
    let db = states_b
        .first()
        .map(|s| s.dim())
        .ok_or_else(|| Error::dims("no conditional states"))?;
    if states_b.iter().any(|s| s.dim() != db) {
        return Err(Error::dims("conditional states differ in dimension"));
    }
    let da = basis.rows();
    let mut m = ComplexMatrix::zeros(da * db, da * db);
    for (j, (p, s)) in probs.iter().zip(states_b).enumerate() {
        let proj = ComplexMatrix::outer(&basis.column(j));
        m = &m + &proj.kron(s.matrix()).scale_real(*p);
    }
    DensityMatrix::new(vec![da, db], m)
}

/// Gaps of the two additivity conditions.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdditivityGaps {
    /// `|S_K(Σ p_j |w_j⟩⟨w_j| ⊗ ρ_bj) − S_K(ρ_a) − Σ p_j S_K(ρ_bj)|`.
    pub generalized: f64,
    /// `|S_K(ρ_a ⊗ ρ_b) − S_K(ρ_a) − S_K(ρ_b)|` with `ρ_b = Σ p_j ρ_bj`.
    pub plain: f64,
}

/// `|S_K(ρ_a ⊗ ρ_b) − S_K(ρ_a) − S_K(ρ_b)|`.
pub fn additivity_gap(
    kind: EntropyKind,
    rho_a: &DensityMatrix,
    rho_b: &DensityMatrix,
) -> Result<f64> {
    let joint = entropy(kind, &rho_a.tensor(rho_b))?;
    Ok((joint - entropy(kind, rho_a)? - entropy(kind, rho_b)?).abs())
}

pub fn generalized_additivity_gap(
    kind: EntropyKind,
    probs: &[f64],
    basis: &ComplexMatrix,
    states_b: &[DensityMatrix],
) -> Result<AdditivityGaps> {
    let cq = classical_quantum_state(probs, basis, states_b)?;
    let rho_a = cq.reduce(&[0])?;
    let mut rhs = entropy(kind, &rho_a)?;
    for (p, s) in probs.iter().zip(states_b) {
        rhs += p * entropy(kind, s)?;
    }
    let generalized = (entropy(kind, &cq)? - rhs).abs();
    let plain = additivity_gap(kind, &rho_a, &cq.reduce(&[1])?)?;
    Ok(AdditivityGaps { generalized, plain })
}

/// A bipartite state and a POVM on its first factor.
#[derive(Clone, Debug)]
pub struct BipartiteInstance {
    pub state: DensityMatrix,
    pub povm: Povm,
}

impl BipartiteInstance {
    pub fn new(state: DensityMatrix, povm: Povm) -> Result<Self> {
        let (a, _) = require_bipartite(&state)?;
        if povm.dim() != a {
            return Err(Error::dims(format!(
                "POVM dim {} vs subsystem a dim {a}",
                povm.dim()
            )));
        }
        Ok(Self { state, povm })
    }
}

/// A pure tripartite state with a rank-1 POVM on `a`.
#[derive(Clone, Debug)]
pub struct PureTripartiteInstance {
    state: DensityMatrix,
    povm: Povm,
}

impl PureTripartiteInstance {
    pub fn new(state: DensityMatrix, povm: Povm) -> Result<Self> {
        let (a, _, _) = require_tripartite(&state)?;
        if !state.is_pure(RANK_TOL) {
            return Err(Error::NotPure(state.purity()));
        }
        if povm.dim() != a {
            return Err(Error::dims(format!(
                "POVM dim {} vs subsystem a dim {a}",
                povm.dim()
            )));
        }
        require_rank1(&povm)?;
        Ok(Self { state, povm })
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    pub fn povm(&self) -> &Povm {
        &self.povm
    }
}

/// A mixed tripartite state with any POVM on `a`.
#[derive(Clone, Debug)]
pub struct TripartiteInstance {
    pub state: DensityMatrix,
    pub povm: Povm,
}

impl TripartiteInstance {
    pub fn new(state: DensityMatrix, povm: Povm) -> Result<Self> {
        let (a, _, _) = require_tripartite(&state)?;
        if povm.dim() != a {
            return Err(Error::dims(format!(
                "POVM dim {} vs subsystem a dim {a}",
                povm.dim()
            )));
        }
        Ok(Self { state, povm })
    }
}

/// An ensemble fed through a channel.
#[derive(Clone, Debug)]
pub struct EnsembleChannelInstance {
    ensemble: Ensemble,
    channel: KrausChannel,
}

impl EnsembleChannelInstance {
    pub fn new(ensemble: Ensemble, channel: KrausChannel) -> Result<Self> {
        if ensemble.states()[0].dim() != channel.d_in() {
            return Err(Error::dims(format!(
                "ensemble dim {} vs channel input {}",
                ensemble.states()[0].dim(),
                channel.d_in()
            )));
        }
        Ok(Self { ensemble, channel })
    }

    /// Same, but every member must be pure.
    pub fn new_pure(ensemble: Ensemble, channel: KrausChannel) -> Result<Self> {
        if let Some(s) = ensemble.states().iter().find(|s| !s.is_pure(RANK_TOL)) {
            return Err(Error::NotPure(s.purity()));
        }
        Self::new(ensemble, channel)
    }

    pub fn ensemble(&self) -> &Ensemble {
        &self.ensemble
    }

    pub fn channel(&self) -> &KrausChannel {
        &self.channel
    }
}

/// The four equivalent statements of firm subadditivity, each with the
/// instance shape it needs.
#[derive(Clone, Debug)]
pub enum FsaInstance {
    /// `χ_K(P_a,b) ≤ S_K(a:b)`.
    I(BipartiteInstance),
    /// `χ_K(P_a,b) ≤ S_K(ρ_a)`.
    II(BipartiteInstance),
    /// `χ_K(N_a,b) ≤ χ_K(N_a,bc)` on a pure tripartite state.
    III(PureTripartiteInstance),
    /// `χ_K({p_j, ℰ(ψ_j)}) ≤ χ_K({p_j, ψ_j})`; construct with
    /// [`EnsembleChannelInstance::new_pure`].
    IV(EnsembleChannelInstance),
}

pub fn fsa_condition(
    kind: EntropyKind,
    instance: &FsaInstance,
    tolerance: f64,
) -> Result<ConditionReport> {
    match instance {
        FsaInstance::I(inst) => {
            let chi = holevo_measured(kind, &inst.state, &inst.povm)?;
            let mi = mutual_information(kind, &inst.state)?;
            Ok(ConditionReport::new("Thm2.i", chi, mi, tolerance))
        }
        FsaInstance::II(inst) => {
            let chi = holevo_measured(kind, &inst.state, &inst.povm)?;
            let sa = entropy(kind, &inst.state.reduce(&[0])?)?;
            Ok(ConditionReport::new("Thm2.ii", chi, sa, tolerance))
        }
        FsaInstance::III(inst) => {
            let (lhs, rhs) = tripartite_holevo_pair(kind, &inst.state, &inst.povm)?;
            Ok(ConditionReport::new("Thm2.iii", lhs, rhs, tolerance))
        }
        FsaInstance::IV(inst) => {
            if let Some(s) = inst.ensemble.states().iter().find(|s| !s.is_pure(RANK_TOL)) {
                return Err(Error::NotPure(s.purity()));
            }
            let (lhs, rhs) = channel_holevo_pair(kind, inst)?;
            Ok(ConditionReport::new("Thm2.iv", lhs, rhs, tolerance))
        }
    }
}

/// `(χ_K(P_a, b), χ_K(P_a, bc))`.
fn tripartite_holevo_pair(
    kind: EntropyKind,
    abc: &DensityMatrix,
    povm: &Povm,
) -> Result<(f64, f64)> {
    let to_b = holevo(kind, &measured_ensemble_on(abc, povm, Some(&[0]))?)?;
    let to_bc = holevo(kind, &measured_ensemble_on(abc, povm, None)?)?;
    Ok((to_b, to_bc))
}

fn channel_holevo_pair(kind: EntropyKind, inst: &EnsembleChannelInstance) -> Result<(f64, f64)> {
    let out = holevo(kind, &inst.ensemble.map_channel(&inst.channel)?)?;
    let input = holevo(kind, &inst.ensemble)?;
    Ok((out, input))
}

/// The strengthened von Neumann conditions.
#[derive(Clone, Debug)]
pub enum StrongInstance {
    /// `χ(P_a,b) ≤ S(a:b) − S(a:b|P_a)`.
    I(BipartiteInstance),
    /// `χ(P_a,b) ≤ S(ρ_a) − S(ρ_a|P_a)`.
    II(BipartiteInstance),
    /// `χ(P_a,b) ≤ χ(P_a,bc)` for mixed tripartite states.
    III(TripartiteInstance),
    /// `χ({p_j, ℰ(ρ_j)}) ≤ χ({p_j, ρ_j})` for arbitrary ensembles.
    IV(EnsembleChannelInstance),
}

pub fn vn_strong_condition(instance: &StrongInstance, tolerance: f64) -> Result<ConditionReport> {
    let vn = EntropyKind::VonNeumann;
    match instance {
        StrongInstance::I(inst) => {
            let chi = holevo_measured(vn, &inst.state, &inst.povm)?;
            let rhs = mutual_information(vn, &inst.state)?
                - conditional_entropy(vn, &inst.state, &inst.povm, ConditionalTarget::Joint)?;
            Ok(ConditionReport::new("Thm3.i", chi, rhs, tolerance))
        }
        StrongInstance::II(inst) => {
            let chi = holevo_measured(vn, &inst.state, &inst.povm)?;
            let rhs = entropy(vn, &inst.state.reduce(&[0])?)?
                - conditional_entropy(vn, &inst.state, &inst.povm, ConditionalTarget::A)?;
            Ok(ConditionReport::new("Thm3.ii", chi, rhs, tolerance))
        }
        StrongInstance::III(inst) => {
            let (lhs, rhs) = tripartite_holevo_pair(vn, &inst.state, &inst.povm)?;
            Ok(ConditionReport::new("Thm3.iii", lhs, rhs, tolerance))
        }
        StrongInstance::IV(inst) => {
            let (lhs, rhs) = channel_holevo_pair(vn, inst)?;
            Ok(ConditionReport::new("Thm3.iv", lhs, rhs, tolerance))
        }
    }
}
