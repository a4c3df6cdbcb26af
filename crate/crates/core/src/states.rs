//! Density matrices, POVMs, ensembles and Kraus channels, plus the random
//! generators and measurement maps built on them.

use num_complex::Complex64;
use rand::{Rng as _, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{self, ComplexMatrix, HERMITIAN_TOL, NEG_CLIP};

/// Trace tolerance for density matrices and probability vectors.
pub const TRACE_TOL: f64 = 1e-10;
/// Tolerance on `Σ P_j = I` and `Σ K†K = I`.
pub const COMPLETENESS_TOL: f64 = 1e-9;
/// Outcomes whose probability falls below this are dropped.
pub const MIN_OUTCOME_PROB: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Deterministic random source: ChaCha20 keyed by a 64-bit seed.
///
/// The stream depends only on the seed, so the same seed reproduces the
/// same states, POVMs and channels on every platform.
#[derive(Clone, Debug)]
pub struct Rng {
    seed: u64,
    inner: ChaCha20Rng,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha20Rng::seed_from_u64(seed),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }

    /// Real and imaginary parts independent standard normals.
    pub fn complex_normal(&mut self) -> Complex64 {
        let re = self.normal();
        let im = self.normal();
        Complex64::new(re, im)
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.inner.random()
    }

    pub fn below(&mut self, n: usize) -> usize {
        self.inner.random_range(0..n)
    }

    /// Derives an independent generator for sub-task `index`.
    pub fn fork(&mut self, index: u64) -> Rng {
        let s: u64 = self.inner.random();
        Rng::new(s ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15))
    }

    pub fn ginibre(&mut self, rows: usize, cols: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(rows, cols, |_, _| self.complex_normal())
    }
}

/// Hermitian, positive semidefinite, unit-trace operator on a composite
/// system with subsystem dimensions `dims`.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    dims: Vec<usize>,
    mat: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates every invariant. The stored matrix is the Hermitian part of `mat`.
    pub fn new(dims: Vec<usize>, mat: ComplexMatrix) -> Result<Self> {
        check_dims(&dims, &mat)?;
        let herm = mat.hermiticity_error();
        if herm > HERMITIAN_TOL {
            return Err(Error::invariant(
                "hermitian",
                format!("max |rho - rho^dagger| = {herm:e}"),
            ));
        }
        let mat = mat.hermitian_part();
        let tr = mat.trace().re;
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::invariant("unit_trace", format!("trace = {tr}")));
        }
        let min = linalg::eigvalsh(&mat)?[0];
        if min < -NEG_CLIP {
            return Err(Error::invariant(
                "positive_semidefinite",
                format!("min eigenvalue {min:e}"),
            ));
        }
        Ok(Self { dims, mat })
    }

    /// Skips validation; callers guarantee the invariants up to roundoff.
    pub(crate) fn from_trusted(dims: Vec<usize>, mat: ComplexMatrix) -> Self {
        debug_assert_eq!(dims.iter().product::<usize>(), mat.rows());
        Self { dims, mat }
    }

    /// Normalizes `m` (Hermitian PSD, nonzero trace) to unit trace.
    pub fn from_unnormalized(dims: Vec<usize>, m: &ComplexMatrix) -> Result<Self> {
        let tr = m.trace().re;
        if !(tr > 0.0) {
            return Err(Error::invariant(
                "unit_trace",
                format!("cannot normalize trace {tr}"),
            ));
        }
        Self::new(dims, m.hermitian_part().scale_real(1.0 / tr))
    }

    /// `|ψ⟩⟨ψ|/⟨ψ|ψ⟩`.
    pub fn pure(dims: Vec<usize>, psi: &[Complex64]) -> Result<Self> {
        let norm2: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if !(norm2 > 0.0) {
            return Err(Error::invariant("unit_trace", "zero state vector"));
        }
        let m = ComplexMatrix::outer(psi).scale_real(1.0 / norm2);
        Self::new(dims, m)
    }

    pub fn maximally_mixed(dims: Vec<usize>) -> Self {
        let d: usize = dims.iter().product();
        Self::from_trusted(dims, ComplexMatrix::identity(d).scale_real(1.0 / d as f64))
    }

    pub fn diagonal(dims: Vec<usize>, probs: &[f64]) -> Result<Self> {
        Self::new(dims, ComplexMatrix::diag(probs))
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    /// Same operator with subsystems regrouped; the product must match.
    pub fn with_dims(&self, dims: Vec<usize>) -> Result<Self> {
        check_dims(&dims, &self.mat)?;
        Ok(Self::from_trusted(dims, self.mat.clone()))
    }

    /// Reduced state on `keep`.
    pub fn reduce(&self, keep: &[usize]) -> Result<Self> {
        let m = linalg::partial_trace(&self.mat, &self.dims, keep)?;
        let mut keep_sorted = keep.to_vec();
        keep_sorted.sort_unstable();
        if keep_sorted != keep {
            return Err(Error::dims(format!("keep set {keep:?} must be ascending")));
        }
        let dims = keep.iter().map(|&k| self.dims[k]).collect();
        Ok(Self::from_trusted(dims, m.hermitian_part()))
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self::from_trusted(dims, self.mat.kron(&other.mat))
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        linalg::eigvalsh(&self.mat)
    }

    pub fn purity(&self) -> f64 {
        self.mat.as_slice().iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn rank(&self, tol: f64) -> Result<usize> {
        Ok(self.eigenvalues()?.iter().filter(|&&l| l > tol).count())
    }

    pub fn is_pure(&self, tol: f64) -> bool {
        (self.purity() - 1.0).abs() <= tol
    }

    /// Re-runs the full invariant check.
    pub fn validate(&self) -> Result<()> {
        Self::new(self.dims.clone(), self.mat.clone()).map(|_| ())
    }
}

fn check_dims(dims: &[usize], mat: &ComplexMatrix) -> Result<()> {
    if !mat.is_square() {
        return Err(Error::NotSquare(mat.rows(), mat.cols()));
    }
    if dims.is_empty() || dims.contains(&0) {
        return Err(Error::dims(format!("invalid subsystem dims {dims:?}")));
    }
    let total: usize = dims.iter().product();
    if total != mat.rows() {
        return Err(Error::dims(format!(
            "dims {dims:?} multiply to {total}, matrix is {}x{}",
            mat.rows(),
            mat.cols()
        )));
    }
    Ok(())
}

/// Positive operators on one subsystem summing to the identity.
#[derive(Clone, Debug)]
pub struct Povm {
    dim: usize,
    elements: Vec<ComplexMatrix>,
}

impl Povm {
    pub fn new(elements: Vec<ComplexMatrix>) -> Result<Self> {
        let dim = elements
            .first()
            .ok_or_else(|| Error::invariant("povm_nonempty", "no elements"))?
            .rows();
        let mut total = ComplexMatrix::zeros(dim, dim);
        let mut stored = Vec::with_capacity(elements.len());
        for (j, e) in elements.into_iter().enumerate() {
            if e.rows() != dim || e.cols() != dim {
                return Err(Error::dims(format!(
                    "element {j} is {}x{}, expected {dim}x{dim}",
                    e.rows(),
                    e.cols()
                )));
            }
            let herm = e.hermiticity_error();
            if herm > HERMITIAN_TOL {
                return Err(Error::invariant(
                    "povm_hermitian",
                    format!("element {j}: {herm:e}"),
                ));
            }
            let e = e.hermitian_part();
            let min = linalg::eigvalsh(&e)?[0];
            if min < -NEG_CLIP {
                return Err(Error::invariant(
                    "povm_positive",
                    format!("element {j} min eigenvalue {min:e}"),
                ));
            }
            total = &total + &e;
            stored.push(e);
        }
        let dev = total.max_abs_diff(&ComplexMatrix::identity(dim));
        if dev > COMPLETENESS_TOL {
            return Err(Error::invariant(
                "povm_completeness",
                format!("max |sum P_j - I| = {dev:e}"),
            ));
        }
        Ok(Self {
            dim,
            elements: stored,
        })
    }

    /// Projective measurement in the basis given by the columns of `basis`.
    pub fn from_basis(basis: &ComplexMatrix) -> Result<Self> {
        let n = basis.rows();
        let elements = (0..basis.cols())
            .map(|k| ComplexMatrix::outer(&basis.column(k)))
            .collect();
        let povm = Self::new(elements)?;
        if povm.len() != n {
            return Err(Error::invariant("povm_completeness", "basis is not square"));
        }
        Ok(povm)
    }

    /// Computational (Z) basis.
    pub fn computational(d: usize) -> Self {
        let elements = (0..d)
            .map(|k| {
                let mut e = ComplexMatrix::zeros(d, d);
                e[(k, k)] = Complex64::new(1.0, 0.0);
                e
            })
            .collect();
        Self { dim: d, elements }
    }

    /// Qubit X basis `{|+⟩⟨+|, |−⟩⟨−|}`.
    pub fn qubit_x() -> Self {
        let h = ComplexMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]);
        let l = ComplexMatrix::from_real_rows(&[&[0.5, -0.5], &[-0.5, 0.5]]);
        Self {
            dim: 2,
            elements: vec![h, l],
        }
    }

    /// Trine: `(2/3)|ν_j⟩⟨ν_j|` with `ν_j` at 120° steps in the x–z plane.
    pub fn trine() -> Self {
        let elements = (0..3)
            .map(|j| {
                let half = std::f64::consts::PI * 2.0 * j as f64 / 3.0 / 2.0;
                let v = [
                    Complex64::new(half.cos(), 0.0),
                    Complex64::new(half.sin(), 0.0),
                ];
                ComplexMatrix::outer(&v).scale_real(2.0 / 3.0)
            })
            .collect();
        Self { dim: 2, elements }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[ComplexMatrix] {
        &self.elements
    }

    /// Every element has exactly one eigenvalue above `tol`.
    pub fn is_rank1(&self, tol: f64) -> Result<bool> {
        for e in &self.elements {
            if linalg::eigvalsh(e)?.iter().filter(|&&l| l > tol).count() != 1 {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Index of the first element that is not rank 1, if any.
    pub fn first_non_rank1(&self, tol: f64) -> Result<Option<usize>> {
        for (j, e) in self.elements.iter().enumerate() {
            if linalg::eigvalsh(e)?.iter().filter(|&&l| l > tol).count() != 1 {
                return Ok(Some(j));
            }
        }
        Ok(None)
    }

    /// `P_j² = P_j` for every element.
    pub fn is_projective(&self, tol: f64) -> bool {
        self.elements.iter().all(|e| (e * e).approx_eq(e, tol))
    }

    /// Principal square roots `K_j = P_j^{1/2}`.
    pub fn kraus_roots(&self) -> Result<Vec<ComplexMatrix>> {
        self.elements
            .iter()
            .map(|e| linalg::spectral_fn(e, f64::sqrt, true))
            .collect()
    }

    /// `Tr(P_j ρ)` for a state on this POVM's space.
    pub fn probabilities(&self, rho: &ComplexMatrix) -> Vec<f64> {
        self.elements
            .iter()
            .map(|e| trace_of_product(e, rho))
            .collect()
    }
}

/// `Re Tr(A B)` without forming the product.
pub(crate) fn trace_of_product(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let n = a.rows();
    let mut s = ZERO;
    for i in 0..n {
        for k in 0..n {
            s += a[(i, k)] * b[(k, i)];
        }
    }
    s.re
}

/// Probability-weighted collection of states `{p_j, ρ_j}`.
#[derive(Clone, Debug)]
pub struct Ensemble {
    probs: Vec<f64>,
    states: Vec<DensityMatrix>,
}

impl Ensemble {
    /// Zero-probability members are dropped.
    pub fn new(probs: Vec<f64>, states: Vec<DensityMatrix>) -> Result<Self> {
        if probs.len() != states.len() || probs.is_empty() {
            return Err(Error::dims(format!(
                "{} probabilities for {} states",
                probs.len(),
                states.len()
            )));
        }
        if let Some(p) = probs.iter().find(|p| !(**p >= 0.0)) {
            return Err(Error::invariant(
                "probabilities",
                format!("negative or NaN probability {p}"),
            ));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > TRACE_TOL {
            return Err(Error::invariant("probabilities", format!("sum = {total}")));
        }
        let dims = states[0].dims().to_vec();
        if states.iter().any(|s| s.dims() != dims.as_slice()) {
            return Err(Error::dims("ensemble members have different dims"));
        }
        let (probs, states) = probs
            .into_iter()
            .zip(states)
            .filter(|(p, _)| *p > 0.0)
            .unzip();
        Ok(Self { probs, states })
    }

    pub(crate) fn from_trusted(probs: Vec<f64>, states: Vec<DensityMatrix>) -> Self {
        Self { probs, states }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn states(&self) -> &[DensityMatrix] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// `Σ_j p_j ρ_j`.
    pub fn average(&self) -> DensityMatrix {
        let dims = self.states[0].dims().to_vec();
        let d = self.states[0].dim();
        let mut m = ComplexMatrix::zeros(d, d);
        for (p, s) in self.probs.iter().zip(&self.states) {
            m = &m + &s.matrix().scale_real(*p);
        }
        DensityMatrix::from_trusted(dims, m)
    }

    /// `{p_j, ℰ(ρ_j)}`.
    pub fn map_channel(&self, ch: &KrausChannel) -> Result<Ensemble> {
        let states = self
            .states
            .iter()
            .map(|s| ch.apply(s))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_trusted(self.probs.clone(), states))
    }
}

/// Completely positive trace-preserving map `ρ ↦ Σ_j K_j ρ K_j†`.
#[derive(Clone, Debug)]
pub struct KrausChannel {
    d_in: usize,
    d_out: usize,
    kraus: Vec<ComplexMatrix>,
}

impl KrausChannel {
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::invariant("kraus_nonempty", "no Kraus operators"))?;
        let (d_out, d_in) = (first.rows(), first.cols());
        let mut total = ComplexMatrix::zeros(d_in, d_in);
        for (j, k) in kraus.iter().enumerate() {
            if k.rows() != d_out || k.cols() != d_in {
                return Err(Error::dims(format!(
                    "Kraus operator {j} has shape {}x{}",
                    k.rows(),
                    k.cols()
                )));
            }
            total = &total + &(&k.adjoint() * k);
        }
        let dev = total.max_abs_diff(&ComplexMatrix::identity(d_in));
        if dev > COMPLETENESS_TOL {
            return Err(Error::invariant(
                "kraus_completeness",
                format!("max |sum K^dagger K - I| = {dev:e}"),
            ));
        }
        Ok(Self { d_in, d_out, kraus })
    }

    pub fn identity(d: usize) -> Self {
        Self {
            d_in: d,
            d_out: d,
            kraus: vec![ComplexMatrix::identity(d)],
        }
    }

    /// `ρ ↦ (1-p)ρ + p·Tr(ρ) I/d`.
    pub fn depolarizing(d: usize, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Config(format!(
                "depolarizing strength {p} outside [0, 1]"
            )));
        }
        let mut kraus = vec![ComplexMatrix::identity(d).scale_real((1.0 - p).sqrt())];
        let w = (p / d as f64).sqrt();
        for i in 0..d {
            for j in 0..d {
                let mut k = ComplexMatrix::zeros(d, d);
                k[(i, j)] = Complex64::new(w, 0.0);
                kraus.push(k);
            }
        }
        Self::new(kraus)
    }

    /// Discards the second factor of a `d_keep ⊗ d_drop` input.
    pub fn partial_trace_second(d_keep: usize, d_drop: usize) -> Self {
        let kraus = (0..d_drop)
            .map(|k| {
                ComplexMatrix::from_fn(d_keep, d_keep * d_drop, |r, c| {
                    if c == r * d_drop + k {
                        Complex64::new(1.0, 0.0)
                    } else {
                        ZERO
                    }
                })
            })
            .collect();
        Self {
            d_in: d_keep * d_drop,
            d_out: d_keep,
            kraus,
        }
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    pub fn kraus(&self) -> &[ComplexMatrix] {
        &self.kraus
    }

    /// Output dims are `[d_out]`, or the input dims when the channel is
    /// dimension-preserving.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim() != self.d_in {
            return Err(Error::dims(format!(
                "channel input dim {} but state dim {}",
                self.d_in,
                rho.dim()
            )));
        }
        let mut out = ComplexMatrix::zeros(self.d_out, self.d_out);
        for k in &self.kraus {
            out = &out + &k.conjugate(rho.matrix())?;
        }
        let dims = if self.d_out == self.d_in {
            rho.dims().to_vec()
        } else {
            vec![self.d_out]
        };
        Ok(DensityMatrix::from_trusted(dims, out.hermitian_part()))
    }
}

/// Applies `ch` to `rho`.
pub fn apply_channel(ch: &KrausChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    ch.apply(rho)
}

/// Columns of a Haar-random isometry `C^cols → C^rows`
/// (Gram–Schmidt on a Ginibre matrix, reorthogonalized once).
pub fn haar_isometry(rows: usize, cols: usize, rng: &mut Rng) -> Result<ComplexMatrix> {
    if cols > rows {
        return Err(Error::dims(format!(
            "no isometry from dimension {cols} into {rows}"
        )));
    }
    let g = rng.ginibre(rows, cols);
    let mut q: Vec<Vec<Complex64>> = Vec::with_capacity(cols);
    for j in 0..cols {
        let mut v = g.column(j);
        for _pass in 0..2 {
            for u in &q {
                let proj: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi -= proj * ui;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-12 {
            return Err(Error::SingularTotal(norm));
        }
        q.push(v.into_iter().map(|z| z / norm).collect());
    }
    Ok(ComplexMatrix::from_fn(rows, cols, |i, j| q[j][i]))
}

/// Ginibre state `G G†/Tr(G G†)` with `G` of shape `d × rank`.
pub fn random_density(dims: &[usize], rank: usize, rng: &mut Rng) -> Result<DensityMatrix> {
    let d: usize = dims.iter().product();
    if rank == 0 || rank > d {
        return Err(Error::BadRank { rank, dim: d });
    }
    let g = rng.ginibre(d, rank);
    let m = &g * &g.adjoint();
    let tr = m.trace().re;
    DensityMatrix::new(dims.to_vec(), m.scale_real(1.0 / tr))
}

/// Random pure state on `dims`.
pub fn random_pure(dims: &[usize], rng: &mut Rng) -> Result<DensityMatrix> {
    random_density(dims, 1, rng)
}

/// `P_j = T^{-1/2} A_j T^{-1/2}` with Ginibre blocks `A_j = G_j G_j†`
/// (rank 1 when `rank1`, full rank otherwise) and `T = Σ A_j`.
pub fn random_povm(d: usize, n: usize, rank1: bool, rng: &mut Rng) -> Result<Povm> {
    if n < 2 {
        return Err(Error::Config(format!(
            "a random POVM needs at least 2 outcomes, got {n}"
        )));
    }
    let cols = if rank1 { 1 } else { d };
    let blocks: Vec<ComplexMatrix> = (0..n)
        .map(|_| {
            let g = rng.ginibre(d, cols);
            &g * &g.adjoint()
        })
        .collect();
    povm_from_blocks(&blocks)
}

/// Normalizes PSD blocks into a POVM via `T^{-1/2} A_j T^{-1/2}`.
pub fn povm_from_blocks(blocks: &[ComplexMatrix]) -> Result<Povm> {
    let d = blocks
        .first()
        .ok_or_else(|| Error::Config("no POVM blocks".into()))?
        .rows();
    let mut t = ComplexMatrix::zeros(d, d);
    for b in blocks {
        t = &t + b;
    }
    let eig = linalg::eig_hermitian(&t.hermitian_part())?;
    if eig.values[0] < 1e-12 {
        return Err(Error::SingularTotal(eig.values[0]));
    }
    let t_inv_sqrt = eig.reconstruct_with(|x| 1.0 / x.sqrt());
    let elements = blocks
        .iter()
        .map(|b| (&(&t_inv_sqrt * b) * &t_inv_sqrt).hermitian_part())
        .collect();
    Povm::new(elements)
}

/// Rank-1 projective measurement in a Haar-random basis.
pub fn random_projective_povm(d: usize, rng: &mut Rng) -> Result<Povm> {
    let u = haar_isometry(d, d, rng)?;
    Povm::from_basis(&u)
}

/// Stinespring-style random channel: a Haar isometry `V: C^{d_in} → C^{d_out} ⊗ C^{kraus_count}`
/// with the environment traced out, `K_j = (I ⊗ ⟨j|) V`.
pub fn random_channel(
    d_in: usize,
    d_out: usize,
    kraus_count: usize,
    rng: &mut Rng,
) -> Result<KrausChannel> {
    if kraus_count == 0 {
        return Err(Error::Config("kraus_count must be at least 1".into()));
    }
    let v = haar_isometry(d_out * kraus_count, d_in, rng)?;
    let kraus = (0..kraus_count)
        .map(|j| ComplexMatrix::from_fn(d_out, d_in, |o, i| v[(o * kraus_count + j, i)]))
        .collect();
    KrausChannel::new(kraus)
}

/// Eigenvalues at or below this are treated as outside the support.
const SUPPORT_TOL: f64 = 1e-14;

/// Pure state `Σ_i √λ_i |u_i⟩|i⟩` on `rho.dims() ++ [rank]` whose reduction
/// to the original factors is `rho`.
pub fn purify(rho: &DensityMatrix) -> Result<DensityMatrix> {
    let eig = linalg::eig_hermitian(rho.matrix())?;
    let support: Vec<usize> = (0..eig.values.len())
        .filter(|&k| eig.values[k] > SUPPORT_TOL)
        .collect();
    let r = support.len().max(1);
    let d = rho.dim();
    let mut psi = vec![ZERO; d * r];
    for (slot, &k) in support.iter().enumerate() {
        let w = eig.values[k].sqrt();
        for i in 0..d {
            psi[i * r + slot] += eig.vectors[(i, k)] * w;
        }
    }
    let norm2: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
    let m = ComplexMatrix::outer(&psi).scale_real(1.0 / norm2);
    let mut dims = rho.dims().to_vec();
    dims.push(r);
    Ok(DensityMatrix::from_trusted(dims, m))
}

fn check_measurable(rho: &DensityMatrix, povm: &Povm) -> Result<(usize, usize)> {
    if rho.dims().len() < 2 {
        return Err(Error::dims(format!(
            "need a composite state, got dims {:?}",
            rho.dims()
        )));
    }
    let da = rho.dims()[0];
    if povm.dim() != da {
        return Err(Error::dims(format!(
            "POVM acts on dim {}, first subsystem has dim {da}",
            povm.dim()
        )));
    }
    Ok((da, rho.dim() / da))
}

/// `Tr_a[(E ⊗ I) ρ]` for an operator `E` on the first subsystem.
fn apply_and_trace_first(
    e: &ComplexMatrix,
    rho: &ComplexMatrix,
    da: usize,
    rest: usize,
) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(rest, rest);
    for a in 0..da {
        for a2 in 0..da {
            let w = e[(a2, a)];
            if w == ZERO {
                continue;
            }
            for b in 0..rest {
                for b2 in 0..rest {
                    out[(b, b2)] += w * rho[(a * rest + b, a2 * rest + b2)];
                }
            }
        }
    }
    out
}

/// Post-measurement ensemble on the unmeasured subsystems:
/// `p_j ρ_bj = Tr_a[(P_aj ⊗ I) ρ_ab]`. Outcomes with `p_j < 1e-12` are dropped.
pub fn measure_ensemble(rho_ab: &DensityMatrix, povm: &Povm) -> Result<Ensemble> {
    let (da, rest) = check_measurable(rho_ab, povm)?;
    let rest_dims = rho_ab.dims()[1..].to_vec();
    let mut probs = Vec::with_capacity(povm.len());
    let mut states = Vec::with_capacity(povm.len());
    for e in povm.elements() {
        let unnorm = apply_and_trace_first(e, rho_ab.matrix(), da, rest);
        let p = unnorm.trace().re;
        if p < MIN_OUTCOME_PROB {
            continue;
        }
        probs.push(p);
        states.push(DensityMatrix::from_trusted(
            rest_dims.clone(),
            unnorm.hermitian_part().scale_real(1.0 / p),
        ));
    }
    Ok(Ensemble::from_trusted(probs, states))
}

/// Joint post-measurement states `ρ_abj = (K_j ⊗ I) ρ_ab (K_j† ⊗ I)/p_j`
/// with `K_j = P_aj^{1/2}`.
pub fn measure_joint(rho_ab: &DensityMatrix, povm: &Povm) -> Result<Ensemble> {
    let (_, rest) = check_measurable(rho_ab, povm)?;
    let mut probs = Vec::new();
    let mut states = Vec::new();
    for k in povm.kraus_roots()? {
        let big = k.kron(&ComplexMatrix::identity(rest));
        let unnorm = big.conjugate(rho_ab.matrix())?;
        let p = unnorm.trace().re;
        if p < MIN_OUTCOME_PROB {
            continue;
        }
        probs.push(p);
        states.push(DensityMatrix::from_trusted(
            rho_ab.dims().to_vec(),
            unnorm.hermitian_part().scale_real(1.0 / p),
        ));
    }
    Ok(Ensemble::from_trusted(probs, states))
}

/// Post-measurement states of the measured system alone, `ρ_aj = K_j ρ_a K_j†/p_j`.
pub fn measure_local(rho_a: &DensityMatrix, povm: &Povm) -> Result<Ensemble> {
    if povm.dim() != rho_a.dim() {
        return Err(Error::dims(format!(
            "POVM dim {} vs state dim {}",
            povm.dim(),
            rho_a.dim()
        )));
    }
    let mut probs = Vec::new();
    let mut states = Vec::new();
    for k in povm.kraus_roots()? {
        let unnorm = k.conjugate(rho_a.matrix())?;
        let p = unnorm.trace().re;
        if p < MIN_OUTCOME_PROB {
            continue;
        }
        probs.push(p);
        states.push(DensityMatrix::from_trusted(
            rho_a.dims().to_vec(),
            unnorm.hermitian_part().scale_real(1.0 / p),
        ));
    }
    Ok(Ensemble::from_trusted(probs, states))
}

/// A POVM realized as a projective measurement on a larger space.
#[derive(Clone, Debug)]
pub struct NaimarkExtension {
    /// `V = Σ_j (|j⟩ ⊗ I_d) P_j^{1/2}`, shape `(n·d) × d`.
    pub isometry: ComplexMatrix,
    /// `Π_j = |j⟩⟨j| ⊗ I_d`.
    pub projective: Povm,
}

impl NaimarkExtension {
    /// Embeds the first subsystem of `rho` through the isometry.
    pub fn lift(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        let d = self.isometry.cols();
        if rho.dims()[0] != d {
            return Err(Error::dims(format!(
                "isometry input dim {d} vs first subsystem {}",
                rho.dims()[0]
            )));
        }
        let rest = rho.dim() / d;
        let big = self.isometry.kron(&ComplexMatrix::identity(rest));
        let m = big.conjugate(rho.matrix())?;
        let mut dims = rho.dims().to_vec();
        dims[0] = self.isometry.rows();
        Ok(DensityMatrix::from_trusted(dims, m.hermitian_part()))
    }
}

pub fn naimark_extend(povm: &Povm) -> Result<NaimarkExtension> {
    let d = povm.dim();
    let n = povm.len();
    let roots = povm.kraus_roots()?;
    let isometry = ComplexMatrix::from_fn(n * d, d, |row, c| roots[row / d][(row % d, c)]);
    let elements = (0..n)
        .map(|j| {
            ComplexMatrix::from_fn(n * d, n * d, |r, c| {
                if r == c && r / d == j {
                    Complex64::new(1.0, 0.0)
                } else {
                    ZERO
                }
            })
        })
        .collect();
    Ok(NaimarkExtension {
        isometry,
        projective: Povm {
            dim: n * d,
            elements,
        },
    })
}

/// Sums POVM elements block by block; `partition` must cover every index once.
pub fn coarse_grain(povm: &Povm, partition: &[Vec<usize>]) -> Result<Povm> {
    let n = povm.len();
    let mut seen = vec![false; n];
    for block in partition {
        if block.is_empty() {
            return Err(Error::BadPartition("empty block".into()));
        }
        for &j in block {
            if j >= n {
                return Err(Error::BadPartition(format!(
                    "index {j} out of range for {n} outcomes"
                )));
            }
            if seen[j] {
                return Err(Error::BadPartition(format!("index {j} appears twice")));
            }
            seen[j] = true;
        }
    }
    if let Some(j) = seen.iter().position(|s| !s) {
        return Err(Error::BadPartition(format!("index {j} not covered")));
    }
    let d = povm.dim();
    let elements = partition
        .iter()
        .map(|block| {
            block.iter().fold(ComplexMatrix::zeros(d, d), |acc, &j| {
                &acc + &povm.elements[j]
            })
        })
        .collect();
    Ok(Povm { dim: d, elements })
}

/// A few standard two-qubit states.
pub mod named {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    /// `|Φ⁺⟩ = (|00⟩ + |11⟩)/√2`.
    pub fn bell() -> DensityMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let m = ComplexMatrix::outer(&[c(s), c(0.0), c(0.0), c(s)]);
        DensityMatrix::from_trusted(vec![2, 2], m)
    }

    /// `(|00⟩⟨00| + |11⟩⟨11|)/2`.
    pub fn classical() -> DensityMatrix {
        DensityMatrix::from_trusted(vec![2, 2], ComplexMatrix::diag(&[0.5, 0.0, 0.0, 0.5]))
    }

    /// `p|Φ⁺⟩⟨Φ⁺| + (1−p) I/4`.
    pub fn werner(p: f64) -> Result<DensityMatrix> {
        let m = &bell().matrix().scale_real(p)
            + &ComplexMatrix::identity(4).scale_real((1.0 - p) / 4.0);
        DensityMatrix::new(vec![2, 2], m)
    }

    /// `(|000⟩ + |111⟩)/√2`.
    pub fn ghz() -> DensityMatrix {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut v = vec![c(0.0); 8];
        v[0] = c(s);
        v[7] = c(s);
        DensityMatrix::from_trusted(vec![2, 2, 2], ComplexMatrix::outer(&v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn density_validation() {
        assert!(DensityMatrix::diagonal(vec![2], &[0.25, 0.75]).is_ok());
        let err = DensityMatrix::diagonal(vec![2], &[0.5, 0.6]).unwrap_err();
        assert!(matches!(
            err,
            Error::Invariant {
                invariant: "unit_trace",
                ..
            }
        ));
        let err = DensityMatrix::diagonal(vec![2], &[1.5, -0.5]).unwrap_err();
        assert!(matches!(
            err,
            Error::Invariant {
                invariant: "positive_semidefinite",
                ..
            }
        ));
        let nh = ComplexMatrix::from_real_rows(&[&[0.5, 0.1], &[0.0, 0.5]]);
        let err = DensityMatrix::new(vec![2], nh).unwrap_err();
        assert!(matches!(
            err,
            Error::Invariant {
                invariant: "hermitian",
                ..
            }
        ));
        assert!(DensityMatrix::diagonal(vec![3], &[0.5, 0.5]).is_err());
    }

    #[test]
    fn random_density_examples() {
        let mut rng = Rng::new(1);
        let pure = random_density(&[2], 1, &mut rng).unwrap();
        assert!((pure.purity() - 1.0).abs() < 1e-10);
        let full = random_density(&[4], 4, &mut rng).unwrap();
        assert!((full.matrix().trace().re - 1.0).abs() < 1e-12);
        assert_eq!(full.rank(1e-12).unwrap(), 4);
        let a = random_density(&[2], 2, &mut Rng::new(42)).unwrap();
        let b = random_density(&[2], 2, &mut Rng::new(42)).unwrap();
        assert_eq!(a.matrix().as_slice(), b.matrix().as_slice());
        assert!(matches!(
            random_density(&[2], 3, &mut rng),
            Err(Error::BadRank { .. })
        ));
        assert!(matches!(
            random_density(&[2], 0, &mut rng),
            Err(Error::BadRank { .. })
        ));
    }

    #[test]
    fn random_povm_examples() {
        let mut rng = Rng::new(2);
        let proj = random_projective_povm(2, &mut rng).unwrap();
        assert!(proj.is_projective(1e-12));
        assert!(trace_of_product(&proj.elements()[0], &proj.elements()[1]).abs() < 1e-12);

        let p4 = random_povm(2, 4, true, &mut rng).unwrap();
        assert_eq!(p4.len(), 4);
        assert!(p4.is_rank1(1e-9).unwrap());

        // 2-outcome rank-1 POVM on a qubit is forced to be projective.
        let p2 = random_povm(2, 2, true, &mut rng).unwrap();
        assert!(p2.is_projective(1e-10));

        let full = random_povm(3, 3, false, &mut rng).unwrap();
        assert!(!full.is_rank1(1e-9).unwrap());

        assert!(matches!(
            random_povm(3, 2, true, &mut rng),
            Err(Error::SingularTotal(_))
        ));
        assert!(random_povm(2, 1, false, &mut rng).is_err());
    }

    #[test]
    fn trine_sums_to_identity() {
        // Symbolic sum: (2/3) Σ_j [[cos²θ_j, cosθ_j sinθ_j], [.., sin²θ_j]] with
        // θ_j = 0, π/3, 2π/3 gives (2/3)·[[3/2, 0], [0, 3/2]] = I.
        let t = Povm::trine();
        let total = t
            .elements()
            .iter()
            .fold(ComplexMatrix::zeros(2, 2), |a, e| &a + e);
        assert!(total.approx_eq(&ComplexMatrix::identity(2), 1e-12));
        assert!(Povm::new(t.elements().to_vec()).is_ok());
    }

    #[test]
    fn povm_validation() {
        let bad = vec![
            ComplexMatrix::diag(&[1.0, 0.0]),
            ComplexMatrix::diag(&[0.0, 0.5]),
        ];
        assert!(matches!(
            Povm::new(bad),
            Err(Error::Invariant {
                invariant: "povm_completeness",
                ..
            })
        ));
        let neg = vec![
            ComplexMatrix::diag(&[1.5, 0.0]),
            ComplexMatrix::diag(&[-0.5, 1.0]),
        ];
        assert!(matches!(
            Povm::new(neg),
            Err(Error::Invariant {
                invariant: "povm_positive",
                ..
            })
        ));
    }

    #[test]
    fn purification_examples() {
        let mixed = DensityMatrix::maximally_mixed(vec![2]);
        let p = purify(&mixed).unwrap();
        assert_eq!(p.dims(), &[2, 2]);
        assert!(p.is_pure(1e-12));
        assert!(p
            .reduce(&[0])
            .unwrap()
            .matrix()
            .approx_eq(mixed.matrix(), 1e-12));

        let mut rng = Rng::new(3);
        let phi = random_pure(&[3], &mut rng).unwrap();
        let pp = purify(&phi).unwrap();
        assert_eq!(pp.dims(), &[3, 1]);
        assert!(pp.matrix().approx_eq(phi.matrix(), 1e-12));

        let r3 = random_density(&[4], 3, &mut rng).unwrap();
        let p3 = purify(&r3).unwrap();
        assert_eq!(p3.dims(), &[4, 3]);
        assert!(p3.reduce(&[0]).unwrap().matrix().max_abs_diff(r3.matrix()) < 1e-10);
    }

    #[test]
    fn classical_state_measurements() {
        let rho = named::classical();
        let z = measure_ensemble(&rho, &Povm::computational(2)).unwrap();
        assert_eq!(z.len(), 2);
        assert!((z.probs()[0] - 0.5).abs() < 1e-15 && (z.probs()[1] - 0.5).abs() < 1e-15);
        assert!(z.states()[0]
            .matrix()
            .approx_eq(&ComplexMatrix::diag(&[1.0, 0.0]), 1e-15));
        assert!(z.states()[1]
            .matrix()
            .approx_eq(&ComplexMatrix::diag(&[0.0, 1.0]), 1e-15));

        let x = measure_ensemble(&rho, &Povm::qubit_x()).unwrap();
        for s in x.states() {
            assert!(s
                .matrix()
                .approx_eq(&ComplexMatrix::diag(&[0.5, 0.5]), 1e-15));
        }

        let joint = measure_joint(&rho, &Povm::computational(2)).unwrap();
        assert!(joint.states()[0]
            .matrix()
            .approx_eq(&ComplexMatrix::diag(&[1.0, 0.0, 0.0, 0.0]), 1e-15));
        assert!(joint.states()[1]
            .matrix()
            .approx_eq(&ComplexMatrix::diag(&[0.0, 0.0, 0.0, 1.0]), 1e-15));
    }

    #[test]
    fn product_state_conditionals_equal_marginal() {
        let mut rng = Rng::new(4);
        let a = random_density(&[2], 2, &mut rng).unwrap();
        let b = random_density(&[3], 3, &mut rng).unwrap();
        let ab = a.tensor(&b);
        let povm = random_povm(2, 3, false, &mut rng).unwrap();
        for s in measure_ensemble(&ab, &povm).unwrap().states() {
            assert!(s.matrix().approx_eq(b.matrix(), 1e-12));
        }
    }

    #[test]
    fn joint_and_marginal_measurements_agree() {
        let mut rng = Rng::new(5);
        let rho = random_pure(&[2, 3], &mut rng).unwrap();
        let povm = random_povm(2, 3, true, &mut rng).unwrap();
        let ens = measure_ensemble(&rho, &povm).unwrap();
        let joint = measure_joint(&rho, &povm).unwrap();
        assert_eq!(ens.len(), joint.len());
        for (j, s) in joint.states().iter().enumerate() {
            assert!(s.is_pure(1e-10), "rank-1 Kraus on a pure state stays pure");
            assert!((ens.probs()[j] - joint.probs()[j]).abs() < 1e-12);
            let rb = s.reduce(&[1]).unwrap();
            assert!(rb.matrix().max_abs_diff(ens.states()[j].matrix()) < 1e-10);
        }
    }

    #[test]
    fn channel_examples() {
        let mut rng = Rng::new(6);
        let rho = random_density(&[3], 3, &mut rng).unwrap();
        let out = KrausChannel::identity(3).apply(&rho).unwrap();
        assert!(out.matrix().approx_eq(rho.matrix(), 1e-15));

        let zero = DensityMatrix::diagonal(vec![2], &[1.0, 0.0]).unwrap();
        let dep = KrausChannel::depolarizing(2, 1.0).unwrap();
        assert!(dep
            .apply(&zero)
            .unwrap()
            .matrix()
            .approx_eq(&ComplexMatrix::diag(&[0.5, 0.5]), 1e-15));

        let bc = random_density(&[2, 3], 6, &mut rng).unwrap();
        let tr = KrausChannel::partial_trace_second(2, 3);
        assert!(KrausChannel::new(tr.kraus().to_vec()).is_ok());
        let via_channel = tr.apply(&bc).unwrap();
        let direct = bc.reduce(&[0]).unwrap();
        assert!(via_channel.matrix().approx_eq(direct.matrix(), 1e-14));
    }

    #[test]
    fn random_channel_examples() {
        let mut rng = Rng::new(7);
        let unitary = random_channel(3, 3, 1, &mut rng).unwrap();
        let k = &unitary.kraus()[0];
        assert!((k * &k.adjoint()).approx_eq(&ComplexMatrix::identity(3), 1e-12));
        let ch = random_channel(2, 3, 4, &mut rng).unwrap();
        assert_eq!((ch.d_in(), ch.d_out(), ch.kraus().len()), (2, 3, 4));
        let a = random_channel(2, 2, 2, &mut Rng::new(99)).unwrap();
        let b = random_channel(2, 2, 2, &mut Rng::new(99)).unwrap();
        assert_eq!(a.kraus()[1].as_slice(), b.kraus()[1].as_slice());
        assert!(random_channel(2, 2, 0, &mut rng).is_err());
    }

    #[test]
    fn naimark_examples() {
        let ext = naimark_extend(&Povm::trine()).unwrap();
        let v = &ext.isometry;
        assert!((&v.adjoint() * v).approx_eq(&ComplexMatrix::identity(2), 1e-12));
        let mixed = DensityMatrix::maximally_mixed(vec![2]);
        let lifted = v.conjugate(mixed.matrix()).unwrap();
        for p in ext.projective.probabilities(&lifted) {
            assert!((p - 1.0 / 3.0).abs() < 1e-12);
        }

        let z = Povm::computational(2);
        let ext = naimark_extend(&z).unwrap();
        let rho = DensityMatrix::diagonal(vec![2], &[0.3, 0.7]).unwrap();
        let lifted = ext.isometry.conjugate(rho.matrix()).unwrap();
        assert_eq!(
            ext.projective.probabilities(&lifted),
            z.probabilities(rho.matrix())
        );
    }

    #[test]
    fn coarse_grain_examples() {
        let mut rng = Rng::new(8);
        let p = random_povm(2, 4, true, &mut rng).unwrap();
        let same = coarse_grain(&p, &[vec![0], vec![1], vec![2], vec![3]]).unwrap();
        for (a, b) in same.elements().iter().zip(p.elements()) {
            assert!(a.approx_eq(b, 0.0));
        }
        let all = coarse_grain(&p, &[vec![0, 1, 2, 3]]).unwrap();
        assert!(all.elements()[0].approx_eq(&ComplexMatrix::identity(2), 1e-12));
        assert!(Povm::new(
            coarse_grain(&p, &[vec![0, 2], vec![1, 3]])
                .unwrap()
                .elements()
                .to_vec()
        )
        .is_ok());

        assert!(matches!(
            coarse_grain(&p, &[vec![0, 1], vec![2]]),
            Err(Error::BadPartition(_))
        ));
        assert!(matches!(
            coarse_grain(&p, &[vec![0, 1], vec![1, 2, 3]]),
            Err(Error::BadPartition(_))
        ));
        assert!(matches!(
            coarse_grain(&p, &[vec![0, 1, 2, 3, 4]]),
            Err(Error::BadPartition(_))
        ));
    }

    #[test]
    fn measure_dimension_mismatch() {
        let rho = named::bell();
        assert!(matches!(
            measure_ensemble(&rho, &Povm::computational(3)),
            Err(Error::DimensionMismatch(_))
        ));
        let single = DensityMatrix::maximally_mixed(vec![2]);
        assert!(measure_ensemble(&single, &Povm::computational(2)).is_err());
    }
}
