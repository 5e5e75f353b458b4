//! Local-unitary orbit search for entangled real parts, the detection
//! flowchart and evidence about membership in the set of PPT states whose
//! real parts stay separable along the whole LU orbit.

use rand::Rng;
use rayon::prelude::*;

use crate::bipartite::{BipartiteOperator, DensityMatrix, PPT_TOL};
use crate::error::{Error, Result};
use crate::linalg::{
    self, diag_unitary, frobenius, orthogonal_from_generators, to_complex, unitary_od_decompose,
    CMatrix, OdFactors,
};
use crate::random::{haar_unitary, rng, stream};
use crate::separability::{
    gilbert, rew_detectable, GilbertOptions, ProductEnsemble, RewVerdict, SeparabilityVerdict,
};
use crate::witness::{witness_from_npt, NptWitness, Provenance, Witness, DEFAULT_DELTA};

/// `(U, V)` with each factor stored as orthogonal · diagonal · orthogonal.
#[derive(Debug, Clone)]
pub struct LocalUnitary {
    pub u: CMatrix,
    pub v: CMatrix,
    pub factors_u: OdFactors,
    pub factors_v: OdFactors,
}

impl LocalUnitary {
    pub fn new(u: CMatrix, v: CMatrix) -> Result<Self> {
        let factors_u = unitary_od_decompose(&u)?;
        let factors_v = unitary_od_decompose(&v)?;
        Ok(Self { u, v, factors_u, factors_v })
    }

    pub fn identity(dims: (usize, usize)) -> Self {
        Self::new(CMatrix::identity(dims.0, dims.0), CMatrix::identity(dims.1, dims.1))
            .expect("identity is unitary")
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.u.nrows(), self.v.nrows())
    }

    /// `(U ⊗ V) M (U ⊗ V)†`
    pub fn conjugate(&self, m: &BipartiteOperator) -> Result<BipartiteOperator> {
        m.apply_local(&self.u, &self.v)
    }

    pub fn conjugate_state(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        rho.apply_local(&self.u, &self.v)
    }

    /// `(U ⊗ V)† M (U ⊗ V)`
    pub fn pull_back(&self, m: &BipartiteOperator) -> Result<BipartiteOperator> {
        m.apply_local(&self.u.adjoint(), &self.v.adjoint())
    }

    /// Largest deviation of either factorization from its unitary.
    pub fn factor_residual(&self) -> f64 {
        linalg::max_abs(&(self.factors_u.reconstruct() - &self.u))
            .max(linalg::max_abs(&(self.factors_v.reconstruct() - &self.v)))
    }
}

pub fn lu_parameter_len(dims: (usize, usize)) -> usize {
    let (m, n) = dims;
    m * (m - 1) / 2 + m + n * (n - 1) / 2 + n
}

/// Indices of the phase coordinates in an LU parameter vector.
pub fn lu_phase_indices(dims: (usize, usize)) -> Vec<usize> {
    let (m, n) = dims;
    let ga = m * (m - 1) / 2;
    let gb = n * (n - 1) / 2;
    (ga..ga + m).chain(ga + m + gb..ga + m + gb + n).collect()
}

/// `U = exp(skew(x_A))·diag(e^{iφ_A})`, likewise `V`. The layout is
/// `[generators_A, phases_A, generators_B, phases_B]`.
pub fn lu_parameterize(x: &[f64], dims: (usize, usize)) -> Result<LocalUnitary> {
    let (m, n) = dims;
    if x.len() != lu_parameter_len(dims) {
        return Err(Error::InvalidInput(format!(
            "expected {} parameters for dims {m}x{n}, got {}",
            lu_parameter_len(dims),
            x.len()
        )));
    }
    let ga = m * (m - 1) / 2;
    let gb = n * (n - 1) / 2;
    let side = |gens: &[f64], phases: &[f64], d: usize| -> (CMatrix, OdFactors) {
        let o = orthogonal_from_generators(gens, d);
        let ph = CMatrix::from_diagonal(&diag_unitary(phases).diagonal());
        let u = to_complex(&o) * &ph;
        let f = OdFactors { left: o, phases: ph.diagonal(), right: linalg::RMatrix::identity(d, d) };
        (u, f)
    };
    let (u, factors_u) = side(&x[..ga], &x[ga..ga + m], m);
    let (v, factors_v) = side(&x[ga + m..ga + m + gb], &x[ga + m + gb..], n);
    Ok(LocalUnitary { u, v, factors_u, factors_v })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitOptions {
    /// Objective evaluations per restart for the lower-bound search.
    pub budget: usize,
    pub restarts: usize,
    pub seed: u64,
    /// Frank-Wolfe iterations behind each lower-bound evaluation.
    pub inner_iter: usize,
    /// Evaluations per restart for the imaginary-part search.
    pub realness_budget: usize,
    /// Options for the full confirmation run.
    pub confirm: GilbertOptions,
}

impl Default for OrbitOptions {
    fn default() -> Self {
        Self {
            budget: 2000,
            restarts: 16,
            seed: 0,
            inner_iter: 300,
            realness_budget: 4000,
            confirm: GilbertOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrbitStage {
    /// LU found by driving the imaginary part of the conjugate to zero.
    Realness,
    /// LU found by maximizing the Frank-Wolfe lower bound of the real part.
    LowerBound,
    /// LU supplied by an evidence trial.
    Trial,
}

/// An LU whose conjugate `σ = (U⊗V)ρ(U⊗V)†` has an entangled real part.
#[derive(Debug, Clone)]
pub struct OrbitHit {
    pub lu: LocalUnitary,
    pub params: Vec<f64>,
    /// Real witness detecting `σ`.
    pub rew: Witness,
    /// `(U⊗V)† W_r (U⊗V)`, detecting `ρ`.
    pub pulled_back: Witness,
    /// `tr(W_r σ) = tr(pulled_back · ρ)`
    pub trace_value: f64,
    pub objective: f64,
    pub stage: OrbitStage,
    pub restart: usize,
}

/// Derivative-free compass search with a shrinking step over the
/// coordinates in `active`. Returns the best point, its value and the
/// number of evaluations used. Maximizes `f`.
fn pattern_search<F: Fn(&[f64]) -> f64>(
    f: &F,
    x0: Vec<f64>,
    active: &[usize],
    step0: f64,
    min_step: f64,
    budget: usize,
    stop_at: f64,
) -> (Vec<f64>, f64, usize) {
    let mut x = x0;
    let mut fx = f(&x);
    let mut evals = 1;
    let mut step = step0;
    while step >= min_step && evals < budget && fx < stop_at {
        let mut improved = false;
        for &i in active {
            for dir in [1.0, -1.0] {
                if evals >= budget {
                    break;
                }
                let mut y = x.clone();
                y[i] += dir * step;
                let fy = f(&y);
                evals += 1;
                if fy > fx {
                    x = y;
                    fx = fy;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (x, fx, evals)
}

fn conj_params(rho: &DensityMatrix, x: &[f64]) -> Option<DensityMatrix> {
    let lu = lu_parameterize(x, rho.dims()).ok()?;
    lu.conjugate_state(rho).ok()
}

/// `-‖Im((U⊗V)ρ(U⊗V)†)‖_F / ‖ρ‖_F`, zero exactly on real conjugates.
fn realness_objective(rho: &DensityMatrix, x: &[f64]) -> f64 {
    match conj_params(rho, x) {
        Some(s) => {
            let im = linalg::imag_part(s.matrix());
            -im.norm() / frobenius(rho.matrix())
        }
        None => f64::NEG_INFINITY,
    }
}

/// Frank-Wolfe lower bound of `((U⊗V)ρ(U⊗V)†)⁺` after a capped run.
fn bound_objective(rho: &DensityMatrix, x: &[f64], opts: &OrbitOptions) -> f64 {
    let Some(s) = conj_params(rho, x) else { return f64::NEG_INFINITY };
    let Ok(plus) = DensityMatrix::new(s.base().real_part()) else { return f64::NEG_INFINITY };
    let g = GilbertOptions {
        max_iter: opts.inner_iter,
        seed: opts.seed,
        polish_every: 0,
        confirm_restarts: 32,
        ..opts.confirm
    };
    let rep = gilbert(&plus, &g);
    match rep.verdict {
        SeparabilityVerdict::Separable { .. } => -1.0,
        SeparabilityVerdict::Entangled { lower_bound, .. } => lower_bound,
        SeparabilityVerdict::Inconclusive { best_lower_bound, .. } => best_lower_bound,
    }
}

fn confirm_hit(
    rho: &DensityMatrix,
    x: &[f64],
    objective: f64,
    stage: OrbitStage,
    restart: usize,
    opts: &GilbertOptions,
) -> Option<OrbitHit> {
    let lu = lu_parameterize(x, rho.dims()).ok()?;
    hit_from_lu(rho, lu, x.to_vec(), objective, stage, restart, opts)
}

fn hit_from_lu(
    rho: &DensityMatrix,
    lu: LocalUnitary,
    params: Vec<f64>,
    objective: f64,
    stage: OrbitStage,
    restart: usize,
    opts: &GilbertOptions,
) -> Option<OrbitHit> {
    let sigma = lu.conjugate_state(rho).ok()?;
    let rep = rew_detectable(&sigma, opts).ok()?;
    let RewVerdict::Yes { rew, trace_value, .. } = rep.verdict else { return None };
    if trace_value >= -DEFAULT_DELTA {
        return None;
    }
    let back = lu.pull_back(rew.base()).ok()?;
    let ev = rew.evidence();
    let pulled_back =
        Witness::with_evidence(back, Provenance::LocalUnitaryPullback, ev.restarts, ev.seed).ok()?;
    Some(OrbitHit { lu, params, rew, pulled_back, trace_value, objective, stage, restart })
}

fn random_start<R: Rng>(len: usize, phases: &[usize], phases_only: bool, r: &mut R) -> Vec<f64> {
    let mut x = vec![0.0; len];
    for (i, xi) in x.iter_mut().enumerate() {
        if phases.contains(&i) {
            *xi = r.random_range(-std::f64::consts::PI..std::f64::consts::PI);
        } else if !phases_only {
            *xi = r.random_range(-1.0..1.0);
        }
    }
    x
}

/// Searches the LU orbit of a PPT state for a conjugate with entangled real
/// part, first by making the conjugate real, then by maximizing the
/// Frank-Wolfe lower bound of its real part. Phases are searched before the
/// orthogonal parts.
pub fn search_entangled_real_part(rho: &DensityMatrix, opts: &OrbitOptions) -> Option<OrbitHit> {
    let dims = rho.dims();
    let len = lu_parameter_len(dims);
    let phases = lu_phase_indices(dims);
    let all: Vec<usize> = (0..len).collect();
    let restarts = opts.restarts.max(1);

    // Imaginary part driven to zero.
    let real_tol = 1e-9;
    let runs: Vec<(usize, Vec<f64>, f64)> = (0..restarts)
        .into_par_iter()
        .map(|k| {
            let mut r = stream(opts.seed, k as u64);
            let f = |x: &[f64]| realness_objective(rho, x);
            let x0 = if k == 0 { vec![0.0; len] } else { random_start(len, &phases, true, &mut r) };
            let half = opts.realness_budget / 2;
            let (x, fx, used) = pattern_search(&f, x0, &phases, 0.5, 1e-12, half, -real_tol * 1e-3);
            if fx >= -real_tol {
                return (k, x, fx);
            }
            let x1 = if k == 0 { x } else { random_start(len, &phases, false, &mut r) };
            let (x, fx, _) =
                pattern_search(&f, x1, &all, 0.5, 1e-12, opts.realness_budget - used, -real_tol * 1e-3);
            (k, x, fx)
        })
        .collect();
    let mut ranked: Vec<&(usize, Vec<f64>, f64)> = runs.iter().filter(|r| r.2 >= -real_tol).collect();
    ranked.sort_by(|a, b| b.2.partial_cmp(&a.2).unwrap().then(a.0.cmp(&b.0)));
    for (k, x, fx) in ranked.into_iter().take(2) {
        if let Some(hit) = confirm_hit(rho, x, *fx, OrbitStage::Realness, *k, &opts.confirm) {
            return Some(hit);
        }
    }

    // Lower bound of the real part maximized.
    let eps = opts.confirm.eps_sep;
    let runs: Vec<(usize, Vec<f64>, f64)> = (0..restarts)
        .into_par_iter()
        .map(|k| {
            let mut r = stream(opts.seed ^ 0xb0b0, k as u64);
            let f = |x: &[f64]| bound_objective(rho, x, opts);
            let x0 = if k == 0 { vec![0.0; len] } else { random_start(len, &phases, true, &mut r) };
            let half = opts.budget / 2;
            let (x, fx, used) = pattern_search(&f, x0, &phases, 0.5, 1e-3, half, 10.0 * eps);
            if fx > 10.0 * eps {
                return (k, x, fx);
            }
            let (x, fx, _) = pattern_search(&f, x, &all, 0.25, 1e-3, opts.budget - used, 10.0 * eps);
            (k, x, fx)
        })
        .collect();
    let best = runs
        .into_iter()
        .reduce(|a, b| if b.2 > a.2 { b } else { a })
        .expect("at least one restart");
    if best.2 > 0.0 {
        return confirm_hit(rho, &best.1, best.2, OrbitStage::LowerBound, best.0, &opts.confirm);
    }
    None
}

#[derive(Debug, Clone)]
pub enum TrialTransform {
    Identity,
    Conjugate,
    PartialTranspose,
    Swap,
    Local(LocalUnitary),
}

impl TrialTransform {
    pub fn describe(&self) -> String {
        match self {
            TrialTransform::Identity => "identity".into(),
            TrialTransform::Conjugate => "complex conjugate".into(),
            TrialTransform::PartialTranspose => "partial transpose".into(),
            TrialTransform::Swap => "swap".into(),
            TrialTransform::Local(_) => "local unitary".into(),
        }
    }

    fn apply(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        match self {
            TrialTransform::Identity => Ok(rho.clone()),
            TrialTransform::Conjugate => Ok(rho.conj()),
            TrialTransform::PartialTranspose => rho.partial_transpose(),
            TrialTransform::Swap => Ok(rho.swap_sides()),
            TrialTransform::Local(lu) => lu.conjugate_state(rho),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PrsTrial {
    pub transform: TrialTransform,
    pub verdict: RewVerdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PrsStatus {
    /// Every trial returned No; membership is not refuted (nor proven).
    NotRefuted,
    /// Some trial found a real witness; `ρ` is outside the set.
    Refuted { trial: usize },
    /// No trial returned Yes but some were inconclusive.
    Inconclusive,
}

#[derive(Debug, Clone)]
pub struct PrsEvidence {
    pub trials: Vec<PrsTrial>,
    pub status: PrsStatus,
    pub seed: u64,
}

/// Random LU number `k` out of `n`: the first half are diagonal unitaries
/// with quarter-turn phases, the rest Haar unitaries.
pub fn trial_unitary(dims: (usize, usize), seed: u64, k: usize, n: usize) -> LocalUnitary {
    let mut r = stream(seed, k as u64);
    let (m, nb) = dims;
    let (u, v) = if k < n.div_ceil(2) {
        let mut quarter = |d: usize| -> Vec<f64> {
            (0..d).map(|_| r.random_range(0..4) as f64 * std::f64::consts::FRAC_PI_2).collect()
        };
        let pa = quarter(m);
        let pb = quarter(nb);
        (diag_unitary(&pa), diag_unitary(&pb))
    } else {
        (haar_unitary(m, &mut r), haar_unitary(nb, &mut r))
    };
    LocalUnitary::new(u, v).expect("sampled unitaries are unitary")
}

/// Trials evaluated together; evaluation stops after the first batch that
/// refutes membership.
pub const PRS_BATCH: usize = 8;

/// Runs `rew_detectable` on `ρ`, its conjugate, partial transpose and swap,
/// and on `n` seeded LU conjugates of a PPT state.
pub fn prs_evidence(rho: &DensityMatrix, n: usize, seed: u64, opts: &GilbertOptions) -> Result<PrsEvidence> {
    if !rho.is_ppt(PPT_TOL).is_ppt() {
        return Err(Error::NotApplicable("state is NPT".into()));
    }
    let mut transforms = vec![
        TrialTransform::Identity,
        TrialTransform::Conjugate,
        TrialTransform::PartialTranspose,
        TrialTransform::Swap,
    ];
    transforms.extend((0..n).map(|k| TrialTransform::Local(trial_unitary(rho.dims(), seed, k, n))));
    let mut trials: Vec<PrsTrial> = Vec::with_capacity(transforms.len());
    let mut pending = transforms.into_iter().peekable();
    while pending.peek().is_some() {
        let batch: Vec<TrialTransform> = pending.by_ref().take(PRS_BATCH).collect();
        let done: Vec<PrsTrial> = batch
            .into_par_iter()
            .map(|t| {
                let verdict = t
                    .apply(rho)
                    .and_then(|s| rew_detectable(&s, opts))
                    .map(|r| r.verdict)
                    .unwrap_or(RewVerdict::Inconclusive {
                        best_distance: f64::NAN,
                        best_lower_bound: f64::NAN,
                    });
                PrsTrial { transform: t, verdict }
            })
            .collect();
        trials.extend(done);
        if trials.iter().any(|t| t.verdict.is_yes()) {
            break;
        }
    }
    let status = if let Some(i) = trials.iter().position(|t| t.verdict.is_yes()) {
        PrsStatus::Refuted { trial: i }
    } else if trials.iter().all(|t| matches!(t.verdict, RewVerdict::No { .. })) {
        PrsStatus::NotRefuted
    } else {
        PrsStatus::Inconclusive
    };
    Ok(PrsEvidence { trials, status, seed })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowchartOptions {
    pub orbit: OrbitOptions,
    pub gilbert: GilbertOptions,
    /// Frank-Wolfe iterations for the separability pre-check of `ρ` itself.
    pub precheck_iter: usize,
    pub prs_trials: usize,
    pub seed: u64,
}

impl Default for FlowchartOptions {
    fn default() -> Self {
        Self {
            orbit: OrbitOptions::default(),
            gilbert: GilbertOptions::default(),
            precheck_iter: 1000,
            prs_trials: 32,
            seed: 0,
        }
    }
}

impl FlowchartOptions {
    pub fn with_seed(seed: u64) -> Self {
        let mut o = Self::default();
        o.set_seed(seed);
        o
    }

    pub fn set_seed(&mut self, seed: u64) {
        self.seed = seed;
        self.orbit.seed = seed;
        self.orbit.confirm.seed = seed;
        self.gilbert.seed = seed;
    }
}

#[derive(Debug, Clone)]
pub enum FlowchartVerdict {
    NptDetected(Box<NptWitness>),
    RewDetected { rew: Witness, trace_value: f64 },
    EluDetected(Box<OrbitHit>),
    /// Failure to refute membership. `separable` is set when `ρ` itself was
    /// certified separable.
    PrsCandidate { evidence: Option<PrsEvidence>, separable: Option<ProductEnsemble> },
    Inconclusive { budget: usize, reason: String },
}

impl FlowchartVerdict {
    pub fn tag(&self) -> &'static str {
        match self {
            FlowchartVerdict::NptDetected(_) => "npt-detected",
            FlowchartVerdict::RewDetected { .. } => "rew-detected",
            FlowchartVerdict::EluDetected(_) => "elu-detected",
            FlowchartVerdict::PrsCandidate { .. } => "prs-candidate",
            FlowchartVerdict::Inconclusive { .. } => "inconclusive",
        }
    }

    pub fn is_detected(&self) -> bool {
        matches!(
            self,
            FlowchartVerdict::NptDetected(_)
                | FlowchartVerdict::RewDetected { .. }
                | FlowchartVerdict::EluDetected(_)
        )
    }

    /// Process exit code: 0 detected, 2 candidate, 3 inconclusive.
    pub fn exit_code(&self) -> i32 {
        match self {
            FlowchartVerdict::PrsCandidate { .. } => 2,
            FlowchartVerdict::Inconclusive { .. } => 3,
            _ => 0,
        }
    }
}

/// Decides whether `ρ` is detected by a witness LU-equivalent to a real one:
/// NPT first, then a real witness, then an LU orbit search, and finally the
/// evidence trials.
pub fn flowchart_classify(rho: &DensityMatrix, opts: &FlowchartOptions) -> Result<FlowchartVerdict> {
    if !rho.is_ppt(PPT_TOL).is_ppt() {
        return Ok(FlowchartVerdict::NptDetected(Box::new(witness_from_npt(rho)?)));
    }
    let rep = rew_detectable(rho, &opts.gilbert)?;
    if let RewVerdict::Yes { rew, trace_value, .. } = rep.verdict {
        return Ok(FlowchartVerdict::RewDetected { rew, trace_value });
    }
    let pre = GilbertOptions { max_iter: opts.precheck_iter, ..opts.gilbert };
    if let SeparabilityVerdict::Separable { ensemble, .. } = gilbert(rho, &pre).verdict {
        return Ok(FlowchartVerdict::PrsCandidate { evidence: None, separable: Some(ensemble) });
    }
    if let Some(hit) = search_entangled_real_part(rho, &opts.orbit) {
        return Ok(FlowchartVerdict::EluDetected(Box::new(hit)));
    }
    let evidence = prs_evidence(rho, opts.prs_trials, opts.seed, &opts.gilbert)?;
    match evidence.status {
        PrsStatus::Refuted { trial } => {
            if let TrialTransform::Local(lu) = &evidence.trials[trial].transform {
                if let Some(hit) =
                    hit_from_lu(rho, lu.clone(), Vec::new(), 0.0, OrbitStage::Trial, trial, &opts.gilbert)
                {
                    return Ok(FlowchartVerdict::EluDetected(Box::new(hit)));
                }
            }
            Ok(FlowchartVerdict::Inconclusive {
                budget: opts.orbit.budget,
                reason: format!(
                    "trial '{}' found a real witness but no LU certificate was assembled",
                    evidence.trials[trial].transform.describe()
                ),
            })
        }
        PrsStatus::NotRefuted => Ok(FlowchartVerdict::PrsCandidate { evidence: Some(evidence), separable: None }),
        PrsStatus::Inconclusive => Ok(FlowchartVerdict::Inconclusive {
            budget: opts.orbit.budget,
            reason: "orbit search failed and some evidence trials were inconclusive".into(),
        }),
    }
}

/// Seeded Haar LU used by property tests and the CLI.
pub fn random_local_unitary(dims: (usize, usize), seed: u64) -> LocalUnitary {
    let mut r = rng(seed);
    LocalUnitary::new(haar_unitary(dims.0, &mut r), haar_unitary(dims.1, &mut r)).expect("Haar sample")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::unitarity_residual;
    use crate::states::{bell_phase_state, quqart_pair};

    #[test]
    fn parameterization_basics() {
        let dims = (3, 2);
        assert_eq!(lu_parameter_len(dims), 3 + 3 + 1 + 2);
        let lu = lu_parameterize(&vec![0.0; 9], dims).unwrap();
        assert!(linalg::max_abs(&(lu.u.clone() - CMatrix::identity(3, 3))) < 1e-15);
        assert!(linalg::max_abs(&(lu.v.clone() - CMatrix::identity(2, 2))) < 1e-15);
        let mut x = vec![0.0; 9];
        for i in lu_phase_indices(dims) {
            x[i] = 0.3 * i as f64;
        }
        let lu = lu_parameterize(&x, dims).unwrap();
        for (i, j) in [(0, 1), (1, 2), (0, 2)] {
            assert_eq!(lu.u[(i, j)].norm(), 0.0);
        }
        let mut r = rng(1);
        let x: Vec<f64> = (0..9).map(|_| r.random_range(-2.0..2.0)).collect();
        let lu = lu_parameterize(&x, dims).unwrap();
        assert!(unitarity_residual(&lu.u) < 1e-12 && unitarity_residual(&lu.v) < 1e-12);
        assert!(lu.factor_residual() < 1e-9);
        assert!(lu_parameterize(&[0.0; 3], dims).is_err());
    }

    #[test]
    fn bell_phase_removed_by_search() {
        let rho = bell_phase_state(std::f64::consts::FRAC_PI_2).unwrap();
        let hit = search_entangled_real_part(&rho, &OrbitOptions { restarts: 2, ..Default::default() })
            .expect("phase removal");
        assert_eq!(hit.stage, OrbitStage::Realness);
        assert!(hit.trace_value < -1e-3);
        let replay = hit.pulled_back.expectation(&rho).unwrap();
        assert!((replay - hit.trace_value).abs() < 1e-12);
    }

    #[test]
    fn flowchart_npt() {
        let v = flowchart_classify(&bell_phase_state(1.0).unwrap(), &FlowchartOptions::default()).unwrap();
        assert_eq!(v.tag(), "npt-detected");
        assert_eq!(v.exit_code(), 0);
    }

    #[test]
    fn flowchart_separable() {
        let v = flowchart_classify(&DensityMatrix::maximally_mixed((2, 2)), &FlowchartOptions::default())
            .unwrap();
        assert_eq!(v.tag(), "prs-candidate");
        assert_eq!(v.exit_code(), 2);
    }

    #[test]
    fn prs_evidence_requires_ppt() {
        assert!(matches!(
            prs_evidence(&bell_phase_state(0.0).unwrap(), 2, 0, &GilbertOptions::default()),
            Err(Error::NotApplicable(_))
        ));
        let ev = prs_evidence(&DensityMatrix::maximally_mixed((2, 2)), 4, 0, &GilbertOptions::default()).unwrap();
        assert_eq!(ev.status, PrsStatus::NotRefuted);
        assert_eq!(ev.trials.len(), 8);
    }

    #[test]
    fn quqart_orbit_search() {
        let q = quqart_pair().unwrap();
        let hit = search_entangled_real_part(&q.sigma, &OrbitOptions::default()).expect("LU found");
        assert!(hit.rew.is_real(0.0));
        assert!(hit.trace_value < 0.0);
    }
}
