//! Membership tests for the separable set.
//!
//! [`gilbert`] runs Frank-Wolfe on `‖ρ − σ‖²_F` over separable `σ`, with the
//! see-saw maximizer from [`seesaw`] as linear oracle. Results are either an
//! explicit product ensemble, a hyperplane witness, or inconclusive.

pub mod seesaw;
mod polish;

use log::debug;

use crate::bipartite::{BipartiteOperator, DensityMatrix};
use crate::error::{Error, Result};
use crate::linalg::{self, frobenius, hs_inner, CMatrix, CVector, RMatrix, C64};
use crate::witness::{detects, Provenance, Witness, DEFAULT_DELTA};

pub use seesaw::{
    block_positivity, max_product_expectation, min_product_expectation, BlockPositivity,
    ProductOptimum,
};

/// `Σ_k w_k |a_k b_k⟩⟨a_k b_k|` with unit `a_k`, `b_k`.
#[derive(Debug, Clone)]
pub struct ProductEnsemble {
    pub dims: (usize, usize),
    pub weights: Vec<f64>,
    pub pairs: Vec<(CVector, CVector)>,
}

impl ProductEnsemble {
    pub fn new(dims: (usize, usize), weights: Vec<f64>, pairs: Vec<(CVector, CVector)>) -> Result<Self> {
        if weights.len() != pairs.len() || weights.is_empty() {
            return Err(Error::InvalidInput("weights and pairs differ in length or are empty".into()));
        }
        let total: f64 = weights.iter().sum();
        if weights.iter().any(|w| !(*w > 0.0)) || (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidInput(format!("weights must be positive and sum to 1 (sum {total})")));
        }
        for (a, b) in &pairs {
            if a.len() != dims.0 || b.len() != dims.1 {
                return Err(Error::InvalidInput("product vector has the wrong length".into()));
            }
            if (a.norm() - 1.0).abs() > 1e-12 || (b.norm() - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidInput("product vector is not normalized".into()));
            }
        }
        Ok(Self { dims, weights, pairs })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn reconstruct(&self) -> CMatrix {
        let d = self.dims.0 * self.dims.1;
        let mut m = CMatrix::zeros(d, d);
        for (w, (a, b)) in self.weights.iter().zip(&self.pairs) {
            m += linalg::outer(&linalg::kron_vec(a, b)) * C64::new(*w, 0.0);
        }
        m
    }

    /// `‖ρ − Σ_k w_k P_k‖_F`
    pub fn distance(&self, rho: &DensityMatrix) -> f64 {
        frobenius(&(rho.matrix() - self.reconstruct()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GilbertOptions {
    pub eps_sep: f64,
    pub max_iter: usize,
    pub seed: u64,
    /// Random see-saw starts per Frank-Wolfe iteration, on top of warm starts.
    pub oracle_restarts: usize,
    /// Restarts used to confirm an entangled verdict and to check the witness.
    pub confirm_restarts: usize,
    /// Iterations between fully corrective reweightings of the active atoms.
    pub corrective_every: usize,
    /// Iterations between nonlinear least-squares polishes (0 disables them).
    pub polish_every: usize,
}

impl Default for GilbertOptions {
    fn default() -> Self {
        Self {
            eps_sep: 1e-6,
            max_iter: 5000,
            seed: 0,
            oracle_restarts: 6,
            confirm_restarts: 128,
            corrective_every: 5,
            polish_every: 10,
        }
    }
}

#[derive(Debug, Clone)]
pub enum SeparabilityVerdict {
    Separable { ensemble: ProductEnsemble, distance: f64 },
    Entangled { witness: Witness, lower_bound: f64, trace_value: f64 },
    Inconclusive { iterations: usize, best_distance: f64, best_lower_bound: f64 },
}

impl SeparabilityVerdict {
    pub fn tag(&self) -> &'static str {
        match self {
            SeparabilityVerdict::Separable { .. } => "separable",
            SeparabilityVerdict::Entangled { .. } => "entangled",
            SeparabilityVerdict::Inconclusive { .. } => "inconclusive",
        }
    }
}

#[derive(Debug, Clone)]
pub struct GilbertReport {
    pub verdict: SeparabilityVerdict,
    /// `‖ρ − σ_k‖²_F` at the start of every iteration, then the final value.
    pub history: Vec<f64>,
    pub iterations: usize,
    /// Largest lower bound seen; negative while no hyperplane separates.
    pub best_lower_bound: f64,
    pub options: GilbertOptions,
}

impl GilbertReport {
    /// Largest increase between consecutive objective values.
    pub fn max_increase(&self) -> f64 {
        self.history.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Atom {
    pub a: CVector,
    pub b: CVector,
    pub proj: CMatrix,
}

impl Atom {
    pub fn new(a: CVector, b: CVector) -> Self {
        let a = a.normalize();
        let b = b.normalize();
        let proj = linalg::outer(&linalg::kron_vec(&a, &b));
        Self { a, b, proj }
    }

    fn overlap(&self, other: &Atom) -> f64 {
        self.a.dotc(&other.a).norm_sqr() * self.b.dotc(&other.b).norm_sqr()
    }
}

pub(crate) struct Iterate {
    pub atoms: Vec<Atom>,
    pub weights: Vec<f64>,
    pub sigma: CMatrix,
}

impl Iterate {
    fn maximally_mixed(dims: (usize, usize)) -> Self {
        let (m, n) = dims;
        let mut atoms = Vec::with_capacity(m * n);
        for i in 0..m {
            for j in 0..n {
                let mut a = CVector::zeros(m);
                a[i] = C64::new(1.0, 0.0);
                let mut b = CVector::zeros(n);
                b[j] = C64::new(1.0, 0.0);
                atoms.push(Atom::new(a, b));
            }
        }
        let w = 1.0 / (m * n) as f64;
        let weights = vec![w; m * n];
        let mut it = Self { atoms, weights, sigma: CMatrix::zeros(m * n, m * n) };
        it.rebuild();
        it
    }

    pub fn rebuild(&mut self) {
        let d = self.sigma.nrows();
        let mut s = CMatrix::zeros(d, d);
        for (w, at) in self.weights.iter().zip(&self.atoms) {
            s += &at.proj * C64::new(*w, 0.0);
        }
        self.sigma = s;
    }

    fn drop_zero(&mut self) {
        let mut k = 0;
        while k < self.atoms.len() {
            if self.weights[k] <= 0.0 {
                self.weights.swap_remove(k);
                self.atoms.swap_remove(k);
            } else {
                k += 1;
            }
        }
    }

    /// Fully corrective step: optimal weights over the current atoms.
    pub fn reweight(&mut self, rho: &CMatrix, iters: usize) {
        let k = self.atoms.len();
        let g = RMatrix::from_fn(k, k, |i, j| self.atoms[i].overlap(&self.atoms[j]));
        let c: Vec<f64> = self.atoms.iter().map(|at| hs_inner(rho, &at.proj)).collect();
        self.weights = simplex_qp(&g, &c, &self.weights, iters);
        self.drop_zero();
        self.rebuild();
    }
}

/// Euclidean projection onto the probability simplex.
fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    let mut css = 0.0;
    let mut theta = 0.0;
    for (i, ui) in u.iter().enumerate() {
        css += ui;
        let t = (css - 1.0) / (i + 1) as f64;
        if ui - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|x| (x - theta).max(0.0)).collect()
}

/// Minimizes `wᵀGw − 2cᵀw` over the simplex by monotone accelerated
/// projected gradient, starting from the feasible `w0`.
fn simplex_qp(g: &RMatrix, c: &[f64], w0: &[f64], iters: usize) -> Vec<f64> {
    let k = c.len();
    let f = |w: &[f64]| {
        let mut s = 0.0;
        for i in 0..k {
            let gi: f64 = (0..k).map(|j| g[(i, j)] * w[j]).sum();
            s += w[i] * gi - 2.0 * c[i] * w[i];
        }
        s
    };
    let grad = |w: &[f64]| -> Vec<f64> {
        (0..k).map(|i| 2.0 * ((0..k).map(|j| g[(i, j)] * w[j]).sum::<f64>() - c[i])).collect()
    };
    let lip = 2.0
        * (0..k).map(|i| (0..k).map(|j| g[(i, j)].abs()).sum::<f64>()).fold(0.0, f64::max).max(1e-300);
    let mut x = w0.to_vec();
    let mut fx = f(&x);
    let mut y = x.clone();
    let mut t = 1.0f64;
    for _ in 0..iters {
        let gy = grad(&y);
        let step: Vec<f64> = y.iter().zip(&gy).map(|(yi, gi)| yi - gi / lip).collect();
        let z = project_simplex(&step);
        let fz = f(&z);
        let x_prev = x.clone();
        if fz <= fx {
            x = z.clone();
            fx = fz;
        }
        let t_next = (1.0 + (1.0 + 4.0 * t * t).sqrt()) / 2.0;
        y = (0..k)
            .map(|i| x[i] + (t / t_next) * (z[i] - x[i]) + ((t - 1.0) / t_next) * (x[i] - x_prev[i]))
            .collect();
        t = t_next;
        let moved: f64 = x.iter().zip(&x_prev).map(|(a, b)| (a - b).abs()).sum();
        if moved == 0.0 && t > 50.0 {
            break;
        }
    }
    x
}

fn iteration_seed(seed: u64, k: usize) -> u64 {
    seed ^ (k as u64 + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15)
}

fn residual_operator(rho: &CMatrix, sigma: &CMatrix, dims: (usize, usize)) -> BipartiteOperator {
    BipartiteOperator::from_matrix(dims, rho - sigma).expect("finite Hermitian difference")
}

/// Hyperplane lower bound `⟨ρ−σ, ρ−π⟩/‖ρ−σ‖_F` on the distance from `ρ` to
/// the separable set.
pub fn hyperplane_lower_bound(rho: &CMatrix, sigma: &CMatrix, c: f64) -> f64 {
    let r = rho - sigma;
    let dist = frobenius(&r);
    if dist == 0.0 {
        return f64::NEG_INFINITY;
    }
    (hs_inner(&r, rho) - c) / dist
}

pub fn gilbert(rho: &DensityMatrix, opts: &GilbertOptions) -> GilbertReport {
    let dims = rho.dims();
    let target = rho.matrix().clone();
    let mut it = Iterate::maximally_mixed(dims);
    let mut history = Vec::new();
    let mut best_lb = f64::NEG_INFINITY;
    let mut last_a: Option<CVector> = None;
    let eps = opts.eps_sep;

    for k in 0..opts.max_iter.max(1) {
        let r = &target - &it.sigma;
        let dist = frobenius(&r);
        history.push(dist * dist);
        if dist <= eps {
            if let Some(verdict) = finalize_separable(rho, &it, eps) {
                return GilbertReport { verdict, history, iterations: k, best_lower_bound: best_lb, options: *opts };
            }
        }

        let r_op = residual_operator(&target, &it.sigma, dims);
        let mut warm: Vec<CVector> = last_a.iter().cloned().collect();
        if let Some(idx) = heaviest(&it.weights) {
            warm.push(it.atoms[idx].a.clone());
        }
        let seed_k = iteration_seed(opts.seed, k);
        let mut opt = seesaw::maximize_with_starts(&r_op, &warm, opts.oracle_restarts, seed_k);
        let mut lb = (hs_inner(&r, &target) - opt.value) / dist;

        if lb > 10.0 * eps {
            let confirm = seesaw::maximize_with_starts(&r_op, &[opt.a.clone()], opts.confirm_restarts, !seed_k);
            if confirm.value > opt.value {
                opt = confirm;
            }
            lb = (hs_inner(&r, &target) - opt.value) / dist;
            if lb > 10.0 * eps {
                let c = midway(opt.value, hs_inner(&r, &target));
                match hyperplane_witness(&r_op, c, opts.confirm_restarts, opts.seed) {
                    Ok(witness) => {
                        let trace_value = witness.expectation(rho).unwrap_or(f64::NAN);
                        if trace_value < 0.0 {
                            history.push(dist * dist);
                            return GilbertReport {
                                verdict: SeparabilityVerdict::Entangled { witness, lower_bound: lb, trace_value },
                                history,
                                iterations: k + 1,
                                best_lower_bound: lb.max(best_lb),
                                options: *opts,
                            };
                        }
                    }
                    Err(e) => debug!("hyperplane witness rejected at iteration {k}: {e}"),
                }
            }
        }
        best_lb = best_lb.max(lb);
        last_a = Some(opt.a.clone());

        frank_wolfe_step(&target, &mut it, Atom::new(opt.a, opt.b));
        if opts.corrective_every > 0 && (k + 1) % opts.corrective_every == 0 {
            it.reweight(&target, 200);
        }
        if opts.polish_every > 0 && (k + 1) % opts.polish_every == 0 && lb < 0.0 {
            polish::polish(&target, &mut it, eps / 100.0);
        }
    }

    let r = &target - &it.sigma;
    let dist = frobenius(&r);
    history.push(dist * dist);
    if dist <= eps {
        if let Some(verdict) = finalize_separable(rho, &it, eps) {
            return GilbertReport { verdict, history, iterations: opts.max_iter, best_lower_bound: best_lb, options: *opts };
        }
    }
    GilbertReport {
        verdict: SeparabilityVerdict::Inconclusive {
            iterations: opts.max_iter,
            best_distance: dist,
            best_lower_bound: best_lb,
        },
        history,
        iterations: opts.max_iter,
        best_lower_bound: best_lb,
        options: *opts,
    }
}

fn heaviest(w: &[f64]) -> Option<usize> {
    (0..w.len()).max_by(|&i, &j| w[i].partial_cmp(&w[j]).unwrap_or(std::cmp::Ordering::Equal))
}

/// Exact line search on the segment from `σ` to the new atom.
fn frank_wolfe_step(rho: &CMatrix, it: &mut Iterate, atom: Atom) {
    let r = rho - &it.sigma;
    let d = &atom.proj - &it.sigma;
    let dd = hs_inner(&d, &d);
    if dd <= 0.0 {
        return;
    }
    let gamma = (hs_inner(&r, &d) / dd).clamp(0.0, 1.0);
    if gamma == 0.0 {
        return;
    }
    for w in it.weights.iter_mut() {
        *w *= 1.0 - gamma;
    }
    if let Some(k) = it.atoms.iter().position(|at| at.overlap(&atom) > 1.0 - 1e-14) {
        it.weights[k] += gamma;
    } else {
        it.atoms.push(atom);
        it.weights.push(gamma);
    }
    it.drop_zero();
    it.rebuild();
}

/// Ensemble with tiny weights dropped, then greedily thinned while the
/// reconstruction stays within `eps` of `ρ`.
fn finalize_separable(rho: &DensityMatrix, it: &Iterate, eps: f64) -> Option<SeparabilityVerdict> {
    let mut items: Vec<(f64, CVector, CVector)> = it
        .weights
        .iter()
        .zip(&it.atoms)
        .filter(|(w, _)| **w >= 1e-10)
        .map(|(w, at)| (*w, at.a.clone(), at.b.clone()))
        .collect();
    let build = |items: &[(f64, CVector, CVector)]| -> Option<ProductEnsemble> {
        let total: f64 = items.iter().map(|x| x.0).sum();
        let weights = items.iter().map(|x| x.0 / total).collect();
        let pairs = items.iter().map(|x| (x.1.normalize(), x.2.normalize())).collect();
        ProductEnsemble::new(rho.dims(), weights, pairs).ok()
    };
    let mut ensemble = build(&items)?;
    let mut distance = ensemble.distance(rho);
    if distance > eps {
        return None;
    }
    items.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap_or(std::cmp::Ordering::Equal));
    let mut k = 0;
    while k < items.len() && items.len() > 1 {
        let mut trial = items.clone();
        trial.remove(k);
        match build(&trial) {
            Some(e) => {
                let d = e.distance(rho);
                if d <= eps {
                    items = trial;
                    ensemble = e;
                    distance = d;
                    continue;
                }
            }
            None => {}
        }
        k += 1;
    }
    Some(SeparabilityVerdict::Separable { ensemble, distance })
}

/// Offset halfway between the best product value `c` and `⟨r, ρ⟩`. The
/// see-saw can stop short of the true maximum on flat optima, so the witness
/// keeps half of the gap as block-positivity margin.
fn midway(c: f64, r_rho: f64) -> f64 {
    c + 0.5 * (r_rho - c)
}

/// `W = c·I − (ρ − σ)`
fn hyperplane_witness(r: &BipartiteOperator, c: f64, restarts: usize, seed: u64) -> Result<Witness> {
    let d = r.dim();
    let id = CMatrix::identity(d, d) * C64::new(c, 0.0);
    let w = BipartiteOperator::from_matrix(r.dims(), id - r.matrix())?;
    Witness::with_evidence(w, Provenance::Hyperplane, restarts, seed)
}

/// Witness from the hyperplane through the product state `π* = |a,b⟩⟨a,b|`
/// separating `ρ` from the iterate `σ`.
pub fn witness_from_hyperplane(
    rho: &DensityMatrix,
    sigma: &CMatrix,
    product: (&CVector, &CVector),
    restarts: usize,
    seed: u64,
) -> Result<Witness> {
    let dims = rho.dims();
    let r = residual_operator(rho.matrix(), sigma, dims);
    let mut c = r.product_expectation(product.0, product.1);
    if hyperplane_lower_bound(rho.matrix(), sigma, c) <= 0.0 {
        return Err(Error::InvalidState("hyperplane does not separate the state".into()));
    }
    let opt = seesaw::maximize_with_starts(&r, &[product.0.clone()], restarts, seed);
    c = c.max(opt.value);
    if hyperplane_lower_bound(rho.matrix(), sigma, c) <= 0.0 {
        return Err(Error::InvalidState("a better product state closes the gap".into()));
    }
    let w = hyperplane_witness(&r, midway(c, hs_inner(r.matrix(), rho.matrix())), restarts, seed)?;
    if w.expectation(rho)? >= 0.0 {
        return Err(Error::InvalidState("witness does not detect the state".into()));
    }
    Ok(w)
}

/// `W⁺ = (W + W*)/2`, which detects every real state that `W` detects.
pub fn realify_witness(w: &Witness, rho_real: &DensityMatrix) -> Result<Witness> {
    if !rho_real.is_real(1e-12 * rho_real.op().max_abs()) {
        return Err(Error::NotApplicable("state is not real".into()));
    }
    if !detects(w, rho_real, DEFAULT_DELTA)?.detected {
        return Err(Error::NotApplicable("witness does not detect the state".into()));
    }
    if linalg::max_imag(w.matrix()) == 0.0 {
        return Ok(w.clone());
    }
    let ev = w.evidence();
    Witness::with_evidence(w.base().real_part(), Provenance::Realified, ev.restarts, ev.seed)
}

#[derive(Debug, Clone)]
pub enum RewVerdict {
    /// A real witness detecting `ρ` (through `ρ⁺`).
    Yes { rew: Witness, trace_value: f64, lower_bound: f64 },
    /// `ρ⁺` is separable, so no real witness detects `ρ`.
    No { ensemble: ProductEnsemble, distance: f64 },
    Inconclusive { best_distance: f64, best_lower_bound: f64 },
}

impl RewVerdict {
    pub fn tag(&self) -> &'static str {
        match self {
            RewVerdict::Yes { .. } => "yes",
            RewVerdict::No { .. } => "no",
            RewVerdict::Inconclusive { .. } => "inconclusive",
        }
    }

    pub fn is_yes(&self) -> bool {
        matches!(self, RewVerdict::Yes { .. })
    }
}

#[derive(Debug, Clone)]
pub struct RewReport {
    pub verdict: RewVerdict,
    pub real_part: DensityMatrix,
    pub gilbert: GilbertReport,
}

/// Decides whether a real witness detects `ρ` by testing `ρ⁺` for
/// separability.
pub fn rew_detectable(rho: &DensityMatrix, opts: &GilbertOptions) -> Result<RewReport> {
    let plus = DensityMatrix::new(rho.base().real_part())?;
    let report = gilbert(&plus, opts);
    let verdict = match &report.verdict {
        SeparabilityVerdict::Separable { ensemble, distance } => {
            RewVerdict::No { ensemble: ensemble.clone(), distance: *distance }
        }
        SeparabilityVerdict::Entangled { witness, lower_bound, .. } => {
            let rew = realify_witness(witness, &plus)?;
            let trace_value = rew.expectation(rho)?;
            RewVerdict::Yes { rew, trace_value, lower_bound: *lower_bound }
        }
        SeparabilityVerdict::Inconclusive { best_distance, best_lower_bound, .. } => {
            RewVerdict::Inconclusive { best_distance: *best_distance, best_lower_bound: *best_lower_bound }
        }
    };
    Ok(RewReport { verdict, real_part: plus, gilbert: report })
}
