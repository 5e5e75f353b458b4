//! Concrete state and witness families, plus the structural facts about real
//! parts of PPT states.

use log::warn;
use rand::Rng;

use crate::bipartite::{BipartiteOperator, DensityMatrix, PPT_TOL};
use crate::error::{Error, Result};
use crate::linalg::{
    self, hermitian_eig, max_abs, to_complex, CMatrix, CVector, Hermitian, RMatrix, C64, I, ONE,
    ZERO,
};
use crate::orbit::LocalUnitary;
use crate::random::rng;
use crate::witness::{Provenance, Witness};

/// `(|00⟩ + e^{iθ}|11⟩)/√2`
pub fn bell_phase_vector(theta: f64) -> CVector {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut v = CVector::zeros(4);
    v[0] = C64::new(s, 0.0);
    v[3] = C64::from_polar(s, theta);
    v
}

pub fn bell_phase_state(theta: f64) -> Result<DensityMatrix> {
    DensityMatrix::pure((2, 2), &bell_phase_vector(theta))
}

/// `W(θ) = |ψ(θ)⟩⟨ψ(θ)|^Γ`
pub fn witness_theta(theta: f64) -> Result<Witness> {
    let rho = bell_phase_state(theta)?;
    Witness::new(rho.base().partial_transpose(), Provenance::PartialTransposeOfPure)
}

/// Hermitian matrix whose real part is `W(0)` but which has two negative
/// eigenvalues, so it is not a witness.
pub fn h_counterexample() -> Hermitian {
    let re = [
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 0.0, 1.0],
    ];
    let im = [
        [0.0, 1.0, 2.0, 3.0],
        [-1.0, 0.0, 0.0, 4.0],
        [-2.0, 0.0, 0.0, 5.0],
        [-3.0, -4.0, -5.0, 0.0],
    ];
    let m = CMatrix::from_fn(4, 4, |i, j| C64::new(re[i][j], im[i][j]) * 0.5);
    Hermitian::new(m).expect("finite square matrix")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpbAngles {
    pub gamma_a: f64,
    pub theta_a: f64,
    pub phi_a: f64,
    pub gamma_b: f64,
    pub theta_b: f64,
    pub phi_b: f64,
}

impl UpbAngles {
    pub fn uniform(gamma: f64, theta: f64, phi: f64) -> Self {
        Self { gamma_a: gamma, theta_a: theta, phi_a: phi, gamma_b: gamma, theta_b: theta, phi_b: phi }
    }

    pub fn to_array(&self) -> [f64; 6] {
        [self.gamma_a, self.theta_a, self.phi_a, self.gamma_b, self.theta_b, self.phi_b]
    }

    pub fn from_array(a: [f64; 6]) -> Self {
        Self { gamma_a: a[0], theta_a: a[1], phi_a: a[2], gamma_b: a[3], theta_b: a[4], phi_b: a[5] }
    }

    /// Draws angles from a seeded generator until the five projectors form a
    /// rank-5 projector, away from the degenerate values of sin and cos.
    pub fn search(seed: u64) -> (Self, usize) {
        let mut r = rng(seed);
        let mut draws = 0;
        loop {
            draws += 1;
            let mut a = [0.0; 6];
            for (k, x) in a.iter_mut().enumerate() {
                *x = if k % 3 == 2 { r.random_range(0.2..2.9) } else { r.random_range(0.15..1.4) };
            }
            let angles = Self::from_array(a);
            if let Ok(fam) = upb_family(angles) {
                if fam.warnings.is_empty() && fam.projector_residual() <= 1e-8 {
                    return (angles, draws);
                }
            }
        }
    }
}

/// The two-qutrit quintuple `|α_k⟩ ⊗ |β_k⟩`.
#[derive(Debug, Clone)]
pub struct UpbFamily {
    pub angles: UpbAngles,
    pub alpha: Vec<CVector>,
    pub beta: Vec<CVector>,
    pub n_a: f64,
    pub n_b: f64,
    pub warnings: Vec<String>,
}

pub fn upb_normalization(gamma: f64, theta: f64) -> f64 {
    (gamma.cos().powi(2) + gamma.sin().powi(2) * theta.cos().powi(2)).sqrt()
}

fn ket3(c0: C64, c1: C64, c2: C64) -> CVector {
    CVector::from_vec(vec![c0, c1, c2])
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Vectors `v_0..v_4` in the shared pattern of both sides; the caller
/// permutes them into `α` or `β` order.
fn upb_side(gamma: f64, theta: f64, phi: f64) -> Result<(CVector, CVector, CVector, f64)> {
    let n = upb_normalization(gamma, theta);
    if !(n > 1e-12) || !n.is_finite() {
        return Err(Error::DegenerateParameters(format!(
            "normalization vanishes at gamma = {gamma}, theta = {theta}"
        )));
    }
    let (sg, cg) = gamma.sin_cos();
    let (st, ct) = theta.sin_cos();
    let e = C64::from_polar(1.0, phi);
    let tilted = ket3(re(ct), ZERO, re(st));
    let mixed = ket3(re(sg * st), e * cg, re(-sg * ct));
    let last = ket3(ZERO, e * (sg * ct / n), re(cg / n));
    Ok((tilted, mixed, last, n))
}

fn degeneracy_warnings(side: &str, gamma: f64, theta: f64) -> Vec<String> {
    let mut out = Vec::new();
    for (name, v) in [
        ("sin gamma", gamma.sin()),
        ("cos gamma", gamma.cos()),
        ("sin theta", theta.sin()),
        ("cos theta", theta.cos()),
    ] {
        if v.abs() < 1e-12 {
            out.push(format!("{name}_{side} vanishes; the family is degenerate"));
        }
    }
    out
}

pub fn upb_family(angles: UpbAngles) -> Result<UpbFamily> {
    let (a2, a3, a4, n_a) = upb_side(angles.gamma_a, angles.theta_a, angles.phi_a)?;
    let (b3, b1, b4, n_b) = upb_side(angles.gamma_b, angles.theta_b, angles.phi_b)?;
    let e0 = ket3(ONE, ZERO, ZERO);
    let e1 = ket3(ZERO, ONE, ZERO);
    let mut warnings = degeneracy_warnings("A", angles.gamma_a, angles.theta_a);
    warnings.extend(degeneracy_warnings("B", angles.gamma_b, angles.theta_b));
    for w in &warnings {
        warn!("{w}");
    }
    Ok(UpbFamily {
        angles,
        alpha: vec![e0.clone(), e1.clone(), a2, a3, a4],
        beta: vec![e1, b1, e0, b3, b4],
        n_a,
        n_b,
        warnings,
    })
}

impl UpbFamily {
    pub fn product_vectors(&self) -> Vec<CVector> {
        self.alpha.iter().zip(&self.beta).map(|(a, b)| linalg::kron_vec(a, b)).collect()
    }

    /// `Σ_k |α_k β_k⟩⟨α_k β_k|`
    pub fn projector(&self) -> CMatrix {
        let mut p = CMatrix::zeros(9, 9);
        for v in self.product_vectors() {
            p += linalg::outer(&v);
        }
        p
    }

    /// `‖P² − P‖_max`
    pub fn projector_residual(&self) -> f64 {
        let p = self.projector();
        max_abs(&(&p * &p - &p))
    }

    /// Largest `|⟨ψ_j|ψ_k⟩|` over `j ≠ k`.
    pub fn orthogonality_residual(&self) -> f64 {
        let v = self.product_vectors();
        let mut worst: f64 = 0.0;
        for j in 0..v.len() {
            for k in j + 1..v.len() {
                worst = worst.max(v[j].dotc(&v[k]).norm());
            }
        }
        worst
    }

    /// `diag(1, e^{-iφ_A}, 1)` and `diag(1, e^{-iφ_B}, 1)`.
    pub fn dephasing_unitaries(&self) -> (CMatrix, CMatrix) {
        (
            linalg::diag_unitary(&[0.0, -self.angles.phi_a, 0.0]),
            linalg::diag_unitary(&[0.0, -self.angles.phi_b, 0.0]),
        )
    }
}

fn complement_state(p: &CMatrix, k: usize) -> Result<DensityMatrix> {
    let resid = max_abs(&(p * p - p));
    if resid > 1e-8 {
        return Err(Error::NotAProjector(resid));
    }
    let d = p.nrows();
    let m = (CMatrix::identity(d, d) - p) / re((d - k) as f64);
    DensityMatrix::from_matrix((3, 3), m)
}

/// `(I₉ − P)/4`
pub fn upb_state(fam: &UpbFamily) -> Result<DensityMatrix> {
    complement_state(&fam.projector(), fam.alpha.len())
}

#[derive(Debug, Clone)]
pub struct DephasedUpb {
    pub d_a: CMatrix,
    pub d_b: CMatrix,
    pub sigma: DensityMatrix,
}

pub fn dephase_upb(fam: &UpbFamily) -> Result<DephasedUpb> {
    let (d_a, d_b) = fam.dephasing_unitaries();
    let x = linalg::kron(&d_a, &d_b);
    let p = &x * fam.projector() * x.adjoint();
    let sigma = complement_state(&p, fam.alpha.len())?;
    Ok(DephasedUpb { d_a, d_b, sigma })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rank4Params {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Rank4Params {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        for (name, v) in [("a", a), ("b", b), ("c", c), ("d", d)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidInput(format!("{name} = {v} must be positive")));
            }
        }
        Ok(Self { a, b, c, d })
    }
}

/// `C = [C₀ C₁ C₂]`, a 4×9 real matrix.
pub fn rank4_c(p: &Rank4Params) -> RMatrix {
    let Rank4Params { a, b, c, d } = *p;
    #[rustfmt::skip]
    let rows = [
        [0.0, a, b,    0.0, 0.0, 0.0,      0.0, -1.0 / b, 0.0],
        [0.0, 0.0, 1.0, 0.0, 0.0, c,       0.0, 1.0, 0.0],
        [0.0, 0.0, 0.0, 0.0, 0.0, 1.0,     1.0, -c, 0.0],
        [0.0, 0.0, 0.0, 1.0, 0.0, -1.0 / d, d, 0.0, 0.0],
    ];
    RMatrix::from_fn(4, 9, |i, j| rows[i][j])
}

/// `σ = C†C / tr(C†C)` on `C³ ⊗ C³`.
pub fn rank4_state(p: &Rank4Params) -> Result<DensityMatrix> {
    let p = Rank4Params::new(p.a, p.b, p.c, p.d)?;
    let c = rank4_c(&p);
    DensityMatrix::from_matrix((3, 3), to_complex(&(c.transpose() * c)))
}

/// Real two-quqart PPT entangled state and its complex LU conjugate with a
/// separable real part.
#[derive(Debug, Clone)]
pub struct QuqartPair {
    pub rho: DensityMatrix,
    pub sigma: DensityMatrix,
    /// `σ = (U ⊗ V) ρ (U ⊗ V)†`
    pub local: LocalUnitary,
}

fn basis16(i: usize, j: usize) -> CVector {
    let mut v = CVector::zeros(16);
    v[4 * i + j] = ONE;
    v
}

fn sum_kets(pairs: &[(usize, usize)]) -> CVector {
    pairs.iter().fold(CVector::zeros(16), |acc, &(i, j)| acc + basis16(i, j))
}

/// Unnormalized quqart `ρ` (trace 14).
pub fn quqart_rho_unnormalized() -> CMatrix {
    let mut m = linalg::outer(&sum_kets(&[(0, 0), (1, 1), (2, 2)]));
    m += linalg::outer(&sum_kets(&[(0, 1), (1, 0), (3, 3)]));
    for (i, j) in [(0, 2), (2, 0), (1, 2), (2, 1), (0, 3), (3, 0), (1, 3), (3, 1)] {
        m += linalg::outer(&basis16(i, j));
    }
    m
}

/// Unnormalized `σ⁺` written out as a sum of product terms.
pub fn quqart_sigma_plus_unnormalized() -> CMatrix {
    let mut m = CMatrix::zeros(16, 16);
    let mut plus = CVector::zeros(4);
    plus[0] = ONE;
    plus[1] = ONE;
    let mut minus = plus.clone();
    minus[1] = -ONE;
    m += linalg::outer(&linalg::kron_vec(&plus, &plus)) * re(0.5);
    m += linalg::outer(&linalg::kron_vec(&minus, &minus)) * re(0.5);
    for (i, j) in [(2, 2), (0, 2), (2, 0), (1, 2), (2, 1), (3, 3), (0, 3), (3, 0), (1, 3), (3, 1)] {
        m += linalg::outer(&basis16(i, j));
    }
    m
}

pub fn quqart_pair() -> Result<QuqartPair> {
    let rho = DensityMatrix::from_matrix((4, 4), quqart_rho_unnormalized())?;
    let u = CMatrix::identity(4, 4);
    let v = CMatrix::from_diagonal(&CVector::from_vec(vec![ONE, ONE, I, I]));
    let sigma = rho.apply_local(&u, &v)?;
    Ok(QuqartPair { rho, sigma, local: LocalUnitary::new(u, v)? })
}

/// `ρ = (L ⊗ R) ρ_reduced (L ⊗ R)†` with `L`, `R` isometries onto the
/// supports of the reduced states of `ρ⁺`.
#[derive(Debug, Clone)]
pub struct SupportReduction {
    pub p: usize,
    pub q: usize,
    pub reduced: DensityMatrix,
    pub left: CMatrix,
    pub right: CMatrix,
}

impl SupportReduction {
    pub fn reconstruct(&self) -> Result<BipartiteOperator> {
        self.reduced.base().apply_local(&self.left, &self.right)
    }
}

fn support_isometry(h: &Hermitian) -> CMatrix {
    let eig = hermitian_eig(h);
    let tol = 1e-10 * h.max_abs().max(f64::MIN_POSITIVE);
    let cols: Vec<CVector> = (0..h.dim())
        .rev()
        .filter(|&k| eig.eigenvalues[k] > tol)
        .map(|k| eig.vector(k))
        .collect();
    if cols.is_empty() {
        return CMatrix::zeros(h.dim(), 0);
    }
    CMatrix::from_columns(&cols)
}

pub fn support_reduce(rho: &DensityMatrix) -> Result<SupportReduction> {
    let plus = rho.base().real_part();
    let left = support_isometry(&plus.partial_trace(crate::bipartite::Side::B));
    let right = support_isometry(&plus.partial_trace(crate::bipartite::Side::A));
    let reduced_op = rho.base().apply_local(&left.adjoint(), &right.adjoint())?;
    let reduced = DensityMatrix::new(reduced_op)?;
    Ok(SupportReduction { p: left.ncols(), q: right.ncols(), reduced, left, right })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PatternClause {
    /// Zero weight `p_{j,k}` forces zero `k`-th rows and columns in the blocks of row and column `j`.
    RowColumn,
    /// Zero weights shared by two block indices clear the off-diagonal blocks.
    OffDiagonalBlocks,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatternViolation {
    pub clause: PatternClause,
    pub block: (usize, usize),
    pub index: usize,
    pub value: f64,
}

#[derive(Debug, Clone)]
pub struct ZeroPatternReport {
    /// `p_{j,k} = ⟨jk|ρ⁺|jk⟩`
    pub weights: RMatrix,
    pub violations: Vec<PatternViolation>,
    /// Whether the support of `ρ⁺` is the graph of a permutation pairing.
    pub permutation_form: bool,
    /// `ρ = ρ⁺` entrywise, only evaluated in permutation form.
    pub equals_real_part: Option<bool>,
}

impl ZeroPatternReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty() && self.equals_real_part != Some(false)
    }
}

/// Zero patterns forced on a PPT state `ρ` on `C^m ⊗ C^m` whose real part is
/// diagonal.
pub fn diagonal_realpart_pattern(rho: &DensityMatrix) -> Result<ZeroPatternReport> {
    let (m, n) = rho.dims();
    if m != n {
        return Err(Error::NotApplicable(format!("local dimensions {m} and {n} differ")));
    }
    if !rho.is_ppt(PPT_TOL).is_ppt() {
        return Err(Error::NotApplicable("state is NPT".into()));
    }
    let plus = linalg::real_part(rho.matrix());
    let d = m * m;
    for i in 0..d {
        for j in 0..d {
            if i != j && plus[(i, j)].abs() >= 1e-12 {
                return Err(Error::NotApplicable(format!(
                    "real part has off-diagonal entry {:e} at ({i}, {j})",
                    plus[(i, j)]
                )));
            }
        }
    }
    let zero = 1e-12;
    let weights = RMatrix::from_fn(m, m, |j, k| plus[(j * m + k, j * m + k)]);
    let block = |x: usize, y: usize, u: usize, v: usize| rho.matrix()[(x * m + u, y * m + v)].norm();
    let line_max = |x: usize, y: usize, k: usize| {
        (0..m).map(|t| block(x, y, k, t).max(block(x, y, t, k))).fold(0.0, f64::max)
    };

    let mut violations = Vec::new();
    for j in 0..m {
        for k in 0..m {
            if weights[(j, k)] > zero {
                continue;
            }
            for y in 0..m {
                for blk in [(j, y), (y, j)] {
                    let v = line_max(blk.0, blk.1, k);
                    if v > zero {
                        violations.push(PatternViolation {
                            clause: PatternClause::RowColumn,
                            block: blk,
                            index: k,
                            value: v,
                        });
                    }
                }
            }
        }
    }
    for x in 0..m {
        for y in 0..m {
            if x == y {
                continue;
            }
            for k in 0..m {
                if weights[(x, k)] > zero && weights[(y, k)] > zero {
                    continue;
                }
                let v = line_max(x, y, k);
                if v > zero {
                    violations.push(PatternViolation {
                        clause: PatternClause::OffDiagonalBlocks,
                        block: (x, y),
                        index: k,
                        value: v,
                    });
                }
            }
        }
    }

    let support = |row: bool, i: usize| {
        (0..m).filter(|&t| if row { weights[(i, t)] > zero } else { weights[(t, i)] > zero }).count()
    };
    let permutation_form = (0..m).all(|i| support(true, i) <= 1 && support(false, i) <= 1);
    let equals_real_part = permutation_form.then(|| {
        let diff = rho.matrix() - to_complex(&plus);
        max_abs(&diff) <= 1e-10
    });
    Ok(ZeroPatternReport { weights, violations, permutation_form, equals_real_part })
}
