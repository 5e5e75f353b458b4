//! Entanglement witnesses: detection, the `tW + (1-t)W*` family, witnesses
//! built from NPT states, local projections and the polar-factor bridge from
//! SLOCC to LU equivalence.

use crate::bipartite::{partial_transpose_matrix, BipartiteOperator, DensityMatrix, PptVerdict, PPT_TOL};
use crate::error::{Error, Result};
use crate::linalg::{
    self, complete_basis, hermitian_eig, max_abs, polar_decompose, schmidt, CMatrix, CVector,
    Hermitian, SchmidtForm, C64,
};
use crate::separability::seesaw::{self, BlockPositivity};

pub const DEFAULT_EVIDENCE_RESTARTS: usize = 64;
pub const DEFAULT_EVIDENCE_SEED: u64 = 0x5eed_b10c;
/// Default detection threshold on unit-trace states.
pub const DEFAULT_DELTA: f64 = 1e-10;

/// How a witness was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    PartialTransposeOfPure,
    Hyperplane,
    Realified,
    Projected,
    LocalUnitaryPullback,
    Decomposable,
    User,
}

impl Provenance {
    pub fn as_str(&self) -> &'static str {
        match self {
            Provenance::PartialTransposeOfPure => "partial-transpose-of-pure",
            Provenance::Hyperplane => "hyperplane",
            Provenance::Realified => "realified",
            Provenance::Projected => "projected",
            Provenance::LocalUnitaryPullback => "local-unitary-pullback",
            Provenance::Decomposable => "decomposable",
            Provenance::User => "user",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s {
            "partial-transpose-of-pure" => Provenance::PartialTransposeOfPure,
            "hyperplane" => Provenance::Hyperplane,
            "realified" => Provenance::Realified,
            "projected" => Provenance::Projected,
            "local-unitary-pullback" => Provenance::LocalUnitaryPullback,
            "decomposable" => Provenance::Decomposable,
            "user" => Provenance::User,
            _ => return None,
        })
    }
}

/// A Hermitian operator that is not PSD and passed the see-saw
/// block-positivity check. The check is heuristic, so every witness is
/// evidence-grade.
#[derive(Debug, Clone)]
pub struct Witness {
    base: BipartiteOperator,
    provenance: Provenance,
    evidence: BlockPositivity,
}

impl Witness {
    pub fn new(base: BipartiteOperator, provenance: Provenance) -> Result<Self> {
        Self::with_evidence(base, provenance, DEFAULT_EVIDENCE_RESTARTS, DEFAULT_EVIDENCE_SEED)
    }

    pub fn with_evidence(
        base: BipartiteOperator,
        provenance: Provenance,
        restarts: usize,
        seed: u64,
    ) -> Result<Self> {
        let scale = base.op().max_abs();
        let min = base.op().min_eigenvalue();
        if !(min < -1e-10 * scale) {
            return Err(Error::NotAWitness(format!(
                "operator is positive semidefinite (minimum eigenvalue {min:e})"
            )));
        }
        let evidence = seesaw::block_positivity(&base, restarts, seed);
        if !evidence.passed {
            return Err(Error::NotAWitness(format!(
                "product vector with expectation {:e} below threshold {:e}",
                evidence.min_value, evidence.threshold
            )));
        }
        Ok(Self { base, provenance, evidence })
    }

    pub fn base(&self) -> &BipartiteOperator {
        &self.base
    }

    pub fn op(&self) -> &Hermitian {
        self.base.op()
    }

    pub fn matrix(&self) -> &CMatrix {
        self.base.matrix()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.base.dims()
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn evidence(&self) -> &BlockPositivity {
        &self.evidence
    }

    pub fn is_real(&self, tol: f64) -> bool {
        self.base.op().is_real(tol)
    }

    /// `tr(W ρ)`
    pub fn expectation(&self, rho: &DensityMatrix) -> Result<f64> {
        self.base.trace_with(rho.base())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detection {
    pub detected: bool,
    pub value: f64,
}

/// Detected iff `tr(Wρ) < -δ`.
pub fn detects(w: &Witness, rho: &DensityMatrix, delta: f64) -> Result<Detection> {
    let value = w.expectation(rho)?;
    Ok(Detection { detected: value < -delta, value })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WtClass {
    Ew,
    Psd,
}

#[derive(Debug, Clone)]
pub struct WtMix {
    pub class: WtClass,
    pub min_eigenvalue: f64,
    pub operator: BipartiteOperator,
}

/// `W_t = tW + (1-t)W*`. For a witness `W` it is block-positive, so it is a
/// witness exactly when it fails to be PSD.
pub fn wt_mix(w: &Witness, t: f64) -> Result<WtMix> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidInput(format!("t = {t} outside [0, 1]")));
    }
    let op = w.base().scale(t).add(&w.base().conj().scale(1.0 - t))?;
    let min = op.op().min_eigenvalue();
    let class = if min < -1e-10 * op.op().max_abs() { WtClass::Ew } else { WtClass::Psd };
    Ok(WtMix { class, min_eigenvalue: min, operator: op })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WPlusTag {
    Ew,
    PptState,
    NptState,
}

#[derive(Debug, Clone)]
pub struct WPlusClass {
    pub tag: WPlusTag,
    pub min_eigenvalue: f64,
    /// Minimum eigenvalue of `(W⁺)^Γ`, only computed when `W⁺` is PSD.
    pub partial_transpose_min: Option<f64>,
}

/// Classifies `W⁺ = (W + W*)/2` as a witness, a PPT state or an NPT state.
pub fn classify_w_plus(w: &Witness) -> WPlusClass {
    let plus = w.base().real_part();
    let scale = plus.op().max_abs();
    let min = plus.op().min_eigenvalue();
    if min < -1e-10 * scale {
        return WPlusClass { tag: WPlusTag::Ew, min_eigenvalue: min, partial_transpose_min: None };
    }
    let pt_min = plus.partial_transpose().op().min_eigenvalue();
    let tag = if pt_min < -1e-10 * scale { WPlusTag::NptState } else { WPlusTag::PptState };
    WPlusClass { tag, min_eigenvalue: min, partial_transpose_min: Some(pt_min) }
}

/// Witness `|ψ₁⟩⟨ψ₁|^Γ` built from the most negative eigenvector of `ρ^Γ`,
/// together with the data showing it is LU-equivalent to a real witness.
#[derive(Debug, Clone)]
pub struct NptWitness {
    pub witness: Witness,
    pub vector: CVector,
    pub schmidt: SchmidtForm,
    pub trace_value: f64,
    /// Real witness `(|φ⟩⟨φ|)^Γ` with `φ = Σ c_j |jj⟩`.
    pub real_witness: BipartiteOperator,
    /// Local unitaries with `W = (A ⊗ B) W_r (A ⊗ B)†`.
    pub local: (CMatrix, CMatrix),
}

pub fn witness_from_npt(rho: &DensityMatrix) -> Result<NptWitness> {
    let (eigenvalue, vector) = match rho.is_ppt(PPT_TOL) {
        PptVerdict::Npt { eigenvalue, eigenvector } => (eigenvalue, eigenvector),
        PptVerdict::Ppt { .. } => {
            return Err(Error::NotApplicable("state is PPT; no NPT witness exists".into()))
        }
    };
    let dims = rho.dims();
    let w_op = BipartiteOperator::from_matrix(
        dims,
        partial_transpose_matrix(&linalg::outer(&vector), dims),
    )?;
    let witness = Witness::new(w_op, Provenance::PartialTransposeOfPure)?;
    let trace_value = witness.expectation(rho)?;
    debug_assert!((trace_value - eigenvalue).abs() < 1e-8);

    let sf = schmidt(&vector, dims)?;
    let (m, n) = dims;
    let a = complete_basis(&sf.left, m);
    let b = complete_basis(&sf.right, n);
    let mut phi = CVector::zeros(m * n);
    for (j, c) in sf.coefficients.iter().enumerate() {
        phi[j * n + j] = C64::new(*c, 0.0);
    }
    let real_witness =
        BipartiteOperator::from_matrix(dims, partial_transpose_matrix(&linalg::outer(&phi), dims))?;
    let a_bar = a.map(|z| z.conj());
    Ok(NptWitness { witness, vector, schmidt: sf, trace_value, real_witness, local: (a_bar, b) })
}

/// Picks, among an orthonormal basis of the negative eigenspace, the vector
/// of smallest Schmidt rank (most negative eigenvalue on ties).
fn minimal_negative_vector(op: &Hermitian, dims: (usize, usize)) -> Option<(f64, CVector, SchmidtForm)> {
    let eig = hermitian_eig(op);
    let tol = 1e-10 * op.max_abs();
    let mut best: Option<(f64, CVector, SchmidtForm)> = None;
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda >= -tol {
            break;
        }
        let v = eig.vector(k);
        let sf = schmidt(&v, dims).ok()?;
        let better = match &best {
            None => true,
            Some((_, _, s)) => sf.rank() < s.rank(),
        };
        if better {
            best = Some((lambda, v, sf));
        }
    }
    best
}

/// Local maps onto `C^p ⊗ C^p` sending `|y⟩ = Σ λ_j |a_j b_j⟩` to `Σ λ_j |jj⟩`.
fn schmidt_projectors(sf: &SchmidtForm) -> (CMatrix, CMatrix) {
    let (m, n) = sf.dims;
    let p = sf.rank();
    let ua = complete_basis(&sf.left, m).adjoint();
    let vb = complete_basis(&sf.right, n).adjoint();
    (ua.rows(0, p).into_owned(), vb.rows(0, p).into_owned())
}

#[derive(Debug, Clone)]
pub struct WitnessProjection {
    pub projected: Witness,
    pub p: usize,
    /// `P_A U` of shape `p × m`.
    pub left: CMatrix,
    /// `P_B V` of shape `p × n`.
    pub right: CMatrix,
    pub vector: CVector,
    pub schmidt_coefficients: Vec<f64>,
    /// `⟨Σλ_j jj| W_proj |Σλ_j jj⟩`, equal to `⟨y|W|y⟩ < 0`.
    pub expectation: f64,
}

pub fn projected_pure_vector(coeffs: &[f64]) -> CVector {
    let p = coeffs.len();
    let mut v = CVector::zeros(p * p);
    for (j, c) in coeffs.iter().enumerate() {
        v[j * p + j] = C64::new(*c, 0.0);
    }
    v
}

/// Locally projects a witness onto `C^p ⊗ C^p`, `p` the Schmidt rank of a
/// negative eigenvector.
pub fn project_witness(w: &Witness) -> Result<WitnessProjection> {
    let dims = w.dims();
    let (_, y, sf) = minimal_negative_vector(w.op(), dims)
        .ok_or_else(|| Error::NotAWitness("no negative eigenvector".into()))?;
    let (left, right) = schmidt_projectors(&sf);
    let projected_op = w.base().apply_local(&left, &right)?;
    let target = projected_pure_vector(&sf.coefficients);
    let expectation = projected_op.op().expectation(&target);
    let ev = w.evidence();
    let projected = Witness::with_evidence(projected_op, Provenance::Projected, ev.restarts, ev.seed)?;
    Ok(WitnessProjection {
        projected,
        p: sf.rank(),
        left,
        right,
        vector: y,
        schmidt_coefficients: sf.coefficients,
        expectation,
    })
}

#[derive(Debug, Clone)]
pub struct NptProjection {
    pub state: DensityMatrix,
    pub p: usize,
    /// Local maps applied to `ρ`: `state ∝ (Ā_p ⊗ B_p) ρ (Ā_p ⊗ B_p)†`.
    pub left: CMatrix,
    pub right: CMatrix,
    pub vector: CVector,
    /// `max |((P(X^Γ)†ρX^ΓP)^Γ − PXρ^ΓX†P)|` before renormalization.
    pub twist_residual: f64,
}

/// Locally projects an NPT state onto `C^p ⊗ C^p` keeping it NPT.
pub fn project_npt(rho: &DensityMatrix) -> Result<NptProjection> {
    if rho.is_ppt(PPT_TOL).is_ppt() {
        return Err(Error::NotApplicable("state is PPT".into()));
    }
    let dims = rho.dims();
    let pt = rho.base().partial_transpose();
    let (_, y, sf) = minimal_negative_vector(pt.op(), dims)
        .ok_or_else(|| Error::NotApplicable("partial transpose has no negative eigenvector".into()))?;
    let (up, vp) = schmidt_projectors(&sf);
    let up_bar = up.map(|z| z.conj());
    let twisted = rho.base().apply_local(&up_bar, &vp)?;
    let direct = pt.apply_local(&up, &vp)?;
    let twist_residual = max_abs(&(twisted.partial_transpose().matrix() - direct.matrix()));
    let state = DensityMatrix::new(twisted)?;
    if state.is_ppt(PPT_TOL).is_ppt() {
        return Err(Error::InvalidState("projected state lost its negativity".into()));
    }
    Ok(NptProjection { state, p: sf.rank(), left: up_bar, right: vp, vector: y, twist_residual })
}

#[derive(Debug, Clone)]
pub enum BridgeVerdict {
    /// `(|A|⊗|B|) W_r (|A|⊗|B|)` is real; `(U, V)` are the unitary polar factors.
    InElu { u: CMatrix, v: CMatrix, conjugated: BipartiteOperator },
    Fails { imag_max: f64 },
}

/// Given a real witness and invertible `A, B`, decides whether the SLOCC
/// conjugate `(A⊗B) W_r (A⊗B)†` is LU-equivalent to a real operator through
/// the polar factors of `A` and `B`.
pub fn slocc_realness_bridge(w_r: &BipartiteOperator, a: &CMatrix, b: &CMatrix) -> Result<BridgeVerdict> {
    if !w_r.op().is_real(1e-12 * w_r.op().max_abs().max(1.0)) {
        return Err(Error::InvalidInput("witness is not real".into()));
    }
    let (u, abs_a) = polar_decompose(a)?;
    let (v, abs_b) = polar_decompose(b)?;
    let conjugated = w_r.apply_local(abs_a.matrix(), abs_b.matrix())?;
    let imag_max = linalg::max_imag(conjugated.matrix());
    if imag_max < 1e-10 {
        Ok(BridgeVerdict::InElu { u, v, conjugated })
    } else {
        Ok(BridgeVerdict::Fails { imag_max })
    }
}

/// `X^Γ + Y` with `X, Y` PSD.
#[derive(Debug, Clone)]
pub struct Decomposable {
    pub x: BipartiteOperator,
    pub y: BipartiteOperator,
}

impl Decomposable {
    pub fn assemble(&self) -> BipartiteOperator {
        self.x.partial_transpose().add(&self.y).expect("same dims")
    }

    /// Decomposition of `(A⊗B)(X^Γ + Y)(A⊗B)†`, namely
    /// `[(Ā⊗B) X (Ā⊗B)†]^Γ + (A⊗B) Y (A⊗B)†`.
    pub fn conjugate(&self, a: &CMatrix, b: &CMatrix) -> Result<Decomposable> {
        let a_bar = a.map(|z| z.conj());
        Ok(Decomposable { x: self.x.apply_local(&a_bar, b)?, y: self.y.apply_local(a, b)? })
    }
}

pub fn decomposable_from_parts(x: &BipartiteOperator, y: &BipartiteOperator) -> Result<Decomposable> {
    x.check_same_dims(y)?;
    for (name, m) in [("X", x), ("Y", y)] {
        let min = m.op().min_eigenvalue();
        if min < -1e-10 * m.op().max_abs().max(1.0) {
            return Err(Error::InvalidInput(format!("{name} is not PSD (minimum eigenvalue {min:e})")));
        }
    }
    Ok(Decomposable { x: x.clone(), y: y.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{max_abs, ONE, ZERO};
    use crate::random::{ginibre, haar_unitary, random_density, random_unit_vector, rng};
    use crate::states::{bell_phase_state, witness_theta};
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn singlet() -> DensityMatrix {
        let v = CVector::from_vec(vec![
            ZERO,
            C64::new(FRAC_1_SQRT_2, 0.0),
            C64::new(-FRAC_1_SQRT_2, 0.0),
            ZERO,
        ]);
        DensityMatrix::pure((2, 2), &v).unwrap()
    }

    #[test]
    fn w0_on_bell_states() {
        let w = witness_theta(0.0).unwrap();
        // W(0) = |ψ(0)⟩⟨ψ(0)|^Γ has tr(W(0)|ψ(0)⟩⟨ψ(0)|) = +1/2 and detects the singlet.
        let d = detects(&w, &bell_phase_state(0.0).unwrap(), DEFAULT_DELTA).unwrap();
        assert!(!d.detected);
        assert!((d.value - 0.5).abs() < 1e-14);
        let d = detects(&w, &singlet(), DEFAULT_DELTA).unwrap();
        assert!(d.detected);
        assert!((d.value + 0.5).abs() < 1e-14);
    }

    #[test]
    fn maximally_mixed_gives_trace_over_d() {
        for theta in [0.0, 1.0, PI / 2.0] {
            let w = witness_theta(theta).unwrap();
            let d = detects(&w, &DensityMatrix::maximally_mixed((2, 2)), DEFAULT_DELTA).unwrap();
            assert!((d.value - w.op().trace() / 4.0).abs() < 1e-15);
            assert!(!d.detected);
        }
    }

    #[test]
    fn wt_mix_cases() {
        let w0 = witness_theta(0.0).unwrap();
        assert_eq!(wt_mix(&w0, 1.0).unwrap().class, WtClass::Ew);
        assert_eq!(wt_mix(&w0, 0.5).unwrap().class, WtClass::Ew);
        let wp = witness_theta(PI / 2.0).unwrap();
        assert_eq!(wt_mix(&wp, 0.5).unwrap().class, WtClass::Psd);
        assert!(wt_mix(&w0, 1.5).is_err());
        assert!(wt_mix(&w0, -0.1).is_err());
    }

    #[test]
    fn w_plus_classification() {
        assert_eq!(classify_w_plus(&witness_theta(0.0).unwrap()).tag, WPlusTag::Ew);
        assert_eq!(classify_w_plus(&witness_theta(PI / 2.0).unwrap()).tag, WPlusTag::PptState);
    }

    #[test]
    fn npt_witness_for_bell_state() {
        let rho = bell_phase_state(0.0).unwrap();
        let nw = witness_from_npt(&rho).unwrap();
        assert!((nw.trace_value + 0.5).abs() < 1e-12);
        assert_eq!(nw.witness.provenance(), Provenance::PartialTransposeOfPure);
        let (a, b) = &nw.local;
        let back = nw.real_witness.apply_local(a, b).unwrap();
        assert!(max_abs(&(back.matrix() - nw.witness.matrix())) < 1e-12);
        assert!(nw.real_witness.op().is_real(1e-15));
    }

    #[test]
    fn npt_witness_for_every_phase() {
        for theta in [0.3, 1.1, PI / 2.0, 4.0] {
            let rho = bell_phase_state(theta).unwrap();
            let nw = witness_from_npt(&rho).unwrap();
            assert!(nw.trace_value < -0.49);
            assert_eq!(nw.schmidt.rank(), 2);
            let (a, b) = &nw.local;
            assert!(linalg::unitarity_residual(a) < 1e-12);
            let back = nw.real_witness.apply_local(a, b).unwrap();
            assert!(max_abs(&(back.matrix() - nw.witness.matrix())) < 1e-12);
        }
    }

    #[test]
    fn npt_witness_random_and_ppt_rejected() {
        let mut r = rng(21);
        let mut found = 0;
        for _ in 0..20 {
            let rho = DensityMatrix::from_matrix((3, 3), random_density(9, 2, &mut r).into_matrix())
                .unwrap();
            if rho.is_ppt(PPT_TOL).is_ppt() {
                continue;
            }
            found += 1;
            let nw = witness_from_npt(&rho).unwrap();
            assert!(nw.trace_value < 0.0);
        }
        assert!(found > 10);
        assert!(matches!(
            witness_from_npt(&DensityMatrix::maximally_mixed((3, 3))),
            Err(Error::NotApplicable(_))
        ));
    }

    #[test]
    fn project_two_qubit_witness_is_trivial() {
        let w = witness_theta(0.0).unwrap();
        let pr = project_witness(&w).unwrap();
        assert_eq!(pr.p, 2);
        assert!(pr.expectation < 0.0);
        assert_eq!(pr.projected.dims(), (2, 2));
        let e0 = hermitian_eig(w.op()).eigenvalues;
        let e1 = hermitian_eig(pr.projected.op()).eigenvalues;
        for (x, y) in e0.iter().zip(&e1) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    /// `(|y⟩⟨y|)^Γ` conjugated into `C^3 ⊗ C^3` with a Schmidt-rank-2 `|y⟩`.
    fn rank2_witness(seed: u64) -> Witness {
        let mut r = rng(seed);
        let u = haar_unitary(3, &mut r);
        let v = haar_unitary(3, &mut r);
        let mut y = CVector::zeros(9);
        y[0] = C64::new(0.8, 0.0);
        y[4] = C64::new(0.6, 0.0);
        let y = linalg::kron(&u, &v) * y;
        let op = BipartiteOperator::from_matrix(
            (3, 3),
            partial_transpose_matrix(&linalg::outer(&y), (3, 3)),
        )
        .unwrap();
        Witness::new(op, Provenance::User).unwrap()
    }

    #[test]
    fn project_schmidt_rank_two_witness() {
        let w = rank2_witness(5);
        let pr = project_witness(&w).unwrap();
        assert_eq!(pr.p, 2);
        assert_eq!(pr.projected.dims(), (2, 2));
        assert!(pr.expectation < 0.0);
        let target = projected_pure_vector(&pr.schmidt_coefficients);
        assert!((pr.projected.op().expectation(&target) - w.op().expectation(&pr.vector)).abs() < 1e-12);
    }

    #[test]
    fn full_schmidt_rank_is_not_reduced() {
        let mut r = rng(8);
        let u = haar_unitary(3, &mut r);
        let v = haar_unitary(3, &mut r);
        let mut y = CVector::zeros(9);
        for (j, c) in [0.7, 0.5, 0.5099019513592785].iter().enumerate() {
            y[j * 3 + j] = C64::new(*c, 0.0);
        }
        let y = linalg::kron(&u, &v) * y;
        // 0.5·I − |y⟩⟨y| is block-positive since the largest Schmidt
        // coefficient squared is 0.49; its only negative eigenvector is |y⟩
        let m = CMatrix::identity(9, 9) * C64::new(0.5, 0.0) - linalg::outer(&y);
        let w = Witness::new(BipartiteOperator::from_matrix((3, 3), m).unwrap(), Provenance::User).unwrap();
        let pr = project_witness(&w).unwrap();
        assert_eq!(pr.p, 3);
    }

    #[test]
    fn project_bell_state_is_lu_equivalent() {
        let rho = bell_phase_state(0.0).unwrap();
        let pr = project_npt(&rho).unwrap();
        assert_eq!(pr.p, 2);
        assert!(pr.twist_residual < 1e-12);
        let e0 = hermitian_eig(rho.op()).eigenvalues;
        let e1 = hermitian_eig(pr.state.op()).eigenvalues;
        for (x, y) in e0.iter().zip(&e1) {
            assert!((x - y).abs() < 1e-12);
        }
        assert!(matches!(
            project_npt(&DensityMatrix::maximally_mixed((2, 2))),
            Err(Error::NotApplicable(_))
        ));
    }

    #[test]
    fn project_two_by_three_pure_state() {
        let mut r = rng(33);
        let v = random_unit_vector(6, &mut r);
        let rho = DensityMatrix::pure((2, 3), &v).unwrap();
        let pr = project_npt(&rho).unwrap();
        assert_eq!(pr.state.dims(), (2, 2));
        assert!(!pr.state.is_ppt(PPT_TOL).is_ppt());
        assert!(pr.twist_residual < 1e-12);
    }

    #[test]
    fn bridge_cases() {
        let w0 = witness_theta(0.0).unwrap();
        let mut r = rng(2);
        let u = haar_unitary(2, &mut r);
        let v = haar_unitary(2, &mut r);
        assert!(matches!(
            slocc_realness_bridge(w0.base(), &u, &v).unwrap(),
            BridgeVerdict::InElu { .. }
        ));
        let da = linalg::to_complex(&nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, 0.5])));
        let db = linalg::to_complex(&nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.5, 3.0])));
        assert!(matches!(
            slocc_realness_bridge(w0.base(), &da, &db).unwrap(),
            BridgeVerdict::InElu { .. }
        ));
        // |A| with complex off-diagonal entries mixes in imaginary parts
        let a = ginibre(2, 2, &mut r);
        let b = ginibre(2, 2, &mut r);
        assert!(matches!(
            slocc_realness_bridge(w0.base(), &a, &b).unwrap(),
            BridgeVerdict::Fails { .. }
        ));
        let sing = CMatrix::from_row_slice(2, 2, &[ONE, ONE, ONE, ONE]);
        assert!(matches!(
            slocc_realness_bridge(w0.base(), &sing, &v),
            Err(Error::SingularInput(_))
        ));
    }

    #[test]
    fn decomposable_parts() {
        let bell = bell_phase_state(0.0).unwrap();
        let zero = BipartiteOperator::from_matrix((2, 2), CMatrix::zeros(4, 4)).unwrap();
        let y = DensityMatrix::maximally_mixed((2, 2));
        let d = decomposable_from_parts(&zero, y.base()).unwrap();
        assert!(d.assemble().op().is_psd(1e-12));

        let d = decomposable_from_parts(bell.base(), &zero).unwrap();
        let w = d.assemble();
        assert!(max_abs(&(w.matrix() - witness_theta(0.0).unwrap().matrix())) < 1e-15);
        assert!(w.op().min_eigenvalue() < -0.4);

        let neg = bell.base().partial_transpose();
        assert!(decomposable_from_parts(&neg, &zero).is_err());
    }

    #[test]
    fn decomposable_conjugation_identity() {
        let mut r = rng(17);
        let x = BipartiteOperator::new((2, 3), random_density(6, 3, &mut r)).unwrap();
        let y = BipartiteOperator::new((2, 3), random_density(6, 2, &mut r)).unwrap();
        let d = decomposable_from_parts(&x, &y).unwrap();
        let a = ginibre(2, 2, &mut r);
        let b = ginibre(3, 3, &mut r);
        let direct = d.assemble().apply_local(&a, &b).unwrap();
        let c = d.conjugate(&a, &b).unwrap();
        let scale = max_abs(direct.matrix());
        assert!(max_abs(&(c.assemble().matrix() - direct.matrix())) < 1e-12 * scale.max(1.0));
        assert!(c.x.op().is_psd(1e-10 * scale) && c.y.op().is_psd(1e-10 * scale));
    }

    #[test]
    fn psd_operator_is_not_a_witness() {
        let m = DensityMatrix::maximally_mixed((2, 2));
        assert!(matches!(
            Witness::new(m.base().clone(), Provenance::User),
            Err(Error::NotAWitness(_))
        ));
    }
}
