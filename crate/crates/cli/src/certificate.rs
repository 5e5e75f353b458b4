//! Certificates: the data behind a verdict, enough to re-check it by
//! deterministic arithmetic without searching again.

use anyhow::{bail, Result};
use rewlab_core::linalg::{is_real, max_abs, unitarity_residual};
use rewlab_core::orbit::{OrbitHit, PrsEvidence, TrialTransform};
use rewlab_core::separability::seesaw::block_positivity;
use rewlab_core::witness::{NptWitness, DEFAULT_DELTA};
use rewlab_core::{
    BipartiteOperator, DensityMatrix, FlowchartVerdict, ProductEnsemble, RewVerdict, SeparabilityVerdict, Witness,
    VERSION,
};
use serde::{Deserialize, Serialize};

use crate::files::{ComplexJson, Kind, MatrixFile};

pub const FORMAT: &str = "rewlab-certificate/1";
/// Agreement required between a replayed and a stored trace value.
pub const REPLAY_TOL: f64 = 1e-12;
/// Block-positivity threshold relative to `‖W‖_max`.
pub const BLOCK_POSITIVITY_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    /// The state itself.
    State,
    /// The renormalized real part of the state.
    RealPart,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductPair {
    pub a: ComplexJson,
    pub b: ComplexJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleJson {
    pub weights: Vec<f64>,
    pub pairs: Vec<ProductPair>,
}

impl EnsembleJson {
    pub fn from_ensemble(e: &ProductEnsemble) -> Self {
        Self {
            weights: e.weights.clone(),
            pairs: e
                .pairs
                .iter()
                .map(|(a, b)| ProductPair { a: ComplexJson::from_vector(a), b: ComplexJson::from_vector(b) })
                .collect(),
        }
    }

    pub fn to_ensemble(&self, dims: (usize, usize)) -> Result<ProductEnsemble> {
        let pairs = self
            .pairs
            .iter()
            .map(|p| Ok((p.a.to_vector()?, p.b.to_vector()?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(ProductEnsemble::new(dims, self.weights.clone(), pairs)?)
    }
}

/// `W = (A ⊗ B) W_r (A ⊗ B)†` with `W_r` real and `A`, `B` unitary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LuForm {
    pub real_witness: MatrixFile,
    pub a: ComplexJson,
    pub b: ComplexJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialJson {
    pub transform: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u: Option<ComplexJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v: Option<ComplexJson>,
    pub verdict: String,
    /// Separable decomposition of the transformed real part for `no` verdicts.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ensemble: Option<EnsembleJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Payload {
    Ensemble { target: Target, ensemble: EnsembleJson, distance: f64 },
    Witness { witness: MatrixFile, provenance: String, lu_form: Option<LuForm> },
    /// Real witness detecting `(U ⊗ V) ρ (U ⊗ V)†`.
    Elu { u: ComplexJson, v: ComplexJson, rew: MatrixFile, stage: String },
    Evidence { status: String, trials: Vec<TrialJson> },
    None { reason: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Seeds {
    pub seed: u64,
    pub evidence_seed: Option<u64>,
    pub evidence_restarts: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub eps_sep: f64,
    pub delta: f64,
    pub block_positivity: f64,
    pub replay: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateFile {
    pub format: String,
    pub version: String,
    pub command: String,
    pub tag: String,
    pub dims: [usize; 2],
    pub trace_value: Option<f64>,
    pub payload: Payload,
    pub seeds: Seeds,
    pub tolerances: Tolerances,
    pub replay: String,
}

impl CertificateFile {
    fn new(command: &str, tag: &str, dims: (usize, usize), payload: Payload, seed: u64, eps_sep: f64) -> Self {
        Self {
            format: FORMAT.into(),
            version: VERSION.into(),
            command: command.into(),
            tag: tag.into(),
            dims: [dims.0, dims.1],
            trace_value: None,
            payload,
            seeds: Seeds { seed, evidence_seed: None, evidence_restarts: None },
            tolerances: Tolerances {
                eps_sep,
                delta: DEFAULT_DELTA,
                block_positivity: BLOCK_POSITIVITY_TOL,
                replay: REPLAY_TOL,
            },
            replay: "rewlab verify <certificate> <state file>".into(),
        }
    }

    fn with_witness_evidence(mut self, w: &Witness, trace_value: f64) -> Self {
        let ev = w.evidence();
        self.seeds.evidence_seed = Some(ev.seed);
        self.seeds.evidence_restarts = Some(ev.restarts);
        self.trace_value = Some(trace_value);
        self
    }

    pub fn from_separability(
        command: &str,
        rho: &DensityMatrix,
        v: &SeparabilityVerdict,
        target: Target,
        seed: u64,
        eps_sep: f64,
    ) -> Self {
        let dims = rho.dims();
        match v {
            SeparabilityVerdict::Separable { ensemble, distance } => {
                let p = Payload::Ensemble { target, ensemble: EnsembleJson::from_ensemble(ensemble), distance: *distance };
                Self::new(command, v.tag(), dims, p, seed, eps_sep)
            }
            SeparabilityVerdict::Entangled { witness, trace_value, .. } => {
                Self::new(command, v.tag(), dims, witness_payload(witness, None), seed, eps_sep)
                    .with_witness_evidence(witness, *trace_value)
            }
            SeparabilityVerdict::Inconclusive { iterations, best_distance, .. } => {
                let reason = format!("no verdict after {iterations} iterations, distance {best_distance:e}");
                Self::new(command, v.tag(), dims, Payload::None { reason }, seed, eps_sep)
            }
        }
    }

    pub fn from_rew(command: &str, rho: &DensityMatrix, v: &RewVerdict, seed: u64, eps_sep: f64) -> Self {
        let dims = rho.dims();
        let tag = format!("rew-{}", v.tag());
        match v {
            RewVerdict::Yes { rew, trace_value, .. } => {
                Self::new(command, &tag, dims, witness_payload(rew, None), seed, eps_sep)
                    .with_witness_evidence(rew, *trace_value)
            }
            RewVerdict::No { ensemble, distance } => {
                let p = Payload::Ensemble {
                    target: Target::RealPart,
                    ensemble: EnsembleJson::from_ensemble(ensemble),
                    distance: *distance,
                };
                Self::new(command, &tag, dims, p, seed, eps_sep)
            }
            RewVerdict::Inconclusive { best_distance, .. } => {
                let reason = format!("real part undecided, distance {best_distance:e}");
                Self::new(command, &tag, dims, Payload::None { reason }, seed, eps_sep)
            }
        }
    }

    pub fn from_npt(command: &str, rho: &DensityMatrix, npt: &NptWitness, seed: u64, eps_sep: f64) -> Self {
        let lu = LuForm {
            real_witness: MatrixFile::from_operator(&npt.real_witness, Kind::Witness),
            a: ComplexJson::from_matrix(&npt.local.0),
            b: ComplexJson::from_matrix(&npt.local.1),
        };
        Self::new(command, "npt-detected", rho.dims(), witness_payload(&npt.witness, Some(lu)), seed, eps_sep)
            .with_witness_evidence(&npt.witness, npt.trace_value)
    }

    pub fn from_hit(command: &str, rho: &DensityMatrix, hit: &OrbitHit, seed: u64, eps_sep: f64) -> Self {
        let p = Payload::Elu {
            u: ComplexJson::from_matrix(&hit.lu.u),
            v: ComplexJson::from_matrix(&hit.lu.v),
            rew: MatrixFile::from_operator(hit.rew.base(), Kind::Witness),
            stage: format!("{:?}", hit.stage).to_lowercase(),
        };
        Self::new(command, "elu-detected", rho.dims(), p, seed, eps_sep).with_witness_evidence(&hit.rew, hit.trace_value)
    }

    pub fn from_evidence(command: &str, tag: &str, rho: &DensityMatrix, ev: &PrsEvidence, eps_sep: f64) -> Self {
        let trials = ev
            .trials
            .iter()
            .map(|t| {
                let (u, v) = match &t.transform {
                    TrialTransform::Local(lu) => (Some(ComplexJson::from_matrix(&lu.u)), Some(ComplexJson::from_matrix(&lu.v))),
                    _ => (None, None),
                };
                let ensemble = match &t.verdict {
                    RewVerdict::No { ensemble, .. } => Some(EnsembleJson::from_ensemble(ensemble)),
                    _ => None,
                };
                TrialJson { transform: t.transform.describe(), u, v, verdict: t.verdict.tag().into(), ensemble }
            })
            .collect();
        let p = Payload::Evidence { status: format!("{:?}", ev.status), trials };
        Self::new(command, tag, rho.dims(), p, ev.seed, eps_sep)
    }

    pub fn from_flowchart(rho: &DensityMatrix, v: &FlowchartVerdict, seed: u64, eps_sep: f64) -> Self {
        let command = "flowchart";
        match v {
            FlowchartVerdict::NptDetected(npt) => Self::from_npt(command, rho, npt, seed, eps_sep),
            FlowchartVerdict::RewDetected { rew, trace_value } => {
                Self::new(command, v.tag(), rho.dims(), witness_payload(rew, None), seed, eps_sep)
                    .with_witness_evidence(rew, *trace_value)
            }
            FlowchartVerdict::EluDetected(hit) => Self::from_hit(command, rho, hit, seed, eps_sep),
            FlowchartVerdict::PrsCandidate { separable: Some(e), .. } => {
                let p = Payload::Ensemble {
                    target: Target::State,
                    ensemble: EnsembleJson::from_ensemble(e),
                    distance: e.distance(rho),
                };
                Self::new(command, v.tag(), rho.dims(), p, seed, eps_sep)
            }
            FlowchartVerdict::PrsCandidate { evidence: Some(ev), .. } => {
                Self::from_evidence(command, v.tag(), rho, ev, eps_sep)
            }
            FlowchartVerdict::PrsCandidate { .. } => {
                let reason = "no evidence recorded".to_string();
                Self::new(command, v.tag(), rho.dims(), Payload::None { reason }, seed, eps_sep)
            }
            FlowchartVerdict::Inconclusive { reason, .. } => {
                Self::new(command, v.tag(), rho.dims(), Payload::None { reason: reason.clone() }, seed, eps_sep)
            }
        }
    }
}

fn witness_payload(w: &Witness, lu_form: Option<LuForm>) -> Payload {
    Payload::Witness {
        witness: MatrixFile::from_operator(w.base(), Kind::Witness),
        provenance: w.provenance().as_str().into(),
        lu_form,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub tag: String,
    pub checks: Vec<Check>,
}

struct Checks(Vec<Check>);

impl Checks {
    fn push(&mut self, name: &str, passed: bool, detail: String) {
        self.0.push(Check { name: name.into(), passed, detail });
    }
}

fn target_state(rho: &DensityMatrix, target: Target) -> Result<DensityMatrix> {
    Ok(match target {
        Target::State => rho.clone(),
        Target::RealPart => DensityMatrix::new(rho.base().real_part())?,
    })
}

fn check_ensemble(out: &mut Checks, label: &str, e: &EnsembleJson, state: &DensityMatrix, eps: f64) {
    match e.to_ensemble(state.dims()) {
        Ok(ens) => {
            let d = ens.distance(state);
            out.push(&format!("{label}: distance"), d <= eps * (1.0 + 1e-9), format!("{d:e} (limit {eps:e})"));
        }
        Err(err) => out.push(&format!("{label}: ensemble"), false, err.to_string()),
    }
}

fn check_witness(
    out: &mut Checks,
    w: &BipartiteOperator,
    state: &DensityMatrix,
    cert: &CertificateFile,
) -> Result<()> {
    let scale = w.op().max_abs();
    let min = w.op().min_eigenvalue();
    out.push("witness not PSD", min < -1e-10 * scale, format!("min eigenvalue {min:e}"));
    let t = w.trace_with(state.base())?;
    let delta = cert.tolerances.delta;
    out.push("detects", t < -delta, format!("tr(Wρ) = {t:e}"));
    if let Some(stored) = cert.trace_value {
        let diff = (t - stored).abs();
        out.push("trace replay", diff <= cert.tolerances.replay, format!("stored {stored:e}, diff {diff:e}"));
    }
    let (Some(restarts), Some(seed)) = (cert.seeds.evidence_restarts, cert.seeds.evidence_seed) else {
        bail!("witness certificate without evidence seeds");
    };
    let bp = block_positivity(w, restarts, seed);
    let limit = -cert.tolerances.block_positivity * scale;
    out.push(
        "block positivity replay",
        bp.min_value >= limit,
        format!("min product value {:e} over {restarts} restarts (limit {limit:e})", bp.min_value),
    );
    Ok(())
}

fn operator_of(f: &MatrixFile, dims: (usize, usize)) -> Result<BipartiteOperator> {
    let op = f.operator()?;
    if op.dims() != dims {
        bail!("operator dims {:?} differ from state dims {:?}", op.dims(), dims);
    }
    Ok(op)
}

fn apply_transform(rho: &DensityMatrix, t: &TrialJson) -> Result<DensityMatrix> {
    Ok(match t.transform.as_str() {
        "identity" => rho.clone(),
        "complex conjugate" => rho.conj(),
        "partial transpose" => rho.partial_transpose()?,
        "swap" => rho.swap_sides(),
        "local unitary" => {
            let (Some(u), Some(v)) = (&t.u, &t.v) else { bail!("local unitary trial without matrices") };
            rho.apply_local(&u.to_matrix()?, &v.to_matrix()?)?
        }
        other => bail!("unknown transform '{other}'"),
    })
}

/// Re-checks `cert` against `rho` using only the stored payload and seeds.
pub fn verify(cert: &CertificateFile, rho: &DensityMatrix) -> Result<VerifyReport> {
    let mut out = Checks(Vec::new());
    let dims = rho.dims();
    if [dims.0, dims.1] != cert.dims {
        out.push("dims", false, format!("certificate {:?}, state {:?}", cert.dims, dims));
        return Ok(VerifyReport { passed: false, tag: cert.tag.clone(), checks: out.0 });
    }
    out.push("format", cert.format == FORMAT, cert.format.clone());
    match &cert.payload {
        Payload::Ensemble { target, ensemble, distance } => {
            let state = target_state(rho, *target)?;
            check_ensemble(&mut out, "ensemble", ensemble, &state, cert.tolerances.eps_sep);
            if let Ok(ens) = ensemble.to_ensemble(dims) {
                let diff = (ens.distance(&state) - distance).abs();
                out.push("distance replay", diff <= cert.tolerances.replay, format!("diff {diff:e}"));
            }
        }
        Payload::Witness { witness, lu_form, .. } => {
            let w = operator_of(witness, dims)?;
            check_witness(&mut out, &w, rho, cert)?;
            if let Some(lu) = lu_form {
                let wr = operator_of(&lu.real_witness, dims)?;
                let (a, b) = (lu.a.to_matrix()?, lu.b.to_matrix()?);
                out.push("real witness is real", is_real(wr.matrix(), 0.0), String::new());
                let res = unitarity_residual(&a).max(unitarity_residual(&b));
                out.push("local factors unitary", res < 1e-10, format!("residual {res:e}"));
                let back = wr.apply_local(&a, &b)?;
                let diff = max_abs(&(back.matrix() - w.matrix()));
                out.push("witness is LU-equivalent to the real one", diff < 1e-10, format!("residual {diff:e}"));
            }
        }
        Payload::Elu { u, v, rew, .. } => {
            let (u, v) = (u.to_matrix()?, v.to_matrix()?);
            let res = unitarity_residual(&u).max(unitarity_residual(&v));
            out.push("local factors unitary", res < 1e-10, format!("residual {res:e}"));
            let wr = operator_of(rew, dims)?;
            out.push("witness is real", is_real(wr.matrix(), 0.0), String::new());
            let conj = rho.apply_local(&u, &v)?;
            check_witness(&mut out, &wr, &conj, cert)?;
        }
        Payload::Evidence { trials, .. } => {
            for (k, t) in trials.iter().enumerate() {
                if t.verdict == "yes" {
                    out.push(&format!("trial {k}"), false, "trial found a real witness".into());
                    continue;
                }
                let Some(e) = &t.ensemble else { continue };
                let s = apply_transform(rho, t)?;
                let plus = DensityMatrix::new(s.base().real_part())?;
                check_ensemble(&mut out, &format!("trial {k} ({})", t.transform), e, &plus, cert.tolerances.eps_sep);
            }
        }
        Payload::None { reason } => {
            out.push("no payload", true, reason.clone());
        }
    }
    let passed = out.0.iter().all(|c| c.passed);
    Ok(VerifyReport { passed, tag: cert.tag.clone(), checks: out.0 })
}

