//! Subcommands. Each returns an [`Outcome`]; `main` prints it and exits.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rewlab_core::bipartite::PPT_TOL;
use rewlab_core::linalg::max_imag;
use rewlab_core::orbit::flowchart_classify;
use rewlab_core::separability::{gilbert, rew_detectable};
use rewlab_core::states::{
    bell_phase_state, dephase_upb, h_counterexample, quqart_pair, rank4_state, upb_family, upb_state,
    witness_theta, Rank4Params, UpbAngles,
};
use rewlab_core::witness::{project_npt, project_witness};
use rewlab_core::{
    BipartiteOperator, DensityMatrix, FlowchartOptions, FlowchartVerdict, GilbertOptions, PptVerdict, RewVerdict,
    SeparabilityVerdict,
};
use serde_json::{json, Value};

use crate::certificate::{verify, CertificateFile, Target};
use crate::files::{read_json, write_json, ComplexJson, Kind, MatrixFile};

/// Exit code for malformed command lines.
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, Parser)]
#[command(name = "rewlab", version, about = "Real and complex entanglement witnesses")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Global {
    /// Frobenius distance below which a state counts as separable.
    #[arg(long, global = true, default_value_t = 1e-6)]
    pub tol: f64,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Objective evaluations per restart of the orbit search.
    #[arg(long, global = true)]
    pub budget: Option<usize>,
    /// Print a machine-readable report instead of text.
    #[arg(long, global = true)]
    pub json: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a state, witness or operator family and write it as a matrix file.
    Construct(ConstructArgs),
    /// PPT test, realness, reduced ranks and real-witness detectability.
    Analyze {
        file: PathBuf,
        #[arg(long)]
        cert: Option<PathBuf>,
    },
    /// Run the detection flowchart. Exit 0 detected, 2 candidate, 3 inconclusive.
    Flowchart {
        file: PathBuf,
        #[arg(long)]
        cert: Option<PathBuf>,
        #[arg(long, default_value_t = 32)]
        prs_trials: usize,
    },
    /// Re-check a certificate against a state. Exit 0 on pass, 1 on failure.
    Verify { certificate: PathBuf, state: PathBuf },
    /// Locally project an NPT state or a witness onto C^p ⊗ C^p.
    Project {
        file: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
        /// Also write the local maps here.
        #[arg(long)]
        transform: Option<PathBuf>,
    },
    /// Frank-Wolfe separability test of the state itself.
    Gilbert {
        file: PathBuf,
        #[arg(long, default_value_t = 5000)]
        max_iter: usize,
        #[arg(long)]
        cert: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    BellPhase,
    WitnessTheta,
    HExample,
    Upb,
    UpbState,
    UpbDephased,
    Rank4,
    QuqartRho,
    QuqartSigma,
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    pub family: Family,
    #[arg(long, allow_negative_numbers = true)]
    pub theta: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,
    #[arg(long, default_value_t = 1.0)]
    pub b: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c: f64,
    #[arg(long, default_value_t = 1.0)]
    pub d: f64,
    /// Six UPB angles γ_A,θ_A,φ_A,γ_B,θ_B,φ_B; searched from --seed when absent.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub angles: Option<Vec<f64>>,
    #[arg(short, long)]
    pub out: Option<PathBuf>,
}

/// Invalid parameters that clap cannot see.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub exit: i32,
    pub text: String,
    pub json: Value,
}

impl Outcome {
    pub fn render(&self, json: bool) -> String {
        if json {
            serde_json::to_string_pretty(&self.json).expect("report serializes")
        } else {
            self.text.clone()
        }
    }
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let g = &cli.global;
    match &cli.command {
        Command::Construct(a) => construct(a, g),
        Command::Analyze { file, cert } => analyze(file, cert.as_deref(), g),
        Command::Flowchart { file, cert, prs_trials } => flowchart(file, cert.as_deref(), *prs_trials, g),
        Command::Verify { certificate, state } => verify_cmd(certificate, state),
        Command::Project { file, out, transform } => project(file, out.as_deref(), transform.as_deref()),
        Command::Gilbert { file, max_iter, cert } => gilbert_cmd(file, *max_iter, cert.as_deref(), g),
    }
}

pub fn gilbert_options(g: &Global) -> GilbertOptions {
    GilbertOptions { eps_sep: g.tol, seed: g.seed, ..GilbertOptions::default() }
}

pub fn flowchart_options(g: &Global, prs_trials: usize) -> FlowchartOptions {
    let mut o = FlowchartOptions::with_seed(g.seed);
    o.gilbert.eps_sep = g.tol;
    o.orbit.confirm.eps_sep = g.tol;
    if let Some(b) = g.budget {
        o.orbit.budget = b;
    }
    o.prs_trials = prs_trials;
    o
}

/// `dir/name.json` becomes `dir/name.<suffix>.json`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}.{suffix}.json"))
}

fn load_state(path: &Path) -> Result<DensityMatrix> {
    read_json::<MatrixFile>(path)?.state()
}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    anyhow!(UsageError(msg.into()))
}

fn family_name(f: Family) -> String {
    f.to_possible_value().expect("no skipped variants").get_name().to_string()
}

fn upb_angles(a: &ConstructArgs, seed: u64) -> Result<(UpbAngles, Option<usize>)> {
    match &a.angles {
        Some(v) => {
            let arr: [f64; 6] = v.as_slice().try_into().map_err(|_| usage("--angles needs six values"))?;
            Ok((UpbAngles::from_array(arr), None))
        }
        None => {
            let (angles, draws) = UpbAngles::search(seed);
            Ok((angles, Some(draws)))
        }
    }
}

fn construct(a: &ConstructArgs, g: &Global) -> Result<Outcome> {
    let name = family_name(a.family);
    let theta = || a.theta.ok_or_else(|| usage(format!("{name} needs --theta")));
    let mut extra = json!({});
    let (op, kind, trace) = match a.family {
        Family::BellPhase => {
            let s = bell_phase_state(theta()?)?;
            let t = s.norm_factor();
            (s.base().clone(), Kind::State, t)
        }
        Family::WitnessTheta => {
            let w = witness_theta(theta()?)?;
            let t = w.op().trace();
            (w.base().clone(), Kind::Witness, t)
        }
        Family::HExample => {
            let h = h_counterexample();
            let t = h.trace();
            (BipartiteOperator::new((2, 2), h)?, Kind::Hermitian, t)
        }
        Family::Upb | Family::UpbState | Family::UpbDephased => {
            let (angles, draws) = upb_angles(a, g.seed)?;
            let fam = upb_family(angles).map_err(|e| usage(e.to_string()))?;
            extra = json!({ "angles": angles.to_array(), "draws": draws, "warnings": fam.warnings });
            match a.family {
                Family::Upb => {
                    let op = BipartiteOperator::from_matrix((3, 3), fam.projector())?;
                    let t = op.op().trace();
                    (op, Kind::Hermitian, t)
                }
                Family::UpbState => {
                    let s = upb_state(&fam)?;
                    let t = s.norm_factor();
                    (s.base().clone(), Kind::State, t)
                }
                _ => {
                    let s = dephase_upb(&fam)?.sigma;
                    let t = s.norm_factor();
                    (s.base().clone(), Kind::State, t)
                }
            }
        }
        Family::Rank4 => {
            let p = Rank4Params::new(a.a, a.b, a.c, a.d).map_err(|e| usage(e.to_string()))?;
            let s = rank4_state(&p)?;
            let t = s.norm_factor();
            (s.base().clone(), Kind::State, t)
        }
        Family::QuqartRho | Family::QuqartSigma => {
            let pair = quqart_pair()?;
            let s = if a.family == Family::QuqartRho { pair.rho } else { pair.sigma };
            let t = s.norm_factor();
            (s.base().clone(), Kind::State, t)
        }
    };
    let out = a.out.clone().unwrap_or_else(|| PathBuf::from(format!("{name}.json")));
    write_json(&out, &MatrixFile::from_operator(&op, kind))?;

    let (m, n) = op.dims();
    let pt_min = op.partial_transpose().op().min_eigenvalue();
    let ppt = if pt_min >= -PPT_TOL { "PPT" } else { "NPT" };
    let imag = max_imag(op.matrix());
    let realness = if imag == 0.0 { "real" } else { "complex" };
    let mut text = String::new();
    writeln!(text, "{name}: {}x{} on C^{m} ⊗ C^{n}, written to {}", m * n, m * n, out.display())?;
    writeln!(text, "trace before normalization: {trace}")?;
    writeln!(text, "{ppt} (min eigenvalue of partial transpose {pt_min:e})")?;
    write!(text, "{realness} (max |Im| = {imag:e})")?;
    if let Some(angles) = extra.get("angles") {
        write!(text, "\nangles: {angles}")?;
    }
    let json = json!({
        "command": "construct",
        "family": name,
        "dims": [m, n],
        "kind": kind,
        "path": out,
        "trace_before_normalization": trace,
        "ppt": ppt == "PPT",
        "partial_transpose_min_eigenvalue": pt_min,
        "real": imag == 0.0,
        "max_imag": imag,
        "upb": extra,
    });
    Ok(Outcome { exit: 0, text, json })
}

fn analyze(file: &Path, cert: Option<&Path>, g: &Global) -> Result<Outcome> {
    let rho = load_state(file)?;
    let (m, n) = rho.dims();
    let ppt = rho.is_ppt(PPT_TOL);
    let pt_min = match &ppt {
        PptVerdict::Ppt { min_eigenvalue } => *min_eigenvalue,
        PptVerdict::Npt { eigenvalue, .. } => *eigenvalue,
    };
    let imag = max_imag(rho.matrix());
    let real = imag == 0.0;
    let red = rewlab_core::states::support_reduce(&rho)?;
    let opts = gilbert_options(g);
    let rep = rew_detectable(&rho, &opts)?;
    let rew = match &rep.verdict {
        RewVerdict::Yes { .. } => "Yes",
        RewVerdict::No { .. } => "No",
        RewVerdict::Inconclusive { .. } => "Inconclusive",
    };
    let cert_path = cert.map(Path::to_path_buf).unwrap_or_else(|| sibling(file, "cert"));
    let c = CertificateFile::from_rew("analyze", &rho, &rep.verdict, g.seed, g.tol);
    write_json(&cert_path, &c)?;

    let mut text = String::new();
    let ppt_word = if ppt.is_ppt() { "PPT" } else { "NPT" };
    let real_word = if real { "real" } else { "complex" };
    writeln!(text, "{ppt_word}, {real_word}, REW-detectable: {rew}")?;
    writeln!(text, "dims: {m}x{n}")?;
    writeln!(text, "min eigenvalue of partial transpose: {pt_min:e}")?;
    writeln!(text, "max |Im|: {imag:e}")?;
    writeln!(text, "reduced ranks (p, q): ({}, {})", red.p, red.q)?;
    let separable = real && matches!(rep.verdict, RewVerdict::No { .. });
    match &rep.verdict {
        RewVerdict::Yes { trace_value, lower_bound, .. } => {
            writeln!(text, "real witness: tr(Wρ) = {trace_value:e}, lower bound {lower_bound:e}")?
        }
        RewVerdict::No { distance, .. } => writeln!(text, "real part separable: distance {distance:e}")?,
        RewVerdict::Inconclusive { best_distance, .. } => writeln!(text, "real part undecided: {best_distance:e}")?,
    }
    if separable {
        writeln!(text, "Separable (certificate written)")?;
    }
    write!(text, "certificate: {}", cert_path.display())?;
    let json = json!({
        "command": "analyze",
        "dims": [m, n],
        "ppt": ppt.is_ppt(),
        "partial_transpose_min_eigenvalue": pt_min,
        "real": real,
        "max_imag": imag,
        "reduced_ranks": [red.p, red.q],
        "rew_detectable": rep.verdict.tag(),
        "separable": separable,
        "certificate": cert_path,
    });
    Ok(Outcome { exit: 0, text, json })
}

fn flowchart(file: &Path, cert: Option<&Path>, prs_trials: usize, g: &Global) -> Result<Outcome> {
    let rho = load_state(file)?;
    let opts = flowchart_options(g, prs_trials);
    let v = flowchart_classify(&rho, &opts)?;
    let cert_path = cert.map(Path::to_path_buf).unwrap_or_else(|| sibling(file, "cert"));
    let c = CertificateFile::from_flowchart(&rho, &v, g.seed, g.tol);
    write_json(&cert_path, &c)?;

    let mut text = String::new();
    writeln!(text, "{}", v.tag())?;
    let detail = match &v {
        FlowchartVerdict::NptDetected(npt) => format!("witness from partial transpose, tr(Wρ) = {:e}", npt.trace_value),
        FlowchartVerdict::RewDetected { trace_value, .. } => format!("real witness, tr(Wρ) = {trace_value:e}"),
        FlowchartVerdict::EluDetected(hit) => format!(
            "real witness after local unitaries ({:?} stage, restart {}), tr = {:e}",
            hit.stage, hit.restart, hit.trace_value
        ),
        FlowchartVerdict::PrsCandidate { separable: Some(_), .. } => "state is separable".into(),
        FlowchartVerdict::PrsCandidate { evidence, .. } => {
            let n = evidence.as_ref().map_or(0, |e| e.trials.len());
            format!("no trial out of {n} found a real witness")
        }
        FlowchartVerdict::Inconclusive { reason, .. } => reason.clone(),
    };
    writeln!(text, "{detail}")?;
    write!(text, "certificate: {}", cert_path.display())?;
    let json = json!({
        "command": "flowchart",
        "tag": v.tag(),
        "detected": v.is_detected(),
        "exit_code": v.exit_code(),
        "trace_value": c.trace_value,
        "detail": detail,
        "certificate": cert_path,
    });
    Ok(Outcome { exit: v.exit_code(), text, json })
}

fn verify_cmd(certificate: &Path, state: &Path) -> Result<Outcome> {
    let cert: CertificateFile = read_json(certificate)?;
    let rho = load_state(state)?;
    let rep = verify(&cert, &rho)?;
    let mut text = String::new();
    for c in &rep.checks {
        writeln!(text, "{} {}: {}", if c.passed { "ok  " } else { "FAIL" }, c.name, c.detail)?;
    }
    write!(text, "{} certificate: {}", rep.tag, if rep.passed { "pass" } else { "fail" })?;
    let json = serde_json::to_value(&rep)?;
    Ok(Outcome { exit: if rep.passed { 0 } else { 1 }, text, json })
}

fn project(file: &Path, out: Option<&Path>, transform: Option<&Path>) -> Result<Outcome> {
    let f: MatrixFile = read_json(file)?;
    let out = out.map(Path::to_path_buf).unwrap_or_else(|| sibling(file, "projected"));
    let (p, left, right, detail, record) = match f.kind {
        Kind::State => {
            let pr = project_npt(&f.state()?)?;
            write_json(&out, &MatrixFile::from_operator(pr.state.base(), Kind::State))?;
            let detail = format!("twist residual {:e}", pr.twist_residual);
            let rec = json!({ "twist_residual": pr.twist_residual });
            (pr.p, pr.left, pr.right, detail, rec)
        }
        Kind::Witness => {
            let pr = project_witness(&f.witness()?)?;
            write_json(&out, &MatrixFile::from_operator(pr.projected.base(), Kind::Witness))?;
            let detail = format!("expectation on the projected pure state {:e}", pr.expectation);
            let rec = json!({ "expectation": pr.expectation, "schmidt_coefficients": pr.schmidt_coefficients });
            (pr.p, pr.left, pr.right, detail, rec)
        }
        Kind::Hermitian => return Err(usage("project needs a state or witness file")),
    };
    let mut json = json!({
        "command": "project",
        "kind": f.kind,
        "p": p,
        "left": ComplexJson::from_matrix(&left),
        "right": ComplexJson::from_matrix(&right),
        "path": out,
    });
    json.as_object_mut().expect("object").extend(record.as_object().expect("object").clone());
    if let Some(t) = transform {
        write_json(t, &json)?;
    }
    let text = format!("p = {p}\n{detail}\nprojected {:?} written to {}", f.kind, out.display()).to_lowercase();
    Ok(Outcome { exit: 0, text, json })
}

fn gilbert_cmd(file: &Path, max_iter: usize, cert: Option<&Path>, g: &Global) -> Result<Outcome> {
    let rho = load_state(file)?;
    let opts = GilbertOptions { max_iter, ..gilbert_options(g) };
    let rep = gilbert(&rho, &opts);
    let cert_path = cert.map(Path::to_path_buf).unwrap_or_else(|| sibling(file, "cert"));
    let c = CertificateFile::from_separability("gilbert", &rho, &rep.verdict, Target::State, g.seed, g.tol);
    write_json(&cert_path, &c)?;
    let detail = match &rep.verdict {
        SeparabilityVerdict::Separable { distance, ensemble } => {
            format!("distance {distance:e} with {} product terms", ensemble.len())
        }
        SeparabilityVerdict::Entangled { lower_bound, trace_value, .. } => {
            format!("lower bound {lower_bound:e}, tr(Wρ) = {trace_value:e}")
        }
        SeparabilityVerdict::Inconclusive { best_distance, best_lower_bound, .. } => {
            format!("distance {best_distance:e}, lower bound {best_lower_bound:e}")
        }
    };
    let text = format!(
        "{} after {} iterations\n{detail}\ncertificate: {}",
        rep.verdict.tag(),
        rep.iterations,
        cert_path.display()
    );
    let json = json!({
        "command": "gilbert",
        "tag": rep.verdict.tag(),
        "iterations": rep.iterations,
        "best_lower_bound": rep.best_lower_bound,
        "detail": detail,
        "certificate": cert_path,
    });
    Ok(Outcome { exit: 0, text, json })
}
