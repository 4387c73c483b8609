//! `dilatron`: construct and verify unitary N-dilations and the things they
//! certify. Every subcommand validates its JSON inputs before any math runs,
//! prints a deterministic report to stdout, and exits 0 on pass, 2 on a
//! numerical-check failure, 3 on input or validation errors.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use dilatron_core::cubature::{scalar_cubature, vn_check, VNCertificate};
use dilatron_core::dilation::{
    egervary_dilation, ergodic_demo, halmos_dilation, verify_dilation, NDilation,
    VerificationReport,
};
use dilatron_core::matrix::CMatrix;
use dilatron_core::poly::MultiPoly;
use dilatron_core::tuple::{
    brehmer_check, dilate_commutant_pair, doubly_commuting_dilation, verify_regular,
    ContractionTuple,
};
use dilatron_core::{CPMap, CubatureRule, Tol};

mod demo;

#[derive(Parser)]
#[command(
    name = "dilatron",
    about = "Unitary N-dilations of contraction matrices and their consequences",
    version
)]
struct Cli {
    /// Seed for every randomized choice (joint-diagonalization mixing,
    /// demo samples)
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Halmos,
    Egervary,
}

#[derive(Subcommand)]
enum Command {
    /// Construct a unitary N-dilation of a single contraction
    Dilate {
        /// Contraction matrix (CMatrix JSON)
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        order: usize,
        #[arg(long, value_enum)]
        method: Method,
        /// Where to write the NDilation JSON
        #[arg(long)]
        out: PathBuf,
    },
    /// Construct the product N-dilation of a doubly commuting tuple
    DilateTuple {
        /// Tuple JSON {"ops": [CMatrix, ...]}
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        order: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Construct the joint N-dilation of a commuting pair (U unitary, V contraction)
    DilateCommutant {
        /// Unitary matrix (CMatrix JSON)
        #[arg(long)]
        unitary: PathBuf,
        /// Commuting contraction (CMatrix JSON)
        #[arg(long)]
        contraction: PathBuf,
        #[arg(long)]
        order: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check the power-compression identities of a dilation
    Verify {
        #[arg(long)]
        dilation: PathBuf,
        /// Tuple JSON, or a bare CMatrix for a single contraction
        #[arg(long)]
        tuple: PathBuf,
        #[arg(long)]
        order: usize,
    },
    /// Check the regular-dilation identities T(m) = P_H U(m) P_H
    VerifyRegular {
        #[arg(long)]
        dilation: PathBuf,
        #[arg(long)]
        tuple: PathBuf,
        #[arg(long)]
        order: usize,
    },
    /// Evaluate the Brehmer positivity condition on a commuting tuple
    Brehmer {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Build a torus cubature rule exact at a polydisc point
    Cubature {
        /// Point JSON: [[re, im], ...]
        #[arg(long)]
        point: PathBuf,
        #[arg(long)]
        order: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check ‖p(T)‖ against certificate and torus sup-norm bounds
    VnCheck {
        #[arg(long)]
        tuple: PathBuf,
        #[arg(long)]
        poly: PathBuf,
        #[arg(long)]
        cert: Option<PathBuf>,
    },
    /// Choi positivity, index, and contractivity of a CP map
    CpIndex {
        #[arg(long = "in")]
        input: PathBuf,
    },
    /// Cesàro means against the cyclic-shift dilation of T = 0
    ErgodicDemo {
        #[arg(long)]
        order: usize,
    },
    /// Run the bundled fixture tour and emit one report per piece
    Demo,
}

/// Stable-keyed report every subcommand emits.
#[derive(Serialize)]
pub struct RunReport {
    pub command: String,
    pub pass: bool,
    pub residuals: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outputs: Option<Vec<String>>,
    pub seed: u64,
    pub tolerance_scale: f64,
    pub tolerances: BTreeMap<String, f64>,
}

impl RunReport {
    pub fn new(command: &str, seed: u64, tol: &Tol) -> Self {
        Self {
            command: command.to_string(),
            pass: false,
            residuals: BTreeMap::new(),
            outputs: None,
            seed,
            tolerance_scale: tol.scale,
            tolerances: tol
                .entries()
                .into_iter()
                .map(|(k, v)| (k.into(), v))
                .collect(),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(3);
        }
    };
    let tol = match tolerance_from_env() {
        Ok(t) => t,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(3);
        }
    };
    match run(cli, &tol) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn tolerance_from_env() -> Result<Tol, String> {
    match std::env::var("DILATRON_TOLERANCE_SCALE") {
        Ok(raw) => {
            let scale: f64 = raw
                .parse()
                .map_err(|_| format!("DILATRON_TOLERANCE_SCALE is not a number: {raw:?}"))?;
            if !scale.is_finite() || scale <= 0.0 {
                return Err(format!(
                    "DILATRON_TOLERANCE_SCALE must be a positive finite number, got {raw:?}"
                ));
            }
            Ok(Tol::scaled(scale))
        }
        Err(_) => Ok(Tol::default()),
    }
}

fn run(cli: Cli, tol: &Tol) -> Result<bool, String> {
    let seed = cli.seed;
    let report = match cli.command {
        Command::Dilate {
            input,
            order,
            method,
            out,
        } => cmd_dilate(&input, order, method, &out, seed, tol)?,
        Command::DilateTuple { input, order, out } => {
            cmd_dilate_tuple(&input, order, &out, seed, tol)?
        }
        Command::DilateCommutant {
            unitary,
            contraction,
            order,
            out,
        } => cmd_dilate_commutant(&unitary, &contraction, order, &out, seed, tol)?,
        Command::Verify {
            dilation,
            tuple,
            order,
        } => cmd_verify(&dilation, &tuple, order, false, seed, tol)?,
        Command::VerifyRegular {
            dilation,
            tuple,
            order,
        } => cmd_verify(&dilation, &tuple, order, true, seed, tol)?,
        Command::Brehmer { input } => cmd_brehmer(&input, seed, tol)?,
        Command::Cubature { point, order, out } => cmd_cubature(&point, order, &out, seed, tol)?,
        Command::VnCheck { tuple, poly, cert } => {
            cmd_vn_check(&tuple, &poly, cert.as_deref(), seed, tol)?
        }
        Command::CpIndex { input } => return cmd_cp_index(&input, tol),
        Command::ErgodicDemo { order } => cmd_ergodic(order, seed, tol)?,
        Command::Demo => return demo::run_demo(seed, tol),
    };
    emit(&report)?;
    Ok(report.pass)
}

pub fn emit<T: Serialize>(report: &T) -> Result<(), String> {
    let text = serde_json::to_string_pretty(report)
        .map_err(|e| format!("failed to serialize report: {e}"))?;
    println!("{text}");
    Ok(())
}

// --- input loading ----------------------------------------------------------

fn read_file(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_matrix(path: &Path) -> Result<CMatrix, String> {
    let text = read_file(path)?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

#[derive(Serialize, Deserialize)]
struct TupleWire {
    ops: Vec<CMatrix>,
}

/// Accepts `{"ops": [...]}` or a bare CMatrix treated as a 1-tuple.
fn load_tuple(path: &Path, tol: &Tol) -> Result<ContractionTuple, String> {
    let text = read_file(path)?;
    let ops = if let Ok(wire) = serde_json::from_str::<TupleWire>(&text) {
        wire.ops
    } else {
        let single: CMatrix =
            serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        vec![single]
    };
    ContractionTuple::new(ops, tol).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_dilation(path: &Path) -> Result<NDilation, String> {
    let text = read_file(path)?;
    let dil: NDilation =
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    dil.validate_shapes()
        .map_err(|e| format!("{}: {e}", path.display()))?;
    for (i, u) in dil.unitaries.iter().enumerate() {
        if !u.is_finite() {
            return Err(format!(
                "{}: unitary {i} has non-finite entries",
                path.display()
            ));
        }
    }
    Ok(dil)
}

fn load_point(path: &Path) -> Result<Vec<Complex64>, String> {
    let text = read_file(path)?;
    let raw: Vec<[f64; 2]> =
        serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut out = Vec::with_capacity(raw.len());
    for (i, [re, im]) in raw.into_iter().enumerate() {
        if !re.is_finite() || !im.is_finite() {
            return Err(format!(
                "{}: point[{i}]: non-finite coordinate",
                path.display()
            ));
        }
        out.push(Complex64::new(re, im));
    }
    Ok(out)
}

fn load_poly(path: &Path) -> Result<MultiPoly, String> {
    let text = read_file(path)?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_cert(path: &Path) -> Result<VNCertificate, String> {
    let text = read_file(path)?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_cpmap(path: &Path) -> Result<CPMap, String> {
    let text = read_file(path)?;
    serde_json::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), String> {
    let text = serde_json::to_string_pretty(value)
        .map_err(|e| format!("failed to serialize output: {e}"))?;
    std::fs::write(path, text).map_err(|e| format!("{}: {e}", path.display()))
}

// --- subcommands ------------------------------------------------------------

fn index_key(prefix: &str, m: &[i64]) -> String {
    let joined = m
        .iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",");
    format!("{prefix}[{joined}]")
}

fn fill_verification(report: &mut RunReport, rep: &VerificationReport, prefix: &str) {
    report
        .residuals
        .insert("max_power_residual".into(), rep.max_residual);
    report
        .residuals
        .insert("unitarity_residual".into(), rep.unitarity_residual);
    report
        .residuals
        .insert("commutation_residual".into(), rep.commutation_residual);
    for (m, r) in &rep.residuals {
        report.residuals.insert(index_key(prefix, m), *r);
    }
    report.pass = rep.pass;
}

fn cmd_dilate(
    input: &Path,
    order: usize,
    method: Method,
    out: &Path,
    seed: u64,
    tol: &Tol,
) -> Result<RunReport, String> {
    let t = load_matrix(input)?;
    let dil = match method {
        Method::Halmos => {
            if order != 1 {
                return Err(format!(
                    "the Halmos construction is a 1-dilation; requested order {order}"
                ));
            }
            halmos_dilation(&t, tol).map_err(|e| e.to_string())?
        }
        Method::Egervary => egervary_dilation(&t, order, tol).map_err(|e| e.to_string())?,
    };
    let tuple = ContractionTuple::new(vec![t], tol).map_err(|e| e.to_string())?;
    let rep = verify_dilation(&dil, &tuple, order, tol).map_err(|e| e.to_string())?;
    write_json(out, &dil)?;
    let mut report = RunReport::new("dilate", seed, tol);
    fill_verification(&mut report, &rep, "pow");
    report
        .residuals
        .insert("dimension".into(), dil.dim() as f64);
    report.outputs = Some(vec![out.display().to_string()]);
    Ok(report)
}

fn cmd_dilate_tuple(
    input: &Path,
    order: usize,
    out: &Path,
    seed: u64,
    tol: &Tol,
) -> Result<RunReport, String> {
    let tuple = load_tuple(input, tol)?;
    let dil = doubly_commuting_dilation(&tuple, order, tol).map_err(|e| e.to_string())?;
    let rep = verify_dilation(&dil, &tuple, order, tol).map_err(|e| e.to_string())?;
    write_json(out, &dil)?;
    let mut report = RunReport::new("dilate-tuple", seed, tol);
    fill_verification(&mut report, &rep, "pow");
    report
        .residuals
        .insert("dimension".into(), dil.dim() as f64);
    report.outputs = Some(vec![out.display().to_string()]);
    Ok(report)
}

fn cmd_dilate_commutant(
    unitary: &Path,
    contraction: &Path,
    order: usize,
    out: &Path,
    seed: u64,
    tol: &Tol,
) -> Result<RunReport, String> {
    let u = load_matrix(unitary)?;
    let v = load_matrix(contraction)?;
    let dil = dilate_commutant_pair(&u, &v, order, tol).map_err(|e| e.to_string())?;
    let tuple = ContractionTuple::new(vec![u, v], tol).map_err(|e| e.to_string())?;
    let rep = verify_dilation(&dil, &tuple, order, tol).map_err(|e| e.to_string())?;
    write_json(out, &dil)?;
    let mut report = RunReport::new("dilate-commutant", seed, tol);
    fill_verification(&mut report, &rep, "pow");
    report
        .residuals
        .insert("dimension".into(), dil.dim() as f64);
    report.outputs = Some(vec![out.display().to_string()]);
    Ok(report)
}

fn cmd_verify(
    dilation: &Path,
    tuple_path: &Path,
    order: usize,
    regular: bool,
    seed: u64,
    tol: &Tol,
) -> Result<RunReport, String> {
    let dil = load_dilation(dilation)?;
    let tuple = load_tuple(tuple_path, tol)?;
    let (name, prefix, rep) = if regular {
        (
            "verify-regular",
            "reg",
            verify_regular(&dil, &tuple, order, tol).map_err(|e| e.to_string())?,
        )
    } else {
        (
            "verify",
            "pow",
            verify_dilation(&dil, &tuple, order, tol).map_err(|e| e.to_string())?,
        )
    };
    let mut report = RunReport::new(name, seed, tol);
    fill_verification(&mut report, &rep, prefix);
    Ok(report)
}

fn cmd_brehmer(input: &Path, seed: u64, tol: &Tol) -> Result<RunReport, String> {
    let tuple = load_tuple(input, tol)?;
    let rep = brehmer_check(&tuple, tol).map_err(|e| e.to_string())?;
    let mut report = RunReport::new("brehmer", seed, tol);
    for (subset, min) in &rep.min_eigenvalues {
        let key = format!(
            "min_eig[{}]",
            subset
                .iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        );
        report.residuals.insert(key, *min);
    }
    report.pass = rep.pass;
    Ok(report)
}

fn cmd_cubature(
    point: &Path,
    order: usize,
    out: &Path,
    seed: u64,
    tol: &Tol,
) -> Result<RunReport, String> {
    let t = load_point(point)?;
    let rule = scalar_cubature(&t, order, tol, seed).map_err(|e| e.to_string())?;
    write_json(out, &rule)?;
    let mut report = RunReport::new("cubature", seed, tol);
    let (sum_dev, max_mono) = cubature_self_check(&rule, &t, order);
    report
        .residuals
        .insert("point_count".into(), rule.points.len() as f64);
    report
        .residuals
        .insert("weight_sum_deviation".into(), sum_dev);
    report
        .residuals
        .insert("max_monomial_residual".into(), max_mono);
    report.pass = sum_dev <= 1e-12 * tol.scale && max_mono <= 1e-9 * tol.scale;
    report.outputs = Some(vec![out.display().to_string()]);
    Ok(report)
}

/// Exactness self-check: weight normalization and every monomial of total
/// degree at most `order`.
pub fn cubature_self_check(rule: &CubatureRule, t: &[Complex64], order: usize) -> (f64, f64) {
    let sum_dev = (rule.weights.iter().sum::<f64>() - 1.0).abs();
    let k = t.len();
    let mut max_mono = 0.0f64;
    let mut alpha = vec![0u32; k];
    loop {
        let total: u32 = alpha.iter().sum();
        if total as usize <= order {
            let direct: Complex64 = t.iter().zip(&alpha).map(|(z, &e)| z.powu(e)).product();
            let quad: Complex64 = rule
                .points
                .iter()
                .zip(&rule.weights)
                .map(|(p, &w)| {
                    let m: Complex64 = p.iter().zip(&alpha).map(|(z, &e)| z.powu(e)).product();
                    m * w
                })
                .sum();
            max_mono = max_mono.max((direct - quad).norm());
        }
        let mut d = 0;
        loop {
            if d == k {
                return (sum_dev, max_mono);
            }
            alpha[d] += 1;
            if alpha[d] as usize <= order {
                break;
            }
            alpha[d] = 0;
            d += 1;
        }
    }
}

fn cmd_vn_check(
    tuple_path: &Path,
    poly: &Path,
    cert: Option<&Path>,
    seed: u64,
    tol: &Tol,
) -> Result<RunReport, String> {
    let tuple = load_tuple(tuple_path, tol)?;
    let p = load_poly(poly)?;
    let cert = cert.map(load_cert).transpose()?;
    let rep = vn_check(&tuple, &p, cert.as_ref(), tol).map_err(|e| e.to_string())?;
    let mut report = RunReport::new("vn-check", seed, tol);
    report.residuals.insert("lhs".into(), rep.lhs);
    report.residuals.insert("sup_bound".into(), rep.sup_bound);
    if let Some(cb) = rep.cert_bound {
        report.residuals.insert("cert_bound".into(), cb);
    }
    report.pass = rep.pass;
    Ok(report)
}

/// Payload shape fixed by the interface contract: {"cp", "index",
/// "choi_min_eig"} plus the informational contractivity flag. `index` is
/// null when the map is not CP.
#[derive(Serialize)]
struct CpIndexReport {
    cp: bool,
    index: Option<usize>,
    choi_min_eig: f64,
    contractive: bool,
}

fn cmd_cp_index(input: &Path, tol: &Tol) -> Result<bool, String> {
    let phi = load_cpmap(input)?;
    let (cp, min_eig) = phi.is_cp(tol);
    let index = if cp {
        Some(phi.index(tol).map_err(|e| e.to_string())?)
    } else {
        None
    };
    let (contractive, _) = phi.contractivity(tol);
    emit(&CpIndexReport {
        cp,
        index,
        choi_min_eig: min_eig,
        contractive,
    })?;
    Ok(true)
}

fn cmd_ergodic(order: usize, seed: u64, tol: &Tol) -> Result<RunReport, String> {
    let rep = ergodic_demo(order).map_err(|e| e.to_string())?;
    // closed form of the same scalar sum: |2 / ((N+1)(1−u))|
    let u = Complex64::from_polar(1.0, std::f64::consts::TAU / ((2 * order + 2) as f64));
    let closed = (Complex64::new(2.0, 0.0)
        / ((Complex64::ONE - u) * Complex64::new((order + 1) as f64, 0.0)))
    .norm();
    let mut report = RunReport::new("ergodic-demo", seed, tol);
    report
        .residuals
        .insert("residual_modulus".into(), rep.residual_modulus);
    report
        .residuals
        .insert("limit_target".into(), rep.limit_target);
    report
        .residuals
        .insert("cesaro_mean_modulus".into(), rep.cesaro_mean_modulus);
    report.residuals.insert(
        "closed_form_deviation".into(),
        (rep.residual_modulus - closed).abs(),
    );
    report.residuals.insert(
        "target_deviation".into(),
        (rep.residual_modulus - rep.limit_target).abs(),
    );
    report.pass = (rep.residual_modulus - closed).abs() <= 1e-12
        && (rep.cesaro_mean_modulus - 1.0 / ((order + 1) as f64)).abs() <= 1e-12;
    Ok(report)
}
