//! Command-line front end. Every subcommand writes a machine-readable
//! artifact (JSON or CSV) and a short human summary on standard output.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{QrwError, Result};
use crate::geometry::{
    alphas, asymptotic_amplitude, chi_envelope_real, ks_distance, pair_alphas, solve_z_1d, solve_z_2d, AsymptoticEstimate,
    CriticalSet,
};
use crate::kernel::{build_kernel, display_scale, KernelBundle};
use crate::pipelines::{
    boundary_2d, cloud_on_curve_fraction, feasibility_filter, feasible_uniform, load_poly, near_curve, numeric_boundary_trace,
    peaks_1d, stage_soundness, ComponentVerdict, CurveJson, Frame, PeakReport, TowerConfig,
};
use crate::simulator::{evolve_with, peak_heights, window_distribution, Backend, SimConfig};
use crate::tolerances::Tolerances;
use crate::torus::{torus_fibers, NumericKernel};
use crate::walkmodel::{cayley_orthogonal, random_skew, validate_spec, WalkSpec};
use crate::fixtures;

#[derive(Parser, Debug)]
#[command(name = "qrw", version, about = "Quantum walks on integer lattices: simulation and asymptotic geometry")]
pub struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Seed for every random choice in the run.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// JSON file overriding the numeric tolerances.
    #[arg(long, global = true)]
    pub tolerances: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evolve a walk and write the amplitude profile as CSV.
    Simulate(SimulateArgs),
    /// Build the generating-function kernel (Q and the numerators P_ij).
    Kernel(KernelArgs),
    /// Track the unit-torus fibers of a 1-D kernel.
    Fibers(FibersArgs),
    /// Peak directions of a 1-D walk by exact elimination.
    Peaks1d(Peaks1dArgs),
    /// Iterated-resultant boundary curve of a 2-D walk.
    Boundary2d(Boundary2dArgs),
    /// Numerically trace the zero-curvature image of a 2-D walk.
    Trace2d(Trace2dArgs),
    /// Critical points and the stationary-phase amplitude at a direction.
    Asymptote(AsymptoteArgs),
    /// Growth exponent of peak heights between two times.
    Scaling(ScalingArgs),
    /// Random rational orthogonal coin by the Cayley transform.
    Cayley(CayleyArgs),
    /// Check unitarity and chirality count of a spec.
    Validate(SpecArgs),
    /// Join a simulated profile with predicted peaks or a boundary cloud.
    Overlay(OverlayArgs),
}

#[derive(Args, Debug, Clone)]
pub struct SpecArgs {
    /// Walk spec JSON.
    #[arg(long, conflicts_with = "fixture")]
    pub spec: Option<PathBuf>,
    /// Built-in walk: running, hadamard, cayley2, deterministic, u1, u2, toy2d.
    #[arg(long)]
    pub fixture: Option<String>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Starting chirality (1-based).
    #[arg(long, default_value_t = 1)]
    pub i: usize,
    /// Chirality to report (1-based); all when omitted.
    #[arg(long)]
    pub j: Option<usize>,
    /// Number of time steps.
    #[arg(long)]
    pub n: usize,
    /// exact or float.
    #[arg(long, default_value = "float")]
    pub mode: String,
    /// Fall back to float arithmetic instead of failing at the exact caps.
    #[arg(long)]
    pub fallback: bool,
    /// Add exact rational columns (exact mode only).
    #[arg(long)]
    pub exact_columns: bool,
    /// Output file (standard output when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct KernelArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Output file (standard output when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A kernel either loaded from `kernel.json` or built from a spec.
#[derive(Args, Debug, Clone)]
pub struct KernelSource {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Kernel JSON written by `qrw kernel`.
    #[arg(long)]
    pub kernel: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct FibersArgs {
    #[command(flatten)]
    pub src: KernelSource,
    /// Angular samples per torus circle.
    #[arg(long, default_value_t = 512)]
    pub grid: usize,
    /// Output file (standard output when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct Peaks1dArgs {
    #[command(flatten)]
    pub src: KernelSource,
    /// Torus grid of the smoothness probe.
    #[arg(long, default_value_t = 512)]
    pub grid: usize,
    /// Output file (standard output when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct Boundary2dArgs {
    #[command(flatten)]
    pub src: KernelSource,
    /// native or square (r = u + v − 1, s = u − v).
    #[arg(long, default_value = "native")]
    pub frame: String,
    /// Keep only the factor invariant under the square's symmetries.
    #[arg(long)]
    pub symmetric: bool,
    /// Cap on the predicted degree of any resultant.
    #[arg(long, default_value_t = 200)]
    pub max_degree: u32,
    /// Cap on the number of terms of any resultant.
    #[arg(long, default_value_t = 2_000_000)]
    pub max_terms: usize,
    /// Checkpoint directory for finished stages.
    #[arg(long, env = "QRW_STAGE_DIR")]
    pub stage_dir: Option<PathBuf>,
    /// Reuse checkpointed stages.
    #[arg(long)]
    pub resume: bool,
    /// Stop after the three first-level resultants.
    #[arg(long)]
    pub first_level: bool,
    /// Numeric common-zero witnesses per first-level stage.
    #[arg(long, default_value_t = 20)]
    pub witnesses: usize,
    /// Grid for the component feasibility filter (0 skips it).
    #[arg(long, default_value_t = 400)]
    pub filter_grid: usize,
    /// Output file (standard output when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct Trace2dArgs {
    #[command(flatten)]
    pub src: KernelSource,
    /// Angular samples per torus circle.
    #[arg(long, default_value_t = 256)]
    pub grid: usize,
    /// Display frame: native or square (r = u + v − 1, s = u − v).
    #[arg(long, default_value = "native")]
    pub frame: String,
    /// Polynomial (exchange JSON over r, s) to compare the cloud with.
    #[arg(long)]
    pub check: Option<PathBuf>,
    /// Built-in published curve to compare with: p1 or p2.
    #[arg(long, conflicts_with = "check")]
    pub published: Option<String>,
    /// Reference points for the |P| quantile.
    #[arg(long, default_value_t = 20000)]
    pub samples: usize,
    /// Output file (standard output when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct AsymptoteArgs {
    #[command(flatten)]
    pub src: KernelSource,
    /// Starting chirality (1-based).
    #[arg(long, default_value_t = 1)]
    pub i: usize,
    /// Target chirality (1-based).
    #[arg(long, default_value_t = 1)]
    pub j: usize,
    /// Direction r/n, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub dir: Vec<f64>,
    /// Number of time steps.
    #[arg(long, default_value_t = 1000)]
    pub n: usize,
    /// Angular samples per torus circle.
    #[arg(long, default_value_t = 512)]
    pub grid: usize,
    /// Also simulate (float) and report the amplitude at the same site.
    #[arg(long)]
    pub compare: bool,
    /// Window side M for the envelope-law comparison (0 skips it).
    #[arg(long, default_value_t = 0)]
    pub window: usize,
    /// Output file (standard output when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ScalingArgs {
    #[command(flatten)]
    pub spec: SpecArgs,
    /// Starting chirality (1-based).
    #[arg(long, default_value_t = 1)]
    pub i: usize,
    /// Target chirality (1-based).
    #[arg(long, default_value_t = 1)]
    pub j: usize,
    /// Directions r/n, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub dir: Vec<f64>,
    /// Earlier time.
    #[arg(long, default_value_t = 1000)]
    pub n1: usize,
    /// Later time.
    #[arg(long, default_value_t = 10000)]
    pub n2: usize,
    /// Half-width of the window in r/n.
    #[arg(long, default_value_t = 0.01)]
    pub window: f64,
    /// exact or float.
    #[arg(long, default_value = "float")]
    pub mode: String,
    /// Output file (standard output when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CayleyArgs {
    /// Number of chiralities.
    #[arg(long, default_value_t = 4)]
    pub k: usize,
    /// Skew entries are drawn from [−bound, bound].
    #[arg(long, default_value_t = 3)]
    pub bound: i64,
    /// Steps as `;`-separated vectors of `,`-separated integers.
    #[arg(long, allow_hyphen_values = true)]
    pub steps: String,
    /// Output file (standard output when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct OverlayArgs {
    /// Profile CSV written by `qrw simulate`.
    #[arg(long)]
    pub profile: PathBuf,
    /// Peaks JSON written by `qrw peaks1d` (1-D).
    #[arg(long, conflicts_with = "cloud")]
    pub peaks: Option<PathBuf>,
    /// Cloud CSV written by `qrw trace2d` (2-D).
    #[arg(long)]
    pub cloud: Option<PathBuf>,
    /// Output file (standard output when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            let msg = serde_json::json!({ "error": error_kind(&e), "message": e.to_string() });
            eprintln!("{msg}");
            e.exit_code()
        }
    }
}

fn error_kind(e: &QrwError) -> &'static str {
    match e.exit_code() {
        1 => "config",
        2 => "resource",
        _ => "analysis",
    }
}

pub fn execute(cli: &Cli) -> Result<i32> {
    if let Some(t) = cli.threads {
        // A second call in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let tol = match &cli.tolerances {
        Some(p) => serde_json::from_str::<Tolerances>(&fs::read_to_string(p)?)?,
        None => Tolerances::default(),
    };
    tol.check()?;
    let mut out = String::new();
    let code = match &cli.command {
        Command::Simulate(a) => simulate(a, &mut out)?,
        Command::Kernel(a) => kernel(a, &mut out)?,
        Command::Fibers(a) => fibers(a, &tol, &mut out)?,
        Command::Peaks1d(a) => peaks(a, &tol, &mut out)?,
        Command::Boundary2d(a) => boundary(a, &tol, &mut out)?,
        Command::Trace2d(a) => trace(a, cli.seed, &tol, &mut out)?,
        Command::Asymptote(a) => asymptote(a, cli.seed, &tol, &mut out)?,
        Command::Scaling(a) => scaling(a, &mut out)?,
        Command::Cayley(a) => cayley(a, cli.seed, &mut out)?,
        Command::Validate(a) => validate(a, &tol, &mut out)?,
        Command::Overlay(a) => overlay(a, &mut out)?,
    };
    print!("{out}");
    std::io::stdout().flush()?;
    Ok(code)
}

// ---------------------------------------------------------------- helpers

/// Full-precision decimal: 17 significant digits.
pub fn f17(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn load_spec(a: &SpecArgs) -> Result<WalkSpec> {
    match (&a.spec, &a.fixture) {
        (Some(p), _) => WalkSpec::from_json(&fs::read_to_string(p)?),
        (None, Some(name)) => {
            fixtures::by_name(name).ok_or_else(|| QrwError::Config(format!("unknown fixture {name:?}; known: {:?}", fixtures::NAMES)))
        }
        (None, None) => Err(QrwError::Config("give --spec or --fixture".into())),
    }
}

fn load_bundle(src: &KernelSource) -> Result<KernelBundle> {
    match &src.kernel {
        Some(p) => {
            let b = KernelBundle::from_json(&fs::read_to_string(p)?)?;
            if src.spec.spec.is_some() || src.spec.fixture.is_some() {
                let spec = load_spec(&src.spec)?;
                if spec.id() != b.spec.id() {
                    return Err(QrwError::SpecMismatch(spec.id(), b.spec.id()));
                }
            }
            Ok(b)
        }
        None => build_kernel(&load_spec(&src.spec)?),
    }
}

fn write_artifact(path: &Option<PathBuf>, body: &str, out: &mut String) -> Result<()> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir)?;
            }
            fs::write(p, body)?;
            let _ = writeln!(out, "wrote {}", p.display());
        }
        None => out.push_str(body),
    }
    Ok(())
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serialisable");
    s.push('\n');
    s
}

fn chirality(x: usize, k: usize, what: &str) -> Result<usize> {
    if x == 0 || x > k {
        return Err(QrwError::Config(format!("{what} = {x} is outside 1..={k}")));
    }
    Ok(x - 1)
}

fn csv_err(e: csv::Error) -> QrwError {
    QrwError::Config(format!("csv: {e}"))
}

/// Leading `# key=value, …` line of a CSV artifact.
fn csv_header(path: &Path) -> Result<Vec<(String, String)>> {
    let text = fs::read_to_string(path)?;
    let first = text.lines().next().unwrap_or("");
    let Some(rest) = first.strip_prefix('#') else {
        return Ok(Vec::new());
    };
    Ok(rest
        .split(',')
        .filter_map(|kv| kv.split_once('='))
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .collect())
}

fn header_value(h: &[(String, String)], key: &str) -> Option<String> {
    h.iter().find(|(k, _)| k == key).map(|(_, v)| v.clone())
}

fn csv_rows(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(csv_err)?;
    let headers = rdr.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for r in rdr.records() {
        rows.push(r.map_err(csv_err)?.iter().map(str::to_string).collect());
    }
    Ok((headers, rows))
}

fn csv_string(comment: &str, header: &[String], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(csv_err)?;
    for r in rows {
        w.write_record(r).map_err(csv_err)?;
    }
    let body = String::from_utf8(w.into_inner().map_err(|e| QrwError::Config(e.to_string()))?)
        .expect("csv output is utf-8");
    Ok(format!("# {comment}\n{body}"))
}

fn parse_f64(s: &str) -> Result<f64> {
    s.parse().map_err(|_| QrwError::Config(format!("not a number: {s:?}")))
}

// --------------------------------------------------------------- commands

fn simulate(a: &SimulateArgs, out: &mut String) -> Result<i32> {
    let spec = load_spec(&a.spec)?;
    let backend: Backend = a.mode.parse()?;
    let i = chirality(a.i, spec.k, "i")?;
    let js: Vec<usize> = match a.j {
        Some(j) => vec![chirality(j, spec.k, "j")?],
        None => (0..spec.k).collect(),
    };
    let cfg = SimConfig {
        float_fallback: a.fallback,
        ..SimConfig::default()
    };
    let field = evolve_with(&spec, i, a.n, backend, &cfg)?;
    let exact_cols = a.exact_columns && field.backend() == Backend::Exact;
    let mut header: Vec<String> = (1..=spec.d).map(|c| format!("r{c}")).collect();
    header.extend(["j", "re", "im", "prob"].map(String::from));
    if exact_cols {
        header.extend(["re_exact", "im_exact"].map(String::from));
    }
    let mut rows = Vec::new();
    for r in field.sites() {
        for &j in &js {
            let amp = field.amplitude(&r, j);
            let mut row: Vec<String> = r.iter().map(|c| c.to_string()).collect();
            row.push((j + 1).to_string());
            row.push(f17(amp.re));
            row.push(f17(amp.im));
            row.push(f17(amp.norm_sqr()));
            if exact_cols {
                let e = field.amplitude_exact(&r, j).expect("exact field");
                row.push(e.re.to_string());
                row.push(e.im.to_string());
            }
            rows.push(row);
        }
    }
    let comment = format!(
        "spec_id={}, n={}, i={}, mode={}",
        spec.id(),
        a.n,
        a.i,
        if field.backend() == Backend::Exact { "exact" } else { "float" }
    );
    write_artifact(&a.out, &csv_string(&comment, &header, &rows)?, out)?;
    let _ = writeln!(
        out,
        "simulated n = {} over {} sites; total probability {:.15}{}",
        a.n,
        field.num_sites(),
        field.norm_sqr(),
        if field.fell_back { " (fell back to float)" } else { "" }
    );
    Ok(0)
}

fn kernel(a: &KernelArgs, out: &mut String) -> Result<i32> {
    let spec = load_spec(&a.spec)?;
    let t0 = std::time::Instant::now();
    let b = build_kernel(&spec)?;
    let elapsed = t0.elapsed();
    let mut body = b.to_json();
    body.push('\n');
    write_artifact(&a.out, &body, out)?;
    let scale = num_rational::BigRational::from_integer(display_scale(&b));
    let _ = writeln!(out, "{}", b.normalization_note());
    let _ = writeln!(out, "{scale}·Q = {}", b.q.scale(&scale));
    let _ = writeln!(out, "Q squarefree: {}", b.q_is_squarefree());
    let _ = writeln!(out, "P^T A = Q I at 8 random points: {}", b.sample_identity(8, 0));
    let _ = writeln!(out, "built in {elapsed:.2?}");
    Ok(0)
}

fn fibers(a: &FibersArgs, tol: &Tolerances, out: &mut String) -> Result<i32> {
    let b = load_bundle(&a.src)?;
    let k = NumericKernel::from_bundle(&b);
    let rep = torus_fibers(&k, a.grid, tol)?;
    write_artifact(&a.out, &to_json(&rep), out)?;
    let _ = writeln!(out, "{} component(s)", rep.count());
    for c in &rep.components {
        let _ = writeln!(
            out,
            "  component {}: degree {} over x, y-winding {}, mu in [{:.9}, {:.9}]",
            c.id, c.degree, c.y_winding, c.mu_range.0, c.mu_range.1
        );
    }
    Ok(0)
}

fn peaks(a: &Peaks1dArgs, tol: &Tolerances, out: &mut String) -> Result<i32> {
    let b = load_bundle(&a.src)?;
    let rep = peaks_1d(&b, a.grid, tol)?;
    let mut body = rep.to_json();
    body.push('\n');
    write_artifact(&a.out, &body, out)?;
    let _ = writeln!(out, "q has {} real root(s) in [-2, 2]", rep.circle_roots);
    for p in &rep.peaks {
        let _ = writeln!(out, "  peak at r/n = {:.9}", p.mu);
    }
    Ok(0)
}

/// Artifact of `qrw boundary2d`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BoundaryReport {
    pub curve: CurveJson,
    /// Worst witness residual per first-level stage.
    pub soundness: Vec<(String, f64)>,
    /// Set when the tower stopped early; the first-level stages are then
    /// the verified result.
    pub downgrade: Option<String>,
    pub verdicts: Vec<ComponentVerdict>,
}

fn boundary(a: &Boundary2dArgs, tol: &Tolerances, out: &mut String) -> Result<i32> {
    let b = load_bundle(&a.src)?;
    let frame = Frame::by_name(&a.frame)?;
    let cfg = TowerConfig {
        limits: qrw_poly::ResultantLimits {
            max_terms: a.max_terms,
            max_degree: a.max_degree,
        },
        stage_dir: a.stage_dir.clone(),
        resume: a.resume,
        first_level_only: a.first_level,
        symmetric: a.symmetric,
    };
    let curve = boundary_2d(&b, &frame, &cfg)?;
    let c2 = crate::geometry::curvature_poly_2d(&b)?;
    let mut soundness = Vec::new();
    for (name, f, g) in [("R12", &c2.q, &c2.l), ("R13", &c2.q, &c2.h1), ("R14", &c2.q, &c2.h2)] {
        if let Some(p) = curve.polys.get(name) {
            soundness.push((name.to_string(), stage_soundness(f, g, "x", p, a.witnesses, 7)?));
        }
    }
    let verdicts = match (&curve.candidate, a.filter_grid) {
        (Some(c), g) if g > 0 => feasibility_filter(c, &NumericKernel::from_bundle(&b), &frame, g, tol)?,
        _ => Vec::new(),
    };
    let downgrade = curve.exhausted.as_ref().map(|e| {
        format!("tower stopped ({e}); first-level stages verified by {} common-zero witnesses each", a.witnesses)
    });
    let report = BoundaryReport {
        curve: curve.summary(),
        soundness,
        downgrade,
        verdicts,
    };
    write_artifact(&a.out, &to_json(&report), out)?;
    for s in &curve.stages {
        let _ = writeln!(out, "{:6} {:>8} terms  {:?}  {:.1}s{}", s.name, s.terms, s.degrees, s.seconds, if s.resumed { " (resumed)" } else { "" });
    }
    for (name, r) in &report.soundness {
        let _ = writeln!(out, "{name}: worst witness residual {r:.1e} ({})", if *r <= 1e-6 { "sound" } else { "NOT sound" });
    }
    for v in &report.verdicts {
        let _ = writeln!(out, "component {} ({} cells) at {:?}: {:?}", v.id, v.cells, v.sample, v.verdict);
    }
    if let Some(d) = &report.downgrade {
        let _ = writeln!(out, "downgrade: {d}");
        return Ok(2);
    }
    Ok(0)
}

fn published(name: &str) -> Result<qrw_poly::QPoly> {
    match name {
        "p1" => Ok(fixtures::p1()),
        "p2" => Ok(fixtures::p2()),
        _ => Err(QrwError::Config(format!("unknown published curve {name:?}"))),
    }
}

fn trace(a: &Trace2dArgs, seed: u64, tol: &Tolerances, out: &mut String) -> Result<i32> {
    let b = load_bundle(&a.src)?;
    let frame = Frame::by_name(&a.frame)?;
    let k = NumericKernel::from_bundle(&b);
    let cloud = numeric_boundary_trace(&k, a.grid, tol)?;
    let shown: Vec<[f64; 2]> = cloud.iter().map(|q| frame.apply(*q)).collect();
    let header: Vec<String> = ["u", "v", "r", "s"].map(String::from).to_vec();
    let rows: Vec<Vec<String>> = cloud
        .iter()
        .zip(&shown)
        .map(|(u, r)| vec![f17(u[0]), f17(u[1]), f17(r[0]), f17(r[1])])
        .collect();
    let comment = format!("spec_id={}, grid={}, frame={}", b.spec.id(), a.grid, a.frame);
    write_artifact(&a.out, &csv_string(&comment, &header, &rows)?, out)?;
    let l1 = shown.iter().map(|q| q[0].abs() + q[1].abs()).fold(0.0, f64::max);
    let linf = shown.iter().map(|q| q[0].abs().max(q[1].abs())).fold(0.0, f64::max);
    let _ = writeln!(out, "{} traced points; max |r|+|s| = {l1:.6}, max(|r|,|s|) = {linf:.6}", cloud.len());
    let p = match (&a.check, &a.published) {
        (Some(path), _) => Some(load_poly(path)?),
        (None, Some(name)) => Some(published(name)?),
        _ => None,
    };
    if let Some(p) = p {
        let refs = feasible_uniform(&k, &frame, a.samples, 128, seed, tol);
        let (frac, thr) = cloud_on_curve_fraction(&p, &shown, &refs, 1e-3);
        let near = shown.iter().filter(|&&q| near_curve(&p, q, 1e-4)).count();
        let _ = writeln!(out, "on-curve fraction {frac:.4} (|P| below {thr:.3e}); {near} within 1e-4");
    }
    Ok(0)
}

/// Artifact of `qrw asymptote`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AsymptoteReport {
    pub direction: Vec<f64>,
    pub critical: CriticalSet,
    pub estimate: AsymptoticEstimate,
    /// Simulated amplitude `[re, im]` at the same site.
    pub simulated: Option<[f64; 2]>,
    /// KS distance between window values and the envelope law.
    pub ks: Option<f64>,
}

fn asymptote(a: &AsymptoteArgs, seed: u64, tol: &Tolerances, out: &mut String) -> Result<i32> {
    let b = load_bundle(&a.src)?;
    let d = b.d();
    if a.dir.len() != d {
        return Err(QrwError::Config(format!("--dir needs {d} component(s)")));
    }
    let (i, j) = (chirality(a.i, b.spec.k, "i")?, chirality(a.j, b.spec.k, "j")?);
    let k = NumericKernel::from_bundle(&b);
    let set = if d == 1 {
        let f = torus_fibers(&k, a.grid, tol)?;
        solve_z_1d(&k, &f, a.dir[0], tol)?
    } else {
        solve_z_2d(&k, &a.dir, a.grid.min(128), tol)?
    };
    let site: Vec<i64> = a.dir.iter().map(|c| (c * a.n as f64).round() as i64).collect();
    let est = asymptotic_amplitude(&k, i, j, &set, a.n, &site, tol)?;
    let simulated = if a.compare {
        let f = evolve_with(&b.spec, i, a.n, Backend::Float, &SimConfig::default())?;
        let v = f.amplitude(&site, j);
        Some([v.re, v.im])
    } else {
        None
    };
    let ks = if a.window > 0 {
        let vals = window_distribution(&b.spec, i, j, &a.dir, a.n, a.window, Backend::Float)?;
        let al = alphas(&k, i, j, &set);
        let chi = chi_envelope_real(&pair_alphas(&set, &al), 20000, seed);
        Some(ks_distance(&vals, &chi))
    } else {
        None
    };
    let report = AsymptoteReport {
        direction: a.dir.clone(),
        critical: set,
        estimate: est,
        simulated,
        ks,
    };
    write_artifact(&a.out, &to_json(&report), out)?;
    let _ = writeln!(out, "{} critical point(s) at r/n = {:?}", report.critical.points.len(), a.dir);
    let _ = writeln!(
        out,
        "estimate a(n = {}, r = {:?}) = {:.6e} {:+.6e}i, envelope {:.6e}",
        a.n, site, report.estimate.re, report.estimate.im, report.estimate.envelope
    );
    if let Some(s) = report.simulated {
        let _ = writeln!(out, "simulated            = {:.6e} {:+.6e}i", s[0], s[1]);
    }
    if let Some(ks) = report.ks {
        let _ = writeln!(out, "KS distance to envelope law: {ks:.4}");
    }
    Ok(0)
}

/// One row of `qrw scaling`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScalingRow {
    pub theta: f64,
    pub n1: usize,
    pub n2: usize,
    pub h1: f64,
    pub h2: f64,
    pub exponent: f64,
}

fn scaling(a: &ScalingArgs, out: &mut String) -> Result<i32> {
    let spec = load_spec(&a.spec)?;
    let backend: Backend = a.mode.parse()?;
    let (i, j) = (chirality(a.i, spec.k, "i")?, chirality(a.j, spec.k, "j")?);
    if a.dir.is_empty() {
        return Err(QrwError::Config("give at least one --dir".into()));
    }
    let hs = peak_heights(&spec, i, j, &a.dir, &[a.n1, a.n2], a.window, backend)?;
    let rows: Vec<ScalingRow> = a
        .dir
        .iter()
        .zip(&hs)
        .map(|(&theta, h)| ScalingRow {
            theta,
            n1: a.n1,
            n2: a.n2,
            h1: h[0],
            h2: h[1],
            exponent: (h[1] / h[0]).ln() / (a.n2 as f64 / a.n1 as f64).ln(),
        })
        .collect();
    write_artifact(&a.out, &to_json(&rows), out)?;
    for r in &rows {
        let _ = writeln!(out, "theta {:.6}: peak height {:.4e} -> {:.4e}, exponent {:.4}", r.theta, r.h1, r.h2, r.exponent);
    }
    Ok(0)
}

fn parse_steps(s: &str) -> Result<Vec<Vec<i64>>> {
    s.split(';')
        .map(|v| {
            v.split(',')
                .map(|c| c.trim().parse::<i64>().map_err(|_| QrwError::Config(format!("bad step component {c:?}"))))
                .collect()
        })
        .collect()
}

fn cayley(a: &CayleyArgs, seed: u64, out: &mut String) -> Result<i32> {
    let steps = parse_steps(&a.steps)?;
    if steps.len() != a.k {
        return Err(QrwError::Config(format!("{} steps given for k = {}", steps.len(), a.k)));
    }
    let d = steps[0].len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = random_skew(a.k, a.bound, &mut rng);
    let coin = cayley_orthogonal(&s)?;
    let spec = WalkSpec::new(d, steps, coin)?;
    let rep = validate_spec(&spec, 1e-12);
    let mut body = spec.to_json();
    body.push('\n');
    write_artifact(&a.out, &body, out)?;
    let _ = writeln!(out, "Cayley coin from a random {0}x{0} skew matrix; U U^T = I exactly: {1}", a.k, rep.unitary);
    Ok(0)
}

fn validate(a: &SpecArgs, tol: &Tolerances, out: &mut String) -> Result<i32> {
    let spec = load_spec(a)?;
    let rep = validate_spec(&spec, tol.float_unitarity);
    out.push_str(&to_json(&rep));
    if !rep.valid() {
        return Err(QrwError::Config(rep.messages.join("; ")));
    }
    let _ = writeln!(out, "spec {} is valid", spec.id());
    Ok(0)
}

fn overlay(a: &OverlayArgs, out: &mut String) -> Result<i32> {
    let header = csv_header(&a.profile)?;
    let spec_id = header_value(&header, "spec_id");
    let n: f64 = header_value(&header, "n")
        .ok_or_else(|| QrwError::Config("profile has no n= header".into()))
        .and_then(|v| parse_f64(&v))?;
    let (cols, rows) = csv_rows(&a.profile)?;
    let col = |name: &str| cols.iter().position(|c| c == name).ok_or_else(|| QrwError::Config(format!("profile has no {name} column")));
    let prob = col("prob")?;
    let jc = col("j")?;
    let comment = header
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(", ");
    let body = if let Some(p) = &a.peaks {
        let rep = PeakReport::from_json(&fs::read_to_string(p)?)?;
        if let Some(id) = &spec_id {
            if *id != rep.spec_id {
                return Err(QrwError::SpecMismatch(id.clone(), rep.spec_id));
            }
        }
        let r = col("r1")?;
        let dirs = rep.directions();
        if dirs.is_empty() {
            // Nothing to mark: the overlay is the profile itself.
            write_artifact(&a.out, &fs::read_to_string(&a.profile)?, out)?;
            return Ok(0);
        }
        // Sites nearest to each peak direction carry the vertical lines.
        let lines: Vec<i64> = dirs.iter().map(|m| (m * n).round() as i64).collect();
        let header: Vec<String> = ["r1", "j", "prob", "r_over_n", "nearest_peak", "peak_distance", "peak_line"]
            .map(String::from)
            .to_vec();
        let mut out_rows = Vec::new();
        for row in &rows {
            let site: i64 = row[r].parse().map_err(|_| QrwError::Config(format!("bad site {:?}", row[r])))?;
            let x = site as f64 / n;
            let mut o = vec![row[r].clone(), row[jc].clone(), row[prob].clone(), f17(x)];
            if let Some(&best) = dirs.iter().min_by(|a, b| (*a - x).abs().total_cmp(&(*b - x).abs())) {
                o.push(f17(best));
                o.push(f17(x - best));
                o.push(if lines.contains(&site) { "1" } else { "0" }.to_string());
            }
            out_rows.push(o);
        }
        csv_string(&comment, &header, &out_rows)?
    } else if let Some(c) = &a.cloud {
        let ch = csv_header(c)?;
        if let (Some(x), Some(y)) = (&spec_id, header_value(&ch, "spec_id")) {
            if *x != y {
                return Err(QrwError::SpecMismatch(x.clone(), y));
            }
        }
        let (r1, r2) = (col("r1")?, col("r2")?);
        let (ccols, crows) = csv_rows(c)?;
        let (cu, cv) = (
            ccols.iter().position(|c| c == "u").ok_or_else(|| QrwError::Config("cloud has no u column".into()))?,
            ccols.iter().position(|c| c == "v").ok_or_else(|| QrwError::Config("cloud has no v column".into()))?,
        );
        let header: Vec<String> = ["kind", "u", "v", "value"].map(String::from).to_vec();
        let mut out_rows = Vec::new();
        for row in &rows {
            let u = parse_f64(&row[r1])? / n;
            let v = parse_f64(&row[r2])? / n;
            out_rows.push(vec!["intensity".into(), f17(u), f17(v), row[prob].clone()]);
        }
        for row in &crows {
            out_rows.push(vec!["curve".into(), row[cu].clone(), row[cv].clone(), String::new()]);
        }
        csv_string(&comment, &header, &out_rows)?
    } else {
        return Err(QrwError::Config("give --peaks or --cloud".into()));
    };
    write_artifact(&a.out, &body, out)?;
    Ok(0)
}
