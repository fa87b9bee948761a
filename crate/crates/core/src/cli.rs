//! Command-line front end.
//!
//! Exit codes: 0 when every recorded check passes, 2 when a check or a
//! hypothesis of a construction fails, 1 for I/O and configuration errors.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::freqfn::{AffineSystemSpec, Dilation, FreqFn, Translations};
use crate::rational::{self, Rat};
use crate::report::{Check, Report};
use crate::{frames, grammian, orthosys, waveletset};

#[derive(Parser, Debug, Clone)]
#[command(name = "wavedense", version, about = "Wavelet frame, Riesz and orthonormal generators near a target")]
pub struct Cli {
    /// Worker threads; 0 uses every core.
    #[arg(long, global = true, env = "WAVEDENSE_THREADS", default_value_t = 0)]
    pub threads: usize,
    /// Seed for randomized test families.
    #[arg(long, global = true, env = "WAVEDENSE_SEED", default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug, Clone)]
pub enum Command {
    /// Frame generator for a fixed dilation.
    ConstructFrame(FrameArgs),
    /// Riesz generator supported on a wavelet set.
    ConstructRiesz(RieszArgs),
    /// Orthonormal affine system near a unit-norm target.
    ConstructOrtho(OrthoArgs),
    /// Table of Grammian errors along a sequence of shrinking lattices.
    GrammianConverge(ConvergeArgs),
    /// Re-check congruence and dilation tiling of a saved wavelet set.
    Verify(VerifyArgs),
    /// Distance obstructions for a fixed lattice or a fixed dilation.
    DemoNondensity(DemoArgs),
    /// Sample a function on a line or a square for plotting.
    Slice(SliceArgs),
}

#[derive(Args, Debug, Clone)]
pub struct FrameArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub epsilon: f64,
    /// Dilation: a JSON file, inline JSON, or a rational scalar.
    #[arg(long, default_value = "2")]
    pub dilation: String,
    /// Writes the system `(ψ̂, a, X)` as JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Random test functions for the empirical frame bounds.
    #[arg(long, default_value_t = 20)]
    pub tests: usize,
}

#[derive(Args, Debug, Clone)]
pub struct RieszArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub bundle: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Truncation tolerance relative to `R^d`.
    #[arg(long, env = "WAVEDENSE_TOL", default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Args, Debug, Clone)]
pub struct OrthoArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct ConvergeArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    /// `dyadic:N` for `b = 2^{-k} I`, `k = 1..N`, or a comma list of scalars.
    #[arg(long = "b-sequence", default_value = "dyadic:8")]
    pub b_sequence: String,
    /// CSV destination; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    #[arg(long)]
    pub bundle: PathBuf,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum DemoMode {
    Lattice,
    Dilation,
}

#[derive(Args, Debug, Clone)]
pub struct DemoArgs {
    #[arg(long, value_enum)]
    pub mode: DemoMode,
    #[arg(long)]
    pub input: PathBuf,
    /// Diagonal of `b` for the lattice mode, comma separated; one entry is
    /// repeated over every axis.
    #[arg(long, default_value = "1")]
    pub b: String,
    /// Dilation for the dilation mode.
    #[arg(long, default_value = "2")]
    pub dilation: String,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct SliceArgs {
    /// A function, or a system whose generator is sampled.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Samples per axis.
    #[arg(long, default_value_t = 512)]
    pub samples: usize,
    /// Sampling window `lo,hi` per axis; the support's bounding box by default.
    #[arg(long, allow_hyphen_values = true)]
    pub window: Option<String>,
}

/// Parses arguments and runs, returning the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    run(&cli)
}

pub fn run(cli: &Cli) -> i32 {
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(cli.threads).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    match pool.install(|| dispatch(cli)) {
        Ok(report) => {
            let failures = report.failures();
            for c in &failures {
                eprintln!("check failed: {}: {} (lhs = {}, rhs = {})", c.name, c.inequality, c.lhs, c.rhs);
            }
            if failures.is_empty() {
                0
            } else {
                2
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// 1 for bad input or files, 2 when the mathematics refuses.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NotExpansive { .. }
        | Error::NotNormalized { .. }
        | Error::Budget(_)
        | Error::Singular
        | Error::BandLimit(_)
        | Error::ZeroFunction => 2,
        _ => 1,
    }
}

fn dispatch(cli: &Cli) -> Result<Report> {
    match &cli.command {
        Command::ConstructFrame(a) => construct_frame(a, cli.seed),
        Command::ConstructRiesz(a) => construct_riesz(a),
        Command::ConstructOrtho(a) => construct_ortho(a),
        Command::GrammianConverge(a) => grammian_converge(a),
        Command::Verify(a) => verify(a),
        Command::DemoNondensity(a) => demo(a),
        Command::Slice(a) => slice(a),
    }
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

/// Output directories must exist before any computation starts.
fn check_outputs(paths: &[&Option<PathBuf>]) -> Result<()> {
    for p in paths.iter().filter_map(|p| p.as_ref()) {
        let dir = p.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
        if !dir.is_dir() {
            return Err(Error::InvalidParameter(format!("{}: directory does not exist", p.display())));
        }
    }
    Ok(())
}

fn check_epsilon(eps: f64) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("epsilon must be positive, got {eps}")))
    }
}

/// A file path, inline JSON, or a rational scalar.
pub fn parse_dilation(text: &str, dim: usize) -> Result<Dilation> {
    let path = Path::new(text);
    if path.is_file() {
        return read_json(path);
    }
    if let Ok(s) = rational::parse(text) {
        return Dilation::scalar(s, dim);
    }
    serde_json::from_str(text).map_err(|e| Error::Parse(format!("dilation {text:?}: {e}")))
}

fn parse_diagonal(text: &str, dim: usize) -> Result<Vec<Rat>> {
    let entries = text.split(',').map(|s| rational::parse(s.trim())).collect::<Result<Vec<_>>>()?;
    match entries.len() {
        1 => Ok(vec![entries[0].clone(); dim]),
        n if n == dim => Ok(entries),
        n => Err(Error::DimensionMismatch { expected: dim, found: n }),
    }
}

/// `dyadic:N` or a comma list of scalars.
pub fn parse_b_sequence(text: &str, dim: usize) -> Result<Vec<Vec<Rat>>> {
    if let Some(n) = text.strip_prefix("dyadic:") {
        let n: u32 = n
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("b-sequence {text:?}: expected dyadic:N")))?;
        if n == 0 {
            return Err(Error::InvalidParameter("b-sequence needs at least one entry".into()));
        }
        return Ok(grammian::dyadic_sequence(n, dim));
    }
    text.split(',')
        .map(|s| Ok(vec![rational::parse(s.trim())?; dim]))
        .collect()
}

fn load_function(path: &Path) -> Result<FreqFn> {
    let value: serde_json::Value = read_json(path)?;
    if value.get("generator").is_some() {
        let spec: AffineSystemSpec =
            serde_json::from_value(value).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        return Ok(spec.generator);
    }
    serde_json::from_value(value).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn construct_frame(args: &FrameArgs, seed: u64) -> Result<Report> {
    check_epsilon(args.epsilon)?;
    check_outputs(&[&args.out, &args.report])?;
    let f: FreqFn = read_json(&args.input)?;
    let a = parse_dilation(&args.dilation, f.dim())?;
    let mut opts = frames::FrameOptions::for_dim(f.dim());
    opts.tests = args.tests.max(1);
    opts.seed = seed;
    let out = frames::construct_frame_with(&f, args.epsilon, &a, &opts)?;
    if let Some(p) = &args.out {
        let spec = AffineSystemSpec::new(out.psi.clone(), a, Translations::Lattice(out.lattice.clone()))?;
        write_json(p, &spec)?;
    }
    if let Some(p) = &args.report {
        write_json(p, &out.report)?;
    }
    Ok(out.report.checks)
}

fn construct_riesz(args: &RieszArgs) -> Result<Report> {
    check_epsilon(args.epsilon)?;
    if !(args.tol > 0.0) {
        return Err(Error::InvalidParameter("tolerance must be positive".into()));
    }
    check_outputs(&[&args.out, &args.bundle, &args.report])?;
    let f: FreqFn = read_json(&args.input)?;
    let out =
        waveletset::construct_riesz_with(&f, args.epsilon, Some(args.tol), &waveletset::default_riesz_index(f.dim()))?;
    if let Some(p) = &args.out {
        let spec = AffineSystemSpec::new(
            FreqFn::Step(out.psi.clone()),
            out.dilation.clone(),
            Translations::Lattice(out.translations.clone()),
        )?;
        write_json(p, &spec)?;
    }
    if let Some(p) = &args.bundle {
        write_json(p, &out.bundle)?;
    }
    if let Some(p) = &args.report {
        write_json(p, &out.report)?;
    }
    Ok(out.report)
}

fn construct_ortho(args: &OrthoArgs) -> Result<Report> {
    check_epsilon(args.epsilon)?;
    check_outputs(&[&args.out, &args.report])?;
    let f: FreqFn = read_json(&args.input)?;
    let out = orthosys::construct_ortho_generator(&f, args.epsilon)?;
    if let Some(p) = &args.out {
        let spec = AffineSystemSpec::new(
            out.psi.clone(),
            out.dilation.clone(),
            Translations::Lattice(out.lattice.clone()),
        )?;
        write_json(p, &spec)?;
    }
    if let Some(p) = &args.report {
        write_json(p, &out.report)?;
    }
    Ok(out.report.checks)
}

fn grammian_converge(args: &ConvergeArgs) -> Result<Report> {
    check_outputs(&[&args.out, &args.report])?;
    if !(args.p >= 1.0 && args.p.is_finite()) {
        return Err(Error::InvalidParameter(format!("p must be at least 1, got {}", args.p)));
    }
    let f: FreqFn = read_json(&args.input)?;
    let bs = parse_b_sequence(&args.b_sequence, f.dim())?;
    let rows = grammian::convergence_table(&f, args.p, &bs)?;
    let mut buf = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(["k", "b", "norm_b", "sup_error", "lp_error"])?;
        for (k, (row, b)) in rows.iter().zip(&bs).enumerate() {
            let b: Vec<String> = b.iter().map(rational::format).collect();
            w.write_record([
                (k + 1).to_string(),
                b.join(" "),
                format!("{:e}", row.norm_b),
                format!("{:e}", row.sup_error),
                format!("{:e}", row.lp_error),
            ])?;
        }
        w.flush()?;
    }
    match &args.out {
        Some(p) => fs::write(p, &buf)?,
        None => std::io::stdout().write_all(&buf)?,
    }
    let mut rep = Report::new("grammian convergence");
    let decreasing = rows.windows(2).all(|w| w[1].lp_error < w[0].lp_error);
    rep.push(Check::holds("lp error decreasing", "‖f_{b,p} − ‖f‖_p‖ strictly decreasing in k", decreasing));
    rep.record("p", args.p);
    rep.record("rows", &rows);
    if let Some(p) = &args.report {
        write_json(p, &rep)?;
    }
    Ok(rep)
}

fn verify(args: &VerifyArgs) -> Result<Report> {
    let bundle: waveletset::WaveletSetBundle = read_json(&args.bundle)?;
    let rep = waveletset::verify_bundle(&bundle)?;
    if let Some(p) = &args.report {
        write_json(p, &rep)?;
    }
    println!("{}", serde_json::to_string_pretty(&rep)?);
    Ok(rep)
}

fn demo(args: &DemoArgs) -> Result<Report> {
    let f = load_function(&args.input)?;
    let mut rep = Report::new("non-density demonstration");
    match args.mode {
        DemoMode::Lattice => {
            let b = parse_diagonal(&args.b, f.dim())?;
            let v = orthosys::nondensity_fixed_lattice_demo(&f, &b)?;
            rep.record("mode", "lattice");
            rep.record("b", b.iter().map(rational::format).collect::<Vec<_>>());
            rep.record("lower_bound", v);
        }
        DemoMode::Dilation => {
            let a = parse_dilation(&args.dilation, f.dim())?;
            let v = orthosys::nondensity_fixed_dilation_demo(&f, &a)?;
            rep.record("mode", "dilation");
            rep.record("dilation", &a);
            rep.record("pairing", v);
        }
    }
    if let Some(p) = &args.report {
        write_json(p, &rep)?;
    }
    println!("{}", serde_json::to_string_pretty(&rep)?);
    Ok(rep)
}

fn slice(args: &SliceArgs) -> Result<Report> {
    check_outputs(&[&Some(args.out.clone())])?;
    let f = load_function(&args.input)?;
    let d = f.dim();
    if d > 2 {
        return Err(Error::Unsupported("slices are written for one or two dimensions".into()));
    }
    let n = args.samples.max(1);
    let (lo, hi): (Vec<f64>, Vec<f64>) = match &args.window {
        Some(w) => {
            let v = w
                .split(',')
                .map(|s| s.trim().parse::<f64>().map_err(|e| Error::Parse(format!("window {w:?}: {e}"))))
                .collect::<Result<Vec<f64>>>()?;
            if v.len() != 2 * d || (0..d).any(|a| !(v[2 * a] < v[2 * a + 1])) {
                return Err(Error::InvalidParameter(format!("window needs {d} increasing lo,hi pairs")));
            }
            ((0..d).map(|a| v[2 * a]).collect(), (0..d).map(|a| v[2 * a + 1]).collect())
        }
        None => {
            let bb = f.bounding_box().ok_or(Error::ZeroFunction)?;
            (bb.lo_f64(), bb.hi_f64())
        }
    };
    let mut w = csv::Writer::from_path(&args.out)?;
    let header: Vec<&str> = if d == 1 {
        vec!["w", "re", "im", "abs"]
    } else {
        vec!["w1", "w2", "re", "im", "abs"]
    };
    w.write_record(&header)?;
    let at = |a: usize, i: usize| lo[a] + (i as f64 + 0.5) * (hi[a] - lo[a]) / n as f64;
    let total = n.pow(d as u32);
    for flat in 0..total {
        let p: Vec<f64> = if d == 1 { vec![at(0, flat)] } else { vec![at(0, flat / n), at(1, flat % n)] };
        let z = f.eval(&p);
        let mut rec: Vec<String> = p.iter().map(|x| format!("{x:e}")).collect();
        rec.extend([format!("{:e}", z.re), format!("{:e}", z.im), format!("{:e}", z.norm())]);
        w.write_record(&rec)?;
    }
    w.flush()?;
    let mut rep = Report::new("slice");
    rep.record("rows", total);
    Ok(rep)
}
