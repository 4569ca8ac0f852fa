//! The `sharp-hardy` command line.
//!
//! Every command is a pure function of its flags. Output files are staged in
//! the destination directory and renamed into place only once complete.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use serde::Serialize;

use crate::domain::{moments_to_spoint, solve_kappa, validate_spoint, MomentData};
use crate::error::Error;
use crate::exponents::Exponents;
use crate::lemmas::{self, Fault, LemmaConfig, SuiteReport};
use crate::oracle::{self, Mesh, OracleConfig, OracleReport};
use crate::region::{self, RegionReport};
use crate::sharp::{self, SharpConfig, SharpResult};
use crate::special::DEFAULT_TOL;

pub const EXIT_OK: i32 = 0;
pub const EXIT_DOMAIN: i32 = 2;
pub const EXIT_CONVERGENCE: i32 = 3;
pub const EXIT_IO: i32 = 4;
pub const EXIT_VIOLATION: i32 = 5;
pub const EXIT_INFEASIBLE: i32 = 6;
pub const EXIT_PROPERTY: i32 = 7;

/// Exit code for a library error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Exponents { .. }
        | Error::Domain { .. }
        | Error::OutsideDomain { .. }
        | Error::DegenerateMoments
        | Error::MomentCondition { .. }
        | Error::NoMatchingKappa { .. } => EXIT_DOMAIN,
        Error::Convergence { .. } | Error::Bracket { .. } | Error::Singularity { .. } | Error::Inconsistency(_) => {
            EXIT_CONVERGENCE
        }
        Error::Io(_) => EXIT_IO,
        Error::Infeasible(_) => EXIT_INFEASIBLE,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Two,
    Three,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MeshKind {
    Geometric,
    Uniform,
}

#[derive(Debug, Parser)]
#[command(name = "sharp-hardy", version, about = "Sharp Hardy constants under three integral constraints")]
pub struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Larger exponent p
    #[arg(long, global = true)]
    p: Option<f64>,
    /// Smaller exponent q, 1 < q < p
    #[arg(long, global = true)]
    q: Option<f64>,
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    tol: f64,
    #[arg(long, global = true, default_value_t = oracle::DEFAULT_SEED)]
    seed: u64,
    /// Output file; standard output when absent
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sharp constant and region report at one point (s1, s2)
    Eval {
        #[arg(long)]
        s1: f64,
        #[arg(long)]
        s2: f64,
    },
    /// Region atlas and threshold curves on a grid; writes CSV files
    Region {
        #[arg(long, default_value_t = 100)]
        grid: usize,
    },
    /// Mass kappa matching the two branches for moments (f, A, F)
    Kappa {
        #[arg(long)]
        f: f64,
        #[arg(long = "A")]
        a: f64,
        #[arg(long = "F")]
        big_f: f64,
    },
    /// Step-function search for lower bounds on the supremum
    Verify {
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long)]
        f: f64,
        #[arg(long = "A")]
        a: Option<f64>,
        #[arg(long = "F")]
        big_f: f64,
        /// Mass of the interval carrying the constraints
        #[arg(long, default_value_t = 1.0)]
        kappa: f64,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value_t = 16)]
        trials: usize,
        #[arg(long, value_enum, default_value_t = MeshKind::Geometric)]
        mesh: MeshKind,
        /// Also write the best step function as CSV
        #[arg(long)]
        candidate_out: Option<PathBuf>,
    },
    /// Randomized property suite; all presets unless --p and --q are given
    CheckLemmas {
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, value_enum, hide = true)]
        inject_fault: Option<FaultArg>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FaultArg {
    FlipE,
}

/// Every input of a run, echoed into each JSON document.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub s1: Option<f64>,
    pub s2: Option<f64>,
    pub f: Option<f64>,
    #[serde(rename = "A")]
    pub a: Option<f64>,
    #[serde(rename = "F")]
    pub big_f: Option<f64>,
    pub kappa: Option<f64>,
    pub mode: Option<Mode>,
    pub tol: f64,
    pub grid: Option<usize>,
    pub n: Option<usize>,
    pub trials: Option<usize>,
    pub mesh: Option<Mesh>,
    pub seed: u64,
    pub samples: Option<usize>,
    pub fault: Option<Fault>,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl RunConfig {
    fn base(command: &'static str, c: &Common) -> Self {
        RunConfig {
            command,
            p: c.p,
            q: c.q,
            s1: None,
            s2: None,
            f: None,
            a: None,
            big_f: None,
            kappa: None,
            mode: None,
            tol: c.tol,
            grid: None,
            n: None,
            trials: None,
            mesh: None,
            seed: c.seed,
            samples: None,
            fault: None,
            out: c.out.clone(),
            format: c.format,
        }
    }
}

#[derive(Serialize)]
struct Document<'a, T: Serialize> {
    version: &'static str,
    config: &'a RunConfig,
    #[serde(flatten)]
    body: T,
}

/// A failed command: exit code and message for standard error.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        Failure { code: exit_code(&err), message: err.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(err: std::io::Error) -> Self {
        Failure { code: EXIT_IO, message: format!("i/o: {err}") }
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { EXIT_DOMAIN } else { EXIT_OK };
        }
    };
    let stdout = std::io::stdout();
    match run(&cli, &mut stdout.lock()) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

/// Runs a parsed command, printing to `stdout` whatever is not written to a file.
pub fn run<W: Write>(cli: &Cli, stdout: &mut W) -> Result<i32, Failure> {
    let c = &cli.common;
    match &cli.command {
        Command::Eval { s1, s2 } => {
            let cfg = RunConfig { s1: Some(*s1), s2: Some(*s2), ..RunConfig::base("eval", c) };
            let e = exponents(c)?;
            let pt = validate_spoint(&e, *s1, *s2)?;
            let sharp = sharp::sharp_t_with(&e, &pt, &SharpConfig::with_tol(c.tol))?;
            let region = region::classify(&e, &pt, c.tol)?;
            info!("eval at ({s1}, {s2}): t = {}", sharp.t);
            let out = match c.format {
                Format::Json => json(&cfg, EvalBody { sharp, classification: region.classification(), region })?,
                Format::Csv => eval_csv(&sharp, &region),
            };
            emit(c.out.as_deref(), out.as_bytes(), stdout)?;
            Ok(EXIT_OK)
        }
        Command::Region { grid } => {
            let cfg = RunConfig { grid: Some(*grid), ..RunConfig::base("region", c) };
            let e = exponents(c)?;
            let Some(out) = c.out.as_deref() else {
                return Err(Failure { code: EXIT_DOMAIN, message: "region needs --out for the atlas file".into() });
            };
            let atlas = region::emit_atlas(&e, *grid, &SharpConfig::with_tol(c.tol))?;
            info!("atlas with {} rows", atlas.rows.len());
            let mut rows = Vec::new();
            region::write_rows_csv(&atlas.rows, &mut rows)?;
            let mut curves = Vec::new();
            region::write_curves_csv(&atlas.curves, &mut curves)?;
            let mut boundary = Vec::new();
            region::write_rows_csv(&atlas.boundary, &mut boundary)?;
            let files = region_paths(out);
            write_all_atomic(&[(&files[0], &rows), (&files[1], &curves), (&files[2], &boundary)])?;
            match c.format {
                Format::Json => {
                    let body = RegionBody {
                        delta: atlas.delta,
                        rows: atlas.rows.len(),
                        boundary_rows: atlas.boundary.len(),
                        files: files.to_vec(),
                    };
                    stdout.write_all(json(&cfg, body)?.as_bytes())?;
                }
                Format::Csv => writeln!(stdout, "delta\n{}", region::fmt_f64(atlas.delta))?,
            }
            Ok(EXIT_OK)
        }
        Command::Kappa { f, a, big_f } => {
            let cfg = RunConfig { f: Some(*f), a: Some(*a), big_f: Some(*big_f), ..RunConfig::base("kappa", c) };
            let e = exponents(c)?;
            let sol = solve_kappa(&e, *f, *a, *big_f, c.tol)?;
            let out = match c.format {
                Format::Json => json(&cfg, sol)?,
                Format::Csv => format!(
                    "kappa,s1,s2,omega_p,omega_q,residual,iterations\n{},{},{},{},{},{},{}\n",
                    region::fmt_f64(sol.kappa),
                    region::fmt_f64(sol.s1),
                    region::fmt_f64(sol.s2),
                    region::fmt_f64(sol.omega_p),
                    region::fmt_f64(sol.omega_q),
                    region::fmt_f64(sol.residual),
                    sol.iterations
                ),
            };
            emit(c.out.as_deref(), out.as_bytes(), stdout)?;
            Ok(EXIT_OK)
        }
        Command::Verify { mode, f, a, big_f, kappa, n, trials, mesh, candidate_out } => {
            let mesh = match mesh {
                MeshKind::Geometric => Mesh::default(),
                MeshKind::Uniform => Mesh::Uniform,
            };
            let cfg = RunConfig {
                mode: Some(*mode),
                f: Some(*f),
                a: *a,
                big_f: Some(*big_f),
                kappa: Some(*kappa),
                n: Some(*n),
                trials: Some(*trials),
                mesh: Some(mesh),
                ..RunConfig::base("verify", c)
            };
            let ocfg = OracleConfig { mesh, ..OracleConfig::new(*n, *trials, c.seed) };
            let report = match mode {
                Mode::Two => {
                    let p = c.p.ok_or_else(|| usage("verify --mode two needs --p"))?;
                    if *kappa != 1.0 {
                        return Err(usage("verify --mode two works on unit mass"));
                    }
                    oracle::maximize_two_constraints_with(p, *f, *big_f, &ocfg)?
                }
                Mode::Three => {
                    let e = exponents(c)?;
                    let a = a.ok_or_else(|| usage("verify --mode three needs --A"))?;
                    let m = MomentData::with_mass(*f, a, *big_f, *kappa)?;
                    moments_to_spoint(&e, &m)?;
                    oracle::maximize_three_constraints_with(&e, &m, &ocfg)?
                }
            };
            info!("best {} against bound {}", report.best_ratio, report.bound);
            let out = match c.format {
                Format::Json => json(&cfg, &report)?,
                Format::Csv => verify_csv(&report),
            };
            let mut candidate = Vec::new();
            if candidate_out.is_some() {
                report.best_candidate.write_csv(&mut candidate)?;
            }
            match (c.out.as_deref(), candidate_out.as_deref()) {
                (Some(o), Some(co)) => write_all_atomic(&[(o, out.as_bytes()), (co, &candidate)])?,
                (o, co) => {
                    if let Some(co) = co {
                        write_all_atomic(&[(co, &candidate)])?;
                    }
                    emit(o, out.as_bytes(), stdout)?;
                }
            }
            Ok(if report.violation { EXIT_VIOLATION } else { EXIT_OK })
        }
        Command::CheckLemmas { samples, inject_fault } => {
            let fault = inject_fault.map(|FaultArg::FlipE| Fault::FlipE);
            let cfg = RunConfig { samples: Some(*samples), fault, ..RunConfig::base("check-lemmas", c) };
            let exps = match (c.p, c.q) {
                (None, None) => Exponents::presets().to_vec(),
                _ => vec![exponents(c)?],
            };
            let lcfg = LemmaConfig { samples: *samples, seed: c.seed, tol: c.tol, fault, ..LemmaConfig::default() };
            let report = lemmas::run_suite(&exps, &lcfg);
            for (pre, r) in report.failures() {
                eprintln!("FAIL p={} q={} {}: {} of {} failed", pre.p, pre.q, r.name, r.failures, r.checked);
            }
            let out = match c.format {
                Format::Json => json(&cfg, &report)?,
                Format::Csv => lemmas_csv(&report),
            };
            emit(c.out.as_deref(), out.as_bytes(), stdout)?;
            Ok(if report.all_passed { EXIT_OK } else { EXIT_PROPERTY })
        }
    }
}

fn usage(msg: &str) -> Failure {
    Failure { code: EXIT_DOMAIN, message: msg.to_string() }
}

fn exponents(c: &Common) -> Result<Exponents, Failure> {
    match (c.p, c.q) {
        (Some(p), Some(q)) => Ok(Exponents::new(p, q)?),
        _ => Err(usage("both --p and --q are required")),
    }
}

#[derive(Serialize)]
struct EvalBody {
    #[serde(flatten)]
    sharp: SharpResult,
    classification: String,
    region: RegionReport,
}

#[derive(Serialize)]
struct RegionBody {
    delta: f64,
    rows: usize,
    boundary_rows: usize,
    files: Vec<PathBuf>,
}

fn json<T: Serialize>(cfg: &RunConfig, body: T) -> Result<String, Failure> {
    let doc = Document { version: env!("CARGO_PKG_VERSION"), config: cfg, body };
    let mut s = serde_json::to_string_pretty(&doc).map_err(|e| Failure { code: EXIT_IO, message: e.to_string() })?;
    s.push('\n');
    Ok(s)
}

fn eval_csv(r: &SharpResult, g: &RegionReport) -> String {
    format!(
        "t0,t,branch,tprime0_sign,residual_phi,residual_F,iterations,classification,delta,s2_prime,s2_double_prime\n\
         {},{},{},{},{},{},{},{},{},{},{}\n",
        region::fmt_f64(r.t0),
        region::fmt_f64(r.t),
        r.branch,
        r.tprime0_sign,
        region::fmt_f64(r.residual_phi),
        region::fmt_f64(r.residual_f),
        r.iterations,
        g.classification(),
        region::fmt_f64(g.delta),
        g.s2_prime.map(region::fmt_f64).unwrap_or_default(),
        region::fmt_f64(g.s2_double_prime)
    )
}

fn verify_csv(r: &OracleReport) -> String {
    format!(
        "best_ratio,normalized_ratio,bound,gap,relative_gap,feasible_candidates,violation\n{},{},{},{},{},{},{}\n",
        region::fmt_f64(r.best_ratio),
        region::fmt_f64(r.normalized_ratio),
        region::fmt_f64(r.bound),
        region::fmt_f64(r.gap),
        region::fmt_f64(r.relative_gap),
        r.feasible_candidates,
        r.violation
    )
}

fn lemmas_csv(r: &SuiteReport) -> String {
    let mut s = String::from("p,q,property,passed,checked,failures\n");
    for pre in &r.presets {
        for prop in &pre.properties {
            s.push_str(&format!("{},{},{},{},{},{}\n", pre.p, pre.q, prop.name, prop.passed, prop.checked, prop.failures));
        }
    }
    s
}

/// Atlas, curve table and boundary table paths derived from the atlas path.
pub fn region_paths(out: &Path) -> [PathBuf; 3] {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "atlas".into());
    let dir = out.parent().unwrap_or(Path::new(""));
    [out.to_path_buf(), dir.join(format!("{stem}.curves.csv")), dir.join(format!("{stem}.boundary.csv"))]
}

fn emit<W: Write>(path: Option<&Path>, bytes: &[u8], stdout: &mut W) -> Result<(), Failure> {
    match path {
        Some(p) => write_all_atomic(&[(p, bytes)]),
        None => Ok(stdout.write_all(bytes)?),
    }
}

/// Stages every file next to its destination, then renames them into place.
pub fn write_all_atomic(files: &[(&Path, &[u8])]) -> Result<(), Failure> {
    let mut staged = Vec::with_capacity(files.len());
    for (path, bytes) in files {
        let dir = match path.parent() {
            Some(d) if !d.as_os_str().is_empty() => d,
            _ => Path::new("."),
        };
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        tmp.write_all(bytes)?;
        tmp.as_file().sync_all()?;
        staged.push((tmp, *path));
    }
    for (tmp, path) in staged {
        tmp.persist(path).map_err(|e| Failure::from(e.error))?;
    }
    Ok(())
}
