//! Subcommand implementations. Each returns the process exit code.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use axisym::criteria::{classify_dense, classify_facet, classify_general, format_float, ClassificationReport, Verdict};
use axisym::entropy::{e_lin_tilde, zero_set_test};
use axisym::family::{facet_from_fidelity_coords, vertices, VertexKind};
use axisym::schmidt::{curve_yb, default_subdivisions, SchmidtBounds, SchmidtBoundsEngine};
use axisym::twirl::twirl_to_family;
use axisym::FacetState;
use clap::Args;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::Config;
use crate::error::{CliError, CliResult};
use crate::input::{read_density_matrix, resolve_state, State, StateArgs};

pub const CSV_VERSION_LINE: &str = "# axisym-csv v1";

pub const EXIT_OK: u8 = 0;
pub const EXIT_INVALID: u8 = 1;
pub const EXIT_UNKNOWN: u8 = 2;

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

/// Worker pool sized by config, capped by `AXISYM_THREADS`.
pub fn thread_pool(cfg: &Config) -> CliResult<rayon::ThreadPool> {
    let available = std::thread::available_parallelism().map_or(1, |n| n.get());
    let mut threads = cfg.threads.unwrap_or(available);
    if let Ok(cap) = std::env::var("AXISYM_THREADS") {
        let cap: usize = cap
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Input(format!("AXISYM_THREADS must be a positive integer, got {cap:?}")))?;
        threads = threads.min(cap);
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Input(format!("cannot start thread pool: {e}")))
}

/// `(z, rbar)` of grid point `(i, j)`; row-major with `z` outer.
fn grid_coords(n: usize, i: usize, j: usize) -> (f64, f64) {
    let m = (n - 1) as f64;
    (i as f64 / m, (-1.0 + 2.0 * j as f64 / m).clamp(-1.0, 1.0))
}

fn check_grid(n: usize) -> CliResult<()> {
    if n < 2 {
        return Err(CliError::Input(format!("grid resolution must be at least 2, got {n}")));
    }
    Ok(())
}

fn check_coords_d(d: usize) -> CliResult<()> {
    if d != 3 && d != 4 {
        return Err(CliError::Input(format!("grid coordinates are defined for d = 3 and d = 4, not {d}")));
    }
    Ok(())
}

fn engine(d: usize, flag: Option<usize>, cfg: &Config) -> CliResult<SchmidtBoundsEngine> {
    let m = flag.or(cfg.subdivisions).unwrap_or_else(|| default_subdivisions(d));
    if m == 0 {
        return Err(CliError::Input("subdivisions must be at least 1".into()));
    }
    Ok(SchmidtBoundsEngine::new(d, m)?)
}

fn facet_of(state: &State) -> CliResult<FacetState> {
    state.facet().ok_or_else(|| CliError::Input("this command needs a facet state (y_k = x_1)".into()))
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub state: StateArgs,
    /// DensityMatrix JSON file; classified with dense numerical tests
    #[arg(long, conflicts_with_all = ["x", "y", "y_im", "z", "rbar", "json", "facet"])]
    pub matrix: Option<String>,
    /// Append the report as a CSV row to this file (header written when new)
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

pub fn classify(args: &ClassifyArgs, cfg: &Config) -> CliResult<u8> {
    let report = match &args.matrix {
        Some(path) => classify_dense(&read_density_matrix(path)?)?,
        None => {
            let resolved = resolve_state(&args.state, cfg.renorm_tol)?;
            let mut report = match &resolved.state {
                State::Facet(s) => classify_facet(s)?,
                State::Family(s) => classify_general(s)?,
            };
            report.notes.extend(resolved.notes);
            report
        }
    };
    if let Some(path) = &args.csv {
        append_csv_row(path, &report)?;
    }
    emit(None, &to_json(&report)?)?;
    Ok(if report.verdict == Verdict::Unknown { EXIT_UNKNOWN } else { EXIT_OK })
}

fn append_csv_row(path: &Path, report: &ClassificationReport) -> CliResult<()> {
    use std::io::Write;
    let fresh = std::fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let mut text = String::new();
    if fresh {
        text.push_str(CSV_VERSION_LINE);
        text.push('\n');
        text.push_str(&ClassificationReport::csv_header(report.d));
        text.push('\n');
    }
    text.push_str(&report.to_csv_row());
    text.push('\n');
    let mut file = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| CliError::io(path, e))?;
    file.write_all(text.as_bytes()).map_err(|e| CliError::io(path, e))
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// Local dimension (3: full facet, 4: two-parameter cross-section)
    #[arg(long)]
    pub d: usize,
    /// Grid points per axis (at least 2)
    #[arg(long, default_value_t = 200)]
    pub grid: usize,
    /// Output CSV path (default stdout)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Skip the Schmidt-number columns
    #[arg(long)]
    pub no_schmidt: bool,
    /// Surface grid subdivisions for the Schmidt upper bound
    #[arg(long)]
    pub subdivisions: Option<usize>,
}

pub fn scan(args: &ScanArgs, cfg: &Config) -> CliResult<u8> {
    check_coords_d(args.d)?;
    check_grid(args.grid)?;
    let d = args.d;
    let n = args.grid;
    let engine = if args.no_schmidt { None } else { Some(engine(d, args.subdivisions, cfg)?) };

    let mut text = String::new();
    text.push_str(CSV_VERSION_LINE);
    text.push('\n');
    let mut cols = vec!["z".to_string(), "rbar".into()];
    cols.extend((1..=d).map(|k| format!("x{k}")));
    cols.extend(["verdict".to_string(), "ppt".into(), "ccnr".into()]);
    cols.extend((1..d).map(|k| format!("ppt_margin{k}")));
    if engine.is_some() {
        cols.extend(["schmidt_lower".to_string(), "schmidt_upper".into()]);
    }
    text.push_str(&cols.join(","));
    text.push('\n');

    let row_block = |i: usize| -> CliResult<String> {
        let mut block = String::new();
        for j in 0..n {
            let (z, rbar) = grid_coords(n, i, j);
            let s = facet_from_fidelity_coords(d, z, rbar)?;
            let r = classify_facet(&s)?;
            let mut fields = vec![format_float(z), format_float(rbar)];
            fields.extend(r.x.iter().map(|v| format_float(*v)));
            fields.extend([r.verdict.to_string(), r.ppt.to_string(), format_float(r.ccnr_value)]);
            fields.extend(r.ppt_margins.iter().map(|v| format_float(*v)));
            if let Some(e) = &engine {
                let b = e.bounds(&s)?;
                fields.extend([b.lower.to_string(), b.upper.to_string()]);
            }
            let _ = writeln!(block, "{}", fields.join(","));
        }
        Ok(block)
    };
    let blocks: Vec<String> = thread_pool(cfg)?.install(|| (0..n).into_par_iter().map(row_block).collect::<CliResult<_>>())?;
    blocks.iter().for_each(|b| text.push_str(b));
    emit(args.out.as_deref(), &text)?;
    Ok(EXIT_OK)
}

#[derive(Debug, Args)]
pub struct VerticesArgs {
    #[arg(long)]
    pub d: usize,
    /// Output CSV path (default stdout)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn vertices_cmd(args: &VerticesArgs) -> CliResult<u8> {
    let d = args.d;
    let list = vertices(d)?;
    let mut text = format!("{CSV_VERSION_LINE}\n");
    let mut cols = vec!["index".to_string(), "kind".into()];
    cols.extend((1..=d).map(|k| format!("x{k}")));
    for k in 1..d {
        cols.push(format!("y{k}_re"));
        cols.push(format!("y{k}_im"));
    }
    let _ = writeln!(text, "{}", cols.join(","));
    for (i, v) in list.iter().enumerate() {
        let kind = match v.kind {
            VertexKind::Circulant(j) => format!("circulant_{j}"),
            VertexKind::Diagonal(k) => format!("diagonal_{k}"),
        };
        let mut fields = vec![i.to_string(), kind];
        fields.extend(v.state.xs().iter().map(|x| format_float(*x)));
        for y in v.state.ys() {
            fields.push(format_float(y.re));
            fields.push(format_float(y.im));
        }
        let _ = writeln!(text, "{}", fields.join(","));
    }
    emit(args.out.as_deref(), &text)?;
    Ok(EXIT_OK)
}

#[derive(Debug, Args)]
pub struct TwirlArgs {
    /// DensityMatrix JSON input ("-" for stdin)
    #[arg(long = "in")]
    pub input: String,
    /// FamilyState JSON output path (default stdout)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn twirl(args: &TwirlArgs) -> CliResult<u8> {
    let rho = read_density_matrix(&args.input)?;
    let s = twirl_to_family(&rho)?;
    emit(args.out.as_deref(), &to_json(&s.to_json())?)?;
    Ok(EXIT_OK)
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    /// Local dimension; the curve exists for d = 3 only
    #[arg(long, default_value_t = 3)]
    pub d: usize,
    /// Number of intervals; n + 1 samples of x_2 over [0, 2/9]
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    /// Output CSV path (default stdout)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn curve(args: &CurveArgs) -> CliResult<u8> {
    if args.d != 3 {
        return Err(CliError::Input(format!("the rank-deficiency curve is defined for d = 3, not {}", args.d)));
    }
    if args.n == 0 {
        return Err(CliError::Input("--n must be at least 1".into()));
    }
    let mut text = format!("{CSV_VERSION_LINE}\nx2,x1_plus,x1_minus\n");
    for k in 0..=args.n {
        let x2 = 2.0 * k as f64 / (9.0 * args.n as f64);
        let (plus, minus) = curve_yb(x2)?;
        let _ = writeln!(text, "{},{},{}", format_float(x2), format_float(plus), format_float(minus));
    }
    emit(args.out.as_deref(), &text)?;
    Ok(EXIT_OK)
}

#[derive(Debug, Args)]
pub struct SchmidtArgs {
    #[command(flatten)]
    pub state: StateArgs,
    /// Scan a grid of this many points per axis instead of one state
    #[arg(long, conflicts_with_all = ["x", "z", "rbar", "json"])]
    pub grid: Option<usize>,
    /// Surface grid subdivisions for the upper bound
    #[arg(long)]
    pub subdivisions: Option<usize>,
    /// Output path (default stdout)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Serialize)]
struct SchmidtReport<'a> {
    d: usize,
    x: &'a [f64],
    #[serde(flatten)]
    bounds: &'a SchmidtBounds,
}

pub fn schmidt(args: &SchmidtArgs, cfg: &Config) -> CliResult<u8> {
    let Some(n) = args.grid else {
        let resolved = resolve_state(&args.state, cfg.renorm_tol)?;
        let s = facet_of(&resolved.state)?;
        let bounds = engine(s.d(), args.subdivisions, cfg)?.bounds(&s)?;
        emit(args.out.as_deref(), &to_json(&SchmidtReport { d: s.d(), x: s.xs(), bounds: &bounds })?)?;
        return Ok(EXIT_OK);
    };
    let d = args.state.d.ok_or_else(|| CliError::Input("--d is required with --grid".into()))?;
    check_coords_d(d)?;
    check_grid(n)?;
    let engine = engine(d, args.subdivisions, cfg)?;
    let row_block = |i: usize| -> CliResult<String> {
        let mut block = String::new();
        for j in 0..n {
            let (z, rbar) = grid_coords(n, i, j);
            let b = engine.bounds(&facet_from_fidelity_coords(d, z, rbar)?)?;
            let _ = writeln!(block, "{},{},{},{}", format_float(z), format_float(rbar), b.lower, b.upper);
        }
        Ok(block)
    };
    let blocks: Vec<String> = thread_pool(cfg)?.install(|| (0..n).into_par_iter().map(row_block).collect::<CliResult<_>>())?;
    let mut text = format!("{CSV_VERSION_LINE}\nz,rbar,lower,upper\n");
    blocks.iter().for_each(|b| text.push_str(b));
    emit(args.out.as_deref(), &text)?;
    Ok(EXIT_OK)
}

#[derive(Debug, Args)]
pub struct ElinArgs {
    #[command(flatten)]
    pub state: StateArgs,
    /// Multistart count
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Seed for the random starts
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Serialize)]
struct ElinReport<'a> {
    d: usize,
    x: &'a [f64],
    value: f64,
    xi: &'a [Vec<f64>],
    restarts: usize,
    seed: u64,
    in_separable_polytope: bool,
}

pub fn elin(args: &ElinArgs, cfg: &Config) -> CliResult<u8> {
    let resolved = resolve_state(&args.state, cfg.renorm_tol)?;
    let s = facet_of(&resolved.state)?;
    let restarts = args.restarts.unwrap_or(cfg.restarts);
    if restarts == 0 {
        return Err(CliError::Input("--restarts must be at least 1".into()));
    }
    let r = e_lin_tilde(&s, restarts, args.seed.unwrap_or(cfg.seed))?;
    let report = ElinReport {
        d: s.d(),
        x: s.xs(),
        value: r.value,
        xi: &r.xi,
        restarts: r.restarts,
        seed: r.seed,
        in_separable_polytope: zero_set_test(&s),
    };
    emit(None, &to_json(&report)?)?;
    Ok(EXIT_OK)
}
