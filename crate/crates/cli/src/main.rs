//! `perturb`: analyze, solve and sweep coupled singularly perturbed systems.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 computation
//! error, 3 a declared acceptance window failed.

use clap::{Args, Parser, Subcommand, ValueEnum};
use perturb_core::analysis::{analyze, layer_catalog};
use perturb_core::harness::{
    amplitude_probe_1d, amplitude_probe_2d, distance_to_reduced, eps_rate_sweep, reduced,
    scheme_convergence, solve, Reduced, Solution, SweepResult, Window,
};
use perturb_core::config::SystemConfig;
use perturb_core::mesh::{MeshSpec, DEFAULT_SIGMA};
use perturb_core::par::{self, Execution};
use perturb_core::solve1d::Scheme;
use perturb_core::solve2d::SolveOptions;
use perturb_core::system::PerturbationSpec;
use perturb_core::{make_preset, Error, Preset, System};
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "perturb", version, about = "Layer analysis and layer-adapted solvers for coupled convection-diffusion systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Boundary splits, diagonalization or LDL^T, reduced BCs and the layer catalog.
    Analyze {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        out: Output,
    },
    /// Finite-difference solution on a layer-adapted mesh.
    Solve {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        mesh: MeshArgs,
        #[command(flatten)]
        out: Output,
        /// Also write a VTK structured grid (2D only).
        #[arg(long)]
        vtk: bool,
    },
    /// Convergence in eps towards the reduced solution, or in n with --n-list.
    Sweep {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        mesh: MeshArgs,
        #[command(flatten)]
        out: Output,
        /// Comma-separated decreasing eps values.
        #[arg(long, value_delimiter = ',', conflicts_with = "n_list")]
        eps_list: Option<Vec<f64>>,
        /// Comma-separated mesh sizes for a mesh convergence table.
        #[arg(long, value_delimiter = ',')]
        n_list: Option<Vec<usize>>,
        /// Acceptance window `lo,hi` for the fitted L2 rate.
        #[arg(long, value_delimiter = ',')]
        window: Option<Vec<f64>>,
        /// Run sweep points one after another.
        #[arg(long)]
        sequential: bool,
    },
    /// List built-in systems.
    Presets {
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct Source {
    /// Built-in system name (see `perturb presets`).
    #[arg(long)]
    preset: Option<String>,
    /// JSON system configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SourceEps {
    /// Override eps: one value, or `eps1,eps2`.
    #[arg(long, value_delimiter = ',')]
    eps: Option<Vec<f64>>,
}

#[derive(Args, Debug)]
struct MeshArgs {
    /// Intervals per direction.
    #[arg(long, default_value_t = 128)]
    n: usize,
    /// Shishkin transition constant.
    #[arg(long, default_value_t = DEFAULT_SIGMA)]
    sigma: f64,
    /// Use a uniform mesh instead of a Shishkin mesh.
    #[arg(long)]
    uniform: bool,
    #[arg(long, value_enum, default_value_t = SchemeArg::Central)]
    scheme: SchemeArg,
}

#[derive(Args, Debug)]
struct Output {
    #[command(flatten)]
    eps: SourceEps,
    /// Output directory; without it results go to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SchemeArg {
    Central,
    Upwind,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Scheme {
        match s {
            SchemeArg::Central => Scheme::Central,
            SchemeArg::Upwind => Scheme::Upwind,
        }
    }
}

/// Failure with its exit code.
enum Failure {
    Usage(String),
    Compute(Error),
    Window(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::UnknownPreset(_) => Failure::Usage(e.to_string()),
            e => Failure::Compute(e),
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure::Usage(format!("{}: {e}", path.display()))
}

type CliResult<T> = Result<T, Failure>;

fn load_system(source: &Source, eps: &SourceEps) -> CliResult<System> {
    let sys = match (&source.preset, &source.config) {
        (Some(name), None) => perturb_core::make_preset_named(name)?,
        (None, Some(path)) => SystemConfig::load(path)?.to_system()?,
        _ => return Err(Failure::Usage("give exactly one of --preset or --config".into())),
    };
    let Some(values) = &eps.eps else {
        return Ok(sys);
    };
    let p = match values[..] {
        [eps] => PerturbationSpec::OneParam { eps },
        [eps1, eps2] => PerturbationSpec::TwoParam { eps1, eps2 },
        _ => return Err(Failure::Usage("--eps takes one or two values".into())),
    };
    p.check().map_err(|e| Failure::Usage(e.to_string()))?;
    Ok(sys.with_perturbation(p))
}

fn mesh_spec(m: &MeshArgs) -> MeshSpec {
    if m.uniform {
        MeshSpec::Uniform { n: m.n }
    } else {
        MeshSpec::Shishkin { n: m.n, sigma: m.sigma }
    }
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json serializes") + "\n"
}

fn write(dir: &Path, name: &str, text: &str) -> CliResult<()> {
    let path = dir.join(name);
    std::fs::write(&path, text).map_err(|e| io_failure(&path, e))
}

/// Run metadata kept apart from the data files so those stay reproducible.
fn write_meta(dir: &Path) -> CliResult<()> {
    let stamp = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let meta = json!({
        "tool": "perturb",
        "version": env!("CARGO_PKG_VERSION"),
        "args": std::env::args().skip(1).collect::<Vec<_>>(),
        "unix_time": stamp,
        "parallel": cfg!(feature = "parallel"),
        "thread_limit": par::thread_limit(),
    });
    write(dir, "meta.json", &pretty(&meta))
}

fn prepare_out(out: &Option<PathBuf>) -> CliResult<Option<&Path>> {
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
            write_meta(dir)?;
            Ok(Some(dir))
        }
        None => Ok(None),
    }
}

fn cmd_analyze(source: &Source, out: &Output) -> CliResult<()> {
    let sys = load_system(source, &out.eps)?;
    let report = analyze(&sys)?.to_json() + "\n";
    match prepare_out(&out.out)? {
        Some(dir) => write(dir, "analysis.json", &report),
        None => {
            print!("{report}");
            Ok(())
        }
    }
}

fn probes(sys: &System, sol: &Solution, red: &Reduced) -> perturb_core::Result<Value> {
    let catalog = layer_catalog(sys)?;
    let amps = match (sol, red) {
        (Solution::OneD(s), Reduced::OneD(r)) => amplitude_probe_1d(s, &catalog, r)?,
        (Solution::TwoD(s), Reduced::TwoD(r)) => amplitude_probe_2d(s, &catalog, r)?,
        _ => unreachable!("dimensions agree"),
    };
    Ok(serde_json::to_value(amps).expect("amplitudes serialize"))
}

/// Diagnostics that are not always available are reported as errors
/// inside the summary instead of failing the solve.
fn or_error(r: perturb_core::Result<Value>) -> Value {
    r.unwrap_or_else(|e| json!({ "error": e.code(), "message": e.to_string() }))
}

fn cmd_solve(source: &Source, m: &MeshArgs, out: &Output, vtk: bool) -> CliResult<()> {
    let sys = load_system(source, &out.eps)?;
    let opts = SolveOptions::new(m.scheme.into());
    let spec = mesh_spec(m);
    let sol = solve(&sys, &spec, &opts)?;
    let red = reduced(&sys);
    let norms = or_error(red.clone().and_then(|r| {
        let (l2, max) = distance_to_reduced(&sol, &r)?;
        Ok(json!({ "l2": l2, "max": max }))
    }));
    let amplitudes = or_error(red.and_then(|r| probes(&sys, &sol, &r)));
    let summary = json!({
        "dimension": sys.dimension(),
        "perturbation": sys.perturbation(),
        "mesh": spec,
        "scheme": Scheme::from(m.scheme),
        "nodes": sol.node_count(),
        "distance_to_reduced": norms,
        "amplitudes": amplitudes,
    });
    let csv = sol.to_csv();
    match prepare_out(&out.out)? {
        Some(dir) => {
            write(dir, "solution.csv", &csv)?;
            write(dir, "summary.json", &pretty(&summary))?;
            if vtk {
                let Solution::TwoD(s) = &sol else {
                    return Err(Failure::Usage("--vtk needs a 2D system".into()));
                };
                write(dir, "solution.vtk", &s.to_vtk())?;
            }
        }
        None => match out.format.unwrap_or(Format::Csv) {
            Format::Csv => print!("{csv}"),
            Format::Json => print!("{}", pretty(&summary)),
        },
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_sweep(
    source: &Source,
    m: &MeshArgs,
    out: &Output,
    eps_list: &Option<Vec<f64>>,
    n_list: &Option<Vec<usize>>,
    window: &Option<Vec<f64>>,
    sequential: bool,
) -> CliResult<()> {
    let sys = load_system(source, &out.eps)?;
    let exec = if sequential { Execution::Sequential } else { Execution::default() };
    let scheme = Scheme::from(m.scheme);
    let (result, default_window): (SweepResult, Option<Window>) = match (eps_list, n_list) {
        (_, Some(ns)) => {
            if ns.is_empty() {
                return Err(Failure::Usage("--n-list is empty".into()));
            }
            (scheme_convergence(&sys, ns, &mesh_spec(m), scheme, exec)?, None)
        }
        (Some(eps), None) => {
            if eps.len() < 3 {
                return Err(Failure::Usage("--eps-list needs at least three values".into()));
            }
            if eps.windows(2).any(|w| !(w[1] < w[0])) || eps.iter().any(|&e| !(e > 0.0)) {
                return Err(Failure::Usage("--eps-list must be positive and decreasing".into()));
            }
            let w = Window { lo: 0.45, hi: 0.55 };
            (eps_rate_sweep(&sys, eps, &mesh_spec(m), scheme, exec)?, Some(w))
        }
        (None, None) => return Err(Failure::Usage("give --eps-list or --n-list".into())),
    };
    let window = match window.as_deref() {
        Some(&[lo, hi]) if lo <= hi => Some(Window { lo, hi }),
        Some(_) => return Err(Failure::Usage("--window needs lo,hi with lo <= hi".into())),
        None => default_window,
    };
    let rate = result.rate();
    let passed = window.map(|w| rate.is_some_and(|r| w.contains(r)));
    let fit = json!({
        "axis": result.axis,
        "fit_l2": result.fit_l2,
        "fit_max": result.fit_max,
        "pairwise_l2": result.rows.iter().filter_map(|r| r.rate_l2).collect::<Vec<_>>(),
        "window": window,
        "passed": passed,
    });
    let csv = result.to_csv();
    match prepare_out(&out.out)? {
        Some(dir) => {
            write(dir, "sweep.csv", &csv)?;
            write(dir, "fit.json", &pretty(&fit))?;
        }
        None => match out.format.unwrap_or(Format::Csv) {
            Format::Csv => print!("{csv}"),
            Format::Json => print!("{}", pretty(&fit)),
        },
    }
    match (passed, window) {
        (Some(false), Some(w)) => Err(Failure::Window(format!(
            "fitted rate {} outside [{}, {}]",
            rate.map_or("none".to_string(), |r| format!("{r:.4}")),
            w.lo,
            w.hi
        ))),
        _ => Ok(()),
    }
}

fn cmd_presets(format: Format) {
    match format {
        Format::Csv => {
            println!("name,dimension,description");
            for p in Preset::ALL {
                println!("{},{},\"{}\"", p.name(), make_preset(p).dimension(), p.description());
            }
        }
        Format::Json => {
            let list: Vec<Value> = Preset::ALL
                .iter()
                .map(|&p| {
                    json!({
                        "name": p.name(),
                        "dimension": make_preset(p).dimension(),
                        "description": p.description(),
                        "system": serde_json::from_str::<Value>(
                            &SystemConfig::from_system(&make_preset(p)).to_json()
                        ).expect("config is json"),
                    })
                })
                .collect();
            print!("{}", pretty(&Value::Array(list)));
        }
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match &cli.command {
        Command::Analyze { source, out } => cmd_analyze(source, out),
        Command::Solve { source, mesh, out, vtk } => cmd_solve(source, mesh, out, *vtk),
        Command::Sweep {
            source,
            mesh,
            out,
            eps_list,
            n_list,
            window,
            sequential,
        } => cmd_sweep(source, mesh, out, eps_list, n_list, window, *sequential),
        Command::Presets { format } => {
            cmd_presets(*format);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Compute(e)) => {
            eprintln!("{}", json!({ "error": e.code(), "message": e.to_string() }));
            ExitCode::from(2)
        }
        Err(Failure::Window(msg)) => {
            eprintln!("acceptance window failed: {msg}");
            ExitCode::from(3)
        }
    }
}
