//! `stokes-squeeze`: command-line front end for the polarization-squeezing
//! engine.
//!
//! Five subcommands cover the pipeline. `analyze` reports Stokes moments,
//! Mandel Q, and polarization diagnostics for one state; `scan` tabulates
//! the squeezing function and the criterion flags over a θ×φ grid of
//! measurement directions; `cone` summarizes the squeezing cone from Q;
//! `simulate` draws photon-counting shots and estimates the squeezing
//! function from count moments; `witness` evaluates the classical lower
//! bounds for a coherent mixture and the nonclassicality flag.
//!
//! Conventions shared by all subcommands: angles inside files are radians;
//! on the command line a bare number is radians and a `deg` or `rad` suffix
//! makes the unit explicit. JSON output carries floats with 17 significant
//! digits so that re-parsing reproduces the exact values. Exit codes are 0
//! on success, 2 for input/usage errors, and 3 when a numerical-safety gate
//! refuses to produce numbers (excess truncation leakage, an undefined
//! Mandel Q, a lossy mode transform). `STOKES_SQUEEZE_THREADS` caps the
//! worker-thread count for grid scans.

mod emit;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process;

use clap::{Args, Parser, Subcommand, ValueEnum};
use stokes_squeeze::measurement::counts_csv;
use stokes_squeeze::states::{build_with_tol, verify_polarized};
use stokes_squeeze::{
    corresponding_ensemble, count_moment_value, estimate_squeezing, joint_distribution,
    jones_from_angles, mandel_q, nonclassicality_flag, parse_spec, rotated_basis, sample_counts,
    scan, squeezing_cone, stokes_moments, witness_value, CoherentMixture, Error, ScanGrid,
    StateEnsemble, StateSpec,
};

/// Polarization-squeezing analysis of two-mode quantum light.
#[derive(Parser)]
#[command(name = "stokes-squeeze", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Stokes moments, Mandel Q, and polarization diagnostics for one state.
    Analyze {
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Report format (`analyze` has no CSV form).
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Squeezing function and criterion flags over a grid of directions.
    Scan {
        #[command(flatten)]
        state: StateArgs,
        /// Grid as ROWSxCOLS: θ takes ROWS values on [0, π] inclusive,
        /// φ takes COLS values on [0, 2π) half-open; rows are θ-major.
        #[arg(long, value_name = "RxC", value_parser = parse_grid, default_value = "100x100")]
        grid: (usize, usize),
        #[command(flatten)]
        output: OutputArgs,
        /// Table format: `csv` (default) or `json`.
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Squeezing-cone summary from the Mandel Q of the polarization mode.
    Cone {
        #[command(flatten)]
        state: StateArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Report format (`cone` has no CSV form).
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Photon-counting simulation with a moment-based squeezing estimate.
    Simulate {
        #[command(flatten)]
        state: StateArgs,
        /// Polar angle θ of the measurement direction on the Poincaré
        /// sphere (radians; append `deg` for degrees).
        #[arg(long, value_name = "ANGLE", value_parser = parse_angle, allow_hyphen_values = true)]
        theta: f64,
        /// Azimuthal angle φ of the measurement direction.
        #[arg(long, value_name = "ANGLE", value_parser = parse_angle, allow_hyphen_values = true, default_value = "0")]
        phi: f64,
        /// Number of detection events to draw (the estimator needs ≥ 2).
        #[arg(long, value_name = "N", default_value_t = 10_000)]
        shots: u64,
        /// RNG seed; runs with equal seeds produce byte-identical files.
        #[arg(long, value_name = "SEED", default_value_t = 0)]
        seed: u64,
        /// Base output path; companion files share its stem. With
        /// `--format json` the estimator report lands here and the counts
        /// go to `<stem>.counts.csv` (+ `.counts.meta.json`); with
        /// `--format csv` the counts land here and the report goes to
        /// `<stem>.estimate.json` (+ `.meta.json`).
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
        /// Which file `--out` names: the JSON report or the counts CSV.
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
    /// Classical lower bounds and the nonclassicality flag.
    Witness {
        /// Input file: either a coherent-mixture JSON (recognized by its
        /// top-level `components` key) or an ordinary state spec.
        #[command(flatten)]
        state: StateArgs,
        /// Scan grid used to search directions, as ROWSxCOLS.
        #[arg(long, value_name = "RxC", value_parser = parse_grid, default_value = "100x100")]
        grid: (usize, usize),
        #[command(flatten)]
        output: OutputArgs,
        /// Report format (`witness` has no CSV form).
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
    },
}

/// Flags shared by every subcommand that loads a state.
#[derive(Args)]
struct StateArgs {
    /// State-specification JSON file.
    #[arg(long, value_name = "FILE")]
    state: PathBuf,

    /// Override the Fock cutoff declared in (or defaulted from) the file.
    #[arg(long, value_name = "N")]
    cutoff: Option<usize>,

    /// Truncation-leakage tolerance for the second-moment safety gate.
    #[arg(long, value_name = "TOL", default_value = "1e-10")]
    tolerance: f64,
}

#[derive(Args)]
struct OutputArgs {
    /// Write the report here instead of stdout.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// Everything that can stop a run, mapped onto the two failure exit codes.
enum Failure {
    /// Bad input or usage: exit 2.
    Usage(String),
    /// Engine error: exit 3 when it is a numerical-safety refusal, else 2.
    Core(Error),
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Core(e) => {
                if e.is_numerical_safety() {
                    3
                } else {
                    2
                }
            }
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Usage(msg) => f.write_str(msg),
            Failure::Core(e) => e.fmt(f),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Core(Error::from(e))
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(failure) = configure_threads().and_then(|()| run(cli)) {
        eprintln!("error: {failure}");
        process::exit(failure.exit_code());
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Analyze {
            state,
            output,
            format,
        } => {
            require_json(format, "analyze")?;
            cmd_analyze(&state, output.out.as_deref())
        }
        Command::Scan {
            state,
            grid,
            output,
            format,
        } => cmd_scan(&state, grid, output.out.as_deref(), format),
        Command::Cone {
            state,
            output,
            format,
        } => {
            require_json(format, "cone")?;
            cmd_cone(&state, output.out.as_deref())
        }
        Command::Simulate {
            state,
            theta,
            phi,
            shots,
            seed,
            out,
            format,
        } => cmd_simulate(&state, theta, phi, shots, seed, &out, format),
        Command::Witness {
            state,
            grid,
            output,
            format,
        } => {
            require_json(format, "witness")?;
            cmd_witness(&state, grid, output.out.as_deref())
        }
    }
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

fn cmd_analyze(args: &StateArgs, out: Option<&Path>) -> Result<(), Failure> {
    let (spec, ens) = load_state(args)?;
    let mom = stokes_moments(&ens)?;
    let eps = jones_from_angles(spec.polarization.theta0, spec.polarization.phi0);

    // The vacuum has no photon statistics to classify; report null rather
    // than refusing the whole analysis.
    let q = match mandel_q(&ens, &eps) {
        Ok(q) => Some(q),
        Err(Error::QUndefined { .. }) => None,
        Err(e) => return Err(e.into()),
    };

    let mean_norm = mom.mean_norm();
    let poincare_mean = if mean_norm > 1e-12 * mom.s0.max(1.0) {
        Some([
            mom.s[0] / mean_norm,
            mom.s[1] / mean_norm,
            mom.s[2] / mean_norm,
        ])
    } else {
        None
    };
    let degree_of_polarization = if mom.s0 > 1e-12 {
        Some(mean_norm / mom.s0)
    } else {
        None
    };

    let report = emit::AnalyzeReport {
        cutoff: ens.cutoff(),
        leakage: ens.leakage(),
        second_moment_safe: ens.second_moment_safe(),
        theta0: spec.polarization.theta0,
        phi0: spec.polarization.phi0,
        moments: &mom,
        variances: [
            mom.variance_axis(0),
            mom.variance_axis(1),
            mom.variance_axis(2),
        ],
        poincare_mean,
        degree_of_polarization,
        mandel_q: q,
        polarized_residual: verify_polarized(&ens, &eps)?,
    };
    write_output(out, &emit::analyze_json(&report))
}

fn cmd_scan(
    args: &StateArgs,
    (rows, cols): (usize, usize),
    out: Option<&Path>,
    format: Format,
) -> Result<(), Failure> {
    let (_, ens) = load_state(args)?;
    let grid = ScanGrid::new(rows, cols)?;
    let reports = scan(&ens, grid)?;
    let doc = match format {
        Format::Csv => emit::scan_csv(&reports),
        Format::Json => emit::scan_json(rows, cols, &reports),
    };
    write_output(out, &doc)
}

fn cmd_cone(args: &StateArgs, out: Option<&Path>) -> Result<(), Failure> {
    let (spec, ens) = load_state(args)?;
    let eps = jones_from_angles(spec.polarization.theta0, spec.polarization.phi0);
    // An empty polarization mode leaves Q undefined; that is a numerical
    // refusal (exit 3), unlike `analyze`, because the cone IS the statistic.
    let cone = squeezing_cone(mandel_q(&ens, &eps)?)?;
    write_output(out, &emit::cone_json(&cone))
}

fn cmd_simulate(
    args: &StateArgs,
    theta: f64,
    phi: f64,
    shots: u64,
    seed: u64,
    out: &Path,
    format: Format,
) -> Result<(), Failure> {
    let (_, ens) = load_state(args)?;
    let dist = joint_distribution(&ens, &rotated_basis(theta, phi))?;
    let record = sample_counts(&dist, shots, seed)?;
    let estimate = estimate_squeezing(&record)?;

    // Three files per run: the estimator report, the raw counts, and a
    // metadata sidecar that makes the counts file self-describing. `--format`
    // only decides which of report/counts sits at `--out` itself.
    let (report_path, counts_path, meta_path) = match format {
        Format::Json => (
            out.to_path_buf(),
            sibling(out, ".counts.csv"),
            sibling(out, ".counts.meta.json"),
        ),
        Format::Csv => (
            sibling(out, ".estimate.json"),
            out.to_path_buf(),
            sibling(out, ".meta.json"),
        ),
    };
    let counts_name = file_name(&counts_path);
    write_file(&counts_path, &counts_csv(&record))?;
    write_file(
        &meta_path,
        &emit::counts_meta_json(seed, shots, theta, phi, &counts_name),
    )?;
    write_file(
        &report_path,
        &emit::simulate_json(&estimate, theta, phi, seed, &counts_name),
    )
}

fn cmd_witness(
    args: &StateArgs,
    (rows, cols): (usize, usize),
    out: Option<&Path>,
) -> Result<(), Failure> {
    let text = read_file(&args.state)?;
    let value: serde_json::Value = serde_json::from_str(&text)?;
    let grid = ScanGrid::new(rows, cols)?;

    // A coherent-mixture file carries a top-level `components` array; a
    // state spec never does (its mixture components live under `params`).
    let (input, reports, mixture) = if value.get("components").is_some() {
        let mix = CoherentMixture::from_json(&text)?;
        let ens = corresponding_ensemble(&mix, args.cutoff)?;
        ("coherent-mixture", scan(&ens, grid)?, Some(mix))
    } else {
        let mut spec = parse_spec(&text)?;
        apply_cutoff_override(&mut spec, args.cutoff);
        let ens = build_with_tol(&spec, args.tolerance)?;
        ("state-spec", scan(&ens, grid)?, None)
    };

    let verdict = nonclassicality_flag(&reports);
    let (witness_min, count_moment_min) = match &mixture {
        Some(mix) => {
            let mut best_w = (f64::INFINITY, 0.0, 0.0);
            let mut best_c = (f64::INFINITY, 0.0, 0.0);
            for rep in &reports {
                let w = witness_value(mix, &rep.direction);
                if w < best_w.0 {
                    best_w = (w, rep.theta, rep.phi);
                }
                let c = count_moment_value(mix, &rep.direction);
                if c < best_c.0 {
                    best_c = (c, rep.theta, rep.phi);
                }
            }
            (Some(best_w), Some(best_c))
        }
        None => (None, None),
    };

    let report = emit::WitnessReport {
        input,
        theta_steps: rows,
        phi_steps: cols,
        verdict: &verdict,
        witness_min,
        count_moment_min,
    };
    write_output(out, &emit::witness_json(&report))
}

// ---------------------------------------------------------------------------
// Shared plumbing
// ---------------------------------------------------------------------------

fn load_state(args: &StateArgs) -> Result<(StateSpec, StateEnsemble), Failure> {
    let text = read_file(&args.state)?;
    let mut spec = parse_spec(&text)?;
    apply_cutoff_override(&mut spec, args.cutoff);
    let ens = build_with_tol(&spec, args.tolerance)?;
    Ok((spec, ens))
}

fn apply_cutoff_override(spec: &mut StateSpec, cutoff: Option<usize>) {
    if let Some(c) = cutoff {
        spec.cutoff = Some(c);
    }
}

fn require_json(format: Format, command: &str) -> Result<(), Failure> {
    if format == Format::Csv {
        return Err(Failure::Usage(format!(
            "the {command} report has no CSV form; use --format json"
        )));
    }
    Ok(())
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, content: &str) -> Result<(), Failure> {
    fs::write(path, content).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn write_output(out: Option<&Path>, content: &str) -> Result<(), Failure> {
    match out {
        Some(path) => write_file(path, content),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

/// `run.json` + `.counts.csv` → `run.counts.csv`, next to the original.
fn sibling(out: &Path, suffix: &str) -> PathBuf {
    let mut name = out
        .file_stem()
        .map(|s| s.to_os_string())
        .unwrap_or_else(|| out.as_os_str().to_os_string());
    name.push(suffix);
    out.with_file_name(name)
}

fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// `STOKES_SQUEEZE_THREADS` caps the rayon pool used by grid scans. Unset
/// means rayon's default (one worker per core).
fn configure_threads() -> Result<(), Failure> {
    let Some(raw) = std::env::var_os("STOKES_SQUEEZE_THREADS") else {
        return Ok(());
    };
    let threads = raw
        .to_str()
        .and_then(|s| s.trim().parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .ok_or_else(|| {
            Failure::Usage(format!(
                "STOKES_SQUEEZE_THREADS must be a positive integer, got {raw:?}"
            ))
        })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| Failure::Usage(format!("cannot configure the thread pool: {e}")))
}

// ---------------------------------------------------------------------------
// Argument parsers
// ---------------------------------------------------------------------------

/// An angle with an optional unit suffix: bare numbers and `rad` are
/// radians, `deg` converts from degrees.
fn parse_angle(raw: &str) -> Result<f64, String> {
    let s = raw.trim();
    let (body, factor) = if let Some(stripped) = s.strip_suffix("deg") {
        (stripped, std::f64::consts::PI / 180.0)
    } else if let Some(stripped) = s.strip_suffix("rad") {
        (stripped, 1.0)
    } else {
        (s, 1.0)
    };
    let value: f64 = body
        .trim()
        .parse()
        .map_err(|_| format!("expected a number with an optional deg/rad suffix, got `{raw}`"))?;
    if !value.is_finite() {
        return Err(format!("angle must be finite, got `{raw}`"));
    }
    Ok(value * factor)
}

/// A grid extent written ROWSxCOLS, e.g. `200x400`.
fn parse_grid(raw: &str) -> Result<(usize, usize), String> {
    let err = || format!("expected a grid written ROWSxCOLS, e.g. 200x400, got `{raw}`");
    let (rows, cols) = raw.trim().split_once('x').ok_or_else(err)?;
    let rows: usize = rows.trim().parse().map_err(|_| err())?;
    let cols: usize = cols.trim().parse().map_err(|_| err())?;
    Ok((rows, cols))
}
