//! Command-line front end: deterministic system generation, spectral and
//! entropy reports, duality and decay checks, and the acceptance suite.
//!
//! Exit codes: 0 on success, 2 on validation errors (bad files, bad
//! flags), 3 when a check subcommand ran but its assertion failed.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use tshift::ess::{ess_sweep, DEFAULT_EPS_SWEEP};
use tshift::gen::{dirichlet_measure, potential, stream_rng, system, MapKind};
use tshift::io::{
    ess_sweep_csv, load_measure, load_partition, load_system, load_vector, save_system,
    save_vector, sequence_csv, system_json, to_json_string,
};
use tshift::shiftop::{spectral_report, POWER_DEFAULT_MAX_ITER, POWER_DEFAULT_TOL};
use tshift::suite::run_acceptance_suite;
use tshift::tentropy::{tau, tau_n, tau_n_d, PartitionMode, SolverConfig};
use tshift::verify::vp_check;
use tshift::{Error, PotentialVector, Result};

#[derive(Parser)]
#[command(
    name = "tshift",
    version,
    about = "Spectral exponents, entropy ladders, and decay checks for \
             finite weighted shift systems"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random system (and optional potential / measure files).
    Gen(GenArgs),
    /// Spectral exponent report: cycle means, power iteration, norm tail.
    Spectral(SpectralArgs),
    /// Entropy values: a single level, a fixed partition, or the ladder.
    Tentropy(TentropyArgs),
    /// Duality check: spectral exponent vs the invariant-measure bound.
    Vp(VpArgs),
    /// Deviation-set decay sweep around a measure.
    Ess(EssArgs),
    /// Run every acceptance criterion with one seed.
    Suite(SuiteArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum KindFlag {
    Random,
    Permutation,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeFlag {
    Exact,
    Greedy,
}

impl From<ModeFlag> for PartitionMode {
    fn from(m: ModeFlag) -> Self {
        match m {
            ModeFlag::Exact => PartitionMode::Exact,
            ModeFlag::Greedy => PartitionMode::Greedy,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatFlag {
    Json,
    Csv,
}

#[derive(Args)]
struct GenArgs {
    /// Number of points.
    #[arg(short, long)]
    n: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = KindFlag::Random)]
    kind: KindFlag,
    /// Give every point mass 1 instead of log-uniform masses in [0.5, 2].
    #[arg(long)]
    unit_mass: bool,
    /// Where to write the system file (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a potential with entries uniform in [-bound, bound].
    #[arg(long)]
    phi_out: Option<PathBuf>,
    #[arg(long, default_value_t = 3.0)]
    phi_bound: f64,
    /// Also write a random interior probability measure.
    #[arg(long)]
    mu_out: Option<PathBuf>,
}

#[derive(Args)]
struct SpectralArgs {
    #[arg(long)]
    system: PathBuf,
    #[arg(long)]
    phi: PathBuf,
    /// Longest word length for the norm sequence and tail bound.
    #[arg(long, default_value_t = 64)]
    k_max: usize,
    /// Power-iteration convergence tolerance.
    #[arg(long, default_value_t = POWER_DEFAULT_TOL)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// json: full report; csv: the (1/k) ln-norm sequence.
    #[arg(long, value_enum, default_value_t = FormatFlag::Json)]
    format: FormatFlag,
}

#[derive(Args)]
struct TentropyArgs {
    #[arg(long)]
    system: PathBuf,
    #[arg(long)]
    mu: PathBuf,
    /// Evaluate one level at a fixed index partition (blocks file).
    #[arg(long)]
    partition: Option<PathBuf>,
    /// Evaluate a single level instead of the full ladder.
    #[arg(long)]
    level: Option<usize>,
    /// Ladder depth when no single level is requested.
    #[arg(long, default_value_t = 8)]
    n_max: usize,
    #[arg(long, value_enum, default_value_t = ModeFlag::Greedy)]
    mode: ModeFlag,
    /// Inner-solver gain tolerance.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// json: full report; csv: the per-level sequence (ladder runs only).
    #[arg(long, value_enum, default_value_t = FormatFlag::Json)]
    format: FormatFlag,
}

#[derive(Args)]
struct VpArgs {
    #[arg(long)]
    system: PathBuf,
    #[arg(long)]
    phi: PathBuf,
    /// Deepest entropy level used on the bound side.
    #[arg(long, default_value_t = 12)]
    n_max: usize,
    /// Inner-solver gain tolerance.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Largest acceptable duality gap; exceeding it exits with status 3.
    #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
    max_gap: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EssArgs {
    #[arg(long)]
    system: PathBuf,
    /// Center measure of the neighborhoods.
    #[arg(long)]
    mu: PathBuf,
    /// Decay budget; defaults to the greedy entropy estimate plus margin.
    #[arg(long, allow_negative_numbers = true)]
    t: Option<f64>,
    #[arg(long, default_value_t = 0.1)]
    t_margin: f64,
    /// Neighborhood radii to sweep.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    eps: Option<Vec<f64>>,
    /// Largest orbit horizon.
    #[arg(long, default_value_t = 32)]
    n_max: usize,
    /// Inner-solver gain tolerance.
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatFlag::Json)]
    format: FormatFlag,
}

#[derive(Args)]
struct SuiteArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Where to write the JSON report (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cmd: Command) -> Result<ExitCode> {
    match cmd {
        Command::Gen(a) => cmd_gen(a),
        Command::Spectral(a) => cmd_spectral(a),
        Command::Tentropy(a) => cmd_tentropy(a),
        Command::Vp(a) => cmd_vp(a),
        Command::Ess(a) => cmd_ess(a),
        Command::Suite(a) => cmd_suite(a),
    }
}

/// Writes `content` to `out`, or to stdout when no path was given.
fn emit(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

fn cmd_gen(a: GenArgs) -> Result<ExitCode> {
    if a.n == 0 {
        return Err(Error::Schema {
            reason: "gen requires n >= 1".into(),
        });
    }
    if !a.phi_bound.is_finite() || a.phi_bound < 0.0 {
        return Err(Error::Schema {
            reason: format!("phi bound must be finite and >= 0, got {}", a.phi_bound),
        });
    }
    let kind = match a.kind {
        KindFlag::Random => MapKind::Random,
        KindFlag::Permutation => MapKind::Permutation,
    };
    // Independent streams per artifact, so requesting one file never
    // changes the bytes of another.
    let sys = system(&mut stream_rng(a.seed, 0), a.n, kind, a.unit_mass);
    match &a.out {
        Some(path) => save_system(path, &sys)?,
        None => print!("{}", system_json(&sys)?),
    }
    if let Some(path) = &a.phi_out {
        let phi = potential(&mut stream_rng(a.seed, 1), &sys, a.phi_bound);
        save_vector(path, phi.values())?;
    }
    if let Some(path) = &a.mu_out {
        let mu = dirichlet_measure(&mut stream_rng(a.seed, 2), a.n);
        save_vector(path, mu.densities())?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_spectral(a: SpectralArgs) -> Result<ExitCode> {
    let sys = load_system(&a.system)?;
    let phi = PotentialVector::new(&sys, load_vector(&a.phi)?)?;
    if a.k_max == 0 {
        return Err(Error::Schema {
            reason: "k-max must be >= 1".into(),
        });
    }
    if !(a.tol.is_finite() && a.tol > 0.0) {
        return Err(Error::Schema {
            reason: format!("tol must be a positive real, got {}", a.tol),
        });
    }
    let report = spectral_report(&sys, &phi, a.k_max, a.tol, POWER_DEFAULT_MAX_ITER)?;
    let content = match a.format {
        FormatFlag::Json => to_json_string(&report)?,
        FormatFlag::Csv => sequence_csv(&report.norm_limit),
    };
    emit(&a.out, &content)?;
    Ok(ExitCode::SUCCESS)
}

fn solver_config(tol: f64) -> Result<SolverConfig> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::Schema {
            reason: format!("tol must be a positive real, got {tol}"),
        });
    }
    Ok(SolverConfig::with_gain_tol(tol))
}

fn cmd_tentropy(a: TentropyArgs) -> Result<ExitCode> {
    let sys = load_system(&a.system)?;
    let mu = load_measure(&a.mu, sys.n())?;
    let cfg = solver_config(a.tol)?;
    let report = if let Some(path) = &a.partition {
        let d = load_partition(path, sys.n())?;
        tau_n_d(&sys, &mu, &d, a.level.unwrap_or(1), &cfg)?
    } else if let Some(level) = a.level {
        tau_n(&sys, &mu, level, a.mode.into(), &cfg)?
    } else {
        tau(&sys, &mu, a.n_max, a.mode.into(), &cfg)?
    };
    let content = match a.format {
        FormatFlag::Json => to_json_string(&report)?,
        FormatFlag::Csv => {
            let per_n = report.per_n.as_deref().ok_or_else(|| Error::Schema {
                reason: "csv output needs the per-level sequence; run the \
                         ladder (no --level, no --partition)"
                    .into(),
            })?;
            sequence_csv(per_n)
        }
    };
    emit(&a.out, &content)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_vp(a: VpArgs) -> Result<ExitCode> {
    let sys = load_system(&a.system)?;
    let phi = PotentialVector::new(&sys, load_vector(&a.phi)?)?;
    if a.n_max == 0 {
        return Err(Error::Schema {
            reason: "n-max must be >= 1".into(),
        });
    }
    let cfg = solver_config(a.tol)?;
    let mut levels: Vec<usize> = [2usize, 4, 8]
        .into_iter()
        .filter(|&l| l < a.n_max)
        .collect();
    levels.push(a.n_max);
    let report = vp_check(&sys, &phi, a.n_max, &levels, &cfg)?;
    emit(&a.out, &to_json_string(&report)?)?;
    if report.gap < -1e-6 || report.gap > a.max_gap {
        eprintln!(
            "duality gap {:.3e} outside [-1e-6, {:.3e}]",
            report.gap, a.max_gap
        );
        return Ok(ExitCode::from(3));
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_ess(a: EssArgs) -> Result<ExitCode> {
    let sys = load_system(&a.system)?;
    let mu = load_measure(&a.mu, sys.n())?;
    let cfg = solver_config(a.tol)?;
    if a.n_max == 0 {
        return Err(Error::Schema {
            reason: "n-max must be >= 1".into(),
        });
    }
    let eps = a.eps.unwrap_or_else(|| DEFAULT_EPS_SWEEP.to_vec());
    if eps.iter().any(|&e| !(e.is_finite() && e > 0.0)) {
        return Err(Error::Schema {
            reason: "every eps must be a positive real".into(),
        });
    }
    let t = match a.t {
        Some(t) if t.is_finite() => t,
        Some(t) => {
            return Err(Error::Schema {
                reason: format!("t must be finite, got {t}"),
            })
        }
        None => {
            let hat = tau(&sys, &mu, 6, PartitionMode::Greedy, &cfg)?;
            hat.value + a.t_margin
        }
    };
    let sweep = ess_sweep(&sys, &mu, t, &eps, a.n_max, &[])?;
    let content = match a.format {
        FormatFlag::Json => to_json_string(&sweep)?,
        FormatFlag::Csv => ess_sweep_csv(&sweep),
    };
    emit(&a.out, &content)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_suite(a: SuiteArgs) -> Result<ExitCode> {
    let report = run_acceptance_suite(a.seed)?;
    for c in &report.criteria {
        eprintln!(
            "criterion {} ({}): {} — {}",
            c.id,
            c.name,
            if c.pass { "PASS" } else { "FAIL" },
            c.detail
        );
    }
    emit(&a.out, &to_json_string(&report)?)?;
    if !report.all_passed {
        return Ok(ExitCode::from(3));
    }
    Ok(ExitCode::SUCCESS)
}
