//! Command-line front end.
//!
//! Settings come from a flat `key = value` config file plus flag overrides
//! (flags win), and every command writes plot-ready CSV with `.` decimals
//! and 9 significant digits. Exit codes: 0 success, 1 validation error,
//! 2 check failure.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Write as _};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dynamics::{
    self, classify_ess, default_epsilon_grid, default_mutant_grid, equilibrium_report,
    EssClassification, Method, StrategyMode, Trajectory,
};
use crate::game::GameParams;
use crate::sim::{run_simulation, SimConfig, TopologyConfig};

const EXIT_OK: i32 = 0;
const EXIT_VALIDATION: i32 = 1;
const EXIT_CHECK: i32 = 2;

#[derive(Debug)]
enum CliError {
    Validation(String),
    Check(String),
}

impl From<crate::Error> for CliError {
    fn from(err: crate::Error) -> Self {
        CliError::Validation(err.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

fn io_err(context: &str, err: std::io::Error) -> CliError {
    CliError::Validation(format!("{context}: {err}"))
}

/// Entry point used by the `fwdgame` binary; returns the process exit code.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_VALIDATION,
            };
            let _ = err.print();
            return code;
        }
    };
    let outcome = match cli.command {
        Command::Analyze(args) => cmd_analyze(&args),
        Command::Replicator(args) => cmd_replicator(&args),
        Command::Manet(args) => cmd_manet(&args),
        Command::Sweep(args) => cmd_sweep(&args),
        Command::OracleCheck(args) => cmd_oracle_check(&args),
    };
    match outcome {
        Ok(code) => code,
        Err(CliError::Validation(msg)) => {
            eprintln!("error: {msg}");
            EXIT_VALIDATION
        }
        Err(CliError::Check(msg)) => {
            eprintln!("check failed: {msg}");
            EXIT_CHECK
        }
    }
}

#[derive(Parser)]
#[command(
    name = "fwdgame",
    version,
    about = "Reputation-constrained packet-forwarding game: equilibrium analysis, replicator trajectories, and an agent-based forwarding simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form equilibrium structure plus empirical stability checks
    Analyze(AnalyzeArgs),
    /// Replicator trajectories written as CSV time series
    Replicator(ReplicatorArgs),
    /// Agent-based forwarding simulation written as per-epoch CSV
    Manet(ManetArgs),
    /// Cartesian parameter sweep with basin-agreement column
    Sweep(SweepArgs),
    /// Compare the closed-form dove optimum against the grid oracle
    OracleCheck(OracleArgs),
}

#[derive(Args, Default)]
struct CommonFlags {
    /// Flat key=value config file; flags override file values
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Benefit of a delivered packet per unit of forwarding energy
    #[arg(long)]
    lambda: Option<f64>,
    /// Reputation gained per forwarded packet
    #[arg(long)]
    delta_r: Option<f64>,
    /// Reputation lost refusing a well-reputed requester (default: delta_r)
    #[arg(long)]
    delta_g: Option<f64>,
    /// Reputation lost refusing a badly reputed requester
    #[arg(long)]
    delta_b: Option<f64>,
    /// Output directory for generated files
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Args, Default)]
struct DynamicsFlags {
    /// Initial dove share (repeatable or comma-separated)
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    p0: Vec<f64>,
    /// Integration step
    #[arg(long)]
    dt: Option<f64>,
    /// Integration horizon in time units
    #[arg(long)]
    horizon: Option<f64>,
    /// Integration scheme: euler or rk4
    #[arg(long)]
    method: Option<String>,
    /// Dove strategy mode: constrained, baseline, or both
    #[arg(long)]
    mode: Option<String>,
}

#[derive(Args, Default)]
struct TopologyFlags {
    /// Number of nodes
    #[arg(long)]
    nodes: Option<usize>,
    /// Deployment area as WxH in meters, e.g. 1000x1000
    #[arg(long)]
    area: Option<String>,
    /// Transmission range in meters
    #[arg(long)]
    range: Option<f64>,
    /// Packets replenished per node every epoch
    #[arg(long)]
    packets: Option<u64>,
    /// Number of traffic epochs
    #[arg(long)]
    epochs: Option<usize>,
    /// Traffic rounds per epoch
    #[arg(long)]
    rounds: Option<usize>,
    /// Base RNG seed
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    common: CommonFlags,
}

#[derive(Args)]
struct ReplicatorArgs {
    #[command(flatten)]
    common: CommonFlags,
    #[command(flatten)]
    dynamics: DynamicsFlags,
}

#[derive(Args)]
struct ManetArgs {
    #[command(flatten)]
    common: CommonFlags,
    #[command(flatten)]
    dynamics: DynamicsFlags,
    #[command(flatten)]
    topology: TopologyFlags,
}

#[derive(Args)]
struct SweepArgs {
    /// Flat key=value config file; flags override file values
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Sweep values for lambda (repeatable or comma-separated)
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    lambda: Vec<f64>,
    /// Sweep values for delta_r
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    delta_r: Vec<f64>,
    /// Sweep values for delta_b
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    delta_b: Vec<f64>,
    /// Single delta_g applied to every cell (default: the cell's delta_r)
    #[arg(long)]
    delta_g: Option<f64>,
    /// Sweep values for the initial dove share
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    p0: Vec<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long)]
    method: Option<String>,
    /// Reject sweeps with more cells than this
    #[arg(long)]
    max_cells: Option<usize>,
    /// Worker threads (default: machine parallelism)
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    common: CommonFlags,
    /// Grid resolution of the brute-force search
    #[arg(long)]
    grid_steps: Option<u32>,
    /// Additional random viable parameter sets to check
    #[arg(long)]
    random_sets: Option<usize>,
    /// Seed for the random parameter sets
    #[arg(long)]
    seed: Option<u64>,
}

// ---------------------------------------------------------------------------
// Config file
// ---------------------------------------------------------------------------

const KNOWN_KEYS: &[&str] = &[
    "lambda",
    "delta_r",
    "delta_g",
    "delta_b",
    "p0",
    "dt",
    "horizon",
    "method",
    "mode",
    "nodes",
    "area",
    "range",
    "packets",
    "epochs",
    "rounds",
    "seed",
    "out",
    "grid_steps",
    "random_sets",
    "max_cells",
    "jobs",
];

struct FileConfig {
    path: String,
    entries: HashMap<String, (String, usize)>,
}

impl FileConfig {
    fn load(path: &Path) -> CliResult<Self> {
        let display = path.display().to_string();
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read config {display}: {e}")))?;
        let mut entries = HashMap::new();
        for (idx, line) in text.lines().enumerate() {
            let line_no = idx + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let Some((key, value)) = trimmed.split_once('=') else {
                return Err(CliError::Validation(format!(
                    "{display}:{line_no}: expected 'key = value'"
                )));
            };
            let key = key.trim();
            let value = value.trim();
            if !KNOWN_KEYS.contains(&key) {
                return Err(CliError::Validation(format!(
                    "{display}:{line_no}: unknown key '{key}'"
                )));
            }
            if entries
                .insert(key.to_string(), (value.to_string(), line_no))
                .is_some()
            {
                return Err(CliError::Validation(format!(
                    "{display}:{line_no}: duplicate key '{key}'"
                )));
            }
        }
        Ok(Self {
            path: display,
            entries,
        })
    }

    fn value_error(&self, key: &str, raw: &str, line: usize, expected: &str) -> CliError {
        CliError::Validation(format!(
            "{}:{line}: invalid value for {key}: '{raw}' (expected {expected})",
            self.path
        ))
    }

    fn parse_one<T: std::str::FromStr>(&self, key: &str, expected: &str) -> CliResult<Option<T>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some((raw, line)) => raw
                .parse()
                .map(Some)
                .map_err(|_| self.value_error(key, raw, *line, expected)),
        }
    }

    fn parse_f64_list(&self, key: &str) -> CliResult<Option<Vec<f64>>> {
        match self.entries.get(key) {
            None => Ok(None),
            Some((raw, line)) => {
                if raw.is_empty() {
                    return Err(self.value_error(key, raw, *line, "a non-empty number list"));
                }
                raw.split(',')
                    .map(|item| item.trim().parse::<f64>())
                    .collect::<Result<Vec<_>, _>>()
                    .map(Some)
                    .map_err(|_| self.value_error(key, raw, *line, "comma-separated numbers"))
            }
        }
    }
}

struct Resolver {
    file: Option<FileConfig>,
}

impl Resolver {
    fn new(config: Option<&PathBuf>) -> CliResult<Self> {
        let file = config.map(|p| FileConfig::load(p)).transpose()?;
        Ok(Self { file })
    }

    fn one<T: std::str::FromStr>(
        &self,
        key: &str,
        flag: Option<T>,
        expected: &str,
    ) -> CliResult<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match &self.file {
            Some(file) => file.parse_one(key, expected),
            None => Ok(None),
        }
    }

    fn f64(&self, key: &str, flag: Option<f64>, default: f64) -> CliResult<f64> {
        Ok(self.one(key, flag, "a number")?.unwrap_or(default))
    }

    fn f64_list(&self, key: &str, flag: &[f64], default: &[f64]) -> CliResult<Vec<f64>> {
        if !flag.is_empty() {
            return Ok(flag.to_vec());
        }
        if let Some(file) = &self.file {
            if let Some(values) = file.parse_f64_list(key)? {
                return Ok(values);
            }
        }
        Ok(default.to_vec())
    }

    fn string(&self, key: &str, flag: Option<&String>, default: &str) -> CliResult<String> {
        Ok(self
            .one(key, flag.cloned(), "a string")?
            .unwrap_or_else(|| default.to_string()))
    }
}

// ---------------------------------------------------------------------------
// Resolved settings
// ---------------------------------------------------------------------------

fn resolve_game(resolver: &Resolver, flags: &CommonFlags) -> CliResult<GameParams> {
    let lambda = resolver.f64("lambda", flags.lambda, 3.0)?;
    let delta_r = resolver.f64("delta_r", flags.delta_r, 3.0)?;
    let delta_b = resolver.f64("delta_b", flags.delta_b, 1.0)?;
    let delta_g = resolver.f64("delta_g", flags.delta_g, delta_r)?;
    Ok(GameParams::new(lambda, delta_r, delta_g, delta_b)?)
}

fn resolve_out(resolver: &Resolver, flags: &CommonFlags) -> CliResult<PathBuf> {
    let out = match &flags.out {
        Some(path) => path.clone(),
        None => PathBuf::from(resolver.string("out", None, "out")?),
    };
    fs::create_dir_all(&out).map_err(|e| {
        io_err(
            &format!("cannot create output directory {}", out.display()),
            e,
        )
    })?;
    Ok(out)
}

#[derive(Clone)]
struct DynamicsSettings {
    p0_list: Vec<f64>,
    dt: f64,
    horizon: f64,
    method: Method,
    modes: Vec<StrategyMode>,
}

fn resolve_dynamics(
    resolver: &Resolver,
    flags: &DynamicsFlags,
    default_horizon: f64,
) -> CliResult<DynamicsSettings> {
    let p0_list = resolver.f64_list("p0", &flags.p0, &[0.3, 0.7])?;
    let dt = resolver.f64("dt", flags.dt, dynamics::DEFAULT_DT)?;
    let horizon = resolver.f64("horizon", flags.horizon, default_horizon)?;
    let method: Method = resolver
        .string("method", flags.method.as_ref(), "rk4")?
        .parse()
        .map_err(CliError::Validation)?;
    let modes = match resolver
        .string("mode", flags.mode.as_ref(), "both")?
        .as_str()
    {
        "both" => vec![StrategyMode::Constrained, StrategyMode::Baseline],
        other => vec![other
            .parse::<StrategyMode>()
            .map_err(|e| CliError::Validation(format!("{e} (or both)")))?],
    };
    Ok(DynamicsSettings {
        p0_list,
        dt,
        horizon,
        method,
        modes,
    })
}

struct TopologySettings {
    topo: TopologyConfig,
    packets: u64,
    epochs: usize,
    rounds: usize,
}

fn resolve_topology(resolver: &Resolver, flags: &TopologyFlags) -> CliResult<TopologySettings> {
    let nodes = resolver
        .one("nodes", flags.nodes, "a positive integer")?
        .unwrap_or(50);
    let area = resolver.string("area", flags.area.as_ref(), "1000x1000")?;
    let (width, height) = parse_area(&area)?;
    let range = resolver.f64("range", flags.range, 150.0)?;
    let seed = resolver
        .one("seed", flags.seed, "an unsigned integer")?
        .unwrap_or(214);
    let packets = resolver
        .one("packets", flags.packets, "a positive integer")?
        .unwrap_or(10);
    let epochs = resolver
        .one("epochs", flags.epochs, "a positive integer")?
        .unwrap_or(50);
    let rounds = resolver
        .one("rounds", flags.rounds, "a positive integer")?
        .unwrap_or(10);
    let topo = TopologyConfig {
        n_nodes: nodes,
        area_width: width,
        area_height: height,
        tx_range: range,
        rng_seed: seed,
    };
    topo.validate()?;
    Ok(TopologySettings {
        topo,
        packets,
        epochs,
        rounds,
    })
}

fn parse_area(raw: &str) -> CliResult<(f64, f64)> {
    let invalid = || {
        CliError::Validation(format!(
            "invalid area '{raw}' (expected WxH, e.g. 1000x1000)"
        ))
    };
    let (w, h) = raw.split_once(['x', 'X']).ok_or_else(invalid)?;
    let width: f64 = w.trim().parse().map_err(|_| invalid())?;
    let height: f64 = h.trim().parse().map_err(|_| invalid())?;
    Ok((width, height))
}

// ---------------------------------------------------------------------------
// Formatting
// ---------------------------------------------------------------------------

/// Locale-free decimal with 9 significant digits.
pub fn fmt_float(x: f64) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    if x == 0.0 {
        return "0".to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (8 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

fn fmt_opt(value: Option<f64>) -> String {
    value.map_or_else(|| "nan".to_string(), fmt_float)
}

// ---------------------------------------------------------------------------
// analyze
// ---------------------------------------------------------------------------

fn cmd_analyze(args: &AnalyzeArgs) -> CliResult<i32> {
    let resolver = Resolver::new(args.common.config.as_ref())?;
    let params = resolve_game(&resolver, &args.common)?;
    params.require_viable()?;
    let out = resolve_out(&resolver, &args.common)?;

    let report = equilibrium_report(&params)?;
    let q_grid = default_mutant_grid();
    let eps_grid = default_epsilon_grid();
    let candidates = [0.0, report.p_t, 1.0];
    let classifications: Vec<EssClassification> = candidates
        .iter()
        .map(|&c| classify_ess(&params, c, &q_grid, &eps_grid))
        .collect::<Result<_, _>>()?;

    let analytic_barrier = |candidate: f64, q: f64| -> Option<f64> {
        report
            .ess_points
            .iter()
            .find(|e| e.p_star == candidate)
            .map(|e| e.barrier.eval(q))
    };

    let mut text = String::new();
    let _ = writeln!(
        text,
        "game parameters: lambda={} delta_r={} delta_g={} delta_b={}",
        fmt_float(params.lambda()),
        fmt_float(params.delta_r()),
        fmt_float(params.delta_g()),
        fmt_float(params.delta_b()),
    );
    let _ = writeln!(
        text,
        "threshold p_T = {} (interior mixed NE, not an ESS)",
        fmt_float(report.p_t)
    );
    let _ = writeln!(text, "fixed points: 0, {}, 1", fmt_float(report.p_t));
    for point in &report.ess_points {
        match point.barrier {
            dynamics::Barrier::Constant(value) => {
                let _ = writeln!(
                    text,
                    "ESS p* = {}: invasion barrier {}",
                    fmt_float(point.p_star),
                    fmt_float(value)
                );
            }
            dynamics::Barrier::InverseInMutant { coefficient } => {
                let _ = writeln!(
                    text,
                    "ESS p* = {}: invasion barrier min({} / q, 1); at q=1: {}",
                    fmt_float(point.p_star),
                    fmt_float(coefficient),
                    fmt_float(point.barrier.eval(1.0))
                );
            }
        }
    }

    let _ = writeln!(text, "empirical verification (sampled invasions):");
    let mut all_consistent = true;
    for classification in &classifications {
        let analytic_ess = report.is_ess(classification.candidate);
        let agree = analytic_ess == classification.is_ess;
        all_consistent &= agree;
        let _ = writeln!(
            text,
            "  candidate p* = {}: empirical {} | analytic {} | agree = {}",
            fmt_float(classification.candidate),
            if classification.is_ess {
                "ESS"
            } else {
                "not ESS"
            },
            if analytic_ess { "ESS" } else { "not ESS" },
            agree
        );
        if let Some(infimum) = classification.barrier_infimum() {
            let _ = writeln!(
                text,
                "    empirical barrier infimum over q grid = {}",
                fmt_float(infimum)
            );
        }
        for row in &classification.rows {
            let _ = writeln!(
                text,
                "    q = {}: empirical barrier = {} analytic = {}",
                fmt_float(row.mutant),
                fmt_opt(row.empirical_barrier),
                fmt_opt(analytic_barrier(classification.candidate, row.mutant)),
            );
        }
    }

    print!("{text}");
    let report_path = out.join("analysis.txt");
    fs::write(&report_path, &text)
        .map_err(|e| io_err(&format!("cannot write {}", report_path.display()), e))?;

    let csv_path = out.join("ess_empirical.csv");
    let mut csv = String::from("candidate,q,empirical_barrier,analytic_barrier\n");
    for classification in &classifications {
        for row in &classification.rows {
            let _ = writeln!(
                csv,
                "{},{},{},{}",
                fmt_float(classification.candidate),
                fmt_float(row.mutant),
                fmt_opt(row.empirical_barrier),
                fmt_opt(analytic_barrier(classification.candidate, row.mutant)),
            );
        }
    }
    fs::write(&csv_path, &csv)
        .map_err(|e| io_err(&format!("cannot write {}", csv_path.display()), e))?;
    println!("wrote {} and {}", report_path.display(), csv_path.display());

    if !all_consistent {
        return Err(CliError::Check(
            "analytic and empirical stability verdicts disagree".to_string(),
        ));
    }
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// replicator
// ---------------------------------------------------------------------------

fn integrate_mode(
    params: &GameParams,
    mode: StrategyMode,
    p0: f64,
    settings: &DynamicsSettings,
) -> crate::Result<Trajectory> {
    match mode {
        StrategyMode::Constrained => {
            dynamics::integrate(params, p0, settings.dt, settings.horizon, settings.method)
        }
        StrategyMode::Baseline => {
            dynamics::integrate_baseline(params, p0, settings.dt, settings.horizon, settings.method)
        }
    }
}

fn write_trajectory_csv(path: &Path, trajectory: &Trajectory) -> CliResult<()> {
    let file = fs::File::create(path)
        .map_err(|e| io_err(&format!("cannot write {}", path.display()), e))?;
    let mut w = BufWriter::new(file);
    let write = |w: &mut BufWriter<fs::File>| -> std::io::Result<()> {
        writeln!(w, "t,p,u_dove,u_hawk,u_mean,s_h_star")?;
        for s in &trajectory.samples {
            writeln!(
                w,
                "{},{},{},{},{},{}",
                fmt_float(s.t),
                fmt_float(s.p),
                fmt_float(s.u_dove),
                fmt_float(s.u_hawk),
                fmt_float(s.u_mean),
                fmt_float(s.s_h),
            )?;
        }
        w.flush()
    };
    write(&mut w).map_err(|e| io_err(&format!("cannot write {}", path.display()), e))
}

fn cmd_replicator(args: &ReplicatorArgs) -> CliResult<i32> {
    let resolver = Resolver::new(args.common.config.as_ref())?;
    let params = resolve_game(&resolver, &args.common)?;
    let settings = resolve_dynamics(&resolver, &args.dynamics, dynamics::DEFAULT_HORIZON)?;
    let out = resolve_out(&resolver, &args.common)?;

    for &p0 in &settings.p0_list {
        for &mode in &settings.modes {
            let trajectory = integrate_mode(&params, mode, p0, &settings)?;
            let path = out.join(format!("replicator_{mode}_p{p0}.csv"));
            write_trajectory_csv(&path, &trajectory)?;
            println!(
                "replicator {mode} p0={p0}: final_p={} converged={} -> {}",
                fmt_float(trajectory.final_p()),
                trajectory.converged,
                path.display()
            );
        }
    }
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// manet
// ---------------------------------------------------------------------------

/// Default simulation horizon; paired with the default 50 epochs it keeps
/// the class shares moving over a sizable prefix of the run while the
/// reference settings still settle well before the end.
pub const DEFAULT_MANET_HORIZON: f64 = 15.0;

fn write_manet_csv(path: &Path, records: &[crate::sim::RoundRecord]) -> CliResult<()> {
    let file = fs::File::create(path)
        .map_err(|e| io_err(&format!("cannot write {}", path.display()), e))?;
    let mut w = BufWriter::new(file);
    let write = |w: &mut BufWriter<fs::File>| -> std::io::Result<()> {
        writeln!(
            w,
            "epoch,t,p,s_d,s_h,requests,forwards,refusals,unreachable,\
             normalized_forwarded,mean_dove_reputation,mean_hawk_reputation,\
             cumulative_normalized"
        )?;
        for r in records {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                r.epoch,
                fmt_float(r.t),
                fmt_float(r.p),
                fmt_float(r.s_d),
                fmt_float(r.s_h),
                r.requests,
                r.forwards,
                r.refusals,
                r.unreachable,
                fmt_float(r.normalized_forwarded),
                fmt_opt(r.mean_dove_reputation),
                fmt_opt(r.mean_hawk_reputation),
                fmt_float(r.cumulative_normalized),
            )?;
        }
        w.flush()
    };
    write(&mut w).map_err(|e| io_err(&format!("cannot write {}", path.display()), e))
}

fn last_decile_mean(records: &[crate::sim::RoundRecord]) -> f64 {
    let tail = (records.len() / 10).max(1);
    let slice = &records[records.len() - tail..];
    slice.iter().map(|r| r.normalized_forwarded).sum::<f64>() / slice.len() as f64
}

fn cmd_manet(args: &ManetArgs) -> CliResult<i32> {
    let resolver = Resolver::new(args.common.config.as_ref())?;
    let params = resolve_game(&resolver, &args.common)?;
    let settings = resolve_dynamics(&resolver, &args.dynamics, DEFAULT_MANET_HORIZON)?;
    let topology = resolve_topology(&resolver, &args.topology)?;
    let out = resolve_out(&resolver, &args.common)?;

    for &p0 in &settings.p0_list {
        for &mode in &settings.modes {
            let sim_cfg = SimConfig {
                packets_per_node: topology.packets,
                epochs: topology.epochs,
                rounds_per_epoch: topology.rounds,
                mode,
                p0,
                dt: settings.dt,
                horizon: settings.horizon,
                method: settings.method,
            };
            let output = run_simulation(&topology.topo, &sim_cfg, &params)?;
            let path = out.join(format!("manet_{mode}_p{p0}.csv"));
            write_manet_csv(&path, &output.records)?;
            println!(
                "manet {mode} p0={p0}: final_p={} last_decile_normalized={} -> {}",
                fmt_float(output.trajectory.final_p()),
                fmt_float(last_decile_mean(&output.records)),
                path.display()
            );
        }
    }
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

#[derive(Clone, Copy)]
struct SweepCell {
    lambda: f64,
    delta_r: f64,
    delta_g: Option<f64>,
    delta_b: f64,
    p0: f64,
}

struct SweepRow {
    cell: SweepCell,
    delta_g: f64,
    p_t: f64,
    final_p: f64,
    predicted: f64,
    agrees: bool,
}

fn run_sweep_cell(cell: &SweepCell, settings: &DynamicsSettings) -> CliResult<SweepRow> {
    let delta_g = cell.delta_g.unwrap_or(cell.delta_r);
    let params =
        GameParams::new(cell.lambda, cell.delta_r, delta_g, cell.delta_b).map_err(|e| {
            CliError::Validation(format!(
                "sweep cell lambda={} delta_r={} delta_b={} p0={}: {e}",
                cell.lambda, cell.delta_r, cell.delta_b, cell.p0
            ))
        })?;
    let p_t = dynamics::threshold_p_t(&params)?;
    let predicted = dynamics::basin_prediction(&params, cell.p0)?;
    let trajectory = dynamics::integrate(
        &params,
        cell.p0,
        settings.dt,
        settings.horizon,
        settings.method,
    )?;
    let final_p = trajectory.final_p();
    let agrees = if predicted == 0.0 {
        final_p < 0.01
    } else if predicted == 1.0 {
        final_p > 0.99
    } else {
        (final_p - p_t).abs() < 1e-3
    };
    Ok(SweepRow {
        cell: *cell,
        delta_g,
        p_t,
        final_p,
        predicted,
        agrees,
    })
}

fn cmd_sweep(args: &SweepArgs) -> CliResult<i32> {
    let resolver = Resolver::new(args.config.as_ref())?;
    let lambdas = resolver.f64_list("lambda", &args.lambda, &[3.0])?;
    let delta_rs = resolver.f64_list("delta_r", &args.delta_r, &[3.0])?;
    let delta_bs = resolver.f64_list("delta_b", &args.delta_b, &[1.0])?;
    let p0s = resolver.f64_list("p0", &args.p0, &[0.3, 0.7])?;
    let delta_g = resolver.one("delta_g", args.delta_g, "a number")?;
    let dt = resolver.f64("dt", args.dt, dynamics::DEFAULT_DT)?;
    let horizon = resolver.f64("horizon", args.horizon, dynamics::DEFAULT_HORIZON)?;
    let method: Method = resolver
        .string("method", args.method.as_ref(), "rk4")?
        .parse()
        .map_err(CliError::Validation)?;
    let max_cells = resolver
        .one("max_cells", args.max_cells, "a positive integer")?
        .unwrap_or(10_000);
    let jobs = resolver.one("jobs", args.jobs, "a positive integer")?;
    let out = match &args.out {
        Some(path) => path.clone(),
        None => PathBuf::from(resolver.string("out", None, "out")?),
    };
    fs::create_dir_all(&out).map_err(|e| {
        io_err(
            &format!("cannot create output directory {}", out.display()),
            e,
        )
    })?;

    let settings = DynamicsSettings {
        p0_list: p0s.clone(),
        dt,
        horizon,
        method,
        modes: vec![StrategyMode::Constrained],
    };

    let mut cells = Vec::new();
    for &lambda in &lambdas {
        for &delta_r in &delta_rs {
            for &delta_b in &delta_bs {
                for &p0 in &p0s {
                    cells.push(SweepCell {
                        lambda,
                        delta_r,
                        delta_g,
                        delta_b,
                        p0,
                    });
                }
            }
        }
    }
    if cells.is_empty() {
        return Err(CliError::Validation("empty sweep range".to_string()));
    }
    if cells.len() > max_cells {
        return Err(CliError::Validation(format!(
            "sweep has {} cells, above the cap of {max_cells}; shrink the ranges or raise --max-cells",
            cells.len()
        )));
    }

    let run = |cells: &[SweepCell]| -> CliResult<Vec<SweepRow>> {
        cells
            .par_iter()
            .map(|cell| run_sweep_cell(cell, &settings))
            .collect()
    };
    let rows = match jobs {
        Some(jobs) => rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| CliError::Validation(format!("cannot build worker pool: {e}")))?
            .install(|| run(&cells)),
        None => run(&cells),
    }?;

    let path = out.join("sweep.csv");
    let file = fs::File::create(&path)
        .map_err(|e| io_err(&format!("cannot write {}", path.display()), e))?;
    let mut w = BufWriter::new(file);
    let write = |w: &mut BufWriter<fs::File>| -> std::io::Result<()> {
        writeln!(
            w,
            "lambda,delta_r,delta_g,delta_b,p0,p_t,final_p,predicted,agrees"
        )?;
        for row in &rows {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{}",
                fmt_float(row.cell.lambda),
                fmt_float(row.cell.delta_r),
                fmt_float(row.delta_g),
                fmt_float(row.cell.delta_b),
                fmt_float(row.cell.p0),
                fmt_float(row.p_t),
                fmt_float(row.final_p),
                fmt_float(row.predicted),
                row.agrees,
            )?;
        }
        w.flush()
    };
    write(&mut w).map_err(|e| io_err(&format!("cannot write {}", path.display()), e))?;

    let all_agree = rows.iter().all(|r| r.agrees);
    println!(
        "sweep: {} cells -> {} (basin agreement: {})",
        rows.len(),
        path.display(),
        all_agree
    );
    Ok(EXIT_OK)
}

// ---------------------------------------------------------------------------
// oracle-check
// ---------------------------------------------------------------------------

fn cmd_oracle_check(args: &OracleArgs) -> CliResult<i32> {
    let resolver = Resolver::new(args.common.config.as_ref())?;
    let params = resolve_game(&resolver, &args.common)?;
    params.require_viable()?;
    let grid_steps = resolver
        .one("grid_steps", args.grid_steps, "a positive integer")?
        .unwrap_or(1000);
    if grid_steps < 100 {
        return Err(CliError::Validation(format!(
            "grid_steps must be >= 100, got {grid_steps}"
        )));
    }
    let random_sets = resolver
        .one("random_sets", args.random_sets, "a non-negative integer")?
        .unwrap_or(5);
    let seed = resolver
        .one("seed", args.seed, "an unsigned integer")?
        .unwrap_or(214);

    let mut sets = vec![("configured".to_string(), params)];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..random_sets {
        sets.push((format!("random[{i}]"), GameParams::sample_viable(&mut rng)));
    }

    let tolerance = 1.0 / f64::from(grid_steps);
    let mut worst: f64 = 0.0;
    let mut all_s_d_ok = true;
    println!(
        "oracle-check: 101 shares in [0, 0.99], grid_steps = {grid_steps}, tolerance = {}",
        fmt_float(tolerance)
    );
    for (label, set) in &sets {
        let mut set_worst: f64 = 0.0;
        let mut s_d_ok = true;
        for k in 0..=100 {
            let p = 0.99 * f64::from(k) / 100.0;
            let closed = set.optimal_dove_strategy(p)?;
            let oracle = set.brute_force_dove_strategy(p, grid_steps)?;
            set_worst = set_worst.max((closed.s_h() - oracle.s_h()).abs());
            // At p = 0 the payoff ignores s_d, so only interior shares pin it.
            if p > 0.0 && oracle.s_d() != 1.0 {
                s_d_ok = false;
            }
        }
        println!(
            "  {label}: lambda={} delta_r={} delta_g={} delta_b={} max|delta s_h|={} s_d_ok={}",
            fmt_float(set.lambda()),
            fmt_float(set.delta_r()),
            fmt_float(set.delta_g()),
            fmt_float(set.delta_b()),
            fmt_float(set_worst),
            s_d_ok
        );
        worst = worst.max(set_worst);
        all_s_d_ok &= s_d_ok;
    }

    let pass = worst <= tolerance && all_s_d_ok;
    println!(
        "oracle-check: {} (max |delta s_h| = {} <= {})",
        if pass { "PASS" } else { "FAIL" },
        fmt_float(worst),
        fmt_float(tolerance)
    );
    if pass {
        Ok(EXIT_OK)
    } else {
        Err(CliError::Check(format!(
            "oracle deviation {} exceeds {} or s_d mismatch",
            fmt_float(worst),
            fmt_float(tolerance)
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting_has_nine_significant_digits() {
        assert_eq!(fmt_float(0.0), "0");
        assert_eq!(fmt_float(0.1), "0.100000000");
        assert_eq!(fmt_float(1.0), "1.00000000");
        assert_eq!(fmt_float(-0.25), "-0.250000000");
        assert_eq!(fmt_float(123.456), "123.456000");
        assert_eq!(fmt_float(f64::NAN), "nan");
        // Round-trips exactly at this precision for the magnitudes we emit.
        for x in [0.1, 1.0 / 3.0, 0.166666666666, 42.0, 1e-6] {
            let parsed: f64 = fmt_float(x).parse().unwrap();
            assert!((parsed - x).abs() <= 1e-9 * x.abs().max(1.0));
        }
    }

    #[test]
    fn area_parsing() {
        assert_eq!(parse_area("1000x1000").unwrap(), (1000.0, 1000.0));
        assert_eq!(parse_area("800X600").unwrap(), (800.0, 600.0));
        assert!(parse_area("1000").is_err());
        assert!(parse_area("ax b").is_err());
    }
}
