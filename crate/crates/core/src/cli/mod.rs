//! Batch front end: `mlhr-opt <sample|optimize|map|drive> --config <path>`.
//!
//! Exit codes: 0 success, 2 configuration or precondition, 3 optimiser,
//! 4 map, 5 drive-cycle ingestion.

mod config;

use std::ffi::OsString;
use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use clap::{Parser, ValueEnum};
use serde_json::json;

pub use config::{AxisSpec, DriveSection, MapSection, OptimizeSection, ProblemKind, RunConfig, SampleSection};

use crate::motor::{Bound, MachineParams};
use crate::numfmt::{round9, sig9};
use crate::optimizer::{
    archive_front, front_json, nsga2_run, write_history_csv, Evaluation, MagnetProblem, MlhrSamplerConfig,
    Nsga2Config, Problem, RunFailure, RunOutput, Sampler, Zdt1,
};
use crate::sampling::{lhs_init, lhs_optimize, PHI_P, PHI_T};
use crate::trajectory::{build_map, premium_region_stats, tpca, TorqueSpeedMap};
use crate::vehicle::{cycle_operating_points, drivability, write_points_csv, DriveCycle};
use crate::Error;

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_OPTIMIZER: i32 = 3;
pub const EXIT_MAP: i32 = 4;
pub const EXIT_INGEST: i32 = 5;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Space-filling design matrix.
    Sample,
    /// NSGA-II run (and optional paired sampler comparison).
    Optimize,
    /// Torque-speed map, TPCA and premium-efficiency statistics.
    Map,
    /// Drive-cycle operating points and drivability limits.
    Drive,
}

#[derive(Debug, Parser)]
#[command(name = "mlhr-opt", version, about = "Motor mapping, magnet sizing and drivability toolkit")]
pub struct Args {
    #[arg(value_enum)]
    pub command: Command,
    /// JSON run configuration; relative paths inside resolve against its directory.
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; 1 guarantees bit-reproducible runs.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Output directory; defaults to the config's `output_dir`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// A failure carrying the process exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn new(code: i32, message: impl Display) -> Self {
        CliError { code, message: message.to_string() }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn config_err(e: impl Display) -> CliError {
    CliError::new(EXIT_CONFIG, e)
}

fn init_logging() {
    let level = match std::env::var("MLHR_OPT_LOG").as_deref() {
        Ok("quiet") => log::LevelFilter::Off,
        Ok("info") => log::LevelFilter::Info,
        Ok("debug") => log::LevelFilter::Debug,
        _ => log::LevelFilter::Warn,
    };
    // a second call (e.g. in tests) keeps the first logger
    let _ = env_logger::Builder::new().filter_level(level).format_timestamp(None).try_init();
}

/// Parses arguments, runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    init_logging();
    match execute(&args) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}

pub fn execute(args: &Args) -> CliResult<()> {
    let cfg = RunConfig::load(&args.config).map_err(config_err)?;
    let out = match &args.out {
        Some(p) => p.clone(),
        None => cfg.resolve(&cfg.output_dir),
    };
    let seed = args.seed.or(cfg.seed);
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(w) = args.workers {
        if w == 0 {
            return Err(config_err("--workers must be >= 1"));
        }
        pool = pool.num_threads(w);
    }
    let pool = pool.build().map_err(config_err)?;
    pool.install(|| {
        fs::create_dir_all(&out).map_err(|e| config_err(format!("cannot create {}: {e}", out.display())))?;
        match args.command {
            Command::Sample => cmd_sample(&cfg, seed, &out),
            Command::Optimize => cmd_optimize(&cfg, seed, &out),
            Command::Map => cmd_map(&cfg, &out),
            Command::Drive => cmd_drive(&cfg, &out),
        }
    })
}

fn write_file(path: &Path, bytes: &[u8]) -> CliResult<()> {
    fs::write(path, bytes).map_err(|e| config_err(format!("cannot write {}: {e}", path.display())))
}

fn write_json(path: &Path, value: &serde_json::Value) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(config_err)?;
    text.push('\n');
    write_file(path, text.as_bytes())
}

fn require_seed(seed: Option<u64>) -> CliResult<u64> {
    seed.ok_or_else(|| config_err("a seed is required (config `seed` or --seed)"))
}

/// Writes an optimised Latin hypercube in unit coordinates to `samples.csv`.
pub fn cmd_sample(cfg: &RunConfig, seed: Option<u64>, out: &Path) -> CliResult<()> {
    let seed = require_seed(seed)?;
    let s = &cfg.sample;
    if s.n < 2 {
        return Err(config_err(format!("need n ≥ 2, got {}", s.n)));
    }
    if s.dims == 0 {
        return Err(config_err("need dims ≥ 1"));
    }
    let x = lhs_init(s.n, s.dims, seed).map_err(config_err)?;
    let opt = lhs_optimize(&x, s.iterations, seed.wrapping_add(1), PHI_P, PHI_T).map_err(config_err)?;
    let mut csv = (1..=s.dims).map(|k| format!("x{k}")).collect::<Vec<_>>().join(",");
    csv.push('\n');
    for row in &opt.x {
        csv.push_str(&row.iter().map(|v| sig9(*v)).collect::<Vec<_>>().join(","));
        csv.push('\n');
    }
    write_file(&out.join("samples.csv"), csv.as_bytes())?;
    println!("phi_p before: {}", sig9(opt.phi_initial));
    println!("phi_p after: {}", sig9(opt.phi_final()));
    Ok(())
}

/// Counts evaluator calls and fails on a chosen one.
struct FaultInjector<'a> {
    inner: &'a dyn Problem,
    fail_on: usize,
    calls: AtomicUsize,
}

impl Problem for FaultInjector<'_> {
    fn bounds(&self) -> Vec<Bound> {
        self.inner.bounds()
    }

    fn n_obj(&self) -> usize {
        self.inner.n_obj()
    }

    fn evaluate(&self, x: &[f64]) -> crate::Result<Evaluation> {
        let call = self.calls.fetch_add(1, Ordering::SeqCst) + 1;
        if call >= self.fail_on {
            return Err(Error::Evaluation(format!("injected failure on evaluation {call}")));
        }
        self.inner.evaluate(x)
    }

    fn reference_point(&self) -> Option<Vec<f64>> {
        self.inner.reference_point()
    }
}

fn build_problem(cfg: &RunConfig) -> CliResult<Box<dyn Problem>> {
    Ok(match cfg.optimize.problem {
        ProblemKind::Zdt1 => Box::new(Zdt1::default()),
        ProblemKind::Magnet => {
            let (speeds, torques) = match &cfg.optimize.map {
                Some(m) => (m.speed.values().map_err(config_err)?, m.torque.values().map_err(config_err)?),
                None => MagnetProblem::default_axes(),
            };
            let mut p = MagnetProblem::new(cfg.model(), cfg.design_vector(), speeds, torques).map_err(config_err)?;
            if let Some(m) = &cfg.optimize.map {
                p.threshold = m.threshold;
            }
            Box::new(p)
        }
    })
}

/// First generation and evaluation count at which `run` reaches `target`.
fn reach(run: &RunOutput, target: f64) -> (Option<usize>, Option<usize>) {
    match run.reached(target) {
        Some(r) => (Some(r.generation), Some(r.true_evals)),
        None => (None, None),
    }
}

fn opt_cell(v: Option<usize>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn write_history(out: &Path, name: &str, history: &[crate::optimizer::HistoryRow]) -> CliResult<()> {
    let mut buf = Vec::new();
    write_history_csv(history, &mut buf).map_err(config_err)?;
    write_file(&out.join(name), &buf)
}

fn run_or_fail(problem: &dyn Problem, cfg: &Nsga2Config, sampler: &Sampler, out: &Path, history_name: &str) -> CliResult<RunOutput> {
    nsga2_run(problem, cfg, sampler).map_err(|RunFailure { error, history }| {
        if let Err(e) = write_history(out, history_name, &history) {
            return e;
        }
        CliError::new(EXIT_OPTIMIZER, format!("optimisation aborted after {} generations: {error}", history.len()))
    })
}

/// Runs NSGA-II with the configured sampler and, if seeds are listed, a
/// paired plain-vs-MLHR comparison.
pub fn cmd_optimize(cfg: &RunConfig, seed: Option<u64>, out: &Path) -> CliResult<()> {
    let seed = require_seed(seed)?;
    let o = &cfg.optimize;
    if !(o.target_fraction > 0.0 && o.target_fraction <= 1.0) {
        return Err(config_err(format!("target_fraction must lie in (0, 1], got {}", o.target_fraction)));
    }
    let nsga = Nsga2Config { seed, ..o.nsga2.clone() };
    nsga.validate().map_err(config_err)?;
    let base = build_problem(cfg)?;
    let injected;
    let problem: &dyn Problem = match o.fail_on_evaluation {
        Some(k) => {
            injected = FaultInjector { inner: base.as_ref(), fail_on: k.max(1), calls: AtomicUsize::new(0) };
            &injected
        }
        None => base.as_ref(),
    };

    let run = run_or_fail(problem, &nsga, &o.sampler, out, "history.csv")?;
    write_history(out, "history.csv", &run.history)?;
    write_json(&out.join("front.json"), &front_json(&run.front))?;
    write_json(&out.join("archive.json"), &front_json(&archive_front(problem, &run)))?;
    let final_hv = run.history.last().map_or(0.0, |h| h.hypervolume);
    let (gens, evals) = reach(&run, o.target_fraction * final_hv);
    let summary = format!("generations_to_target,true_evals\n{},{}\n", opt_cell(gens), opt_cell(evals));
    write_file(&out.join("summary.csv"), summary.as_bytes())?;
    print!("{summary}");

    if !o.compare_seeds.is_empty() {
        let mlhr = match &o.sampler {
            Sampler::Mlhr(c) => Sampler::Mlhr(c.clone()),
            Sampler::PlainLhs => Sampler::Mlhr(MlhrSamplerConfig::default()),
        };
        let mut csv = String::from("seed,target_hypervolume,plain_generations,plain_true_evals,mlhr_generations,mlhr_true_evals\n");
        let mut wins = 0;
        for &s in &o.compare_seeds {
            let c = Nsga2Config { seed: s, ..o.nsga2.clone() };
            let plain = run_or_fail(problem, &c, &Sampler::PlainLhs, out, "history_failed.csv")?;
            let target = o.target_fraction * plain.history.last().map_or(0.0, |h| h.hypervolume);
            let (pg, pe) = reach(&plain, target);
            let c = Nsga2Config { stop_at_hypervolume: Some(target), ..c };
            let assisted = run_or_fail(problem, &c, &mlhr, out, "history_failed.csv")?;
            let (mg, me) = reach(&assisted, target);
            if let (Some(m), Some(p)) = (me, pe) {
                wins += usize::from(m < p);
            }
            csv.push_str(&format!(
                "{s},{},{},{},{},{}\n",
                sig9(target),
                opt_cell(pg),
                opt_cell(pe),
                opt_cell(mg),
                opt_cell(me)
            ));
        }
        write_file(&out.join("comparison.csv"), csv.as_bytes())?;
        println!("mlhr used fewer true evaluations in {wins}/{} seeds", o.compare_seeds.len());
    }
    Ok(())
}

fn map_of(cfg: &RunConfig, m: &MachineParams) -> CliResult<TorqueSpeedMap> {
    let speeds = cfg.map.speed.values().map_err(config_err)?;
    let torques = cfg.map.torque.values().map_err(config_err)?;
    let map = build_map(m, &speeds, &torques).map_err(|e| CliError::new(EXIT_MAP, e))?;
    if map.feasible_count() == 0 {
        return Err(CliError::new(EXIT_MAP, "map has an empty feasible set"));
    }
    Ok(map)
}

/// Writes `map.csv`, `tpca.json` and `premium.json`.
pub fn cmd_map(cfg: &RunConfig, out: &Path) -> CliResult<()> {
    let m = cfg.resolve_machine().map_err(config_err)?;
    if !(0.0..=1.0).contains(&cfg.map.threshold) {
        return Err(config_err(format!("threshold must lie in [0, 1], got {}", cfg.map.threshold)));
    }
    let map = map_of(cfg, &m)?;
    let mut buf = Vec::new();
    map.write_csv(&mut buf).map_err(config_err)?;
    write_file(&out.join("map.csv"), &buf)?;
    let report = tpca(&map).map_err(|e| CliError::new(EXIT_MAP, e))?;
    write_json(
        &out.join("tpca.json"),
        &json!({
            "low": round9(report.low),
            "accelerating": round9(report.accelerating),
            "high": round9(report.high),
            "total": round9(report.total),
            "empty_regions": report.empty_regions,
        }),
    )?;
    let stats = premium_region_stats::<(f64, f64)>(&map, &[], cfg.map.threshold).map_err(|e| CliError::new(EXIT_MAP, e))?;
    let premium_cells = map.cells.iter().flatten().filter(|op| op.eta >= cfg.map.threshold).count();
    write_json(
        &out.join("premium.json"),
        &json!({
            "threshold": round9(stats.threshold),
            "area_fraction": round9(stats.area_fraction),
            "premium_cells": premium_cells,
            "feasible_cells": map.feasible_count(),
            "total_cells": map.cells.len(),
        }),
    )?;
    println!("tpca total: {}", sig9(report.total));
    println!("premium area fraction: {}", sig9(stats.area_fraction));
    Ok(())
}

fn load_cycle(cfg: &RunConfig, spec: &str) -> CliResult<(String, DriveCycle)> {
    if let Some(c) = DriveCycle::bundled(spec) {
        return Ok((spec.to_string(), c));
    }
    let path = cfg.resolve(Path::new(spec));
    let name = path.file_stem().map_or_else(|| "cycle".to_string(), |s| s.to_string_lossy().into_owned());
    let cycle = DriveCycle::from_path(&path).map_err(|e| match e {
        Error::Parse { line, message } => CliError::new(EXIT_INGEST, format!("{}: line {line}: {message}", path.display())),
        other => CliError::new(EXIT_INGEST, format!("{}: {other}", path.display())),
    })?;
    Ok((name, cycle))
}

/// Writes `<cycle>_points.csv` per cycle and `drivability.json`.
pub fn cmd_drive(cfg: &RunConfig, out: &Path) -> CliResult<()> {
    let m = cfg.resolve_machine().map_err(config_err)?;
    cfg.vehicle.validate().map_err(config_err)?;
    if cfg.drive.cycles.is_empty() {
        return Err(config_err("drive.cycles is empty"));
    }
    let cycles = cfg.drive.cycles.iter().map(|c| load_cycle(cfg, c)).collect::<CliResult<Vec<_>>>()?;
    let map = map_of(cfg, &m)?;
    let limits = drivability(&cfg.vehicle).map_err(config_err)?;
    let mut per_cycle = Vec::new();
    for (name, cycle) in &cycles {
        let points = cycle_operating_points(&cfg.vehicle, &m, cycle)
            .map_err(|e| CliError::new(EXIT_INGEST, format!("{name}: {e}")))?;
        let mut buf = Vec::new();
        write_points_csv(&points, &mut buf).map_err(config_err)?;
        write_file(&out.join(format!("{name}_points.csv")), &buf)?;
        let query: Vec<(f64, f64)> = points.iter().map(|p| (p.omega_mech, p.torque)).collect();
        let stats = premium_region_stats(&map, &query, cfg.map.threshold).map_err(|e| CliError::new(EXIT_MAP, e))?;
        println!("{name}: {}/{} points in premium region", stats.count_in_premium, stats.total_points);
        per_cycle.push(json!({
            "cycle": name,
            "total_points": stats.total_points,
            "feasible_points": points.iter().filter(|p| p.feasible).count(),
            "count_in_premium": stats.count_in_premium,
        }));
    }
    write_json(
        &out.join("drivability.json"),
        &json!({
            "a_x_max": round9(limits.a_x_max),
            "theta_max_deg": round9(limits.theta_max),
            "premium_threshold": round9(cfg.map.threshold),
            "cycles": per_cycle,
        }),
    )?;
    println!("a_x_max: {} m/s^2", sig9(limits.a_x_max));
    println!("theta_max: {} deg", sig9(limits.theta_max));
    Ok(())
}
