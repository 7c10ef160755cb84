//! Command-line front end: resolves configuration from defaults, the
//! `TELESIM_SEED` environment fallback, an optional flat config file and
//! flags (flags win), dispatches the experiment, and emits byte-stable JSON
//! reports or CSV fringe tables.
//!
//! Exit codes: 0 success, 2 usage errors (unknown flags), 3 invalid
//! configuration values (named constraint), 4 unwritable output, 1 other
//! runtime failures.

pub mod config;
pub mod report;

use std::ffi::OsString;
use std::fs;
use std::io;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use config::{parse_setting, uniform_efficiency, Experiment, Format, Mode, RunConfig};
use report::{obj, render_fringe_csv, render_json, write_atomic, Json};
use telesim_core::experiments::{
    build_swap_circuit, build_teleport_circuit, calibrate_swap_visibility,
    calibrate_teleport_fidelity, fit_count_fringe, haar_average_fidelity, random_photon_baseline,
    run_monte_carlo, run_swap_exact, run_teleport_exact, swap_source, teleport_source,
    Calibration, CountTable, ExperimentReport, FringePoint, SwapConfig, TeleportConfig,
};
use telesim_core::metrics::{assess, fidelity_from_visibility, Assessment, CLASSICAL_FIDELITY_BOUND};

/// Dispatch failure with its exit code.
#[derive(Debug)]
pub enum CliError {
    /// Invalid configuration value; exit 3.
    Config(String),
    /// Output path failure; exit 4.
    Output(io::Error),
    /// Any other runtime failure; exit 1.
    Runtime(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Output(e) => write!(f, "output error: {e}"),
            CliError::Runtime(msg) => write!(f, "error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl CliError {
    pub fn config(msg: String) -> Self {
        CliError::Config(msg)
    }

    fn from_core_config(e: telesim_core::Error) -> Self {
        CliError::Config(e.to_string())
    }

    fn from_core_runtime(e: telesim_core::Error) -> Self {
        CliError::Runtime(e.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 3,
            CliError::Output(_) => 4,
            CliError::Runtime(_) => 1,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "telesim",
    version,
    about = "Photonic teleportation and entanglement-swapping simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Teleport a polarization qubit through the dual-pass circuit
    Teleport(TeleportArgs),
    /// Swap entanglement onto the two never-interacting photons
    Swap(SwapArgs),
    /// Haar-averaged classical measure-and-resend fidelity (the 2/3 bound)
    BaselineClassical(CommonArgs),
    /// Theta scan with Bob's photon replaced by a random polarization
    BaselineRandom(CommonArgs),
    /// Bisect the mode overlap against a target fidelity or visibility
    Calibrate(CalibrateArgs),
}

#[derive(Args, Clone, Default)]
struct CommonArgs {
    /// Flat `key = value` config file; flags override its entries
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// exact | mc
    #[arg(long)]
    mode: Option<String>,
    /// Monte Carlo pulses (or baseline samples)
    #[arg(long)]
    trials: Option<String>,
    /// RNG seed; TELESIM_SEED is the fallback when absent
    #[arg(long)]
    seed: Option<String>,
    /// Mode overlap v in [0, 1]
    #[arg(long, value_name = "V")]
    overlap: Option<String>,
    /// Pair-creation amplitude per pass, in [0, 0.2] (sets both passes)
    #[arg(long, value_name = "X")]
    chi: Option<String>,
    /// Uniform detector efficiency in [0, 1]
    #[arg(long, value_name = "E")]
    efficiency: Option<String>,
    /// Output file (stdout when absent); written via write-then-rename
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// json | csv (csv needs fringe data: swap or baseline-random)
    #[arg(long)]
    format: Option<String>,
    /// Print the merged configuration and exit without running
    #[arg(long)]
    dump_config: bool,
}

#[derive(Args, Clone)]
struct TeleportArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Input qubit: h | v | plus45 | minus45 | r
    #[arg(long)]
    setting: Option<String>,
    /// Calibrate the overlap so the exact run reports this fidelity
    #[arg(long, value_name = "F")]
    calibrate_fidelity: Option<String>,
}

#[derive(Args, Clone)]
struct SwapArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Number of polarizer angles covering [0, pi)
    #[arg(long, value_name = "N")]
    theta_steps: Option<String>,
    /// Calibrate the overlap so the fringe shows this visibility
    #[arg(long, value_name = "V")]
    calibrate_visibility: Option<String>,
}

#[derive(Args, Clone)]
struct CalibrateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Target teleportation fidelity (runs the teleport experiment)
    #[arg(long, value_name = "F")]
    target_fidelity: Option<String>,
    /// Target fringe visibility (runs the swapping experiment)
    #[arg(long, value_name = "V")]
    target_visibility: Option<String>,
}

/// Parses argv and runs; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            match &e {
                CliError::Config(msg) => eprintln!("config error: {msg}"),
                CliError::Output(err) => eprintln!("output error: {err}"),
                CliError::Runtime(msg) => eprintln!("error: {msg}"),
            }
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Teleport(args) => {
            let mut cfg = resolve(Experiment::Teleport, &args.common)?;
            if let Some(s) = &args.setting {
                cfg.apply("setting", s)?;
            }
            if let Some(f) = &args.calibrate_fidelity {
                cfg.apply("target_fidelity", f)?;
            }
            cfg.validate()?;
            if args.common.dump_config {
                return emit_text(&cfg.out.clone(), &cfg.to_string());
            }
            run_teleport(cfg)
        }
        Command::Swap(args) => {
            let mut cfg = resolve(Experiment::Swap, &args.common)?;
            if let Some(n) = &args.theta_steps {
                cfg.apply("theta_steps", n)?;
            }
            if let Some(v) = &args.calibrate_visibility {
                cfg.apply("target_visibility", v)?;
            }
            cfg.validate()?;
            if args.common.dump_config {
                return emit_text(&cfg.out.clone(), &cfg.to_string());
            }
            run_swap(cfg)
        }
        Command::BaselineClassical(common) => {
            let cfg = resolve_validated(Experiment::BaselineClassical, &common)?;
            if common.dump_config {
                return emit_text(&cfg.out.clone(), &cfg.to_string());
            }
            run_baseline_classical(cfg)
        }
        Command::BaselineRandom(common) => {
            let cfg = resolve_validated(Experiment::BaselineRandom, &common)?;
            if common.dump_config {
                return emit_text(&cfg.out.clone(), &cfg.to_string());
            }
            run_baseline_random(cfg)
        }
        Command::Calibrate(args) => {
            let mut cfg = resolve(Experiment::Calibrate, &args.common)?;
            if let Some(f) = &args.target_fidelity {
                cfg.apply("target_fidelity", f)?;
            }
            if let Some(v) = &args.target_visibility {
                cfg.apply("target_visibility", v)?;
            }
            cfg.validate()?;
            if args.common.dump_config {
                return emit_text(&cfg.out.clone(), &cfg.to_string());
            }
            run_calibrate(cfg)
        }
    }
}

fn resolve(experiment: Experiment, common: &CommonArgs) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::defaults(experiment);
    cfg.apply_env_seed()?;
    if let Some(path) = &common.config {
        let text = fs::read_to_string(path).map_err(|e| {
            CliError::config(format!("cannot read config file {}: {e}", path.display()))
        })?;
        cfg.apply_file(&text, &path.display().to_string())?;
    }
    cfg.experiment = experiment;
    for (key, value) in [
        ("mode", &common.mode),
        ("trials", &common.trials),
        ("seed", &common.seed),
        ("overlap_v", &common.overlap),
        ("chi", &common.chi),
        ("efficiency", &common.efficiency),
        ("format", &common.format),
    ] {
        if let Some(v) = value {
            cfg.apply(key, v)?;
        }
    }
    if let Some(out) = &common.out {
        cfg.out = Some(out.clone());
    }
    Ok(cfg)
}

fn resolve_validated(experiment: Experiment, common: &CommonArgs) -> Result<RunConfig, CliError> {
    let cfg = resolve(experiment, common)?;
    cfg.validate()?;
    Ok(cfg)
}

const TELEPORT_DETECTORS: [&str; 5] = ["p", "f1", "f2", "d1", "d2"];
const SWAP_DETECTORS: [&str; 5] = ["f1", "f2", "D3plus", "D3minus", "D4"];

fn teleport_experiment_config(cfg: &RunConfig, overlap: f64) -> Result<TeleportConfig, CliError> {
    Ok(TeleportConfig {
        input: parse_setting(&cfg.setting)?,
        source: teleport_source(cfg.chi_forward, cfg.chi_return, overlap)
            .map_err(CliError::from_core_config)?,
        detector_efficiency: uniform_efficiency(&TELEPORT_DETECTORS, cfg.efficiency),
        dark_click: Default::default(),
        analysis: None,
    })
}

fn swap_experiment_config(cfg: &RunConfig, overlap: f64) -> Result<SwapConfig, CliError> {
    let mut scfg = SwapConfig::ideal();
    scfg.source = swap_source(cfg.chi_forward, cfg.chi_return, overlap)
        .map_err(CliError::from_core_config)?;
    scfg.detector_efficiency = uniform_efficiency(&SWAP_DETECTORS, cfg.efficiency);
    scfg = scfg.with_theta_steps(cfg.theta_steps).map_err(CliError::from_core_config)?;
    Ok(scfg)
}

fn run_teleport(cfg: RunConfig) -> Result<(), CliError> {
    let mut overlap = cfg.overlap_v;
    let mut calibration = None;
    if let Some(target) = cfg.target_fidelity {
        let base = teleport_experiment_config(&cfg, overlap)?;
        let cal =
            calibrate_teleport_fidelity(&base, target).map_err(CliError::from_core_config)?;
        overlap = cal.overlap_v;
        calibration = Some(cal);
    }
    let tcfg = teleport_experiment_config(&cfg, overlap)?;
    let mut report = run_teleport_exact(&tcfg).map_err(CliError::from_core_runtime)?;

    let counts = match cfg.mode {
        Mode::Exact => None,
        Mode::MonteCarlo => {
            let circuit = build_teleport_circuit(&tcfg).map_err(CliError::from_core_runtime)?;
            let table = run_monte_carlo(&circuit, cfg.trials, cfg.seed, true);
            let n3 = count_superset(&table, &["p", "f1", "f2"]);
            let n_d1 = count_superset(&table, &["p", "f1", "f2", "d1"]);
            let n_d2 = count_superset(&table, &["p", "f1", "f2", "d2"]);
            report.threefold_prob =
                table.restriction * n3 as f64 / table.trials.max(1) as f64;
            if n_d1 + n_d2 > 0 {
                let total = (n_d1 + n_d2) as f64;
                report.fidelity = Some(n_d1 as f64 / total);
                report.visibility = Some((n_d1 as f64 - n_d2 as f64) / total);
            } else {
                report.fidelity = None;
                report.visibility = None;
            }
            Some(table)
        }
    };
    let assessment = assess(&report);
    let json = report_json(&cfg, &report, &assessment, calibration.as_ref(), counts.as_ref());
    emit(&cfg, json, None)
}

fn run_swap(cfg: RunConfig) -> Result<(), CliError> {
    let mut overlap = cfg.overlap_v;
    let mut calibration = None;
    if let Some(target) = cfg.target_visibility {
        let base = swap_experiment_config(&cfg, overlap)?;
        let cal = calibrate_swap_visibility(&base, target).map_err(CliError::from_core_config)?;
        overlap = cal.overlap_v;
        calibration = Some(cal);
    }
    let scfg = swap_experiment_config(&cfg, overlap)?;
    let mut report = run_swap_exact(&scfg).map_err(CliError::from_core_runtime)?;

    let counts = match cfg.mode {
        Mode::Exact => None,
        Mode::MonteCarlo => {
            let (points, table_total) = swap_monte_carlo(&cfg, &scfg)?;
            let fit = fit_count_fringe(&points).map_err(CliError::from_core_runtime)?;
            report.visibility = Some(fit);
            report.fidelity = Some(
                fidelity_from_visibility(fit.clamp(0.0, 1.0))
                    .map_err(CliError::from_core_runtime)?,
            );
            report.fringe = Some(
                points
                    .iter()
                    .map(|p| FringePoint {
                        theta: p.theta,
                        rate_plus: p.rate_plus,
                        rate_minus: p.rate_minus,
                    })
                    .collect(),
            );
            report.threefold_prob = table_total;
            None
        }
    };

    let assessment = assess(&report);
    let csv = report.fringe.as_ref().map(|points| {
        render_fringe_csv(
            &points
                .iter()
                .map(|p| (p.theta, p.rate_plus, p.rate_minus))
                .collect::<Vec<_>>(),
        )
    });
    let json = report_json(&cfg, &report, &assessment, calibration.as_ref(), counts.as_ref());
    emit(&cfg, json, csv)
}

/// Per-angle Monte Carlo scan; each angle gets an independent stream derived
/// from (seed, angle index). Returns estimated per-pulse rates plus the
/// estimated herald probability.
fn swap_monte_carlo(
    cfg: &RunConfig,
    scfg: &SwapConfig,
) -> Result<(Vec<telesim_core::experiments::CountFringePoint>, f64), CliError> {
    let mut points = Vec::with_capacity(scfg.thetas.len());
    let mut herald_acc = 0.0;
    for (i, &theta) in scfg.thetas.iter().enumerate() {
        let circuit = build_swap_circuit(scfg, theta).map_err(CliError::from_core_runtime)?;
        let seed = cfg.seed ^ (i as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
        let table = run_monte_carlo(&circuit, cfg.trials, seed, true);
        let scale = table.restriction / table.trials.max(1) as f64;
        let n_plus = count_superset(&table, &["f1", "f2", "D3plus", "D4"]);
        let n_minus = count_superset(&table, &["f1", "f2", "D3minus", "D4"]);
        let n_herald = count_superset(&table, &["f1", "f2"]);
        herald_acc += n_herald as f64 * scale;
        points.push(telesim_core::experiments::CountFringePoint {
            theta,
            rate_plus: n_plus as f64 * scale,
            rate_minus: n_minus as f64 * scale,
            counts_plus: n_plus,
            counts_minus: n_minus,
        });
    }
    Ok((points, herald_acc / scfg.thetas.len() as f64))
}

fn run_baseline_classical(cfg: RunConfig) -> Result<(), CliError> {
    let fidelity = haar_average_fidelity(cfg.trials, cfg.seed);
    let json = obj(vec![
        ("experiment", Json::Str(cfg.experiment.as_str().into())),
        ("mode", Json::Str("mc".into())),
        ("seed", Json::Int(cfg.seed)),
        ("trials", Json::Int(cfg.trials)),
        ("fidelity", Json::Num(fidelity)),
        ("efficiency", Json::Null),
        ("crosstalk_rejection", Json::Null),
        ("visibility", Json::Null),
        ("beats_classical", Json::Bool(fidelity > CLASSICAL_FIDELITY_BOUND)),
        ("beats_classical_visibility", Json::Bool(false)),
        ("bell_violating", Json::Bool(false)),
        ("threefold_prob", Json::Null),
        ("classical_bound", Json::Num(CLASSICAL_FIDELITY_BOUND)),
    ]);
    emit(&cfg, json, None)
}

fn run_baseline_random(cfg: RunConfig) -> Result<(), CliError> {
    if cfg.mode == Mode::MonteCarlo {
        return Err(CliError::config(
            "baseline-random supports exact mode only".into(),
        ));
    }
    let scfg = swap_experiment_config(&cfg, cfg.overlap_v)?;
    let points = random_photon_baseline(&scfg).map_err(CliError::from_core_runtime)?;
    let pairs: Vec<(f64, f64)> = points.iter().map(|p| (p.theta, p.rate_plus)).collect();
    let visibility = telesim_core::metrics::fit_fringe(&pairs)
        .map_err(CliError::from_core_runtime)?
        .visibility;
    let csv = render_fringe_csv(
        &points
            .iter()
            .map(|p| (p.theta, p.rate_plus, p.rate_minus))
            .collect::<Vec<_>>(),
    );
    let json = obj(vec![
        ("experiment", Json::Str(cfg.experiment.as_str().into())),
        ("mode", Json::Str(cfg.mode.as_str().into())),
        ("seed", Json::Int(cfg.seed)),
        ("overlap_v", Json::Num(cfg.overlap_v)),
        ("fidelity", Json::Num(0.5)),
        ("efficiency", Json::Null),
        ("crosstalk_rejection", Json::Null),
        ("visibility", Json::Num(visibility)),
        ("beats_classical", Json::Bool(false)),
        ("beats_classical_visibility", Json::Bool(false)),
        ("bell_violating", Json::Bool(false)),
        ("threefold_prob", Json::Null),
        (
            "fringe",
            Json::Arr(
                points
                    .iter()
                    .map(|p| {
                        Json::Arr(vec![
                            Json::Num(p.theta),
                            Json::Num(p.rate_plus),
                            Json::Num(p.rate_minus),
                        ])
                    })
                    .collect(),
            ),
        ),
    ]);
    emit(&cfg, json, Some(csv))
}

fn run_calibrate(cfg: RunConfig) -> Result<(), CliError> {
    let (experiment, target, cal): (&str, f64, Calibration) =
        match (cfg.target_fidelity, cfg.target_visibility) {
            (Some(f), None) => {
                let base = teleport_experiment_config(&cfg, cfg.overlap_v)?;
                ("teleport", f, calibrate_teleport_fidelity(&base, f)
                    .map_err(CliError::from_core_config)?)
            }
            (None, Some(v)) => {
                let base = swap_experiment_config(&cfg, cfg.overlap_v)?;
                ("swap", v, calibrate_swap_visibility(&base, v)
                    .map_err(CliError::from_core_config)?)
            }
            _ => {
                return Err(CliError::config(
                    "calibrate needs exactly one of --target-fidelity or --target-visibility"
                        .into(),
                ))
            }
        };
    let json = obj(vec![
        ("experiment", Json::Str(experiment.into())),
        ("target", Json::Num(target)),
        ("overlap_v", Json::Num(cal.overlap_v)),
        ("achieved", Json::Num(cal.achieved)),
        ("iterations", Json::Int(cal.iterations as u64)),
    ]);
    emit(&cfg, json, None)
}

fn count_superset(table: &CountTable, required: &[&str]) -> u64 {
    table
        .counts
        .iter()
        .filter(|(sig, _)| {
            let parts: Vec<&str> = sig.split('+').collect();
            required.iter().all(|r| parts.contains(r))
        })
        .map(|(_, n)| n)
        .sum()
}

fn report_json(
    cfg: &RunConfig,
    report: &ExperimentReport,
    assessment: &Assessment,
    calibration: Option<&Calibration>,
    counts: Option<&CountTable>,
) -> Json {
    let mut fields: Vec<(&str, Json)> = vec![
        ("experiment", Json::Str(cfg.experiment.as_str().into())),
        ("mode", Json::Str(cfg.mode.as_str().into())),
        ("seed", Json::Int(cfg.seed)),
        (
            "trials",
            match cfg.mode {
                Mode::Exact => Json::Null,
                Mode::MonteCarlo => Json::Int(cfg.trials),
            },
        ),
        ("chi_forward", Json::Num(cfg.chi_forward)),
        ("chi_return", Json::Num(cfg.chi_return)),
        ("overlap_v", Json::Num(report.overlap_v)),
        ("detector_efficiency", Json::Num(cfg.efficiency)),
    ];
    if cfg.experiment == Experiment::Teleport {
        fields.push(("input_setting", Json::Str(cfg.setting.clone())));
    }
    if cfg.experiment == Experiment::Swap {
        fields.push(("theta_steps", Json::Int(cfg.theta_steps as u64)));
    }
    fields.extend([
        ("fidelity", Json::opt_num(report.fidelity)),
        ("efficiency", Json::opt_num(report.efficiency)),
        ("crosstalk_rejection", Json::Num(assessment.crosstalk_rejection)),
        ("visibility", Json::opt_num(report.visibility)),
        ("beats_classical", Json::Bool(assessment.beats_classical)),
        (
            "beats_classical_visibility",
            Json::Bool(assessment.beats_classical_visibility),
        ),
        ("bell_violating", Json::Bool(assessment.bell_violating)),
        ("threefold_prob", Json::Num(report.threefold_prob)),
        ("bob_vacuum_fraction", Json::Num(report.bob_vacuum_fraction)),
    ]);
    if let Some(cal) = calibration {
        fields.push((
            "calibration",
            obj(vec![
                ("overlap_v", Json::Num(cal.overlap_v)),
                ("achieved", Json::Num(cal.achieved)),
                ("iterations", Json::Int(cal.iterations as u64)),
            ]),
        ));
    }
    if !report.fourfold_probs.is_empty() {
        fields.push((
            "fourfold_probs",
            Json::Obj(
                report
                    .fourfold_probs
                    .iter()
                    .map(|(k, v)| (k.clone(), Json::Num(*v)))
                    .collect(),
            ),
        ));
    }
    if let Some(fringe) = &report.fringe {
        fields.push((
            "fringe",
            Json::Arr(
                fringe
                    .iter()
                    .map(|p| {
                        Json::Arr(vec![
                            Json::Num(p.theta),
                            Json::Num(p.rate_plus),
                            Json::Num(p.rate_minus),
                        ])
                    })
                    .collect(),
            ),
        ));
    }
    if let Some(table) = counts {
        fields.push(("restriction", Json::Num(table.restriction)));
        fields.push((
            "counts",
            Json::Obj(
                table
                    .counts
                    .iter()
                    .map(|(k, v)| (k.clone(), Json::Int(*v)))
                    .collect(),
            ),
        ));
    }
    obj(fields)
}

fn emit(cfg: &RunConfig, json: Json, csv: Option<String>) -> Result<(), CliError> {
    let text = match cfg.format {
        Format::Json => render_json(&json),
        Format::Csv => csv.ok_or_else(|| {
            CliError::config(
                "format = csv needs fringe data (swap or baseline-random)".into(),
            )
        })?,
    };
    emit_text(&cfg.out, &text)
}

fn emit_text(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => write_atomic(path, text).map_err(CliError::Output),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
