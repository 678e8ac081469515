//! Command-line front end: experiment configuration, output bundles and
//! exit-code mapping. The binary is a thin wrapper around [`main_with_args`].

mod experiments;
mod plot;

use std::f64::consts::PI;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::analysis::{series_from_csv, series_to_csv, TimeSeries};
use crate::circuit::NoiseModel;
use crate::error::{arg, Error, Result};

pub use experiments::{run_experiment, ChannelDump, CircuitDump, ExperimentOutput};
pub use plot::render_svg;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

pub const DEFAULT_SHOTS: u64 = 8192;
pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_POINTS: usize = 30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Reservoir,
    Collisional,
    AmplitudeDamping,
    Depolarizing,
    PauliWork,
    Capacity,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Reservoir => "reservoir",
            Experiment::Collisional => "collisional",
            Experiment::AmplitudeDamping => "amplitude-damping",
            Experiment::Depolarizing => "depolarizing",
            Experiment::PauliWork => "pauli-work",
            Experiment::Capacity => "capacity",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PauliParams {
    pub lambda: f64,
    pub omega: f64,
}

/// Grid parameters. Unset entries take per-experiment defaults in
/// [`ExperimentConfig::resolved`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridParams {
    pub points: usize,
    pub t_max: Option<f64>,
    pub p_grid: Option<Vec<f64>>,
    pub ratios: Option<Vec<f64>>,
    pub lambda: f64,
    pub n_max: u32,
    pub g_tau: f64,
    pub eternal: PauliParams,
    pub tan: PauliParams,
}

impl Default for GridParams {
    fn default() -> Self {
        Self {
            points: DEFAULT_POINTS,
            t_max: None,
            p_grid: None,
            ratios: None,
            lambda: 1.0,
            n_max: 7,
            g_tau: PI / 6.0,
            eternal: PauliParams {
                lambda: 1.0,
                omega: 0.5,
            },
            tan: PauliParams {
                lambda: 0.1,
                omega: 2.0,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default = "default_shots")]
    pub shots: u64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// `None` means noiseless execution with perfect readout.
    #[serde(default = "default_noise")]
    pub noise: Option<NoiseModel>,
    #[serde(default)]
    pub mitigate: bool,
    #[serde(default)]
    pub grid: GridParams,
}

fn default_shots() -> u64 {
    DEFAULT_SHOTS
}
fn default_seed() -> u64 {
    DEFAULT_SEED
}
fn default_noise() -> Option<NoiseModel> {
    Some(NoiseModel::default())
}

/// Uniform grid on [a, b] with `points` entries, endpoints included.
pub fn uniform_grid(a: f64, b: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![a];
    }
    (0..points)
        .map(|k| a + (b - a) * k as f64 / (points - 1) as f64)
        .collect()
}

/// Default span for the amplitude-damping figures: ten decay times in the
/// weak-coupling regime, three oscillation periods of c1 otherwise.
pub fn damping_span(ratio: f64, lambda: f64) -> f64 {
    let decay = 10.0 / lambda;
    if ratio <= 0.5 {
        decay
    } else {
        decay.min(6.0 * PI / (lambda * (2.0 * ratio - 1.0).sqrt()))
    }
}

/// Fraction of the tan-channel horizon π/(2ω) covered by default.
pub const TAN_SPAN_FRACTION: f64 = 0.95;

/// Default span for the eternal channel, in units of 1/λ.
pub const ETERNAL_SPAN: f64 = 3.0;

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        Self {
            experiment,
            shots: DEFAULT_SHOTS,
            seed: DEFAULT_SEED,
            noise: default_noise(),
            mitigate: false,
            grid: GridParams::default(),
        }
    }

    /// Copy with every per-experiment default made explicit.
    pub fn resolved(&self) -> Self {
        let mut c = self.clone();
        let g = &mut c.grid;
        match c.experiment {
            Experiment::Reservoir | Experiment::Depolarizing => {
                if g.p_grid.is_none() {
                    g.p_grid = Some((0..=10).map(|k| f64::from(k) / 10.0).collect());
                }
            }
            Experiment::AmplitudeDamping => {
                g.ratios.get_or_insert_with(|| vec![0.2, 100.0]);
            }
            Experiment::Capacity => {
                g.ratios.get_or_insert_with(|| vec![100.0, 200.0, 400.0]);
            }
            Experiment::Collisional | Experiment::PauliWork => {}
        }
        c
    }

    pub fn validate(&self) -> Result<()> {
        if self.shots == 0 {
            return arg("shots must be positive");
        }
        if let Some(n) = &self.noise {
            n.validate()?;
        }
        let g = &self.grid;
        if g.points < 2 {
            return arg("grids need at least two points");
        }
        if let Some(t) = g.t_max {
            if !(t.is_finite() && t > 0.0) {
                return arg(format!("t_max = {t} must be positive"));
            }
        }
        if !(g.lambda.is_finite() && g.lambda > 0.0) {
            return arg("lambda must be positive");
        }
        if let Some(p) = &g.p_grid {
            if p.is_empty() {
                return arg("p grid is empty");
            }
            if let Some(x) = p.iter().find(|x| !(0.0..=1.0).contains(*x)) {
                return arg(format!("p = {x} outside [0, 1]"));
            }
        }
        if let Some(r) = &g.ratios {
            if r.is_empty() {
                return arg("ratio list is empty");
            }
            if let Some(x) = r.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
                return arg(format!("ratio R = {x} must be positive"));
            }
        }
        if g.n_max == 0 {
            return arg("n_max must be at least 1");
        }
        if g.n_max > 10 {
            return arg("n_max above 10 exceeds the simulator's qubit budget");
        }
        if !g.g_tau.is_finite() {
            return arg("g_tau must be finite");
        }
        for (name, p) in [("eternal", g.eternal), ("tan", g.tan)] {
            if !(p.lambda.is_finite() && p.lambda > 0.0 && p.omega.is_finite() && p.omega > 0.0) {
                return arg(format!("{name} channel needs positive lambda and omega"));
            }
        }
        if self.experiment == Experiment::PauliWork {
            if let Some(t) = g.t_max {
                let horizon = PI / (2.0 * g.tan.omega);
                if t >= horizon {
                    return arg(format!(
                        "tan-channel grid must stay below π/(2ω) = {horizon}"
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Everything written next to the CSVs; `config` alone reproduces the run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub config: ExperimentConfig,
    pub version: String,
    pub wall_time_s: f64,
    #[serde(default)]
    pub diagnostics: serde_json::Value,
}

/// Accepts either a manifest or a bare configuration.
pub fn load_config(text: &str) -> Result<ExperimentConfig> {
    if let Ok(m) = serde_json::from_str::<Manifest>(text) {
        return Ok(m.config);
    }
    Ok(serde_json::from_str::<ExperimentConfig>(text)?)
}

pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Argument(_)
        | Error::DimensionMismatch { .. }
        | Error::Io(_)
        | Error::Json(_)
        | Error::Csv(_) => EXIT_USAGE,
        Error::InvalidState(_)
        | Error::NotTracePreserving(_)
        | Error::Singularity { .. }
        | Error::Model { .. }
        | Error::Integration(_)
        | Error::Solver { .. } => EXIT_NUMERIC,
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "oqsim",
    version,
    about = "Few-qubit open quantum system experiments"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bell-state pumping from the maximally mixed state.
    Reservoir(RunArgs),
    /// Collisional dephasing with correlated and separable ancillae.
    Collisional(RunArgs),
    /// Amplitude damping population and entanglement witness.
    AmplitudeDamping(RunArgs),
    /// Depolarizing channel with state tomography.
    Depolarizing(RunArgs),
    /// Extractable work under eternal and tan Pauli channels.
    PauliWork(RunArgs),
    /// Quantum capacity of amplitude damping.
    Capacity(RunArgs),
    /// Render theory/simulated CSVs as an SVG.
    Plot(PlotArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// `default`, `none`, or a JSON noise file.
    #[arg(long)]
    pub noise: Option<String>,
    #[arg(long)]
    pub mitigate: bool,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    #[arg(long)]
    pub plot: bool,
    #[arg(long)]
    pub dump_circuit: bool,
    #[arg(long)]
    pub dump_channel: bool,
    /// Start from a saved manifest or config; explicit flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Points per time grid.
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub t_max: Option<f64>,
    /// Comma-separated coupling ratios R = γ0/λ.
    #[arg(long, value_delimiter = ',')]
    pub ratios: Option<Vec<f64>>,
    /// Comma-separated p values.
    #[arg(long, value_delimiter = ',')]
    pub p_grid: Option<Vec<f64>>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub n_max: Option<u32>,
    #[arg(long)]
    pub g_tau: Option<f64>,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[arg(long)]
    pub theory: PathBuf,
    #[arg(long)]
    pub simulated: Option<PathBuf>,
    #[arg(long, default_value = "plot.svg")]
    pub out: PathBuf,
    #[arg(long, default_value = "")]
    pub title: String,
}

fn parse_noise(spec: &str) -> Result<Option<NoiseModel>> {
    match spec {
        "default" => Ok(Some(NoiseModel::default())),
        "none" => Ok(None),
        path => {
            let text = fs::read_to_string(path)?;
            let model: NoiseModel = serde_json::from_str(&text)?;
            model.validate()?;
            Ok(Some(model))
        }
    }
}

/// Build the configuration for a run from flags and an optional base file.
pub fn config_from_args(experiment: Experiment, a: &RunArgs) -> Result<ExperimentConfig> {
    let mut cfg = match &a.config {
        Some(path) => {
            let c = load_config(&fs::read_to_string(path)?)?;
            if c.experiment != experiment {
                return arg(format!(
                    "config is for '{}', not '{}'",
                    c.experiment.name(),
                    experiment.name()
                ));
            }
            c
        }
        None => ExperimentConfig::new(experiment),
    };
    if let Some(s) = a.shots {
        cfg.shots = s;
    }
    if let Some(s) = a.seed {
        cfg.seed = s;
    }
    if let Some(n) = &a.noise {
        cfg.noise = parse_noise(n)?;
    }
    cfg.mitigate |= a.mitigate;
    let g = &mut cfg.grid;
    if let Some(p) = a.points {
        g.points = p;
    }
    if a.t_max.is_some() {
        g.t_max = a.t_max;
    }
    if a.ratios.is_some() {
        g.ratios.clone_from(&a.ratios);
    }
    if a.p_grid.is_some() {
        g.p_grid.clone_from(&a.p_grid);
    }
    if let Some(l) = a.lambda {
        g.lambda = l;
    }
    if let Some(n) = a.n_max {
        g.n_max = n;
    }
    if let Some(x) = a.g_tau {
        g.g_tau = x;
    }
    let cfg = cfg.resolved();
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct OutputOptions {
    pub plot: bool,
    pub dump_circuit: bool,
    pub dump_channel: bool,
}

/// Run an experiment and write its bundle into `dir`.
pub fn write_bundle(
    cfg: &ExperimentConfig,
    dir: &Path,
    opts: OutputOptions,
) -> Result<ExperimentOutput> {
    let start = Instant::now();
    let out = run_experiment(cfg)?;
    fs::create_dir_all(dir)?;
    fs::write(dir.join("theory.csv"), series_to_csv(&out.theory))?;
    fs::write(dir.join("simulated.csv"), series_to_csv(&out.simulated))?;
    if opts.plot {
        let svg = render_svg(&out.theory, &out.simulated, cfg.experiment.name());
        fs::write(dir.join("plot.svg"), svg)?;
    }
    if opts.dump_circuit {
        fs::write(
            dir.join("circuits.json"),
            serde_json::to_string_pretty(&out.circuits)?,
        )?;
    }
    if opts.dump_channel {
        fs::write(
            dir.join("channels.json"),
            serde_json::to_string_pretty(&out.channels)?,
        )?;
    }
    let manifest = Manifest {
        config: cfg.clone(),
        version: env!("CARGO_PKG_VERSION").to_string(),
        wall_time_s: start.elapsed().as_secs_f64(),
        diagnostics: out.diagnostics.clone(),
    };
    fs::write(
        dir.join("manifest.json"),
        serde_json::to_string_pretty(&manifest)?,
    )?;
    Ok(out)
}

fn read_series(path: &Path) -> Result<Vec<TimeSeries>> {
    series_from_csv(&fs::read_to_string(path)?)
}

fn run_plot(a: &PlotArgs) -> Result<()> {
    let theory = read_series(&a.theory)?;
    let simulated = match &a.simulated {
        Some(p) => read_series(p)?,
        None => Vec::new(),
    };
    fs::write(&a.out, render_svg(&theory, &simulated, &a.title))?;
    Ok(())
}

fn dispatch(cli: Cli) -> Result<()> {
    let (experiment, a) = match &cli.command {
        Command::Plot(p) => return run_plot(p),
        Command::Reservoir(a) => (Experiment::Reservoir, a),
        Command::Collisional(a) => (Experiment::Collisional, a),
        Command::AmplitudeDamping(a) => (Experiment::AmplitudeDamping, a),
        Command::Depolarizing(a) => (Experiment::Depolarizing, a),
        Command::PauliWork(a) => (Experiment::PauliWork, a),
        Command::Capacity(a) => (Experiment::Capacity, a),
    };
    let cfg = config_from_args(experiment, a)?;
    let opts = OutputOptions {
        plot: a.plot,
        dump_circuit: a.dump_circuit,
        dump_channel: a.dump_channel,
    };
    write_bundle(&cfg, &a.out, opts)?;
    Ok(())
}

/// Parse arguments, run, and return the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trips_through_manifest() {
        let cfg = ExperimentConfig::new(Experiment::Capacity).resolved();
        let m = Manifest {
            config: cfg.clone(),
            version: "x".into(),
            wall_time_s: 0.5,
            diagnostics: serde_json::Value::Null,
        };
        let text = serde_json::to_string(&m).unwrap();
        assert_eq!(load_config(&text).unwrap(), cfg);
        let bare = serde_json::to_string(&cfg).unwrap();
        assert_eq!(load_config(&bare).unwrap(), cfg);
    }

    #[test]
    fn minimal_config_takes_defaults() {
        let cfg = load_config(r#"{"experiment": "reservoir"}"#).unwrap();
        assert_eq!(cfg.shots, DEFAULT_SHOTS);
        assert_eq!(cfg.noise, Some(NoiseModel::default()));
        assert_eq!(cfg.resolved().grid.p_grid.unwrap().len(), 11);
        assert!(load_config(r#"{"experiment": "reservoir", "bogus": 1}"#).is_err());
        let none = load_config(r#"{"experiment": "reservoir", "noise": null}"#).unwrap();
        assert_eq!(none.noise, None);
    }

    #[test]
    fn validation() {
        let mut c = ExperimentConfig::new(Experiment::PauliWork);
        assert!(c.validate().is_ok());
        c.grid.t_max = Some(PI / 4.0);
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::new(Experiment::Reservoir);
        c.grid.p_grid = Some(vec![0.5, 1.2]);
        assert!(c.validate().is_err());
        c.grid.p_grid = Some(vec![]);
        assert!(c.validate().is_err());
        let mut c = ExperimentConfig::new(Experiment::Capacity);
        c.shots = 0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn damping_span_regimes() {
        assert_eq!(damping_span(0.2, 1.0), 10.0);
        let d = 199f64.sqrt();
        assert!((damping_span(100.0, 1.0) - 6.0 * PI / d).abs() < 1e-12);
        assert_eq!(uniform_grid(0.0, 1.0, 3), vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn error_classes() {
        assert_eq!(exit_code(&Error::Argument("x".into())), EXIT_USAGE);
        assert_eq!(
            exit_code(&Error::Solver { best_residual: 1.0 }),
            EXIT_NUMERIC
        );
        assert_eq!(
            exit_code(&Error::Singularity { t: 1.0, c1: 0.0 }),
            EXIT_NUMERIC
        );
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(main_with_args(["oqsim", "nonsense"]), EXIT_USAGE);
        assert_eq!(
            main_with_args(["oqsim", "capacity", "--shots", "abc"]),
            EXIT_USAGE
        );
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().to_str().unwrap();
        assert_eq!(
            main_with_args(["oqsim", "reservoir", "--p-grid", "0.5,2", "--out", out]),
            EXIT_USAGE
        );
    }
}
