//! `san`: analytic evaluation, Monte Carlo simulation, charging-power
//! optimization, parameter sweeps, and analytic-vs-simulation comparison
//! for a two-tier network whose small cells recharge user batteries.
//!
//! Exit codes: 0 success, 2 config/spec error, 3 simulation error,
//! 4 optimizer infeasibility.

mod commands;
mod output;

use clap::{Args, Parser, Subcommand, ValueEnum};
use san_core::analytic::AnalyticError;
use san_core::optimizer::OptimizerError;
use san_core::params::{self, ParamsError, ScenarioConfig};
use san_core::sim::SimError;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Debug)]
pub enum AppError {
    Config(String),
    Simulation(String),
    Infeasible(String),
    Internal(String),
    Io(std::io::Error),
}

impl AppError {
    fn exit_code(&self) -> u8 {
        match self {
            AppError::Config(_) => 2,
            AppError::Simulation(_) => 3,
            AppError::Infeasible(_) => 4,
            AppError::Internal(_) | AppError::Io(_) => 1,
        }
    }

    fn message(&self) -> String {
        match self {
            AppError::Config(m)
            | AppError::Simulation(m)
            | AppError::Infeasible(m)
            | AppError::Internal(m) => m.clone(),
            AppError::Io(e) => e.to_string(),
        }
    }
}

impl From<ParamsError> for AppError {
    fn from(e: ParamsError) -> Self {
        AppError::Config(e.to_string())
    }
}

impl From<AnalyticError> for AppError {
    fn from(e: AnalyticError) -> Self {
        match e {
            AnalyticError::Params(p) => AppError::Config(p.to_string()),
            other => AppError::Internal(other.to_string()),
        }
    }
}

impl From<SimError> for AppError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Params(p) => AppError::Config(p.to_string()),
            SimError::InvalidArgs(m) => AppError::Config(m),
        }
    }
}

impl From<OptimizerError> for AppError {
    fn from(e: OptimizerError) -> Self {
        match e {
            OptimizerError::EmptyFeasible(_) | OptimizerError::NegativeBase(_) => {
                AppError::Infeasible(e.to_string())
            }
            OptimizerError::Params(p) => AppError::Config(p.to_string()),
            OptimizerError::Analytic(a) => AppError::from(a),
            other => AppError::Internal(other.to_string()),
        }
    }
}

impl From<std::io::Error> for AppError {
    fn from(e: std::io::Error) -> Self {
        AppError::Io(e)
    }
}

/// Scenario selection: a named preset, an optional config file layered on
/// top of it, then per-field override flags.
#[derive(Args, Debug, Clone)]
pub struct ConfigArgs {
    /// named parameter set: fig3a, fig3b, or fig4
    #[arg(long, default_value = "fig3a")]
    preset: String,
    /// key = value config file applied over the preset
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    lambda_macro_per_km2: Option<f64>,
    #[arg(long)]
    lambda_small_per_km2: Option<f64>,
    #[arg(long)]
    lambda_user_per_km2: Option<f64>,
    #[arg(long)]
    p_macro_dbm: Option<f64>,
    #[arg(long)]
    p_small_dbm: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    bandwidth_mhz: Option<f64>,
    /// rate threshold in Mbit/s
    #[arg(long, alias = "theta")]
    theta_mbps: Option<f64>,
    #[arg(long)]
    u_low: Option<f64>,
    #[arg(long)]
    u_high: Option<f64>,
    #[arg(long)]
    r_hat_a_m: Option<f64>,
    #[arg(long)]
    g_main_dbi: Option<f64>,
    #[arg(long)]
    beam_width_rad: Option<f64>,
    #[arg(long)]
    eta_over_pu: Option<f64>,
    #[arg(long)]
    fold_gain_into_rc: bool,
    #[arg(long)]
    consume_on_success: bool,
    #[arg(long)]
    load_sum_from_one: bool,
}

impl ConfigArgs {
    pub fn resolve(&self) -> Result<ScenarioConfig, AppError> {
        let mut cfg = params::presets::by_name(&self.preset)
            .ok_or_else(|| AppError::Config(format!("unknown preset `{}`", self.preset)))?;
        if let Some(path) = &self.config {
            let text = std::fs::read_to_string(path).map_err(|e| {
                AppError::Config(format!("cannot read config file {}: {e}", path.display()))
            })?;
            cfg = params::parse_config_str(&text, cfg)?;
        }
        macro_rules! set {
            ($field:ident, $arg:expr, $conv:expr) => {
                if let Some(v) = $arg {
                    cfg.$field = $conv(v);
                }
            };
        }
        set!(lambda_macro, self.lambda_macro_per_km2, params::per_km2_to_per_m2);
        set!(lambda_small, self.lambda_small_per_km2, params::per_km2_to_per_m2);
        set!(lambda_user, self.lambda_user_per_km2, params::per_km2_to_per_m2);
        set!(p_macro, self.p_macro_dbm, params::dbm_to_watts);
        set!(p_small, self.p_small_dbm, params::dbm_to_watts);
        set!(alpha, self.alpha, |v| v);
        set!(beta, self.beta, |v| v);
        set!(bandwidth, self.bandwidth_mhz, |v: f64| v * 1e6);
        set!(rate_threshold, self.theta_mbps, |v: f64| v * 1e6);
        set!(u_low, self.u_low, |v| v);
        set!(u_high, self.u_high, |v| v);
        set!(r_hat_a, self.r_hat_a_m, |v| v);
        set!(g_main, self.g_main_dbi, params::dbi_to_linear);
        set!(beam_width, self.beam_width_rad, |v| v);
        set!(eta_over_pu, self.eta_over_pu, |v| v);
        if self.fold_gain_into_rc {
            cfg.fold_gain_into_rc = true;
        }
        if self.consume_on_success {
            cfg.consume_on_success = true;
        }
        if self.load_sum_from_one {
            cfg.load_sum_from_one = true;
        }
        Ok(cfg.validate()?)
    }
}

/// Monte Carlo run shape, shared by simulate/sweep/compare.
#[derive(Args, Debug, Clone)]
pub struct SimArgs {
    #[arg(long, default_value_t = 16)]
    pub realizations: usize,
    #[arg(long, default_value_t = 100)]
    pub slots: usize,
    /// slots discarded before measurement; default slots / 5
    #[arg(long)]
    pub burn_in: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// window side = factor / sqrt(lambda_small)
    #[arg(long, default_value_t = 20.0)]
    pub window_factor: f64,
    /// explicit window side in meters (overrides the factor)
    #[arg(long)]
    pub window_m: Option<f64>,
    /// users measured for SIR per slot
    #[arg(long, default_value_t = 2048)]
    pub measurement_cap: usize,
    /// fix all fading gains to 1
    #[arg(long)]
    pub unit_fading: bool,
    /// run the cell-range-expansion baseline at this association bias
    #[arg(long)]
    pub cre_bias: Option<f64>,
    /// constant download probability for the baseline (default: matched
    /// to the network's steady-state download mass)
    #[arg(long)]
    pub cre_activity: Option<f64>,
    /// charging power used for the activity matching
    #[arg(skip)]
    pub p_tc_for_activity: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OptimizeMode {
    Grid,
    ClosedForm,
    Both,
}

#[derive(Args, Debug)]
pub struct OptimizeArgs {
    #[arg(long, value_enum, default_value_t = OptimizeMode::Grid)]
    pub mode: OptimizeMode,
    #[arg(long, default_value_t = 256)]
    pub grid_points: usize,
    #[arg(long, default_value_t = 4)]
    pub refine_rounds: usize,
    /// record the (p_tc, objective) evaluations
    #[arg(long)]
    pub trace: bool,
    /// lambda_small / lambda_macro ratio above which the sparse-macro
    /// closed-form branch applies
    #[arg(long, default_value_t = 10.0)]
    pub branch_threshold: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepVariable {
    PTc,
    RHatA,
    LambdaSmall,
    URatio,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepScale {
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Engines {
    Analytic,
    Simulate,
    Both,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long, value_enum)]
    pub variable: SweepVariable,
    /// explicit list, e.g. --values 1,32,1024
    #[arg(long, value_delimiter = ',')]
    pub values: Option<Vec<f64>>,
    #[arg(long)]
    pub lo: Option<f64>,
    #[arg(long)]
    pub hi: Option<f64>,
    #[arg(long)]
    pub count: Option<usize>,
    #[arg(long, value_enum, default_value_t = SweepScale::Log)]
    pub scale: SweepScale,
    #[arg(long, value_enum, default_value_t = Engines::Analytic)]
    pub engines: Engines,
    #[command(flatten)]
    pub sim: SimArgs,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    /// charging powers to compare at, e.g. --p-tc-grid 1,32,1024
    #[arg(long, value_delimiter = ',', required = true)]
    pub p_tc_grid: Vec<f64>,
    #[command(flatten)]
    pub sim: SimArgs,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Closed-form rate coverage and every intermediate quantity (JSON)
    Analytic {
        #[command(flatten)]
        config: ConfigArgs,
        /// charging power normalized by the per-slot battery unit
        #[arg(long)]
        p_tc: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo experiment (JSON aggregate; optional per-realization CSV)
    Simulate {
        #[command(flatten)]
        config: ConfigArgs,
        #[arg(long)]
        p_tc: f64,
        #[command(flatten)]
        sim: SimArgs,
        /// per-realization CSV path
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rate-coverage-maximizing charging power (JSON)
    Optimize {
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        args: OptimizeArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// One CSV row per sweep value per engine
    Sweep {
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        args: SweepArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Analytic-vs-simulation discrepancy report (Markdown + CSV)
    Compare {
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        args: CompareArgs,
        /// Markdown report path (stdout if omitted)
        #[arg(long)]
        out: Option<PathBuf>,
        /// CSV report path
        #[arg(long)]
        out_csv: Option<PathBuf>,
    },
}

#[derive(Parser, Debug)]
#[command(name = "san", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn run(cli: Cli) -> Result<(), AppError> {
    match cli.command {
        Command::Analytic { config, p_tc, out } => {
            let cfg = config.resolve()?;
            commands::cmd_analytic(&cfg, p_tc, out.as_deref())
        }
        Command::Simulate {
            config,
            p_tc,
            mut sim,
            csv,
            out,
        } => {
            let cfg = config.resolve()?;
            sim.p_tc_for_activity = Some(p_tc);
            commands::cmd_simulate(&cfg, p_tc, &sim, csv.as_deref(), out.as_deref())
        }
        Command::Optimize { config, args, out } => {
            let cfg = config.resolve()?;
            commands::cmd_optimize(&cfg, &args, out.as_deref())
        }
        Command::Sweep { config, args, out } => {
            let cfg = config.resolve()?;
            commands::cmd_sweep(&cfg, &args, out.as_deref())
        }
        Command::Compare {
            config,
            args,
            out,
            out_csv,
        } => {
            let cfg = config.resolve()?;
            commands::cmd_compare(&cfg, &args, out.as_deref(), out_csv.as_deref())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.exit_code())
        }
    }
}
