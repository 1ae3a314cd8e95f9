use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use zrsim_core::Config;

/// Equilibria of the sponsored-data market between two ISPs and two CPs.
#[derive(Debug, Parser)]
#[command(name = "zrsim", version)]
pub struct Cli {
    #[command(flatten)]
    pub model: ModelArgs,

    /// TOML file with `[model]` and `[sweep]` tables; flags take precedence.
    #[arg(long, global = true, value_name = "PATH")]
    pub config_file: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    pub format: Format,

    /// Write results here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Default, Clone, Args)]
pub struct ModelArgs {
    /// User price per unit of data.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub p: Option<f64>,
    /// Capacity to consume.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub c: Option<f64>,
    /// Transport cost of ISP1.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub t1: Option<f64>,
    /// Transport cost of ISP2.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub t2: Option<f64>,
    /// CP1 revenue rate.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub a1: Option<f64>,
    /// CP2 revenue rate.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub a2: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub utility: Option<UtilityKind>,
    /// Exponent k of the custom utility ((1+z)^k - 1)/k.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub exponent: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UtilityKind {
    Log,
    Custom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Csv,
    JsonLines,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum IspArg {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
}

impl From<IspArg> for zrsim_core::Isp {
    fn from(v: IspArg) -> Self {
        match v {
            IspArg::One => zrsim_core::Isp::One,
            IspArg::Two => zrsim_core::Isp::Two,
        }
    }
}

#[derive(Debug, Default, Clone, Args)]
pub struct SweepArgs {
    /// Grid points per axis.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Largest revenue rate on the grid.
    #[arg(long, allow_negative_numbers = true)]
    pub a_max: Option<f64>,
    #[arg(long)]
    pub max_rounds: Option<usize>,
    /// Worker threads for the sweep.
    #[arg(long, env = "ZRSIM_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Consumption and user surplus per sponsorship configuration.
    SolveUser {
        /// Only this configuration (default: all four).
        #[arg(long)]
        config: Option<Config>,
    },
    /// One ISP's optimal charge against a fixed rival.
    BestResponse {
        #[arg(long, value_enum, default_value_t = IspArg::One)]
        isp: IspArg,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        q_other: f64,
        #[arg(long, default_value_t = Config::NN)]
        m_other: Config,
    },
    /// Alternating best-response dynamics, ISP1 moving first.
    Dynamics {
        #[arg(long, default_value_t = Config::NN)]
        initial_m2: Config,
        /// ISP2's starting charge (default: its best response against NN).
        #[arg(long, allow_negative_numbers = true)]
        initial_q2: Option<f64>,
        #[arg(long)]
        max_rounds: Option<usize>,
    },
    /// Check whether a state is a system equilibrium.
    Verify {
        #[arg(long, allow_negative_numbers = true)]
        q1: f64,
        #[arg(long)]
        m1: Config,
        #[arg(long, allow_negative_numbers = true)]
        q2: f64,
        #[arg(long)]
        m2: Config,
        /// Use the charges as given instead of snapping them onto nearby equilibrium boundaries.
        #[arg(long)]
        exact: bool,
    },
    /// Limiting configurations over an (a1, a2) grid.
    SweepMap {
        #[command(flatten)]
        sweep: SweepArgs,
        #[arg(long)]
        initial_m2: Option<Config>,
    },
    /// Duopoly, frozen-share and no-zero-rating surplus along (a, rho a).
    SweepRay {
        #[arg(long, allow_negative_numbers = true)]
        rho: Option<f64>,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// ISP1 alone offers zero-rating against an NN rival, along (a, rho a).
    SweepSingleIsp {
        #[arg(long, allow_negative_numbers = true)]
        rho: Option<f64>,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Revenue rate at which the best response starts inducing sponsorship.
    Thresholds {
        #[arg(long, allow_negative_numbers = true)]
        rho: Option<f64>,
        #[arg(long, value_enum, default_value_t = IspArg::One)]
        isp: IspArg,
        #[arg(long, allow_negative_numbers = true)]
        a_max: Option<f64>,
    },
}
