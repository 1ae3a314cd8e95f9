//! Equilibrium engine for sponsored-data markets: two ISPs competing for a
//! Hotelling-distributed user base, two content providers choosing whether
//! to zero-rate their traffic on each ISP.
//!
//! Every solver is generic over [`Scalar`] (`f32` or `f64`). The aliases at
//! the crate root fix the scalar to `f64`.

// `!(x > 0)` style guards are used on purpose so NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cp_game;
pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod game;
pub mod isp_strategy;
pub mod market;
pub mod params;
pub mod scalar;
pub mod user_model;
pub mod utility;

pub use cp_game::{ConfigSet, FEASIBILITY_SLACK};
pub use error::{ModelError, Result};
pub use experiments::{fmt_sig, OutputFormat, RegionLabel, SurplusMode};
pub use isp_strategy::{ThresholdMethod, DEFAULT_A_MAX};
pub use market::{aggregate_user_surplus, benchmark_share, market_share, Isp};
pub use scalar::Scalar;
pub use user_model::Config;

pub type ModelParams = params::ModelParams<f64>;
pub type UtilitySpec = utility::UtilitySpec<f64>;
pub type Game = game::Game<f64>;
pub type MarketMode = market::MarketMode<f64>;
pub type ConsumptionProfile = user_model::ConsumptionProfile<f64>;
pub type NashCoefficients = cp_game::NashCoefficients<f64>;
pub type NashThresholds = cp_game::NashThresholds<f64>;
pub type CpSurplusReport = cp_game::CpSurplusReport<f64>;
pub type BestResponse = isp_strategy::BestResponse<f64>;
pub type ConfigOption = isp_strategy::ConfigOption<f64>;
pub type ThresholdReport = isp_strategy::ThresholdReport<f64>;
pub type SystemState = dynamics::SystemState<f64>;
pub type DynamicsOutcome = dynamics::DynamicsOutcome<f64>;
pub type VerificationReport = dynamics::VerificationReport<f64>;
pub type SymmetricClosedForms = dynamics::SymmetricClosedForms<f64>;
pub type GridAxis = experiments::GridAxis<f64>;
pub type SweepSpec = experiments::SweepSpec<f64>;
pub type RaySpec = experiments::RaySpec<f64>;
pub type RegionCell = experiments::RegionCell<f64>;
pub type SurplusRow = experiments::SurplusRow<f64>;
