//! Parameter sweeps: region maps over `(a1, a2)` and surplus curves along
//! rays `(a, ρa)`, with CSV output.

use std::fmt;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{DynamicsOutcome, SystemState, DEFAULT_MAX_ROUNDS};
use crate::error::{ModelError, Result};
use crate::game::Game;
use crate::market::{Isp, MarketMode};
use crate::params::ModelParams;
use crate::scalar::Scalar;
use crate::user_model::Config;

pub const DEFAULT_MAP_STEPS: usize = 60;
pub const DEFAULT_RAY_STEPS: usize = 200;
pub const DEFAULT_A_RANGE: f64 = 10.0;
/// Charges closer than this count as symmetric when labelling map cells.
pub const SYMMETRY_TOL: f64 = 1e-6;

pub const REGION_HEADER: [&str; 6] = ["a1", "a2", "label", "rounds", "q1", "q2"];
pub const SURPLUS_HEADER: [&str; 13] = [
    "a",
    "mode",
    "config1",
    "config2",
    "q1",
    "q2",
    "x",
    "isp1",
    "isp2",
    "cp1",
    "cp2",
    "users_with_transport",
    "users_without_transport",
];

/// Inclusive, evenly spaced grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridAxis<T> {
    pub min: T,
    pub max: T,
    pub steps: usize,
}

impl<T: Scalar> GridAxis<T> {
    pub fn new(min: T, max: T, steps: usize) -> Result<Self> {
        if steps < 2 {
            return Err(ModelError::InvalidSweep(format!(
                "grid needs at least 2 steps, got {steps}"
            )));
        }
        if !(min >= T::zero() && max > min && max.is_finite()) {
            return Err(ModelError::InvalidSweep(format!(
                "grid range must satisfy 0 <= min < max, got [{min}, {max}]"
            )));
        }
        Ok(Self { min, max, steps })
    }

    /// `steps` points from `max/steps` to `max`, i.e. `(0, max]` without the origin.
    pub fn excluding_zero(max: T, steps: usize) -> Result<Self> {
        let min = max / T::lit(steps.max(1) as f64);
        Self::new(min, max, steps)
    }

    pub fn value(&self, k: usize) -> T {
        let span = self.max - self.min;
        self.min + span * T::lit(k as f64) / T::lit((self.steps - 1) as f64)
    }

    pub fn values(&self) -> Vec<T> {
        (0..self.steps).map(|k| self.value(k)).collect()
    }
}

/// Region-map sweep over `a1 × a2`.
#[derive(Debug, Clone)]
pub struct SweepSpec<T: Scalar> {
    /// Fixed parameters; the revenue rates are overwritten per cell.
    pub params: ModelParams<T>,
    pub a1: GridAxis<T>,
    pub a2: GridAxis<T>,
    pub initial_m2: Config,
    pub max_rounds: usize,
    /// Worker threads; `None` uses the global rayon pool.
    pub threads: Option<usize>,
}

impl<T: Scalar> SweepSpec<T> {
    /// Default 60×60 grid over `(0, 10]²`.
    pub fn new(params: ModelParams<T>) -> Result<Self> {
        let axis = GridAxis::excluding_zero(T::lit(DEFAULT_A_RANGE), DEFAULT_MAP_STEPS)?;
        Ok(Self {
            params,
            a1: axis,
            a2: axis,
            initial_m2: Config::NN,
            max_rounds: DEFAULT_MAX_ROUNDS,
            threads: None,
        })
    }
}

/// Sweep along `(a, ρa)`.
#[derive(Debug, Clone)]
pub struct RaySpec<T: Scalar> {
    pub params: ModelParams<T>,
    pub a: GridAxis<T>,
    pub rho: T,
    pub max_rounds: usize,
    pub threads: Option<usize>,
}

impl<T: Scalar> RaySpec<T> {
    /// Default 200 points over `(0, 10]`.
    pub fn new(params: ModelParams<T>, rho: T) -> Result<Self> {
        let spec = Self {
            params,
            a: GridAxis::excluding_zero(T::lit(DEFAULT_A_RANGE), DEFAULT_RAY_STEPS)?,
            rho,
            max_rounds: DEFAULT_MAX_ROUNDS,
            threads: None,
        };
        spec.check_rho()?;
        Ok(spec)
    }

    fn check_rho(&self) -> Result<()> {
        if self.rho > T::zero() && self.rho < T::one() {
            Ok(())
        } else {
            Err(ModelError::InvalidParameter {
                name: "rho",
                value: self.rho.as_f64(),
                reason: "must lie in (0, 1)",
            })
        }
    }
}

/// Outcome class of a region-map cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum RegionLabel {
    NN,
    SN,
    NS,
    SS,
    /// Dynamics entered a cycle.
    OSC,
    /// Dynamics hit the round limit.
    MAX,
    /// Converged to a state with different configurations or charges on the two ISPs.
    ASYM,
}

impl RegionLabel {
    pub fn as_str(self) -> &'static str {
        match self {
            RegionLabel::NN => "NN",
            RegionLabel::SN => "SN",
            RegionLabel::NS => "NS",
            RegionLabel::SS => "SS",
            RegionLabel::OSC => "OSC",
            RegionLabel::MAX => "MAX",
            RegionLabel::ASYM => "ASYM",
        }
    }

    pub fn from_config(m: Config) -> Self {
        match m {
            Config::NN => RegionLabel::NN,
            Config::SN => RegionLabel::SN,
            Config::NS => RegionLabel::NS,
            Config::SS => RegionLabel::SS,
        }
    }

    /// Some sponsorship on at least one ISP.
    pub fn is_sponsored(self) -> bool {
        !matches!(self, RegionLabel::NN)
    }

    /// Label after swapping the two CPs.
    pub fn mirrored(self) -> Self {
        match self {
            RegionLabel::SN => RegionLabel::NS,
            RegionLabel::NS => RegionLabel::SN,
            other => other,
        }
    }

    pub fn classify<T: Scalar>(outcome: &DynamicsOutcome<T>) -> Self {
        match outcome {
            DynamicsOutcome::Converged { state, .. } => {
                if state.is_symmetric(T::lit(SYMMETRY_TOL)) {
                    Self::from_config(state.m1)
                } else {
                    RegionLabel::ASYM
                }
            }
            DynamicsOutcome::Oscillating { .. } => RegionLabel::OSC,
            DynamicsOutcome::MaxRoundsExceeded { .. } => RegionLabel::MAX,
        }
    }
}

impl fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionCell<T> {
    /// Grid indices `(i, j)` for `(a1, a2)`.
    pub index: (usize, usize),
    pub a1: T,
    pub a2: T,
    pub label: RegionLabel,
    /// Rounds to convergence, or rounds played before a cycle or the limit.
    pub rounds: usize,
    pub q1: T,
    pub q2: T,
    pub state: SystemState<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SurplusMode {
    Duopoly,
    Monopoly,
    NoZeroRating,
    SingleIsp,
}

impl SurplusMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SurplusMode::Duopoly => "duopoly",
            SurplusMode::Monopoly => "monopoly",
            SurplusMode::NoZeroRating => "no_zero_rating",
            SurplusMode::SingleIsp => "single_isp",
        }
    }
}

impl fmt::Display for SurplusMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurplusRow<T> {
    pub a: T,
    pub mode: SurplusMode,
    /// Outcome of the dynamics that produced the state (`None` for fixed states).
    pub label: Option<RegionLabel>,
    pub state: SystemState<T>,
}

/// Output format for sweep results.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    JsonLines,
}

impl FromStr for OutputFormat {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json-lines" | "jsonl" => Ok(OutputFormat::JsonLines),
            other => Err(ModelError::InvalidSweep(format!("unknown output format {other:?}"))),
        }
    }
}

fn with_threads<R: Send>(threads: Option<usize>, job: impl FnOnce() -> R + Send) -> Result<R> {
    match threads {
        None => Ok(job()),
        Some(0) => Err(ModelError::InvalidSweep("thread count must be positive".into())),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| ModelError::InvalidSweep(format!("thread pool: {e}")))?;
            Ok(pool.install(job))
        }
    }
}

fn rounds_played<T>(outcome: &DynamicsOutcome<T>) -> usize {
    match outcome {
        DynamicsOutcome::Converged { rounds, .. } => *rounds,
        DynamicsOutcome::Oscillating { cycle, .. } => cycle.len(),
        DynamicsOutcome::MaxRoundsExceeded { history } => history.len(),
    }
}

/// Limiting configurations of the best-response dynamics at every grid cell,
/// in row-major order (`a1` outer, `a2` inner).
pub fn sweep_region_map<T: Scalar>(spec: &SweepSpec<T>) -> Result<Vec<RegionCell<T>>> {
    let base = Game::duopoly(spec.params.clone())?;
    let (n1, n2) = (spec.a1.steps, spec.a2.steps);
    let cells = with_threads(spec.threads, || {
        (0..n1 * n2)
            .into_par_iter()
            .map(|k| {
                let (i, j) = (k / n2, k % n2);
                let (a1, a2) = (spec.a1.value(i), spec.a2.value(j));
                let game = base.with_rates(a1, a2)?;
                let outcome = game.run_dynamics(spec.initial_m2, None, spec.max_rounds)?;
                let state = *outcome.final_state();
                Ok(RegionCell {
                    index: (i, j),
                    a1,
                    a2,
                    label: RegionLabel::classify(&outcome),
                    rounds: rounds_played(&outcome),
                    q1: state.q1,
                    q2: state.q2,
                    state,
                })
            })
            .collect::<Result<Vec<_>>>()
    })?;
    cells
}

/// Duopoly, frozen-share and no-zero-rating states at each point of the ray;
/// three rows per `a`, in that order.
pub fn sweep_surplus_ray<T: Scalar>(spec: &RaySpec<T>) -> Result<Vec<SurplusRow<T>>> {
    spec.check_rho()?;
    let duopoly = Game::duopoly(spec.params.clone())?;
    let monopoly = Game::monopoly_benchmark(spec.params.clone())?;
    let rows = with_threads(spec.threads, || {
        spec.a
            .values()
            .into_par_iter()
            .map(|a| {
                let a2 = spec.rho * a;
                let mut rows = Vec::with_capacity(3);
                for (mode, base) in [(SurplusMode::Duopoly, &duopoly), (SurplusMode::Monopoly, &monopoly)] {
                    let game = base.with_rates(a, a2)?;
                    let outcome = game.run_dynamics(Config::NN, None, spec.max_rounds)?;
                    rows.push(SurplusRow {
                        a,
                        mode,
                        label: Some(RegionLabel::classify(&outcome)),
                        state: *outcome.final_state(),
                    });
                }
                rows.push(no_zero_rating_row(&duopoly.with_rates(a, a2)?, a));
                Ok(rows)
            })
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(rows?.into_iter().flatten().collect())
}

/// ISP1's best response with ISP2 pinned to NN at its enforcement charge,
/// alongside the no-zero-rating state; two rows per `a`.
pub fn sweep_single_isp<T: Scalar>(spec: &RaySpec<T>) -> Result<Vec<SurplusRow<T>>> {
    spec.check_rho()?;
    let base = Game::duopoly(spec.params.clone())?;
    let rows = with_threads(spec.threads, || {
        spec.a
            .values()
            .into_par_iter()
            .map(|a| {
                let game = base.with_rates(a, spec.rho * a)?;
                let q2 = game.initial_charge(Config::NN);
                let br = game.best_response(Isp::One, q2, Config::NN);
                let state = SystemState::evaluate(&game, br.q, br.config, q2, Config::NN);
                Ok([
                    SurplusRow {
                        a,
                        mode: SurplusMode::SingleIsp,
                        label: None,
                        state,
                    },
                    no_zero_rating_row(&game, a),
                ])
            })
            .collect::<Result<Vec<_>>>()
    })?;
    Ok(rows?.into_iter().flatten().collect())
}

/// Both ISPs forced to NN; nobody sponsors, so the charges are reported as 0.
fn no_zero_rating_row<T: Scalar>(game: &Game<T>, a: T) -> SurplusRow<T> {
    debug_assert!(matches!(game.mode(), MarketMode::Duopoly));
    SurplusRow {
        a,
        mode: SurplusMode::NoZeroRating,
        label: None,
        state: SystemState::evaluate(game, T::zero(), Config::NN, T::zero(), Config::NN),
    }
}

/// `%.9g`-style formatting: 9 significant digits, trailing zeros dropped.
pub fn fmt_sig<T: Scalar>(v: T) -> String {
    let v = v.as_f64();
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{v:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..9).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    let decimals = (8 - exp).max(0) as usize;
    trim_zeros(&format!("{v:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn region_record<T: Scalar>(c: &RegionCell<T>) -> [String; 6] {
    [
        fmt_sig(c.a1),
        fmt_sig(c.a2),
        c.label.to_string(),
        c.rounds.to_string(),
        fmt_sig(c.q1),
        fmt_sig(c.q2),
    ]
}

fn surplus_record<T: Scalar>(r: &SurplusRow<T>) -> [String; 13] {
    let s = &r.state;
    [
        fmt_sig(r.a),
        r.mode.to_string(),
        s.m1.to_string(),
        s.m2.to_string(),
        fmt_sig(s.q1),
        fmt_sig(s.q2),
        fmt_sig(s.x),
        fmt_sig(s.isp1),
        fmt_sig(s.isp2),
        fmt_sig(s.cp1),
        fmt_sig(s.cp2),
        fmt_sig(s.users_with_transport),
        fmt_sig(s.users_without_transport),
    ]
}

fn write_records<W: Write, const N: usize>(
    out: W,
    header: [&str; N],
    records: impl Iterator<Item = [String; N]>,
    format: OutputFormat,
) -> Result<()> {
    write_table(out, &header, records, format)
}

/// Writes pre-formatted records under `header`. In JSON-lines mode fields
/// that parse as finite numbers are emitted unquoted and empty fields as `null`.
pub fn write_table<W: Write, R: AsRef<[String]>>(
    out: W,
    header: &[&str],
    records: impl IntoIterator<Item = R>,
    format: OutputFormat,
) -> Result<()> {
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(header)?;
            for r in records {
                w.write_record(r.as_ref())?;
            }
            w.flush()?;
        }
        OutputFormat::JsonLines => {
            let mut out = out;
            for r in records {
                // numbers stay as their formatted text so both formats agree digit for digit
                let fields: Vec<String> = header
                    .iter()
                    .zip(r.as_ref())
                    .map(|(k, v)| {
                        if v.is_empty() {
                            format!("{}:null", json_string(k))
                        } else if v.parse::<f64>().is_ok_and(f64::is_finite) {
                            format!("{}:{v}", json_string(k))
                        } else {
                            format!("{}:{}", json_string(k), json_string(v))
                        }
                    })
                    .collect();
                writeln!(out, "{{{}}}", fields.join(","))?;
            }
            out.flush()?;
        }
    }
    Ok(())
}

fn json_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            c if (c as u32) < 0x20 => out.push_str(&format!("\\u{:04x}", c as u32)),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

pub fn write_region_map<T: Scalar, W: Write>(cells: &[RegionCell<T>], out: W, format: OutputFormat) -> Result<()> {
    write_records(out, REGION_HEADER, cells.iter().map(region_record), format)
}

pub fn write_surplus_rows<T: Scalar, W: Write>(rows: &[SurplusRow<T>], out: W, format: OutputFormat) -> Result<()> {
    write_records(out, SURPLUS_HEADER, rows.iter().map(surplus_record), format)
}

pub fn save_region_map<T: Scalar>(cells: &[RegionCell<T>], path: &Path) -> Result<()> {
    write_region_map(cells, BufWriter::new(File::create(path)?), OutputFormat::Csv)
}

pub fn save_surplus_rows<T: Scalar>(rows: &[SurplusRow<T>], path: &Path) -> Result<()> {
    write_surplus_rows(rows, BufWriter::new(File::create(path)?), OutputFormat::Csv)
}
