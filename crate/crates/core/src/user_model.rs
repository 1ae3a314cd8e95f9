//! Subscriber consumption under each sponsorship configuration.
//!
//! A subscriber of one ISP splits a capacity `c` between the two CPs,
//! maximising `ψ(z₁) + ψ(z₂) − p · Σ_{non-sponsored} zᵢ` subject to
//! `z₁ + z₂ ≤ c`, `z ≥ 0`. Sponsored content is free, so whenever at least
//! one CP sponsors the capacity constraint binds and the problem reduces to
//! one dimension.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::params::ModelParams;
use crate::scalar::Scalar;
use crate::utility::UtilitySpec;

/// Bisection tolerance on the consumption argument.
pub const ARGUMENT_TOL: f64 = 1e-10;

const MAX_BISECTIONS: usize = 400;

/// Sponsorship configuration on one ISP. The first letter is CP1's status,
/// the second CP2's (`S` sponsors, `N` does not).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Config {
    NN,
    SN,
    NS,
    SS,
}

impl Config {
    /// All configurations in tie-break order (fewest sponsors first).
    pub const ALL: [Config; 4] = [Config::NN, Config::SN, Config::NS, Config::SS];

    pub fn from_flags(cp1_sponsors: bool, cp2_sponsors: bool) -> Self {
        match (cp1_sponsors, cp2_sponsors) {
            (false, false) => Config::NN,
            (true, false) => Config::SN,
            (false, true) => Config::NS,
            (true, true) => Config::SS,
        }
    }

    /// Whether CP `i` (0-based) sponsors its content.
    pub fn sponsors(self, i: usize) -> bool {
        match i {
            0 => matches!(self, Config::SN | Config::SS),
            1 => matches!(self, Config::NS | Config::SS),
            _ => panic!("CP index {i} out of range"),
        }
    }

    /// The configuration with CP `i`'s decision reversed.
    pub fn flip(self, i: usize) -> Self {
        let mut s = [self.sponsors(0), self.sponsors(1)];
        s[i] = !s[i];
        Config::from_flags(s[0], s[1])
    }

    pub fn sponsor_count(self) -> usize {
        usize::from(self.sponsors(0)) + usize::from(self.sponsors(1))
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// Swaps the roles of the two CPs (SN ↔ NS).
    pub fn mirrored(self) -> Self {
        Config::from_flags(self.sponsors(1), self.sponsors(0))
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Config::NN => "NN",
            Config::SN => "SN",
            Config::NS => "NS",
            Config::SS => "SS",
        }
    }
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Config {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "NN" => Ok(Config::NN),
            "SN" => Ok(Config::SN),
            "NS" => Ok(Config::NS),
            "SS" => Ok(Config::SS),
            other => Err(format!("unknown configuration `{other}` (expected NN, SN, NS or SS)")),
        }
    }
}

impl Serialize for Config {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

/// Per-CP consumption of one ISP's subscribers and their resulting surplus.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConsumptionProfile<T> {
    pub theta1: T,
    pub theta2: T,
    pub u: T,
}

impl<T: Scalar> ConsumptionProfile<T> {
    /// Consumption of CP `i` (0-based).
    pub fn theta(&self, i: usize) -> T {
        if i == 0 {
            self.theta1
        } else {
            self.theta2
        }
    }

    pub fn total(&self) -> T {
        self.theta1 + self.theta2
    }
}

/// Objective of the subscriber problem at `(z1, z2)`.
pub fn user_objective<T: Scalar>(params: &ModelParams<T>, config: Config, z1: T, z2: T) -> T {
    let psi = params.utility();
    let mut value = psi.value(z1) + psi.value(z2);
    if !config.sponsors(0) {
        value = value - params.p() * z1;
    }
    if !config.sponsors(1) {
        value = value - params.p() * z2;
    }
    value
}

/// Solves the subscriber consumption problem exactly (log utility) or by
/// bisection on the first-order condition (custom utility).
pub fn solve_consumption<T: Scalar>(params: &ModelParams<T>, config: Config) -> ConsumptionProfile<T> {
    let c = params.c();
    let (theta1, theta2) = match config {
        Config::SS => {
            let half = c / T::lit(2.0);
            (half, half)
        }
        Config::NN => {
            let z = symmetric_paid_consumption(params);
            (z, z)
        }
        Config::SN => {
            let z = sponsored_share(params);
            (z, c - z)
        }
        Config::NS => {
            let z = sponsored_share(params);
            (c - z, z)
        }
    };
    ConsumptionProfile {
        theta1,
        theta2,
        u: user_objective(params, config, theta1, theta2),
    }
}

/// Solves all four configurations.
pub fn solve_all<T: Scalar>(params: &ModelParams<T>) -> [ConsumptionProfile<T>; 4] {
    Config::ALL.map(|m| solve_consumption(params, m))
}

/// NN: each CP is consumed up to ψ′(z) = p, capped at c/2.
fn symmetric_paid_consumption<T: Scalar>(params: &ModelParams<T>) -> T {
    let (p, half) = (params.p(), params.c() / T::lit(2.0));
    match params.utility() {
        UtilitySpec::LogOnePlus => (p.recip() - T::one()).max(T::zero()).min(half),
        psi => {
            if psi.marginal(T::zero()) <= p {
                // priced out
                T::zero()
            } else if psi.marginal(half) >= p {
                half
            } else {
                bisect_decreasing(|z| psi.marginal(z) - p, T::zero(), half)
            }
        }
    }
}

/// SN: consumption of the sponsored CP when the other CP fills the residual
/// capacity, i.e. the maximiser of ψ(x) + ψ(c − x) − p(c − x) on [0, c].
fn sponsored_share<T: Scalar>(params: &ModelParams<T>) -> T {
    let (p, c) = (params.p(), params.c());
    match params.utility() {
        UtilitySpec::LogOnePlus => {
            // FOC: p·x² + (2 − p·c)·x − (c + p·(1 + c)) = 0
            let b = T::lit(2.0) - p * c;
            let k = c + p * (T::one() + c);
            let disc = (b * b + T::lit(4.0) * p * k).sqrt();
            let root = if b > T::zero() {
                T::lit(2.0) * k / (b + disc)
            } else {
                (disc - b) / (T::lit(2.0) * p)
            };
            root.max(T::zero()).min(c)
        }
        psi => {
            let slope = |x: T| psi.marginal(x) - psi.marginal(c - x) + p;
            // slope(0) > 0 always; a non-negative slope at c means the
            // sponsored CP takes the whole capacity.
            if slope(c) >= T::zero() {
                c
            } else {
                bisect_decreasing(slope, T::zero(), c)
            }
        }
    }
}

/// Root of a non-increasing `f` with `f(lo) > 0 ≥ f(hi)`.
fn bisect_decreasing<T: Scalar>(f: impl Fn(T) -> T, mut lo: T, mut hi: T) -> T {
    let tol = T::tol(ARGUMENT_TOL);
    let two = T::lit(2.0);
    for _ in 0..MAX_BISECTIONS {
        if hi - lo <= tol {
            break;
        }
        let mid = (lo + hi) / two;
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo + hi) / two
}

/// Exhaustive search over the feasible simplex on a uniform grid of step
/// `c / grid_points`. Independent of the closed forms; accuracy is O(c / grid_points).
///
/// # Panics
/// If `grid_points < 100`.
pub fn consumption_oracle<T: Scalar>(
    params: &ModelParams<T>,
    config: Config,
    grid_points: usize,
) -> ConsumptionProfile<T> {
    assert!(grid_points >= 100, "oracle needs at least 100 grid points");
    let c = params.c();
    let n = T::lit(grid_points as f64);
    let mut best = ConsumptionProfile {
        theta1: T::zero(),
        theta2: T::zero(),
        u: user_objective(params, config, T::zero(), T::zero()),
    };
    for i in 0..=grid_points {
        let z1 = c * T::lit(i as f64) / n;
        for j in 0..=(grid_points - i) {
            let z2 = c * T::lit(j as f64) / n;
            let u = user_objective(params, config, z1, z2);
            if u > best.u {
                best = ConsumptionProfile {
                    theta1: z1,
                    theta2: z2,
                    u,
                };
            }
        }
    }
    best
}
