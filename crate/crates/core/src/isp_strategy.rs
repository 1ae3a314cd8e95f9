//! ISP revenue and best-response pricing.
//!
//! Given the rival's charge and configuration, an ISP picks the charge that
//! induces its most profitable CP equilibrium. For each target configuration
//! revenue is non-decreasing in the charge, so the optimum sits at the top of
//! that configuration's equilibrium interval.

use serde::Serialize;

use crate::error::{ModelError, Result};
use crate::game::Game;
use crate::market::Isp;
use crate::params::ModelParams;
use crate::scalar::{approx_eq, Scalar};
use crate::user_model::Config;

/// Relative tolerance under which two profits count as tied.
pub const TIE_TOL: f64 = 1e-9;
/// NN is enforced at `floor · (1 + NN_MARKUP) + NN_OFFSET`.
pub const NN_MARKUP: f64 = 1e-6;
pub const NN_OFFSET: f64 = 1e-9;
/// Default upper end of the revenue-rate search for thresholds.
pub const DEFAULT_A_MAX: f64 = 1e3;

const THRESHOLD_SCAN: usize = 2000;
const THRESHOLD_PROBE: f64 = 1e-6;

/// Best charge for one target configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum ConfigOption<T> {
    Feasible {
        q: T,
        profit: T,
    },
    /// No charge makes this configuration an equilibrium; `q` is the
    /// candidate that failed.
    Infeasible {
        q: T,
    },
}

impl<T: Scalar> ConfigOption<T> {
    pub fn profit(&self) -> Option<T> {
        match self {
            ConfigOption::Feasible { profit, .. } => Some(*profit),
            ConfigOption::Infeasible { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BestResponse<T> {
    pub isp: Isp,
    pub q: T,
    pub config: Config,
    pub profit: T,
    /// Indexed by [`Config::index`].
    pub per_config: [ConfigOption<T>; 4],
}

/// Where the best response first leaves NN along the ray `(a, ρa)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdReport<T> {
    pub a_s: T,
    /// Configuration induced just above `a_s`.
    pub branch: Config,
    /// Crossing of the NN and SN revenue lines, if positive.
    pub a_prime: Option<T>,
    /// Crossing of the NN and SS revenue lines, if positive.
    pub a_double_prime: Option<T>,
    pub method: ThresholdMethod,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdMethod {
    ClosedForm,
    Bisection,
}

impl<T: Scalar> Game<T> {
    /// Revenue of `isp` at charge `q_own` under `m_own`, rival on `m_other`.
    pub fn isp_revenue(&self, isp: Isp, q_own: T, m_own: Config, m_other: Config) -> T {
        let p = self.params().p();
        let per_user = (0..2).fold(T::zero(), |acc, i| {
            let price = if m_own.sponsors(i) { q_own } else { p };
            acc + price * self.theta(m_own, i)
        });
        self.share(isp, m_own, m_other) * per_user
    }

    /// Surplus of `isp` in the state `(q1, m1, q2, m2)`.
    pub fn isp_surplus(&self, q1: T, m1: Config, q2: T, m2: Config, isp: Isp) -> T {
        match isp {
            Isp::One => self.isp_revenue(isp, q1, m1, m2),
            Isp::Two => self.isp_revenue(isp, q2, m2, m1),
        }
    }

    /// A charge high enough that NN is the only CP equilibrium of interest.
    pub fn nn_enforcement_price(&self, isp: Isp, q_other: T, m_other: Config) -> T {
        let floor = self.nash_thresholds(isp, q_other, m_other).nn_floor().max(T::zero());
        floor * (T::one() + T::lit(NN_MARKUP)) + T::lit(NN_OFFSET)
    }

    /// Profit-maximising charge and induced configuration for `isp`.
    ///
    /// Ties within [`TIE_TOL`] go to the earlier entry of [`Config::ALL`].
    pub fn best_response(&self, isp: Isp, q_other: T, m_other: Config) -> BestResponse<T> {
        let th = self.nash_thresholds(isp, q_other, m_other);
        let candidates = [
            self.nn_enforcement_price(isp, q_other, m_other),
            th.cp1_alone,
            th.cp2_alone,
            th.ss_ceiling(),
        ];
        let per_config = Config::ALL.map(|m| {
            let q = candidates[m.index()];
            if m == Config::NN || th.admits(m, q) {
                ConfigOption::Feasible {
                    q,
                    profit: self.isp_revenue(isp, q, m, m_other),
                }
            } else {
                ConfigOption::Infeasible { q }
            }
        });

        let tol = T::tol(TIE_TOL);
        let mut best = (
            Config::NN,
            candidates[0],
            per_config[0].profit().unwrap_or_else(T::zero),
        );
        for m in &Config::ALL[1..] {
            if let ConfigOption::Feasible { q, profit } = per_config[m.index()] {
                if profit > best.2 && !approx_eq(profit, best.2, tol) {
                    best = (*m, q, profit);
                }
            }
        }
        BestResponse {
            isp,
            q: best.1,
            config: best.0,
            profit: best.2,
            per_config,
        }
    }

    /// Revenue-rate threshold along `(a1, a2) = (a, ρa)` above which `isp`
    /// stops enforcing NN. The game's own revenue rates are ignored.
    ///
    /// The NN revenue is constant in `a` while the SN and SS revenues are
    /// affine (piecewise for SS), so the crossings have closed forms. The
    /// closed form is confirmed by probing the best response on both sides;
    /// if the probe disagrees (e.g. the SN charge is not an equilibrium at the
    /// crossing) the threshold is located by scan and bisection instead.
    pub fn sponsorship_threshold(
        &self,
        isp: Isp,
        rho: T,
        m_other: Config,
        q_other: T,
        a_max: T,
    ) -> Result<ThresholdReport<T>> {
        if !(rho > T::zero() && rho < T::one()) {
            return Err(ModelError::InvalidParameter {
                name: "rho",
                value: rho.as_f64(),
                reason: "must lie in (0, 1)",
            });
        }
        if !(a_max > T::zero()) {
            return Err(ModelError::InvalidParameter {
                name: "a_max",
                value: a_max.as_f64(),
                reason: "must be positive",
            });
        }
        let at =
            |a: T| -> Result<BestResponse<T>> { Ok(self.with_rates(a, rho * a)?.best_response(isp, q_other, m_other)) };

        let (a_prime, a_double_prime) = self.revenue_crossings(isp, rho, m_other, q_other);
        let closed = match (a_prime, a_double_prime) {
            (Some(x), Some(y)) if y < x => Some((y, Config::SS)),
            (Some(x), _) => Some((x, Config::SN)),
            (None, Some(y)) => Some((y, Config::SS)),
            (None, None) => None,
        };
        if let Some((a_s, branch)) = closed {
            let probe = T::lit(THRESHOLD_PROBE);
            if a_s <= a_max {
                let below = at(a_s * (T::one() - probe))?;
                let above = at(a_s * (T::one() + probe))?;
                if below.config == Config::NN && above.config == branch {
                    return Ok(ThresholdReport {
                        a_s,
                        branch,
                        a_prime,
                        a_double_prime,
                        method: ThresholdMethod::ClosedForm,
                    });
                }
            }
        }

        // scan for the first non-NN response, then bisect
        let n = T::lit(THRESHOLD_SCAN as f64);
        let mut lo = T::zero();
        let mut hi = None;
        for k in 1..=THRESHOLD_SCAN {
            let a = a_max * T::lit(k as f64) / n;
            if at(a)?.config != Config::NN {
                hi = Some(a);
                break;
            }
            lo = a;
        }
        let Some(mut hi) = hi else {
            return Err(ModelError::NoSponsorship { a_max: a_max.as_f64() });
        };
        let two = T::lit(2.0);
        for _ in 0..200 {
            let mid = (lo + hi) / two;
            if mid <= lo || mid >= hi || hi - lo <= T::tol(1e-13) * hi {
                break;
            }
            if at(mid)?.config == Config::NN {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(ThresholdReport {
            a_s: hi,
            branch: at(hi)?.config,
            a_prime,
            a_double_prime,
            method: ThresholdMethod::Bisection,
        })
    }

    /// Positive crossings of the NN revenue with the SN and SS revenue lines.
    fn revenue_crossings(&self, isp: Isp, rho: T, m_other: Config, q_other: T) -> (Option<T>, Option<T>) {
        let coef = self.nash_coefficients(isp, m_other);
        let p = self.params().p();
        let c = self.params().c();
        let x = |m: Config| self.share(isp, m, m_other);
        let th = |m: Config, i: usize| self.theta(m, i);
        let r_nn = self.isp_revenue(isp, T::zero(), Config::NN, m_other);

        let positive = |v: T| if v > T::zero() && v.is_finite() { Some(v) } else { None };

        // r_SN(a) = x_SN·(p·θ2 + (a·α1 + q·α2)·θ1)
        let sn_intercept = x(Config::SN) * (p * th(Config::SN, 1) + q_other * coef.alpha2 * th(Config::SN, 0));
        let sn_slope = x(Config::SN) * coef.alpha1 * th(Config::SN, 0);
        let a_prime = if sn_slope > T::zero() {
            positive((r_nn - sn_intercept) / sn_slope)
        } else {
            None
        };

        // r_SS(a) = x_SS·c·min(a·γ1 + q·γ2, a·ρ·δ1 + q·δ2); both lines must clear r_NN
        let level = r_nn / (x(Config::SS) * c);
        let cross = |slope: T, intercept: T| {
            if slope > T::zero() {
                Some((level - intercept) / slope)
            } else {
                None
            }
        };
        let a_double_prime = match (
            cross(coef.gamma1, q_other * coef.gamma2),
            cross(rho * coef.delta1, q_other * coef.delta2),
        ) {
            (Some(u), Some(v)) => positive(u.max(v)),
            _ => None,
        };
        (a_prime, a_double_prime)
    }
}

/// ISP surplus in the Hotelling duopoly.
pub fn isp_surplus<T: Scalar>(params: &ModelParams<T>, q1: T, m1: Config, q2: T, m2: Config, isp: Isp) -> Result<T> {
    Ok(Game::duopoly(params.clone())?.isp_surplus(q1, m1, q2, m2, isp))
}

pub fn best_response<T: Scalar>(
    params: &ModelParams<T>,
    q_other: T,
    m_other: Config,
    isp: Isp,
) -> Result<BestResponse<T>> {
    Ok(Game::duopoly(params.clone())?.best_response(isp, q_other, m_other))
}

/// Threshold for ISP1 along `(a, ρa)`; the revenue rates in `params` are ignored.
pub fn sponsorship_threshold<T: Scalar>(
    params: &ModelParams<T>,
    rho: T,
    m_other: Config,
    q_other: T,
) -> Result<ThresholdReport<T>> {
    Game::duopoly(params.clone())?.sponsorship_threshold(Isp::One, rho, m_other, q_other, T::lit(DEFAULT_A_MAX))
}
