//! Alternating best-response dynamics between the ISPs and system
//! equilibrium checks.

use std::collections::HashMap;

use serde::Serialize;

use crate::cp_game::ConfigSet;
use crate::error::{ModelError, Result};
use crate::game::Game;
use crate::isp_strategy::TIE_TOL;
use crate::market::{aggregate_user_surplus, Isp, MarketMode};
use crate::scalar::{approx_eq, Scalar};
use crate::user_model::Config;

/// Two charges are the same state when they agree to this (relative, floored at 1).
pub const STATE_TOL: f64 = 1e-9;
/// Relative gain a CP needs for a two-platform flip to count as profitable.
pub const DEVIATION_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_ROUNDS: usize = 100;

/// Both ISPs' charges and configurations with every derived quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SystemState<T> {
    pub q1: T,
    pub m1: Config,
    pub q2: T,
    pub m2: Config,
    /// ISP1's market share.
    pub x: T,
    pub isp1: T,
    pub isp2: T,
    pub cp1: T,
    pub cp2: T,
    pub users_with_transport: T,
    pub users_without_transport: T,
}

impl<T: Scalar> SystemState<T> {
    pub fn evaluate(game: &Game<T>, q1: T, m1: Config, q2: T, m2: Config) -> Self {
        let x = game.share_isp1(m1, m2);
        let cp = game.cp_surplus(q1, m1, q2, m2);
        let (u1, u2) = (game.surplus(m1), game.surplus(m2));
        let (t1, t2) = (game.params().t1(), game.params().t2());
        Self {
            q1,
            m1,
            q2,
            m2,
            x,
            isp1: game.isp_surplus(q1, m1, q2, m2, Isp::One),
            isp2: game.isp_surplus(q1, m1, q2, m2, Isp::Two),
            cp1: cp.cp1,
            cp2: cp.cp2,
            users_with_transport: aggregate_user_surplus(u1, u2, x, t1, t2, true),
            users_without_transport: aggregate_user_surplus(u1, u2, x, t1, t2, false),
        }
    }

    pub fn charge(&self, isp: Isp) -> T {
        match isp {
            Isp::One => self.q1,
            Isp::Two => self.q2,
        }
    }

    pub fn config(&self, isp: Isp) -> Config {
        match isp {
            Isp::One => self.m1,
            Isp::Two => self.m2,
        }
    }

    pub fn cp(&self, i: usize) -> T {
        if i == 0 {
            self.cp1
        } else {
            self.cp2
        }
    }

    /// Same configurations on both ISPs and charges within `q_tol`.
    pub fn is_symmetric(&self, q_tol: T) -> bool {
        self.m1 == self.m2 && (self.q1 - self.q2).abs() <= q_tol
    }

    /// Equal configurations and charges within [`STATE_TOL`].
    pub fn same_as(&self, other: &Self) -> bool {
        let tol = T::tol(STATE_TOL);
        self.m1 == other.m1
            && self.m2 == other.m2
            && approx_eq(self.q1, other.q1, tol)
            && approx_eq(self.q2, other.q2, tol)
    }

    fn key(&self) -> (Config, Config, i64, i64) {
        let round = |q: T| (q.as_f64() / STATE_TOL).round() as i64;
        (self.m1, self.m2, round(self.q1), round(self.q2))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum DynamicsOutcome<T> {
    /// `rounds` full rounds were needed to reach `state`; one more left it unchanged.
    Converged {
        state: SystemState<T>,
        rounds: usize,
    },
    /// The states after consecutive rounds, starting at the first repeated one.
    Oscillating {
        cycle: Vec<SystemState<T>>,
        period: usize,
    },
    MaxRoundsExceeded {
        history: Vec<SystemState<T>>,
    },
}

impl<T: Scalar> DynamicsOutcome<T> {
    pub fn converged(&self) -> Option<(&SystemState<T>, usize)> {
        match self {
            DynamicsOutcome::Converged { state, rounds } => Some((state, *rounds)),
            _ => None,
        }
    }

    /// Last recorded state.
    pub fn final_state(&self) -> &SystemState<T> {
        match self {
            DynamicsOutcome::Converged { state, .. } => state,
            DynamicsOutcome::Oscillating { cycle, .. } => cycle.last().expect("non-empty cycle"),
            DynamicsOutcome::MaxRoundsExceeded { history } => history.last().expect("non-empty history"),
        }
    }
}

impl<T: Scalar> Game<T> {
    /// Charge ISP2 starts with when it opens in `m2` against ISP1 in NN.
    pub fn initial_charge(&self, m2: Config) -> T {
        let br = self.best_response(Isp::Two, T::zero(), Config::NN);
        match br.per_config[m2.index()] {
            crate::isp_strategy::ConfigOption::Feasible { q, .. }
            | crate::isp_strategy::ConfigOption::Infeasible { q } => q,
        }
    }

    /// Alternating best responses, ISP1 first, starting from ISP2 at
    /// `(initial_q2, initial_m2)`. Without an explicit charge ISP2 starts at
    /// [`Game::initial_charge`].
    pub fn run_dynamics(
        &self,
        initial_m2: Config,
        initial_q2: Option<T>,
        max_rounds: usize,
    ) -> Result<DynamicsOutcome<T>> {
        if max_rounds < 2 {
            return Err(ModelError::InvalidParameter {
                name: "max_rounds",
                value: max_rounds as f64,
                reason: "must be at least 2",
            });
        }
        let mut q2 = initial_q2.unwrap_or_else(|| self.initial_charge(initial_m2));
        if !(q2 >= T::zero()) || !q2.is_finite() {
            return Err(ModelError::InvalidParameter {
                name: "initial_q2",
                value: q2.as_f64(),
                reason: "must be finite and non-negative",
            });
        }
        let mut m2 = initial_m2;
        let mut history: Vec<SystemState<T>> = Vec::with_capacity(max_rounds);
        let mut seen = HashMap::new();

        for round in 1..=max_rounds {
            let r1 = self.best_response(Isp::One, q2, m2);
            let r2 = self.best_response(Isp::Two, r1.q, r1.config);
            q2 = r2.q;
            m2 = r2.config;
            let state = SystemState::evaluate(self, r1.q, r1.config, q2, m2);

            if let Some(prev) = history.last() {
                if state.same_as(prev) {
                    return Ok(DynamicsOutcome::Converged {
                        state: *prev,
                        rounds: round - 1,
                    });
                }
            }
            if let Some(&first) = seen.get(&state.key()) {
                let cycle = history.split_off(first);
                let period = cycle.len();
                return Ok(DynamicsOutcome::Oscillating { cycle, period });
            }
            seen.insert(state.key(), history.len());
            history.push(state);
        }
        Ok(DynamicsOutcome::MaxRoundsExceeded { history })
    }

    /// Checks that `state` is a system equilibrium.
    pub fn verify_system_equilibrium(&self, state: &SystemState<T>) -> VerificationReport<T> {
        let mut report = VerificationReport {
            best_response: Check::default(),
            cp_nash: Check::default(),
            strong: Check::default(),
        };
        let tol = T::tol(STATE_TOL);

        for isp in [Isp::One, Isp::Two] {
            let (q_own, m_own) = (state.charge(isp), state.config(isp));
            let (q_other, m_other) = (state.charge(isp.other()), state.config(isp.other()));
            let br = self.best_response(isp, q_other, m_other);
            let equilibria = self.equilibrium_configs(isp, q_own, q_other, m_other);

            let reproduced = br.config == m_own && (m_own == Config::NN || approx_eq(br.q, q_own, tol));
            // an equally profitable alternative to the reported response is still optimal
            let own_profit = self.isp_revenue(isp, q_own, m_own, m_other);
            let optimal = equilibria.contains(m_own)
                && (own_profit >= br.profit || approx_eq(own_profit, br.profit, T::tol(TIE_TOL)));
            if !(reproduced || optimal) {
                report.best_response.fail(Witness::BetterResponse {
                    isp,
                    q: br.q,
                    config: br.config,
                    profit: br.profit,
                    state_profit: own_profit,
                });
            }
            if !equilibria.contains(m_own) {
                report.cp_nash.fail(Witness::NotCpEquilibrium {
                    isp,
                    config: m_own,
                    equilibria,
                });
            }
        }

        let current = [state.cp1, state.cp2];
        for (i, &before) in current.iter().enumerate() {
            let (m1, m2) = (state.m1.flip(i), state.m2.flip(i));
            let after = self.cp_surplus(state.q1, m1, state.q2, m2).get(i);
            let margin = T::tol(DEVIATION_TOL) * T::one().max(before.abs());
            if after > before + margin {
                report.strong.fail(Witness::ProfitableFlip {
                    cp: i + 1,
                    m1,
                    m2,
                    gain: after - before,
                });
            }
        }
        report
    }

    /// Closed-form charges and bounds for the symmetric SN-SN and SS-SS equilibria.
    pub fn symmetric_closed_forms(&self) -> SymmetricClosedForms<T> {
        let p = self.params().p();
        let c = self.params().c();
        let th = |m: Config, i: usize| self.theta(m, i);
        let (nn, sn, sn2) = (th(Config::NN, 0), th(Config::SN, 0), th(Config::SN, 1));
        let half = c / T::lit(2.0);
        let ss = self.nash_coefficients(Isp::One, Config::SS);
        SymmetricClosedForms {
            sn_ratio: T::one() - nn / sn,
            ss_ratio: T::one() - sn2 / half,
            a_sn: p * sn / (sn - nn),
            rho_sn: T::lit(0.5) * (sn - nn) / (self.share(Isp::One, Config::SS, Config::SN) * c),
            rho_n: ss.alpha1 / (T::one() - ss.alpha2) / (T::one() - sn2 / half),
            r_nn_against_ss: self.isp_revenue(Isp::One, T::zero(), Config::NN, Config::SS),
            p,
            c,
        }
    }
}

/// Constants describing the symmetric equilibria.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymmetricClosedForms<T> {
    /// `1 − θ1^NN / θ1^SN`; the SN-SN charge is `a` times this.
    pub sn_ratio: T,
    /// `1 − θ2^SN / (c/2)`; the SS-SS charge is `aρ` times this.
    pub ss_ratio: T,
    /// Revenue rate above which the SN-SN revenue beats `0.5·p·c`.
    pub a_sn: T,
    /// Upper bound on ρ for the SN-SN equilibrium.
    pub rho_sn: T,
    /// Lower bound on ρ keeping ISP1 away from SN in the SS-SS state.
    pub rho_n: T,
    /// ISP1's revenue if it enforces NN against an SS rival.
    pub r_nn_against_ss: T,
    p: T,
    c: T,
}

impl<T: Scalar> SymmetricClosedForms<T> {
    pub fn q_sn(&self, a: T) -> T {
        a * self.sn_ratio
    }

    pub fn q_ss(&self, a: T, rho: T) -> T {
        a * rho * self.ss_ratio
    }

    /// Symmetric SN-SN revenue per ISP.
    pub fn revenue_sn(&self, a: T, theta_sn: T, theta_nn: T) -> T {
        T::lit(0.5) * (a * (theta_sn - theta_nn) + self.p * (self.c - theta_sn))
    }

    /// Revenue rate above which SS-SS beats enforcing NN against SS.
    pub fn a_n(&self, rho: T) -> T {
        self.r_nn_against_ss / (T::lit(0.5) * self.c * rho * self.ss_ratio)
    }
}

/// Outcome of one verification check with the deviations that broke it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check<T> {
    pub passed: bool,
    pub witnesses: Vec<Witness<T>>,
}

impl<T> Default for Check<T> {
    fn default() -> Self {
        Self {
            passed: true,
            witnesses: Vec::new(),
        }
    }
}

impl<T> Check<T> {
    fn fail(&mut self, w: Witness<T>) {
        self.passed = false;
        self.witnesses.push(w);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness<T> {
    /// `isp` earns more by responding with `(q, config)`.
    BetterResponse {
        isp: Isp,
        q: T,
        config: Config,
        profit: T,
        state_profit: T,
    },
    /// `config` is not a CP equilibrium on `isp` at the state's charges.
    NotCpEquilibrium {
        isp: Isp,
        config: Config,
        equilibria: ConfigSet,
    },
    /// CP `cp` (1-based) gains `gain` by switching to `(m1, m2)`.
    ProfitableFlip { cp: usize, m1: Config, m2: Config, gain: T },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport<T> {
    /// Each ISP's charge and configuration is a best response.
    pub best_response: Check<T>,
    /// Each configuration is a CP Nash equilibrium at the state's charges.
    pub cp_nash: Check<T>,
    /// No CP gains by reversing its decision on both ISPs at once.
    pub strong: Check<T>,
}

impl<T> VerificationReport<T> {
    pub fn all_passed(&self) -> bool {
        self.best_response.passed && self.cp_nash.passed && self.strong.passed
    }
}

/// Dynamics under the Hotelling split.
pub fn run_dynamics<T: Scalar>(
    params: &crate::params::ModelParams<T>,
    initial_m2: Config,
    initial_q2: Option<T>,
    max_rounds: usize,
) -> Result<DynamicsOutcome<T>> {
    Game::new(params.clone(), MarketMode::Duopoly)?.run_dynamics(initial_m2, initial_q2, max_rounds)
}

pub fn verify_system_equilibrium<T: Scalar>(
    params: &crate::params::ModelParams<T>,
    state: &SystemState<T>,
) -> Result<VerificationReport<T>> {
    Ok(Game::duopoly(params.clone())?.verify_system_equilibrium(state))
}
