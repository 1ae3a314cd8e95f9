//! Sponsorship game between the two CPs on a single ISP.
//!
//! The rival ISP's configuration and price are held fixed; each CP decides
//! whether to sponsor on this ISP only. The equilibrium conditions reduce to
//! comparing this ISP's sponsorship charge against four affine thresholds
//! built from the [`NashCoefficients`].

use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::Result;
use crate::game::Game;
use crate::market::Isp;
use crate::params::ModelParams;
use crate::scalar::Scalar;
use crate::user_model::Config;

/// Slack applied to the equilibrium inequalities.
pub const FEASIBILITY_SLACK: f64 = 1e-12;

/// Coefficients of the CP equilibrium thresholds on one ISP, for a fixed
/// configuration `m_other` on the rival ISP.
///
/// * `alpha*`: CP1 joining alone (NN ↔ SN)
/// * `beta*`:  CP2 joining alone (NN ↔ NS)
/// * `gamma*`: CP1 joining a sponsoring CP2 (NS ↔ SS)
/// * `delta*`: CP2 joining a sponsoring CP1 (SN ↔ SS)
///
/// The `*1` coefficient multiplies the CP's revenue rate, the `*2` the
/// rival ISP's charge (zero unless the CP sponsors there).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NashCoefficients<T> {
    pub alpha1: T,
    pub alpha2: T,
    pub beta1: T,
    pub beta2: T,
    pub gamma1: T,
    pub gamma2: T,
    pub delta1: T,
    pub delta2: T,
    pub m_other: Config,
    /// Set when a zero-consumption denominator forced a coefficient pair to (1, 0).
    pub degenerate: bool,
}

impl<T: Scalar> NashCoefficients<T> {
    pub fn as_array(&self) -> [T; 8] {
        [
            self.alpha1,
            self.alpha2,
            self.beta1,
            self.beta2,
            self.gamma1,
            self.gamma2,
            self.delta1,
            self.delta2,
        ]
    }

    /// Evaluates the four thresholds at revenue rates `(a1, a2)` and rival charge `q_other`.
    pub fn thresholds(&self, a1: T, a2: T, q_other: T) -> NashThresholds<T> {
        NashThresholds {
            cp1_alone: a1 * self.alpha1 + q_other * self.alpha2,
            cp2_alone: a2 * self.beta1 + q_other * self.beta2,
            cp1_joining: a1 * self.gamma1 + q_other * self.gamma2,
            cp2_joining: a2 * self.delta1 + q_other * self.delta2,
        }
    }
}

/// Highest charge at which each CP still prefers sponsoring, per situation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NashThresholds<T> {
    /// CP1 vs NN ↔ SN.
    pub cp1_alone: T,
    /// CP2 vs NN ↔ NS.
    pub cp2_alone: T,
    /// CP1 vs NS ↔ SS.
    pub cp1_joining: T,
    /// CP2 vs SN ↔ SS.
    pub cp2_joining: T,
}

impl<T: Scalar> NashThresholds<T> {
    /// Lowest charge at which NN is an equilibrium.
    pub fn nn_floor(&self) -> T {
        self.cp1_alone.max(self.cp2_alone)
    }

    /// Highest charge at which SS is an equilibrium.
    pub fn ss_ceiling(&self) -> T {
        self.cp1_joining.min(self.cp2_joining)
    }

    /// Whether `m` is a CP equilibrium at charge `q`. Boundaries are inclusive.
    pub fn admits(&self, m: Config, q: T) -> bool {
        let le = |lhs: T, rhs: T| lhs <= rhs + slack(rhs);
        match m {
            Config::NN => le(self.nn_floor(), q),
            Config::SN => le(self.cp2_joining, q) && le(q, self.cp1_alone),
            Config::NS => le(self.cp1_joining, q) && le(q, self.cp2_alone),
            Config::SS => le(q, self.ss_ceiling()),
        }
    }
}

fn slack<T: Scalar>(bound: T) -> T {
    T::tol(FEASIBILITY_SLACK) * T::one().max(bound.abs())
}

/// Set of sponsorship configurations, iterated in [`Config::ALL`] order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ConfigSet([bool; 4]);

impl ConfigSet {
    pub fn insert(&mut self, m: Config) {
        self.0[m.index()] = true;
    }

    pub fn contains(&self, m: Config) -> bool {
        self.0[m.index()]
    }

    pub fn iter(&self) -> impl Iterator<Item = Config> + '_ {
        Config::ALL.into_iter().filter(|m| self.contains(*m))
    }

    pub fn len(&self) -> usize {
        self.0.iter().filter(|b| **b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl FromIterator<Config> for ConfigSet {
    fn from_iter<I: IntoIterator<Item = Config>>(iter: I) -> Self {
        let mut set = ConfigSet::default();
        for m in iter {
            set.insert(m);
        }
        set
    }
}

impl fmt::Display for ConfigSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = self.iter().map(Config::as_str).collect();
        write!(f, "{{{}}}", names.join(","))
    }
}

impl Serialize for ConfigSet {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

/// Surplus of both CPs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CpSurplusReport<T> {
    pub cp1: T,
    pub cp2: T,
}

impl<T: Scalar> CpSurplusReport<T> {
    pub fn get(&self, i: usize) -> T {
        if i == 0 {
            self.cp1
        } else {
            self.cp2
        }
    }
}

impl<T: Scalar> Game<T> {
    /// Equilibrium coefficients for the CPs on `isp` when the rival runs `m_other`.
    pub fn nash_coefficients(&self, isp: Isp, m_other: Config) -> NashCoefficients<T> {
        let x = |m: Config| self.share(isp, m, m_other);
        let th = |m: Config, i: usize| self.theta(m, i);
        let mut degenerate = false;

        // Generic pair for CP `i` moving from `from` to `to` (adding its sponsorship).
        let mut pair = |i: usize, from: Config, to: Config| -> (T, T) {
            let gain = x(to) - x(from);
            let den = x(to) * th(to, i);
            if !(den > T::zero()) {
                degenerate = true;
                return (T::one(), T::zero());
            }
            let rival_part = gain * th(m_other, i);
            let first = T::one() - (rival_part + x(from) * th(from, i)) / den;
            let second = if m_other.sponsors(i) {
                rival_part / den
            } else {
                T::zero()
            };
            (first, second)
        };

        let (alpha1, alpha2) = pair(0, Config::NN, Config::SN);
        let (beta1, beta2) = pair(1, Config::NN, Config::NS);
        let (gamma1, gamma2) = pair(0, Config::NS, Config::SS);
        let (delta1, delta2) = pair(1, Config::SN, Config::SS);
        NashCoefficients {
            alpha1,
            alpha2,
            beta1,
            beta2,
            gamma1,
            gamma2,
            delta1,
            delta2,
            m_other,
            degenerate,
        }
    }

    /// Thresholds on `isp`'s charge given the rival's charge and configuration.
    pub fn nash_thresholds(&self, isp: Isp, q_other: T, m_other: Config) -> NashThresholds<T> {
        let p = self.params();
        self.nash_coefficients(isp, m_other).thresholds(p.a1(), p.a2(), q_other)
    }

    /// Configurations on `isp` that are CP Nash equilibria at charge `q_own`.
    pub fn equilibrium_configs(&self, isp: Isp, q_own: T, q_other: T, m_other: Config) -> ConfigSet {
        let th = self.nash_thresholds(isp, q_other, m_other);
        Config::ALL.into_iter().filter(|m| th.admits(*m, q_own)).collect()
    }

    /// Surplus of each CP given both ISPs' charges and configurations.
    pub fn cp_surplus(&self, q1: T, m1: Config, q2: T, m2: Config) -> CpSurplusReport<T> {
        let x = self.share_isp1(m1, m2);
        let a = [self.params().a1(), self.params().a2()];
        let per_cp = |i: usize| {
            let margin = |q: T, m: Config| if m.sponsors(i) { a[i] - q } else { a[i] };
            x * margin(q1, m1) * self.theta(m1, i) + (T::one() - x) * margin(q2, m2) * self.theta(m2, i)
        };
        CpSurplusReport {
            cp1: per_cp(0),
            cp2: per_cp(1),
        }
    }
}

/// Coefficients for ISP1 under the Hotelling split, with ISP2 running `m2`.
pub fn nash_coefficients<T: Scalar>(params: &ModelParams<T>, m2: Config) -> Result<NashCoefficients<T>> {
    Ok(Game::duopoly(params.clone())?.nash_coefficients(Isp::One, m2))
}

/// CP equilibria on ISP1 at charge `q1`, with ISP2 running `m2` at charge `q2`.
pub fn equilibrium_configs<T: Scalar>(params: &ModelParams<T>, q1: T, q2: T, m2: Config) -> Result<ConfigSet> {
    Ok(Game::duopoly(params.clone())?.equilibrium_configs(Isp::One, q1, q2, m2))
}

pub fn cp_surplus<T: Scalar>(
    params: &ModelParams<T>,
    q1: T,
    m1: Config,
    q2: T,
    m2: Config,
) -> Result<CpSurplusReport<T>> {
    Ok(Game::duopoly(params.clone())?.cp_surplus(q1, m1, q2, m2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn game(a1: f64, a2: f64) -> Game<f64> {
        Game::duopoly(ModelParams::log(0.35, 4.0, 3.0, a1, a2).unwrap()).unwrap()
    }

    #[test]
    fn indicator_terms_vanish_against_nn() {
        let c = game(2.0, 0.2).nash_coefficients(Isp::One, Config::NN);
        assert_eq!((c.alpha2, c.beta2, c.gamma2, c.delta2), (0.0, 0.0, 0.0, 0.0));
        assert!(!c.degenerate);
    }

    #[test]
    fn alpha1_against_nn() {
        // x_NN = 1/2, so α1 = 1 − θ1^NN / θ1^SN = 1 − 13/23
        let c = game(2.0, 0.2).nash_coefficients(Isp::One, Config::NN);
        assert_abs_diff_eq!(c.alpha1, 10.0 / 23.0, epsilon = 1e-12);
    }

    #[test]
    fn gamma_equals_delta_against_ss() {
        let c = game(1.0, 1.0).nash_coefficients(Isp::One, Config::SS);
        assert_abs_diff_eq!(c.gamma1, c.delta1, epsilon = 1e-14);
        assert_abs_diff_eq!(c.gamma2, c.delta2, epsilon = 1e-14);
    }

    #[test]
    fn prohibitive_charge_leaves_only_nn() {
        let g = game(2.0, 0.2);
        for m2 in Config::ALL {
            let set = g.equilibrium_configs(Isp::One, 2.0 + 0.2 + 1.0 + 0.01, 1.0, m2);
            assert_eq!(set.iter().collect::<Vec<_>>(), vec![Config::NN]);
        }
    }

    #[test]
    fn free_sponsorship_admits_ss() {
        let set = game(2.0, 0.2).equilibrium_configs(Isp::One, 0.0, 0.0, Config::NN);
        assert!(set.contains(Config::SS));
    }

    #[test]
    fn boundary_charge_admits_sn_and_nn() {
        let g = game(2.0, 0.2);
        let q1 = 2.0 * 10.0 / 23.0;
        let set = g.equilibrium_configs(Isp::One, q1, 5.0, Config::NN);
        assert!(set.contains(Config::SN), "{set}");
        assert!(set.contains(Config::NN), "{set}");
    }

    #[test]
    fn nn_everywhere_pays_no_charges() {
        let g = game(2.0, 0.2);
        let s = g.cp_surplus(7.0, Config::NN, 3.0, Config::NN);
        assert_abs_diff_eq!(s.cp1, 2.0 * 13.0 / 7.0, epsilon = 1e-12);
        assert_abs_diff_eq!(s.cp2, 0.2 * 13.0 / 7.0, epsilon = 1e-12);
    }

    #[test]
    fn symmetric_sn_price_neutralises_cp1() {
        let (a, a2) = (3.0, 0.3);
        let g = game(a, a2);
        let q = a * (1.0 - g.theta(Config::NN, 0) / g.theta(Config::SN, 0));
        let s = g.cp_surplus(q, Config::SN, q, Config::SN);
        assert_abs_diff_eq!(s.cp1, a * g.theta(Config::NN, 0), epsilon = 1e-12);
        assert_abs_diff_eq!(s.cp2, a2 * g.theta(Config::SN, 1), epsilon = 1e-12);
        assert!(s.cp2 < a2 * g.theta(Config::NN, 1));
    }

    #[test]
    fn config_set_display() {
        let set: ConfigSet = [Config::SS, Config::NN].into_iter().collect();
        assert_eq!(set.to_string(), "{NN,SS}");
        assert_eq!(set.len(), 2);
    }
}
