//! Evaluation context shared by the CP, ISP and dynamics layers.

use crate::error::{ModelError, Result};
use crate::market::{share_unchecked, Isp, MarketMode};
use crate::params::ModelParams;
use crate::scalar::Scalar;
use crate::user_model::{solve_all, Config, ConsumptionProfile};

/// Model parameters together with the solved consumption profile of every
/// configuration and the market-split rule.
///
/// Construction checks the Hotelling validity condition
/// `min(t1, t2) > u^SS − u^NN` under [`MarketMode::Duopoly`].
#[derive(Debug, Clone)]
pub struct Game<T: Scalar> {
    params: ModelParams<T>,
    mode: MarketMode<T>,
    profiles: [ConsumptionProfile<T>; 4],
}

impl<T: Scalar> Game<T> {
    pub fn new(params: ModelParams<T>, mode: MarketMode<T>) -> Result<Self> {
        let profiles = solve_all(&params);
        if let MarketMode::Duopoly = mode {
            let gap = profiles[Config::SS.index()].u - profiles[Config::NN.index()].u;
            for (name, t) in [("t1", params.t1()), ("t2", params.t2())] {
                if !(t > gap) {
                    return Err(ModelError::HotellingViolated {
                        name,
                        t: t.as_f64(),
                        gap: gap.as_f64(),
                    });
                }
            }
        }
        Ok(Self { params, mode, profiles })
    }

    pub fn duopoly(params: ModelParams<T>) -> Result<Self> {
        Self::new(params, MarketMode::Duopoly)
    }

    /// Same parameters with frozen shares (t2/(t1+t2) for ISP1).
    pub fn monopoly_benchmark(params: ModelParams<T>) -> Result<Self> {
        let mode = MarketMode::monopoly_benchmark(params.t1(), params.t2());
        Self::new(params, mode)
    }

    /// Same game with different CP revenue rates; consumption is unaffected.
    pub fn with_rates(&self, a1: T, a2: T) -> Result<Self> {
        Ok(Self {
            params: self.params.with_rates(a1, a2)?,
            ..self.clone()
        })
    }

    pub fn params(&self) -> &ModelParams<T> {
        &self.params
    }

    pub fn mode(&self) -> MarketMode<T> {
        self.mode
    }

    pub fn profile(&self, m: Config) -> &ConsumptionProfile<T> {
        &self.profiles[m.index()]
    }

    /// Per-subscriber consumption of CP `i` under configuration `m`.
    pub fn theta(&self, m: Config, i: usize) -> T {
        self.profiles[m.index()].theta(i)
    }

    /// Per-subscriber surplus under configuration `m`.
    pub fn surplus(&self, m: Config) -> T {
        self.profiles[m.index()].u
    }

    /// Transport cost of `isp`.
    pub fn transport(&self, isp: Isp) -> T {
        match isp {
            Isp::One => self.params.t1(),
            Isp::Two => self.params.t2(),
        }
    }

    /// ISP1's market share when ISP1 runs `m1` and ISP2 runs `m2`.
    pub fn share_isp1(&self, m1: Config, m2: Config) -> T {
        match self.mode {
            MarketMode::Duopoly => {
                share_unchecked(self.surplus(m1), self.surplus(m2), self.params.t1(), self.params.t2())
            }
            MarketMode::Monopoly { fixed_share } => fixed_share,
        }
    }

    /// Share of `isp` when it runs `m_own` and its rival runs `m_other`.
    pub fn share(&self, isp: Isp, m_own: Config, m_other: Config) -> T {
        match isp {
            Isp::One => self.share_isp1(m_own, m_other),
            Isp::Two => T::one() - self.share_isp1(m_other, m_own),
        }
    }
}
