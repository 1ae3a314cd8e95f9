//! Hotelling split of subscribers between the two ISPs.

use serde::Serialize;

use crate::error::{ModelError, Result};
use crate::scalar::Scalar;

/// Identifies one of the two ISPs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Isp {
    One,
    Two,
}

impl Isp {
    pub fn other(self) -> Self {
        match self {
            Isp::One => Isp::Two,
            Isp::Two => Isp::One,
        }
    }

    pub fn number(self) -> u8 {
        match self {
            Isp::One => 1,
            Isp::Two => 2,
        }
    }

    pub fn from_number(n: u8) -> Option<Self> {
        match n {
            1 => Some(Isp::One),
            2 => Some(Isp::Two),
            _ => None,
        }
    }
}

/// How subscribers are split between the ISPs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MarketMode<T> {
    /// Shares follow the Hotelling split.
    Duopoly,
    /// Shares are frozen: ISP1 holds `fixed_share`, ISP2 the rest.
    Monopoly { fixed_share: T },
}

impl<T: Scalar> MarketMode<T> {
    pub fn monopoly(fixed_share: T) -> Result<Self> {
        if fixed_share >= T::zero() && fixed_share <= T::one() {
            Ok(MarketMode::Monopoly { fixed_share })
        } else {
            Err(ModelError::InvalidParameter {
                name: "fixed_share",
                value: fixed_share.as_f64(),
                reason: "must lie in [0, 1]",
            })
        }
    }

    /// Frozen share ISP1 would hold with no sponsorship anywhere: `t2 / (t1 + t2)`.
    pub fn monopoly_benchmark(t1: T, t2: T) -> Self {
        MarketMode::Monopoly {
            fixed_share: benchmark_share(t1, t2),
        }
    }
}

/// ISP1's share when both ISPs offer the same surplus.
pub fn benchmark_share<T: Scalar>(t1: T, t2: T) -> T {
    t2 / (t1 + t2)
}

/// ISP1's market share `(u1 − u2 + t2) / (t1 + t2)`.
///
/// Requires `t1, t2 > |u1 − u2|` so that the indifferent subscriber lies
/// strictly inside the unit interval.
pub fn market_share<T: Scalar>(u1: T, u2: T, t1: T, t2: T) -> Result<T> {
    let gap = (u1 - u2).abs();
    for (name, t) in [("t1", t1), ("t2", t2)] {
        if !(t > gap) {
            return Err(ModelError::HotellingViolated {
                name,
                t: t.as_f64(),
                gap: gap.as_f64(),
            });
        }
    }
    Ok(share_unchecked(u1, u2, t1, t2))
}

#[inline]
pub(crate) fn share_unchecked<T: Scalar>(u1: T, u2: T, t1: T, t2: T) -> T {
    (u1 - u2 + t2) / (t1 + t2)
}

/// Total user surplus: `x·u1 + (1−x)·u2`, minus the transport costs
/// `t1·x²/2 + t2·(1−x)²/2` when `include_transport` is set.
pub fn aggregate_user_surplus<T: Scalar>(u1: T, u2: T, x: T, t1: T, t2: T, include_transport: bool) -> T {
    let y = T::one() - x;
    let gross = x * u1 + y * u2;
    if include_transport {
        let half = T::lit(0.5);
        gross - half * t1 * x * x - half * t2 * y * y
    } else {
        gross
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn equal_surplus_splits_evenly() {
        assert_eq!(market_share(1.2, 1.2, 3.0, 3.0).unwrap(), 0.5);
    }

    #[test]
    fn sn_against_nn() {
        let x = market_share(1.744_283_733, 0.799_644_249, 3.0, 3.0).unwrap();
        assert_abs_diff_eq!(x, 0.657_439_914, epsilon = 1e-8);
    }

    #[test]
    fn asymmetric_costs_favor_the_stickier_isp() {
        let x = market_share(0.8, 0.8, 3.0, 6.0).unwrap();
        assert_abs_diff_eq!(x, 2.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn validity_violation_names_the_cost() {
        let err = market_share(2.0, 0.0, 3.0, 1.5).unwrap_err();
        match err {
            ModelError::HotellingViolated { name, .. } => assert_eq!(name, "t2"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn label_symmetry() {
        let x = market_share(1.7, 0.4, 2.0, 2.0).unwrap();
        let y = market_share(0.4, 1.7, 2.0, 2.0).unwrap();
        assert_abs_diff_eq!(x + y, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn aggregate_surplus_variants() {
        let u = 1.3;
        assert_abs_diff_eq!(aggregate_user_surplus(u, u, 0.5, 3.0, 3.0, false), u);
        assert_abs_diff_eq!(
            aggregate_user_surplus(u, u, 0.5, 3.0, 3.0, true),
            u - 0.75,
            epsilon = 1e-15
        );
    }

    #[test]
    fn monopoly_share_is_checked() {
        assert!(MarketMode::monopoly(1.2).is_err());
        assert_eq!(
            MarketMode::monopoly_benchmark(3.0, 6.0),
            MarketMode::Monopoly { fixed_share: 2.0 / 3.0 }
        );
    }
}
