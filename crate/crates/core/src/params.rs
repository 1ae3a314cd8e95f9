use crate::error::{ModelError, Result};
use crate::scalar::Scalar;
use crate::utility::UtilitySpec;

/// Exogenous quantities of the market.
///
/// All fields are validated at construction; use the `with_*` methods to
/// derive a modified copy.
#[derive(Debug, Clone)]
pub struct ModelParams<T: Scalar> {
    p: T,
    c: T,
    t1: T,
    t2: T,
    a1: T,
    a2: T,
    utility: UtilitySpec<T>,
}

impl<T: Scalar> ModelParams<T> {
    /// * `p` – user price per unit of data
    /// * `c` – capacity to consume per billing cycle
    /// * `t1`, `t2` – Hotelling transport cost of each ISP
    /// * `a1`, `a2` – per-unit advertising revenue of each CP
    pub fn new(p: T, c: T, t1: T, t2: T, a1: T, a2: T, utility: UtilitySpec<T>) -> Result<Self> {
        positive("p", p)?;
        positive("c", c)?;
        positive("t1", t1)?;
        positive("t2", t2)?;
        nonnegative("a1", a1)?;
        nonnegative("a2", a2)?;
        utility.validate_on(c)?;
        Ok(Self {
            p,
            c,
            t1,
            t2,
            a1,
            a2,
            utility,
        })
    }

    /// Log utility with symmetric transport cost.
    pub fn log(p: T, c: T, t: T, a1: T, a2: T) -> Result<Self> {
        Self::new(p, c, t, t, a1, a2, UtilitySpec::LogOnePlus)
    }

    pub fn with_rates(&self, a1: T, a2: T) -> Result<Self> {
        nonnegative("a1", a1)?;
        nonnegative("a2", a2)?;
        Ok(Self { a1, a2, ..self.clone() })
    }

    pub fn with_transport(&self, t1: T, t2: T) -> Result<Self> {
        positive("t1", t1)?;
        positive("t2", t2)?;
        Ok(Self { t1, t2, ..self.clone() })
    }

    pub fn with_price(&self, p: T) -> Result<Self> {
        positive("p", p)?;
        Ok(Self { p, ..self.clone() })
    }

    pub fn with_capacity(&self, c: T) -> Result<Self> {
        positive("c", c)?;
        self.utility.validate_on(c)?;
        Ok(Self { c, ..self.clone() })
    }

    pub fn p(&self) -> T {
        self.p
    }
    pub fn c(&self) -> T {
        self.c
    }
    pub fn t1(&self) -> T {
        self.t1
    }
    pub fn t2(&self) -> T {
        self.t2
    }
    pub fn a1(&self) -> T {
        self.a1
    }
    pub fn a2(&self) -> T {
        self.a2
    }
    /// Revenue rate of CP `i` (0-based).
    pub fn rate(&self, i: usize) -> T {
        if i == 0 {
            self.a1
        } else {
            self.a2
        }
    }
    pub fn utility(&self) -> &UtilitySpec<T> {
        &self.utility
    }
}

fn positive<T: Scalar>(name: &'static str, v: T) -> Result<()> {
    if v > T::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(ModelError::InvalidParameter {
            name,
            value: v.as_f64(),
            reason: "must be positive and finite",
        })
    }
}

fn nonnegative<T: Scalar>(name: &'static str, v: T) -> Result<()> {
    if v >= T::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(ModelError::InvalidParameter {
            name,
            value: v.as_f64(),
            reason: "must be nonnegative and finite",
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_domain_values() {
        assert!(ModelParams::<f64>::log(0.0, 4.0, 3.0, 1.0, 1.0).is_err());
        assert!(ModelParams::<f64>::log(0.35, -1.0, 3.0, 1.0, 1.0).is_err());
        assert!(ModelParams::<f64>::log(0.35, 4.0, 0.0, 1.0, 1.0).is_err());
        assert!(ModelParams::<f64>::log(0.35, 4.0, 3.0, -0.1, 1.0).is_err());
        assert!(ModelParams::<f64>::log(0.35, 4.0, 3.0, 1.0, f64::NAN).is_err());
        assert!(ModelParams::<f64>::log(0.35, 4.0, 3.0, 0.0, 0.0).is_ok());
    }

    #[test]
    fn error_names_the_parameter() {
        let err = ModelParams::<f64>::log(0.35, 4.0, 3.0, 1.0, 1.0)
            .unwrap()
            .with_transport(3.0, -2.0)
            .unwrap_err();
        assert!(err.to_string().contains("t2"));
    }
}
