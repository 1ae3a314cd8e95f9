//! Per-CP content utility ψ and its marginal ψ′.

use std::fmt;
use std::sync::Arc;

use crate::error::{ModelError, Result};
use crate::scalar::Scalar;

/// Number of sample points used to check a custom utility.
pub const CONCAVITY_SAMPLES: usize = 256;

type ScalarFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// Utility derived from consuming content of one CP (identical for both CPs).
#[derive(Clone)]
pub enum UtilitySpec<T: Scalar> {
    /// ψ(z) = ln(1 + z); solved in closed form.
    LogOnePlus,
    /// Caller-supplied concave utility; solved by bisection.
    Custom(CustomUtility<T>),
}

/// A black-box concave utility with its derivative.
///
/// Concavity and monotonicity are checked by sampling on `[0, checked_up_to]`;
/// the model refuses capacities beyond that range.
#[derive(Clone)]
pub struct CustomUtility<T: Scalar> {
    name: String,
    value: ScalarFn<T>,
    marginal: ScalarFn<T>,
    checked_up_to: T,
}

impl<T: Scalar> CustomUtility<T> {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn checked_up_to(&self) -> T {
        self.checked_up_to
    }
}

impl<T: Scalar> UtilitySpec<T> {
    /// Builds a custom utility, sampling [`CONCAVITY_SAMPLES`] points of
    /// `[0, upper]` to check ψ(0) ≥ 0 and that ψ′ is positive and non-increasing.
    pub fn custom<V, M>(name: impl Into<String>, value: V, marginal: M, upper: T) -> Result<Self>
    where
        V: Fn(T) -> T + Send + Sync + 'static,
        M: Fn(T) -> T + Send + Sync + 'static,
    {
        if !(upper > T::zero()) || !upper.is_finite() {
            return Err(ModelError::InvalidUtility(format!(
                "check range upper bound must be positive and finite, got {upper}"
            )));
        }
        let custom = CustomUtility {
            name: name.into(),
            value: Arc::new(value),
            marginal: Arc::new(marginal),
            checked_up_to: upper,
        };
        check_shape(&custom, upper)?;
        Ok(UtilitySpec::Custom(custom))
    }

    /// Power family ψ(z) = ((1 + z)^k − 1) / k with 0 < k < 1.
    pub fn power(exponent: T, upper: T) -> Result<Self> {
        if !(exponent > T::zero() && exponent < T::one()) {
            return Err(ModelError::InvalidUtility(format!(
                "power exponent must lie in (0, 1), got {exponent}"
            )));
        }
        let k = exponent;
        Self::custom(
            format!("power({k})"),
            move |z: T| ((T::one() + z).powf(k) - T::one()) / k,
            move |z: T| (T::one() + z).powf(k - T::one()),
            upper,
        )
    }

    pub fn value(&self, z: T) -> T {
        match self {
            UtilitySpec::LogOnePlus => z.ln_1p(),
            UtilitySpec::Custom(u) => (u.value)(z),
        }
    }

    pub fn marginal(&self, z: T) -> T {
        match self {
            UtilitySpec::LogOnePlus => (T::one() + z).recip(),
            UtilitySpec::Custom(u) => (u.marginal)(z),
        }
    }

    pub fn is_log(&self) -> bool {
        matches!(self, UtilitySpec::LogOnePlus)
    }

    pub fn label(&self) -> String {
        match self {
            UtilitySpec::LogOnePlus => "log".to_owned(),
            UtilitySpec::Custom(u) => u.name.clone(),
        }
    }

    /// Confirms the utility is admissible on `[0, c]`.
    pub(crate) fn validate_on(&self, c: T) -> Result<()> {
        match self {
            UtilitySpec::LogOnePlus => Ok(()),
            UtilitySpec::Custom(u) if c > u.checked_up_to => Err(ModelError::InvalidUtility(format!(
                "utility `{}` was checked on [0, {}] but capacity is {}",
                u.name, u.checked_up_to, c
            ))),
            UtilitySpec::Custom(u) => check_shape(u, c),
        }
    }
}

impl<T: Scalar> fmt::Debug for UtilitySpec<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UtilitySpec::LogOnePlus => f.write_str("LogOnePlus"),
            UtilitySpec::Custom(u) => f
                .debug_struct("Custom")
                .field("name", &u.name)
                .field("checked_up_to", &u.checked_up_to)
                .finish(),
        }
    }
}

fn check_shape<T: Scalar>(u: &CustomUtility<T>, upper: T) -> Result<()> {
    let v0 = (u.value)(T::zero());
    if !(v0 >= T::zero()) {
        return Err(ModelError::InvalidUtility(format!(
            "ψ(0) must be nonnegative, got {v0}"
        )));
    }
    let n = T::lit((CONCAVITY_SAMPLES - 1) as f64);
    let slack = T::tol(1e-12);
    let mut prev: Option<T> = None;
    for k in 0..CONCAVITY_SAMPLES {
        let z = upper * T::lit(k as f64) / n;
        let m = (u.marginal)(z);
        if !(m > T::zero()) || !m.is_finite() {
            return Err(ModelError::InvalidUtility(format!(
                "ψ′({z}) = {m} is not strictly positive"
            )));
        }
        if let Some(p) = prev {
            if m > p + slack * T::one().max(p) {
                return Err(ModelError::InvalidUtility(format!(
                    "ψ′ increases near z = {z} ({p} -> {m}); utility is not concave"
                )));
            }
        }
        prev = Some(m);
    }
    Ok(())
}
