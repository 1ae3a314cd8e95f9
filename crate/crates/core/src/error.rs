use thiserror::Error;

/// Errors raised while building or evaluating the market model.
#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("utility is not admissible: {0}")]
    InvalidUtility(String),

    /// Transport cost too small for an interior Hotelling split.
    #[error("Hotelling validity violated: {name} = {t} must exceed the surplus gap {gap}")]
    HotellingViolated { name: &'static str, t: f64, gap: f64 },

    #[error("no sponsorship threshold found for a in (0, {a_max}]")]
    NoSponsorship { a_max: f64 },

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl ModelError {
    /// `true` for failures caused by the caller's inputs rather than the environment.
    pub fn is_validation(&self) -> bool {
        !matches!(self, ModelError::Io(_) | ModelError::Csv(_))
    }
}

pub type Result<T, E = ModelError> = std::result::Result<T, E>;
