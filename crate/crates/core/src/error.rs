use thiserror::Error;

/// Errors produced anywhere in the laboratory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid data: {0}")]
    InvalidData(String),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("sphere average of a degree-{degree} monomial exceeds the supported depth {max}")]
    SphereDegree { degree: usize, max: usize },

    #[error("invalid band [{lo}, {hi}]")]
    InvalidBand { lo: f64, hi: f64 },

    #[error("{count} half-periods in the band exceed the budget of {budget}; use the accelerated path")]
    NodeOverflow { count: f64, budget: usize },

    #[error("quadrature did not converge: value {value:e}, error estimate {error:e} after {panels} panels")]
    Quadrature { value: f64, error: f64, panels: usize },

    #[error("tensor grid of {points} points exceeds the guard of {limit}")]
    GridTooLarge { points: f64, limit: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("fit needs at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("fit needs positive values, found {value} at t = {t}")]
    NonPositive { t: f64, value: f64 },

    #[error("growth classification is ambiguous: {0}")]
    Ambiguous(String),

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
