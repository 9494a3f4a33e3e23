use thiserror::Error;

#[derive(Debug, Error)]
pub enum CalcError {
    #[error("point ({coords:?}) is outside the domain of chart `{chart}`")]
    DomainError { chart: String, coords: Vec<f64> },

    #[error("chart mismatch: field lives on `{expected}`, point on `{found}`")]
    ChartMismatch { expected: String, found: String },

    #[error("metric is numerically singular at the evaluation point (|det| = {det:.3e})")]
    SingularMetric { det: f64 },

    #[error("eigenvalue solver failed: {0}")]
    EigenFailure(String),

    #[error("operation expects valence {expected}, field has valence {found}")]
    ValenceMismatch { expected: String, found: String },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

pub type Result<T> = std::result::Result<T, CalcError>;
