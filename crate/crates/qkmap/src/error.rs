use thiserror::Error;

#[derive(Debug, Error)]
pub enum QkError {
    #[error(transparent)]
    Calc(#[from] jetcalc::CalcError),

    #[error("twist data singular: |{name}| = {value:.3e} at the evaluation point")]
    TwistSingularity { name: &'static str, value: f64 },

    #[error("constructed object failed validation: {what} (residual {residual:.3e})")]
    ValidationError { what: String, residual: f64 },

    #[error("candidate fields do not close under the bracket (residual {residual:.3e})")]
    ClosureError { residual: f64 },

    #[error("need at least {needed} sample points, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, QkError>;
