use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("pole: {0}")]
    Pole(String),
    #[error("overflow: {0}")]
    Overflow(String),
    #[error("point of indeterminacy: {0}")]
    Indeterminacy(String),
    #[error("infinity map is not periodic: |w_(n-1)| = {residual:e}")]
    Periodicity { residual: f64 },
    #[error("point outside chart domain: {0}")]
    ChartDomain(String),
    #[error("extrapolation did not converge: successive values differ by {gap:e}")]
    Extrapolation { gap: f64 },
    #[error("degenerate configuration: {0}")]
    Degenerate(String),
    #[error("fixed point is not a saddle (trace {trace})")]
    NotSaddle { trace: String },
    #[error("parameter file: {0}")]
    ParamFile(String),
}

pub type Result<T> = std::result::Result<T, Error>;
