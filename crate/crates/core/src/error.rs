use thiserror::Error;

/// Errors raised across the crate.
///
/// Most verification routines report failures inside their report types
/// instead of returning an error; the variants here cover inputs that make a
/// computation impossible.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("target {target} outside attainable range [{lo}, {hi}]")]
    RangeExceeded { target: f64, lo: f64, hi: f64 },

    #[error("argument {x} outside tabulated domain [{lo}, {hi}]")]
    OutOfDomain { x: f64, lo: f64, hi: f64 },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid interval [{lo}, {hi}]")]
    InvalidInterval { lo: f64, hi: f64 },

    #[error("no closed-form representation known for law `{0}`")]
    NoAnalyticForm(String),

    #[error("knots are not strictly monotone: {0}")]
    NonMonotoneKnots(String),

    #[error("malformed grid: {0}")]
    MalformedGrid(String),

    #[error("grid is not strictly monotone: {0}")]
    NonMonotoneGrid(String),

    #[error("declared direction of the second variable does not match the code")]
    DirectionMismatch,

    #[error("{skipped} of {total} triples left the domain; domain too small")]
    DomainTooSmall { skipped: usize, total: usize },

    #[error("codes are not comonotonic: {0}")]
    NotComonotonic(String),

    #[error("operation undefined at y = {0}")]
    Undefined(f64),

    #[error("standard sequence step {step} is undefined")]
    StepUndefined { step: usize },

    #[error("standard sequence did not exceed {z} within {cap} terms")]
    NotArchimedeanWithinCap { z: f64, cap: usize },

    #[error("orbit escaped the domain after {steps} step(s)")]
    OrbitEscaped { steps: usize },

    #[error("unit modifier is degenerate: {0}")]
    UnitDegenerate(String),

    #[error("sum {sum} outside the range of the outer function")]
    RangeClipped { sum: f64 },

    #[error("code is not symmetric (max asymmetry {max_asymmetry})")]
    NotSymmetric { max_asymmetry: f64 },

    #[error("fit did not converge: loss {loss} after {iters} iterations")]
    NonConvergence {
        loss: f64,
        iters: usize,
        curve: Vec<f64>,
    },

    #[error("degenerate alignment: {0}")]
    DegenerateFit(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
