use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("singular matrix: pivot {pivot:.3e} below threshold {threshold:.3e} at column {column}")]
    SingularMatrix {
        column: usize,
        pivot: f64,
        threshold: f64,
    },

    #[error(
        "normal matrix of the predictive law is singular ({cause}); \
         set `ridge` > 0 or use lambda > 0"
    )]
    SingularNormalMatrix { cause: Box<Error> },

    #[error("polynomial is identically zero")]
    DegenerateZeroPolynomial,

    #[error("limit diverges: uncancelled pole at z = 1")]
    DivergentLimit,

    #[error("unstable pole with modulus {modulus}")]
    UnstablePole { modulus: f64 },

    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("insufficient history: {what} needs {needed} samples, have {available}")]
    InsufficientHistory {
        what: &'static str,
        needed: usize,
        available: usize,
    },

    #[error("plant provides no analytic pseudo Jacobi matrix")]
    MissingExactForm,

    #[error("constraints are infeasible: {0}")]
    InfeasibleConstraints(String),

    #[error(
        "projected gradient did not converge after {iterations} iterations \
         (gradient norm {gradient_norm:.3e})"
    )]
    NotConverged {
        iterations: usize,
        gradient_norm: f64,
        last_iterate: Vec<f64>,
    },

    #[error("operation requires a single-input single-output loop")]
    NotSiso,

    #[error("unsupported configuration: {0}")]
    UnsupportedConfiguration(String),

    #[error("index {index} outside the valid range {lo}..={hi}")]
    OutOfRange { index: i64, lo: i64, hi: i64 },

    #[error("window {lo}..={hi} lies outside the trace 1..={len}")]
    WindowOutOfRange { lo: usize, hi: usize, len: usize },

    #[error("simulation diverged at step {step}: |y| = {magnitude:.3e} exceeds the guard")]
    Diverged { step: usize, magnitude: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

impl Error {
    pub(crate) fn dims(context: &'static str, expected: usize, actual: usize) -> Self {
        Error::DimensionMismatch {
            context,
            expected,
            actual,
        }
    }
}

pub(crate) fn check_len(context: &'static str, expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::dims(context, expected, actual))
    }
}
