use thiserror::Error;

/// Errors across the numerics, state-construction and metrics layers.
/// Each validation variant names the violated invariant and the measured
/// residual.
#[derive(Debug, Error)]
pub enum Error {
    #[error("NotHermitian: hermiticity residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    NotHermitian { residual: f64, tol: f64 },

    #[error("TraceNotOne: trace residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    TraceNotOne { residual: f64, tol: f64 },

    #[error("NotPSD: minimum eigenvalue {min_eigenvalue:.3e} is below -{tol:.3e}")]
    NotPSD { min_eigenvalue: f64, tol: f64 },

    #[error("NoConvergence: Jacobi iteration did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("InvalidDimension: expected a {expected}x{expected} matrix, got {got}x{got}")]
    InvalidDimension { expected: usize, got: usize },

    #[error("ParamOutOfRange: {name} = {value} outside admissible interval {interval}")]
    ParamOutOfRange {
        name: &'static str,
        value: f64,
        interval: &'static str,
    },

    #[error("MissingParam: parameter {name} is required here")]
    MissingParam { name: &'static str },

    #[error(
        "NonRealCorrelation: imaginary residual {residual:.3e} exceeds {tol:.3e} \
         (input is not a valid density matrix)"
    )]
    NonRealCorrelation { residual: f64, tol: f64 },

    #[error("DomainError: S_L = {value} outside admissible interval {interval} for {family}")]
    DomainError {
        family: &'static str,
        value: f64,
        interval: &'static str,
    },

    #[error("ParseError: {0}")]
    Parse(String),
}
