use alloc::string::String;

/// Errors raised by the solver.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("input has length {found}, expected {expected}")]
    Shape { expected: usize, found: usize },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("non-finite value in {what} at index {index}")]
    NonFinite { what: &'static str, index: usize },

    #[error("geometry invariant `{invariant}` violated at node {node}")]
    Geometry { invariant: &'static str, node: usize },

    #[error("linear solve failed: relative residual {residual:e}")]
    LinearAlgebra { residual: f64 },

    #[error("oracle inconclusive: boundary misfit {misfit:e} exceeds {threshold:e}")]
    OracleInconclusive { misfit: f64, threshold: f64 },

    #[error("blow-up at step {step} (t = {time}): node {node} has eta = {value}")]
    BlowUp {
        step: usize,
        time: f64,
        node: usize,
        value: f64,
    },

    #[error("sign convention check failed: {0}")]
    Convention(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::Shape { expected, found });
    }
    Ok(())
}
