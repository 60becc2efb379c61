use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} = {got} is outside the supported range {min}..={max}")]
    OutOfRange {
        what: &'static str,
        got: usize,
        min: usize,
        max: usize,
    },
    #[error("cap exceeded: {what} is {got}, the cap is {cap}")]
    CapExceeded {
        what: &'static str,
        got: usize,
        cap: usize,
    },
    #[error("dimension mismatch: expected {expected} variables, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("function is not monotone")]
    NotMonotone,
    #[error("function is constant; depth-3 duality needs L3(f) > 0")]
    ConstantFunction,
    #[error("subset is not contained in f^-1(1)")]
    NotSubset,
    #[error("subset is not upward-closed")]
    NotUpwardClosed,
    #[error("clause contains both x{0} and its negation")]
    Tautology(usize),
    #[error("assignment does not satisfy the formula")]
    NotSatisfying,
    #[error("assignment is not an isolated solution")]
    NotIsolated,
    #[error("formula accepts an input outside the target function")]
    NotOneSided,
    #[error("generator does not preserve the function")]
    GroupDoesNotPreserve,
    #[error("distribution is invalid: {0}")]
    BadDistribution(String),
    #[error("malformed code word: {0}")]
    MalformedCode(String),
    #[error("invalid parameter: {0}")]
    BadParameter(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Lp(#[from] ratlp::LpError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn check_range(what: &'static str, got: usize, min: usize, max: usize) -> Result<()> {
    if got < min || got > max {
        return Err(Error::OutOfRange { what, got, min, max });
    }
    Ok(())
}

pub(crate) fn check_cap(what: &'static str, got: usize, cap: usize) -> Result<()> {
    if got > cap {
        return Err(Error::CapExceeded { what, got, cap });
    }
    Ok(())
}
