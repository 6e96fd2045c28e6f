use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid search instance: n = {n}, marked = {marked} (need n >= 2 and marked < n)")]
    InvalidInstance { n: u64, marked: u64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// Both couplings vanish, so the gap is zero and the mixing angle is undefined.
    #[error("degenerate coupling point a = {a}, b = {b}: zero gap")]
    DegeneratePoint { a: f64, b: f64 },

    #[error("oracle dimension {n} exceeds cap {cap}")]
    OracleSizeExceeded { n: u64, cap: usize },

    #[error("norm drifted to {norm} at t = {t}")]
    NonUnit { norm: f64, t: f64 },

    #[error("equal-cost duration is undefined for n = 2")]
    ExactDegenerateN,
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
