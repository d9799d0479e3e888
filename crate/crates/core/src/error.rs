use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid parameter: {0}")]
    Param(String),

    /// A state space, pair sweep or cut scan would exceed its configured cap.
    #[error("{what} exceeds cap {cap} (counted {partial} before stopping)")]
    Capacity { what: &'static str, cap: usize, partial: usize },

    #[error("no mixing within t_max = {t_max} steps (worst-case TV still {tv:.6})")]
    Timeout { t_max: usize, tv: f64 },

    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
