use thiserror::Error;

/// Errors raised by the solvers and their plumbing.
#[derive(Debug, Error)]
pub enum VortexError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("vortex point ({x}, {y}) lies outside the admissible region [-{half}, {half}]^2")]
    VortexTooCloseToBoundary { x: f64, y: f64, half: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("metric factor is not finite and positive at node ({i}, {j}): {value}")]
    NonFiniteMetric { i: usize, j: usize, value: f64 },

    #[error("no convergence after {iterations} iterations (last change {last_change:e}){hint}")]
    NoConvergence {
        iterations: usize,
        last_change: f64,
        hint: String,
    },

    #[error("monotonicity violated: inner iterate increased by {increase:e} at node {node}")]
    MonotonicityViolation { increase: f64, node: usize },

    #[error("linear solve stalled: residual {residual:e} after {cycles} cycles")]
    LinearSolveStall { residual: f64, cycles: usize },

    #[error("integration step failed at r = {r}: {reason} (state u = {u}, u' = {du})")]
    StepFailure {
        r: f64,
        u: f64,
        du: f64,
        reason: String,
    },

    #[error("no shooting bracket found in [{lo:e}, {hi:e}]: {reason}")]
    BracketNotFound { lo: f64, hi: f64, reason: String },

    #[error("profile tail not reached: value {value} at r = {r} (need >= {needed})")]
    TailNotReached { r: f64, value: f64, needed: f64 },

    #[error("two |D phi|^2 evaluations disagree by {discrepancy:e} away from vortices")]
    BranchCutArtifact { discrepancy: f64 },

    #[error("tail is not monotone in magnitude: {0}")]
    NonMonotoneTail(String),

    #[error("insufficient tail samples: {0}")]
    InsufficientTail(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, VortexError>;
