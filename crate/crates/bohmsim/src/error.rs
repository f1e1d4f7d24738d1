//! Error types shared across the crate.

use thiserror::Error;

/// Errors raised while constructing model quantities (grids, states).
#[derive(Debug, Error)]
pub enum ModelError {
    #[error("grid must have at least {min} interior nodes per axis, got {n}")]
    GridTooCoarse { n: usize, min: usize },
    #[error("grid half-width must be positive, got {0}")]
    BadHalfWidth(f64),
    #[error(
        "domain too small: boundary amplitude is {boundary_frac:.3e} of peak \
         (limit {limit:.1e}); increase the half-width"
    )]
    DomainTooSmall { boundary_frac: f64, limit: f64 },
    #[error("invalid physical parameters: {0}")]
    BadParams(String),
}

/// Errors raised by the wavefunction propagator.
#[derive(Debug, Error)]
pub enum TdseError {
    #[error("norm drifted to {norm:.9} at t = {t:.6}, outside 1 ± {bound:.1e}")]
    NormDrift { t: f64, norm: f64, bound: f64 },
    #[error(
        "wave packet reached the domain boundary at t = {t:.6}: outer-ring \
         amplitude is {frac:.3e} of peak (limit {limit:.1e})"
    )]
    BoundaryLeak { t: f64, frac: f64, limit: f64 },
    #[error("invalid evolution setup: {0}")]
    BadSetup(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Errors raised while evaluating fields or integrating trajectories.
#[derive(Debug, Error)]
pub enum TrajError {
    #[error(
        "wavefunction magnitude {amp:.3e} at (t={t:.6}, x={x:.4}, y={y:.4}) is below \
         the node guard {guard:.3e}; velocity is unreliable near a nodal point"
    )]
    NodeProximity { t: f64, x: f64, y: f64, amp: f64, guard: f64 },
    #[error("query (x={x:.4}, y={y:.4}) is outside the open domain (-{l}, {l})^2")]
    OutOfDomain { x: f64, y: f64, l: f64 },
    #[error("time {t:.6} is outside the snapshot range [{t0:.6}, {t1:.6}]")]
    OutOfTimeRange { t: f64, t0: f64, t1: f64 },
    #[error("snapshot series does not cover the requested span: {0}")]
    BadSpan(String),
    #[error("invalid integrator settings: {0}")]
    BadSettings(String),
}

/// Errors raised by nodal-point detection and tracking.
#[derive(Debug, Error)]
pub enum VortexError {
    #[error(
        "field is real up to a global phase over the region ({flagged_frac:.1}% of \
         active cells flag crossings); zero set forms nodal lines, winding undefined"
    )]
    DegenerateField { flagged_frac: f64 },
    #[error("frames must be ordered by strictly increasing time")]
    UnorderedFrames,
    #[error("match radius must be positive, got {0}")]
    BadMatchRadius(f64),
}

/// Errors raised by the separation / divergence diagnostics.
#[derive(Debug, Error)]
pub enum ChaosError {
    #[error("initial phase-space separation is zero; pair members coincide")]
    ZeroInitialSeparation,
    #[error("trajectories share no sample times")]
    NoCommonSamples,
    #[error("region cannot host {count} pairs: {reason}")]
    RegionTooSmall { reason: String, count: usize },
    #[error("fit window [{t0}, {t1}] contains {n} samples, need at least {min}")]
    WindowTooNarrow { t0: f64, t1: f64, n: usize, min: usize },
    #[error("need at least {min} series, got {n}")]
    TooFewSeries { n: usize, min: usize },
}

/// Errors raised by run orchestration (config parsing, I/O, pipelines).
#[derive(Debug, Error)]
pub enum RunError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed file {path}: {reason}")]
    Malformed { path: String, reason: String },
}

impl From<ModelError> for RunError {
    fn from(e: ModelError) -> Self {
        RunError::Numerical(e.to_string())
    }
}

impl From<TdseError> for RunError {
    fn from(e: TdseError) -> Self {
        RunError::Numerical(e.to_string())
    }
}

impl From<TrajError> for RunError {
    fn from(e: TrajError) -> Self {
        RunError::Numerical(e.to_string())
    }
}

impl From<VortexError> for RunError {
    fn from(e: VortexError) -> Self {
        RunError::Numerical(e.to_string())
    }
}

impl From<ChaosError> for RunError {
    fn from(e: ChaosError) -> Self {
        RunError::Numerical(e.to_string())
    }
}

impl RunError {
    /// Process exit code for the CLI: 2 config, 3 numerical, 4 i/o.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Numerical(_) => 3,
            RunError::Io(_) | RunError::Malformed { .. } => 4,
        }
    }
}
