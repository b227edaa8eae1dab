//! Crate-wide error type.

use thiserror::Error;

/// Everything that can go wrong across the crate, with enough context to act on.
#[derive(Debug, Error)]
pub enum Error {
    /// A matrix that was promised to be Hermitian is not.
    #[error("matrix not Hermitian: entry ({row},{col}) = {found} vs conjugate transpose {expected} (|diff| = {diff:.3e})")]
    NotHermitian {
        row: usize,
        col: usize,
        found: String,
        expected: String,
        diff: f64,
    },

    /// Matrix or vector dimensions do not line up.
    #[error("dimension mismatch: {context} (got {got}, expected {expected})")]
    DimensionMismatch {
        context: &'static str,
        got: usize,
        expected: usize,
    },

    /// A spectral gap was requested at a degenerate level.
    #[error("level {level} is degenerate: nearest eigenvalue within {gap:.3e} (threshold {threshold:.3e})")]
    DegenerateLevel {
        level: usize,
        gap: f64,
        threshold: f64,
    },

    /// A scalar argument fell outside its documented domain.
    #[error("argument out of domain: {context} (value {value})")]
    OutOfDomain { context: &'static str, value: f64 },

    /// Eigenstate tracking lost the level between grid points.
    #[error("eigenstate continuity lost near s = {s:.6}: adjacent overlap^2 = {overlap_sq:.4} <= 0.5; refine the grid around this point")]
    ContinuityLost { s: f64, overlap_sq: f64 },

    /// Finite-difference grid too coarse for the requested derivative.
    #[error("grid too coarse for second differences at index {index}: spacing ratio {ratio:.3e}; refine the grid")]
    GridTooCoarse { index: usize, ratio: f64 },

    /// The time step violates the accuracy guard.
    #[error("time step too large: dt*||H|| = {product:.4} > 0.1; need at least {required_steps} steps")]
    StepTooLarge { product: f64, required_steps: usize },

    /// The energy search found no usable maximum.
    #[error("no interior maximum of g(E) in scanned range [{lo:.6}, {hi:.6}]")]
    SearchFailure { lo: f64, hi: f64 },

    /// Exact projection could not decide between two levels.
    #[error("ambiguous level selection near E = {hint:.6}: overlaps {a:.6} and {b:.6} differ by < 1e-6")]
    AmbiguousLevel { hint: f64, a: f64, b: f64 },

    /// A projector operation was called on a backend that does not support it.
    #[error("operation `{op}` is undefined for the {backend} backend")]
    BackendUnsupported { op: &'static str, backend: &'static str },

    /// The discriminant in the energy-error bound went negative.
    #[error("energy-error bound undefined: discriminant {discriminant:.3e} < 0 (beta = {beta:.4} below requirement {beta_min:.4})")]
    BoundPrecondition {
        discriminant: f64,
        beta: f64,
        beta_min: f64,
    },

    /// Schedule table data is not monotone.
    #[error("schedule points not strictly monotone at index {index}: ({x:.6}, {y:.6})")]
    NonMonotoneData { index: usize, x: f64, y: f64 },

    /// The schedule builder measured a fidelity below the floor.
    #[error("build aborted at segment {segment} (s = {s:.4}): fidelity estimate {fidelity:.4} below floor {floor:.2}; increase the first-step time t1")]
    FidelityFloor {
        segment: usize,
        s: f64,
        fidelity: f64,
        floor: f64,
    },

    /// The schedule builder ran past its segment budget without reaching s = 1.
    #[error("schedule build exceeded {max} segments (reached s = {s:.4}); the target segment length may be too small")]
    SegmentOverflow { max: usize, s: f64 },

    /// A fidelity target could not be reached within the bracket-doubling limit.
    #[error("fidelity target {target} unreachable: bracket grew to {reached:.3e} after {doublings} doublings")]
    TargetUnreachable {
        target: f64,
        reached: f64,
        doublings: usize,
    },

    /// File parse failure with location.
    #[error("parse error in {path} line {line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
