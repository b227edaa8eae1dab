//! Constant-speed adiabatic schedule construction from measured eigenstate
//! overlaps.
//!
//! The crate builds schedules for adiabatic state preparation by walking the
//! eigenstate path in equal arc-length segments: at each accepted point it
//! evolves the system under the schedule-so-far, measures the overlap decay
//! ahead with a projector backend (exact spectral projection, a deterministic
//! Gaussian energy filter, or the same filter estimated by Monte Carlo
//! sampling of time evolutions), and places the next point where the overlap
//! has dropped by the target segment length. The resulting schedule moves at
//! constant speed along the path, which turns the usual gap-squared runtime
//! scaling into linear-in-inverse-gap scaling for families like adiabatic
//! Grover search.
//!
//! Module map:
//! - [`operators`]: dense Hermitian eigendecomposition, matrix functions,
//!   state vectors.
//! - [`hamiltonians`]: the interpolated Hamiltonian families (Grover
//!   effective and full, avoided-crossing) plus a text serialization format.
//! - [`eigenpath`]: gauge-fixed eigenstate tracking and path geometry
//!   (length, speed, curvature, error functionals, time-estimate heuristic).
//! - [`evolution`]: midpoint-exponential propagation of the time-dependent
//!   Schrödinger equation and minimum-time searches.
//! - [`projector`]: projection backends, the Monte Carlo Gaussian filter,
//!   and the certification bounds for energy estimates.
//! - [`scheduler`]: schedule types (linear, analytic Grover-optimal,
//!   monotone-cubic tabulated) and the constant-speed schedule builder.
//! - [`experiments`]: sweep/curve/certification harnesses with CSV/JSON
//!   output, shared by the CLI and the examples.

pub mod error;
pub mod operators;
pub mod hamiltonians;
pub mod eigenpath;
pub mod evolution;
pub mod projector;
pub mod scheduler;
pub mod experiments;

pub use error::{Error, Result};
