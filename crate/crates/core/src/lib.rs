//! Explicit Einstein-Weyl 3-geometries, their monopoles, and the
//! scalar-flat Kähler and selfdual Einstein 4-metrics built from them,
//! together with jet-based verifiers for every identity they satisfy.
//!
//! The crate is organised bottom-up:
//!
//! * [`jet`]: exact second order forward-mode differentiation.
//! * [`holo`]: rational holomorphic functions on the stereographic chart,
//!   the round metric of `S²` and the explicit connection potential `β`.
//! * [`connection`]: Christoffel symbols and curvature of arbitrary affine
//!   connections given as order-one jets.
//! * [`ew3`]: gauged Weyl structures in dimension three, the Toda and
//!   geodesic-symmetry families, monopoles and hyperCR certificates.
//! * [`geom4`]: the 4-metrics, the Riemann/Weyl engine with its self-dual
//!   split, and the quotient and Pedersen correspondence checks.
//! * [`sampling`], [`report`], [`suite`]: seeded point sampling, report
//!   records and the per-family verification suites used by the CLI.

pub mod config;
pub mod connection;
pub mod conventions;
pub mod ew3;
pub mod geom4;
pub mod holo;
pub mod jet;
pub mod report;
pub mod sampling;
pub mod suite;

pub use holo::HoloFn;
pub use jet::{CJet, Jet, Jet1, Jet3, Jet4};

pub type Point3 = [f64; 3];
pub type Point4 = [f64; 4];

/// Positivity margin for admissibility predicates.
pub const DELTA_POS: f64 = 1e-6;

/// Radius of the excluded disc around `ζ = 0` wherever `β` is involved.
pub const EPS_CHART: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeomError {
    #[error("domain error: {what} (value {value:e})")]
    Domain { what: &'static str, value: f64 },
    #[error("coordinate index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("point not admissible: {0}")]
    Inadmissible(String),
    #[error("degenerate metric (determinant {det:e})")]
    Degenerate { det: f64 },
    #[error("parse error at column {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("domain coverage: {0}")]
    Coverage(String),
}

pub type Result<T, E = GeomError> = std::result::Result<T, E>;
