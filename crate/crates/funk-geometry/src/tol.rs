//! Centralized numeric tolerances.
//!
//! All margins are expressed in the cone's normalized frame (unit facet
//! normals, unit axis), so they are absolute at desk scale.

/// Strict interiority margin. Points closer to the boundary than this are
/// rejected by operations that need finite logarithms.
pub const INTERIOR_MARGIN: f64 = 1e-12;

/// Band around a cone boundary in which side decisions are refused instead
/// of guessed (no site may lie on the boundary of a cone centered at
/// another site).
pub const GENERAL_POSITION: f64 = 1e-12;

/// Discriminants of the circular-cone quadratic in [-DISCRIMINANT_CLAMP, 0]
/// are clamped to zero; anything more negative is an internal error.
pub const DISCRIMINANT_CLAMP: f64 = 1e-12;

/// Index-scaled symbolic perturbation applied to Apollonius weights while
/// deciding diagram combinatorics.
pub const WEIGHT_PERTURBATION: f64 = 1e-10;

/// Default relative margin between the highest (lowest) site and the
/// cross-section plane.
pub const SECTION_MARGIN: f64 = 0.05;

/// Relative chord tolerance when flattening curved arcs to polylines.
pub const CHORD_TOLERANCE: f64 = 1e-3;

/// Equidistance residual allowed at diagram vertices (nats).
pub const VERTEX_RESIDUAL: f64 = 1e-7;

/// Residual allowed on sampled bisector points (nats).
pub const BISECTOR_RESIDUAL: f64 = 1e-9;

/// Distance gap below which two sites are considered tied at a query point.
pub const AMBIGUITY_GAP: f64 = 1e-12;
