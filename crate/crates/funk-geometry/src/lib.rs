//! Funk weak-metric geometry in convex cones.
//!
//! The forward Funk distance `F(a, b) = ln inf { beta : beta*b in C_a }` is a
//! signed, asymmetric distance satisfying only the triangle inequality. This
//! crate evaluates it in circular, elliptical, polyhedral, and planar cones,
//! and builds the geometric structures it supports:
//!
//! * Voronoi diagrams in 2-dimensional cones (angular sorting plus explicit
//!   bisector rays),
//! * Voronoi diagrams in 3-dimensional circular/elliptical cones via a
//!   dimensional reduction onto a cross-section and an additively weighted
//!   (Apollonius) diagram of the sites' zero balls,
//! * Voronoi diagrams in 3-dimensional polygonal cones via spoke-guided
//!   piecewise-linear bisector tracing,
//! * the five-way circumcenter classification of a site triple,
//! * brute-force oracles (scaling bisection, grid labeling, pencil sweeps)
//!   that validate everything above through independent routes.
//!
//! With the default `parallel` feature the grid oracles, candidate
//! enumeration, and bisector tracing run on rayon; disabling it yields a
//! fully sequential build with identical results.

pub mod apollonius;
pub mod circumcenter;
pub mod cone;
pub mod elliptical;
pub mod error;
pub mod geom;
pub mod metric;
pub mod oracle;
pub mod planar;
pub mod polygonal;
pub mod section;
pub mod tol;

pub use cone::{Cone, PlanarCone};
pub use error::{FunkError, Result};
pub use geom::{Mat3, Vec2, Vec3};
pub use metric::Direction;
