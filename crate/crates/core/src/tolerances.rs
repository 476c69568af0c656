//! Numerical tolerances shared by the library, the CLI checks and the tests.
//!
//! Algebraic identities that hold exactly in real arithmetic (reproduction,
//! C¹ continuity, interpolation conditions) are checked at [`IDENTITY_REL`],
//! which leaves room for local-system conditioning of about 1e4 times
//! machine epsilon.

/// Relative tolerance for identities that are exact in real arithmetic.
pub const IDENTITY_REL: f64 = 1e-8;

/// Boundary trace of the interpolant relative to its sup norm.
pub const BOUNDARY_TRACE_REL: f64 = 1e-9;

/// Smallest singular value a local collocation matrix must exceed.
pub const MIN_SINGULAR_VALUE: f64 = 1e-8;

/// Residual tolerance of a single local solve, relative to `max(1, |ηu|)`.
pub const LOCAL_RESIDUAL_REL: f64 = 1e-9;

/// Arc endpoints must satisfy `|q| <=` this after normalization.
pub const ARC_ENDPOINT_ABS: f64 = 1e-10;

/// Boundary spot check of input functions: `|u| <=` this on arc samples.
pub const VANISHING_ABS: f64 = 1e-8;

/// Interior quotient sites need `|q| >` this.
pub const QUOTIENT_INTERIOR_MIN_Q: f64 = 1e-10;

/// Boundary quotient sites need `|∇q| >` this and `|u| <=` this.
pub const QUOTIENT_BOUNDARY_ABS: f64 = 1e-10;

/// Unit-length check for direction vectors.
pub const UNIT_VECTOR_ABS: f64 = 1e-12;

/// Default absolute/relative tolerance for the curved lens integration.
pub const LENS_TOL: f64 = 1e-11;

/// Slack allowed below the expected convergence order.
pub const ORDER_SLACK: f64 = 0.5;

/// Containment slack (in barycentric / scaled units) for point location.
pub const CONTAINMENT_SLACK: f64 = 1e-12;
