//! Numeric tolerances shared across the crate.
//!
//! Every threshold used by preconditions and consistency checks is defined
//! here rather than inline, so the values can be audited in one place. All
//! constants are plain `f64` and are converted into the working scalar type
//! at the point of use.

/// Agreement required between a vector's base point and the curve point it
/// is supposed to sit at. Connecting paths are built numerically, so exact
/// equality cannot be demanded.
pub const BASE_POINT_TOL: f64 = 1e-9;

/// Componentwise agreement required between a field value's base point and
/// the path point it is attached to. Scaled by `max(1, |point|)` so large
/// coordinates do not trip the check on representation noise.
pub const CHART_COORD_TOL: f64 = 1e-12;

/// Maximum allowed asymmetry `|g_ij - g_ji|` of a metric matrix.
pub const METRIC_SYMMETRY_TOL: f64 = 1e-12;

/// Minimum `|det g|` below which a metric matrix counts as degenerate.
pub const METRIC_DEGENERACY_TOL: f64 = 1e-12;

/// Default tolerance for identity assertions on normalized quantities
/// (energy relations, momentum decompositions, invariant cross-checks).
pub const DEFAULT_IDENTITY_TOL: f64 = 1e-9;

/// Relative threshold under which a squared norm counts as null. A vector
/// `v` is rejected as effectively null when `|(v)^2| < NULL_DIRECTION_TOL
/// * max(1, |v|_inf^2)`; component formulas are undefined there.
pub const NULL_DIRECTION_TOL: f64 = 1e-10;

/// Residual norm under which a chart axis is skipped while completing an
/// orthogonal basis: the axis is already spanned by the accepted vectors.
pub const BASIS_RESIDUAL_TOL: f64 = 1e-10;
