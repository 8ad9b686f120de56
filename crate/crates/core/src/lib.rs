//! Relative kinematics of point particles on a manifold whose tangent
//! bundle carries a transport along paths.
//!
//! Two observed particles and an observer each follow a worldline in one
//! coordinate chart. A transport along paths carries tangent vectors
//! between curve points, which lets velocities, momenta and separations of
//! the particles be compared at the observer although they live in
//! different tangent spaces. With a bundle metric the same machinery
//! yields relative and proper energies and the invariant of the momentum
//! difference.
//!
//! Module map:
//!
//! * [`geometry`]: charts, paths, tangent vectors, fields along paths.
//! * [`transport`]: the transport abstraction, its linear realization by
//!   integrating the connection, and consistency checkers.
//! * [`metric`]: bundle metric, scalar products, sign function, adapted
//!   orthogonal bases.
//! * [`covariant`]: covariant differentiation of fields along paths.
//! * [`kinematics`]: particles, observer configurations, and every
//!   relative quantity.
//! * [`oracle`]: closed-form special-relativity and polar-chart references
//!   used as ground truth.
//!
//! The core is generic over the floating-point scalar through
//! [`scalar::Scalar`]; the aliases below fix the two supported widths.

pub mod covariant;
pub mod error;
pub mod geometry;
pub mod kinematics;
pub mod linalg;
pub mod metric;
pub mod oracle;
pub mod scalar;
pub mod tolerances;
pub mod transport;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Double-precision aliases: the working types of every shipped pipeline.
pub type ManifoldChart64 = geometry::ManifoldChart<f64>;
pub type Path64 = geometry::Path<f64>;
pub type TangentVector64 = geometry::TangentVector<f64>;
pub type FieldAlongPath64 = geometry::FieldAlongPath<f64>;
pub type Transport64 = transport::Transport<f64>;
pub type TransportMatrix64 = transport::TransportMatrix<f64>;
pub type BundleMetric64 = metric::BundleMetric<f64>;
pub type AdaptedBasis64 = metric::AdaptedBasis<f64>;
pub type Particle64 = kinematics::Particle<f64>;
pub type ObserverConfiguration64 = kinematics::ObserverConfiguration<f64>;
pub type RelativeState64 = kinematics::RelativeState<f64>;
pub type NumericsConfig64 = kinematics::NumericsConfig<f64>;

/// Single-precision aliases for the geometric core.
pub type ManifoldChart32 = geometry::ManifoldChart<f32>;
pub type Path32 = geometry::Path<f32>;
pub type TangentVector32 = geometry::TangentVector<f32>;
pub type Transport32 = transport::Transport<f32>;
pub type BundleMetric32 = metric::BundleMetric<f32>;
