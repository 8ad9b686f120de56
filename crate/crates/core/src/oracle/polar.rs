//! The Euclidean plane in polar coordinates `(r, theta)`.
//!
//! The chart carries the nonzero connection coefficients of the plane's
//! own covariant differentiation expressed in polar coordinates, and the
//! metric `diag(1, r^2)`. Because the underlying plane is flat, parallel
//! transport has an exact Cartesian detour: push the components to the
//! Cartesian chart, carry them unchanged, and pull them back at the target
//! point. That detour is the brute-force oracle the integrated transport is
//! tested against.

use std::sync::Arc;

use crate::geometry::{ManifoldChart, Path, PointFn};
use crate::linalg::SquareMatrix;
use crate::metric::BundleMetric;
use crate::scalar::Scalar;

/// Polar chart of the Euclidean plane. The only nonzero coefficients are
/// `coeff(r; theta, theta) = -r` and
/// `coeff(theta; r, theta) = coeff(theta; theta, r) = 1/r`.
pub fn chart<T: Scalar>() -> ManifoldChart<T> {
    ManifoldChart::new(
        2,
        "euclidean-polar",
        Arc::new(|point: &[T], upper, lower1, lower2| {
            let r = point[0];
            match (upper, lower1, lower2) {
                (0, 1, 1) => -r,
                (1, 0, 1) | (1, 1, 0) => T::one() / r,
                _ => T::zero(),
            }
        }),
    )
    .expect("dimension 2 is valid")
}

/// Polar metric `diag(1, r^2)` of the Euclidean plane.
pub fn metric<T: Scalar>() -> BundleMetric<T> {
    BundleMetric::new(Arc::new(|point: &[T]| {
        let r = point[0];
        SquareMatrix::diagonal(&[T::one(), r * r])
    }))
}

/// Cartesian coordinates of a polar point.
pub fn to_cartesian_point<T: Scalar>(polar: &[T]) -> [T; 2] {
    assert_eq!(polar.len(), 2, "polar point must have two coordinates");
    let (r, theta) = (polar[0], polar[1]);
    [r * theta.cos(), r * theta.sin()]
}

/// Pushes vector components from the polar basis to the Cartesian basis at
/// the given polar point.
pub fn vector_to_cartesian<T: Scalar>(polar_point: &[T], comps: &[T]) -> [T; 2] {
    assert_eq!(polar_point.len(), 2);
    assert_eq!(comps.len(), 2);
    let (r, theta) = (polar_point[0], polar_point[1]);
    let (vr, vt) = (comps[0], comps[1]);
    [
        theta.cos() * vr - r * theta.sin() * vt,
        theta.sin() * vr + r * theta.cos() * vt,
    ]
}

/// Pulls Cartesian vector components back to the polar basis at the given
/// polar point. Requires `r != 0`.
pub fn vector_from_cartesian<T: Scalar>(polar_point: &[T], cart: &[T]) -> [T; 2] {
    assert_eq!(polar_point.len(), 2);
    assert_eq!(cart.len(), 2);
    let (r, theta) = (polar_point[0], polar_point[1]);
    let (vx, vy) = (cart[0], cart[1]);
    [
        theta.cos() * vx + theta.sin() * vy,
        (theta.cos() * vy - theta.sin() * vx) / r,
    ]
}

/// Parallel transport between two polar points via the Cartesian chart:
/// exact up to rounding, independent of the connecting path because the
/// plane is flat.
pub fn transport_via_cartesian<T: Scalar>(from: &[T], comps: &[T], to: &[T]) -> [T; 2] {
    let cart = vector_to_cartesian(from, comps);
    vector_from_cartesian(to, &cart)
}

/// Arc of a circle of radius `radius` from angle `theta0` to `theta1`,
/// parametrized by angle.
pub fn circle<T: Scalar>(radius: T, theta0: T, theta1: T) -> Path<T> {
    let eval: PointFn<T> = Arc::new(move |s: T| vec![radius, s]);
    let tangent: PointFn<T> = Arc::new(move |_s: T| vec![T::zero(), T::one()]);
    Path::new((theta0, theta1), eval, tangent).expect("nondegenerate angle interval")
}
