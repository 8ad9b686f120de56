//! Scalar abstraction: the floating-point type every geometric quantity is
//! built from.

use std::fmt::{Debug, Display};

use num_traits::Float;

/// Floating-point scalar the library is generic over.
///
/// `f64` is the working type of every shipped pipeline; `f32` is available
/// for callers that trade accuracy for footprint. The crate root exports
/// concrete aliases for both.
pub trait Scalar: Float + Debug + Display + Send + Sync + 'static {}

impl Scalar for f32 {}
impl Scalar for f64 {}

/// Converts an `f64` literal (tolerances, quadrature weights, defaults) into
/// the working scalar type.
#[inline]
pub fn lit<T: Scalar>(x: f64) -> T {
    T::from(x).expect("f64 literal must be representable in the scalar type")
}

/// Converts a scalar to `f64` for diagnostics; NaN when the cast fails.
#[inline]
pub fn to_f64<T: Scalar>(x: T) -> f64 {
    x.to_f64().unwrap_or(f64::NAN)
}
