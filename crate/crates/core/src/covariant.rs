//! Covariant differentiation of vector fields along paths.
//!
//! In chart form the derivative of a field `f` along a curve `x` is
//!
//! ```text
//! (Df/ds)^i = df^i/ds + coeff^i_{jk}(x(s)) * xdot^j(s) * f^k(s)
//! ```
//!
//! with the parameter derivative taken by a finite-difference stencil. The
//! field is evaluated on demand at the stencil points: field values are
//! typically produced by an expensive transport pipeline, so no sample
//! caching is attempted. Near the ends of the path domain the stencil
//! degrades to a one-sided second-order rule and the result is flagged.

use crate::error::{Error, Result};
use crate::geometry::{FieldAlongPath, ManifoldChart, TangentVector};
use crate::scalar::{lit, Scalar};

/// Finite-difference scheme for the parameter derivative.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StencilScheme {
    /// Symmetric two-point stencil, second order.
    Central2,
    /// Symmetric four-point stencil, fourth order.
    Central4,
}

/// Step and scheme of the parameter-derivative stencil.
#[derive(Clone, Copy, Debug)]
pub struct CovariantDerivativeConfig<T> {
    pub fd_step: T,
    pub scheme: StencilScheme,
}

impl<T: Scalar> CovariantDerivativeConfig<T> {
    pub fn new(fd_step: T, scheme: StencilScheme) -> Result<Self> {
        if !(fd_step > T::zero()) || !fd_step.is_finite() {
            return Err(Error::InvalidConfiguration(
                "finite-difference step must be positive and finite".into(),
            ));
        }
        Ok(Self { fd_step, scheme })
    }

    /// Default configuration for a worldline of the given parameter span:
    /// second-order stencil with step `1e-4 * span`.
    pub fn default_for_span(span: T) -> Self {
        let floor = lit::<T>(1e-6);
        Self {
            fd_step: (lit::<T>(1e-4) * span.abs()).max(floor),
            scheme: StencilScheme::Central2,
        }
    }
}

/// A covariant derivative value together with an accuracy flag: `one_sided`
/// is set when any stencil had to fall back to a one-sided rule because the
/// path domain left no symmetric margin.
#[derive(Clone, Debug)]
pub struct CovariantDerivative<T> {
    pub vector: TangentVector<T>,
    pub one_sided: bool,
}

/// Stencil as (coefficient, node) pairs: the derivative is the
/// coefficient-weighted sum of field values at the nodes.
fn stencil_nodes<T: Scalar>(
    domain: (T, T),
    s: T,
    cfg: &CovariantDerivativeConfig<T>,
) -> Result<(Vec<(T, T)>, bool)> {
    let (lo, hi) = domain;
    let h = cfg.fd_step;
    if s < lo || s > hi {
        return Err(Error::OutsideDomain {
            value: crate::scalar::to_f64(s),
            lo: crate::scalar::to_f64(lo),
            hi: crate::scalar::to_f64(hi),
        });
    }
    let two = lit::<T>(2.0);
    let reach = match cfg.scheme {
        StencilScheme::Central2 => h,
        StencilScheme::Central4 => two * h,
    };
    if s - reach >= lo && s + reach <= hi {
        let nodes = match cfg.scheme {
            StencilScheme::Central2 => {
                let w = T::one() / (two * h);
                vec![(-w, s - h), (w, s + h)]
            }
            StencilScheme::Central4 => {
                let w = T::one() / (lit::<T>(12.0) * h);
                vec![
                    (w, s - two * h),
                    (-lit::<T>(8.0) * w, s - h),
                    (lit::<T>(8.0) * w, s + h),
                    (-w, s + two * h),
                ]
            }
        };
        return Ok((nodes, false));
    }
    // One-sided second-order fallback toward the side with room.
    let forward_ok = s + two * h <= hi;
    let backward_ok = s - two * h >= lo;
    let w = T::one() / (two * h);
    let nodes = if forward_ok {
        vec![
            (-lit::<T>(3.0) * w, s),
            (lit::<T>(4.0) * w, s + h),
            (-w, s + two * h),
        ]
    } else if backward_ok {
        vec![
            (lit::<T>(3.0) * w, s),
            (-lit::<T>(4.0) * w, s - h),
            (w, s - two * h),
        ]
    } else {
        return Err(Error::InvalidConfiguration(
            "path domain is shorter than the derivative stencil".into(),
        ));
    };
    Ok((nodes, true))
}

/// Covariant derivative of `f` along its path at parameter `s`. Reduces to
/// the plain stencil derivative of the components when the connection
/// vanishes.
pub fn covariant_derivative<T: Scalar>(
    chart: &ManifoldChart<T>,
    f: &FieldAlongPath<T>,
    s: T,
    cfg: &CovariantDerivativeConfig<T>,
) -> Result<CovariantDerivative<T>> {
    let (nodes, one_sided) = stencil_nodes(f.path().domain(), s, cfg)?;
    let dim = chart.dim();
    let mut dcomps = vec![T::zero(); dim];
    for (coeff, node) in &nodes {
        let value = f.value(*node)?;
        if value.dim() != dim {
            return Err(Error::DimensionMismatch {
                context: "field along path",
                expected: dim,
                actual: value.dim(),
            });
        }
        for (acc, &c) in dcomps.iter_mut().zip(value.comps()) {
            *acc = *acc + *coeff * c;
        }
    }

    let point = f.path().point(s)?;
    let direction = f.path().tangent_at(s)?;
    let conn = chart.connection_matrix(&point, &direction)?;
    let here = f.value(s)?;
    let correction = conn.mul_vec(here.comps());
    let comps: Vec<T> = dcomps
        .iter()
        .zip(&correction)
        .map(|(&d, &c)| d + c)
        .collect();
    Ok(CovariantDerivative {
        vector: TangentVector::new(point, comps)?,
        one_sided,
    })
}

/// Second covariant derivative: the derivative operator applied to the
/// field of first derivatives. The flag is set when any inner or outer
/// stencil was one-sided.
pub fn second_covariant_derivative<T: Scalar>(
    chart: &ManifoldChart<T>,
    f: &FieldAlongPath<T>,
    s: T,
    cfg: &CovariantDerivativeConfig<T>,
) -> Result<CovariantDerivative<T>> {
    let (nodes, outer_one_sided) = stencil_nodes(f.path().domain(), s, cfg)?;
    let dim = chart.dim();
    let mut degraded = outer_one_sided;
    let mut dcomps = vec![T::zero(); dim];
    for (coeff, node) in &nodes {
        let inner = covariant_derivative(chart, f, *node, cfg)?;
        degraded = degraded || inner.one_sided;
        for (acc, &c) in dcomps.iter_mut().zip(inner.vector.comps()) {
            *acc = *acc + *coeff * c;
        }
    }

    let point = f.path().point(s)?;
    let direction = f.path().tangent_at(s)?;
    let conn = chart.connection_matrix(&point, &direction)?;
    let here = covariant_derivative(chart, f, s, cfg)?;
    degraded = degraded || here.one_sided;
    let correction = conn.mul_vec(here.vector.comps());
    let comps: Vec<T> = dcomps
        .iter()
        .zip(&correction)
        .map(|(&d, &c)| d + c)
        .collect();
    Ok(CovariantDerivative {
        vector: TangentVector::new(point, comps)?,
        one_sided: degraded,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Path;
    use approx::assert_relative_eq;
    use std::sync::Arc;

    fn flat_line() -> (ManifoldChart<f64>, Path<f64>) {
        let chart = ManifoldChart::flat(2, "plane");
        let path = Path::new(
            (0.0, 2.0),
            Arc::new(|s| vec![s, 0.0]),
            Arc::new(|_| vec![1.0, 0.0]),
        )
        .unwrap();
        (chart, path)
    }

    fn cfg() -> CovariantDerivativeConfig<f64> {
        CovariantDerivativeConfig::new(1e-4, StencilScheme::Central2).unwrap()
    }

    #[test]
    fn flat_derivative_is_plain_differentiation() {
        let (chart, path) = flat_line();
        let field = FieldAlongPath::from_components(path, |s| vec![s, s * s]);
        let d = covariant_derivative(&chart, &field, 1.0, &cfg()).unwrap();
        assert!(!d.one_sided);
        assert_relative_eq!(d.vector.comp(0), 1.0, epsilon = 1e-9);
        assert_relative_eq!(d.vector.comp(1), 2.0, epsilon = 1e-9);
    }

    #[test]
    fn constant_field_has_zero_derivative() {
        let (chart, path) = flat_line();
        let field = FieldAlongPath::from_components(path, |_| vec![3.0, -1.0]);
        let d = covariant_derivative(&chart, &field, 0.5, &cfg()).unwrap();
        assert_eq!(d.vector.comps(), &[0.0, 0.0]);
    }

    #[test]
    fn second_derivative_of_quadratic_components() {
        let (chart, path) = flat_line();
        let field = FieldAlongPath::from_components(path, |s| vec![s * s, 0.0]);
        let d = second_covariant_derivative(&chart, &field, 1.0, &cfg()).unwrap();
        assert_relative_eq!(d.vector.comp(0), 2.0, epsilon = 1e-6);
        assert_relative_eq!(d.vector.comp(1), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn second_derivative_of_linear_field_vanishes() {
        let (chart, path) = flat_line();
        let field = FieldAlongPath::from_components(path, |s| vec![2.0 * s, -s]);
        let d = second_covariant_derivative(&chart, &field, 1.0, &cfg()).unwrap();
        assert_relative_eq!(d.vector.comp(0), 0.0, epsilon = 1e-7);
        assert_relative_eq!(d.vector.comp(1), 0.0, epsilon = 1e-7);
    }

    #[test]
    fn edge_evaluation_falls_back_to_one_sided() {
        let (chart, path) = flat_line();
        let field = FieldAlongPath::from_components(path, |s| vec![s * s, 0.0]);
        let d = covariant_derivative(&chart, &field, 0.0, &cfg()).unwrap();
        assert!(d.one_sided);
        assert_relative_eq!(d.vector.comp(0), 0.0, epsilon = 1e-7);
    }

    #[test]
    fn domain_shorter_than_stencil_is_an_error() {
        let (chart, _) = flat_line();
        let tiny = Path::new(
            (0.0, 1e-5),
            Arc::new(|s| vec![s, 0.0]),
            Arc::new(|_| vec![1.0, 0.0]),
        )
        .unwrap();
        let field = FieldAlongPath::from_components(tiny, |s| vec![s, 0.0]);
        assert!(matches!(
            covariant_derivative(&chart, &field, 0.0, &cfg()),
            Err(Error::InvalidConfiguration(_))
        ));
    }

    #[test]
    fn central4_reduces_to_exact_on_cubics() {
        let (chart, path) = flat_line();
        let field = FieldAlongPath::from_components(path, |s| vec![s * s * s, 0.0]);
        let cfg = CovariantDerivativeConfig::new(1e-3, StencilScheme::Central4).unwrap();
        let d = covariant_derivative(&chart, &field, 1.0, &cfg).unwrap();
        assert_relative_eq!(d.vector.comp(0), 3.0, epsilon = 1e-10);
    }
}
