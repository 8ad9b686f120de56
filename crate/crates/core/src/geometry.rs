//! Charts, parametrized paths, tangent vectors, and vector fields along
//! paths: the substrate every other module consumes.
//!
//! Everything lives in a single global coordinate chart. Points and vector
//! components are dense arrays of scalars; the chart dimension is fixed at
//! construction and small in practice. All types are immutable after
//! construction and cheap to clone (closures are shared through `Arc`), so
//! they may be used concurrently without synchronization.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::linalg::SquareMatrix;
use crate::scalar::{lit, to_f64, Scalar};
use crate::tolerances;

/// Map from a curve parameter to chart coordinates (or components).
pub type PointFn<T> = Arc<dyn Fn(T) -> Vec<T> + Send + Sync>;

/// Connection coefficients: `(point, upper, lower1, lower2)` yields the
/// coefficient with one upper and two lower indices at that point.
pub type ConnectionFn<T> = Arc<dyn Fn(&[T], usize, usize, usize) -> T + Send + Sync>;

/// A coordinate chart of fixed dimension together with the connection
/// coefficients of a covariant differentiation, units 1/length in the
/// coordinate convention of the chart.
#[derive(Clone)]
pub struct ManifoldChart<T> {
    dim: usize,
    name: String,
    connection: ConnectionFn<T>,
}

impl<T: Scalar> ManifoldChart<T> {
    pub fn new(dim: usize, name: impl Into<String>, connection: ConnectionFn<T>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidConfiguration(
                "chart dimension must be at least 1".into(),
            ));
        }
        Ok(Self {
            dim,
            name: name.into(),
            connection,
        })
    }

    /// Chart with identically vanishing connection coefficients.
    pub fn flat(dim: usize, name: impl Into<String>) -> Self {
        Self::new(dim, name, Arc::new(|_: &[T], _, _, _| T::zero()))
            .expect("flat chart dimension is checked by callers")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Single connection coefficient at a point.
    pub fn coefficient(&self, point: &[T], upper: usize, lower1: usize, lower2: usize) -> T {
        (self.connection)(point, upper, lower1, lower2)
    }

    /// Contraction of the connection with a direction over the first lower
    /// index: `M[i][k] = sum_j coeff(i; j, k) * direction[j]`.
    ///
    /// This is the matrix acting on field components both in the transport
    /// equation and in the covariant derivative along a curve. Fails when
    /// any coefficient is non-finite at the point.
    pub fn connection_matrix(&self, point: &[T], direction: &[T]) -> Result<SquareMatrix<T>> {
        let n = self.dim;
        if point.len() != n {
            return Err(Error::DimensionMismatch {
                context: "connection point",
                expected: n,
                actual: point.len(),
            });
        }
        if direction.len() != n {
            return Err(Error::DimensionMismatch {
                context: "connection direction",
                expected: n,
                actual: direction.len(),
            });
        }
        let mut m = SquareMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let mut acc = T::zero();
                for (j, &dir) in direction.iter().enumerate() {
                    if dir == T::zero() {
                        continue;
                    }
                    acc = acc + self.coefficient(point, i, j, k) * dir;
                }
                m.set(i, k, acc);
            }
        }
        if !m.is_finite() {
            return Err(Error::NonFinite(format!(
                "connection coefficients of chart '{}' at {:?}",
                self.name,
                point.iter().map(|&x| to_f64(x)).collect::<Vec<_>>()
            )));
        }
        Ok(m)
    }
}

impl<T> std::fmt::Debug for ManifoldChart<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ManifoldChart")
            .field("dim", &self.dim)
            .field("name", &self.name)
            .finish_non_exhaustive()
    }
}

/// A parametrized curve on a closed interval, with a tangent evaluator.
///
/// When only the point evaluator is available, [`Path::from_eval`] installs
/// a central-difference tangent with step `1e-6 * (b - a)`.
#[derive(Clone)]
pub struct Path<T> {
    lo: T,
    hi: T,
    eval: PointFn<T>,
    tangent: PointFn<T>,
}

impl<T: Scalar> Path<T> {
    pub fn new(domain: (T, T), eval: PointFn<T>, tangent: PointFn<T>) -> Result<Self> {
        let (lo, hi) = domain;
        if !(lo.is_finite() && hi.is_finite()) || lo >= hi {
            return Err(Error::InvalidConfiguration(format!(
                "path domain [{}, {}] must be a finite interval with lo < hi",
                lo, hi
            )));
        }
        Ok(Self {
            lo,
            hi,
            eval,
            tangent,
        })
    }

    /// Path with a numeric tangent derived from the point evaluator.
    pub fn from_eval(domain: (T, T), eval: PointFn<T>) -> Result<Self> {
        let (lo, hi) = domain;
        let h = lit::<T>(1e-6) * (hi - lo);
        let e = eval.clone();
        let tangent: PointFn<T> = Arc::new(move |s: T| {
            // Clamp the stencil center so both samples stay inside the domain.
            let c = s.max(lo + h).min(hi - h);
            let plus = e(c + h);
            let minus = e(c - h);
            plus.iter()
                .zip(&minus)
                .map(|(&p, &m)| (p - m) / (h + h))
                .collect()
        });
        Self::new(domain, eval, tangent)
    }

    /// Straight chart-coordinate segment from `from` to `to` on `[0, 1]`.
    pub fn line(from: &[T], to: &[T]) -> Self {
        assert_eq!(
            from.len(),
            to.len(),
            "segment endpoints differ in dimension"
        );
        let from: Vec<T> = from.to_vec();
        let delta: Vec<T> = to.iter().zip(&from).map(|(&t, &f)| t - f).collect();
        let f = from.clone();
        let d = delta.clone();
        let eval: PointFn<T> =
            Arc::new(move |s: T| f.iter().zip(&d).map(|(&a, &b)| a + s * b).collect());
        let tangent: PointFn<T> = Arc::new(move |_s: T| delta.clone());
        Self::new((T::zero(), T::one()), eval, tangent).expect("unit interval is a valid domain")
    }

    /// Constant path pinned at one point.
    pub fn constant(point: &[T], domain: (T, T)) -> Result<Self> {
        let p = point.to_vec();
        let z = vec![T::zero(); point.len()];
        let eval: PointFn<T> = Arc::new(move |_s: T| p.clone());
        let tangent: PointFn<T> = Arc::new(move |_s: T| z.clone());
        Self::new(domain, eval, tangent)
    }

    pub fn domain(&self) -> (T, T) {
        (self.lo, self.hi)
    }

    pub fn contains(&self, s: T) -> bool {
        s >= self.lo && s <= self.hi
    }

    fn check_param(&self, s: T) -> Result<()> {
        if !self.contains(s) {
            return Err(Error::OutsideDomain {
                value: to_f64(s),
                lo: to_f64(self.lo),
                hi: to_f64(self.hi),
            });
        }
        Ok(())
    }

    /// Chart coordinates of the curve point at parameter `s`.
    pub fn point(&self, s: T) -> Result<Vec<T>> {
        self.check_param(s)?;
        let p = (self.eval)(s);
        if p.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!("path point at parameter {s}")));
        }
        Ok(p)
    }

    /// Tangent components of the curve at parameter `s`.
    pub fn tangent_at(&self, s: T) -> Result<Vec<T>> {
        self.check_param(s)?;
        let v = (self.tangent)(s);
        if v.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite(format!("path tangent at parameter {s}")));
        }
        Ok(v)
    }

    /// Tangent vector of the curve at `s`, based at the curve point.
    pub fn tangent_vector(&self, s: T) -> Result<TangentVector<T>> {
        TangentVector::new(self.point(s)?, self.tangent_at(s)?)
    }
}

impl<T: Scalar> std::fmt::Debug for Path<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Path")
            .field("domain", &(to_f64(self.lo), to_f64(self.hi)))
            .finish_non_exhaustive()
    }
}

/// A vector of a tangent space: chart components attached to a base point.
///
/// The base point realizes the bundle projection; operations that combine
/// two vectors require their base points to agree.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentVector<T> {
    base: Vec<T>,
    comps: Vec<T>,
}

impl<T: Scalar> TangentVector<T> {
    pub fn new(base: Vec<T>, comps: Vec<T>) -> Result<Self> {
        if base.len() != comps.len() {
            return Err(Error::DimensionMismatch {
                context: "tangent vector",
                expected: base.len(),
                actual: comps.len(),
            });
        }
        if base.iter().chain(&comps).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("tangent vector entries".into()));
        }
        Ok(Self { base, comps })
    }

    pub fn zero_at(base: Vec<T>) -> Result<Self> {
        let z = vec![T::zero(); base.len()];
        Self::new(base, z)
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn base(&self) -> &[T] {
        &self.base
    }

    pub fn comps(&self) -> &[T] {
        &self.comps
    }

    pub fn comp(&self, i: usize) -> T {
        self.comps[i]
    }

    /// Largest absolute component.
    pub fn max_abs_comp(&self) -> T {
        self.comps
            .iter()
            .fold(T::zero(), |acc, &c| acc.max(c.abs()))
    }

    /// Checks that this vector is based at `point`, within `tol` per
    /// coordinate.
    pub fn based_at(&self, point: &[T], tol: T) -> bool {
        self.base.len() == point.len()
            && self
                .base
                .iter()
                .zip(point)
                .all(|(&a, &b)| (a - b).abs() <= tol)
    }

    pub(crate) fn require_base(&self, point: &[T], tol: T) -> Result<()> {
        if self.based_at(point, tol) {
            Ok(())
        } else {
            Err(Error::BasePointMismatch {
                expected: point.iter().map(|&x| to_f64(x)).collect(),
                actual: self.base.iter().map(|&x| to_f64(x)).collect(),
                tol: to_f64(tol),
            })
        }
    }

    /// Componentwise sum; the two vectors must share a base point.
    pub fn add(&self, other: &Self) -> Result<Self> {
        other.require_base(&self.base, lit(tolerances::BASE_POINT_TOL))?;
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(&a, &b)| a + b)
            .collect();
        Self::new(self.base.clone(), comps)
    }

    /// Componentwise difference; the two vectors must share a base point.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        other.require_base(&self.base, lit(tolerances::BASE_POINT_TOL))?;
        let comps = self
            .comps
            .iter()
            .zip(&other.comps)
            .map(|(&a, &b)| a - b)
            .collect();
        Self::new(self.base.clone(), comps)
    }

    /// Same base point, components scaled by `c`.
    pub fn scaled(&self, c: T) -> Self {
        Self {
            base: self.base.clone(),
            comps: self.comps.iter().map(|&a| a * c).collect(),
        }
    }

    /// Same components attached to a different base point.
    pub fn rebased(&self, base: Vec<T>) -> Result<Self> {
        Self::new(base, self.comps.clone())
    }
}

/// Fallible evaluator of a vector field along a path.
pub type FieldFn<T> = Arc<dyn Fn(T) -> Result<TangentVector<T>> + Send + Sync>;

/// A vector field defined along a path: for every parameter of the path it
/// yields a tangent vector based at the corresponding curve point.
#[derive(Clone)]
pub struct FieldAlongPath<T> {
    path: Path<T>,
    value: FieldFn<T>,
}

impl<T: Scalar> FieldAlongPath<T> {
    pub fn new(
        path: Path<T>,
        value: impl Fn(T) -> Result<TangentVector<T>> + Send + Sync + 'static,
    ) -> Self {
        Self {
            path,
            value: Arc::new(value),
        }
    }

    /// Field given by a plain components function; the base point is read
    /// off the path.
    pub fn from_components(
        path: Path<T>,
        comps: impl Fn(T) -> Vec<T> + Send + Sync + 'static,
    ) -> Self {
        let p = path.clone();
        Self::new(path, move |s| TangentVector::new(p.point(s)?, comps(s)))
    }

    pub fn path(&self) -> &Path<T> {
        &self.path
    }

    /// Field value at `s`. Verifies that the value is actually based at the
    /// path point, within a chart-coordinate tolerance scaled by the point's
    /// magnitude.
    pub fn value(&self, s: T) -> Result<TangentVector<T>> {
        let v = (self.value)(s)?;
        let point = self.path.point(s)?;
        let scale = point.iter().fold(T::one(), |acc, &x| acc.max(x.abs()));
        v.require_base(&point, lit::<T>(tolerances::CHART_COORD_TOL) * scale)?;
        Ok(v)
    }
}

impl<T: Scalar> std::fmt::Debug for FieldAlongPath<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FieldAlongPath")
            .field("path", &self.path)
            .finish_non_exhaustive()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn line_2d() -> Path<f64> {
        Path::new(
            (0.0, 2.0),
            Arc::new(|s| vec![s, 2.0 * s]),
            Arc::new(|_| vec![1.0, 2.0]),
        )
        .unwrap()
    }

    #[test]
    fn point_evaluates_the_curve() {
        let p = line_2d();
        assert_eq!(p.point(1.0).unwrap(), vec![1.0, 2.0]);
    }

    #[test]
    fn constant_path_evaluates_to_its_point() {
        let p = Path::constant(&[3.0, 4.0], (0.0, 1.0)).unwrap();
        assert_eq!(p.point(0.7).unwrap(), vec![3.0, 4.0]);
        assert_eq!(p.tangent_at(0.7).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn circle_point_at_quarter_turn() {
        let p = Path::new(
            (0.0, std::f64::consts::PI),
            Arc::new(|s: f64| vec![s.cos(), s.sin()]),
            Arc::new(|s: f64| vec![-s.sin(), s.cos()]),
        )
        .unwrap();
        let q = p.point(std::f64::consts::FRAC_PI_2).unwrap();
        assert_relative_eq!(q[0], 0.0, epsilon = 1e-15);
        assert_relative_eq!(q[1], 1.0, epsilon = 1e-15);
    }

    #[test]
    fn parameter_outside_domain_is_rejected() {
        let p = line_2d();
        assert!(matches!(p.point(3.0), Err(Error::OutsideDomain { .. })));
        assert!(matches!(
            p.tangent_vector(-0.1),
            Err(Error::OutsideDomain { .. })
        ));
    }

    #[test]
    fn tangent_vector_carries_base_and_components() {
        let p = line_2d();
        let v = p.tangent_vector(0.0).unwrap();
        assert_eq!(v.base(), &[0.0, 0.0]);
        assert_eq!(v.comps(), &[1.0, 2.0]);
    }

    #[test]
    fn affine_path_tangent_is_parameter_independent() {
        let p = Path::line(&[1.0, 1.0], &[3.0, 5.0]);
        let a = p.tangent_vector(0.0).unwrap();
        let b = p.tangent_vector(1.0).unwrap();
        assert_eq!(a.comps(), b.comps());
        assert_eq!(a.comps(), &[2.0, 4.0]);
    }

    #[test]
    fn derived_tangent_converges_at_second_order() {
        // Compare the installed central-difference tangent against the
        // analytic derivative on a smooth curve.
        let eval: PointFn<f64> = Arc::new(|s: f64| vec![s.sin(), s.exp()]);
        let p = Path::from_eval((0.0, 1.0), eval).unwrap();
        let t = p.tangent_at(0.5).unwrap();
        assert_relative_eq!(t[0], 0.5f64.cos(), epsilon = 1e-9);
        assert_relative_eq!(t[1], 0.5f64.exp(), epsilon = 1e-8);
    }

    #[test]
    fn central_difference_converges_to_declared_tangent_at_second_order() {
        let p = Path::new(
            (0.0, 3.0),
            Arc::new(|s: f64| vec![s.sin()]),
            Arc::new(|s: f64| vec![s.cos()]),
        )
        .unwrap();
        let err = |h: f64| {
            let plus = p.point(1.0 + h).unwrap()[0];
            let minus = p.point(1.0 - h).unwrap()[0];
            ((plus - minus) / (2.0 * h) - p.tangent_at(1.0).unwrap()[0]).abs()
        };
        let ratio = err(1e-2) / err(5e-3);
        assert!((3.5..4.5).contains(&ratio), "second-order ratio {ratio}");
    }

    #[test]
    fn non_finite_path_values_are_reported() {
        let p = Path::new(
            (0.0, 1.0),
            Arc::new(|s: f64| vec![1.0 / (s - 0.5)]),
            Arc::new(|_| vec![0.0]),
        )
        .unwrap();
        assert!(matches!(p.point(0.5), Err(Error::NonFinite(_))));
    }

    #[test]
    fn vector_arithmetic_requires_matching_base() {
        let a = TangentVector::new(vec![0.0, 0.0], vec![1.0, 2.0]).unwrap();
        let b = TangentVector::new(vec![1.0, 0.0], vec![1.0, 2.0]).unwrap();
        assert!(matches!(a.sub(&b), Err(Error::BasePointMismatch { .. })));
        let c = TangentVector::new(vec![0.0, 0.0], vec![0.5, 0.5]).unwrap();
        assert_eq!(a.sub(&c).unwrap().comps(), &[0.5, 1.5]);
    }

    #[test]
    fn field_base_consistency_is_enforced() {
        let path = line_2d();
        let good = FieldAlongPath::from_components(path.clone(), |s| vec![s, s * s]);
        assert!(good.value(1.0).is_ok());

        let bad = FieldAlongPath::new(path, |s| {
            TangentVector::new(vec![s + 1.0, 2.0 * s], vec![0.0, 0.0])
        });
        assert!(matches!(
            bad.value(1.0),
            Err(Error::BasePointMismatch { .. })
        ));
    }

    #[test]
    fn chart_rejects_zero_dimension() {
        assert!(ManifoldChart::<f64>::new(0, "bad", Arc::new(|_, _, _, _| 0.0)).is_err());
    }

    #[test]
    fn flat_chart_connection_matrix_is_zero() {
        let chart = ManifoldChart::<f64>::flat(2, "plane");
        let m = chart.connection_matrix(&[1.0, 2.0], &[3.0, 4.0]).unwrap();
        assert_eq!(m, SquareMatrix::zeros(2));
    }

    #[test]
    fn non_finite_connection_is_reported() {
        let chart =
            ManifoldChart::<f64>::new(1, "singular", Arc::new(|p: &[f64], _, _, _| 1.0 / p[0]))
                .unwrap();
        assert!(matches!(
            chart.connection_matrix(&[0.0], &[1.0]),
            Err(Error::NonFinite(_))
        ));
    }
}
