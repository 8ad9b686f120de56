//! Transport of tangent vectors along paths.
//!
//! A transport assigns to each path and each ordered parameter pair `(s, t)`
//! a map between the tangent spaces at the two curve points, subject to two
//! axioms: transporting from `s` to `s` is the identity, and transporting
//! `s -> t` followed by `t -> r` equals transporting `s -> r` directly.
//! Linearity on each tangent space is an additional property, not an
//! assumption; the general [`Transport`] admits arbitrary user maps.
//!
//! Two transports are shipped. The flat transport keeps components
//! unchanged and only moves the base point. The linear-connection transport
//! solves the parallel-transport equation
//!
//! ```text
//! dY^i/du = -coeff^i_{jk}(path(u)) * tangent^j(u) * Y^k,   Y(s) = identity
//! ```
//!
//! for the fundamental matrix with a classical fixed-step fourth-order
//! Runge-Kutta scheme. Reverse transports integrate the same equation
//! backwards instead of inverting the matrix, which preserves the group
//! structure of the axioms to integrator accuracy.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{ManifoldChart, Path, TangentVector};
use crate::linalg::SquareMatrix;
use crate::metric::BundleMetric;
use crate::scalar::{lit, Scalar};
use crate::tolerances;

/// Discriminates the shipped transport realizations from user-supplied maps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TransportKind {
    Flat,
    LinearConnection,
    Custom,
}

/// User-supplied transport map: `(path, from, to, vector)` to the
/// transported vector. Not required to be linear.
pub type CustomTransportFn<T> =
    Arc<dyn Fn(&Path<T>, T, T, &TangentVector<T>) -> Result<TangentVector<T>> + Send + Sync>;

/// A rule assigning to every path a two-parameter family of tangent-space
/// maps.
#[derive(Clone)]
pub enum Transport<T> {
    /// Components unchanged; only the base point moves.
    Flat,
    /// Parallel transport of the chart connection, integrated with
    /// `steps_per_unit` RK4 steps per unit of parameter length.
    LinearConnection {
        chart: ManifoldChart<T>,
        steps_per_unit: usize,
    },
    /// Arbitrary user map; the identity at equal parameters is still
    /// enforced by the wrapper.
    Custom(CustomTransportFn<T>),
}

impl<T: Scalar> Transport<T> {
    pub fn flat() -> Self {
        Transport::Flat
    }

    pub fn linear(chart: ManifoldChart<T>, steps_per_unit: usize) -> Self {
        Transport::LinearConnection {
            chart,
            steps_per_unit,
        }
    }

    pub fn custom(map: CustomTransportFn<T>) -> Self {
        Transport::Custom(map)
    }

    pub fn kind(&self) -> TransportKind {
        match self {
            Transport::Flat => TransportKind::Flat,
            Transport::LinearConnection { .. } => TransportKind::LinearConnection,
            Transport::Custom(_) => TransportKind::Custom,
        }
    }

    /// Transports `v`, based at `path(from)`, to the tangent space at
    /// `path(to)`.
    ///
    /// At equal parameters the input is returned unchanged, so the identity
    /// axiom holds exactly for every kind.
    pub fn apply(
        &self,
        path: &Path<T>,
        from: T,
        to: T,
        v: &TangentVector<T>,
    ) -> Result<TangentVector<T>> {
        let start = path.point(from)?;
        v.require_base(&start, lit(tolerances::BASE_POINT_TOL))?;
        if from == to {
            return Ok(v.clone());
        }
        match self {
            Transport::Flat => v.rebased(path.point(to)?),
            Transport::LinearConnection {
                chart,
                steps_per_unit,
            } => {
                let steps = step_count::<T>(*steps_per_unit, to - from);
                let m = linear_transport_matrix(chart, path, from, to, steps)?;
                TangentVector::new(path.point(to)?, m.apply(v.comps()))
            }
            Transport::Custom(map) => {
                let out = map(path, from, to, v)?;
                out.require_base(&path.point(to)?, lit(tolerances::BASE_POINT_TOL))?;
                Ok(out)
            }
        }
    }
}

impl<T: Scalar> std::fmt::Debug for Transport<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Transport::Flat => write!(f, "Transport::Flat"),
            Transport::LinearConnection {
                chart,
                steps_per_unit,
            } => f
                .debug_struct("Transport::LinearConnection")
                .field("chart", chart)
                .field("steps_per_unit", steps_per_unit)
                .finish(),
            Transport::Custom(_) => write!(f, "Transport::Custom"),
        }
    }
}

fn step_count<T: Scalar>(steps_per_unit: usize, span: T) -> usize {
    let n = (lit::<T>(steps_per_unit as f64) * span.abs())
        .ceil()
        .to_usize()
        .unwrap_or(1);
    n.max(1)
}

/// The matrix of a linear transport between two parameters of a path, in
/// the chart basis.
#[derive(Clone, Debug)]
pub struct TransportMatrix<T> {
    pub from_param: T,
    pub to_param: T,
    pub matrix: SquareMatrix<T>,
}

impl<T: Scalar> TransportMatrix<T> {
    /// Applies the matrix to vector components.
    pub fn apply(&self, comps: &[T]) -> Vec<T> {
        self.matrix.mul_vec(comps)
    }
}

/// Fundamental matrix of the parallel-transport equation from `from` to
/// `to`, integrated with `steps` RK4 steps.
///
/// Linearity in the transported vector holds exactly by construction: the
/// result is a matrix acting on components.
pub fn linear_transport_matrix<T: Scalar>(
    chart: &ManifoldChart<T>,
    path: &Path<T>,
    from: T,
    to: T,
    steps: usize,
) -> Result<TransportMatrix<T>> {
    if steps == 0 {
        return Err(Error::InvalidConfiguration(
            "transport integration needs at least one step".into(),
        ));
    }
    let dim = chart.dim();
    let start = path.point(from)?;
    if start.len() != dim {
        return Err(Error::DimensionMismatch {
            context: "transport path",
            expected: dim,
            actual: start.len(),
        });
    }
    if from == to {
        return Ok(TransportMatrix {
            from_param: from,
            to_param: to,
            matrix: SquareMatrix::identity(dim),
        });
    }

    // Coefficient matrix of the transport equation at parameter u.
    let rhs = |u: T| -> Result<SquareMatrix<T>> {
        let point = path.point(u)?;
        let tangent = path.tangent_at(u)?;
        Ok(chart.connection_matrix(&point, &tangent)?.scaled(-T::one()))
    };

    let span = to - from;
    let n = lit::<T>(steps as f64);
    let mut y = SquareMatrix::identity(dim);
    let half = lit::<T>(0.5);
    let sixth = lit::<T>(1.0 / 6.0);
    let two = lit::<T>(2.0);
    for k in 0..steps {
        // Grid points as exact fractions of the span so the final node
        // lands on `to` without drift.
        let u0 = from + span * (lit::<T>(k as f64) / n);
        let u1 = from + span * (lit::<T>((k + 1) as f64) / n);
        let h = u1 - u0;
        let um = u0 + h * half;

        let a0 = rhs(u0)?;
        let am = rhs(um)?;
        let a1 = rhs(u1)?;

        let k1 = a0.mul(&y);
        let mut y2 = y.clone();
        y2.axpy(h * half, &k1);
        let k2 = am.mul(&y2);
        let mut y3 = y.clone();
        y3.axpy(h * half, &k2);
        let k3 = am.mul(&y3);
        let mut y4 = y.clone();
        y4.axpy(h, &k3);
        let k4 = a1.mul(&y4);

        let mut incr = k1;
        incr.axpy(two, &k2);
        incr.axpy(two, &k3);
        incr.axpy(T::one(), &k4);
        y.axpy(h * sixth, &incr);
    }
    if !y.is_finite() {
        return Err(Error::NonFinite("transport matrix integration".into()));
    }
    Ok(TransportMatrix {
        from_param: from,
        to_param: to,
        matrix: y,
    })
}

/// Checks the composition axiom on one path: transporting `s -> t` then
/// `t -> r` must match transporting `s -> r`, within `tol` in the maximum
/// norm.
pub fn check_composition<T: Scalar>(
    transport: &Transport<T>,
    path: &Path<T>,
    r: T,
    s: T,
    t: T,
    v: &TangentVector<T>,
    tol: T,
) -> Result<bool> {
    let via = transport.apply(path, s, t, v)?;
    let two_leg = transport.apply(path, t, r, &via)?;
    let direct = transport.apply(path, s, r, v)?;
    Ok(two_leg.sub(&direct)?.max_abs_comp() <= tol)
}

/// Checks that the transport preserves the metric pairing of two vectors
/// carried from `path(s)` to `path(t)`.
pub fn check_metric_consistency<T: Scalar>(
    transport: &Transport<T>,
    g: &BundleMetric<T>,
    path: &Path<T>,
    s: T,
    t: T,
    u: &TangentVector<T>,
    v: &TangentVector<T>,
    tol: T,
) -> Result<bool> {
    let before = g.product(u, v)?;
    let tu = transport.apply(path, s, t, u)?;
    let tv = transport.apply(path, s, t, v)?;
    let after = g.product(&tu, &tv)?;
    Ok((before - after).abs() <= tol)
}

/// Checks homogeneity of the transport: carrying `lambda * v` must match
/// `lambda` times carrying `v`.
pub fn check_scaling_consistency<T: Scalar>(
    transport: &Transport<T>,
    path: &Path<T>,
    s: T,
    t: T,
    v: &TangentVector<T>,
    lambda: T,
    tol: T,
) -> Result<bool> {
    let scaled_first = transport.apply(path, s, t, &v.scaled(lambda))?;
    let scaled_after = transport.apply(path, s, t, v)?.scaled(lambda);
    Ok(scaled_first.sub(&scaled_after)?.max_abs_comp() <= tol)
}
