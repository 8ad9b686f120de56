//! Bundle metric, scalar products and squares, the sign function used to
//! keep proper energies positive, and orthogonal bases adapted to a velocity
//! direction.
//!
//! The metric is a pointwise bilinear, symmetric, nondegenerate form on
//! tangent spaces. It is not assumed positive definite, so scalar squares
//! can take any real value and basis completion must cope with null
//! candidate directions.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::TangentVector;
use crate::linalg::SquareMatrix;
use crate::scalar::{lit, Scalar};
use crate::tolerances;

/// Pointwise metric matrix evaluator.
pub type MetricFn<T> = Arc<dyn Fn(&[T]) -> SquareMatrix<T> + Send + Sync>;

/// Sign convention for the sign function at exactly zero.
///
/// The shipped results do not depend on this choice for non-null
/// velocities; it only matters on the light cone.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SignAtZero {
    Positive,
    Negative,
}

impl Default for SignAtZero {
    fn default() -> Self {
        SignAtZero::Positive
    }
}

/// Sign function: -1 for negative arguments, +1 otherwise.
#[inline]
pub fn epsilon<T: Scalar>(x: T) -> T {
    epsilon_with(x, SignAtZero::Positive)
}

/// Sign function with a configurable value at exactly zero.
#[inline]
pub fn epsilon_with<T: Scalar>(x: T, zero: SignAtZero) -> T {
    if x < T::zero() {
        -T::one()
    } else if x > T::zero() {
        T::one()
    } else {
        match zero {
            SignAtZero::Positive => T::one(),
            SignAtZero::Negative => -T::one(),
        }
    }
}

/// A metric on tangent spaces: a symmetric nondegenerate matrix at every
/// chart point.
#[derive(Clone)]
pub struct BundleMetric<T> {
    at: MetricFn<T>,
}

impl<T: Scalar> BundleMetric<T> {
    pub fn new(at: MetricFn<T>) -> Self {
        Self { at }
    }

    /// Constant metric matrix, the same at every point.
    pub fn constant(matrix: SquareMatrix<T>) -> Self {
        Self::new(Arc::new(move |_: &[T]| matrix.clone()))
    }

    /// Identity metric of the given dimension.
    pub fn euclidean(dim: usize) -> Self {
        Self::constant(SquareMatrix::identity(dim))
    }

    /// Diagonal metric `(+1, -1, ..., -1)` of the given dimension.
    pub fn minkowski(dim: usize) -> Self {
        let mut entries = vec![-T::one(); dim];
        entries[0] = T::one();
        Self::constant(SquareMatrix::diagonal(&entries))
    }

    /// Metric matrix at a point, validated for symmetry, nondegeneracy and
    /// finiteness.
    pub fn matrix_at(&self, point: &[T]) -> Result<SquareMatrix<T>> {
        let g = (self.at)(point);
        if g.dim() != point.len() {
            return Err(Error::DimensionMismatch {
                context: "metric matrix",
                expected: point.len(),
                actual: g.dim(),
            });
        }
        if !g.is_finite() {
            return Err(Error::NonFinite("metric matrix entries".into()));
        }
        if g.max_asymmetry() > lit(tolerances::METRIC_SYMMETRY_TOL) {
            return Err(Error::InvalidConfiguration(
                "metric matrix is not symmetric".into(),
            ));
        }
        if g.det().abs() <= lit(tolerances::METRIC_DEGENERACY_TOL) {
            return Err(Error::InvalidConfiguration(
                "metric matrix is degenerate".into(),
            ));
        }
        Ok(g)
    }

    /// Scalar product of two vectors based at the same point.
    pub fn product(&self, u: &TangentVector<T>, v: &TangentVector<T>) -> Result<T> {
        v.require_base(u.base(), lit(tolerances::BASE_POINT_TOL))?;
        let g = self.matrix_at(u.base())?;
        let mut acc = T::zero();
        for (i, &ui) in u.comps().iter().enumerate() {
            if ui == T::zero() {
                continue;
            }
            for (j, &vj) in v.comps().iter().enumerate() {
                acc = acc + g.get(i, j) * ui * vj;
            }
        }
        Ok(acc)
    }

    /// Scalar square of a vector; may be negative for indefinite metrics.
    pub fn square(&self, v: &TangentVector<T>) -> Result<T> {
        self.product(v, v)
    }
}

impl<T> std::fmt::Debug for BundleMetric<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BundleMetric").finish_non_exhaustive()
    }
}

/// An orthogonal basis whose first vector is a normalized velocity
/// direction. The first component of a vector in this basis reads off
/// energy-like quantities.
#[derive(Clone, Debug)]
pub struct AdaptedBasis<T> {
    vectors: Vec<TangentVector<T>>,
    signatures: Vec<T>,
}

impl<T: Scalar> AdaptedBasis<T> {
    pub fn base(&self) -> &[T] {
        self.vectors[0].base()
    }

    pub fn vectors(&self) -> &[TangentVector<T>] {
        &self.vectors
    }

    pub fn first(&self) -> &TangentVector<T> {
        &self.vectors[0]
    }

    /// Scalar square of the first basis vector: the sign of the squared
    /// norm of the velocity it was built from.
    pub fn signature1(&self) -> T {
        self.signatures[0]
    }

    /// Component of `a` along the `i`-th basis vector,
    /// `a . lambda_i / (lambda_i)^2`.
    pub fn component(&self, g: &BundleMetric<T>, a: &TangentVector<T>, i: usize) -> Result<T> {
        a.require_base(self.base(), lit(tolerances::BASE_POINT_TOL))?;
        Ok(g.product(a, &self.vectors[i])? / self.signatures[i])
    }

    /// Reconstructs a vector from its components in this basis; used to
    /// check decomposition completeness.
    pub fn reconstruct(
        &self,
        g: &BundleMetric<T>,
        a: &TangentVector<T>,
    ) -> Result<TangentVector<T>> {
        let mut acc = TangentVector::zero_at(self.base().to_vec())?;
        for i in 0..self.vectors.len() {
            let c = self.component(g, a, i)?;
            acc = acc.add(&self.vectors[i].scaled(c))?;
        }
        Ok(acc)
    }
}

/// Builds a basis adapted to `v1`: the first vector is `v1` normalized by
/// the square root of the absolute value of its scalar square, the rest
/// complete an orthogonal basis taken from the chart axes in index order
/// (axes already spanned, or numerically null after projection, are
/// skipped).
///
/// Fails with a degenerate-direction error when `v1` is null: the first
/// component of a vector then carries no energy information, which is
/// spread over all components instead.
pub fn adapted_basis<T: Scalar>(
    g: &BundleMetric<T>,
    v1: &TangentVector<T>,
) -> Result<AdaptedBasis<T>> {
    let dim = v1.dim();
    let sq = g.square(v1)?;
    let scale = v1.max_abs_comp();
    if sq.abs() < lit::<T>(tolerances::NULL_DIRECTION_TOL) * T::one().max(scale * scale) {
        return Err(Error::DegenerateDirection(
            "cannot adapt a basis to a null velocity".into(),
        ));
    }
    let lam1 = v1.scaled(T::one() / sq.abs().sqrt());
    let mut vectors = vec![lam1];
    let mut signatures = vec![epsilon(sq)];

    for axis in 0..dim {
        if vectors.len() == dim {
            break;
        }
        let mut comps = vec![T::zero(); dim];
        comps[axis] = T::one();
        let mut cand = TangentVector::new(v1.base().to_vec(), comps)?;
        for (vec_k, &sig_k) in vectors.iter().zip(&signatures) {
            let c = g.product(&cand, vec_k)? / sig_k;
            cand = cand.sub(&vec_k.scaled(c))?;
        }
        if cand.max_abs_comp() < lit(tolerances::BASIS_RESIDUAL_TOL) {
            continue; // axis already spanned
        }
        let csq = g.square(&cand)?;
        let cscale = cand.max_abs_comp();
        if csq.abs() < lit::<T>(tolerances::NULL_DIRECTION_TOL) * T::one().max(cscale * cscale) {
            continue; // projected axis is null; unusable for an orthogonal basis
        }
        vectors.push(cand.scaled(T::one() / csq.abs().sqrt()));
        signatures.push(epsilon(csq));
    }

    if vectors.len() < dim {
        return Err(Error::DegenerateDirection(
            "chart axes do not complete an orthogonal basis around this direction".into(),
        ));
    }
    Ok(AdaptedBasis {
        vectors,
        signatures,
    })
}

/// First component of `a` in an adapted basis,
/// `a . lambda_1 / (lambda_1)^2`.
pub fn first_component<T: Scalar>(
    g: &BundleMetric<T>,
    a: &TangentVector<T>,
    basis: &AdaptedBasis<T>,
) -> Result<T> {
    basis.component(g, a, 0)
}
