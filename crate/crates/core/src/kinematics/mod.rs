//! Particles, observer configurations, and the relative quantities built
//! from transports along connecting paths.
//!
//! Two observed particles follow worldlines `x1`, `x2`; an observer follows
//! `x`. Time maps carry the observer parameter `s` to each particle's own
//! worldline parameter. Three one-parameter families of connecting paths
//! tie the picture together for every `s`:
//!
//! * a path from the first particle to the second (used to compare the two
//!   particles),
//! * a path from the first particle to the observer,
//! * a path from the second particle to the observer.
//!
//! Differences of velocities, momenta and accelerations are formed by
//! carrying the second particle's vector to the first particle, subtracting
//! there, and carrying the result to the observer. The separation of the
//! two particles is measured by integrating back-transported tangents of
//! the connecting path; its first and second covariant derivatives along
//! the observer give the deviation velocity and acceleration.
//!
//! All connecting families default to straight chart-coordinate segments on
//! `[0, 1]`; scenarios may override them. Evaluation is pure per `(s)`, so
//! independent samples can be computed concurrently.

mod energy;

pub use energy::MomentumComponents;

use std::sync::Arc;

use crate::covariant::{
    covariant_derivative, second_covariant_derivative, CovariantDerivative,
    CovariantDerivativeConfig,
};
use crate::error::{Error, Result};
use crate::geometry::{FieldAlongPath, ManifoldChart, Path, TangentVector};
use crate::linalg::SquareMatrix;
use crate::metric::{BundleMetric, SignAtZero};
use crate::scalar::{lit, Scalar};
use crate::tolerances;
use crate::transport::{linear_transport_matrix, Transport};

/// Monotone map from the observer parameter to a particle's own parameter.
pub type TimeMapFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// Mass-dimension scale of the momentum as a function of the particle's own
/// parameter; never zero.
pub type MassFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// One-parameter family of connecting paths, indexed by the observer
/// parameter. Every member is parametrized on `[0, 1]`.
pub type PathFamilyFn<T> = Arc<dyn Fn(T) -> Result<Path<T>> + Send + Sync>;

/// Identity time map.
pub fn identity_time_map<T: Scalar>() -> TimeMapFn<T> {
    Arc::new(|s: T| s)
}

/// Time map `s -> rate * s`.
pub fn linear_time_map<T: Scalar>(rate: T) -> TimeMapFn<T> {
    Arc::new(move |s: T| rate * s)
}

/// A point particle: a worldline, a time map from the observer parameter,
/// a rest mass, and the momentum scale function.
///
/// For a massive particle the momentum scale is the constant mass. For a
/// massless particle the momentum is the primary quantity and the scale is
/// supplied directly (frame energy over `c^2` in the relativistic case);
/// it is nonzero in both cases, since a vanishing scale would describe
/// vacuum rather than a particle.
#[derive(Clone)]
pub struct Particle<T> {
    worldline: Path<T>,
    time_map: TimeMapFn<T>,
    mass: T,
    mu: MassFn<T>,
}

impl<T: Scalar> Particle<T> {
    /// Massive particle; the momentum scale is the mass itself.
    pub fn massive(worldline: Path<T>, time_map: TimeMapFn<T>, mass: T) -> Result<Self> {
        if !(mass > T::zero()) || !mass.is_finite() {
            return Err(Error::InvalidParticle(
                "massive particle requires a positive finite mass".into(),
            ));
        }
        Ok(Self {
            worldline,
            time_map,
            mass,
            mu: Arc::new(move |_| mass),
        })
    }

    /// Massless particle with a constant momentum scale.
    pub fn massless(worldline: Path<T>, time_map: TimeMapFn<T>, mu: T) -> Result<Self> {
        if mu == T::zero() || !mu.is_finite() {
            return Err(Error::InvalidParticle(
                "momentum scale of a massless particle must be nonzero and finite".into(),
            ));
        }
        Ok(Self {
            worldline,
            time_map,
            mass: T::zero(),
            mu: Arc::new(move |_| mu),
        })
    }

    /// Particle with an arbitrary momentum-scale function. The function is
    /// checked to be nonzero at every queried parameter.
    pub fn with_mass_function(
        worldline: Path<T>,
        time_map: TimeMapFn<T>,
        mass: T,
        mu: MassFn<T>,
    ) -> Self {
        Self {
            worldline,
            time_map,
            mass,
            mu,
        }
    }

    pub fn worldline(&self) -> &Path<T> {
        &self.worldline
    }

    pub fn mass(&self) -> T {
        self.mass
    }

    /// The particle's own parameter corresponding to observer parameter `s`.
    pub fn own_time(&self, s: T) -> T {
        (self.time_map)(s)
    }

    /// Momentum scale at the particle's own parameter.
    pub fn mu_at(&self, s_own: T) -> Result<T> {
        let m = (self.mu)(s_own);
        if m == T::zero() || !m.is_finite() {
            return Err(Error::InvalidParticle(
                "momentum scale vanished; this describes vacuum, not a particle".into(),
            ));
        }
        Ok(m)
    }

    /// Velocity: the worldline tangent at the particle's own parameter.
    pub fn velocity(&self, s_own: T) -> Result<TangentVector<T>> {
        self.worldline.tangent_vector(s_own)
    }

    /// Momentum: the velocity scaled by the momentum scale.
    pub fn momentum(&self, s_own: T) -> Result<TangentVector<T>> {
        Ok(self.velocity(s_own)?.scaled(self.mu_at(s_own)?))
    }
}

impl<T: Scalar> std::fmt::Debug for Particle<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Particle")
            .field("worldline", &self.worldline)
            .field("mass", &self.mass)
            .finish_non_exhaustive()
    }
}

/// Selects one of the two observed particles.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParticleId {
    First,
    Second,
}

/// Orientation of a relative quantity: which particle's vector is carried
/// to the other before the difference is taken.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// Quantity of the second particle with respect to the first.
    SecondWrtFirst,
    /// Quantity of the first particle with respect to the second.
    FirstWrtSecond,
}

/// Numerical parameters of the pipeline.
#[derive(Clone, Copy, Debug)]
pub struct NumericsConfig<T> {
    /// RK4 steps per unit of parameter length for linear transports.
    pub transport_steps_per_unit: usize,
    /// Panels of the composite Simpson rule in the separation integral.
    pub quadrature_panels: usize,
    /// Stencil for covariant derivatives along worldlines.
    pub derivative: CovariantDerivativeConfig<T>,
    /// Tolerance for internal identity assertions on normalized quantities.
    pub tolerance: T,
    /// Sign convention of the sign function at exactly zero.
    pub epsilon_zero: SignAtZero,
}

impl<T: Scalar> NumericsConfig<T> {
    /// Defaults for an observer worldline of the given parameter span:
    /// 256 RK4 steps per unit length, 256 quadrature panels, second-order
    /// stencil with step `1e-4 * span`, identity tolerance `1e-9`.
    pub fn default_for_span(span: T) -> Self {
        Self {
            transport_steps_per_unit: 256,
            quadrature_panels: 256,
            derivative: CovariantDerivativeConfig::default_for_span(span),
            tolerance: lit(tolerances::DEFAULT_IDENTITY_TOL),
            epsilon_zero: SignAtZero::Positive,
        }
    }
}

/// The four relative energies of the pair at one observer parameter.
#[derive(Clone, Copy, Debug)]
pub struct EnergySet<T> {
    pub e21: T,
    pub e12: T,
    pub e11: T,
    pub e22: T,
}

/// Everything the pipeline computes at one observer parameter. All vectors
/// are based at the observer point.
#[derive(Clone, Debug)]
pub struct RelativeState<T> {
    pub s: T,
    /// Transported difference of the two velocities.
    pub relative_velocity: TangentVector<T>,
    /// Separation of the second particle from the first, seen at the
    /// observer.
    pub deviation_vector: TangentVector<T>,
    /// First covariant derivative of the separation along the observer.
    pub deviation_velocity: TangentVector<T>,
    /// Transported difference of the two accelerations.
    pub relative_acceleration: TangentVector<T>,
    /// Second covariant derivative of the separation along the observer.
    pub deviation_acceleration: TangentVector<T>,
    /// Transported difference of the two momenta.
    pub relative_momentum: TangentVector<T>,
    /// Relative and proper energies; present when the configuration has a
    /// metric.
    pub energies: Option<EnergySet<T>>,
    /// Scalar square of the momentum difference at the first particle;
    /// present when the configuration has a metric.
    pub momentum_invariant: Option<T>,
}

/// An observer watching two particles: worldlines, time maps, connecting
/// path families, a transport, and optionally a metric.
#[derive(Clone)]
pub struct ObserverConfiguration<T> {
    chart: ManifoldChart<T>,
    transport: Transport<T>,
    metric: Option<BundleMetric<T>>,
    observer: Path<T>,
    particle1: Particle<T>,
    particle2: Particle<T>,
    connect_particles: PathFamilyFn<T>,
    connect_first_observer: PathFamilyFn<T>,
    connect_second_observer: PathFamilyFn<T>,
    numerics: NumericsConfig<T>,
}

impl<T: Scalar> ObserverConfiguration<T> {
    /// Builds a configuration with straight-line connecting families and
    /// default numerics, then validates endpoint conditions, time-map
    /// monotonicity and dimensions on sampled observer parameters.
    pub fn new(
        chart: ManifoldChart<T>,
        transport: Transport<T>,
        metric: Option<BundleMetric<T>>,
        observer: Path<T>,
        particle1: Particle<T>,
        particle2: Particle<T>,
    ) -> Result<Self> {
        let (lo, hi) = observer.domain();
        let numerics = NumericsConfig::default_for_span(hi - lo);

        let (c12, c1o, c2o) = straight_connectors(&observer, &particle1, &particle2);
        let cfg = Self {
            chart,
            transport,
            metric,
            observer,
            particle1,
            particle2,
            connect_particles: c12,
            connect_first_observer: c1o,
            connect_second_observer: c2o,
            numerics,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Replaces the numerical parameters.
    pub fn with_numerics(mut self, numerics: NumericsConfig<T>) -> Self {
        self.numerics = numerics;
        self
    }

    /// Replaces the connecting-path families and re-validates the endpoint
    /// conditions.
    pub fn with_connectors(
        mut self,
        connect_particles: PathFamilyFn<T>,
        connect_first_observer: PathFamilyFn<T>,
        connect_second_observer: PathFamilyFn<T>,
    ) -> Result<Self> {
        self.connect_particles = connect_particles;
        self.connect_first_observer = connect_first_observer;
        self.connect_second_observer = connect_second_observer;
        self.validate()?;
        Ok(self)
    }

    pub fn chart(&self) -> &ManifoldChart<T> {
        &self.chart
    }

    pub fn transport(&self) -> &Transport<T> {
        &self.transport
    }

    pub fn metric(&self) -> Option<&BundleMetric<T>> {
        self.metric.as_ref()
    }

    pub fn observer(&self) -> &Path<T> {
        &self.observer
    }

    pub fn particle(&self, id: ParticleId) -> &Particle<T> {
        match id {
            ParticleId::First => &self.particle1,
            ParticleId::Second => &self.particle2,
        }
    }

    pub fn numerics(&self) -> &NumericsConfig<T> {
        &self.numerics
    }

    fn validate(&self) -> Result<()> {
        let (lo, hi) = self.observer.domain();
        let samples = 5usize;
        let tol = lit::<T>(tolerances::BASE_POINT_TOL);
        let mut prev: Option<(T, T)> = None;
        for k in 0..samples {
            let frac = lit::<T>(k as f64) / lit::<T>((samples - 1) as f64);
            let s = lo + (hi - lo) * frac;
            let x_obs = self.observer.point(s)?;
            if x_obs.len() != self.chart.dim() {
                return Err(Error::DimensionMismatch {
                    context: "observer worldline",
                    expected: self.chart.dim(),
                    actual: x_obs.len(),
                });
            }
            let t1 = self.particle1.own_time(s);
            let t2 = self.particle2.own_time(s);
            if let Some((p1, p2)) = prev {
                if t1 <= p1 || t2 <= p2 {
                    return Err(Error::InvalidConfiguration(
                        "time maps must be strictly increasing".into(),
                    ));
                }
            }
            prev = Some((t1, t2));
            let x1 = self.particle1.worldline.point(t1)?;
            let x2 = self.particle2.worldline.point(t2)?;

            let check = |path: &Path<T>, a: &[T], b: &[T], what: &str| -> Result<()> {
                let start = path.point(T::zero())?;
                let end = path.point(T::one())?;
                let ok = |p: &[T], q: &[T]| {
                    p.len() == q.len() && p.iter().zip(q).all(|(&u, &v)| (u - v).abs() <= tol)
                };
                if !ok(&start, a) || !ok(&end, b) {
                    return Err(Error::InvalidConfiguration(format!(
                        "{what} endpoints miss their worldline points"
                    )));
                }
                Ok(())
            };
            check(
                &(self.connect_particles)(s)?,
                &x1,
                &x2,
                "particle connecting path",
            )?;
            check(
                &(self.connect_first_observer)(s)?,
                &x1,
                &x_obs,
                "first-particle-to-observer path",
            )?;
            check(
                &(self.connect_second_observer)(s)?,
                &x2,
                &x_obs,
                "second-particle-to-observer path",
            )?;
        }
        Ok(())
    }

    fn particle_path(&self, s: T) -> Result<Path<T>> {
        (self.connect_particles)(s)
    }

    fn observer_path_from(&self, id: ParticleId, s: T) -> Result<Path<T>> {
        match id {
            ParticleId::First => (self.connect_first_observer)(s),
            ParticleId::Second => (self.connect_second_observer)(s),
        }
    }

    /// Velocity of a particle at the worldline point labelled by observer
    /// parameter `s`.
    pub fn velocity(&self, id: ParticleId, s: T) -> Result<TangentVector<T>> {
        let p = self.particle(id);
        p.velocity(p.own_time(s))
    }

    /// Momentum of a particle at the worldline point labelled by observer
    /// parameter `s`.
    pub fn momentum(&self, id: ParticleId, s: T) -> Result<TangentVector<T>> {
        let p = self.particle(id);
        p.momentum(p.own_time(s))
    }

    /// Carries a vector based at the second particle to the first along the
    /// connecting path.
    pub fn pull_to_particle1(&self, s: T, v: &TangentVector<T>) -> Result<TangentVector<T>> {
        let path = self.particle_path(s)?;
        self.transport.apply(&path, T::one(), T::zero(), v)
    }

    /// Carries a vector based at the first particle to the second along the
    /// connecting path.
    pub fn push_to_particle2(&self, s: T, v: &TangentVector<T>) -> Result<TangentVector<T>> {
        let path = self.particle_path(s)?;
        self.transport.apply(&path, T::zero(), T::one(), v)
    }

    /// Carries a vector based at one of the particles to the observer.
    pub fn transport_to_observer(
        &self,
        id: ParticleId,
        s: T,
        v: &TangentVector<T>,
    ) -> Result<TangentVector<T>> {
        let path = self.observer_path_from(id, s)?;
        self.transport.apply(&path, T::zero(), T::one(), v)
    }

    /// Generic transported difference: carries one particle's vector to the
    /// other, subtracts there, and carries the result to the observer.
    pub fn generic_difference(
        &self,
        s: T,
        x1: &TangentVector<T>,
        x2: &TangentVector<T>,
        direction: Direction,
    ) -> Result<TangentVector<T>> {
        match direction {
            Direction::SecondWrtFirst => {
                let pulled = self.pull_to_particle1(s, x2)?;
                let diff = pulled.sub(x1)?;
                self.transport_to_observer(ParticleId::First, s, &diff)
            }
            Direction::FirstWrtSecond => {
                let pushed = self.push_to_particle2(s, x1)?;
                let diff = pushed.sub(x2)?;
                self.transport_to_observer(ParticleId::Second, s, &diff)
            }
        }
    }

    /// Relative velocity of the second particle with respect to the first,
    /// at the observer point.
    pub fn relative_velocity(&self, s: T) -> Result<TangentVector<T>> {
        let v1 = self.velocity(ParticleId::First, s)?;
        let v2 = self.velocity(ParticleId::Second, s)?;
        self.generic_difference(s, &v1, &v2, Direction::SecondWrtFirst)
    }

    /// Relative momentum of the second particle with respect to the first,
    /// at the observer point.
    pub fn relative_momentum(&self, s: T) -> Result<TangentVector<T>> {
        let p1 = self.momentum(ParticleId::First, s)?;
        let p2 = self.momentum(ParticleId::Second, s)?;
        self.generic_difference(s, &p1, &p2, Direction::SecondWrtFirst)
    }

    /// Acceleration of one particle: the covariant derivative of its
    /// velocity field along its own worldline.
    pub fn particle_acceleration(&self, id: ParticleId, s: T) -> Result<CovariantDerivative<T>> {
        let p = self.particle(id);
        let w = p.worldline().clone();
        let inner = w.clone();
        let field = FieldAlongPath::new(w, move |u| inner.tangent_vector(u));
        covariant_derivative(
            &self.chart,
            &field,
            p.own_time(s),
            &self.numerics.derivative,
        )
    }

    /// Relative acceleration of the second particle with respect to the
    /// first, at the observer point.
    pub fn relative_acceleration(&self, s: T) -> Result<TangentVector<T>> {
        let a1 = self.particle_acceleration(ParticleId::First, s)?.vector;
        let a2 = self.particle_acceleration(ParticleId::Second, s)?.vector;
        self.generic_difference(s, &a1, &a2, Direction::SecondWrtFirst)
    }

    /// Integral of back-transported tangents of the connecting path from
    /// parameter `0` to `t`: a vector at the first particle measuring how
    /// far along the path the second particle sits.
    ///
    /// Composite Simpson quadrature; for linear transports the back
    /// transport matrix is advanced across the node grid once and reused,
    /// one RK4 step per node.
    pub fn deviation_map(&self, s: T, t: T) -> Result<TangentVector<T>> {
        let path = self.particle_path(s)?;
        let panels = self.numerics.quadrature_panels.max(1);
        let node_count = 2 * panels + 1;
        let nodes: Vec<T> = (0..node_count)
            .map(|i| t * (lit::<T>(i as f64) / lit::<T>((node_count - 1) as f64)))
            .collect();

        let dim = self.chart.dim();
        let mut carried: Vec<Vec<T>> = Vec::with_capacity(node_count);
        match &self.transport {
            Transport::Flat => {
                for &u in &nodes {
                    carried.push(path.tangent_at(u)?);
                }
            }
            Transport::LinearConnection { chart, .. } => {
                // Back transport to parameter 0, advanced incrementally:
                // one backward RK4 step from each node to its predecessor.
                let mut back = SquareMatrix::identity(dim);
                for (i, &u) in nodes.iter().enumerate() {
                    if i > 0 {
                        let step = linear_transport_matrix(chart, &path, u, nodes[i - 1], 1)?;
                        back = back.mul(&step.matrix);
                    }
                    carried.push(back.mul_vec(&path.tangent_at(u)?));
                }
            }
            Transport::Custom(_) => {
                for &u in &nodes {
                    let tv = path.tangent_vector(u)?;
                    let moved = self.transport.apply(&path, u, T::zero(), &tv)?;
                    carried.push(moved.comps().to_vec());
                }
            }
        }

        let delta = t / lit::<T>(panels as f64);
        let sixth = delta / lit::<T>(6.0);
        let four = lit::<T>(4.0);
        let mut acc = vec![T::zero(); dim];
        for j in 0..panels {
            let w0 = &carried[2 * j];
            let wm = &carried[2 * j + 1];
            let w1 = &carried[2 * j + 2];
            for k in 0..dim {
                acc[k] = acc[k] + sixth * (w0[k] + four * wm[k] + w1[k]);
            }
        }
        TangentVector::new(path.point(T::zero())?, acc)
    }

    /// The separation of the second particle from the first as seen at the
    /// observer: the full path integral carried along the
    /// first-particle-to-observer path.
    pub fn deviation_vector(&self, s: T) -> Result<TangentVector<T>> {
        let at_first = self.deviation_map(s, T::one())?;
        self.transport_to_observer(ParticleId::First, s, &at_first)
    }

    /// First covariant derivative of the separation along the observer
    /// worldline.
    pub fn deviation_velocity(&self, s: T) -> Result<CovariantDerivative<T>> {
        let me = self.clone();
        let field = FieldAlongPath::new(self.observer.clone(), move |u| me.deviation_vector(u));
        covariant_derivative(&self.chart, &field, s, &self.numerics.derivative)
    }

    /// Second covariant derivative of the separation along the observer
    /// worldline.
    pub fn deviation_acceleration(&self, s: T) -> Result<CovariantDerivative<T>> {
        let me = self.clone();
        let field = FieldAlongPath::new(self.observer.clone(), move |u| me.deviation_vector(u));
        second_covariant_derivative(&self.chart, &field, s, &self.numerics.derivative)
    }

    /// Evaluates every relative quantity at one observer parameter.
    pub fn relative_state(&self, s: T) -> Result<RelativeState<T>> {
        let relative_velocity = self.relative_velocity(s)?;
        let deviation_vector = self.deviation_vector(s)?;
        let deviation_velocity = self.deviation_velocity(s)?.vector;
        let relative_acceleration = self.relative_acceleration(s)?;
        let deviation_acceleration = self.deviation_acceleration(s)?.vector;
        let relative_momentum = self.relative_momentum(s)?;
        let (energies, momentum_invariant) = if self.metric.is_some() {
            let e21 = self.relative_energy(s, Direction::SecondWrtFirst)?;
            let e12 = self.relative_energy(s, Direction::FirstWrtSecond)?;
            let e11 = self.proper_energy(ParticleId::First, s)?;
            let e22 = self.proper_energy(ParticleId::Second, s)?;
            let inv = self.momentum_invariant(s)?;
            (Some(EnergySet { e21, e12, e11, e22 }), Some(inv))
        } else {
            (None, None)
        };
        Ok(RelativeState {
            s,
            relative_velocity,
            deviation_vector,
            deviation_velocity,
            relative_acceleration,
            deviation_acceleration,
            relative_momentum,
            energies,
            momentum_invariant,
        })
    }
}

impl<T: Scalar> std::fmt::Debug for ObserverConfiguration<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ObserverConfiguration")
            .field("chart", &self.chart)
            .field("transport", &self.transport)
            .field("observer", &self.observer)
            .finish_non_exhaustive()
    }
}

pub(crate) fn straight_connectors<T: Scalar>(
    observer: &Path<T>,
    particle1: &Particle<T>,
    particle2: &Particle<T>,
) -> (PathFamilyFn<T>, PathFamilyFn<T>, PathFamilyFn<T>) {
    let a = particle1.clone();
    let b = particle2.clone();
    let connect_particles: PathFamilyFn<T> = Arc::new(move |s: T| {
        let x1 = a.worldline().point(a.own_time(s))?;
        let x2 = b.worldline().point(b.own_time(s))?;
        Ok(Path::line(&x1, &x2))
    });

    let a = particle1.clone();
    let obs = observer.clone();
    let connect_first_observer: PathFamilyFn<T> = Arc::new(move |s: T| {
        let x1 = a.worldline().point(a.own_time(s))?;
        let xo = obs.point(s)?;
        Ok(Path::line(&x1, &xo))
    });

    let b = particle2.clone();
    let obs = observer.clone();
    let connect_second_observer: PathFamilyFn<T> = Arc::new(move |s: T| {
        let x2 = b.worldline().point(b.own_time(s))?;
        let xo = obs.point(s)?;
        Ok(Path::line(&x2, &xo))
    });

    (
        connect_particles,
        connect_first_observer,
        connect_second_observer,
    )
}
