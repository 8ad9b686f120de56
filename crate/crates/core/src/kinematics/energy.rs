//! Relative and proper energies, momentum components in adapted bases, and
//! the invariant of the momentum difference.
//!
//! These quantities need the bundle metric. The relative energy of the
//! second particle with respect to the first is the sign-corrected pairing
//! of the second momentum, carried to the first particle, with the first
//! velocity; the sign factor keeps a particle's energy relative to itself
//! positive. Several identities tie the energies to momentum components in
//! velocity-adapted bases; each is computed along two independent routes so
//! disagreements surface as errors instead of silently wrong numbers.

use crate::error::{Error, Result};
use crate::metric::{adapted_basis, epsilon_with, first_component, BundleMetric};
use crate::scalar::{lit, to_f64, Scalar};
use crate::tolerances;
use crate::transport::check_metric_consistency;

use super::{Direction, ObserverConfiguration, Particle, ParticleId};

impl<T: Scalar> Particle<T> {
    /// Proper energy: the momentum scale times the absolute scalar square
    /// of the velocity. Cross-checked against the equivalent route through
    /// the momentum's scalar square; zero for massless particles on null
    /// worldlines.
    pub fn proper_energy(&self, g: &BundleMetric<T>, s_own: T) -> Result<T> {
        let mu = self.mu_at(s_own)?;
        let v = self.velocity(s_own)?;
        let via_velocity = mu * g.square(&v)?.abs();
        let via_momentum = g.square(&v.scaled(mu))?.abs() / mu;
        let tol = lit::<T>(tolerances::DEFAULT_IDENTITY_TOL);
        if (via_velocity - via_momentum).abs() > tol * T::one().max(via_velocity.abs()) {
            return Err(Error::InconsistentInvariant {
                context: "proper energy",
                lhs: to_f64(via_velocity),
                rhs: to_f64(via_momentum),
                tol: tolerances::DEFAULT_IDENTITY_TOL,
            });
        }
        Ok(via_velocity)
    }
}

/// First components of the momenta in the bases adapted to the velocities,
/// at one observer parameter.
///
/// Each entry equals an energy expression when the transport and metric
/// cooperate; the fields hold the component values themselves, computed
/// from basis pairings, so tests and verification can compare the two
/// routes independently.
#[derive(Clone, Copy, Debug)]
pub struct MomentumComponents<T> {
    /// First component of the first momentum in its own adapted basis;
    /// the proper energy of the first particle over the velocity norm.
    pub p1_first: T,
    /// Largest remaining component of the first momentum in that basis;
    /// vanishes because the momentum is parallel to the first basis vector.
    pub p1_off_axis_max: T,
    /// First component of the second momentum after it is carried to the
    /// first particle.
    pub p2_at_first_first: T,
    /// First component of the momentum difference at the first particle.
    pub relative_at_first_first: T,
    /// First component of the relative momentum at the observer, read in
    /// the basis carried there from the first particle.
    pub relative_at_observer_first: T,
    /// First component of the first momentum in the basis adapted to the
    /// second velocity carried over from the second particle. Absent when
    /// the second velocity is null.
    pub p1_first_in_second_frame: Option<T>,
}

impl<T: Scalar> ObserverConfiguration<T> {
    fn require_metric(&self) -> Result<&BundleMetric<T>> {
        self.metric().ok_or_else(|| {
            Error::InvalidConfiguration("energy quantities require a bundle metric".into())
        })
    }

    fn sign_of(&self, x: T) -> T {
        epsilon_with(x, self.numerics().epsilon_zero)
    }

    /// Relative energy of one particle with respect to the other: the
    /// sign-corrected metric pairing of the transported momentum with the
    /// reference particle's velocity, evaluated at the reference particle.
    pub fn relative_energy(&self, s: T, direction: Direction) -> Result<T> {
        let g = self.require_metric()?;
        match direction {
            Direction::SecondWrtFirst => {
                let p2 = self.momentum(ParticleId::Second, s)?;
                let carried = self.pull_to_particle1(s, &p2)?;
                let v1 = self.velocity(ParticleId::First, s)?;
                let sign = self.sign_of(g.square(&v1)?);
                Ok(sign * g.product(&carried, &v1)?)
            }
            Direction::FirstWrtSecond => {
                let p1 = self.momentum(ParticleId::First, s)?;
                let carried = self.push_to_particle2(s, &p1)?;
                let v2 = self.velocity(ParticleId::Second, s)?;
                let sign = self.sign_of(g.square(&v2)?);
                Ok(sign * g.product(&carried, &v2)?)
            }
        }
    }

    /// Proper energy of one particle at the worldline point labelled by
    /// observer parameter `s`.
    pub fn proper_energy(&self, id: ParticleId, s: T) -> Result<T> {
        let g = self.require_metric()?;
        let p = self.particle(id);
        p.proper_energy(g, p.own_time(s))
    }

    /// Checks the reciprocity relation between the two relative energies:
    /// with signs and momentum scales attached they agree for every linear
    /// transport consistent with the metric.
    pub fn energy_reciprocity_check(&self, s: T, tol: T) -> Result<bool> {
        let g = self.require_metric()?;
        let v1 = self.velocity(ParticleId::First, s)?;
        let v2 = self.velocity(ParticleId::Second, s)?;
        let sign1 = self.sign_of(g.square(&v1)?);
        let sign2 = self.sign_of(g.square(&v2)?);
        let mu1 = self
            .particle(ParticleId::First)
            .mu_at(self.particle(ParticleId::First).own_time(s))?;
        let mu2 = self
            .particle(ParticleId::Second)
            .mu_at(self.particle(ParticleId::Second).own_time(s))?;
        let e21 = self.relative_energy(s, Direction::SecondWrtFirst)?;
        let e12 = self.relative_energy(s, Direction::FirstWrtSecond)?;
        let lhs = sign2 * mu1 * e21;
        let rhs = sign1 * mu2 * e12;
        Ok((lhs - rhs).abs() <= tol * T::one().max((mu1 * e21).abs()))
    }

    /// Relative energy recovered from the relative momentum: pairs the
    /// relative momentum with the first velocity carried to the observer
    /// and adds the first particle's own pairing. Requires a transport
    /// consistent with the metric; the value is asserted against the direct
    /// relative energy and a disagreement is an error carrying both values.
    pub fn energy_via_relative_momentum(&self, s: T) -> Result<T> {
        let g = self.require_metric()?;
        let dp21 = self.relative_momentum(s)?;
        let v1 = self.velocity(ParticleId::First, s)?;
        let v1_at_observer = self.transport_to_observer(ParticleId::First, s, &v1)?;
        let p1 = self.momentum(ParticleId::First, s)?;
        let sign = self.sign_of(g.square(&v1)?);
        let value = sign * (g.product(&dp21, &v1_at_observer)? + g.product(&p1, &v1)?);
        let direct = self.relative_energy(s, Direction::SecondWrtFirst)?;
        let tol = self.numerics().tolerance;
        if (value - direct).abs() > tol * T::one().max(direct.abs()) {
            return Err(Error::InconsistentInvariant {
                context: "energy via relative momentum",
                lhs: to_f64(value),
                rhs: to_f64(direct),
                tol: to_f64(tol),
            });
        }
        Ok(value)
    }

    /// Probes whether the transport preserves the metric pairing along the
    /// connecting paths at this observer parameter.
    pub fn metric_consistency_probe(&self, s: T) -> Result<bool> {
        let g = self.require_metric()?;
        let u = self.velocity(ParticleId::First, s)?;
        let w = self.momentum(ParticleId::First, s)?;
        let tol = self.numerics().tolerance * lit::<T>(100.0);
        let particle_path = (self.connect_particles)(s)?;
        let observer_path = (self.connect_first_observer)(s)?;
        Ok(check_metric_consistency(
            self.transport(),
            g,
            &particle_path,
            T::zero(),
            T::one(),
            &u,
            &w,
            tol,
        )? && check_metric_consistency(
            self.transport(),
            g,
            &observer_path,
            T::zero(),
            T::one(),
            &u,
            &w,
            tol,
        )?)
    }

    /// Scalar square of the momentum difference at the first particle.
    ///
    /// Computed directly from the metric and cross-checked against the
    /// combination of proper and relative energies it must equal; when the
    /// transport is metric-consistent the symmetric four-energy form and
    /// the square of the relative momentum at the observer are checked as
    /// well. Returns the direct value; disagreement is an error.
    pub fn momentum_invariant(&self, s: T) -> Result<T> {
        let g = self.require_metric()?;
        let p1 = self.momentum(ParticleId::First, s)?;
        let p2 = self.momentum(ParticleId::Second, s)?;
        let carried = self.pull_to_particle1(s, &p2)?;
        let diff = carried.sub(&p1)?;
        let direct = g.square(&diff)?;

        let v1 = self.velocity(ParticleId::First, s)?;
        let v2 = self.velocity(ParticleId::Second, s)?;
        let sign1 = self.sign_of(g.square(&v1)?);
        let sign2 = self.sign_of(g.square(&v2)?);
        let first = self.particle(ParticleId::First);
        let second = self.particle(ParticleId::Second);
        let mu1 = first.mu_at(first.own_time(s))?;
        let mu2 = second.mu_at(second.own_time(s))?;
        let e11 = first.proper_energy(g, first.own_time(s))?;
        let e22 = second.proper_energy(g, second.own_time(s))?;
        let e21 = self.relative_energy(s, Direction::SecondWrtFirst)?;

        let two = lit::<T>(2.0);
        let via_energies = sign1 * mu1 * e11 + sign2 * mu2 * e22 - two * sign1 * mu1 * e21;
        let tol = self.numerics().tolerance;
        let scale = T::one().max(direct.abs());
        if (direct - via_energies).abs() > tol * scale {
            return Err(Error::InconsistentInvariant {
                context: "momentum invariant vs energies",
                lhs: to_f64(direct),
                rhs: to_f64(via_energies),
                tol: to_f64(tol),
            });
        }

        if self.metric_consistency_probe(s)? {
            let e12 = self.relative_energy(s, Direction::FirstWrtSecond)?;
            let symmetric =
                sign1 * mu1 * e11 + sign2 * mu2 * e22 - sign1 * mu1 * e21 - sign2 * mu2 * e12;
            if (direct - symmetric).abs() > tol * scale {
                return Err(Error::InconsistentInvariant {
                    context: "momentum invariant symmetric form",
                    lhs: to_f64(direct),
                    rhs: to_f64(symmetric),
                    tol: to_f64(tol),
                });
            }
            let dp21 = self.relative_momentum(s)?;
            let at_observer = g.square(&dp21)?;
            if (direct - at_observer).abs() > tol * scale {
                return Err(Error::InconsistentInvariant {
                    context: "momentum invariant at the observer",
                    lhs: to_f64(direct),
                    rhs: to_f64(at_observer),
                    tol: to_f64(tol),
                });
            }
        }
        Ok(direct)
    }

    /// Momentum components in velocity-adapted bases.
    ///
    /// Fails with a degenerate-direction error when the first velocity is
    /// null: its energy is then spread over all components and cannot be
    /// read off a single one. The component in the second particle's frame
    /// is `None` under the same condition on the second velocity.
    pub fn energy_momentum_components(&self, s: T) -> Result<MomentumComponents<T>> {
        let g = self.require_metric()?;
        let v1 = self.velocity(ParticleId::First, s)?;
        let basis = adapted_basis(g, &v1)?;

        let p1 = self.momentum(ParticleId::First, s)?;
        let p1_first = first_component(g, &p1, &basis)?;
        let mut p1_off_axis_max = T::zero();
        for i in 1..basis.vectors().len() {
            p1_off_axis_max = p1_off_axis_max.max(basis.component(g, &p1, i)?.abs());
        }

        let p2 = self.momentum(ParticleId::Second, s)?;
        let carried = self.pull_to_particle1(s, &p2)?;
        let p2_at_first_first = first_component(g, &carried, &basis)?;

        let diff = carried.sub(&p1)?;
        let relative_at_first_first = first_component(g, &diff, &basis)?;

        // Basis vector carried to the observer, pairing the relative
        // momentum there.
        let l1 = self.transport_to_observer(ParticleId::First, s, basis.first())?;
        let l1_square = g.square(&l1)?;
        if l1_square.abs() < lit::<T>(tolerances::NULL_DIRECTION_TOL) {
            return Err(Error::DegenerateDirection(
                "transported basis vector became null at the observer".into(),
            ));
        }
        let dp21 = self.relative_momentum(s)?;
        let relative_at_observer_first = g.product(&dp21, &l1)? / l1_square;

        // First momentum read in the direction of the second velocity,
        // normalized and carried over from the second particle.
        let sq2 = g.square(&self.velocity(ParticleId::Second, s)?)?;
        let v2 = self.velocity(ParticleId::Second, s)?;
        let v2_scale = v2.max_abs_comp();
        let p1_first_in_second_frame = if sq2.abs()
            < lit::<T>(tolerances::NULL_DIRECTION_TOL) * T::one().max(v2_scale * v2_scale)
        {
            None
        } else {
            let normalized = v2.scaled(T::one() / sq2.abs().sqrt());
            let carried_direction = self.pull_to_particle1(s, &normalized)?;
            let den = g.square(&carried_direction)?;
            if den.abs() < lit::<T>(tolerances::NULL_DIRECTION_TOL) {
                None
            } else {
                Some(g.product(&p1, &carried_direction)? / den)
            }
        };

        Ok(MomentumComponents {
            p1_first,
            p1_off_axis_max,
            p2_at_first_first,
            relative_at_first_first,
            relative_at_observer_first,
            p1_first_in_second_frame,
        })
    }
}
