//! Closed-form special relativity on flat spacetime with signature
//! `(+,-,-,-)`, coordinates `(ct, x, y, z)`.
//!
//! Worldlines are inertial: a massive particle with 3-velocity `v` follows
//! `(ct, t v) + offset` with proper time `t * sqrt(1 - v^2/c^2)`; a massless
//! particle moves along a unit direction `n` at speed `c` with lab-time
//! parametrization. The functions here evaluate relative energies, the
//! Doppler shift, and deviation quantities directly from these closed
//! forms; the numerical pipeline is tested against them.

use crate::error::{Error, Result};
use crate::linalg::SquareMatrix;
use crate::scalar::{lit, Scalar};

/// Frame parameters: the speed of light.
#[derive(Clone, Copy, Debug)]
pub struct SRParams<T> {
    c: T,
}

impl<T: Scalar> SRParams<T> {
    pub fn new(c: T) -> Result<Self> {
        if !(c > T::zero()) || !c.is_finite() {
            return Err(Error::InvalidSpec(
                "speed of light must be positive and finite".into(),
            ));
        }
        Ok(Self { c })
    }

    pub fn c(&self) -> T {
        self.c
    }
}

/// An inertial particle: rest mass, 3-velocity, worldline offset, and the
/// frame energy (required for massless particles, whose momentum is the
/// primary quantity).
#[derive(Clone, Copy, Debug)]
pub struct SRParticleSpec<T> {
    pub mass: T,
    pub v3: [T; 3],
    pub offset: [T; 4],
    pub energy: Option<T>,
}

impl<T: Scalar> SRParticleSpec<T> {
    pub fn massive(mass: T, v3: [T; 3], offset: [T; 4]) -> Self {
        Self {
            mass,
            v3,
            offset,
            energy: None,
        }
    }

    /// Massless particle of frame energy `energy` moving along the unit
    /// direction `n`.
    pub fn photon(energy: T, n: [T; 3], offset: [T; 4], c: T) -> Self {
        Self {
            mass: T::zero(),
            v3: [n[0] * c, n[1] * c, n[2] * c],
            offset,
            energy: Some(energy),
        }
    }

    pub fn is_massless(&self) -> bool {
        self.mass == T::zero()
    }

    pub fn speed_squared(&self) -> T {
        dot3(&self.v3, &self.v3)
    }

    /// Unit direction of motion for a massless particle.
    pub fn direction(&self, c: T) -> [T; 3] {
        [self.v3[0] / c, self.v3[1] / c, self.v3[2] / c]
    }

    pub fn validate(&self, c: T) -> Result<()> {
        if !(c > T::zero()) {
            return Err(Error::InvalidSpec("speed of light must be positive".into()));
        }
        if self.mass < T::zero() {
            return Err(Error::InvalidSpec("mass must be nonnegative".into()));
        }
        let v2 = self.speed_squared();
        if self.is_massless() {
            if (v2.sqrt() - c).abs() > lit::<T>(1e-12) * c {
                return Err(Error::InvalidSpec(
                    "massless particle must move at the speed of light".into(),
                ));
            }
            match self.energy {
                Some(e) if e > T::zero() => {}
                _ => {
                    return Err(Error::InvalidSpec(
                        "massless particle requires a positive frame energy".into(),
                    ))
                }
            }
        } else if v2 >= c * c {
            return Err(Error::InvalidSpec(
                "massive particle must be slower than light".into(),
            ));
        }
        Ok(())
    }

    /// Lorentz factor of a massive particle.
    fn gamma(&self, c: T) -> T {
        T::one() / (T::one() - self.speed_squared() / (c * c)).sqrt()
    }

    /// Mass-dimension scale of the momentum: the rest mass for massive
    /// particles, `energy / c^2` for massless ones.
    pub fn mu(&self, c: T) -> Result<T> {
        self.validate(c)?;
        if self.is_massless() {
            Ok(self.energy.expect("validated above") / (c * c))
        } else {
            Ok(self.mass)
        }
    }

    /// Worldline event at lab time `t`.
    pub fn event_at(&self, c: T, t: T) -> [T; 4] {
        [
            c * t + self.offset[0],
            t * self.v3[0] + self.offset[1],
            t * self.v3[1] + self.offset[2],
            t * self.v3[2] + self.offset[3],
        ]
    }
}

fn dot3<T: Scalar>(a: &[T; 3], b: &[T; 3]) -> T {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Four-velocity of a spec: `(c, v) / sqrt(1 - v^2/c^2)` for massive
/// particles, `c (1, n)` for massless ones (scalar square `c^2` and `0`
/// respectively).
pub fn four_velocity<T: Scalar>(spec: &SRParticleSpec<T>, c: T) -> Result<[T; 4]> {
    spec.validate(c)?;
    if spec.is_massless() {
        Ok([c, spec.v3[0], spec.v3[1], spec.v3[2]])
    } else {
        let g = spec.gamma(c);
        Ok([g * c, g * spec.v3[0], g * spec.v3[1], g * spec.v3[2]])
    }
}

/// Four-momentum: `mass * four_velocity` for massive particles,
/// `(energy / c) (1, n)` for massless ones.
pub fn four_momentum<T: Scalar>(spec: &SRParticleSpec<T>, c: T) -> Result<[T; 4]> {
    let mu = spec.mu(c)?;
    let v = four_velocity(spec, c)?;
    Ok([mu * v[0], mu * v[1], mu * v[2], mu * v[3]])
}

/// The four relative energies of a particle pair.
#[derive(Clone, Copy, Debug)]
pub struct RelativeEnergies<T> {
    /// Energy of the second particle relative to the first.
    pub e21: T,
    /// Energy of the first particle relative to the second.
    pub e12: T,
    /// Proper energy of the first particle.
    pub e11: T,
    /// Proper energy of the second particle.
    pub e22: T,
}

/// Closed-form relative energies, dispatching on which of the two particles
/// are massless.
pub fn relative_energies<T: Scalar>(
    p1: &SRParticleSpec<T>,
    p2: &SRParticleSpec<T>,
    c: T,
) -> Result<RelativeEnergies<T>> {
    p1.validate(c)?;
    p2.validate(c)?;
    let c2 = c * c;
    match (p1.is_massless(), p2.is_massless()) {
        (false, false) => {
            let factor = (T::one() - dot3(&p1.v3, &p2.v3) / c2)
                / ((T::one() - p1.speed_squared() / c2) * (T::one() - p2.speed_squared() / c2))
                    .sqrt();
            Ok(RelativeEnergies {
                e21: p2.mass * c2 * factor,
                e12: p1.mass * c2 * factor,
                e11: p1.mass * c2,
                e22: p2.mass * c2,
            })
        }
        (false, true) => {
            let n2 = p2.direction(c);
            let shift = (T::one() - dot3(&p1.v3, &n2) / c) * p1.gamma(c);
            Ok(RelativeEnergies {
                e21: p2.energy.expect("validated") * shift,
                e12: p1.mass * c2 * shift,
                e11: p1.mass * c2,
                e22: T::zero(),
            })
        }
        (true, false) => {
            let n1 = p1.direction(c);
            let shift = (T::one() - dot3(&p2.v3, &n1) / c) * p2.gamma(c);
            Ok(RelativeEnergies {
                e21: p2.mass * c2 * shift,
                e12: p1.energy.expect("validated") * shift,
                e11: T::zero(),
                e22: p2.mass * c2,
            })
        }
        (true, true) => {
            let n1 = p1.direction(c);
            let n2 = p2.direction(c);
            let shift = T::one() - dot3(&n1, &n2);
            Ok(RelativeEnergies {
                e21: p2.energy.expect("validated") * shift,
                e12: p1.energy.expect("validated") * shift,
                e11: T::zero(),
                e22: T::zero(),
            })
        }
    }
}

/// Doppler shift in terms of energies: a source moving with 3-velocity `v`
/// emits massless particles along the unit direction `n` with energy `e0`
/// relative to itself; an observer at rest in the frame measures
/// `e0 * (1 - v.n/c)^{-1} * sqrt(1 - v^2/c^2)`.
pub fn doppler_energy<T: Scalar>(e0: T, v: [T; 3], n: [T; 3], c: T) -> Result<T> {
    if (dot3(&n, &n).sqrt() - T::one()).abs() > lit::<T>(1e-12) {
        return Err(Error::InvalidSpec(
            "doppler direction must be a unit vector".into(),
        ));
    }
    let v2 = dot3(&v, &v);
    if v2 >= c * c {
        return Err(Error::InvalidSpec(
            "doppler source must be slower than light".into(),
        ));
    }
    let radial = T::one() - dot3(&v, &n) / c;
    if radial.abs() < lit::<T>(1e-14) {
        return Err(Error::InvalidSpec(
            "doppler factor is singular: source velocity matches the photon direction".into(),
        ));
    }
    Ok(e0 / radial * (T::one() - v2 / (c * c)).sqrt())
}

/// Matrix of the pure boost taking frame components to the components of a
/// frame moving with 3-velocity `v`. Reduces to the identity at `v = 0`.
pub fn boost_matrix<T: Scalar>(v: [T; 3], c: T) -> Result<SquareMatrix<T>> {
    let v2 = dot3(&v, &v);
    if v2 >= c * c {
        return Err(Error::InvalidSpec(
            "boost velocity must be slower than light".into(),
        ));
    }
    let mut m = SquareMatrix::identity(4);
    if v2 == T::zero() {
        return Ok(m);
    }
    let gamma = T::one() / (T::one() - v2 / (c * c)).sqrt();
    m.set(0, 0, gamma);
    for i in 0..3 {
        let bi = v[i] / c;
        m.set(0, i + 1, -gamma * bi);
        m.set(i + 1, 0, -gamma * bi);
        for j in 0..3 {
            let delta = if i == j { T::one() } else { T::zero() };
            m.set(i + 1, j + 1, delta + (gamma - T::one()) * v[i] * v[j] / v2);
        }
    }
    Ok(m)
}

/// Deviation quantities of a particle pair in closed form.
///
/// The lab entries pair the worldlines at a common lab time and take the
/// observer parameter to be lab time itself. The comoving entries are
/// expressed in the inertial frame attached to the first particle, pairing
/// events by that frame's simultaneity; their velocity entry carries the
/// proper-time rate `sqrt(1 - v1^2/c^2)` of the first particle.
#[derive(Clone, Debug)]
pub struct DeviationQuantities<T> {
    /// Difference of the four-velocities in the lab frame.
    pub dv21_lab: [T; 4],
    /// Separation of the two worldline events at the given lab time.
    pub h21_lab: [T; 4],
    /// Lab-time derivative of the separation: `(0, v2 - v1)`.
    pub v21_lab: [T; 4],
    /// Four-velocity difference boosted to the comoving frame.
    pub dv21_comoving: [T; 4],
    /// Separation in the comoving frame: purely spatial by that frame's
    /// simultaneity.
    pub h21_comoving: [T; 4],
    /// Derivative of the comoving separation with respect to lab time:
    /// `sqrt(1 - v1^2/c^2) * (0, v2')` with `v2'` the second particle's
    /// velocity in the comoving frame.
    pub v21_comoving: [T; 4],
}

/// Evaluates the deviation quantities at lab time `t`. The first particle
/// must be massive: it defines the comoving frame.
pub fn deviation_quantities<T: Scalar>(
    p1: &SRParticleSpec<T>,
    p2: &SRParticleSpec<T>,
    frame: &SRParams<T>,
    t: T,
) -> Result<DeviationQuantities<T>> {
    let c = frame.c();
    p1.validate(c)?;
    p2.validate(c)?;
    if p1.is_massless() {
        return Err(Error::InvalidSpec(
            "the comoving frame requires a massive first particle".into(),
        ));
    }

    let v1 = four_velocity(p1, c)?;
    let v2 = four_velocity(p2, c)?;
    let dv21_lab = sub4(&v2, &v1);

    let e1 = p1.event_at(c, t);
    let e2 = p2.event_at(c, t);
    let h21_lab = sub4(&e2, &e1);

    let v21_lab = [
        T::zero(),
        p2.v3[0] - p1.v3[0],
        p2.v3[1] - p1.v3[1],
        p2.v3[2] - p1.v3[2],
    ];

    let boost = boost_matrix(p1.v3, c)?;
    let dv21_comoving = apply4(&boost, &dv21_lab);

    // Event of the second particle relative to the first particle's origin,
    // re-expressed in the comoving frame. The first particle sits at the
    // spatial origin there for all times, so the separation at the mapped
    // event's own time is purely spatial.
    let rel = sub4(&e2, &p1.offset);
    let rel_comoving = apply4(&boost, &rel);
    let h21_comoving = [T::zero(), rel_comoving[1], rel_comoving[2], rel_comoving[3]];

    let v2_comoving4 = apply4(&boost, &v2);
    let rate1 = (T::one() - p1.speed_squared() / (c * c)).sqrt();
    let scale = rate1 * c / v2_comoving4[0];
    let v21_comoving = [
        T::zero(),
        scale * v2_comoving4[1],
        scale * v2_comoving4[2],
        scale * v2_comoving4[3],
    ];

    Ok(DeviationQuantities {
        dv21_lab,
        h21_lab,
        v21_lab,
        dv21_comoving,
        h21_comoving,
        v21_comoving,
    })
}

fn sub4<T: Scalar>(a: &[T; 4], b: &[T; 4]) -> [T; 4] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]]
}

fn apply4<T: Scalar>(m: &SquareMatrix<T>, v: &[T; 4]) -> [T; 4] {
    let out = m.mul_vec(&v[..]);
    [out[0], out[1], out[2], out[3]]
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const ZERO4: [f64; 4] = [0.0; 4];

    #[test]
    fn rest_frame_four_velocity() {
        let p = SRParticleSpec::massive(1.0, [0.0; 3], ZERO4);
        assert_eq!(four_velocity(&p, 1.0).unwrap(), [1.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn moving_four_velocity_components() {
        let p = SRParticleSpec::massive(1.0, [0.6, 0.0, 0.0], ZERO4);
        let v = four_velocity(&p, 1.0).unwrap();
        assert_relative_eq!(v[0], 1.25, epsilon = 1e-15);
        assert_relative_eq!(v[1], 0.75, epsilon = 1e-15);
    }

    #[test]
    fn photon_four_velocity_is_null() {
        let p = SRParticleSpec::photon(2.0, [1.0, 0.0, 0.0], ZERO4, 1.0);
        let v = four_velocity(&p, 1.0).unwrap();
        assert_eq!(v, [1.0, 1.0, 0.0, 0.0]);
        let sq = v[0] * v[0] - v[1] * v[1] - v[2] * v[2] - v[3] * v[3];
        assert_eq!(sq, 0.0);
    }

    #[test]
    fn superluminal_massive_spec_is_rejected() {
        let p = SRParticleSpec::massive(1.0, [1.5, 0.0, 0.0], ZERO4);
        assert!(matches!(four_velocity(&p, 1.0), Err(Error::InvalidSpec(_))));
    }

    #[test]
    fn photon_without_energy_is_rejected() {
        let mut p = SRParticleSpec::photon(1.0, [0.0, 1.0, 0.0], ZERO4, 1.0);
        p.energy = None;
        assert!(p.validate(1.0).is_err());
    }

    #[test]
    fn massive_pair_energies_frozen_values() {
        // m1 = 1 at 0.6c along x, m2 = 2 at 0.8c along y, c = 1:
        // common factor 1/(0.8*0.6), e21 = 2*factor = 25/6, e12 = 25/12.
        let p1 = SRParticleSpec::massive(1.0, [0.6, 0.0, 0.0], ZERO4);
        let p2 = SRParticleSpec::massive(2.0, [0.0, 0.8, 0.0], ZERO4);
        let e = relative_energies(&p1, &p2, 1.0).unwrap();
        assert_relative_eq!(e.e21, 25.0 / 6.0, max_relative = 1e-15);
        assert_relative_eq!(e.e12, 25.0 / 12.0, max_relative = 1e-15);
        assert_eq!(e.e11, 1.0);
        assert_eq!(e.e22, 2.0);
    }

    #[test]
    fn rest_observer_sees_frame_energy() {
        let p1 = SRParticleSpec::massive(1.0, [0.0; 3], ZERO4);
        let p2 = SRParticleSpec::massive(2.0, [0.0, 0.8, 0.0], ZERO4);
        let e = relative_energies(&p1, &p2, 1.0).unwrap();
        assert_relative_eq!(e.e21, 2.0 / 0.6, max_relative = 1e-15);
    }

    #[test]
    fn orthogonal_photon_pair_energy() {
        let p1 = SRParticleSpec::photon(1.0, [1.0, 0.0, 0.0], ZERO4, 1.0);
        let p2 = SRParticleSpec::photon(5.0, [0.0, 1.0, 0.0], ZERO4, 1.0);
        let e = relative_energies(&p1, &p2, 1.0).unwrap();
        assert_eq!(e.e21, 5.0);
        assert_eq!(e.e12, 1.0);
        assert_eq!(e.e11, 0.0);
        assert_eq!(e.e22, 0.0);
    }

    #[test]
    fn parallel_photons_have_zero_relative_energy() {
        let p1 = SRParticleSpec::photon(1.0, [0.0, 0.0, 1.0], ZERO4, 1.0);
        let p2 = SRParticleSpec::photon(3.0, [0.0, 0.0, 1.0], ZERO4, 1.0);
        let e = relative_energies(&p1, &p2, 1.0).unwrap();
        assert_eq!(e.e21, 0.0);
        assert_eq!(e.e12, 0.0);
    }

    #[test]
    fn doppler_transverse_and_longitudinal() {
        let e0 = 1.0;
        // Transverse: source velocity orthogonal to the photon direction.
        let et = doppler_energy(e0, [0.6, 0.0, 0.0], [0.0, 1.0, 0.0], 1.0).unwrap();
        assert_relative_eq!(et, 0.8, max_relative = 1e-15);
        // Longitudinal approach: source chasing the photon it emits.
        let el = doppler_energy(e0, [0.6, 0.0, 0.0], [1.0, 0.0, 0.0], 1.0).unwrap();
        assert_relative_eq!(el, 2.0, max_relative = 1e-15);
        // At rest there is no shift.
        let er = doppler_energy(e0, [0.0; 3], [1.0, 0.0, 0.0], 1.0).unwrap();
        assert_eq!(er, 1.0);
    }

    #[test]
    fn doppler_singular_forward_limit() {
        assert!(doppler_energy(1.0, [1.0 - 1e-16, 0.0, 0.0], [1.0, 0.0, 0.0], 1.0).is_err());
    }

    #[test]
    fn boost_of_rest_velocity_is_comoving_rest() {
        let p = SRParticleSpec::massive(1.0, [0.6, 0.0, 0.0], ZERO4);
        let v = four_velocity(&p, 1.0).unwrap();
        let b = boost_matrix([0.6, 0.0, 0.0], 1.0).unwrap();
        let vp = b.mul_vec(&v[..]);
        assert_relative_eq!(vp[0], 1.0, epsilon = 1e-14);
        assert_relative_eq!(vp[1], 0.0, epsilon = 1e-14);
    }

    #[test]
    fn deviation_quantities_for_equal_velocities_vanish() {
        let p1 = SRParticleSpec::massive(1.0, [0.3, 0.1, 0.0], ZERO4);
        let p2 = SRParticleSpec::massive(2.0, [0.3, 0.1, 0.0], [0.0, 1.0, 0.0, 0.0]);
        let frame = SRParams::new(1.0).unwrap();
        let d = deviation_quantities(&p1, &p2, &frame, 2.0).unwrap();
        for i in 0..4 {
            assert_relative_eq!(d.dv21_lab[i], 0.0, epsilon = 1e-14);
            assert_relative_eq!(d.v21_lab[i], 0.0, epsilon = 1e-14);
            assert_relative_eq!(d.v21_comoving[i], 0.0, epsilon = 1e-13);
        }
        assert_eq!(d.h21_lab, [0.0, 1.0, 0.0, 0.0]);
    }

    #[test]
    fn lab_deviation_velocity_is_velocity_difference() {
        let p1 = SRParticleSpec::massive(1.0, [0.6, 0.0, 0.0], ZERO4);
        let p2 = SRParticleSpec::massive(1.0, [0.0, 0.8, 0.0], ZERO4);
        let frame = SRParams::new(1.0).unwrap();
        let d = deviation_quantities(&p1, &p2, &frame, 1.5).unwrap();
        assert_eq!(d.v21_lab, [0.0, -0.6, 0.8, 0.0]);
        // Lab separation at t: (0, t(v2 - v1)).
        assert_relative_eq!(d.h21_lab[0], 0.0, epsilon = 1e-15);
        assert_relative_eq!(d.h21_lab[1], -0.9, epsilon = 1e-15);
        assert_relative_eq!(d.h21_lab[2], 1.2, epsilon = 1e-15);
    }

    #[test]
    fn comoving_separation_is_purely_spatial() {
        let p1 = SRParticleSpec::massive(1.0, [0.5, 0.0, 0.0], [0.0, 0.3, 0.0, 0.0]);
        let p2 = SRParticleSpec::massive(1.0, [0.0, 0.4, 0.0], [0.0, 0.0, 1.0, 0.0]);
        let frame = SRParams::new(1.0).unwrap();
        let d = deviation_quantities(&p1, &p2, &frame, 0.7).unwrap();
        assert_eq!(d.h21_comoving[0], 0.0);
    }

    #[test]
    fn comoving_frame_requires_massive_first_particle() {
        let p1 = SRParticleSpec::photon(1.0, [1.0, 0.0, 0.0], ZERO4, 1.0);
        let p2 = SRParticleSpec::massive(1.0, [0.0; 3], ZERO4);
        let frame = SRParams::new(1.0).unwrap();
        assert!(deviation_quantities(&p1, &p2, &frame, 0.0).is_err());
    }
}
