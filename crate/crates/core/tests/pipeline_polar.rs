//! The pipeline on the polar chart of the Euclidean plane, cross-checked
//! against the identical physical setup expressed in the Cartesian chart,
//! plus the energy and component identities on random smooth
//! configurations.

mod common;

use std::sync::Arc;

use approx::assert_relative_eq;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::{euclidean_config, max_abs_diff, polar_config, with_steps, PolarCurveParams};
use relkin::geometry::{Path, PointFn, TangentVector};
use relkin::kinematics::{Direction, ParticleId};
use relkin::oracle::polar;
use relkin::{ObserverConfiguration64, Path64};

/// Cartesian image of a polar curve, with the pushed-forward tangent.
fn cartesian_image(params: PolarCurveParams, domain: (f64, f64)) -> Path64 {
    let eval: PointFn<f64> = Arc::new(move |s: f64| {
        let p = params.path(domain);
        let polar_point = p.point(s).unwrap();
        polar::to_cartesian_point(&polar_point).to_vec()
    });
    let tangent: PointFn<f64> = Arc::new(move |s: f64| {
        let p = params.path(domain);
        let polar_point = p.point(s).unwrap();
        let polar_tangent = p.tangent_at(s).unwrap();
        polar::vector_to_cartesian(&polar_point, &polar_tangent).to_vec()
    });
    Path::new(domain, eval, tangent).unwrap()
}

fn random_near(rng: &mut impl Rng, center: f64) -> PolarCurveParams {
    let mut p = PolarCurveParams::random(rng);
    p.theta0 = center + rng.gen_range(-0.5..0.5);
    p.theta_rate = rng.gen_range(0.2..0.6);
    p
}

/// A trio of smooth polar curves with nearby angular ranges, so connecting
/// chords stay short.
fn random_trio(rng: &mut impl Rng) -> (PolarCurveParams, PolarCurveParams, PolarCurveParams) {
    let center = rng.gen_range(0.0..std::f64::consts::TAU);
    (
        random_near(rng, center),
        random_near(rng, center),
        random_near(rng, center),
    )
}

fn paired_configs(
    rng: &mut impl Rng,
    domain: (f64, f64),
) -> (
    ObserverConfiguration64,
    ObserverConfiguration64,
    PolarCurveParams,
) {
    let (c1, c2, co) = random_trio(rng);
    let m1 = rng.gen_range(0.5..2.5);
    let m2 = rng.gen_range(0.5..2.5);
    let in_polar = with_steps(
        polar_config(c1.path(domain), c2.path(domain), co.path(domain), m1, m2),
        512,
    );
    let in_cartesian = with_steps(
        euclidean_config(
            2,
            cartesian_image(c1, domain),
            cartesian_image(c2, domain),
            cartesian_image(co, domain),
            m1,
            m2,
        ),
        512,
    );
    (in_polar, in_cartesian, co)
}

#[test]
fn chart_change_commutes_with_the_pipeline() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x706f6c6172);
    let domain = (-0.5, 1.5);
    for round in 0..8 {
        let (in_polar, in_cartesian, observer_curve) = paired_configs(&mut rng, domain);
        let s = rng.gen_range(0.1..0.9);
        let obs_polar = observer_curve.path(domain).point(s).unwrap();

        let push = |v: &TangentVector<f64>| polar::vector_to_cartesian(&obs_polar, v.comps());

        let dv_p = in_polar.relative_velocity(s).unwrap();
        let dv_c = in_cartesian.relative_velocity(s).unwrap();
        assert!(
            max_abs_diff(&push(&dv_p), dv_c.comps()) < 1e-8,
            "relative velocity differs between charts (round {round})"
        );

        let h_p = in_polar.deviation_vector(s).unwrap();
        let h_c = in_cartesian.deviation_vector(s).unwrap();
        assert!(
            max_abs_diff(&push(&h_p), h_c.comps()) < 1e-8,
            "separation differs between charts (round {round})"
        );

        let v21_p = in_polar.deviation_velocity(s).unwrap().vector;
        let v21_c = in_cartesian.deviation_velocity(s).unwrap().vector;
        assert!(
            max_abs_diff(&push(&v21_p), v21_c.comps()) < 1e-5,
            "deviation velocity differs between charts (round {round})"
        );

        let dp_p = in_polar.relative_momentum(s).unwrap();
        let dp_c = in_cartesian.relative_momentum(s).unwrap();
        assert!(
            max_abs_diff(&push(&dp_p), dp_c.comps()) < 1e-8,
            "relative momentum differs between charts (round {round})"
        );

        // Scalars are chart-invariant.
        for dir in [Direction::SecondWrtFirst, Direction::FirstWrtSecond] {
            let e_p = in_polar.relative_energy(s, dir).unwrap();
            let e_c = in_cartesian.relative_energy(s, dir).unwrap();
            assert_relative_eq!(e_p, e_c, max_relative = 1e-8);
        }
        for id in [ParticleId::First, ParticleId::Second] {
            assert_relative_eq!(
                in_polar.proper_energy(id, s).unwrap(),
                in_cartesian.proper_energy(id, s).unwrap(),
                max_relative = 1e-8
            );
        }
        assert_relative_eq!(
            in_polar.momentum_invariant(s).unwrap(),
            in_cartesian.momentum_invariant(s).unwrap(),
            epsilon = 1e-8,
            max_relative = 1e-8
        );
    }
}

#[test]
fn pull_to_the_first_particle_matches_the_cartesian_detour() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x70756c6c);
    let domain = (-0.5, 1.5);
    let (in_polar, _, _) = paired_configs(&mut rng, domain);
    let s = 0.4;
    let v2 = in_polar.velocity(ParticleId::Second, s).unwrap();
    let pulled = in_polar.pull_to_particle1(s, &v2).unwrap();
    let oracle = polar::transport_via_cartesian(v2.base(), v2.comps(), pulled.base());
    assert!(max_abs_diff(pulled.comps(), &oracle) < 1e-9);
}

#[test]
fn energy_and_component_identities_on_random_polar_configs() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6964656e74);
    let domain = (-0.5, 1.5);
    for round in 0..10 {
        let (cfg, _, _) = paired_configs(&mut rng, domain);
        let s = rng.gen_range(0.2..0.8);
        let g = cfg.metric().unwrap();

        // Reciprocity of the relative energies.
        assert!(
            cfg.energy_reciprocity_check(s, 1e-9).unwrap(),
            "reciprocity failed (round {round})"
        );

        // Energy recovered from the relative momentum.
        let via = cfg.energy_via_relative_momentum(s).unwrap();
        let e21 = cfg.relative_energy(s, Direction::SecondWrtFirst).unwrap();
        assert!(
            (via - e21).abs() <= 1e-9 * e21.abs().max(1.0),
            "momentum route disagrees (round {round})"
        );

        // Momentum decomposition for the linear transport.
        let first = cfg.particle(ParticleId::First);
        let second = cfg.particle(ParticleId::Second);
        let mu1 = first.mu_at(first.own_time(s)).unwrap();
        let mu2 = second.mu_at(second.own_time(s)).unwrap();
        let dv = cfg.relative_velocity(s).unwrap();
        let p1_obs = cfg
            .transport_to_observer(
                ParticleId::First,
                s,
                &cfg.momentum(ParticleId::First, s).unwrap(),
            )
            .unwrap();
        let rhs = dv.scaled(mu2).add(&p1_obs.scaled(mu2 / mu1 - 1.0)).unwrap();
        let lhs = cfg.relative_momentum(s).unwrap();
        assert!(
            max_abs_diff(lhs.comps(), rhs.comps()) < 1e-9,
            "decomposition failed (round {round})"
        );

        // Component identities against the energies.
        let comps = cfg.energy_momentum_components(s).unwrap();
        let e11 = cfg.proper_energy(ParticleId::First, s).unwrap();
        let e12 = cfg.relative_energy(s, Direction::FirstWrtSecond).unwrap();
        let v1 = cfg.velocity(ParticleId::First, s).unwrap();
        let v2 = cfg.velocity(ParticleId::Second, s).unwrap();
        let norm1 = g.square(&v1).unwrap().abs().sqrt();
        let norm2 = g.square(&v2).unwrap().abs().sqrt();

        let checks = [
            ("p1 component", comps.p1_first, e11 / norm1),
            ("p2 component", comps.p2_at_first_first, e21 / norm1),
            (
                "difference component",
                comps.relative_at_first_first,
                (e21 - e11) / norm1,
            ),
            (
                "observer component",
                comps.relative_at_observer_first,
                (e21 - e11) / norm1,
            ),
            (
                "reverse component",
                comps.p1_first_in_second_frame.unwrap(),
                e12 / norm2,
            ),
        ];
        for (name, lhs, rhs) in checks {
            assert!(
                (lhs - rhs).abs() <= 1e-9 * rhs.abs().max(1.0),
                "{name} identity failed (round {round}): {lhs} vs {rhs}"
            );
        }
        assert!(comps.p1_off_axis_max < 1e-9);

        // The invariant method asserts both energy routes internally and
        // the symmetric form when the transport probe passes.
        assert!(cfg.metric_consistency_probe(s).unwrap());
        cfg.momentum_invariant(s).unwrap();
    }
}
