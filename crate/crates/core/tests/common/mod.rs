//! Shared builders for pipeline tests: inertial relativistic scenarios,
//! Euclidean scenarios, and random smooth polar-chart scenarios.
#![allow(dead_code)]

use std::sync::Arc;

use rand::Rng;

use relkin::geometry::{ManifoldChart, Path, PointFn};
use relkin::kinematics::{
    identity_time_map, linear_time_map, NumericsConfig, ObserverConfiguration, Particle,
};
use relkin::metric::BundleMetric;
use relkin::oracle::polar;
use relkin::oracle::sr::SRParticleSpec;
use relkin::transport::Transport;
use relkin::{ObserverConfiguration64, Particle64, Path64};

/// Inertial worldline parametrized by lab time: `offset + (c s, s v)`.
pub fn inertial_lab_path(v: [f64; 3], offset: [f64; 4], c: f64, domain: (f64, f64)) -> Path64 {
    let eval: PointFn<f64> = Arc::new(move |s: f64| {
        vec![
            offset[0] + c * s,
            offset[1] + s * v[0],
            offset[2] + s * v[1],
            offset[3] + s * v[2],
        ]
    });
    let tangent: PointFn<f64> = Arc::new(move |_s: f64| vec![c, v[0], v[1], v[2]]);
    Path::new(domain, eval, tangent).unwrap()
}

/// Builds the pipeline particle matching an inertial spec. Massive
/// particles are parametrized by proper time with a linear time map from
/// the lab-time observer parameter; massless ones by lab time directly.
pub fn sr_particle(spec: &SRParticleSpec<f64>, c: f64, obs_domain: (f64, f64)) -> Particle64 {
    let margin = 0.05 * (obs_domain.1 - obs_domain.0).max(1.0);
    let off = spec.offset;
    let v = spec.v3;
    if spec.mass > 0.0 {
        let rate = (1.0 - spec.speed_squared() / (c * c)).sqrt();
        let gamma = 1.0 / rate;
        let domain = (rate * obs_domain.0 - margin, rate * obs_domain.1 + margin);
        let eval: PointFn<f64> = Arc::new(move |sigma: f64| {
            vec![
                off[0] + c * gamma * sigma,
                off[1] + gamma * sigma * v[0],
                off[2] + gamma * sigma * v[1],
                off[3] + gamma * sigma * v[2],
            ]
        });
        let tangent: PointFn<f64> =
            Arc::new(move |_s: f64| vec![gamma * c, gamma * v[0], gamma * v[1], gamma * v[2]]);
        let worldline = Path::new(domain, eval, tangent).unwrap();
        Particle::massive(worldline, linear_time_map(rate), spec.mass).unwrap()
    } else {
        let domain = (obs_domain.0 - margin, obs_domain.1 + margin);
        let eval: PointFn<f64> = Arc::new(move |t: f64| {
            vec![
                off[0] + c * t,
                off[1] + t * v[0],
                off[2] + t * v[1],
                off[3] + t * v[2],
            ]
        });
        let tangent: PointFn<f64> = Arc::new(move |_t: f64| vec![c, v[0], v[1], v[2]]);
        let worldline = Path::new(domain, eval, tangent).unwrap();
        let mu = spec.energy.expect("photon spec carries an energy") / (c * c);
        Particle::massless(worldline, identity_time_map(), mu).unwrap()
    }
}

/// Full relativistic pipeline configuration on the flat four-dimensional
/// chart: linear transport of the vanishing connection, diagonal metric,
/// observer parametrized by lab time.
pub fn sr_config(
    p1: &SRParticleSpec<f64>,
    p2: &SRParticleSpec<f64>,
    v_obs: [f64; 3],
    c: f64,
    sweep: (f64, f64),
) -> ObserverConfiguration64 {
    let span = (sweep.1 - sweep.0).max(0.5);
    let obs_domain = (sweep.0 - 0.1 * span, sweep.1 + 0.1 * span);
    let chart = ManifoldChart::flat(4, "flat-spacetime");
    let transport = Transport::linear(chart.clone(), 256);
    let metric = BundleMetric::minkowski(4);
    let observer = inertial_lab_path(v_obs, [0.0; 4], c, obs_domain);
    let particle1 = sr_particle(p1, c, obs_domain);
    let particle2 = sr_particle(p2, c, obs_domain);
    ObserverConfiguration::new(
        chart,
        transport,
        Some(metric),
        observer,
        particle1,
        particle2,
    )
    .unwrap()
}

/// Euclidean pipeline configuration with identity time maps and the flat
/// transport realized through the zero connection.
pub fn euclidean_config(
    dim: usize,
    worldline1: Path64,
    worldline2: Path64,
    observer: Path64,
    mass1: f64,
    mass2: f64,
) -> ObserverConfiguration64 {
    let chart = ManifoldChart::flat(dim, "euclidean");
    let transport = Transport::linear(chart.clone(), 256);
    let metric = BundleMetric::euclidean(dim);
    let particle1 = Particle::massive(worldline1, identity_time_map(), mass1).unwrap();
    let particle2 = Particle::massive(worldline2, identity_time_map(), mass2).unwrap();
    ObserverConfiguration::new(
        chart,
        transport,
        Some(metric),
        observer,
        particle1,
        particle2,
    )
    .unwrap()
}

/// Polar-chart pipeline configuration with identity time maps.
pub fn polar_config(
    worldline1: Path64,
    worldline2: Path64,
    observer: Path64,
    mass1: f64,
    mass2: f64,
) -> ObserverConfiguration64 {
    let chart = polar::chart::<f64>();
    let transport = Transport::linear(chart.clone(), 256);
    let metric = polar::metric::<f64>();
    let particle1 = Particle::massive(worldline1, identity_time_map(), mass1).unwrap();
    let particle2 = Particle::massive(worldline2, identity_time_map(), mass2).unwrap();
    ObserverConfiguration::new(
        chart,
        transport,
        Some(metric),
        observer,
        particle1,
        particle2,
    )
    .unwrap()
}

/// Parameters of a smooth polar worldline that stays away from the origin:
/// an oscillating radius and a drifting angle.
#[derive(Clone, Copy, Debug)]
pub struct PolarCurveParams {
    pub r0: f64,
    pub r_amp: f64,
    pub r_freq: f64,
    pub r_phase: f64,
    pub theta0: f64,
    pub theta_rate: f64,
    pub theta_amp: f64,
}

impl PolarCurveParams {
    pub fn random(rng: &mut impl Rng) -> Self {
        Self {
            r0: rng.gen_range(1.2..2.2),
            r_amp: rng.gen_range(0.0..0.35),
            r_freq: rng.gen_range(0.4..1.6),
            r_phase: rng.gen_range(0.0..std::f64::consts::TAU),
            theta0: rng.gen_range(0.0..std::f64::consts::TAU),
            theta_rate: rng.gen_range(0.25..1.0),
            theta_amp: rng.gen_range(0.0..0.25),
        }
    }

    pub fn path(&self, domain: (f64, f64)) -> Path64 {
        let p = *self;
        let eval: PointFn<f64> = Arc::new(move |s: f64| {
            vec![
                p.r0 + p.r_amp * (p.r_freq * s + p.r_phase).sin(),
                p.theta0 + p.theta_rate * s + p.theta_amp * s.sin(),
            ]
        });
        let tangent: PointFn<f64> = Arc::new(move |s: f64| {
            vec![
                p.r_amp * p.r_freq * (p.r_freq * s + p.r_phase).cos(),
                p.theta_rate + p.theta_amp * s.cos(),
            ]
        });
        Path::new(domain, eval, tangent).unwrap()
    }
}

/// Tightens or relaxes the shared numerics of a configuration.
pub fn with_steps(cfg: ObserverConfiguration64, steps: usize) -> ObserverConfiguration64 {
    let mut numerics: NumericsConfig<f64> = *cfg.numerics();
    numerics.transport_steps_per_unit = steps;
    cfg.with_numerics(numerics)
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .fold(0.0f64, |acc, (&x, &y)| acc.max((x - y).abs()))
}
