//! Scenario files: a versioned, sectioned TOML format describing the
//! geometry, the two particles, the observer, the parameter sweep, the
//! numerics, and the requested output quantities.
//!
//! Worldlines come in three forms: inertial (velocity and offset),
//! polynomial (coefficients per coordinate, ascending powers), and sampled
//! tables with natural cubic interpolation. Validation reports every
//! problem with the field path that caused it.

use std::path::Path as FsPath;
use std::sync::Arc;

use serde::Deserialize;

use relkin::geometry::{ManifoldChart, Path, PointFn};
use relkin::kinematics::{
    identity_time_map, linear_time_map, NumericsConfig, ObserverConfiguration, Particle,
};
use relkin::metric::{BundleMetric, SignAtZero};
use relkin::oracle::polar;
use relkin::oracle::sr::SRParticleSpec;
use relkin::transport::Transport;
use relkin::{ManifoldChart64, ObserverConfiguration64, Particle64, Path64};

use crate::CliError;

/// Version of the scenario format this build reads.
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    version: u32,
    geometry: RawGeometry,
    particle1: RawParticle,
    particle2: RawParticle,
    observer: RawObserver,
    sweep: RawSweep,
    #[serde(default)]
    numerics: RawNumerics,
    #[serde(default)]
    outputs: RawOutputs,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGeometry {
    kind: String,
    light_speed: Option<f64>,
    dim: Option<usize>,
    connection: Option<String>,
    metric: Option<String>,
    transport: Option<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParticle {
    mass: f64,
    energy: Option<f64>,
    worldline: RawWorldline,
    time_map: Option<RawTimeMap>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawObserver {
    worldline: RawWorldline,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWorldline {
    kind: String,
    velocity: Option<Vec<f64>>,
    direction: Option<Vec<f64>>,
    offset: Option<Vec<f64>>,
    coefficients: Option<Vec<Vec<f64>>>,
    params: Option<Vec<f64>>,
    points: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTimeMap {
    kind: String,
    rate: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    s_min: f64,
    s_max: f64,
    samples: usize,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNumerics {
    rk4_steps: Option<usize>,
    simpson_panels: Option<usize>,
    fd_step: Option<f64>,
    tolerance: Option<f64>,
    epsilon_zero_sign: Option<i8>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutputs {
    quantities: Option<Vec<String>>,
}

/// Geometry of a built scenario.
#[derive(Debug, Clone)]
pub enum Geometry {
    Euclidean { dim: usize },
    Minkowski { c: f64 },
    Custom { dim: usize, connection: String },
}

impl Geometry {
    pub fn dim(&self) -> usize {
        match self {
            Geometry::Euclidean { dim } => *dim,
            Geometry::Minkowski { .. } => 4,
            Geometry::Custom { dim, .. } => *dim,
        }
    }
}

/// Inertial relativistic data retained for the verification suites.
#[derive(Debug, Clone)]
pub struct InertialPair {
    pub p1: SRParticleSpec<f64>,
    pub p2: SRParticleSpec<f64>,
    pub observer_velocity: [f64; 3],
    pub c: f64,
}

/// A requested output column group.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    E21,
    E12,
    E11,
    E22,
    MomentumInvariant,
    RelativeVelocity,
    DeviationVector,
    DeviationVelocity,
    RelativeAcceleration,
    DeviationAcceleration,
    RelativeMomentum,
    P1First,
    P2AtFirstFirst,
    RelativeAtFirstFirst,
    RelativeAtObserverFirst,
    P1FirstInSecondFrame,
}

impl Quantity {
    pub fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "E21" => Quantity::E21,
            "E12" => Quantity::E12,
            "E11" => Quantity::E11,
            "E22" => Quantity::E22,
            "dpi21_sq" => Quantity::MomentumInvariant,
            "dV21" => Quantity::RelativeVelocity,
            "h21" => Quantity::DeviationVector,
            "V21" => Quantity::DeviationVelocity,
            "dA21" => Quantity::RelativeAcceleration,
            "A21" => Quantity::DeviationAcceleration,
            "dp21" => Quantity::RelativeMomentum,
            "p1_c1" => Quantity::P1First,
            "p2at1_c1" => Quantity::P2AtFirstFirst,
            "dpi21_c1" => Quantity::RelativeAtFirstFirst,
            "dp21_c1" => Quantity::RelativeAtObserverFirst,
            "p1_c1prime" => Quantity::P1FirstInSecondFrame,
            _ => return None,
        })
    }

    pub fn needs_metric(self) -> bool {
        !matches!(
            self,
            Quantity::RelativeVelocity
                | Quantity::DeviationVector
                | Quantity::DeviationVelocity
                | Quantity::RelativeAcceleration
                | Quantity::DeviationAcceleration
                | Quantity::RelativeMomentum
        )
    }

    pub fn is_component(self) -> bool {
        matches!(
            self,
            Quantity::P1First
                | Quantity::P2AtFirstFirst
                | Quantity::RelativeAtFirstFirst
                | Quantity::RelativeAtObserverFirst
                | Quantity::P1FirstInSecondFrame
        )
    }

    pub fn is_vector(self) -> bool {
        matches!(
            self,
            Quantity::RelativeVelocity
                | Quantity::DeviationVector
                | Quantity::DeviationVelocity
                | Quantity::RelativeAcceleration
                | Quantity::DeviationAcceleration
                | Quantity::RelativeMomentum
        )
    }

    pub fn base_name(self) -> &'static str {
        match self {
            Quantity::E21 => "E21",
            Quantity::E12 => "E12",
            Quantity::E11 => "E11",
            Quantity::E22 => "E22",
            Quantity::MomentumInvariant => "dpi21_sq",
            Quantity::RelativeVelocity => "dV21",
            Quantity::DeviationVector => "h21",
            Quantity::DeviationVelocity => "V21",
            Quantity::RelativeAcceleration => "dA21",
            Quantity::DeviationAcceleration => "A21",
            Quantity::RelativeMomentum => "dp21",
            Quantity::P1First => "p1_c1",
            Quantity::P2AtFirstFirst => "p2at1_c1",
            Quantity::RelativeAtFirstFirst => "dpi21_c1",
            Quantity::RelativeAtObserverFirst => "dp21_c1",
            Quantity::P1FirstInSecondFrame => "p1_c1prime",
        }
    }

    fn all(has_metric: bool) -> Vec<Quantity> {
        let mut out = vec![
            Quantity::RelativeVelocity,
            Quantity::DeviationVector,
            Quantity::DeviationVelocity,
            Quantity::RelativeAcceleration,
            Quantity::DeviationAcceleration,
            Quantity::RelativeMomentum,
        ];
        if has_metric {
            out.extend([
                Quantity::E21,
                Quantity::E12,
                Quantity::E11,
                Quantity::E22,
                Quantity::MomentumInvariant,
                Quantity::P1First,
                Quantity::P2AtFirstFirst,
                Quantity::RelativeAtFirstFirst,
                Quantity::RelativeAtObserverFirst,
                Quantity::P1FirstInSecondFrame,
            ]);
        }
        out
    }
}

/// The parameter sweep.
#[derive(Debug, Clone, Copy)]
pub struct Sweep {
    pub s_min: f64,
    pub s_max: f64,
    pub samples: usize,
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        if self.samples == 1 {
            return vec![self.s_min];
        }
        let n = self.samples;
        (0..n)
            .map(|i| self.s_min + (self.s_max - self.s_min) * (i as f64) / ((n - 1) as f64))
            .collect()
    }
}

/// A parsed and fully validated scenario, ready to run.
pub struct BuiltScenario {
    pub config: ObserverConfiguration64,
    pub geometry: Geometry,
    pub sweep: Sweep,
    pub outputs: Vec<Quantity>,
    /// Present when both particles and the observer are inertial on the
    /// flat relativistic geometry; the verification suites compare the
    /// pipeline against closed forms built from these specs.
    pub inertial: Option<InertialPair>,
    /// Constant rates of the two time maps, when known.
    pub time_rates: (Option<f64>, Option<f64>),
    pub transport_kind: String,
}

/// Reads a scenario from a TOML file and builds the pipeline objects.
pub fn load(path: &FsPath) -> Result<BuiltScenario, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
    from_toml_str(&text)
}

/// Parses and builds a scenario from TOML text.
pub fn from_toml_str(text: &str) -> Result<BuiltScenario, CliError> {
    let raw: RawScenario = toml::from_str(text)
        .map_err(|e| CliError::Validation(format!("scenario parse error: {e}")))?;
    build(raw)
}

struct Validator {
    errors: Vec<String>,
}

impl Validator {
    fn new() -> Self {
        Self { errors: Vec::new() }
    }

    fn fail(&mut self, field: &str, message: impl Into<String>) {
        self.errors.push(format!("{field}: {}", message.into()));
    }

    fn finish(self) -> Result<(), CliError> {
        if self.errors.is_empty() {
            Ok(())
        } else {
            Err(CliError::Validation(self.errors.join("\n")))
        }
    }
}

fn build(raw: RawScenario) -> Result<BuiltScenario, CliError> {
    let mut v = Validator::new();
    if raw.version != FORMAT_VERSION {
        v.fail(
            "version",
            format!(
                "unsupported scenario version {} (expected {FORMAT_VERSION})",
                raw.version
            ),
        );
    }

    // Geometry.
    let geometry = match raw.geometry.kind.as_str() {
        "minkowski4" => {
            let c = raw.geometry.light_speed.unwrap_or(1.0);
            if !(c > 0.0) {
                v.fail("geometry.light_speed", "must be positive");
            }
            Geometry::Minkowski { c }
        }
        "euclidean" => {
            let dim = raw.geometry.dim.unwrap_or(0);
            if dim == 0 {
                v.fail("geometry.dim", "required and must be at least 1");
            }
            Geometry::Euclidean { dim: dim.max(1) }
        }
        "custom-connection" => {
            let dim = raw.geometry.dim.unwrap_or(0);
            if dim == 0 {
                v.fail("geometry.dim", "required and must be at least 1");
            }
            let connection = raw.geometry.connection.clone().unwrap_or_default();
            if connection.is_empty() {
                v.fail(
                    "geometry.connection",
                    "required for custom-connection geometry",
                );
            }
            Geometry::Custom {
                dim: dim.max(1),
                connection,
            }
        }
        other => {
            v.fail(
                "geometry.kind",
                format!("unknown geometry '{other}' (expected euclidean, minkowski4 or custom-connection)"),
            );
            Geometry::Euclidean { dim: 1 }
        }
    };
    let chart = match &geometry {
        Geometry::Euclidean { dim } => ManifoldChart::flat(*dim, "euclidean"),
        Geometry::Minkowski { .. } => ManifoldChart::flat(4, "flat-spacetime"),
        Geometry::Custom { dim, connection } => match connection_by_name(connection, *dim) {
            Some(chart) => chart,
            None => {
                v.fail(
                    "geometry.connection",
                    format!("unknown connection '{connection}' (available: zero, polar-euclidean)"),
                );
                ManifoldChart::flat(*dim, "placeholder")
            }
        },
    };

    let metric = match &geometry {
        Geometry::Euclidean { dim } => Some(BundleMetric::euclidean(*dim)),
        Geometry::Minkowski { .. } => Some(BundleMetric::minkowski(4)),
        Geometry::Custom { dim, .. } => match raw.geometry.metric.as_deref() {
            None => None,
            Some(name) => match metric_by_name(name, *dim) {
                Some(g) => Some(g),
                None => {
                    v.fail(
                        "geometry.metric",
                        format!("unknown metric '{name}' (available: euclidean, minkowski, polar-euclidean)"),
                    );
                    None
                }
            },
        },
    };

    if matches!(
        &geometry,
        Geometry::Euclidean { .. } | Geometry::Minkowski { .. }
    ) {
        if raw.geometry.connection.is_some() {
            v.fail(
                "geometry.connection",
                "only valid for custom-connection geometry",
            );
        }
        if raw.geometry.metric.is_some() {
            v.fail(
                "geometry.metric",
                "only valid for custom-connection geometry",
            );
        }
    }

    // Sweep and numerics.
    let sweep = Sweep {
        s_min: raw.sweep.s_min,
        s_max: raw.sweep.s_max,
        samples: raw.sweep.samples,
    };
    if sweep.samples == 0 {
        v.fail("sweep.samples", "must be at least 1");
    }
    if sweep.samples > 1 && !(sweep.s_max > sweep.s_min) {
        v.fail("sweep.s_max", "must exceed sweep.s_min when samples > 1");
    }
    if !sweep.s_min.is_finite() || !sweep.s_max.is_finite() {
        v.fail("sweep", "bounds must be finite");
    }

    let span = (sweep.s_max - sweep.s_min).abs().max(1.0);
    let pad = 0.1 * span;
    let obs_domain = (sweep.s_min - pad, sweep.s_max + pad);

    // Particles and observer.
    let built1 = build_particle("particle1", &raw.particle1, &geometry, obs_domain, &mut v);
    let built2 = build_particle("particle2", &raw.particle2, &geometry, obs_domain, &mut v);
    let observer = build_observer("observer", &raw.observer, &geometry, obs_domain, &mut v);

    // Outputs.
    let has_metric = metric.is_some();
    let outputs = match raw.outputs.quantities {
        None => Quantity::all(has_metric),
        Some(names) if names.len() == 1 && names[0] == "all" => Quantity::all(has_metric),
        Some(names) => {
            let mut out = Vec::new();
            for name in &names {
                match Quantity::parse(name) {
                    Some(q) => {
                        if q.needs_metric() && !has_metric {
                            v.fail(
                                "outputs.quantities",
                                format!("'{name}' requires a metric, which this geometry lacks"),
                            );
                        }
                        out.push(q);
                    }
                    None => v.fail("outputs.quantities", format!("unknown quantity '{name}'")),
                }
            }
            out
        }
    };

    // Transport.
    let transport_kind = raw
        .geometry
        .transport
        .clone()
        .unwrap_or_else(|| "linear-connection".into());
    let steps = raw.numerics.rk4_steps.unwrap_or(256);
    if steps == 0 {
        v.fail("numerics.rk4_steps", "must be at least 1");
    }
    let transport = match transport_kind.as_str() {
        "linear-connection" => Transport::linear(chart.clone(), steps.max(1)),
        "flat" => Transport::flat(),
        other => {
            v.fail(
                "geometry.transport",
                format!("unknown transport '{other}' (expected linear-connection or flat)"),
            );
            Transport::flat()
        }
    };

    let panels = raw.numerics.simpson_panels.unwrap_or(256);
    if panels == 0 {
        v.fail("numerics.simpson_panels", "must be at least 1");
    }
    if let Some(fd) = raw.numerics.fd_step {
        if !(fd > 0.0) {
            v.fail("numerics.fd_step", "must be positive");
        }
    }
    if let Some(tol) = raw.numerics.tolerance {
        if !(tol > 0.0) {
            v.fail("numerics.tolerance", "must be positive");
        }
    }
    let epsilon_zero = match raw.numerics.epsilon_zero_sign {
        None | Some(1) => SignAtZero::Positive,
        Some(-1) => SignAtZero::Negative,
        Some(other) => {
            v.fail(
                "numerics.epsilon_zero_sign",
                format!("must be 1 or -1, got {other}"),
            );
            SignAtZero::Positive
        }
    };

    v.finish()?;

    let (particle1, spec1, rate1) = built1.expect("validated");
    let (particle2, spec2, rate2) = built2.expect("validated");
    let observer = observer.expect("validated");
    let observer_velocity = inertial_observer_velocity(&raw.observer, &geometry);

    let mut numerics: NumericsConfig<f64> =
        NumericsConfig::default_for_span(obs_domain.1 - obs_domain.0);
    numerics.transport_steps_per_unit = steps.max(1);
    numerics.quadrature_panels = panels.max(1);
    if let Some(fd) = raw.numerics.fd_step {
        numerics.derivative.fd_step = fd;
    }
    if let Some(tol) = raw.numerics.tolerance {
        numerics.tolerance = tol;
    }
    numerics.epsilon_zero = epsilon_zero;

    let config =
        ObserverConfiguration::new(chart, transport, metric, observer, particle1, particle2)
            .map_err(|e| CliError::Validation(format!("scenario is inconsistent: {e}")))?
            .with_numerics(numerics);

    let inertial = match (&geometry, spec1, spec2, observer_velocity) {
        (Geometry::Minkowski { c }, Some(p1), Some(p2), Some(observer_velocity)) => {
            Some(InertialPair {
                p1,
                p2,
                observer_velocity,
                c: *c,
            })
        }
        _ => None,
    };

    Ok(BuiltScenario {
        config,
        geometry,
        sweep,
        outputs,
        inertial,
        time_rates: (rate1, rate2),
        transport_kind,
    })
}

fn connection_by_name(name: &str, dim: usize) -> Option<ManifoldChart64> {
    match name {
        "zero" => Some(ManifoldChart::flat(dim, "zero-connection")),
        "polar-euclidean" if dim == 2 => Some(polar::chart()),
        _ => None,
    }
}

fn metric_by_name(name: &str, dim: usize) -> Option<BundleMetric<f64>> {
    match name {
        "euclidean" => Some(BundleMetric::euclidean(dim)),
        "minkowski" => Some(BundleMetric::minkowski(dim)),
        "polar-euclidean" if dim == 2 => Some(polar::metric()),
        _ => None,
    }
}

type BuiltParticle = (Particle64, Option<SRParticleSpec<f64>>, Option<f64>);

fn build_particle(
    field: &str,
    raw: &RawParticle,
    geometry: &Geometry,
    obs_domain: (f64, f64),
    v: &mut Validator,
) -> Option<BuiltParticle> {
    if raw.mass < 0.0 {
        v.fail(&format!("{field}.mass"), "must be nonnegative");
        return None;
    }
    let massless = raw.mass == 0.0;
    if massless && raw.energy.is_none() {
        v.fail(
            &format!("{field}.energy"),
            "required for massless particles",
        );
        return None;
    }
    if massless && !matches!(geometry, Geometry::Minkowski { .. }) {
        v.fail(
            &format!("{field}.mass"),
            "massless particles are only supported on minkowski4 geometry",
        );
        return None;
    }

    match (geometry, raw.worldline.kind.as_str()) {
        (Geometry::Minkowski { c }, "inertial") => {
            build_inertial_relativistic(field, raw, *c, obs_domain, v)
        }
        (_, "inertial") => {
            let path =
                build_inertial_generic(field, &raw.worldline, geometry.dim(), obs_domain, v)?;
            let (time_map, rate) = build_time_map(field, raw.time_map.as_ref(), None, v)?;
            let particle = Particle::massive(path, time_map, raw.mass)
                .map_err(|e| v.fail(&format!("{field}.mass"), e.to_string()))
                .ok()?;
            Some((particle, None, rate))
        }
        (_, "polynomial") => {
            let path = build_polynomial(field, &raw.worldline, geometry.dim(), obs_domain, v)?;
            let (time_map, rate) = build_time_map(field, raw.time_map.as_ref(), None, v)?;
            let particle = Particle::massive(path, time_map, raw.mass)
                .map_err(|e| v.fail(&format!("{field}.mass"), e.to_string()))
                .ok()?;
            Some((particle, None, rate))
        }
        (_, "table") => {
            let path = build_table(field, &raw.worldline, geometry.dim(), obs_domain, v)?;
            let (time_map, rate) = build_time_map(field, raw.time_map.as_ref(), None, v)?;
            let particle = Particle::massive(path, time_map, raw.mass)
                .map_err(|e| v.fail(&format!("{field}.mass"), e.to_string()))
                .ok()?;
            Some((particle, None, rate))
        }
        (_, other) => {
            v.fail(
                &format!("{field}.worldline.kind"),
                format!(
                    "unknown worldline kind '{other}' (expected inertial, polynomial or table)"
                ),
            );
            None
        }
    }
}

fn build_inertial_relativistic(
    field: &str,
    raw: &RawParticle,
    c: f64,
    obs_domain: (f64, f64),
    v: &mut Validator,
) -> Option<BuiltParticle> {
    let offset = match raw.worldline.offset.as_deref() {
        None => [0.0; 4],
        Some(o) if o.len() == 4 => [o[0], o[1], o[2], o[3]],
        Some(o) => {
            v.fail(
                &format!("{field}.worldline.offset"),
                format!("expected 4 components, got {}", o.len()),
            );
            return None;
        }
    };

    let massless = raw.mass == 0.0;
    let spec = if massless {
        let n = match raw.worldline.direction.as_deref() {
            Some(n) if n.len() == 3 => [n[0], n[1], n[2]],
            Some(n) => {
                v.fail(
                    &format!("{field}.worldline.direction"),
                    format!("expected 3 components, got {}", n.len()),
                );
                return None;
            }
            None => {
                v.fail(
                    &format!("{field}.worldline.direction"),
                    "required for massless particles",
                );
                return None;
            }
        };
        let norm = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            v.fail(
                &format!("{field}.worldline.direction"),
                "must be a unit vector",
            );
            return None;
        }
        SRParticleSpec::photon(raw.energy.unwrap_or(0.0), n, offset, c)
    } else {
        let vel = match raw.worldline.velocity.as_deref() {
            Some(w) if w.len() == 3 => [w[0], w[1], w[2]],
            Some(w) => {
                v.fail(
                    &format!("{field}.worldline.velocity"),
                    format!("expected 3 components, got {}", w.len()),
                );
                return None;
            }
            None => {
                v.fail(
                    &format!("{field}.worldline.velocity"),
                    "required for inertial worldlines",
                );
                return None;
            }
        };
        SRParticleSpec::massive(raw.mass, vel, offset)
    };

    if let Err(e) = spec.validate(c) {
        v.fail(&format!("{field}.worldline"), e.to_string());
        return None;
    }

    let margin = 0.05 * (obs_domain.1 - obs_domain.0).max(1.0);
    let vel = spec.v3;
    if massless {
        let domain = (obs_domain.0 - margin, obs_domain.1 + margin);
        let eval: PointFn<f64> = Arc::new(move |t: f64| {
            vec![
                offset[0] + c * t,
                offset[1] + t * vel[0],
                offset[2] + t * vel[1],
                offset[3] + t * vel[2],
            ]
        });
        let tangent: PointFn<f64> = Arc::new(move |_t: f64| vec![c, vel[0], vel[1], vel[2]]);
        let path = Path::new(domain, eval, tangent).expect("nondegenerate domain");
        let mu = raw.energy.unwrap() / (c * c);
        let (time_map, rate) = build_time_map(field, raw.time_map.as_ref(), Some(1.0), v)?;
        let particle = Particle::massless(path, time_map, mu)
            .map_err(|e| v.fail(field, e.to_string()))
            .ok()?;
        Some((particle, Some(spec), rate))
    } else {
        let rate = (1.0 - spec.speed_squared() / (c * c)).sqrt();
        let gamma = 1.0 / rate;
        let domain = (rate * obs_domain.0 - margin, rate * obs_domain.1 + margin);
        let eval: PointFn<f64> = Arc::new(move |sigma: f64| {
            vec![
                offset[0] + c * gamma * sigma,
                offset[1] + gamma * sigma * vel[0],
                offset[2] + gamma * sigma * vel[1],
                offset[3] + gamma * sigma * vel[2],
            ]
        });
        let tangent: PointFn<f64> = Arc::new(move |_s: f64| {
            vec![gamma * c, gamma * vel[0], gamma * vel[1], gamma * vel[2]]
        });
        let path = Path::new(domain, eval, tangent).expect("nondegenerate domain");
        let (time_map, mapped_rate) = build_time_map(field, raw.time_map.as_ref(), Some(rate), v)?;
        let particle = Particle::massive(path, time_map, raw.mass)
            .map_err(|e| v.fail(field, e.to_string()))
            .ok()?;
        Some((particle, Some(spec), mapped_rate))
    }
}

/// Time map construction. `proper_rate` is the rate of the proper-time map
/// when the worldline supports one (inertial relativistic particles).
fn build_time_map(
    field: &str,
    raw: Option<&RawTimeMap>,
    proper_rate: Option<f64>,
    v: &mut Validator,
) -> Option<(relkin::kinematics::TimeMapFn<f64>, Option<f64>)> {
    match raw {
        None => match proper_rate {
            // Relativistic inertial default: proper time.
            Some(rate) => Some((linear_time_map(rate), Some(rate))),
            None => Some((identity_time_map(), Some(1.0))),
        },
        Some(tm) => match tm.kind.as_str() {
            "identity" => Some((identity_time_map(), Some(1.0))),
            "linear" => match tm.rate {
                Some(rate) if rate > 0.0 => Some((linear_time_map(rate), Some(rate))),
                _ => {
                    v.fail(
                        &format!("{field}.time_map.rate"),
                        "linear time maps require a positive rate",
                    );
                    None
                }
            },
            "proper" => match proper_rate {
                Some(rate) => Some((linear_time_map(rate), Some(rate))),
                None => {
                    v.fail(
                        &format!("{field}.time_map.kind"),
                        "proper time maps require an inertial relativistic worldline",
                    );
                    None
                }
            },
            other => {
                v.fail(
                    &format!("{field}.time_map.kind"),
                    format!("unknown time map '{other}' (expected identity, linear or proper)"),
                );
                None
            }
        },
    }
}

fn build_inertial_generic(
    field: &str,
    raw: &RawWorldline,
    dim: usize,
    obs_domain: (f64, f64),
    v: &mut Validator,
) -> Option<Path64> {
    let vel = match raw.velocity.as_deref() {
        Some(w) if w.len() == dim => w.to_vec(),
        Some(w) => {
            v.fail(
                &format!("{field}.worldline.velocity"),
                format!("expected {dim} components, got {}", w.len()),
            );
            return None;
        }
        None => {
            v.fail(
                &format!("{field}.worldline.velocity"),
                "required for inertial worldlines",
            );
            return None;
        }
    };
    let offset = match raw.offset.as_deref() {
        None => vec![0.0; dim],
        Some(o) if o.len() == dim => o.to_vec(),
        Some(o) => {
            v.fail(
                &format!("{field}.worldline.offset"),
                format!("expected {dim} components, got {}", o.len()),
            );
            return None;
        }
    };
    let margin = 0.05 * (obs_domain.1 - obs_domain.0).max(1.0);
    let domain = (obs_domain.0 - margin, obs_domain.1 + margin);
    let vel2 = vel.clone();
    let eval: PointFn<f64> =
        Arc::new(move |s: f64| offset.iter().zip(&vel).map(|(&o, &w)| o + s * w).collect());
    let tangent: PointFn<f64> = Arc::new(move |_s: f64| vel2.clone());
    Some(Path::new(domain, eval, tangent).expect("nondegenerate domain"))
}

fn build_polynomial(
    field: &str,
    raw: &RawWorldline,
    dim: usize,
    obs_domain: (f64, f64),
    v: &mut Validator,
) -> Option<Path64> {
    let coeffs = match raw.coefficients.as_deref() {
        Some(c) if c.len() == dim => c.to_vec(),
        Some(c) => {
            v.fail(
                &format!("{field}.worldline.coefficients"),
                format!("expected {dim} coordinate rows, got {}", c.len()),
            );
            return None;
        }
        None => {
            v.fail(
                &format!("{field}.worldline.coefficients"),
                "required for polynomial worldlines",
            );
            return None;
        }
    };
    for (i, row) in coeffs.iter().enumerate() {
        if row.is_empty() {
            v.fail(
                &format!("{field}.worldline.coefficients[{i}]"),
                "each coordinate needs at least one coefficient",
            );
            return None;
        }
        if row.iter().any(|x| !x.is_finite()) {
            v.fail(
                &format!("{field}.worldline.coefficients[{i}]"),
                "coefficients must be finite",
            );
            return None;
        }
    }
    let margin = 0.05 * (obs_domain.1 - obs_domain.0).max(1.0);
    let domain = (obs_domain.0 - margin, obs_domain.1 + margin);
    let c1 = coeffs.clone();
    let eval: PointFn<f64> = Arc::new(move |s: f64| c1.iter().map(|row| horner(row, s)).collect());
    let tangent: PointFn<f64> =
        Arc::new(move |s: f64| coeffs.iter().map(|row| horner_derivative(row, s)).collect());
    Some(Path::new(domain, eval, tangent).expect("nondegenerate domain"))
}

fn horner(coeffs: &[f64], s: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * s + c)
}

fn horner_derivative(coeffs: &[f64], s: f64) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(0.0, |acc, (k, &c)| acc * s + (k as f64) * c)
}

fn build_table(
    field: &str,
    raw: &RawWorldline,
    dim: usize,
    obs_domain: (f64, f64),
    v: &mut Validator,
) -> Option<Path64> {
    let params = match raw.params.as_deref() {
        Some(p) if p.len() >= 3 => p.to_vec(),
        Some(p) => {
            v.fail(
                &format!("{field}.worldline.params"),
                format!(
                    "need at least 3 samples for cubic interpolation, got {}",
                    p.len()
                ),
            );
            return None;
        }
        None => {
            v.fail(
                &format!("{field}.worldline.params"),
                "required for table worldlines",
            );
            return None;
        }
    };
    if params.windows(2).any(|w| w[1] <= w[0]) {
        v.fail(
            &format!("{field}.worldline.params"),
            "must be strictly increasing",
        );
        return None;
    }
    let points = match raw.points.as_deref() {
        Some(p) if p.len() == params.len() => p.to_vec(),
        Some(p) => {
            v.fail(
                &format!("{field}.worldline.points"),
                format!(
                    "expected {} rows to match params, got {}",
                    params.len(),
                    p.len()
                ),
            );
            return None;
        }
        None => {
            v.fail(
                &format!("{field}.worldline.points"),
                "required for table worldlines",
            );
            return None;
        }
    };
    for (i, row) in points.iter().enumerate() {
        if row.len() != dim {
            v.fail(
                &format!("{field}.worldline.points[{i}]"),
                format!("expected {dim} coordinates, got {}", row.len()),
            );
            return None;
        }
    }
    // The stencil and sweep padding must stay inside the table.
    let (lo, hi) = (params[0], *params.last().unwrap());
    if obs_domain.0 < lo || obs_domain.1 > hi {
        v.fail(
            &format!("{field}.worldline.params"),
            format!(
                "table covers [{lo}, {hi}] but the padded sweep needs [{}, {}]; extend the table",
                obs_domain.0, obs_domain.1
            ),
        );
        return None;
    }

    let splines: Vec<CubicSpline> = (0..dim)
        .map(|k| {
            let ys: Vec<f64> = points.iter().map(|row| row[k]).collect();
            CubicSpline::natural(&params, &ys)
        })
        .collect();
    let splines2 = splines.clone();
    let eval: PointFn<f64> = Arc::new(move |s: f64| splines.iter().map(|sp| sp.eval(s)).collect());
    let tangent: PointFn<f64> =
        Arc::new(move |s: f64| splines2.iter().map(|sp| sp.derivative(s)).collect());
    Some(Path::new((lo, hi), eval, tangent).expect("strictly increasing params"))
}

fn build_observer(
    field: &str,
    raw: &RawObserver,
    geometry: &Geometry,
    obs_domain: (f64, f64),
    v: &mut Validator,
) -> Option<Path64> {
    match (geometry, raw.worldline.kind.as_str()) {
        (Geometry::Minkowski { c }, "inertial") => {
            let vel = match raw.worldline.velocity.as_deref() {
                Some(w) if w.len() == 3 => [w[0], w[1], w[2]],
                Some(w) => {
                    v.fail(
                        &format!("{field}.worldline.velocity"),
                        format!("expected 3 components, got {}", w.len()),
                    );
                    return None;
                }
                None => [0.0; 3],
            };
            let offset = match raw.worldline.offset.as_deref() {
                None => [0.0; 4],
                Some(o) if o.len() == 4 => [o[0], o[1], o[2], o[3]],
                Some(o) => {
                    v.fail(
                        &format!("{field}.worldline.offset"),
                        format!("expected 4 components, got {}", o.len()),
                    );
                    return None;
                }
            };
            if vel[0] * vel[0] + vel[1] * vel[1] + vel[2] * vel[2] >= c * c {
                v.fail(
                    &format!("{field}.worldline.velocity"),
                    "observer must be slower than light",
                );
                return None;
            }
            let c = *c;
            let eval: PointFn<f64> = Arc::new(move |s: f64| {
                vec![
                    offset[0] + c * s,
                    offset[1] + s * vel[0],
                    offset[2] + s * vel[1],
                    offset[3] + s * vel[2],
                ]
            });
            let tangent: PointFn<f64> = Arc::new(move |_s: f64| vec![c, vel[0], vel[1], vel[2]]);
            Some(Path::new(obs_domain, eval, tangent).expect("nondegenerate domain"))
        }
        (_, "inertial") => {
            build_inertial_generic(field, &raw.worldline, geometry.dim(), obs_domain, v)
        }
        (_, "polynomial") => build_polynomial(field, &raw.worldline, geometry.dim(), obs_domain, v),
        (_, "table") => build_table(field, &raw.worldline, geometry.dim(), obs_domain, v),
        (_, other) => {
            v.fail(
                &format!("{field}.worldline.kind"),
                format!("unknown worldline kind '{other}'"),
            );
            None
        }
    }
}

fn inertial_observer_velocity(raw: &RawObserver, geometry: &Geometry) -> Option<[f64; 3]> {
    if !matches!(geometry, Geometry::Minkowski { .. }) || raw.worldline.kind != "inertial" {
        return None;
    }
    match raw.worldline.velocity.as_deref() {
        None => Some([0.0; 3]),
        Some(w) if w.len() == 3 => Some([w[0], w[1], w[2]]),
        Some(_) => None,
    }
}

/// Natural cubic spline through strictly increasing sample parameters.
#[derive(Clone, Debug)]
struct CubicSpline {
    xs: Vec<f64>,
    ys: Vec<f64>,
    second: Vec<f64>,
}

impl CubicSpline {
    fn natural(xs: &[f64], ys: &[f64]) -> Self {
        let n = xs.len();
        let mut second = vec![0.0; n];
        if n >= 3 {
            // Thomas algorithm on the interior second-derivative system.
            let m = n - 2;
            let mut diag = vec![0.0; m];
            let mut upper = vec![0.0; m];
            let mut lower = vec![0.0; m];
            let mut rhs = vec![0.0; m];
            for i in 0..m {
                let h0 = xs[i + 1] - xs[i];
                let h1 = xs[i + 2] - xs[i + 1];
                lower[i] = h0;
                diag[i] = 2.0 * (h0 + h1);
                upper[i] = h1;
                rhs[i] = 6.0 * ((ys[i + 2] - ys[i + 1]) / h1 - (ys[i + 1] - ys[i]) / h0);
            }
            for i in 1..m {
                let w = lower[i] / diag[i - 1];
                diag[i] -= w * upper[i - 1];
                rhs[i] -= w * rhs[i - 1];
            }
            second[m] = rhs[m - 1] / diag[m - 1];
            for i in (0..m - 1).rev() {
                second[i + 1] = (rhs[i] - upper[i] * second[i + 2]) / diag[i];
            }
        }
        Self {
            xs: xs.to_vec(),
            ys: ys.to_vec(),
            second,
        }
    }

    fn segment(&self, x: f64) -> usize {
        let n = self.xs.len();
        match self.xs.partition_point(|&p| p <= x) {
            0 => 0,
            k if k >= n => n - 2,
            k => k - 1,
        }
    }

    fn eval(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let t = x - self.xs[i];
        let b = (self.ys[i + 1] - self.ys[i]) / h
            - h * (2.0 * self.second[i] + self.second[i + 1]) / 6.0;
        let c = self.second[i] / 2.0;
        let d = (self.second[i + 1] - self.second[i]) / (6.0 * h);
        self.ys[i] + t * (b + t * (c + t * d))
    }

    fn derivative(&self, x: f64) -> f64 {
        let i = self.segment(x);
        let h = self.xs[i + 1] - self.xs[i];
        let t = x - self.xs[i];
        let b = (self.ys[i + 1] - self.ys[i]) / h
            - h * (2.0 * self.second[i] + self.second[i + 1]) / 6.0;
        let c = self.second[i] / 2.0;
        let d = (self.second[i + 1] - self.second[i]) / (6.0 * h);
        b + t * (2.0 * c + 3.0 * t * d)
    }
}
