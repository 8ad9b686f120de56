//! Verification mode: runs batteries of identities comparing the numerical
//! pipeline against closed forms and against the transport axioms, and
//! reports one pass/fail line per identity with its worst residual.

use std::fmt::Write as _;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use relkin::geometry::{Path, PointFn, TangentVector};
use relkin::kinematics::{Direction, ObserverConfiguration, ParticleId};
use relkin::metric::epsilon;
use relkin::oracle::sr::{
    deviation_quantities, doppler_energy, relative_energies, SRParams, SRParticleSpec,
};
use relkin::transport::Transport;
use relkin::{Error, ObserverConfiguration64, Path64};

use crate::scenario::{BuiltScenario, Geometry};
use crate::CliError;

/// The three verification batteries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Sr,
    Euclidean,
    Axioms,
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sr" => Ok(Suite::Sr),
            "euclidean" => Ok(Suite::Euclidean),
            "axioms" => Ok(Suite::Axioms),
            other => Err(format!(
                "unknown suite '{other}' (expected sr, euclidean or axioms)"
            )),
        }
    }
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::Sr => "sr",
            Suite::Euclidean => "euclidean",
            Suite::Axioms => "axioms",
        }
    }
}

/// One verified identity.
#[derive(Debug, Clone)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tol: f64,
    pub passed: bool,
}

/// Result of one verification battery.
#[derive(Debug, Clone)]
pub struct Report {
    pub suite: &'static str,
    pub checks: Vec<Check>,
    pub notes: Vec<String>,
}

impl Report {
    fn new(suite: Suite) -> Self {
        Self {
            suite: suite.name(),
            checks: Vec::new(),
            notes: Vec::new(),
        }
    }

    fn push(&mut self, name: impl Into<String>, residual: f64, tol: f64) {
        let passed = residual.is_finite() && residual <= tol;
        self.checks.push(Check {
            name: name.into(),
            residual,
            tol,
            passed,
        });
    }

    fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "verify suite={}", self.suite);
        for c in &self.checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            let _ = writeln!(
                out,
                "[{status}] {:<64} max residual {:>10.3e} (tol {:.1e})",
                c.name, c.residual, c.tol
            );
        }
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        let passed = self.checks.iter().filter(|c| c.passed).count();
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        let _ = writeln!(
            out,
            "result: {verdict} ({passed}/{} checks)",
            self.checks.len()
        );
        out
    }
}

/// Runs one battery against a scenario.
pub fn verify(sc: &BuiltScenario, suite: Suite, tol: f64) -> Result<Report, CliError> {
    match suite {
        Suite::Sr => verify_sr(sc, tol),
        Suite::Euclidean => verify_euclidean(sc, tol),
        Suite::Axioms => verify_axioms(sc, tol),
    }
}

fn rel_residual(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(1.0)
}

fn max_comp_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0f64, |acc, (&x, &y)| acc.max((x - y).abs()))
}

// ---------------------------------------------------------------------
// Relativistic battery
// ---------------------------------------------------------------------

fn verify_sr(sc: &BuiltScenario, tol: f64) -> Result<Report, CliError> {
    let pair = sc.inertial.as_ref().ok_or_else(|| {
        CliError::Validation(
            "the sr suite needs minkowski4 geometry with inertial particles and observer".into(),
        )
    })?;
    let mut report = Report::new(Suite::Sr);
    let cfg = &sc.config;
    let samples = sc.sweep.values();
    let oracle = relative_energies(&pair.p1, &pair.p2, pair.c).map_err(CliError::Pipeline)?;

    // Energies against the closed forms.
    let mut worst = [0.0f64; 4];
    for &s in &samples {
        worst[0] = worst[0].max(rel_residual(
            cfg.relative_energy(s, Direction::SecondWrtFirst)
                .map_err(CliError::Pipeline)?,
            oracle.e21,
        ));
        worst[1] = worst[1].max(rel_residual(
            cfg.relative_energy(s, Direction::FirstWrtSecond)
                .map_err(CliError::Pipeline)?,
            oracle.e12,
        ));
        worst[2] = worst[2].max(rel_residual(
            cfg.proper_energy(ParticleId::First, s)
                .map_err(CliError::Pipeline)?,
            oracle.e11,
        ));
        worst[3] = worst[3].max(rel_residual(
            cfg.proper_energy(ParticleId::Second, s)
                .map_err(CliError::Pipeline)?,
            oracle.e22,
        ));
    }
    report.push("relative energy e21 matches the closed form", worst[0], tol);
    report.push("relative energy e12 matches the closed form", worst[1], tol);
    report.push("proper energy e11 matches the closed form", worst[2], tol);
    report.push("proper energy e22 matches the closed form", worst[3], tol);

    // Kinematic vectors against the closed forms (needs a massive first
    // particle for the comoving construction; the lab entries are enough
    // here).
    if pair.p1.mass > 0.0 {
        let frame = SRParams::new(pair.c).map_err(CliError::Pipeline)?;
        let mut worst_dv = 0.0f64;
        let mut worst_h = 0.0f64;
        let mut worst_v21 = 0.0f64;
        for &s in &samples {
            let d =
                deviation_quantities(&pair.p1, &pair.p2, &frame, s).map_err(CliError::Pipeline)?;
            let dv = cfg.relative_velocity(s).map_err(CliError::Pipeline)?;
            worst_dv = worst_dv.max(max_comp_diff(dv.comps(), &d.dv21_lab));
            let h = cfg.deviation_vector(s).map_err(CliError::Pipeline)?;
            worst_h = worst_h.max(max_comp_diff(h.comps(), &d.h21_lab));
            let v21 = cfg.deviation_velocity(s).map_err(CliError::Pipeline)?;
            worst_v21 = worst_v21.max(max_comp_diff(v21.vector.comps(), &d.v21_lab));
        }
        report.push("relative velocity matches the closed form", worst_dv, tol);
        report.push("separation matches the closed form", worst_h, tol);
        report.push(
            "deviation velocity matches the closed form",
            worst_v21,
            tol.max(1e-6),
        );
    } else {
        report.note("kinematic closed forms skipped: first particle is massless");
    }

    // Reciprocity of the relative energies.
    let mut worst = 0.0f64;
    for &s in &samples {
        worst = worst.max(reciprocity_residual(cfg, s)?);
    }
    report.push("energy reciprocity", worst, tol);

    // Momentum decomposition for the linear transport.
    let mut worst = 0.0f64;
    for &s in &samples {
        worst = worst.max(decomposition_residual(cfg, s)?);
    }
    report.push("relative momentum decomposition", worst, tol);

    // Energy recovered from the relative momentum.
    let mut worst = 0.0f64;
    for &s in &samples {
        let direct = cfg
            .relative_energy(s, Direction::SecondWrtFirst)
            .map_err(CliError::Pipeline)?;
        let via = match cfg.energy_via_relative_momentum(s) {
            Ok(v) => v,
            Err(Error::InconsistentInvariant { lhs, .. }) => lhs,
            Err(e) => return Err(CliError::Pipeline(e)),
        };
        worst = worst.max(rel_residual(via, direct));
    }
    report.push("energy via the relative momentum", worst, tol);

    // Momentum components against the energies.
    match component_residual(cfg, &samples) {
        Ok(worst) => report.push("momentum components match the energies", worst, tol),
        Err(CliError::Pipeline(Error::DegenerateDirection(_))) => {
            report.note("component identities skipped: null velocity direction");
        }
        Err(e) => return Err(e),
    }

    // Momentum invariant, both routes.
    let mut worst = 0.0f64;
    for &s in &samples {
        worst = worst.max(invariant_residual(cfg, s)?);
    }
    report.push("momentum difference invariant", worst, tol);

    // Antisymmetry of the two difference orientations (exact for the flat
    // pipeline).
    let mut worst = 0.0f64;
    for &s in &samples {
        let x1 = cfg
            .momentum(ParticleId::First, s)
            .map_err(CliError::Pipeline)?;
        let x2 = cfg
            .momentum(ParticleId::Second, s)
            .map_err(CliError::Pipeline)?;
        let d21 = cfg
            .generic_difference(s, &x1, &x2, Direction::SecondWrtFirst)
            .map_err(CliError::Pipeline)?;
        let d12 = cfg
            .generic_difference(s, &x1, &x2, Direction::FirstWrtSecond)
            .map_err(CliError::Pipeline)?;
        let flipped: Vec<f64> = d21.comps().iter().map(|&c| -c).collect();
        worst = worst.max(max_comp_diff(d12.comps(), &flipped));
    }
    report.push("difference antisymmetry", worst, 0.0);

    // Doppler shift through the pipeline: a photon relative to a moving
    // source, transverse and longitudinal.
    let source_v = if pair.p1.mass > 0.0 {
        pair.p1.v3
    } else {
        [0.6 * pair.c, 0.0, 0.0]
    };
    let mut worst = 0.0f64;
    for n in doppler_directions(source_v) {
        let res = doppler_residual(pair.c, source_v, n)?;
        worst = worst.max(res);
    }
    report.push("doppler shift of photon energies", worst, tol.max(1e-10));

    // Photons sharing a direction have vanishing relative energies.
    let parallel = parallel_photon_residual(pair.c)?;
    report.push("parallel photons decouple", parallel, tol.max(1e-12));

    if report
        .checks
        .iter()
        .all(|c| c.residual < 1e-13 || c.name.contains("deviation velocity"))
    {
        report
            .note("flat pipeline: residuals at rounding level, resolution scaling not informative");
    }
    Ok(report)
}

fn reciprocity_residual(cfg: &ObserverConfiguration64, s: f64) -> Result<f64, CliError> {
    let g = cfg
        .metric()
        .ok_or_else(|| CliError::Validation("metric required".into()))?;
    let v1 = cfg
        .velocity(ParticleId::First, s)
        .map_err(CliError::Pipeline)?;
    let v2 = cfg
        .velocity(ParticleId::Second, s)
        .map_err(CliError::Pipeline)?;
    let sign1 = epsilon(g.square(&v1).map_err(CliError::Pipeline)?);
    let sign2 = epsilon(g.square(&v2).map_err(CliError::Pipeline)?);
    let first = cfg.particle(ParticleId::First);
    let second = cfg.particle(ParticleId::Second);
    let mu1 = first.mu_at(first.own_time(s)).map_err(CliError::Pipeline)?;
    let mu2 = second
        .mu_at(second.own_time(s))
        .map_err(CliError::Pipeline)?;
    let e21 = cfg
        .relative_energy(s, Direction::SecondWrtFirst)
        .map_err(CliError::Pipeline)?;
    let e12 = cfg
        .relative_energy(s, Direction::FirstWrtSecond)
        .map_err(CliError::Pipeline)?;
    Ok((sign2 * mu1 * e21 - sign1 * mu2 * e12).abs() / (mu1 * e21).abs().max(1.0))
}

fn decomposition_residual(cfg: &ObserverConfiguration64, s: f64) -> Result<f64, CliError> {
    let first = cfg.particle(ParticleId::First);
    let second = cfg.particle(ParticleId::Second);
    let mu1 = first.mu_at(first.own_time(s)).map_err(CliError::Pipeline)?;
    let mu2 = second
        .mu_at(second.own_time(s))
        .map_err(CliError::Pipeline)?;
    let dv = cfg.relative_velocity(s).map_err(CliError::Pipeline)?;
    let p1 = cfg
        .momentum(ParticleId::First, s)
        .map_err(CliError::Pipeline)?;
    let p1_obs = cfg
        .transport_to_observer(ParticleId::First, s, &p1)
        .map_err(CliError::Pipeline)?;
    let rhs = dv
        .scaled(mu2)
        .add(&p1_obs.scaled(mu2 / mu1 - 1.0))
        .map_err(CliError::Pipeline)?;
    let lhs = cfg.relative_momentum(s).map_err(CliError::Pipeline)?;
    Ok(max_comp_diff(lhs.comps(), rhs.comps()))
}

fn component_residual(cfg: &ObserverConfiguration64, samples: &[f64]) -> Result<f64, CliError> {
    let g = cfg
        .metric()
        .ok_or_else(|| CliError::Validation("metric required".into()))?;
    let mut worst = 0.0f64;
    for &s in samples {
        let comps = cfg
            .energy_momentum_components(s)
            .map_err(CliError::Pipeline)?;
        let e11 = cfg
            .proper_energy(ParticleId::First, s)
            .map_err(CliError::Pipeline)?;
        let e21 = cfg
            .relative_energy(s, Direction::SecondWrtFirst)
            .map_err(CliError::Pipeline)?;
        let e12 = cfg
            .relative_energy(s, Direction::FirstWrtSecond)
            .map_err(CliError::Pipeline)?;
        let v1 = cfg
            .velocity(ParticleId::First, s)
            .map_err(CliError::Pipeline)?;
        let v2 = cfg
            .velocity(ParticleId::Second, s)
            .map_err(CliError::Pipeline)?;
        let norm1 = g.square(&v1).map_err(CliError::Pipeline)?.abs().sqrt();
        let norm2 = g.square(&v2).map_err(CliError::Pipeline)?.abs().sqrt();

        worst = worst.max(rel_residual(comps.p1_first, e11 / norm1));
        worst = worst.max(comps.p1_off_axis_max);
        worst = worst.max(rel_residual(comps.p2_at_first_first, e21 / norm1));
        worst = worst.max(rel_residual(
            comps.relative_at_first_first,
            (e21 - e11) / norm1,
        ));
        worst = worst.max(rel_residual(
            comps.relative_at_observer_first,
            (e21 - e11) / norm1,
        ));
        if let Some(prime) = comps.p1_first_in_second_frame {
            worst = worst.max(rel_residual(prime, e12 / norm2));
        }
    }
    Ok(worst)
}

fn invariant_residual(cfg: &ObserverConfiguration64, s: f64) -> Result<f64, CliError> {
    let g = cfg
        .metric()
        .ok_or_else(|| CliError::Validation("metric required".into()))?;
    let p1 = cfg
        .momentum(ParticleId::First, s)
        .map_err(CliError::Pipeline)?;
    let p2 = cfg
        .momentum(ParticleId::Second, s)
        .map_err(CliError::Pipeline)?;
    let carried = cfg.pull_to_particle1(s, &p2).map_err(CliError::Pipeline)?;
    let diff = carried.sub(&p1).map_err(CliError::Pipeline)?;
    let direct = g.square(&diff).map_err(CliError::Pipeline)?;

    let v1 = cfg
        .velocity(ParticleId::First, s)
        .map_err(CliError::Pipeline)?;
    let v2 = cfg
        .velocity(ParticleId::Second, s)
        .map_err(CliError::Pipeline)?;
    let sign1 = epsilon(g.square(&v1).map_err(CliError::Pipeline)?);
    let sign2 = epsilon(g.square(&v2).map_err(CliError::Pipeline)?);
    let first = cfg.particle(ParticleId::First);
    let second = cfg.particle(ParticleId::Second);
    let mu1 = first.mu_at(first.own_time(s)).map_err(CliError::Pipeline)?;
    let mu2 = second
        .mu_at(second.own_time(s))
        .map_err(CliError::Pipeline)?;
    let e11 = cfg
        .proper_energy(ParticleId::First, s)
        .map_err(CliError::Pipeline)?;
    let e22 = cfg
        .proper_energy(ParticleId::Second, s)
        .map_err(CliError::Pipeline)?;
    let e21 = cfg
        .relative_energy(s, Direction::SecondWrtFirst)
        .map_err(CliError::Pipeline)?;
    let e12 = cfg
        .relative_energy(s, Direction::FirstWrtSecond)
        .map_err(CliError::Pipeline)?;

    let via_energies = sign1 * mu1 * e11 + sign2 * mu2 * e22 - 2.0 * sign1 * mu1 * e21;
    let mut worst = (direct - via_energies).abs() / direct.abs().max(1.0);

    if cfg
        .metric_consistency_probe(s)
        .map_err(CliError::Pipeline)?
    {
        let symmetric =
            sign1 * mu1 * e11 + sign2 * mu2 * e22 - sign1 * mu1 * e21 - sign2 * mu2 * e12;
        worst = worst.max((direct - symmetric).abs() / direct.abs().max(1.0));
        let dp = cfg.relative_momentum(s).map_err(CliError::Pipeline)?;
        let at_observer = g.square(&dp).map_err(CliError::Pipeline)?;
        worst = worst.max((direct - at_observer).abs() / direct.abs().max(1.0));
    }
    Ok(worst)
}

fn doppler_directions(v: [f64; 3]) -> Vec<[f64; 3]> {
    let speed = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if speed == 0.0 {
        return vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
    }
    let along = [v[0] / speed, v[1] / speed, v[2] / speed];
    // Any axis mostly orthogonal to the motion, orthonormalized.
    let seed = if along[0].abs() < 0.9 {
        [1.0, 0.0, 0.0]
    } else {
        [0.0, 1.0, 0.0]
    };
    let dot = seed[0] * along[0] + seed[1] * along[1] + seed[2] * along[2];
    let mut ortho = [
        seed[0] - dot * along[0],
        seed[1] - dot * along[1],
        seed[2] - dot * along[2],
    ];
    let norm = (ortho[0] * ortho[0] + ortho[1] * ortho[1] + ortho[2] * ortho[2]).sqrt();
    for o in &mut ortho {
        *o /= norm;
    }
    vec![along, ortho]
}

/// Builds a source-plus-photon configuration and compares the pipeline
/// energy ratio against the closed-form shift.
fn doppler_residual(c: f64, source_v: [f64; 3], n: [f64; 3]) -> Result<f64, CliError> {
    let frame_energy = 1.0;
    let source = SRParticleSpec::massive(1.0, source_v, [0.0; 4]);
    let photon = SRParticleSpec::photon(frame_energy, n, [0.0, 0.0, 0.0, 1.0], c);
    let cfg = inertial_config(&source, &photon, c, (0.0, 1.0))?;
    let e21 = cfg
        .relative_energy(0.5, Direction::SecondWrtFirst)
        .map_err(CliError::Pipeline)?;
    // The source-frame energy shifted back to the lab must reproduce the
    // photon's frame energy.
    let recovered = doppler_energy(e21, source_v, n, c).map_err(CliError::Pipeline)?;
    Ok(rel_residual(recovered, frame_energy))
}

fn parallel_photon_residual(c: f64) -> Result<f64, CliError> {
    let n = [1.0, 0.0, 0.0];
    let p1 = SRParticleSpec::photon(1.0, n, [0.0; 4], c);
    let p2 = SRParticleSpec::photon(3.0, n, [0.0, 0.0, 2.0, 0.0], c);
    let cfg = inertial_config(&p1, &p2, c, (0.0, 1.0))?;
    let e21 = cfg
        .relative_energy(0.5, Direction::SecondWrtFirst)
        .map_err(CliError::Pipeline)?;
    let e12 = cfg
        .relative_energy(0.5, Direction::FirstWrtSecond)
        .map_err(CliError::Pipeline)?;
    Ok(e21.abs().max(e12.abs()))
}

/// Internal builder of flat-spacetime configurations for the battery's
/// self-contained photon checks.
fn inertial_config(
    p1: &SRParticleSpec<f64>,
    p2: &SRParticleSpec<f64>,
    c: f64,
    sweep: (f64, f64),
) -> Result<ObserverConfiguration64, CliError> {
    use relkin::geometry::ManifoldChart;
    use relkin::kinematics::{identity_time_map, linear_time_map, Particle};
    use relkin::metric::BundleMetric;

    let span = (sweep.1 - sweep.0).max(0.5);
    let obs_domain = (sweep.0 - 0.1 * span, sweep.1 + 0.1 * span);
    let margin = 0.05 * (obs_domain.1 - obs_domain.0).max(1.0);
    let chart = ManifoldChart::flat(4, "flat-spacetime");

    let particle = |spec: &SRParticleSpec<f64>| -> Result<Particle<f64>, CliError> {
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
            let path = Path::new(domain, eval, tangent).map_err(CliError::Pipeline)?;
            Particle::massive(path, linear_time_map(rate), spec.mass).map_err(CliError::Pipeline)
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
            let path = Path::new(domain, eval, tangent).map_err(CliError::Pipeline)?;
            let mu = spec.energy.expect("photon spec has an energy") / (c * c);
            Particle::massless(path, identity_time_map(), mu).map_err(CliError::Pipeline)
        }
    };

    let observer_eval: PointFn<f64> = Arc::new(move |s: f64| vec![c * s, 0.0, 0.0, 0.0]);
    let observer_tangent: PointFn<f64> = Arc::new(move |_s: f64| vec![c, 0.0, 0.0, 0.0]);
    let observer =
        Path::new(obs_domain, observer_eval, observer_tangent).map_err(CliError::Pipeline)?;

    ObserverConfiguration::new(
        chart.clone(),
        Transport::linear(chart, 256),
        Some(BundleMetric::minkowski(4)),
        observer,
        particle(p1)?,
        particle(p2)?,
    )
    .map_err(CliError::Pipeline)
}

// ---------------------------------------------------------------------
// Euclidean battery
// ---------------------------------------------------------------------

fn verify_euclidean(sc: &BuiltScenario, tol: f64) -> Result<Report, CliError> {
    if !matches!(sc.geometry, Geometry::Euclidean { .. }) {
        return Err(CliError::Validation(
            "the euclidean suite needs euclidean geometry".into(),
        ));
    }
    let mut report = Report::new(Suite::Euclidean);
    let cfg = &sc.config;
    let samples = sc.sweep.values();

    // Transported differences collapse to componentwise differences, with
    // identical arithmetic: the residual must be exactly zero.
    let mut worst_v = 0.0f64;
    let mut worst_p = 0.0f64;
    let mut worst_h = 0.0f64;
    for &s in &samples {
        let v1 = cfg
            .velocity(ParticleId::First, s)
            .map_err(CliError::Pipeline)?;
        let v2 = cfg
            .velocity(ParticleId::Second, s)
            .map_err(CliError::Pipeline)?;
        let direct: Vec<f64> = v2
            .comps()
            .iter()
            .zip(v1.comps())
            .map(|(&a, &b)| a - b)
            .collect();
        let dv = cfg.relative_velocity(s).map_err(CliError::Pipeline)?;
        worst_v = worst_v.max(max_comp_diff(dv.comps(), &direct));

        let p1 = cfg
            .momentum(ParticleId::First, s)
            .map_err(CliError::Pipeline)?;
        let p2 = cfg
            .momentum(ParticleId::Second, s)
            .map_err(CliError::Pipeline)?;
        let direct: Vec<f64> = p2
            .comps()
            .iter()
            .zip(p1.comps())
            .map(|(&a, &b)| a - b)
            .collect();
        let dp = cfg.relative_momentum(s).map_err(CliError::Pipeline)?;
        worst_p = worst_p.max(max_comp_diff(dp.comps(), &direct));

        // Separation equals the coordinate chord.
        let x1 = cfg
            .particle(ParticleId::First)
            .worldline()
            .point(cfg.particle(ParticleId::First).own_time(s))
            .map_err(CliError::Pipeline)?;
        let x2 = cfg
            .particle(ParticleId::Second)
            .worldline()
            .point(cfg.particle(ParticleId::Second).own_time(s))
            .map_err(CliError::Pipeline)?;
        let chord: Vec<f64> = x2.iter().zip(&x1).map(|(&a, &b)| a - b).collect();
        let h = cfg.deviation_vector(s).map_err(CliError::Pipeline)?;
        worst_h = worst_h.max(max_comp_diff(h.comps(), &chord));
    }
    report.push(
        "relative velocity reduces to the velocity difference",
        worst_v,
        0.0,
    );
    report.push(
        "relative momentum reduces to the momentum difference",
        worst_p,
        0.0,
    );
    report.push(
        "separation equals the coordinate chord",
        worst_h,
        tol.max(1e-12),
    );

    // Deviation velocity against the analytic derivative of the chord.
    match sc.time_rates {
        (Some(r1), Some(r2)) => {
            let mut worst = 0.0f64;
            for &s in &samples {
                let v1 = cfg
                    .velocity(ParticleId::First, s)
                    .map_err(CliError::Pipeline)?;
                let v2 = cfg
                    .velocity(ParticleId::Second, s)
                    .map_err(CliError::Pipeline)?;
                let analytic: Vec<f64> = v2
                    .comps()
                    .iter()
                    .zip(v1.comps())
                    .map(|(&a, &b)| r2 * a - r1 * b)
                    .collect();
                let v21 = cfg.deviation_velocity(s).map_err(CliError::Pipeline)?;
                worst = worst.max(max_comp_diff(v21.vector.comps(), &analytic));
            }
            report.push(
                "deviation velocity matches the analytic chord rate",
                worst,
                tol.max(1e-6),
            );

            // Stencil resolution scaling on the same identity.
            let residual_at = |fd: f64| -> Result<f64, CliError> {
                let mut numerics = *cfg.numerics();
                numerics.derivative.fd_step = fd;
                let finer = cfg.clone().with_numerics(numerics);
                let s = samples[samples.len() / 2];
                let v1 = finer
                    .velocity(ParticleId::First, s)
                    .map_err(CliError::Pipeline)?;
                let v2 = finer
                    .velocity(ParticleId::Second, s)
                    .map_err(CliError::Pipeline)?;
                let analytic: Vec<f64> = v2
                    .comps()
                    .iter()
                    .zip(v1.comps())
                    .map(|(&a, &b)| r2 * a - r1 * b)
                    .collect();
                let v21 = finer.deviation_velocity(s).map_err(CliError::Pipeline)?;
                Ok(max_comp_diff(v21.vector.comps(), &analytic))
            };
            let base = cfg.numerics().derivative.fd_step.max(1e-3);
            let coarse = residual_at(base)?;
            let fine = residual_at(base / 2.0)?;
            if coarse < 1e-12 {
                report.note("stencil scaling: residuals at rounding level (chord rate is polynomial of low degree)");
            } else {
                report.note(format!(
                    "stencil scaling: halving the step changed the residual by {:.1}x (second-order expectation ~4)",
                    coarse / fine.max(1e-300)
                ));
            }
        }
        _ => report.note("analytic chord rate skipped: nonconstant time maps"),
    }

    // Antisymmetry of the two difference orientations.
    let mut worst = 0.0f64;
    for &s in &samples {
        let x1 = cfg
            .velocity(ParticleId::First, s)
            .map_err(CliError::Pipeline)?;
        let x2 = cfg
            .velocity(ParticleId::Second, s)
            .map_err(CliError::Pipeline)?;
        let d21 = cfg
            .generic_difference(s, &x1, &x2, Direction::SecondWrtFirst)
            .map_err(CliError::Pipeline)?;
        let d12 = cfg
            .generic_difference(s, &x1, &x2, Direction::FirstWrtSecond)
            .map_err(CliError::Pipeline)?;
        let flipped: Vec<f64> = d21.comps().iter().map(|&c| -c).collect();
        worst = worst.max(max_comp_diff(d12.comps(), &flipped));
    }
    report.push("difference antisymmetry", worst, 0.0);

    Ok(report)
}

// ---------------------------------------------------------------------
// Axiom battery
// ---------------------------------------------------------------------

fn verify_axioms(sc: &BuiltScenario, tol: f64) -> Result<Report, CliError> {
    let mut report = Report::new(Suite::Axioms);
    let chart = sc.config.chart().clone();
    let steps = sc.config.numerics().transport_steps_per_unit;
    let transport = match sc.config.transport() {
        Transport::Flat => Transport::Flat,
        _ => Transport::linear(chart.clone(), steps),
    };
    let metric = sc.config.metric().cloned();

    let mut rng = ChaCha8Rng::seed_from_u64(0x6178696f6d73);
    let draws: Vec<(Path64, TangentVector<f64>, TangentVector<f64>, f64, f64)> = (0..100)
        .map(|_| {
            let path = random_probe_path(&sc.geometry, &mut rng);
            let base = path.point(0.0).expect("probe path evaluates at 0");
            let dim = base.len();
            let comps = |rng: &mut ChaCha8Rng| -> Vec<f64> {
                (0..dim).map(|_| rng.gen_range(-2.0..2.0)).collect()
            };
            let u = TangentVector::new(base.clone(), comps(&mut rng)).unwrap();
            let w = TangentVector::new(base, comps(&mut rng)).unwrap();
            let r = rng.gen_range(0.0..1.0);
            let t = rng.gen_range(0.0..1.0);
            (path, u, w, r, t)
        })
        .collect();

    // Identity at equal parameters, exactly.
    let mut worst = 0.0f64;
    for (path, u, _, _, t) in &draws {
        let base = path.point(*t).map_err(CliError::Pipeline)?;
        let probe = TangentVector::new(base, u.comps().to_vec()).map_err(CliError::Pipeline)?;
        let v = transport
            .apply(path, *t, *t, &probe)
            .map_err(CliError::Pipeline)?;
        worst = worst.max(max_comp_diff(v.comps(), probe.comps()));
    }
    report.push("identity at equal parameters", worst, 0.0);

    // Composition across a middle parameter.
    let mut worst = 0.0f64;
    for (path, u, _, r, t) in &draws {
        let via = transport
            .apply(path, 0.0, *t, u)
            .map_err(CliError::Pipeline)?;
        let two_leg = transport
            .apply(path, *t, *r, &via)
            .map_err(CliError::Pipeline)?;
        let direct = transport
            .apply(path, 0.0, *r, u)
            .map_err(CliError::Pipeline)?;
        worst = worst.max(
            two_leg
                .sub(&direct)
                .map_err(CliError::Pipeline)?
                .max_abs_comp(),
        );
    }
    report.push("composition across a middle parameter", worst, tol);

    // Round trip back to the start.
    let mut worst = 0.0f64;
    for (path, u, _, _, _) in &draws {
        let there = transport
            .apply(path, 0.0, 1.0, u)
            .map_err(CliError::Pipeline)?;
        let back = transport
            .apply(path, 1.0, 0.0, &there)
            .map_err(CliError::Pipeline)?;
        worst = worst.max(back.sub(u).map_err(CliError::Pipeline)?.max_abs_comp());
    }
    report.push("round trip is the identity", worst, tol);

    // Homogeneity under scaling.
    let mut worst = 0.0f64;
    for (path, u, _, _, _) in &draws {
        let scaled_first = transport
            .apply(path, 0.0, 1.0, &u.scaled(3.0))
            .map_err(CliError::Pipeline)?;
        let scaled_after = transport
            .apply(path, 0.0, 1.0, u)
            .map_err(CliError::Pipeline)?;
        worst = worst.max(
            scaled_first
                .sub(&scaled_after.scaled(3.0))
                .map_err(CliError::Pipeline)?
                .max_abs_comp(),
        );
    }
    report.push("homogeneity under scaling", worst, tol.max(1e-12));

    // Metric consistency along the probe paths.
    if let Some(g) = &metric {
        let mut worst = 0.0f64;
        for (path, u, w, _, _) in &draws {
            let before = g.product(u, w).map_err(CliError::Pipeline)?;
            let tu = transport
                .apply(path, 0.0, 1.0, u)
                .map_err(CliError::Pipeline)?;
            let tw = transport
                .apply(path, 0.0, 1.0, w)
                .map_err(CliError::Pipeline)?;
            let after = g.product(&tu, &tw).map_err(CliError::Pipeline)?;
            worst = worst.max((before - after).abs());
        }
        report.push("metric pairing preserved along paths", worst, tol);
    } else {
        report.note("metric consistency skipped: scenario has no metric");
    }

    // Fourth-order scaling of the composition residual, measured at coarse
    // resolution where truncation dominates rounding.
    match sc.config.transport() {
        Transport::Flat => {
            report.push("fourth-order resolution scaling", 0.0, tol);
            report.note("flat transport: residuals identically zero, order check trivial");
        }
        _ => {
            let residual_with = |steps_per_unit: usize| -> Result<f64, CliError> {
                let t = Transport::linear(chart.clone(), steps_per_unit);
                let mut worst = 0.0f64;
                for (path, u, _, _, _) in draws.iter().take(25) {
                    let via = t.apply(path, 0.0, 0.37, u).map_err(CliError::Pipeline)?;
                    let two_leg = t.apply(path, 0.37, 1.0, &via).map_err(CliError::Pipeline)?;
                    let direct = t.apply(path, 0.0, 1.0, u).map_err(CliError::Pipeline)?;
                    worst = worst.max(
                        two_leg
                            .sub(&direct)
                            .map_err(CliError::Pipeline)?
                            .max_abs_comp(),
                    );
                }
                Ok(worst)
            };
            let coarse = residual_with(16)?;
            let fine = residual_with(32)?;
            if coarse < 1e-13 {
                report.push("fourth-order resolution scaling", 0.0, tol);
                report.note("composition residuals at rounding level; order check trivial");
            } else {
                let ratio = coarse / fine.max(1e-300);
                // Expressed as a residual: how far the ratio falls short of
                // the twelvefold reduction a fourth-order scheme must beat.
                let shortfall = (12.0 - ratio).max(0.0);
                report.push("fourth-order resolution scaling", shortfall, 0.0);
                report.note(format!(
                    "halving the step reduced the worst composition residual by {ratio:.1}x (fourth-order expectation ~16)"
                ));
            }
        }
    }

    Ok(report)
}

/// Probe path for the axiom battery, adapted to the scenario geometry.
fn random_probe_path(geometry: &Geometry, rng: &mut ChaCha8Rng) -> Path64 {
    match geometry {
        Geometry::Custom { connection, .. } if connection == "polar-euclidean" => {
            let r0 = rng.gen_range(1.0..2.0);
            let r_amp = rng.gen_range(0.0..0.4);
            let r_freq = rng.gen_range(0.5..2.0);
            let phase = rng.gen_range(0.0..std::f64::consts::TAU);
            let theta0 = rng.gen_range(0.0..std::f64::consts::TAU);
            let theta_rate = rng.gen_range(0.4..2.2);
            let eval: PointFn<f64> = Arc::new(move |u: f64| {
                vec![
                    r0 + r_amp * (r_freq * u + phase).sin(),
                    theta0 + theta_rate * u,
                ]
            });
            let tangent: PointFn<f64> = Arc::new(move |u: f64| {
                vec![r_amp * r_freq * (r_freq * u + phase).cos(), theta_rate]
            });
            Path::new((0.0, 1.0), eval, tangent).expect("unit interval")
        }
        _ => {
            let dim = geometry.dim();
            let a: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let b: Vec<f64> = a.iter().map(|&x| x + rng.gen_range(0.4..1.4)).collect();
            let wiggle: Vec<f64> = (0..dim).map(|_| rng.gen_range(-0.3..0.3)).collect();
            let (a2, b2, w2) = (a.clone(), b.clone(), wiggle.clone());
            let eval: PointFn<f64> = Arc::new(move |u: f64| {
                a.iter()
                    .zip(&b)
                    .zip(&wiggle)
                    .map(|((&p, &q), &w)| p + u * (q - p) + w * (std::f64::consts::PI * u).sin())
                    .collect()
            });
            let tangent: PointFn<f64> = Arc::new(move |u: f64| {
                a2.iter()
                    .zip(&b2)
                    .zip(&w2)
                    .map(|((&p, &q), &w)| {
                        (q - p) + w * std::f64::consts::PI * (std::f64::consts::PI * u).cos()
                    })
                    .collect()
            });
            Path::new((0.0, 1.0), eval, tangent).expect("unit interval")
        }
    }
}
