//! The five benchmarks: builders, run drivers with their gauges, and the
//! cantilever convergence study.
//!
//! Every run produces one history row per recorded step with three
//! scenario-specific columns:
//!
//! | scenario            | `load`                         | `response`                       | `gauge`                              |
//! |---------------------|--------------------------------|----------------------------------|--------------------------------------|
//! | cantilever_moment   | end moment (N·m)               | tip displacement (m)             | relative L2 centerline error         |
//! | buckling            | end shortening (m)             | midpoint deflection (m)          | axial force at the roller (N)        |
//! | spall               | end displacement δ(t) (m)      | opening at mid-length (m)        | axial stress at L/4 (Pa)             |
//! | transverse_fracture | center displacement (m)        | axial force at mid-length (N)    | moment across the center (N·m)       |
//! | spaghetti           | end moment (N·m)               | tip deflection (m)               | max curvature over s ≤ L/4 (1/m)     |

pub mod build;
pub mod config;
pub mod converge;
pub mod oracles;

use std::fmt::Write as _;

use crate::assembly::{energies, interface_reports, InterfaceReport, Model};
use crate::beam::{interpolate, Vec3};
use crate::cohesive::{cohesive_tractions, InterfaceState};
use crate::error::Result;
use crate::mesh::{End, NodeRef};
use crate::solvers::{newton_quasistatic, EnergyReport, ExplicitIntegrator};

pub use build::{build_scenario, Problem, Stage, StageSolver};
pub use config::{CohesiveConfig, LoadingConfig, ScenarioConfig, ScenarioId, SolverConfig};
pub use converge::{converge, ConvergenceRow, DEFAULT_BETAS, DEFAULT_LEVELS};

/// Upper bound on history rows of an explicit stage; longer runs are thinned.
pub const MAX_DYNAMIC_ROWS: usize = 20_000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunOptions {
    /// Steps between snapshots; `None` uses 100 for explicit and 1 for
    /// quasi-static stages.
    pub snapshot_stride: Option<usize>,
    pub snapshots: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { snapshot_stride: None, snapshots: true }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct HistoryRow {
    pub step: usize,
    /// Physical time (s); quasi-static stages report pseudo-time, shifted by
    /// −1 when a dynamic stage follows.
    pub time: f64,
    pub load: f64,
    pub response: f64,
    pub gauge: f64,
    pub kinetic: f64,
    pub elastic: f64,
    pub interface: f64,
    pub dissipated: f64,
    pub external_work: f64,
    /// Interfaces initiated so far.
    pub initiated: usize,
    /// Interfaces fully failed so far.
    pub failed: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NodeSample {
    /// Reference arc length (m).
    pub s: f64,
    pub position: Vec3,
    pub tangent: Vec3,
    pub strain: f64,
    /// ‖κ‖ (1/m)
    pub curvature: f64,
    /// f∥·g1 = EAε (N)
    pub axial_force: f64,
    /// ‖m⊥‖ (N·m)
    pub moment: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot {
    pub step: usize,
    pub time: f64,
    pub nodes: Vec<NodeSample>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FractureEvent {
    pub interface: usize,
    /// Reference arc length of the interface (m).
    pub s: f64,
    pub time: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Summary {
    pub scenario: ScenarioId,
    pub elements: usize,
    pub steps: usize,
    pub final_time: f64,
    pub dt: Option<f64>,
    pub dt_c: Option<f64>,
    pub newton_iterations: usize,
    pub initiations: Vec<FractureEvent>,
    pub failures: Vec<FractureEvent>,
    pub critical_load: Option<f64>,
    pub critical_load_reference: Option<f64>,
    /// Smallest and largest axial force after the critical load.
    pub post_buckling_range: Option<(f64, f64)>,
    pub centerline_error: Option<f64>,
    /// Largest gauge value of the run.
    pub peak_gauge: Option<f64>,
    /// Spaghetti: largest curvature near the clamp before the first failure.
    pub max_curvature_before_failure: Option<f64>,
}

impl Summary {
    fn new(problem: &Problem) -> Self {
        Summary {
            scenario: problem.config.id,
            elements: problem.mesh().n_elements(),
            steps: 0,
            final_time: 0.0,
            dt: None,
            dt_c: None,
            newton_iterations: 0,
            initiations: vec![],
            failures: vec![],
            critical_load: None,
            critical_load_reference: None,
            post_buckling_range: None,
            centerline_error: None,
            peak_gauge: None,
            max_curvature_before_failure: None,
        }
    }

    /// `key: value` lines for `summary.txt`.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: String| {
            let _ = writeln!(out, "{k}: {v}");
        };
        line("scenario", self.scenario.to_string());
        line("elements", self.elements.to_string());
        line("steps", self.steps.to_string());
        line("final_time", format!("{:e}", self.final_time));
        if let Some(dt) = self.dt {
            line("dt", format!("{dt:e}"));
        }
        if let Some(dt_c) = self.dt_c {
            line("dt_c", format!("{dt_c:e}"));
        }
        if self.newton_iterations > 0 {
            line("newton_iterations", self.newton_iterations.to_string());
        }
        if let Some(e) = self.centerline_error {
            line("centerline_error", format!("{e:e}"));
        }
        if let Some(f) = self.critical_load {
            line("critical_load", format!("{f:e}"));
        }
        if let Some(f) = self.critical_load_reference {
            line("critical_load_reference", format!("{f:e}"));
        }
        if let Some((lo, hi)) = self.post_buckling_range {
            line("post_buckling_force_range", format!("{lo:e} {hi:e}"));
        }
        if let Some(g) = self.peak_gauge {
            line("peak_gauge", format!("{g:e}"));
        }
        if let Some(k) = self.max_curvature_before_failure {
            line("max_curvature_before_failure", format!("{k:e}"));
        }
        if self.scenario.is_dynamic() {
            if self.initiations.is_empty() {
                line("fracture", "no fracture".into());
            }
            for e in &self.initiations {
                line("initiation", format!("interface {} at s = {:e} m, t = {:e} s", e.interface, e.s, e.time));
            }
            for e in &self.failures {
                line("failure", format!("interface {} at s = {:e} m, t = {:e} s", e.interface, e.s, e.time));
            }
        }
        out
    }
}

#[derive(Clone, Debug)]
pub struct RunResult {
    pub history: Vec<HistoryRow>,
    pub snapshots: Vec<Snapshot>,
    pub summary: Summary,
}

/// Builds and runs the benchmark described by `config`.
pub fn run_scenario(config: &ScenarioConfig, options: &RunOptions) -> Result<RunResult> {
    run_problem(&build_scenario(config)?, options)
}

struct Measure {
    load: f64,
    response: f64,
    gauge: f64,
}

fn interface_s(model: &Model, n: usize) -> f64 {
    model.mesh.node_s(model.mesh.interface_nodes(n).0)
}

fn node_point(x: &[f64], node: NodeRef) -> Vec3 {
    let d = node.dofs(crate::mesh::DofKind::Position);
    Vec3::new(x[d[0]], x[d[1]], x[d[2]])
}

/// Relative L2 distance between the centerline and the uniformly bent arc
/// of curvature `kappa`, normalized by the arc's largest displacement.
pub fn centerline_error(model: &Model, x: &[f64], kappa: f64) -> Result<f64> {
    let mesh = &model.mesh;
    let mut breaks = vec![0.0];
    for e in 0..mesh.n_elements() {
        breaks.push(mesh.start(e) + mesh.length(e));
    }
    let failure = std::cell::RefCell::new(None);
    let samples = oracles::CurveSamples::new(
        &breaks,
        5,
        |s| {
            let (e, xi) = mesh.locate(s);
            match interpolate(&mesh.element_dofs(x, e), xi) {
                Ok(k) => k.r,
                Err(err) => {
                    failure.borrow_mut().get_or_insert(err);
                    Vec3::zeros()
                }
            }
        },
        |s| oracles::bent_arc(s, kappa),
    );
    if let Some(err) = failure.into_inner() {
        return Err(err);
    }
    let u_max = breaks
        .iter()
        .chain(&samples.s)
        .map(|&s| (oracles::bent_arc(s, kappa) - mesh.reference_point(s)).norm())
        .fold(0.0, f64::max);
    Ok(oracles::relative_l2_error(&samples, u_max, mesh.total_length()))
}

/// Largest ‖κ‖ at element ends within [0, s_max].
fn max_curvature(model: &Model, x: &[f64], s_max: f64) -> Result<f64> {
    let mesh = &model.mesh;
    let mut k_max: f64 = 0.0;
    for e in 0..mesh.n_elements() {
        if mesh.start(e) > s_max {
            break;
        }
        let dofs = mesh.element_dofs(x, e);
        for xi in [-1.0, 1.0] {
            k_max = k_max.max(interpolate(&dofs, xi)?.kappa.norm());
        }
    }
    Ok(k_max)
}

fn measure(problem: &Problem, stage: usize, x: &[f64], states: &[InterfaceState], t: f64) -> Result<Measure> {
    let model = &problem.stages[stage].model;
    let mesh = &model.mesh;
    let sec = &model.sections[0];
    let cfg = &problem.config;
    let l = &cfg.loading;
    let x_ref = mesh.reference_state();
    let tip = mesh.last_node();
    let tip_disp = node_point(x, tip) - node_point(&x_ref, tip);
    Ok(match cfg.id {
        ScenarioId::CantileverMoment => {
            let m = l.moment.unwrap_or(0.0) * t;
            Measure { load: m, response: tip_disp.norm(), gauge: centerline_error(model, x, m / sec.ei())? }
        }
        ScenarioId::Buckling => {
            let c = build::center_interface(mesh)?;
            let mid = mesh.interface_nodes(c).0;
            let roller = tip.dof(crate::mesh::DofKind::Position, 0);
            let r = crate::assembly::residual(model, x, states, t)?;
            Measure {
                load: l.displacement.unwrap_or(0.0) * t,
                response: x[mid.dof(crate::mesh::DofKind::Position, 1)],
                gauge: -r[roller],
            }
        }
        ScenarioId::Spall => {
            let (e, xi) = mesh.locate(0.25 * cfg.length);
            let eps = interpolate(&mesh.element_dofs(x, e), xi)?.eps;
            let c = mesh.n_elements() / 2;
            let opening = if c >= 1 {
                let (a, b) = mesh.interface_nodes(c - 1);
                (node_point(x, b) - node_point(x, a)).x
            } else {
                0.0
            };
            Measure {
                load: l.sigma_f.unwrap_or(0.0) * t / (2.0 * sec.density * sec.wave_speed()),
                response: opening,
                gauge: sec.youngs_modulus * eps,
            }
        }
        ScenarioId::TransverseFracture => {
            let c = build::center_interface(mesh)?;
            let report = &interface_reports(model, x, states, t)?[c];
            Measure {
                load: l.load_rate.unwrap_or(0.0) * t,
                response: report.mean_f.x,
                gauge: transmitted_moment(model, report, &states[c]),
            }
        }
        ScenarioId::Spaghetti => {
            let m = if stage == 0 { sec.ei() * l.kappa0.unwrap_or(0.0) * t } else { 0.0 };
            Measure { load: m, response: tip_disp.y, gauge: max_curvature(model, x, 0.25 * cfg.length)? }
        }
    })
}

/// Bending moment carried across an interface: the mean bulk moment while
/// the DG coupling holds, the cohesive moment once the crack has initiated.
fn transmitted_moment(model: &Model, report: &InterfaceReport, state: &InterfaceState) -> f64 {
    match (model.fracture, report.jumps) {
        (Some(fr), Some(j)) if state.initiated() => cohesive_tractions(&j, state, &fr.params).1.norm(),
        _ => report.mean_m.norm(),
    }
}

fn snapshot(model: &Model, x: &[f64], step: usize, time: f64) -> Result<Snapshot> {
    let mesh = &model.mesh;
    let mut nodes = Vec::with_capacity(2 * mesh.n_elements());
    for e in 0..mesh.n_elements() {
        let dofs = mesh.element_dofs(x, e);
        let sec = &model.sections[e];
        for (end, xi) in [(End::Start, -1.0), (End::End, 1.0)] {
            let k = interpolate(&dofs, xi)?;
            nodes.push(NodeSample {
                s: mesh.node_s(NodeRef::new(e, end)),
                position: k.r,
                tangent: k.r1,
                strain: k.eps,
                curvature: k.kappa.norm(),
                axial_force: sec.ea() * k.eps,
                moment: sec.ei() * k.kappa.norm(),
            });
        }
    }
    Ok(Snapshot { step, time, nodes })
}

fn record_events(model: &Model, before: &[InterfaceState], after: &[InterfaceState], time: f64, summary: &mut Summary) {
    for (n, (b, a)) in before.iter().zip(after).enumerate() {
        let event = FractureEvent { interface: n, s: interface_s(model, n), time };
        if !b.initiated() && a.initiated() {
            summary.initiations.push(event);
        }
        if !b.failed() && a.failed() {
            summary.failures.push(event);
        }
    }
}

fn counts(states: &[InterfaceState]) -> (usize, usize) {
    (states.iter().filter(|s| s.initiated()).count(), states.iter().filter(|s| s.failed()).count())
}

/// Runs every stage of `problem` in order, handing the final state of one
/// stage to the next with zero velocity.
pub fn run_problem(problem: &Problem, options: &RunOptions) -> Result<RunResult> {
    let mut summary = Summary::new(problem);
    let mut history = Vec::new();
    let mut snapshots = Vec::new();
    let first = &problem.stages[0].model;
    let mut x = first.mesh.reference_state();
    let mut states = first.fresh_states();
    let mut step = 0usize;
    let last_stage = problem.stages.len() - 1;
    for (si, stage) in problem.stages.iter().enumerate() {
        let model = &stage.model;
        match stage.solver {
            StageSolver::QuasiStatic(settings) => {
                let stride = options.snapshot_stride.unwrap_or(1).max(1);
                let shift = if si < last_stage { -1.0 } else { 0.0 };
                let mut prev_states = states.clone();
                let mut observe = |rec: &crate::solvers::StepRecord| -> Result<()> {
                    step += 1;
                    let time = rec.t + shift;
                    record_events(model, &prev_states, rec.states, time, &mut summary);
                    prev_states = rec.states.to_vec();
                    let m = measure(problem, si, rec.x, rec.states, rec.t)?;
                    let e = energies(model, rec.x, rec.states, rec.t)?;
                    let (initiated, failed) = counts(rec.states);
                    history.push(HistoryRow {
                        step,
                        time,
                        load: m.load,
                        response: m.response,
                        gauge: m.gauge,
                        elastic: e.elastic,
                        interface: e.interface,
                        dissipated: rec.states.iter().map(|s| s.dissipated()).sum(),
                        initiated,
                        failed,
                        ..Default::default()
                    });
                    if options.snapshots && (rec.step.is_multiple_of(stride) || rec.step == settings.load_steps) {
                        snapshots.push(snapshot(model, rec.x, step, time)?);
                    }
                    Ok(())
                };
                let out = newton_quasistatic(model, &x, &states, &settings, &mut observe)?;
                summary.newton_iterations += out.total_iterations;
                x = out.x;
                states = out.states;
                summary.final_time = if si < last_stage { 0.0 } else { 1.0 };
            }
            StageSolver::Explicit { dt, dt_c, t_end } => {
                summary.dt = Some(dt);
                summary.dt_c = Some(dt_c);
                let stride = options.snapshot_stride.unwrap_or(100).max(1);
                let mut integ = ExplicitIntegrator::new(model, states.clone());
                let v0 = vec![0.0; model.n_dofs()];
                let mut s = integ.start(x.clone(), v0, 0.0, dt)?;
                let n_steps = ((t_end / dt) - 1e-9).ceil().max(1.0) as usize;
                let every = n_steps.div_ceil(MAX_DYNAMIC_ROWS).max(1);
                let mut prev_states = integ.states.clone();
                for k in 1..=n_steps {
                    integ.step(&mut s)?;
                    step += 1;
                    record_events(model, &prev_states, &integ.states, s.t, &mut summary);
                    prev_states.clone_from(&integ.states);
                    let m = measure(problem, si, &s.x, &integ.states, s.t)?;
                    if problem.config.id == ScenarioId::Spaghetti && summary.failures.is_empty() {
                        let k_max = summary.max_curvature_before_failure.unwrap_or(0.0);
                        summary.max_curvature_before_failure = Some(k_max.max(m.gauge));
                    }
                    summary.peak_gauge = Some(summary.peak_gauge.unwrap_or(f64::NEG_INFINITY).max(m.gauge));
                    if k % every == 0 || k == n_steps {
                        let e: EnergyReport = integ.energy(&s)?;
                        let (initiated, failed) = counts(&integ.states);
                        history.push(HistoryRow {
                            step,
                            time: s.t,
                            load: m.load,
                            response: m.response,
                            gauge: m.gauge,
                            kinetic: e.kinetic,
                            elastic: e.elastic,
                            interface: e.interface,
                            dissipated: e.dissipated,
                            external_work: e.external_work,
                            initiated,
                            failed,
                        });
                    }
                    if options.snapshots && (k % stride == 0 || k == n_steps) {
                        snapshots.push(snapshot(model, &s.x, step, s.t)?);
                    }
                }
                x = s.x;
                states = integ.states.clone();
                summary.final_time = s.t;
            }
        }
    }
    summary.steps = step;
    finish_summary(problem, &history, &mut summary);
    Ok(RunResult { history, snapshots, summary })
}

/// Critical load read off a force–shortening curve: the force at the first
/// increment whose stiffness falls below `ratio` times the initial one.
/// Returns the row index and the force.
pub fn detect_critical_load(shortening: &[f64], force: &[f64], ratio: f64) -> Option<(usize, f64)> {
    if shortening.len() < 2 || shortening.len() != force.len() || shortening[0] == 0.0 {
        return None;
    }
    let k0 = force[0] / shortening[0];
    (1..force.len())
        .find(|&i| (force[i] - force[i - 1]) / (shortening[i] - shortening[i - 1]) < ratio * k0)
        .map(|i| (i, force[i]))
}

fn finish_summary(problem: &Problem, history: &[HistoryRow], summary: &mut Summary) {
    let cfg = &problem.config;
    match cfg.id {
        ScenarioId::CantileverMoment => {
            summary.centerline_error = history.last().map(|r| r.gauge);
        }
        ScenarioId::Buckling => {
            let d: Vec<f64> = history.iter().map(|r| r.load).collect();
            let f: Vec<f64> = history.iter().map(|r| r.gauge).collect();
            summary.critical_load_reference = Some(oracles::buckling_load(cfg.youngs_modulus, cfg.radius, cfg.length));
            if let Some((i, fc)) = detect_critical_load(&d, &f, 0.1) {
                summary.critical_load = Some(fc);
                let tail = &f[i..];
                summary.post_buckling_range = Some((
                    tail.iter().cloned().fold(f64::INFINITY, f64::min),
                    tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
                ));
            }
        }
        _ => {
            if summary.peak_gauge.is_none() {
                summary.peak_gauge = history.iter().map(|r| r.gauge).reduce(f64::max);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::config::parse_config_str;

    #[test]
    fn critical_load_on_a_kinked_curve() {
        let d: Vec<f64> = (1..=100).map(|i| i as f64).collect();
        let f: Vec<f64> = d.iter().map(|&x| if x <= 40.0 { 10.0 * x } else { 400.0 + 0.01 * (x - 40.0) }).collect();
        let (i, fc) = detect_critical_load(&d, &f, 0.1).unwrap();
        assert_eq!(i, 40);
        assert!((fc - 400.01).abs() < 1e-9);
        assert!(detect_critical_load(&d[..1], &f[..1], 0.1).is_none());
        let linear: Vec<f64> = d.iter().map(|x| 3.0 * x).collect();
        assert!(detect_critical_load(&d, &linear, 0.1).is_none());
    }

    #[test]
    fn interpolated_arc_matches_and_straight_beam_does_not() {
        let cfg = parse_config_str(
            "[scenario]\nid = cantilever_moment\n[geometry]\nlength = 1\nradius = 0.01\n\
             [material]\nyoungs_modulus = 200e9\n[penalty]\nbeta_p = 10\nbeta_t = 10\n\
             [mesh]\nh = 0.125\n[solver]\nload_steps = 2\n[loading]\nmoment = 1\n",
        )
        .unwrap();
        let p = build_scenario(&cfg).unwrap();
        let m = &p.stages[0].model;
        let kappa = 1.0;
        let mut x = m.mesh.reference_state();
        let tangent = |s: f64| Vec3::new((kappa * s).cos(), (kappa * s).sin(), 0.0);
        for e in 0..m.mesh.n_elements() {
            let (a, b) = (m.mesh.start(e), m.mesh.start(e) + m.mesh.length(e));
            let vals = [oracles::bent_arc(a, kappa), tangent(a), oracles::bent_arc(b, kappa), tangent(b)];
            let slots = &mut x[m.mesh.element_range(e)];
            for (k, v) in vals.iter().enumerate() {
                slots[3 * k..3 * k + 3].copy_from_slice(v.as_slice());
            }
        }
        // cubic Hermite interpolation of a circle: error far below the deflection
        let e = centerline_error(m, &x, kappa).unwrap();
        assert!(e < 1e-4, "{e}");
        let straight = centerline_error(m, &m.mesh.reference_state(), kappa).unwrap();
        assert!(straight > 0.1, "{straight}");
    }

    #[test]
    fn odd_element_counts_are_rejected_where_a_center_interface_is_needed() {
        let cfg = parse_config_str(
            "[scenario]\nid = buckling\n[geometry]\nlength = 10\nradius = 0.1\n\
             [material]\nyoungs_modulus = 200e9\n[penalty]\nbeta_p = 10\nbeta_t = 10\n\
             [mesh]\nh = 2\n[solver]\nload_steps = 10\n[loading]\ndisplacement = 5e-3\nperturbation = 1\n",
        )
        .unwrap();
        let err = build_scenario(&cfg).unwrap_err().to_string();
        assert!(err.contains("even number of elements"), "{err}");
    }
}
