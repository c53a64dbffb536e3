//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Criteria listed in `KNOWN_FAILURES` are reported but do not fail the
//! target; set `ACCEPTANCE_STRICT=1` to make every FAIL fatal. A known failure
//! that starts passing is also fatal, so the list stays current.

use std::f64::consts::PI;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use beamfrac_core::assembly::{assemble_stiffness, residual, Fracture, Model, PenaltyParams};
use beamfrac_core::beam::{MaterialSection, Vec3};
use beamfrac_core::cohesive::{CohesiveParams, InitiationMode};
use beamfrac_core::io::config::parse_config;
use beamfrac_core::loads::{EndMoment, LoadSpec, PointForce, Program};
use beamfrac_core::mesh::{BeamMesh, DofKind};
use beamfrac_core::scenarios::oracles::{buckling_load, spall_stress};
use beamfrac_core::scenarios::{
    build, converge, run_scenario, HistoryRow, LoadingConfig, RunOptions, RunResult, ScenarioConfig, SolverConfig,
    DEFAULT_BETAS, DEFAULT_LEVELS,
};
use beamfrac_core::solvers::{stable_timestep, ExplicitIntegrator};
use nalgebra::{DMatrix, Rotation3};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const KNOWN_FAILURES: [usize; 2] = [1, 3];

// criterion 1
const CANTILEVER_MIN_ORDER: f64 = 3.0;
const CANTILEVER_MAX_ERROR: f64 = 0.01;
// criterion 2
const BUCKLING_LOAD_TOL: f64 = 0.02;
const PLATEAU_TOL: f64 = 0.05;
// criterion 3
const SPALL_AMPLITUDE_TOL: f64 = 0.02;
const SPALL_ARRIVAL_TOL: f64 = 0.01;
const SPALL_INITIATION_TOL: f64 = 0.02;
const SPALL_SETTLED: f64 = 0.02;
/// Desk-scale spall meshes and step.
const SPALL_H_ELASTIC: f64 = 1e-3;
const SPALL_H_FRACTURE: f64 = 2e-4;
const SPALL_DT: f64 = 1e-9;
const SPALL_T_END: f64 = 14e-6;
// criterion 4
const TRANSVERSE_PEAK: (f64, f64) = (0.7, 0.9);
const TRANSVERSE_RESIDUAL_MOMENT: f64 = 0.01;
const ABLATION_MATCH: f64 = 1e-3;
/// Desk-scale transverse run: coarser mesh, faster push, shorter window.
const TRANSVERSE_H: f64 = 5e-3;
const TRANSVERSE_RATE: f64 = 0.1;
const TRANSVERSE_T_END: f64 = 0.02;
// criterion 6
const FD_TOL: f64 = 1e-6;
const DISSIPATION_TOL: f64 = 0.02;
const DRIFT_TOL: f64 = 0.01;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn config(name: &str) -> ScenarioConfig {
    parse_config(&Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)).unwrap()
}

fn run(cfg: &ScenarioConfig) -> RunResult {
    run_scenario(cfg, &RunOptions { snapshots: false, ..Default::default() }).unwrap()
}

fn cantilever() -> Outcome {
    let rows = converge(&config("cantilever_moment.cfg"), DEFAULT_LEVELS, &DEFAULT_BETAS).unwrap();
    let mut pass = true;
    let mut notes = vec![];
    for beta in DEFAULT_BETAS {
        let cells: Vec<_> = rows.iter().filter(|r| r.beta == beta).collect();
        let monotone = cells.windows(2).all(|w| w[1].error < w[0].error);
        let worst = cells.iter().map(|r| r.error).fold(0.0, f64::max);
        let order = cells.last().and_then(|r| r.observed_order).unwrap_or(f64::NAN);
        pass &= monotone && worst < CANTILEVER_MAX_ERROR;
        if beta == 1000.0 {
            pass &= order >= CANTILEVER_MIN_ORDER;
        }
        notes.push(format!("beta {beta}: max error {worst:.2e}, finest order {order:.2}, monotone {monotone}"));
    }
    outcome(pass, notes.join("; "))
}

fn buckling() -> Outcome {
    let cfg = config("buckling.cfg");
    let r = run(&cfg);
    let reference = buckling_load(cfg.youngs_modulus, cfg.radius, cfg.length);
    let Some(fc) = r.summary.critical_load else {
        return outcome(false, "no critical load detected");
    };
    let err = (fc - reference).abs() / reference;
    let after: Vec<&HistoryRow> = r.history.iter().filter(|h| h.gauge >= fc * (1.0 - 1e-12)).collect();
    let plateau = after.iter().map(|h| (h.gauge - reference).abs() / reference).fold(0.0, f64::max);
    let w0 = after.first().map_or(0.0, |h| h.response.abs());
    let w1 = after.last().map_or(0.0, |h| h.response.abs());
    let pass = err < BUCKLING_LOAD_TOL && plateau < PLATEAU_TOL && w1 > 2.0 * w0;
    outcome(
        pass,
        format!(
            "f_cr {fc:.5e} N vs {reference:.5e} N ({:.2}%), plateau within {:.2}%, deflection {w0:.2e} -> {w1:.2e} m",
            100.0 * err,
            100.0 * plateau
        ),
    )
}

fn spall_run(sigma_f: f64, h: f64) -> (ScenarioConfig, RunResult) {
    let c = config("spall.cfg");
    let cfg = ScenarioConfig {
        mesh_size: h,
        solver: SolverConfig { dt: Some(SPALL_DT), t_end: Some(SPALL_T_END), ..c.solver },
        loading: LoadingConfig { sigma_f: Some(sigma_f), ..c.loading },
        ..c
    };
    let r = run(&cfg);
    (cfg, r)
}

fn mean(rows: &[&HistoryRow], sigma_f: f64) -> f64 {
    rows.iter().map(|h| h.gauge / sigma_f).sum::<f64>() / rows.len().max(1) as f64
}

fn spall() -> Outcome {
    let sigma_c = config("spall.cfg").cohesive.unwrap().sigma_c;
    let (elastic, fracture) = std::thread::scope(|s| {
        let a = s.spawn(|| spall_run(0.1 * sigma_c, SPALL_H_ELASTIC));
        let b = s.spawn(|| spall_run(sigma_c, SPALL_H_FRACTURE));
        (a.join().unwrap(), b.join().unwrap())
    });

    // below the strength: d'Alembert waves, no initiation
    let (cfg, r) = elastic;
    let sec = build::section(&cfg).unwrap();
    let c = sec.wave_speed();
    let sigma_f = cfg.loading.sigma_f.unwrap();
    let gauge = 0.25 * cfg.length;
    let t_near = gauge / c;
    let arrival = r.history.iter().find(|h| h.gauge / sigma_f >= 0.25).map_or(f64::NAN, |h| h.time);
    let arrival_err = (arrival - t_near).abs() / t_near;
    let window: Vec<&HistoryRow> =
        r.history.iter().filter(|h| h.time > 1.5 * t_near && h.time < 2.8 * t_near).collect();
    let expected = spall_stress(2.0 * t_near, gauge, cfg.length, c, false).unwrap();
    let amplitude_err = (mean(&window, sigma_f) - expected).abs() / expected;
    let low_initiations = r.summary.initiations.len();
    let quiet = low_initiations == 0;
    let low_pass = arrival_err < SPALL_ARRIVAL_TOL && amplitude_err < SPALL_AMPLITUDE_TOL && quiet;

    // at the strength: one crack at mid-length at T_{L/2}, release wave
    let (cfg, r) = fracture;
    let mesh = BeamMesh::uniform(cfg.length, cfg.element_count()).unwrap();
    let center = build::center_interface(&mesh).unwrap();
    let t_half = cfg.length / (2.0 * c);
    let center_time = r.summary.initiations.iter().find(|e| e.interface == center).map(|e| e.time);
    let init_err = center_time.map_or(f64::INFINITY, |t| (t - t_half).abs() / t_half);
    let count = r.summary.initiations.len();
    let release = t_half + (cfg.length - 2.0 * gauge) / (2.0 * c);
    let settled: Vec<&HistoryRow> = r.history.iter().filter(|h| h.time > release + 0.1 * t_half).collect();
    let residual = mean(&settled, sigma_c).abs();
    let high_pass = count == 1 && init_err < SPALL_INITIATION_TOL && residual < SPALL_SETTLED;

    outcome(
        low_pass && high_pass,
        format!(
            "0.1 sigma_c: arrival error {:.2}%, amplitude error {:.2}%, initiations {}; sigma_c: center initiates {:+.2}% from T_L/2, {count} interface(s) initiate, settled stress {:.2}% of sigma_f",
            100.0 * arrival_err,
            100.0 * amplitude_err,
            low_initiations,
            100.0 * center_time.map_or(f64::NAN, |t| (t - t_half) / t_half),
            100.0 * residual,
        ),
    )
}

fn transverse() -> Outcome {
    let c = config("transverse_fracture.cfg");
    let full = ScenarioConfig {
        mesh_size: TRANSVERSE_H,
        solver: SolverConfig { t_end: Some(TRANSVERSE_T_END), ..c.solver },
        loading: LoadingConfig { load_rate: Some(TRANSVERSE_RATE), ..c.loading },
        ..c
    };
    let cohesive = full.cohesive.unwrap();
    let axial = ScenarioConfig {
        cohesive: Some(beamfrac_core::scenarios::CohesiveConfig { bending_initiation: false, ..cohesive }),
        ..full
    };
    let pure = ScenarioConfig { cohesive: None, ..full };
    let [rf, ra, rp] = std::thread::scope(|s| {
        let hs = [full, axial, pure].map(|cfg| s.spawn(move || run(&cfg)));
        hs.map(|h| h.join().unwrap())
    });
    let sec = build::section(&full).unwrap();
    let m_cr = sec.area * full.radius * cohesive.sigma_c;
    let mesh = BeamMesh::uniform(full.length, full.element_count()).unwrap();
    let center = build::center_interface(&mesh).unwrap();

    let failed = rf.summary.failures.iter().find(|e| e.interface == center).map(|e| e.time);
    let peak = rf.history.iter().filter(|h| h.initiated == 0).map(|h| h.gauge).fold(0.0, f64::max) / m_cr;
    let last = rf.history.last().unwrap().gauge / m_cr;
    let full_pass =
        failed.is_some() && peak > TRANSVERSE_PEAK.0 && peak < TRANSVERSE_PEAK.1 && last < TRANSVERSE_RESIDUAL_MOMENT;

    let scale = rp.history.iter().map(|h| h.gauge.abs()).fold(0.0, f64::max);
    let gap = ra.history.iter().zip(&rp.history).map(|(a, b)| (a.gauge - b.gauge).abs()).fold(0.0, f64::max) / scale;
    let ablation_pass =
        ra.summary.initiations.is_empty() && ra.history.len() == rp.history.len() && gap < ABLATION_MATCH;

    outcome(
        full_pass && ablation_pass,
        format!(
            "full: center fails at {}, peak {peak:.3} m_cr, final {last:.1e} m_cr; axial-only: {} initiation(s), gap to pure DG {gap:.1e}, peak {:.3} m_cr",
            failed.map_or("never".to_string(), |t| format!("{t:.4e} s")),
            ra.summary.initiations.len(),
            scale / m_cr,
        ),
    )
}

fn spaghetti() -> Outcome {
    let cfg = config("spaghetti.cfg");
    let kappa0 = cfg.loading.kappa0.unwrap();
    let r = run(&cfg);
    let k = r.summary.max_curvature_before_failure.unwrap_or(0.0);
    let first = r.summary.failures.first().map(|e| e.time);
    let pass = k > kappa0 && first.is_some_and(|t| t <= cfg.solver.t_end.unwrap());
    outcome(
        pass,
        format!(
            "peak curvature near the clamp before failure {k:.2} 1/m = {:.2} kappa0; first failure {}",
            k / kappa0,
            first.map_or("none".to_string(), |t| format!("at {t:.3e} s")),
        ),
    )
}

// ---------- property suite ----------

fn spaghetti_section() -> MaterialSection {
    MaterialSection::circular(5.5e9, 1400.0, 0.57e-3).unwrap()
}

fn cantilever_model(n: usize, beta: f64) -> Model {
    let mesh = BeamMesh::uniform(0.05, n).unwrap();
    let mut loads = LoadSpec::default();
    loads.clamp(mesh.first_node(), 0);
    loads.end_moments.push(EndMoment {
        node: mesh.last_node(),
        moment: Vec3::new(0.0, 0.01, 0.02),
        program: Program::ramp(),
    });
    loads.point_forces.push(PointForce {
        node: mesh.last_node(),
        force: Vec3::new(0.5, -1.0, 0.2),
        program: Program::ramp(),
    });
    Model::new(mesh, spaghetti_section(), PenaltyParams::new(beta, beta).unwrap(), None, loads).unwrap()
}

fn free_model(n: usize, beta: f64, fracture: Option<Fracture>) -> Model {
    let mesh = BeamMesh::uniform(0.05, n).unwrap();
    Model::new(mesh, spaghetti_section(), PenaltyParams::new(beta, beta).unwrap(), fracture, LoadSpec::default())
        .unwrap()
}

fn random_state(m: &Model, rng: &mut StdRng, amp: f64) -> Vec<f64> {
    let h = m.mesh.length(0);
    let mut x = m.mesh.reference_state();
    for (i, v) in x.iter_mut().enumerate() {
        let scale = if (i / 3) % 2 == 0 { h } else { 1.0 };
        *v += amp * scale * rng.random_range(-1.0..1.0);
    }
    x
}

fn fd_error(m: &Model, x: &[f64]) -> f64 {
    let states = m.fresh_states();
    let k = assemble_stiffness(m, x, &states, 1.0).unwrap().to_dense();
    let n = x.len();
    let h = m.mesh.length(0);
    let mut fd = DMatrix::zeros(n, n);
    for j in 0..n {
        let step = 1e-7 * if (j / 3) % 2 == 0 { h } else { 1.0 };
        let (mut a, mut b) = (x.to_vec(), x.to_vec());
        a[j] += step;
        b[j] -= step;
        let (ra, rb) = (residual(m, &a, &states, 1.0).unwrap(), residual(m, &b, &states, 1.0).unwrap());
        for i in 0..n {
            fd[(i, j)] = (ra[i] - rb[i]) / (2.0 * step);
        }
    }
    (k - &fd).norm() / fd.norm()
}

fn transform(x: &[f64], q: &Rotation3<f64>, shift: Vec3) -> Vec<f64> {
    let mut y = x.to_vec();
    for (b, chunk) in y.chunks_mut(3).enumerate() {
        let v = q * Vec3::new(chunk[0], chunk[1], chunk[2]) + if b % 2 == 0 { shift } else { Vec3::zeros() };
        chunk.copy_from_slice(v.as_slice());
    }
    y
}

fn inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, a| m.max(a.abs()))
}

fn dissipation_error() -> f64 {
    let sec = MaterialSection::circular(260e9, 3690.0, 1e-3).unwrap();
    let params = CohesiveParams::new(400e6, 100.0, 1.0, sec.area, sec.radius).unwrap();
    let mesh = BeamMesh::uniform(2e-3, 2).unwrap();
    let mut loads = LoadSpec::default();
    loads.fix(mesh.first_node(), DofKind::Position, &[0, 1, 2]);
    loads.fix(mesh.last_node(), DofKind::Position, &[1, 2]);
    loads.prescribe(mesh.last_node(), DofKind::Position, 0, Program::Linear(1.0));
    let fracture = Fracture { params, mode: InitiationMode::Mixed };
    let m = Model::new(mesh, sec, PenaltyParams::new(10.0, 10.0).unwrap(), Some(fracture), loads).unwrap();
    let dt = 0.4 * stable_timestep(&m, &m.mesh.reference_state()).unwrap().dt_c;
    let mut integ = ExplicitIntegrator::new(&m, m.fresh_states());
    let mut s = integ.start(m.mesh.reference_state(), vec![0.0; m.n_dofs()], 0.0, dt).unwrap();
    while !integ.states[0].failed() && s.t < 1e-4 {
        integ.step(&mut s).unwrap();
    }
    let g = params.g_c * sec.area;
    (integ.states[0].dissipated() - g).abs() / g
}

fn energy_drift() -> f64 {
    let m = free_model(6, 10.0, None);
    let (len, n) = (0.05, 6);
    let h = len / n as f64;
    let k = PI / len;
    let mut v0 = vec![0.0; m.n_dofs()];
    for e in 0..n {
        for slot in 0..4 {
            let s = (e as f64 + (slot / 2) as f64) * h;
            let base = 12 * e + 3 * slot;
            if slot % 2 == 0 {
                v0[base] = 0.03 * (k * s).cos();
                v0[base + 1] = 0.1 * (k * s).sin();
            } else {
                v0[base] = -0.03 * k * (k * s).sin();
                v0[base + 1] = 0.1 * k * (k * s).cos();
            }
        }
    }
    let est = stable_timestep(&m, &m.mesh.reference_state()).unwrap();
    let mut integ = ExplicitIntegrator::new(&m, m.fresh_states());
    let mut s = integ.start(m.mesh.reference_state(), v0, 0.0, 0.5 * est.dt_c).unwrap();
    let e0 = integ.energy(&s).unwrap().mechanical();
    let mut worst: f64 = 0.0;
    for step in 0..10_000 {
        integ.step(&mut s).unwrap();
        if step % 50 == 0 {
            worst = worst.max((integ.energy(&s).unwrap().mechanical() - e0).abs() / e0);
        }
    }
    worst
}

fn properties() -> Outcome {
    let mut rng = StdRng::seed_from_u64(2024);
    let mut notes = vec![];

    let m = cantilever_model(4, 10.0);
    let fd = (0..10).map(|_| fd_error(&m, &random_state(&m, &mut rng, 0.05))).fold(0.0, f64::max);
    notes.push(format!("stiffness vs FD {fd:.1e}"));

    let free = free_model(4, 10.0, None);
    let states = free.fresh_states();
    let ea = free.sections[0].ea();
    let q = Rotation3::from_scaled_axis(Vec3::new(1.0, 2.0, -0.5).normalize() * 0.9);
    let shift = Vec3::new(0.3, -0.1, 2.0);
    let rigid = inf(&residual(&free, &transform(&free.mesh.reference_state(), &q, shift), &states, 0.0).unwrap()) / ea;
    let x = random_state(&free, &mut rng, 0.05);
    let r = residual(&free, &x, &states, 0.0).unwrap();
    let rq = residual(&free, &transform(&x, &q, shift), &states, 0.0).unwrap();
    let objectivity =
        inf(&rq.iter().zip(transform(&r, &q, Vec3::zeros())).map(|(a, b)| a - b).collect::<Vec<_>>()) / inf(&r);
    notes.push(format!("rigid-body force {rigid:.1e} EA, objectivity {objectivity:.1e}"));

    let diss = dissipation_error();
    notes.push(format!("dissipation vs G_c A {:.2}%", 100.0 * diss));

    let drift = energy_drift();
    notes.push(format!("energy drift {:.3}%", 100.0 * drift));

    let dts: Vec<f64> = [10.0, 100.0, 1000.0]
        .iter()
        .map(|&b| {
            let m = free_model(8, b, None);
            stable_timestep(&m, &m.mesh.reference_state()).unwrap().dt_c
        })
        .collect();
    let monotone = dts.windows(2).all(|w| w[1] < w[0]);
    notes.push(format!("dt_c over beta {:.2e} {:.2e} {:.2e}", dts[0], dts[1], dts[2]));

    let pass =
        fd < FD_TOL && rigid < 1e-12 && objectivity < 1e-9 && diss < DISSIPATION_TOL && drift < DRIFT_TOL && monotone;
    outcome(pass, notes.join(", "))
}

type Criterion = (usize, &'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let strict = std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    let criteria: [Criterion; 6] = [
        (1, "cantilever convergence", cantilever),
        (2, "buckling", buckling),
        (3, "spall", spall),
        (4, "transverse fracture ablation", transverse),
        (5, "spaghetti", spaghetti),
        (6, "property suite", properties),
    ];
    let results: Vec<(Outcome, f64)> = std::thread::scope(|s| {
        let handles: Vec<_> = criteria
            .iter()
            .map(|&(_, _, f)| {
                s.spawn(move || {
                    let t = Instant::now();
                    (f(), t.elapsed().as_secs_f64())
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("criterion panicked")).collect()
    });
    let mut ok = true;
    for ((n, name, _), (o, secs)) in criteria.iter().zip(&results) {
        let known = KNOWN_FAILURES.contains(n);
        let tag = match (o.pass, known) {
            (true, false) => "PASS",
            (false, true) => "FAIL (known)",
            (false, false) => "FAIL",
            (true, true) => "PASS (listed as known failure)",
        };
        println!("criterion {n} {name}: {tag} [{secs:.0} s] {}", o.detail);
        ok &= if strict { o.pass } else { o.pass != known };
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
