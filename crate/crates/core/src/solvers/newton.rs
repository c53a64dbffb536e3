//! Quasi-static Newton–Raphson continuation over a pseudo-time ramp.

use std::collections::BTreeMap;

use crate::assembly::{assemble_external, assemble_system, update_interface_states, Model};
use crate::cohesive::InterfaceState;
use crate::error::{Error, Result};
use crate::linalg::BandMatrix;
use crate::loads::Program;
use crate::mesh::{DofKind, End, NodeRef};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NewtonSettings {
    pub load_steps: usize,
    pub tol_rel: f64,
    /// Absolute residual tolerance (N).
    pub tol_abs: f64,
    pub max_iters: usize,
    /// When set, every converged state is checked for a negative tangent
    /// eigenvalue and, if one is found, pushed along its mode by this
    /// fraction of the shortest element and re-solved. Lets a ramp leave an
    /// unstable branch past a bifurcation.
    pub branch_switch: Option<f64>,
}

impl NewtonSettings {
    /// Default tolerances scaled by the axial stiffness `ea` (N).
    pub fn with_steps(load_steps: usize, ea: f64) -> Self {
        NewtonSettings { load_steps, tol_rel: 1e-8, tol_abs: 1e-10 * ea, max_iters: 50, branch_switch: None }
    }

    pub fn validate(&self) -> Result<()> {
        if self.load_steps == 0 || self.max_iters == 0 {
            return Err(Error::Domain("load_steps and max_iters must be at least 1".into()));
        }
        if !(self.tol_rel > 0.0 && self.tol_abs > 0.0) {
            return Err(Error::Domain("Newton tolerances must be positive".into()));
        }
        if let Some(a) = self.branch_switch {
            if !(a > 0.0 && a.is_finite()) {
                return Err(Error::Domain(format!("branch switch amplitude must be positive, got {a}")));
            }
        }
        Ok(())
    }
}

/// One converged load step.
#[derive(Clone, Debug)]
pub struct StepRecord<'a> {
    pub step: usize,
    /// Load parameter in (0, 1].
    pub t: f64,
    pub x: &'a [f64],
    pub states: &'a [InterfaceState],
    /// Reaction force at every Dirichlet DOF.
    pub reactions: &'a BTreeMap<usize, f64>,
    pub iterations: usize,
    pub residual_norm: f64,
}

#[derive(Clone, Debug)]
pub struct QuasiStaticResult {
    pub x: Vec<f64>,
    pub states: Vec<InterfaceState>,
    pub reactions: BTreeMap<usize, f64>,
    pub total_iterations: usize,
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, a| m.max(a.abs()))
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

const STALL: f64 = 1e-11;
const MAX_SWITCHES: usize = 3;
const INVERSE_ITERATIONS: usize = 30;

/// Largest position component of a mode.
fn position_peak(model: &Model, v: &[f64]) -> f64 {
    (0..model.mesh.n_elements())
        .flat_map(|e| {
            let n0 = NodeRef::new(e, End::Start).dofs(DofKind::Position);
            let n1 = NodeRef::new(e, End::End).dofs(DofKind::Position);
            n0.into_iter().chain(n1)
        })
        .map(|d| v[d].abs())
        .fold(0.0, f64::max)
}

/// Smallest-magnitude eigenpair of the free block of `k` by inverse
/// iteration. Returns the mode, oriented with `load`, when its eigenvalue is
/// negative.
fn unstable_mode(k: &BandMatrix, fixed: &BTreeMap<usize, Program>, load: &[f64]) -> Result<Option<Vec<f64>>> {
    let lu = k.clone().lu()?;
    let free = |v: &mut Vec<f64>| {
        for &d in fixed.keys() {
            v[d] = 0.0;
        }
    };
    let mut v: Vec<f64> = load.to_vec();
    free(&mut v);
    if norm(&v) == 0.0 {
        v = (0..v.len()).map(|i| 1.0 + (i % 7) as f64).collect();
        free(&mut v);
    }
    for _ in 0..INVERSE_ITERATIONS {
        lu.solve_in_place(&mut v);
        free(&mut v);
        let n = norm(&v);
        if !n.is_finite() || n == 0.0 {
            return Ok(None);
        }
        v.iter_mut().for_each(|a| *a /= n);
    }
    let kv = k.mul_vec(&v);
    let lambda: f64 = kv.iter().zip(&v).map(|(a, b)| a * b).sum();
    if lambda >= 0.0 {
        return Ok(None);
    }
    if v.iter().zip(load).map(|(a, b)| a * b).sum::<f64>() < 0.0 {
        v.iter_mut().for_each(|a| *a = -*a);
    }
    Ok(Some(v))
}

/// Ramps the loads of `model` from t = 0 to t = 1 in `settings.load_steps`
/// increments, calling `observe` after each converged step.
pub fn newton_quasistatic<F>(
    model: &Model,
    x0: &[f64],
    states0: &[InterfaceState],
    settings: &NewtonSettings,
    mut observe: F,
) -> Result<QuasiStaticResult>
where
    F: FnMut(&StepRecord) -> Result<()>,
{
    settings.validate()?;
    let x_ref = model.mesh.reference_state();
    let fixed = model.loads.dirichlet_map();
    let mut x = x0.to_vec();
    let mut states = states0.to_vec();
    let mut reactions = BTreeMap::new();
    let mut total_iterations = 0;
    let h_min = model.mesh.lengths().iter().copied().fold(f64::INFINITY, f64::min);
    let mut x_prev: Option<Vec<f64>> = None;
    for step in 1..=settings.load_steps {
        let t = step as f64 / settings.load_steps as f64;
        // secant predictor from the last two converged states
        let converged = x.clone();
        if let Some(prev) = &x_prev {
            for (xi, (a, b)) in x.iter_mut().zip(converged.iter().zip(prev)) {
                *xi += a - b;
            }
        }
        x_prev = Some(converged);
        for (&d, p) in &fixed {
            x[d] = x_ref[d] + p.value(t);
        }
        let f_ext = assemble_external(model, &x, t)?;
        let free_norm = |r: &[f64]| {
            norm(&r.iter().enumerate().filter(|(i, _)| !fixed.contains_key(i)).map(|(_, v)| *v).collect::<Vec<_>>())
        };
        let tol = settings.tol_abs.max(settings.tol_rel * free_norm(&f_ext));
        let mut iterations = 0;
        let mut switches = 0;
        let mut stalled = false;
        let residual_norm = loop {
            let sys = assemble_system(model, &x, &states, t)?;
            let mut r = sys.residual;
            let rn = free_norm(&r);
            let mut k = sys.tangent;
            for &d in fixed.keys() {
                k.eliminate_dof(d);
            }
            if rn < tol || stalled {
                let unstable = match settings.branch_switch {
                    Some(amp) if switches < MAX_SWITCHES => unstable_mode(&k, &fixed, &f_ext)?.map(|v| (amp, v)),
                    _ => None,
                };
                match unstable {
                    Some((amp, v)) => {
                        let scale = amp * h_min / position_peak(model, &v);
                        for (xi, vi) in x.iter_mut().zip(&v) {
                            *xi += scale * vi;
                        }
                        switches += 1;
                        stalled = false;
                        continue;
                    }
                    None => {
                        reactions = fixed.keys().map(|&d| (d, r[d])).collect();
                        break rn;
                    }
                }
            }
            if !rn.is_finite() || iterations == settings.max_iters {
                return Err(Error::StepFailure { step, iterations, residual: rn });
            }
            for &d in fixed.keys() {
                r[d] = 0.0;
            }
            let lu = k.lu().map_err(|_| Error::StepFailure { step, iterations, residual: rn })?;
            lu.solve_in_place(&mut r);
            for (xi, dx) in x.iter_mut().zip(&r) {
                *xi -= dx;
            }
            iterations += 1;
            // a correction at roundoff level means the residual cannot drop further
            stalled = inf_norm(&r) <= STALL * inf_norm(&x);
        };
        total_iterations += iterations;
        states = update_interface_states(model, &x, &states, t)?;
        observe(&StepRecord { step, t, x: &x, states: &states, reactions: &reactions, iterations, residual_norm })?;
    }
    Ok(QuasiStaticResult { x, states, reactions, total_iterations })
}
