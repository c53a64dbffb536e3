//! Global assembly over the discontinuous element chain.

pub mod bulk;
pub mod external;
pub mod interface;
pub mod mass;

use std::sync::OnceLock;

use rayon::prelude::*;

use crate::beam::{MaterialSection, Vec3, DEFAULT_DEGENERACY_FLOOR};
use crate::cohesive::{update_state, CohesiveParams, InitiationMode, InterfaceJumps, InterfaceState};
use crate::error::{Error, Result};
use crate::linalg::BandMatrix;
use crate::loads::LoadSpec;
use crate::mesh::{BeamMesh, BANDWIDTH};
use crate::quadrature::GaussRule;

pub use external::assemble_external;
pub use mass::assemble_mass;

use interface::{InterfaceContext, InterfaceEval};

/// Interior-penalty parameters for position and tangent jumps.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PenaltyParams {
    pub beta_p: f64,
    pub beta_t: f64,
}

impl PenaltyParams {
    pub fn new(beta_p: f64, beta_t: f64) -> Result<Self> {
        if !(beta_p > 1.0) {
            return Err(Error::Domain(format!("beta_p must exceed 1, got {beta_p}")));
        }
        if !(beta_t > 1.0) {
            return Err(Error::Domain(format!("beta_t must exceed 1, got {beta_t}")));
        }
        Ok(PenaltyParams { beta_p, beta_t })
    }
}

/// Cohesive law active at every interior interface.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Fracture {
    pub params: CohesiveParams,
    pub mode: InitiationMode,
}

/// Everything needed to evaluate forces for a given DOF vector.
#[derive(Clone, Debug)]
pub struct Model {
    pub mesh: BeamMesh,
    pub sections: Vec<MaterialSection>,
    pub penalty: PenaltyParams,
    pub fracture: Option<Fracture>,
    pub loads: LoadSpec,
    /// Lower bound on |r'| before an element counts as degenerate.
    pub floor: f64,
}

impl Model {
    pub fn new(
        mesh: BeamMesh,
        section: MaterialSection,
        penalty: PenaltyParams,
        fracture: Option<Fracture>,
        loads: LoadSpec,
    ) -> Result<Self> {
        loads.validate(&mesh)?;
        Ok(Model {
            sections: vec![section; mesh.n_elements()],
            mesh,
            penalty,
            fracture,
            loads,
            floor: DEFAULT_DEGENERACY_FLOOR,
        })
    }

    pub fn n_dofs(&self) -> usize {
        self.mesh.n_dofs()
    }

    pub fn fresh_states(&self) -> Vec<InterfaceState> {
        vec![InterfaceState::default(); self.mesh.n_interfaces()]
    }

    pub fn empty_matrix(&self) -> BandMatrix {
        BandMatrix::zeros(self.n_dofs(), BANDWIDTH, BANDWIDTH)
    }

    fn context(&self, n: usize, t: f64) -> InterfaceContext<'_> {
        InterfaceContext {
            sec_minus: &self.sections[n],
            sec_plus: &self.sections[n + 1],
            penalty: &self.penalty,
            fracture: self.fracture.as_ref(),
            dist_moment: self.loads.distributed_moment_at(t),
            floor: self.floor,
            index: n,
        }
    }
}

const PARALLEL_THRESHOLD: usize = 64;

/// Pool capped by `BEAMFRAC_THREADS`, if that variable holds a count.
pub(crate) fn pool() -> Option<&'static rayon::ThreadPool> {
    static POOL: OnceLock<Option<rayon::ThreadPool>> = OnceLock::new();
    POOL.get_or_init(|| {
        let n: usize = std::env::var("BEAMFRAC_THREADS").ok()?.trim().parse().ok()?;
        rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build().ok()
    })
    .as_ref()
}

/// Maps `f` over `0..n` preserving order, in parallel for large `n`.
fn par_collect<T, F>(n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    let threads = pool().map_or_else(rayon::current_num_threads, |p| p.current_num_threads());
    if n < PARALLEL_THRESHOLD || threads <= 1 {
        return (0..n).map(f).collect();
    }
    let run = || (0..n).into_par_iter().map(&f).collect();
    match pool() {
        Some(p) => p.install(run),
        None => run(),
    }
}

fn tag_element(e: Error, element: usize) -> Error {
    match e {
        Error::DegenerateElement { norm, floor, .. } => Error::DegenerateElement { element, norm, floor },
        other => other,
    }
}

fn check_states(model: &Model, states: &[InterfaceState]) -> Result<()> {
    if states.len() != model.mesh.n_interfaces() {
        return Err(Error::AssemblyState(format!(
            "{} interface states for {} interfaces",
            states.len(),
            model.mesh.n_interfaces()
        )));
    }
    Ok(())
}

/// f_int: bulk internal forces.
pub fn assemble_internal_bulk(model: &Model, x: &[f64]) -> Result<Vec<f64>> {
    let mesh = &model.mesh;
    let rule = GaussRule::bulk();
    let locals = par_collect(mesh.n_elements(), |e| {
        bulk::element_force(&mesh.element_dofs(x, e), &model.sections[e], &rule, model.floor)
            .map_err(|err| tag_element(err, e))
    });
    let mut f = vec![0.0; mesh.n_dofs()];
    for (e, local) in locals.into_iter().enumerate() {
        let local = local?;
        let base = mesh.element_range(e).start;
        for i in 0..12 {
            f[base + i] += local[i];
        }
    }
    Ok(f)
}

fn interface_locals(
    model: &Model,
    x: &[f64],
    states: &[InterfaceState],
    t: f64,
) -> Result<Vec<(interface::Vec24, InterfaceEval)>> {
    check_states(model, states)?;
    let mesh = &model.mesh;
    par_collect(mesh.n_interfaces(), |n| {
        interface::force(&model.context(n, t), &mesh.element_dofs(x, n), &mesh.element_dofs(x, n + 1), &states[n])
    })
    .into_iter()
    .collect()
}

/// f_jump: DG and cohesive interface forces.
pub fn assemble_interface_forces(model: &Model, x: &[f64], states: &[InterfaceState], t: f64) -> Result<Vec<f64>> {
    let mut f = vec![0.0; model.n_dofs()];
    for (n, (local, _)) in interface_locals(model, x, states, t)?.into_iter().enumerate() {
        let base = model.mesh.element_range(n).start;
        for i in 0..24 {
            f[base + i] += local[i];
        }
    }
    Ok(f)
}

/// r = f_int + f_jump − f_ext.
pub fn residual(model: &Model, x: &[f64], states: &[InterfaceState], t: f64) -> Result<Vec<f64>> {
    let mut r = assemble_internal_bulk(model, x)?;
    let fj = assemble_interface_forces(model, x, states, t)?;
    let fe = assemble_external(model, x, t)?;
    for i in 0..r.len() {
        r[i] += fj[i] - fe[i];
    }
    Ok(r)
}

/// K_int.
pub fn internal_stiffness(model: &Model, x: &[f64]) -> Result<BandMatrix> {
    let mesh = &model.mesh;
    let rule = GaussRule::bulk();
    let locals = par_collect(mesh.n_elements(), |e| {
        bulk::element_tangent(&mesh.element_dofs(x, e), &model.sections[e], &rule, model.floor)
            .map_err(|err| tag_element(err, e))
    });
    let mut k = model.empty_matrix();
    for (e, local) in locals.into_iter().enumerate() {
        let local = local?;
        let base = mesh.element_range(e).start;
        for i in 0..12 {
            for j in 0..12 {
                k.add(base + i, base + j, local[(i, j)]);
            }
        }
    }
    Ok(k)
}

/// Adds ∂f_jump/∂x: analytic for intact interfaces, finite differences otherwise.
pub fn add_interface_stiffness(
    model: &Model,
    x: &[f64],
    states: &[InterfaceState],
    t: f64,
    k: &mut BandMatrix,
) -> Result<()> {
    check_states(model, states)?;
    let mesh = &model.mesh;
    let locals = par_collect(mesh.n_interfaces(), |n| {
        let ctx = model.context(n, t);
        let xm = mesh.element_dofs(x, n);
        let xp = mesh.element_dofs(x, n + 1);
        if interface::is_intact(&ctx, &states[n]) {
            interface::evaluate(&ctx, &xm, &xp).map(|ev| interface::tangent_dg(&ctx, &ev))
        } else {
            interface::tangent_fd(&ctx, &xm, &xp, &states[n])
        }
    });
    for (n, local) in locals.into_iter().enumerate() {
        let local = local?;
        let base = mesh.element_range(n).start;
        for i in 0..24 {
            for j in 0..24 {
                let v = local[(i, j)];
                if v != 0.0 {
                    k.add(base + i, base + j, v);
                }
            }
        }
    }
    Ok(())
}

/// Newton matrix K_int + K_jump − K_ext.
pub fn assemble_stiffness(model: &Model, x: &[f64], states: &[InterfaceState], t: f64) -> Result<BandMatrix> {
    let mut k = internal_stiffness(model, x)?;
    add_interface_stiffness(model, x, states, t, &mut k)?;
    external::subtract_external_tangent(model, x, t, &mut k)?;
    Ok(k)
}

/// K_int + K_jump,DG with every interface intact and no loads; used for the
/// stable time step.
pub fn dg_stiffness(model: &Model, x: &[f64]) -> Result<BandMatrix> {
    let mut k = internal_stiffness(model, x)?;
    add_interface_stiffness(model, x, &model.fresh_states(), 0.0, &mut k)?;
    Ok(k)
}

/// Residual and Newton matrix at one state.
#[derive(Clone, Debug)]
pub struct AssembledSystem {
    pub residual: Vec<f64>,
    pub tangent: BandMatrix,
}

pub fn assemble_system(model: &Model, x: &[f64], states: &[InterfaceState], t: f64) -> Result<AssembledSystem> {
    Ok(AssembledSystem { residual: residual(model, x, states, t)?, tangent: assemble_stiffness(model, x, states, t)? })
}

/// Mean resultants and jumps at one interface.
#[derive(Clone, Copy, Debug)]
pub struct InterfaceReport {
    pub mean_f: Vec3,
    pub mean_m: Vec3,
    pub jumps: Option<InterfaceJumps>,
}

pub fn interface_reports(model: &Model, x: &[f64], states: &[InterfaceState], t: f64) -> Result<Vec<InterfaceReport>> {
    check_states(model, states)?;
    let mesh = &model.mesh;
    (0..mesh.n_interfaces())
        .map(|n| {
            let ctx = model.context(n, t);
            let ev = interface::evaluate(&ctx, &mesh.element_dofs(x, n), &mesh.element_dofs(x, n + 1))?;
            Ok(InterfaceReport {
                mean_f: ev.mean_f,
                mean_m: ev.mean_m,
                jumps: interface::jumps(&ctx, &ev, &states[n])?,
            })
        })
        .collect()
}

/// End-of-step history update of every interface.
pub fn update_interface_states(
    model: &Model,
    x: &[f64],
    states: &[InterfaceState],
    t: f64,
) -> Result<Vec<InterfaceState>> {
    let Some(fr) = model.fracture else {
        return Ok(states.to_vec());
    };
    let reports = interface_reports(model, x, states, t)?;
    Ok(states
        .iter()
        .zip(&reports)
        .map(|(s, r)| {
            let j = r.jumps.expect("fracture model present");
            let m_perp = r.mean_m - j.normal * r.mean_m.dot(&j.normal);
            update_state(s, &j, &r.mean_f, &m_perp, &fr.params, fr.mode)
        })
        .collect())
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Energies {
    /// ∫ ½EAε² + ½EI|κ|² ds
    pub elastic: f64,
    /// Penalty and recoverable cohesive energy at interfaces.
    pub interface: f64,
}

pub fn energies(model: &Model, x: &[f64], states: &[InterfaceState], t: f64) -> Result<Energies> {
    check_states(model, states)?;
    let mesh = &model.mesh;
    let rule = GaussRule::bulk();
    let mut out = Energies::default();
    for e in 0..mesh.n_elements() {
        out.elastic += bulk::element_energy(&mesh.element_dofs(x, e), &model.sections[e], &rule, model.floor)
            .map_err(|err| tag_element(err, e))?;
    }
    for n in 0..mesh.n_interfaces() {
        let ctx = model.context(n, t);
        let ev = interface::evaluate(&ctx, &mesh.element_dofs(x, n), &mesh.element_dofs(x, n + 1))?;
        out.interface += interface::energy(&ctx, &ev, &states[n])?;
    }
    Ok(out)
}
