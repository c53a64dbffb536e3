//! Meshes, supports and load programs of the benchmarks.

use crate::assembly::{Fracture, Model, PenaltyParams};
use crate::beam::{MaterialSection, Vec3};
use crate::cohesive::{CohesiveParams, InitiationMode};
use crate::error::{Error, Result};
use crate::loads::{EndMoment, LoadSpec, PointForce, Program};
use crate::mesh::{BeamMesh, DofKind, NodeRef};
use crate::solvers::{stable_timestep, NewtonSettings};

use super::config::{ScenarioConfig, ScenarioId};

/// Density used when a quasi-static scenario gives none; mass never enters Newton.
const QUASI_STATIC_DENSITY: f64 = 1.0;

/// Kick along an unstable mode, as a fraction of the element length.
const BRANCH_SWITCH: f64 = 1e-2;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StageSolver {
    QuasiStatic(NewtonSettings),
    Explicit {
        /// Step actually used (s).
        dt: f64,
        /// Critical step at the start of the stage (s).
        dt_c: f64,
        t_end: f64,
    },
}

#[derive(Clone, Debug)]
pub struct Stage {
    pub model: Model,
    pub solver: StageSolver,
}

/// A benchmark ready to run: one stage, or the preload and release of the
/// spaghetti problem.
#[derive(Clone, Debug)]
pub struct Problem {
    pub config: ScenarioConfig,
    pub stages: Vec<Stage>,
}

impl Problem {
    pub fn mesh(&self) -> &BeamMesh {
        &self.stages[0].model.mesh
    }

    pub fn section(&self) -> &MaterialSection {
        &self.stages[0].model.sections[0]
    }
}

pub fn section(config: &ScenarioConfig) -> Result<MaterialSection> {
    MaterialSection::circular(config.youngs_modulus, config.density.unwrap_or(QUASI_STATIC_DENSITY), config.radius)
}

fn fracture(config: &ScenarioConfig, sec: &MaterialSection) -> Result<Option<Fracture>> {
    config
        .cohesive
        .map(|c| {
            Ok(Fracture {
                params: CohesiveParams::new(c.sigma_c, c.g_c, c.alpha, sec.area, sec.radius)?,
                mode: if c.bending_initiation { InitiationMode::Mixed } else { InitiationMode::AxialOnly },
            })
        })
        .transpose()
}

fn newton(config: &ScenarioConfig, sec: &MaterialSection) -> Result<NewtonSettings> {
    let s = &config.solver;
    let steps = s.load_steps.ok_or_else(|| Error::config(0, "missing required field `solver.load_steps`"))?;
    Ok(NewtonSettings {
        load_steps: steps,
        tol_rel: s.tol_rel,
        tol_abs: s.tol_abs.unwrap_or(1e-10 * sec.ea()),
        max_iters: s.max_iters,
        branch_switch: None,
    })
}

fn explicit(config: &ScenarioConfig, model: &Model) -> Result<StageSolver> {
    let s = &config.solver;
    let field = |name: &str| Error::config(0, format!("missing required field `{name}`"));
    let requested = s.dt.ok_or_else(|| field("solver.dt"))?;
    let t_end = s.t_end.ok_or_else(|| field("solver.t_end"))?;
    let est = stable_timestep(model, &model.mesh.reference_state())?;
    Ok(StageSolver::Explicit { dt: requested.min(s.safety * est.dt_c), dt_c: est.dt_c, t_end })
}

/// Fixes z positions and z tangent components everywhere, keeping a planar
/// problem in the x–y plane.
fn planar(mesh: &BeamMesh, loads: &mut LoadSpec) {
    for n in all_nodes(mesh) {
        loads.fix(n, DofKind::Position, &[2]);
        loads.fix(n, DofKind::Tangent, &[2]);
    }
}

pub fn all_nodes(mesh: &BeamMesh) -> impl Iterator<Item = NodeRef> + '_ {
    (0..mesh.n_elements())
        .flat_map(|e| [NodeRef::new(e, crate::mesh::End::Start), NodeRef::new(e, crate::mesh::End::End)])
}

/// Interface at mid-length; requires an even element count.
pub fn center_interface(mesh: &BeamMesh) -> Result<usize> {
    let n = mesh.n_elements();
    if !n.is_multiple_of(2) || n < 2 {
        return Err(Error::config(
            0,
            format!("`mesh.h` must give an even number of elements so that an interface sits at mid-length (got {n})"),
        ));
    }
    Ok(n / 2 - 1)
}

/// Builds the benchmark described by `config`.
pub fn build_scenario(config: &ScenarioConfig) -> Result<Problem> {
    config.validate()?;
    let sec = section(config)?;
    let mesh = BeamMesh::uniform(config.length, config.element_count())?;
    let penalty = PenaltyParams::new(config.beta_p, config.beta_t)?;
    let fr = fracture(config, &sec)?;
    let l = &config.loading;
    let mut loads = LoadSpec::default();
    let stages = match config.id {
        ScenarioId::CantileverMoment => {
            loads.clamp(mesh.first_node(), 0);
            planar(&mesh, &mut loads);
            loads.end_moments.push(EndMoment {
                node: mesh.last_node(),
                moment: Vec3::z() * l.moment.expect("validated"),
                program: Program::ramp(),
            });
            let model = Model::new(mesh, sec, penalty, fr, loads)?;
            vec![Stage { solver: StageSolver::QuasiStatic(newton(config, &sec)?), model }]
        }
        ScenarioId::Buckling => {
            let c = center_interface(&mesh)?;
            loads.fix(mesh.first_node(), DofKind::Position, &[0, 1, 2]);
            loads.fix(mesh.last_node(), DofKind::Position, &[1, 2]);
            planar(&mesh, &mut loads);
            loads.prescribe(
                mesh.last_node(),
                DofKind::Position,
                0,
                Program::Linear(-l.displacement.expect("validated")),
            );
            let p = l.perturbation.expect("validated");
            let (a, b) = mesh.interface_nodes(c);
            for node in [a, b] {
                loads.point_forces.push(PointForce {
                    node,
                    force: Vec3::y() * (0.5 * p),
                    program: Program::Constant(1.0),
                });
            }
            let model = Model::new(mesh, sec, penalty, fr, loads)?;
            let settings = NewtonSettings { branch_switch: Some(BRANCH_SWITCH), ..newton(config, &sec)? };
            vec![Stage { solver: StageSolver::QuasiStatic(settings), model }]
        }
        ScenarioId::Spall => {
            // δ(t) = σ_f t /(2ρc) pulls both ends outward
            let rate = l.sigma_f.expect("validated") / (2.0 * sec.density * sec.wave_speed());
            loads.prescribe(mesh.first_node(), DofKind::Position, 0, Program::Linear(-rate));
            loads.prescribe(mesh.last_node(), DofKind::Position, 0, Program::Linear(rate));
            for node in [mesh.first_node(), mesh.last_node()] {
                loads.fix(node, DofKind::Position, &[1, 2]);
            }
            let model = Model::new(mesh, sec, penalty, fr, loads)?;
            vec![Stage { solver: explicit(config, &model)?, model }]
        }
        ScenarioId::TransverseFracture => {
            let c = center_interface(&mesh)?;
            loads.clamp(mesh.first_node(), 0);
            loads.clamp(mesh.last_node(), 0);
            planar(&mesh, &mut loads);
            let (a, b) = mesh.interface_nodes(c);
            for node in [a, b] {
                loads.prescribe(node, DofKind::Position, 1, Program::Linear(l.load_rate.expect("validated")));
            }
            let model = Model::new(mesh, sec, penalty, fr, loads)?;
            vec![Stage { solver: explicit(config, &model)?, model }]
        }
        ScenarioId::Spaghetti => {
            loads.clamp(mesh.first_node(), 0);
            planar(&mesh, &mut loads);
            let release = Model::new(mesh.clone(), sec, penalty, fr, loads.clone())?;
            loads.end_moments.push(EndMoment {
                node: mesh.last_node(),
                moment: Vec3::z() * (sec.ei() * l.kappa0.expect("validated")),
                program: Program::ramp(),
            });
            let preload = Model::new(mesh, sec, penalty, fr, loads)?;
            vec![
                Stage { solver: StageSolver::QuasiStatic(newton(config, &sec)?), model: preload },
                Stage { solver: explicit(config, &release)?, model: release },
            ]
        }
    };
    Ok(Problem { config: *config, stages })
}
