//! Neumann loads and Dirichlet programs.
//!
//! Every load is a fixed vector scaled by a [`Program`] of the load parameter
//! `t`: physical time in dynamic runs, pseudo-time in [0, 1] in quasi-static runs.

use std::collections::BTreeMap;

use crate::beam::Vec3;
use crate::error::{Error, Result};
use crate::mesh::{BeamMesh, DofKind, NodeRef};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Program {
    Constant(f64),
    /// `slope · t`
    Linear(f64),
}

impl Program {
    pub fn value(&self, t: f64) -> f64 {
        match *self {
            Program::Constant(c) => c,
            Program::Linear(k) => k * t,
        }
    }

    pub fn rate(&self) -> f64 {
        match *self {
            Program::Constant(_) => 0.0,
            Program::Linear(k) => k,
        }
    }

    /// Full-load ramp over unit pseudo-time.
    pub fn ramp() -> Self {
        Program::Linear(1.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointForce {
    pub node: NodeRef,
    pub force: Vec3,
    pub program: Program,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EndMoment {
    pub node: NodeRef,
    pub moment: Vec3,
    pub program: Program,
}

/// Prescribed displacement of one DOF relative to its reference value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dirichlet {
    pub dof: usize,
    pub program: Program,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct LoadSpec {
    /// Uniform distributed force f̃ (N/m).
    pub distributed_force: Option<(Vec3, Program)>,
    /// Uniform distributed moment m̃⊥ (N·m/m).
    pub distributed_moment: Option<(Vec3, Program)>,
    pub point_forces: Vec<PointForce>,
    pub end_moments: Vec<EndMoment>,
    pub dirichlet: Vec<Dirichlet>,
}

impl LoadSpec {
    pub fn distributed_force_at(&self, t: f64) -> Vec3 {
        self.distributed_force.map(|(f, p)| f * p.value(t)).unwrap_or_else(Vec3::zeros)
    }

    pub fn distributed_moment_at(&self, t: f64) -> Vec3 {
        self.distributed_moment.map(|(m, p)| m * p.value(t)).unwrap_or_else(Vec3::zeros)
    }

    /// Holds the given DOFs of a node at their reference values.
    pub fn fix(&mut self, node: NodeRef, kind: DofKind, components: &[usize]) {
        for &c in components {
            self.dirichlet.push(Dirichlet { dof: node.dof(kind, c), program: Program::Constant(0.0) });
        }
    }

    /// Clamps a node of a beam whose reference axis is coordinate `axis`:
    /// fixes the position and the tangent direction, leaving the stretch free.
    pub fn clamp(&mut self, node: NodeRef, axis: usize) {
        self.fix(node, DofKind::Position, &[0, 1, 2]);
        let across: Vec<usize> = (0..3).filter(|c| *c != axis).collect();
        self.fix(node, DofKind::Tangent, &across);
    }

    pub fn prescribe(&mut self, node: NodeRef, kind: DofKind, component: usize, program: Program) {
        self.dirichlet.push(Dirichlet { dof: node.dof(kind, component), program });
    }

    /// Dirichlet DOFs in ascending order; later entries override earlier ones.
    pub fn dirichlet_map(&self) -> BTreeMap<usize, Program> {
        self.dirichlet.iter().map(|d| (d.dof, d.program)).collect()
    }

    pub fn validate(&self, mesh: &BeamMesh) -> Result<()> {
        let n = mesh.n_dofs();
        let fixed = self.dirichlet_map();
        if let Some(d) = fixed.keys().find(|d| **d >= n) {
            return Err(Error::Domain(format!("Dirichlet DOF {d} outside mesh with {n} DOFs")));
        }
        let in_mesh = |node: &NodeRef| node.element < mesh.n_elements();
        for p in &self.point_forces {
            if !in_mesh(&p.node) {
                return Err(Error::Domain(format!("point force on missing element {}", p.node.element)));
            }
            for c in 0..3 {
                if p.force[c] != 0.0 && fixed.contains_key(&p.node.dof(DofKind::Position, c)) {
                    return Err(Error::Domain(format!(
                        "point force and Dirichlet condition on the same DOF {}",
                        p.node.dof(DofKind::Position, c)
                    )));
                }
            }
        }
        for m in &self.end_moments {
            if !in_mesh(&m.node) {
                return Err(Error::Domain(format!("end moment on missing element {}", m.node.element)));
            }
            // M × t can only have a component c if M has a component off axis c
            let dofs = m.node.dofs(DofKind::Tangent);
            for c in 0..3 {
                let off_axis = (0..3).any(|k| k != c && m.moment[k] != 0.0);
                if off_axis && fixed.contains_key(&dofs[c]) {
                    return Err(Error::Domain(format!(
                        "end moment and Dirichlet condition on the same DOF {}",
                        dofs[c]
                    )));
                }
            }
        }
        Ok(())
    }
}
