//! Explicit central-difference (Newmark β = 0, γ = ½) dynamics with lumped mass.

use std::collections::BTreeMap;

use crate::assembly::{
    assemble_external, assemble_interface_forces, assemble_internal_bulk, assemble_mass, energies,
    update_interface_states, Model,
};
use crate::cohesive::InterfaceState;
use crate::error::{Error, Result};
use crate::loads::Program;

#[derive(Clone, Debug, PartialEq)]
pub struct DynamicState {
    pub x: Vec<f64>,
    pub v: Vec<f64>,
    pub a: Vec<f64>,
    /// Time (s).
    pub t: f64,
    /// Time step (s).
    pub dt: f64,
}

/// Interfaces whose history changed during one step.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct StepEvents {
    pub initiated: Vec<usize>,
    pub failed: Vec<usize>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EnergyReport {
    pub kinetic: f64,
    pub elastic: f64,
    pub interface: f64,
    /// Cumulative cohesive dissipation.
    pub dissipated: f64,
    /// Cumulative work of applied loads and supports.
    pub external_work: f64,
}

impl EnergyReport {
    pub fn mechanical(&self) -> f64 {
        self.kinetic + self.elastic + self.interface
    }
}

pub struct ExplicitIntegrator<'a> {
    model: &'a Model,
    lumped: Vec<f64>,
    x_ref: Vec<f64>,
    fixed: BTreeMap<usize, Program>,
    pub states: Vec<InterfaceState>,
    /// Internal minus external force at the current state.
    net: Vec<f64>,
    f_ext: Vec<f64>,
    external_work: f64,
}

impl<'a> ExplicitIntegrator<'a> {
    pub fn new(model: &'a Model, states: Vec<InterfaceState>) -> Self {
        let (_, lumped) = assemble_mass(&model.mesh, &model.sections);
        ExplicitIntegrator {
            model,
            lumped,
            x_ref: model.mesh.reference_state(),
            fixed: model.loads.dirichlet_map(),
            states,
            net: Vec::new(),
            f_ext: Vec::new(),
            external_work: 0.0,
        }
    }

    pub fn lumped_mass(&self) -> &[f64] {
        &self.lumped
    }

    /// Starting state with velocities `v` (Dirichlet DOFs overridden by their programs).
    pub fn start(&mut self, x: Vec<f64>, v: Vec<f64>, t: f64, dt: f64) -> Result<DynamicState> {
        if !(dt != 0.0 && dt.is_finite()) {
            return Err(Error::Domain(format!("time step must be finite and nonzero, got {dt}")));
        }
        let n = self.model.n_dofs();
        if x.len() != n || v.len() != n {
            return Err(Error::AssemblyState(format!("state vectors must have {n} entries")));
        }
        let mut s = DynamicState { x, v, a: vec![0.0; n], t, dt };
        self.apply_dirichlet(&mut s);
        s.a = self.accelerations(&s.x, s.t)?;
        Ok(s)
    }

    fn apply_dirichlet(&self, s: &mut DynamicState) {
        for (&d, p) in &self.fixed {
            s.x[d] = self.x_ref[d] + p.value(s.t);
            s.v[d] = p.rate();
        }
    }

    fn accelerations(&mut self, x: &[f64], t: f64) -> Result<Vec<f64>> {
        let m = self.model;
        let mut net = assemble_internal_bulk(m, x)?;
        let fj = assemble_interface_forces(m, x, &self.states, t)?;
        let fe = assemble_external(m, x, t)?;
        for i in 0..net.len() {
            net[i] += fj[i] - fe[i];
        }
        let mut a: Vec<f64> = net.iter().zip(&self.lumped).map(|(f, mi)| -f / mi).collect();
        for &d in self.fixed.keys() {
            a[d] = 0.0;
        }
        self.net = net;
        self.f_ext = fe;
        Ok(a)
    }

    /// Advances `s` by one step of size `s.dt`.
    pub fn step(&mut self, s: &mut DynamicState) -> Result<StepEvents> {
        let dt = s.dt;
        let x_old = s.x.clone();
        let (net_old, fe_old) = (std::mem::take(&mut self.net), std::mem::take(&mut self.f_ext));
        for i in 0..s.x.len() {
            s.x[i] += dt * s.v[i] + 0.5 * dt * dt * s.a[i];
        }
        s.t += dt;
        self.apply_dirichlet(s);
        let before = self.states.clone();
        self.states = update_interface_states(self.model, &s.x, &self.states, s.t)?;
        let a_new = self.accelerations(&s.x, s.t)?;
        for i in 0..s.v.len() {
            if !self.fixed.contains_key(&i) {
                s.v[i] += 0.5 * dt * (s.a[i] + a_new[i]);
            }
        }
        s.a = a_new;
        if s.x.iter().chain(&s.v).chain(&s.a).any(|v| !v.is_finite()) {
            return Err(Error::Divergence { time: s.t });
        }
        if !net_old.is_empty() {
            for i in 0..s.x.len() {
                let dx = s.x[i] - x_old[i];
                self.external_work += if self.fixed.contains_key(&i) {
                    0.5 * (net_old[i] + self.net[i]) * dx
                } else {
                    0.5 * (fe_old[i] + self.f_ext[i]) * dx
                };
            }
        }
        let mut events = StepEvents::default();
        for (n, (b, a)) in before.iter().zip(&self.states).enumerate() {
            if b.alpha_n && !a.alpha_n {
                events.initiated.push(n);
            }
            if b.gamma_n && !a.gamma_n {
                events.failed.push(n);
            }
        }
        Ok(events)
    }

    pub fn energy(&self, s: &DynamicState) -> Result<EnergyReport> {
        let kinetic = 0.5 * s.v.iter().zip(&self.lumped).map(|(v, m)| m * v * v).sum::<f64>();
        let e = energies(self.model, &s.x, &self.states, s.t)?;
        Ok(EnergyReport {
            kinetic,
            elastic: e.elastic,
            interface: e.interface,
            dissipated: self.states.iter().map(|st| st.dissipated()).sum(),
            external_work: self.external_work,
        })
    }
}
