//! Validated benchmark configuration.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ScenarioId {
    CantileverMoment,
    Buckling,
    Spall,
    TransverseFracture,
    Spaghetti,
}

impl ScenarioId {
    pub const ALL: [ScenarioId; 5] = [
        ScenarioId::CantileverMoment,
        ScenarioId::Buckling,
        ScenarioId::Spall,
        ScenarioId::TransverseFracture,
        ScenarioId::Spaghetti,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioId::CantileverMoment => "cantilever_moment",
            ScenarioId::Buckling => "buckling",
            ScenarioId::Spall => "spall",
            ScenarioId::TransverseFracture => "transverse_fracture",
            ScenarioId::Spaghetti => "spaghetti",
        }
    }

    /// True for scenarios integrated with explicit dynamics.
    pub fn is_dynamic(self) -> bool {
        matches!(self, ScenarioId::Spall | ScenarioId::TransverseFracture | ScenarioId::Spaghetti)
    }
}

impl fmt::Display for ScenarioId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ScenarioId {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        ScenarioId::ALL.into_iter().find(|id| id.name() == s).ok_or_else(|| format!("unknown scenario id `{s}`"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CohesiveConfig {
    /// σc (Pa)
    pub sigma_c: f64,
    /// Gc (N/m)
    pub g_c: f64,
    pub alpha: f64,
    /// Whether the bending moment enters the initiation criterion.
    pub bending_initiation: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    pub load_steps: Option<usize>,
    pub tol_rel: f64,
    /// (N); defaults to 1e−10·EA
    pub tol_abs: Option<f64>,
    pub max_iters: usize,
    /// Requested explicit step (s); clamped to `safety`·dt_c.
    pub dt: Option<f64>,
    /// End time of the explicit run (s).
    pub t_end: Option<f64>,
    pub safety: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            load_steps: None,
            tol_rel: 1e-8,
            tol_abs: None,
            max_iters: 50,
            dt: None,
            t_end: None,
            safety: crate::solvers::DEFAULT_SAFETY,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LoadingConfig {
    /// End moment (N·m).
    pub moment: Option<f64>,
    /// Final end displacement Δ (m).
    pub displacement: Option<f64>,
    /// Perturbation force P (N).
    pub perturbation: Option<f64>,
    /// Stress loading factor σ_f (Pa).
    pub sigma_f: Option<f64>,
    /// Transverse loading rate ṽ (m/s).
    pub load_rate: Option<f64>,
    /// Preload curvature κ0 (1/m).
    pub kappa0: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScenarioConfig {
    pub id: ScenarioId,
    /// (m)
    pub length: f64,
    /// (m)
    pub radius: f64,
    /// E (Pa)
    pub youngs_modulus: f64,
    /// ρ (kg/m³); only needed by dynamic scenarios.
    pub density: Option<f64>,
    /// Cohesive law; without it every interface stays intact (pure DG).
    pub cohesive: Option<CohesiveConfig>,
    pub beta_p: f64,
    pub beta_t: f64,
    /// Element size h (m).
    pub mesh_size: f64,
    pub solver: SolverConfig,
    pub loading: LoadingConfig,
}

fn missing(field: &str) -> Error {
    Error::config(0, format!("missing required field `{field}`"))
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::config(0, format!("`{name}` must be positive, got {v}")))
    }
}

impl ScenarioConfig {
    /// Checks ranges and the fields each scenario requires.
    pub fn validate(&self) -> Result<()> {
        positive("geometry.length", self.length)?;
        positive("geometry.radius", self.radius)?;
        positive("material.youngs_modulus", self.youngs_modulus)?;
        positive("mesh.h", self.mesh_size)?;
        if !(self.beta_p > 1.0) {
            return Err(Error::config(0, format!("beta_p must exceed 1, got {}", self.beta_p)));
        }
        if !(self.beta_t > 1.0) {
            return Err(Error::config(0, format!("beta_t must exceed 1, got {}", self.beta_t)));
        }
        if let Some(rho) = self.density {
            positive("material.density", rho)?;
        }
        if let Some(c) = &self.cohesive {
            positive("cohesive.sigma_c", c.sigma_c)?;
            positive("cohesive.g_c", c.g_c)?;
            positive("cohesive.alpha", c.alpha)?;
        }
        let s = &self.solver;
        positive("solver.tol_rel", s.tol_rel)?;
        if let Some(t) = s.tol_abs {
            positive("solver.tol_abs", t)?;
        }
        if s.max_iters == 0 {
            return Err(Error::config(0, "`solver.max_iters` must be at least 1"));
        }
        if s.load_steps == Some(0) {
            return Err(Error::config(0, "`solver.load_steps` must be at least 1"));
        }
        if !(s.safety > 0.0 && s.safety <= 1.0) {
            return Err(Error::config(0, format!("`solver.safety` must lie in (0, 1], got {}", s.safety)));
        }
        for (name, v) in [("solver.dt", s.dt), ("solver.t_end", s.t_end)] {
            if let Some(v) = v {
                positive(name, v)?;
            }
        }
        let l = &self.loading;
        let need = |name: &str, v: Option<f64>| v.map(|_| ()).ok_or_else(|| missing(name));
        match self.id {
            ScenarioId::CantileverMoment => {
                need("loading.moment", l.moment)?;
            }
            ScenarioId::Buckling => {
                need("loading.displacement", l.displacement)?;
                need("loading.perturbation", l.perturbation)?;
            }
            ScenarioId::Spall => need("loading.sigma_f", l.sigma_f)?,
            ScenarioId::TransverseFracture => need("loading.load_rate", l.load_rate)?,
            ScenarioId::Spaghetti => need("loading.kappa0", l.kappa0)?,
        }
        if !self.id.is_dynamic() || self.id == ScenarioId::Spaghetti {
            s.load_steps.ok_or_else(|| missing("solver.load_steps"))?;
        }
        if self.id.is_dynamic() {
            self.density.ok_or_else(|| missing("material.density"))?;
            s.dt.ok_or_else(|| missing("solver.dt"))?;
            s.t_end.ok_or_else(|| missing("solver.t_end"))?;
        }
        Ok(())
    }

    /// Number of elements closest to L/h (at least one).
    pub fn element_count(&self) -> usize {
        ((self.length / self.mesh_size).round() as usize).max(1)
    }
}
