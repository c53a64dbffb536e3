//! Mesh and penalty refinement study of the cantilever.

use rayon::prelude::*;

use crate::error::{Error, Result};

use super::config::{ScenarioConfig, ScenarioId};
use super::{run_scenario, RunOptions};

/// Refinement levels of the study, each halving h.
pub const DEFAULT_LEVELS: usize = 7;
pub const DEFAULT_BETAS: [f64; 3] = [10.0, 100.0, 1000.0];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvergenceRow {
    /// Element size (m).
    pub h: f64,
    pub beta: f64,
    pub error: f64,
    /// log₂ of the error ratio to the next coarser mesh at the same β.
    pub observed_order: Option<f64>,
}

/// Fills `observed_order` for rows grouped by β in order of decreasing h.
pub fn observed_orders(rows: &mut [ConvergenceRow]) {
    for i in 0..rows.len() {
        rows[i].observed_order = (0..i)
            .rev()
            .find(|&j| rows[j].beta == rows[i].beta)
            .filter(|&j| rows[j].error > 0.0 && rows[i].error > 0.0)
            .map(|j| (rows[j].error / rows[i].error).log2() * (rows[j].h / rows[i].h).log2().recip());
    }
}

/// Runs the cantilever at `levels` mesh sizes starting from `config.mesh_size`
/// and at each penalty in `betas` (βp = βt).
pub fn converge(config: &ScenarioConfig, levels: usize, betas: &[f64]) -> Result<Vec<ConvergenceRow>> {
    if config.id != ScenarioId::CantileverMoment {
        return Err(Error::UnsupportedScenario(config.id.to_string()));
    }
    config.validate()?;
    let cells: Vec<(f64, f64)> =
        betas.iter().flat_map(|&b| (0..levels).map(move |k| (b, config.mesh_size / 2f64.powi(k as i32)))).collect();
    let run = || -> Vec<Result<f64>> {
        cells
            .par_iter()
            .map(|&(beta, h)| {
                let cfg = ScenarioConfig { mesh_size: h, beta_p: beta, beta_t: beta, ..*config };
                let out = run_scenario(&cfg, &RunOptions { snapshots: false, ..Default::default() })?;
                Ok(out.summary.centerline_error.unwrap_or(f64::NAN))
            })
            .collect()
    };
    let errors = match crate::assembly::pool() {
        Some(p) => p.install(run),
        None => run(),
    };
    let mut rows = Vec::with_capacity(cells.len());
    for ((beta, h), e) in cells.into_iter().zip(errors) {
        rows.push(ConvergenceRow { h, beta, error: e?, observed_order: None });
    }
    observed_orders(&mut rows);
    Ok(rows)
}
