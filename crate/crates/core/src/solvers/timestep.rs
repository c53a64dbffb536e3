//! Stable explicit time step from the linearized eigenproblem
//! (K_int + K_jump,DG − λ² M_lump) Φ = 0.

use nalgebra::DMatrix;

use crate::assembly::{assemble_mass, dg_stiffness, Model};
use crate::error::{Error, Result};

/// Largest problem solved with a dense eigen-decomposition.
pub const DENSE_LIMIT: usize = 3000;

/// Default fraction of the critical step used by explicit runs.
pub const DEFAULT_SAFETY: f64 = 0.9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimestepEstimate {
    /// Largest natural frequency magnitude (rad/s).
    pub omega_max: f64,
    /// Critical step 2/ω_max (s).
    pub dt_c: f64,
}

impl TimestepEstimate {
    fn from_omega(omega_max: f64) -> Result<Self> {
        if !(omega_max > 0.0 && omega_max.is_finite()) {
            return Err(Error::AssemblyState(format!("nonfinite or zero omega_max {omega_max}")));
        }
        Ok(TimestepEstimate { omega_max, dt_c: 2.0 / omega_max })
    }
}

/// Estimate at state `x` with Dirichlet DOFs of `model` removed.
pub fn stable_timestep(model: &Model, x: &[f64]) -> Result<TimestepEstimate> {
    let k = dg_stiffness(model, x)?;
    let (_, lumped) = assemble_mass(&model.mesh, &model.sections);
    let fixed = model.loads.dirichlet_map();
    let free: Vec<usize> = (0..model.n_dofs()).filter(|d| !fixed.contains_key(d)).collect();
    let omega = if free.len() <= DENSE_LIMIT {
        let kd = DMatrix::from_fn(free.len(), free.len(), |i, j| k.get(free[i], free[j]));
        let m: Vec<f64> = free.iter().map(|&d| lumped[d]).collect();
        dense_omega_max(&kd, &m)?
    } else {
        power_omega_max(model.n_dofs(), &free, |v| k.mul_vec(v), &lumped)?
    };
    TimestepEstimate::from_omega(omega)
}

/// All roots λ of det(K − λ² diag(m)) = 0 as magnitudes |λ| = √|μ(M⁻¹K)|.
pub fn frequencies(k: &DMatrix<f64>, m: &[f64]) -> Result<Vec<f64>> {
    let n = k.nrows();
    // symmetric scaling M^{-1/2} K M^{-1/2} has the same spectrum as M⁻¹K
    let s: Vec<f64> = m.iter().map(|v| 1.0 / v.sqrt()).collect();
    let a = DMatrix::from_fn(n, n, |i, j| k[(i, j)] * s[i] * s[j]);
    let a = faer::Mat::<f64>::from_fn(n, n, |i, j| a[(i, j)]);
    let eig =
        a.eigenvalues().map_err(|e| Error::AssemblyState(format!("eigenvalue iteration did not converge: {e:?}")))?;
    let out: Vec<f64> = eig.iter().map(|z| z.norm().sqrt()).collect();
    if out.iter().any(|w| !w.is_finite()) {
        return Err(Error::AssemblyState("nonfinite eigenvalue".into()));
    }
    Ok(out)
}

pub fn dense_omega_max(k: &DMatrix<f64>, m: &[f64]) -> Result<f64> {
    Ok(frequencies(k, m)?.into_iter().fold(0.0, f64::max))
}

/// Power iteration on M⁻¹K restricted to `free`.
pub fn power_omega_max<F>(n: usize, free: &[usize], k_mul: F, m: &[f64]) -> Result<f64>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let mut v = vec![0.0; n];
    for (j, &d) in free.iter().enumerate() {
        v[d] = 1.0 + 0.5 * ((j as f64) * 0.618).sin();
    }
    let mut mu = 0.0;
    for _ in 0..2000 {
        let kv = k_mul(&v);
        let mut w = vec![0.0; n];
        for &d in free {
            w[d] = kv[d] / m[d];
        }
        let nw = w.iter().map(|a| a * a).sum::<f64>().sqrt();
        let nv = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if !(nw.is_finite() && nw > 0.0) {
            return Err(Error::AssemblyState("power iteration broke down".into()));
        }
        let next = nw / nv;
        v = w.into_iter().map(|a| a / nw).collect();
        if (next - mu).abs() < 1e-10 * next {
            mu = next;
            break;
        }
        mu = next;
    }
    Ok(mu.sqrt())
}
