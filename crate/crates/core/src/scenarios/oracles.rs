//! Closed-form reference solutions for the benchmarks.

use std::f64::consts::PI;

use crate::beam::Vec3;
use crate::error::{Error, Result};
use crate::quadrature::GaussRule;

/// Euler load of a pinned–pinned circular column, (π³/4)·E·R⁴/L² (N).
pub fn buckling_load(youngs_modulus: f64, radius: f64, length: f64) -> f64 {
    PI.powi(3) / 4.0 * youngs_modulus * radius.powi(4) / (length * length)
}

/// Centerline of a cantilever bent by the end moment that winds it twice
/// around a circle of radius L/(4π) in the x–y plane.
pub fn double_circle(s: f64, length: f64) -> Vec3 {
    bent_arc(s, 4.0 * PI / length)
}

/// Point at arc length `s` of a beam clamped along +x at the origin and bent
/// to uniform curvature `kappa` (1/m) in the x–y plane.
pub fn bent_arc(s: f64, kappa: f64) -> Vec3 {
    if kappa.abs() < 1e-300 {
        return Vec3::new(s, 0.0, 0.0);
    }
    let a = 1.0 / kappa;
    Vec3::new(a * (s / a).sin(), a * (1.0 - (s / a).cos()), 0.0)
}

/// Waves launched at both ends of a bar by the displacement ramp
/// δ(t) = σ_f t /(2ρc), measured at distance `gauge_s` from one end.
///
/// Returns the axial stress in units of σ_f: zero before the first arrival,
/// ½ after it, and afterwards either 1 (the opposite wave passes, intact bar)
/// or 0 (the free surface created at mid-length relieves the stress).
pub fn spall_stress(t: f64, gauge_s: f64, length: f64, wave_speed: f64, fractured: bool) -> Result<f64> {
    if !(0.0..=length).contains(&gauge_s) {
        return Err(Error::Domain(format!("gauge at {gauge_s} m outside bar of length {length} m")));
    }
    let near = gauge_s.min(length - gauge_s) / wave_speed;
    let far = gauge_s.max(length - gauge_s) / wave_speed;
    if !fractured {
        // reflections from the driven ends arrive after 3·T_{L/2}
        return Ok(0.5 * ((t > near) as u8 + (t > far) as u8) as f64);
    }
    // the crack opens at T_{L/2} and its release wave runs back to the gauge
    let release = length / (2.0 * wave_speed) + (far - near) / 2.0;
    Ok(if t > near && t <= release { 0.5 } else { 0.0 })
}

/// Sampled points on both curves at the Gauss points of a partition.
pub struct CurveSamples {
    pub s: Vec<f64>,
    pub numerical: Vec<Vec3>,
    pub reference: Vec<Vec3>,
    pub weights: Vec<f64>,
}

impl CurveSamples {
    /// Samples `numerical(s)` and `reference(s)` with `points` Gauss points on
    /// each interval of `breaks`.
    pub fn new<N, R>(breaks: &[f64], points: usize, numerical: N, reference: R) -> Self
    where
        N: Fn(f64) -> Vec3,
        R: Fn(f64) -> Vec3,
    {
        let rule = GaussRule::new(points);
        let mut out = CurveSamples { s: vec![], numerical: vec![], reference: vec![], weights: vec![] };
        for w in breaks.windows(2) {
            let (a, b) = (w[0], w[1]);
            for (xi, wt) in rule.iter() {
                let s = 0.5 * (a + b) + 0.5 * (b - a) * xi;
                out.s.push(s);
                out.numerical.push(numerical(s));
                out.reference.push(reference(s));
                out.weights.push(0.5 * (b - a) * wt);
            }
        }
        out
    }
}

/// (1/u_max)·sqrt((1/L)∫‖r_h − r_ref‖² ds).
pub fn relative_l2_error(samples: &CurveSamples, u_max: f64, length: f64) -> f64 {
    let sum: f64 = samples
        .numerical
        .iter()
        .zip(&samples.reference)
        .zip(&samples.weights)
        .map(|((a, b), w)| w * (a - b).norm_squared())
        .sum();
    (sum / length).sqrt() / u_max
}
