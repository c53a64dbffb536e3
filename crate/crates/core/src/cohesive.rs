//! Resultant-based cohesive law at inter-element interfaces.

use crate::beam::{LocalKinematics, Vec3};
use crate::error::{Error, Result};

/// Below this norm the mean unit tangent is treated as vanishing.
pub const NORMAL_FLOOR: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CohesiveParams {
    /// Cohesive strength σc (Pa).
    pub sigma_c: f64,
    /// Fracture energy Gc (N/m).
    pub g_c: f64,
    /// Mode-mixity parameter.
    pub alpha: f64,
    /// Cross-section radius R (m).
    pub radius: f64,
    /// Critical effective force σc·A (N).
    pub f_c: f64,
    /// Critical effective separation 2Gc/σc (m).
    pub delta_c: f64,
}

impl CohesiveParams {
    pub fn new(sigma_c: f64, g_c: f64, alpha: f64, area: f64, radius: f64) -> Result<Self> {
        for (name, v) in [("sigma_c", sigma_c), ("g_c", g_c), ("alpha", alpha), ("area", area), ("radius", radius)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Domain(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(CohesiveParams { sigma_c, g_c, alpha, radius, f_c: sigma_c * area, delta_c: 2.0 * g_c / sigma_c })
    }

    /// Linear softening envelope (1 − Δ/Δc)·f_c, zero beyond Δc.
    pub fn envelope(&self, delta: f64) -> f64 {
        (self.f_c * (1.0 - delta / self.delta_c)).max(0.0)
    }
}

/// Which resultants enter the initiation criterion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum InitiationMode {
    /// Axial force and bending moment.
    #[default]
    Mixed,
    /// Axial force only; tangent jumps still soften the law once initiated.
    AxialOnly,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InterfaceJumps {
    /// Axial opening ⟦r⟧·n (m).
    pub delta_par: f64,
    /// Sideways offset of the faces, |⟦r⟧ − Δ∥ n| (m).
    pub slide: f64,
    /// Tangent jump ⟦g1⟧.
    pub theta: Vec3,
    /// Unit interface normal.
    pub normal: Vec3,
    /// Effective separation Δ (m).
    pub delta: f64,
}

/// History of one interface.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InterfaceState {
    /// True until fracture initiates (DG coupling active).
    pub alpha_n: bool,
    /// True until complete decohesion.
    pub gamma_n: bool,
    /// Largest effective separation reached since initiation (m).
    pub delta_max: f64,
    /// Effective cohesive force at `delta_max` (N).
    pub f_max: f64,
    /// Crack faces pressed together after initiation.
    pub recontact: bool,
    /// Normal from the last update, used when the mean tangent degenerates.
    pub cached_normal: Option<Vec3>,
    /// Normal at initiation; contact of the crack faces acts along it.
    pub crack_normal: Option<Vec3>,
    /// Cohesive work ∫ f dΔ accumulated since initiation (J).
    pub work: f64,
    pub last_delta: f64,
    pub last_force: f64,
}

impl Default for InterfaceState {
    fn default() -> Self {
        InterfaceState {
            alpha_n: true,
            gamma_n: true,
            delta_max: 0.0,
            f_max: 0.0,
            recontact: false,
            cached_normal: None,
            crack_normal: None,
            work: 0.0,
            last_delta: 0.0,
            last_force: 0.0,
        }
    }
}

impl InterfaceState {
    pub fn alpha(&self) -> f64 {
        if self.alpha_n {
            1.0
        } else {
            0.0
        }
    }

    pub fn gamma(&self) -> f64 {
        if self.gamma_n {
            1.0
        } else {
            0.0
        }
    }

    pub fn initiated(&self) -> bool {
        !self.alpha_n
    }

    pub fn failed(&self) -> bool {
        !self.gamma_n
    }

    /// Energy dissipated so far: cohesive work minus the recoverable part ½ f Δ.
    pub fn dissipated(&self) -> f64 {
        self.work - 0.5 * self.last_force * self.last_delta
    }
}

/// Interface normal ⟨g1⟩/|⟨g1⟩|, falling back to `cached` when the mean vanishes.
pub fn interface_normal(g_minus: &Vec3, g_plus: &Vec3, cached: Option<Vec3>) -> Result<Vec3> {
    let mean = (g_minus + g_plus) * 0.5;
    let n = mean.norm();
    if n > NORMAL_FLOOR {
        Ok(mean / n)
    } else {
        cached.ok_or(Error::DegenerateNormal { interface: 0 })
    }
}

pub fn compute_jumps(
    minus: &LocalKinematics,
    plus: &LocalKinematics,
    params: &CohesiveParams,
    cached_normal: Option<Vec3>,
) -> Result<InterfaceJumps> {
    let normal = interface_normal(&minus.g1, &plus.g1, cached_normal)?;
    let jump = plus.r - minus.r;
    let delta_par = jump.dot(&normal);
    let theta = plus.g1 - minus.g1;
    Ok(InterfaceJumps {
        delta_par,
        slide: (jump - normal * delta_par).norm(),
        theta,
        normal,
        delta: effective_separation(delta_par, &theta, params),
    })
}

pub fn effective_separation(delta_par: f64, theta: &Vec3, params: &CohesiveParams) -> f64 {
    delta_par.max(0.0).hypot(params.alpha * params.radius * theta.norm())
}

pub fn effective_force(delta: f64, state: &InterfaceState, params: &CohesiveParams) -> f64 {
    if delta >= state.delta_max {
        params.envelope(delta)
    } else {
        delta / state.delta_max * state.f_max
    }
}

/// Cohesive axial force and bending moment; both vanish at Δ = 0.
pub fn cohesive_tractions(jumps: &InterfaceJumps, state: &InterfaceState, params: &CohesiveParams) -> (Vec3, Vec3) {
    if jumps.delta <= 0.0 {
        return (Vec3::zeros(), Vec3::zeros());
    }
    let f = effective_force(jumps.delta, state, params);
    let force = jumps.normal * (f * jumps.delta_par.max(0.0) / jumps.delta);
    let a = params.alpha;
    let r = params.radius;
    let moment = jumps.theta * (a * a * f * r * r / jumps.delta);
    (force, moment)
}

/// Equivalent force combining the tensile normal force and the bending moment.
pub fn equivalent_force(
    mean_f: &Vec3,
    mean_m_perp: &Vec3,
    normal: &Vec3,
    params: &CohesiveParams,
    mode: InitiationMode,
) -> f64 {
    let axial = mean_f.dot(normal).max(0.0);
    match mode {
        InitiationMode::Mixed => {
            let bend = mean_m_perp.norm() / (params.alpha * params.radius);
            axial.hypot(bend)
        }
        InitiationMode::AxialOnly => axial,
    }
}

pub fn initiation_check(
    mean_f: &Vec3,
    mean_m_perp: &Vec3,
    normal: &Vec3,
    params: &CohesiveParams,
    mode: InitiationMode,
) -> bool {
    equivalent_force(mean_f, mean_m_perp, normal, params, mode) >= params.f_c
}

/// Exact integral of the envelope between separations `a` ≤ `b`.
fn envelope_work(params: &CohesiveParams, a: f64, b: f64) -> f64 {
    let b = b.min(params.delta_c);
    if b <= a {
        return 0.0;
    }
    0.5 * (params.envelope(a) + params.envelope(b)) * (b - a)
}

/// End-of-step update of the interface history.
pub fn update_state(
    state: &InterfaceState,
    jumps: &InterfaceJumps,
    mean_f: &Vec3,
    mean_m_perp: &Vec3,
    params: &CohesiveParams,
    mode: InitiationMode,
) -> InterfaceState {
    let mut next = *state;
    next.cached_normal = Some(jumps.normal);
    let delta = jumps.delta;
    if next.alpha_n {
        if initiation_check(mean_f, mean_m_perp, &jumps.normal, params, mode) {
            next.alpha_n = false;
            next.crack_normal = Some(jumps.normal);
            next.delta_max = delta;
            next.f_max = params.envelope(delta);
            next.last_delta = delta;
            next.last_force = next.f_max;
            next.work = 0.0;
        } else {
            return next;
        }
    } else {
        let f = effective_force(delta, state, params);
        if delta > state.delta_max {
            // back along the unloading ray to Δmax, then out along the envelope
            let dm = state.delta_max;
            next.work += 0.5 * (state.last_force + state.f_max) * (dm - state.last_delta);
            next.work += envelope_work(params, dm, delta);
            next.delta_max = delta;
            next.f_max = params.envelope(delta);
        } else {
            next.work += 0.5 * (state.last_force + f) * (delta - state.last_delta);
        }
        next.last_delta = delta;
        next.last_force = f;
    }
    if next.delta_max >= params.delta_c {
        next.gamma_n = false;
    }
    next.recontact = jumps.delta_par < 0.0 && next.delta_max > 0.0;
    next
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beam::{interpolate, ElementDofs};
    use approx::assert_relative_eq;
    use nalgebra::{Rotation3, Unit};
    use proptest::prelude::*;

    fn spall_params() -> CohesiveParams {
        let r = 1e-3;
        CohesiveParams::new(400e6, 100.0, 1.0, std::f64::consts::PI * r * r, r).unwrap()
    }

    fn kin_at(r: Vec3, g: Vec3) -> LocalKinematics {
        LocalKinematics::from_derivatives(r, g, Vec3::zeros(), Vec3::zeros(), 1e-12).unwrap()
    }

    #[test]
    fn critical_values() {
        let p = spall_params();
        assert_relative_eq!(p.f_c, 1256.637, max_relative = 1e-6);
        assert_relative_eq!(p.delta_c, 5e-7, max_relative = 1e-14);
    }

    #[test]
    fn conforming_interface_has_no_jump() {
        let dofs = ElementDofs::reference(Vec3::zeros(), Vec3::x(), 1.0);
        let k = interpolate(&dofs, 1.0).unwrap();
        let j = compute_jumps(&k, &k, &spall_params(), None).unwrap();
        assert_eq!(j.delta_par, 0.0);
        assert_eq!(j.theta, Vec3::zeros());
        assert_eq!(j.delta, 0.0);
    }

    #[test]
    fn pure_axial_opening() {
        let g = Vec3::x();
        let j = compute_jumps(&kin_at(Vec3::zeros(), g), &kin_at(Vec3::new(2e-7, 0.0, 0.0), g), &spall_params(), None)
            .unwrap();
        assert_relative_eq!(j.delta_par, 2e-7);
        assert_eq!(j.theta.norm(), 0.0);
        assert_relative_eq!(j.delta, 2e-7);
    }

    #[test]
    fn symmetric_kink() {
        let c = 30f64.to_radians().cos();
        let s = 30f64.to_radians().sin();
        let j = compute_jumps(
            &kin_at(Vec3::zeros(), Vec3::new(c, -s, 0.0)),
            &kin_at(Vec3::zeros(), Vec3::new(c, s, 0.0)),
            &spall_params(),
            None,
        )
        .unwrap();
        assert_relative_eq!(j.normal, Vec3::x(), epsilon = 1e-15);
        assert_relative_eq!(j.theta, Vec3::y(), epsilon = 1e-15);
        assert_eq!(j.delta_par, 0.0);
        assert_relative_eq!(j.delta, 1e-3, max_relative = 1e-14);
    }

    #[test]
    fn antiparallel_tangents_use_cached_normal() {
        let a = kin_at(Vec3::zeros(), Vec3::x());
        let b = kin_at(Vec3::zeros(), -Vec3::x());
        let p = spall_params();
        assert!(matches!(compute_jumps(&a, &b, &p, None), Err(Error::DegenerateNormal { .. })));
        let j = compute_jumps(&a, &b, &p, Some(Vec3::y())).unwrap();
        assert_eq!(j.normal, Vec3::y());
    }

    #[test]
    fn effective_force_branches() {
        let p = spall_params();
        let fresh = InterfaceState::default();
        assert_relative_eq!(effective_force(0.0, &fresh, &p), 1256.637, max_relative = 1e-6);
        assert_eq!(effective_force(p.delta_c, &fresh, &p), 0.0);
        assert_eq!(effective_force(2.0 * p.delta_c, &fresh, &p), 0.0);
        let loaded =
            InterfaceState { alpha_n: false, delta_max: p.delta_c / 2.0, f_max: p.envelope(p.delta_c / 2.0), ..fresh };
        assert_relative_eq!(loaded.f_max, p.f_c / 2.0, max_relative = 1e-14);
        assert_relative_eq!(effective_force(p.delta_c / 4.0, &loaded, &p), p.f_c / 4.0, max_relative = 1e-14);
        // continuity at Δmax
        let d = loaded.delta_max;
        let below = effective_force(d * (1.0 - 1e-12), &loaded, &p);
        let above = effective_force(d, &loaded, &p);
        assert!((below - above).abs() < 1e-6);
    }

    #[test]
    fn tractions_limits() {
        let p = spall_params();
        let fresh = InterfaceState::default();
        let zero = InterfaceJumps { delta_par: 0.0, slide: 0.0, theta: Vec3::zeros(), normal: Vec3::x(), delta: 0.0 };
        let (f, m) = cohesive_tractions(&zero, &fresh, &p);
        assert_eq!((f.norm(), m.norm()), (0.0, 0.0));

        let d = p.delta_c / 2.0;
        let axial = InterfaceJumps { delta_par: d, slide: 0.0, theta: Vec3::zeros(), normal: Vec3::x(), delta: d };
        let (f, m) = cohesive_tractions(&axial, &fresh, &p);
        assert_relative_eq!(f, Vec3::x() * (p.f_c / 2.0), max_relative = 1e-14);
        assert_eq!(m.norm(), 0.0);

        let theta = Vec3::new(0.0, 2e-4, 0.0);
        let bend = InterfaceJumps {
            delta_par: -1e-9,
            slide: 0.0,
            theta,
            normal: Vec3::x(),
            delta: effective_separation(-1e-9, &theta, &p),
        };
        let (f, m) = cohesive_tractions(&bend, &fresh, &p);
        assert_eq!(f.norm(), 0.0);
        let fc = effective_force(bend.delta, &fresh, &p);
        assert_relative_eq!(m.norm(), p.alpha * p.radius * fc, max_relative = 1e-14);
    }

    #[test]
    fn initiation_examples() {
        let p = spall_params();
        let n = Vec3::x();
        let mode = InitiationMode::Mixed;
        assert!(initiation_check(&(n * p.f_c), &Vec3::zeros(), &n, &p, mode));
        assert!(!initiation_check(&(n * (-2.0 * p.f_c)), &Vec3::zeros(), &n, &p, mode));
        let m = Vec3::y() * (p.alpha * p.radius * p.f_c);
        assert!(initiation_check(&Vec3::zeros(), &m, &n, &p, mode));
        assert!(!initiation_check(&Vec3::zeros(), &m, &n, &p, InitiationMode::AxialOnly));
    }

    #[test]
    fn state_transitions() {
        let p = spall_params();
        let s0 = InterfaceState::default();
        let quiet = InterfaceJumps { delta_par: 0.0, slide: 0.0, theta: Vec3::zeros(), normal: Vec3::x(), delta: 0.0 };
        let s1 = update_state(&s0, &quiet, &(Vec3::x() * 0.5 * p.f_c), &Vec3::zeros(), &p, InitiationMode::Mixed);
        assert!(s1.alpha_n && s1.gamma_n);
        assert_eq!(s1.delta_max, 0.0);

        let s2 = update_state(&s1, &quiet, &(Vec3::x() * 1.1 * p.f_c), &Vec3::zeros(), &p, InitiationMode::Mixed);
        assert!(!s2.alpha_n && s2.gamma_n);
        assert_relative_eq!(s2.f_max, p.f_c);

        let closed = InterfaceJumps { delta_par: -1e-8, ..quiet };
        let s3 = InterfaceState { delta_max: 1e-7, f_max: p.envelope(1e-7), ..s2 };
        let s4 = update_state(&s3, &closed, &Vec3::zeros(), &Vec3::zeros(), &p, InitiationMode::Mixed);
        assert!(s4.recontact);
        assert_eq!(s4.delta_max, 1e-7);

        let open = InterfaceJumps { delta_par: p.delta_c, delta: p.delta_c, ..quiet };
        let s5 = update_state(&s4, &open, &Vec3::zeros(), &Vec3::zeros(), &p, InitiationMode::Mixed);
        assert!(!s5.gamma_n && !s5.recontact);
    }

    fn drive(p: &CohesiveParams, path: &[f64]) -> InterfaceState {
        let mut s = InterfaceState { alpha_n: false, f_max: p.f_c, last_force: p.f_c, ..InterfaceState::default() };
        for &d in path {
            let j =
                InterfaceJumps { delta_par: d, slide: 0.0, theta: Vec3::zeros(), normal: Vec3::x(), delta: d.max(0.0) };
            s = update_state(&s, &j, &Vec3::zeros(), &Vec3::zeros(), p, InitiationMode::Mixed);
        }
        s
    }

    #[test]
    fn monotonic_dissipation_equals_fracture_energy() {
        let p = spall_params();
        let path: Vec<f64> = (1..=1000).map(|k| p.delta_c * 1.2 * k as f64 / 1000.0).collect();
        let s = drive(&p, &path);
        assert!(s.failed());
        assert_relative_eq!(s.dissipated(), p.g_c * p.f_c / p.sigma_c, max_relative = 1e-10);
        assert_relative_eq!(s.dissipated(), p.f_c * p.delta_c / 2.0, max_relative = 1e-10);
    }

    #[test]
    fn unload_reload_is_elastic() {
        let p = spall_params();
        let up: Vec<f64> = (1..=10).map(|k| 0.04 * p.delta_c * k as f64).collect();
        let s = drive(&p, &up);
        let dmax = s.delta_max;
        let cycle: Vec<f64> =
            (0..=20).map(|k| dmax * (1.0 - k as f64 / 20.0)).chain((0..=20).map(|k| dmax * k as f64 / 20.0)).collect();
        let t = {
            let mut t = s;
            for &d in &cycle {
                let j = InterfaceJumps { delta_par: d, slide: 0.0, theta: Vec3::zeros(), normal: Vec3::x(), delta: d };
                t = update_state(&t, &j, &Vec3::zeros(), &Vec3::zeros(), &p, InitiationMode::Mixed);
            }
            t
        };
        assert_eq!(t.delta_max, dmax);
        assert_relative_eq!(t.dissipated(), s.dissipated(), max_relative = 1e-12);
    }

    proptest! {
        #[test]
        fn theta_is_normal_to_interface(a in proptest::collection::vec(-1.0f64..1.0, 6)) {
            let g1 = Vec3::new(a[0] + 2.0, a[1], a[2]).normalize();
            let g2 = Vec3::new(a[3] + 2.0, a[4], a[5]).normalize();
            let j = compute_jumps(&kin_at(Vec3::zeros(), g1), &kin_at(Vec3::zeros(), g2), &spall_params(), None).unwrap();
            prop_assert!(j.theta.dot(&j.normal).abs() < 1e-15);
            prop_assert!(j.delta >= 0.0);
        }

        #[test]
        fn delta_max_is_nondecreasing(path in proptest::collection::vec(-2e-7f64..6e-7, 1..60)) {
            let p = spall_params();
            let mut s = InterfaceState { alpha_n: false, f_max: p.f_c, last_force: p.f_c, ..InterfaceState::default() };
            for d in path {
                let j = InterfaceJumps { delta_par: d, slide: 0.0, theta: Vec3::zeros(), normal: Vec3::x(), delta: d.max(0.0) };
                let next = update_state(&s, &j, &Vec3::zeros(), &Vec3::zeros(), &p, InitiationMode::Mixed);
                prop_assert!(next.delta_max >= s.delta_max);
                prop_assert!(next.dissipated() >= s.dissipated() - 1e-12 * p.f_c * p.delta_c);
                if next.delta_max < p.delta_c {
                    prop_assert!((next.f_max - p.envelope(next.delta_max)).abs() <= 1e-12 * p.f_c);
                }
                s = next;
            }
        }

        #[test]
        fn effective_force_is_continuous(dmax in 1e-9f64..5e-7, d in 0.0f64..6e-7) {
            let p = spall_params();
            let s = InterfaceState { alpha_n: false, delta_max: dmax, f_max: p.envelope(dmax), ..InterfaceState::default() };
            let eps = 1e-15;
            let a = effective_force(d, &s, &p);
            let b = effective_force(d + eps, &s, &p);
            prop_assert!((a - b).abs() <= p.f_c * 1e-6);
        }

        #[test]
        fn equivalent_force_is_rotation_invariant(v in proptest::collection::vec(-1.0f64..1.0, 10)) {
            let p = spall_params();
            let n = Vec3::new(v[0] + 2.0, v[1], v[2]).normalize();
            let f = Vec3::new(v[3], v[4], v[5]) * p.f_c;
            let m0 = Vec3::new(v[6], v[7], v[8]) * p.f_c * p.radius;
            let m = m0 - n * m0.dot(&n);
            let q = Rotation3::from_axis_angle(&Unit::new_normalize(Vec3::new(v[9], 1.0, 0.3)), 2.0 * v[9]);
            let a = equivalent_force(&f, &m, &n, &p, InitiationMode::Mixed);
            let b = equivalent_force(&(q * f), &(q * m), &(q * n), &p, InitiationMode::Mixed);
            prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
        }
    }
}
