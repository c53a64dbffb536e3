//! Interface forces coupling two adjacent elements.
//!
//! Local vectors have 24 entries: the minus element's 12 DOFs followed by the
//! plus element's. The minus side is evaluated at ξ = +1, the plus side at
//! ξ = −1, and jumps are ⟦a⟧ = a⁺ − a⁻.

use nalgebra::{SMatrix, SVector};

use crate::beam::{
    d_g1_times_vector, interpolate_weights, shape_functions, skew, DofWeights, ElementDofs, KinematicTangents,
    LocalKinematics, Mat3, MaterialSection, Vec3,
};
use crate::cohesive::{cohesive_tractions, compute_jumps, InterfaceJumps, InterfaceState};
use crate::error::{Error, Result};

use super::{Fracture, PenaltyParams};

pub type Vec24 = SVector<f64, 24>;
pub type Mat24 = SMatrix<f64, 24, 24>;

const MINUS_POS: usize = 6;
const MINUS_TAN: usize = 9;
const PLUS_POS: usize = 12;
const PLUS_TAN: usize = 15;

/// Interface-side inputs shared by the force and tangent evaluations.
#[derive(Clone, Copy, Debug)]
pub struct InterfaceEval {
    pub minus: LocalKinematics,
    pub plus: LocalKinematics,
    pub w_minus: DofWeights,
    pub w_plus: DofWeights,
    /// ⟨f⟩ (N)
    pub mean_f: Vec3,
    /// ⟨m⊥⟩ (N·m)
    pub mean_m: Vec3,
    /// ⟨EA/h⟩ (N/m)
    pub ea_h: f64,
    /// ⟨EI/h⟩ (N·m)
    pub ei_h: f64,
}

pub struct InterfaceContext<'a> {
    pub sec_minus: &'a MaterialSection,
    pub sec_plus: &'a MaterialSection,
    pub penalty: &'a PenaltyParams,
    pub fracture: Option<&'a Fracture>,
    pub dist_moment: Vec3,
    pub floor: f64,
    pub index: usize,
}

fn tag_element(e: Error, element: usize) -> Error {
    match e {
        Error::DegenerateElement { norm, floor, .. } => Error::DegenerateElement { element, norm, floor },
        other => other,
    }
}

fn tag_interface(e: Error, interface: usize) -> Error {
    match e {
        Error::DegenerateNormal { .. } => Error::DegenerateNormal { interface },
        other => other,
    }
}

pub fn evaluate(ctx: &InterfaceContext, xm: &ElementDofs, xp: &ElementDofs) -> Result<InterfaceEval> {
    let w_minus = shape_functions(1.0, xm.length)?.dof_weights();
    let w_plus = shape_functions(-1.0, xp.length)?.dof_weights();
    let minus = interpolate_weights(xm, &w_minus, ctx.floor).map_err(|e| tag_element(e, ctx.index))?;
    let plus = interpolate_weights(xp, &w_plus, ctx.floor).map_err(|e| tag_element(e, ctx.index + 1))?;
    let (sm, sp) = (ctx.sec_minus, ctx.sec_plus);
    let side_f =
        |k: &LocalKinematics, s: &MaterialSection| k.t1 * s.ea() + k.t6 * s.ei() + k.t4.cross(&ctx.dist_moment);
    Ok(InterfaceEval {
        mean_f: (side_f(&minus, sm) + side_f(&plus, sp)) * 0.5,
        mean_m: (minus.kappa * sm.ei() + plus.kappa * sp.ei()) * 0.5,
        ea_h: 0.5 * (sm.ea() / xm.length + sp.ea() / xp.length),
        ei_h: 0.5 * (sm.ei() / xm.length + sp.ei() / xp.length),
        minus,
        plus,
        w_minus,
        w_plus,
    })
}

/// Jumps of an evaluated interface; `None` without a fracture model.
pub fn jumps(ctx: &InterfaceContext, ev: &InterfaceEval, state: &InterfaceState) -> Result<Option<InterfaceJumps>> {
    match ctx.fracture {
        None => Ok(None),
        Some(fr) => compute_jumps(&ev.minus, &ev.plus, &fr.params, state.cached_normal)
            .map(Some)
            .map_err(|e| tag_interface(e, ctx.index)),
    }
}

/// True when the interface carries the full DG coupling.
pub fn is_intact(ctx: &InterfaceContext, state: &InterfaceState) -> bool {
    ctx.fracture.is_none() || (state.alpha_n && state.gamma_n)
}

fn add3(v: &mut Vec24, at: usize, w: &Vec3) {
    {
        let mut view = v.fixed_rows_mut::<3>(at);
        view += w;
    }
}

/// Interface force vector and the evaluation it was computed from.
pub fn force(
    ctx: &InterfaceContext,
    xm: &ElementDofs,
    xp: &ElementDofs,
    state: &InterfaceState,
) -> Result<(Vec24, InterfaceEval)> {
    let ev = evaluate(ctx, xm, xp)?;
    let beta_p = ctx.penalty.beta_p;
    let beta_t = ctx.penalty.beta_t;
    let jump_r = ev.plus.r - ev.minus.r;
    let jump_g = ev.plus.g1 - ev.minus.g1;
    let mut f = Vec24::zeros();

    let (f_pos, m_minus, m_plus) = if is_intact(ctx, state) {
        let f_pos = ev.mean_f + jump_r * (beta_p * ev.ea_h);
        let tm = ev.mean_m.cross(&ev.minus.t4) + ev.minus.g1_jac * jump_g * (beta_t * ev.ei_h);
        let tp = ev.mean_m.cross(&ev.plus.t4) + ev.plus.g1_jac * jump_g * (beta_t * ev.ei_h);
        (f_pos, tm, tp)
    } else {
        let fr = ctx.fracture.expect("cracked interface without fracture model");
        let j = jumps(ctx, &ev, state)?.expect("fracture model present");
        let n = j.normal;
        let par = |v: &Vec3| n * v.dot(&n);
        let gamma = state.gamma();
        let mut f_pos = if state.alpha_n {
            n * (n.dot(&ev.mean_f) + j.delta_par * (beta_p * ev.ea_h))
        } else {
            // closed crack: penalty contact on the current overlap, along the
            // normal frozen at initiation
            let n0 = state.crack_normal.unwrap_or(n);
            n0 * (jump_r.dot(&n0).min(0.0) * (beta_p * ev.ea_h))
        };
        f_pos += (ev.mean_f - par(&ev.mean_f) + (jump_r - par(&jump_r)) * (beta_p * ev.ea_h)) * gamma;
        let (mut tm, mut tp) = (Vec3::zeros(), Vec3::zeros());
        if state.alpha_n {
            tm = ev.mean_m.cross(&ev.minus.t4) + ev.minus.g1_jac * jump_g * (beta_t * ev.ei_h);
            tp = ev.mean_m.cross(&ev.plus.t4) + ev.plus.g1_jac * jump_g * (beta_t * ev.ei_h);
        } else {
            let (f_coh, m_coh) = cohesive_tractions(&j, state, &fr.params);
            f_pos += f_coh;
            tm += ev.minus.g1_jac * m_coh;
            tp += ev.plus.g1_jac * m_coh;
        }
        (f_pos, tm, tp)
    };
    add3(&mut f, MINUS_POS, &-f_pos);
    add3(&mut f, PLUS_POS, &f_pos);
    add3(&mut f, MINUS_TAN, &-m_minus);
    add3(&mut f, PLUS_TAN, &m_plus);
    Ok((f, ev))
}

/// Analytic tangent of the intact (DG) interface force.
pub fn tangent_dg(ctx: &InterfaceContext, ev: &InterfaceEval) -> Mat24 {
    let beta_p = ctx.penalty.beta_p;
    let beta_t = ctx.penalty.beta_t;
    let jump_g = ev.plus.g1 - ev.minus.g1;
    let mut k = Mat24::zeros();
    let sides =
        [(&ev.minus, &ev.w_minus, ctx.sec_minus, 0usize, -1.0), (&ev.plus, &ev.w_plus, ctx.sec_plus, 12usize, 1.0)];
    let tans = [KinematicTangents::new(&ev.minus), KinematicTangents::new(&ev.plus)];
    let s_mt = skew(&ctx.dist_moment);
    let s_mean_m = skew(&ev.mean_m);
    for (q, (kin_q, w_q, sec_q, off_q, sign_q)) in sides.iter().enumerate() {
        let tq = &tans[q];
        for b in 0..4 {
            let (d1, d2, d3) = (w_q.d1[b], w_q.d2[b], w_q.d3[b]);
            let col = off_q + 3 * b;
            // ∂⟨f⟩ and ∂⟨m⟩ with respect to slot b of side q
            let dmean_f: Mat3 = (tq.dt1_d1 * (sec_q.ea() * d1)
                + (tq.dt6_d1 * d1 + tq.dt6_d2 * d2 + tq.dt6_d3 * d3) * sec_q.ei()
                - s_mt * tq.dt4_d1 * d1)
                * 0.5;
            let dmean_m: Mat3 = (tq.dkappa_d1 * d1 + tq.dkappa_d2 * d2) * (0.5 * sec_q.ei());
            let mut dpos = dmean_f;
            if w_q.n[b] != 0.0 {
                dpos += Mat3::identity() * (sign_q * w_q.n[b] * beta_p * ev.ea_h);
            }
            // ∂⟦g1⟧ = ±G1 dr' of side q
            let djump_g: Mat3 = kin_q.g1_jac * (sign_q * d1);
            {
                let mut view = k.fixed_view_mut::<3, 3>(MINUS_POS, col);
                view -= &dpos;
            }
            {
                let mut view = k.fixed_view_mut::<3, 3>(PLUS_POS, col);
                view += &dpos;
            }
            for (s, (kin_s, _, _, _, sign_s)) in sides.iter().enumerate() {
                let ts = &tans[s];
                let mut dt: Mat3 = -skew(&kin_s.t4) * dmean_m + kin_s.g1_jac * djump_g * (beta_t * ev.ei_h);
                if s == q {
                    dt += s_mean_m * ts.dt4_d1 * d1;
                    dt += d_g1_times_vector(kin_s, &jump_g) * (d1 * beta_t * ev.ei_h);
                }
                let row = if s == 0 { MINUS_TAN } else { PLUS_TAN };
                {
                    let mut view = k.fixed_view_mut::<3, 3>(row, col);
                    view += &(dt * *sign_s);
                }
            }
        }
    }
    k
}

/// Central-difference tangent of the interface force at frozen history.
pub fn tangent_fd(ctx: &InterfaceContext, xm: &ElementDofs, xp: &ElementDofs, state: &InterfaceState) -> Result<Mat24> {
    let mut x = [0.0; 24];
    xm.write_to(&mut x[..12]);
    xp.write_to(&mut x[12..]);
    let mut k = Mat24::zeros();
    let split =
        |x: &[f64; 24]| (ElementDofs::from_slice(&x[..12], xm.length), ElementDofs::from_slice(&x[12..], xp.length));
    for j in 0..24 {
        let len = if j < 12 { xm.length } else { xp.length };
        let h = 1e-7 * if (j / 3) % 2 == 0 { len } else { 1.0 };
        let mut a = x;
        let mut b = x;
        a[j] += h;
        b[j] -= h;
        let (am, ap) = split(&a);
        let (bm, bp) = split(&b);
        let (fa, _) = force(ctx, &am, &ap, state)?;
        let (fb, _) = force(ctx, &bm, &bp, state)?;
        k.set_column(j, &((fa - fb) / (2.0 * h)));
    }
    Ok(k)
}

/// Stored interface energy: penalty terms of the active couplings plus the
/// recoverable cohesive energy ½ f Δ.
pub fn energy(ctx: &InterfaceContext, ev: &InterfaceEval, state: &InterfaceState) -> Result<f64> {
    let beta_p = ctx.penalty.beta_p;
    let beta_t = ctx.penalty.beta_t;
    let jump_r = ev.plus.r - ev.minus.r;
    let jump_g = ev.plus.g1 - ev.minus.g1;
    if is_intact(ctx, state) {
        return Ok(0.5 * beta_p * ev.ea_h * jump_r.norm_squared() + 0.5 * beta_t * ev.ei_h * jump_g.norm_squared());
    }
    let j = jumps(ctx, ev, state)?.expect("fracture model present");
    let fr = ctx.fracture.expect("fracture model present");
    let par = jump_r.dot(&j.normal);
    let perp2 = (jump_r.norm_squared() - par * par).max(0.0);
    let mut e = 0.5 * beta_p * ev.ea_h * perp2 * state.gamma();
    if !state.alpha_n {
        let closing = jump_r.dot(&state.crack_normal.unwrap_or(j.normal)).min(0.0);
        e += 0.5 * beta_p * ev.ea_h * closing * closing;
    }
    if !state.alpha_n {
        e += 0.5 * crate::cohesive::effective_force(j.delta, state, &fr.params) * j.delta;
    }
    Ok(e)
}
