//! External forces and their configuration-dependent tangent.

use crate::beam::{interpolate_weights, shape_functions, skew, KinematicTangents, Mat3, Vec3};
use crate::error::Result;
use crate::linalg::BandMatrix;
use crate::mesh::{DofKind, End};
use crate::quadrature::GaussRule;

use super::Model;

/// f_ext at load parameter `t`.
pub fn assemble_external(model: &Model, x: &[f64], t: f64) -> Result<Vec<f64>> {
    let mesh = &model.mesh;
    let loads = &model.loads;
    let mut f = vec![0.0; mesh.n_dofs()];
    let f_dist = loads.distributed_force_at(t);
    let m_dist = loads.distributed_moment_at(t);
    if f_dist != Vec3::zeros() || m_dist != Vec3::zeros() {
        let rule = GaussRule::bulk();
        for e in 0..mesh.n_elements() {
            let dofs = mesh.element_dofs(x, e);
            let base = mesh.element_range(e).start;
            for (xi, w) in rule.iter() {
                let shape = shape_functions(xi, dofs.length)?;
                let wt = shape.dof_weights();
                let k = interpolate_weights(&dofs, &wt, model.floor)?;
                let jw = w * shape.jacobian();
                let mt = m_dist.cross(&k.t4);
                for a in 0..4 {
                    let v = (f_dist * wt.n[a] + mt * wt.d1[a]) * jw;
                    for c in 0..3 {
                        f[base + 3 * a + c] += v[c];
                    }
                }
            }
        }
    }
    for p in &loads.point_forces {
        let v = p.force * p.program.value(t);
        for (c, d) in p.node.dofs(DofKind::Position).into_iter().enumerate() {
            f[d] += v[c];
        }
    }
    for m in &loads.end_moments {
        let dofs = mesh.element_dofs(x, m.node.element);
        let wt = shape_functions(m.node.end.xi(), dofs.length)?.dof_weights();
        let k = interpolate_weights(&dofs, &wt, model.floor)?;
        let v = (m.moment * m.program.value(t)).cross(&k.t4);
        for (c, d) in m.node.dofs(DofKind::Tangent).into_iter().enumerate() {
            f[d] += v[c];
        }
    }
    Ok(f)
}

/// Subtracts ∂f_ext/∂x from `k`.
pub fn subtract_external_tangent(model: &Model, x: &[f64], t: f64, k: &mut BandMatrix) -> Result<()> {
    let mesh = &model.mesh;
    let loads = &model.loads;
    let m_dist = loads.distributed_moment_at(t);
    if m_dist != Vec3::zeros() {
        let rule = GaussRule::bulk();
        let s = skew(&m_dist);
        for e in 0..mesh.n_elements() {
            let dofs = mesh.element_dofs(x, e);
            let base = mesh.element_range(e).start;
            for (xi, w) in rule.iter() {
                let shape = shape_functions(xi, dofs.length)?;
                let wt = shape.dof_weights();
                let kin = interpolate_weights(&dofs, &wt, model.floor)?;
                let q: Mat3 = s * KinematicTangents::new(&kin).dt4_d1 * (w * shape.jacobian());
                for a in 0..4 {
                    for b in 0..4 {
                        add_block(k, base + 3 * a, base + 3 * b, &(q * (-wt.d1[a] * wt.d1[b])));
                    }
                }
            }
        }
    }
    for m in &loads.end_moments {
        let dofs = mesh.element_dofs(x, m.node.element);
        let wt = shape_functions(m.node.end.xi(), dofs.length)?.dof_weights();
        let kin = interpolate_weights(&dofs, &wt, model.floor)?;
        let q: Mat3 = skew(&(m.moment * m.program.value(t))) * KinematicTangents::new(&kin).dt4_d1;
        let base = mesh.element_range(m.node.element).start;
        let row = base + if m.node.end == End::Start { 3 } else { 9 };
        for b in 0..4 {
            if wt.d1[b] != 0.0 {
                add_block(k, row, base + 3 * b, &(q * -wt.d1[b]));
            }
        }
    }
    Ok(())
}

pub(crate) fn add_block(k: &mut BandMatrix, row: usize, col: usize, blk: &Mat3) {
    for i in 0..3 {
        for j in 0..3 {
            k.add(row + i, col + j, blk[(i, j)]);
        }
    }
}
