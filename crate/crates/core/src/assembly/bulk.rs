//! Element (bulk) internal forces, stiffness and strain energy.

use nalgebra::{SMatrix, SVector};

use crate::beam::{interpolate_weights, shape_functions, ElementDofs, KinematicTangents, Mat3, MaterialSection};
use crate::error::Result;
use crate::quadrature::GaussRule;

pub type Vec12 = SVector<f64, 12>;
pub type Mat12 = SMatrix<f64, 12, 12>;

/// ∫ [N'_a (EA t1 + EI t2) + N''_a EI t3] ds over one element.
pub fn element_force(dofs: &ElementDofs, sec: &MaterialSection, rule: &GaussRule, floor: f64) -> Result<Vec12> {
    let (ea, ei) = (sec.ea(), sec.ei());
    let mut f = Vec12::zeros();
    for (xi, w) in rule.iter() {
        let shape = shape_functions(xi, dofs.length)?;
        let wt = shape.dof_weights();
        let k = interpolate_weights(dofs, &wt, floor)?;
        let jw = w * shape.jacobian();
        let q1 = (k.t1 * ea + k.t2 * ei) * jw;
        let q2 = k.t3 * (ei * jw);
        for a in 0..4 {
            let v = q1 * wt.d1[a] + q2 * wt.d2[a];
            {
                let mut view = f.fixed_rows_mut::<3>(3 * a);
                view += &v;
            }
        }
    }
    Ok(f)
}

/// Consistent tangent ∂f_int/∂x of one element; symmetric.
pub fn element_tangent(dofs: &ElementDofs, sec: &MaterialSection, rule: &GaussRule, floor: f64) -> Result<Mat12> {
    let (ea, ei) = (sec.ea(), sec.ei());
    let mut kmat = Mat12::zeros();
    for (xi, w) in rule.iter() {
        let shape = shape_functions(xi, dofs.length)?;
        let wt = shape.dof_weights();
        let k = interpolate_weights(dofs, &wt, floor)?;
        let tan = KinematicTangents::new(&k);
        let jw = w * shape.jacobian();
        // d(EA t1 + EI t2) = A11 dr' + A12 dr''; d(EI t3) = A21 dr' + A22 dr''
        let a11: Mat3 = (tan.dt1_d1 * ea + tan.dt2_d1 * ei) * jw;
        let a12: Mat3 = tan.dt2_d2 * (ei * jw);
        let a21: Mat3 = tan.dt3_d1 * (ei * jw);
        let a22: Mat3 = tan.dt3_d2 * (ei * jw);
        for a in 0..4 {
            let (d1a, d2a) = (wt.d1[a], wt.d2[a]);
            for b in 0..4 {
                let (d1b, d2b) = (wt.d1[b], wt.d2[b]);
                let blk = a11 * (d1a * d1b) + a12 * (d1a * d2b) + a21 * (d2a * d1b) + a22 * (d2a * d2b);
                {
                    let mut view = kmat.fixed_view_mut::<3, 3>(3 * a, 3 * b);
                    view += &blk;
                }
            }
        }
    }
    Ok(kmat)
}

/// ∫ ½EAε² + ½EI|κ|² ds over one element.
pub fn element_energy(dofs: &ElementDofs, sec: &MaterialSection, rule: &GaussRule, floor: f64) -> Result<f64> {
    let mut e = 0.0;
    for (xi, w) in rule.iter() {
        let shape = shape_functions(xi, dofs.length)?;
        let k = interpolate_weights(dofs, &shape.dof_weights(), floor)?;
        e += w * shape.jacobian() * 0.5 * (sec.ea() * k.eps * k.eps + sec.ei() * k.kappa.norm_squared());
    }
    Ok(e)
}
