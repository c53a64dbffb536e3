//! Consistent and lumped mass.

use nalgebra::SMatrix;

use crate::beam::{shape_functions, MaterialSection};
use crate::linalg::BandMatrix;
use crate::mesh::{BeamMesh, BANDWIDTH};
use crate::quadrature::GaussRule;

/// Scalar 4×4 Hermite mass of one element in slot order `[p1, t1, p2, t2]`.
pub fn element_mass(length: f64, sec: &MaterialSection, rule: &GaussRule) -> SMatrix<f64, 4, 4> {
    let rho_a = sec.mass_per_length();
    let mut m = SMatrix::<f64, 4, 4>::zeros();
    for (xi, w) in rule.iter() {
        let shape = shape_functions(xi, length).expect("Gauss point inside element");
        let n = shape.dof_weights().n;
        let jw = w * shape.jacobian() * rho_a;
        for a in 0..4 {
            for b in 0..4 {
                m[(a, b)] += n[a] * n[b] * jw;
            }
        }
    }
    m
}

/// HRZ lumping: diagonal of the consistent mass, scaled so the translational
/// mass of the element is ρAh in each direction.
pub fn element_lumped(length: f64, sec: &MaterialSection, rule: &GaussRule) -> [f64; 4] {
    let m = element_mass(length, sec, rule);
    let scale = sec.mass_per_length() * length / (m[(0, 0)] + m[(2, 2)]);
    [m[(0, 0)] * scale, m[(1, 1)] * scale, m[(2, 2)] * scale, m[(3, 3)] * scale]
}

/// Consistent mass (banded) and its HRZ-lumped diagonal.
pub fn assemble_mass(mesh: &BeamMesh, sections: &[MaterialSection]) -> (BandMatrix, Vec<f64>) {
    let rule = GaussRule::bulk();
    let n = mesh.n_dofs();
    let mut mass = BandMatrix::zeros(n, BANDWIDTH, BANDWIDTH);
    let mut lumped = vec![0.0; n];
    for e in 0..mesh.n_elements() {
        let h = mesh.length(e);
        let base = mesh.element_range(e).start;
        let m = element_mass(h, &sections[e], &rule);
        let l = element_lumped(h, &sections[e], &rule);
        for a in 0..4 {
            for c in 0..3 {
                lumped[base + 3 * a + c] = l[a];
                for b in 0..4 {
                    mass.add(base + 3 * a + c, base + 3 * b + c, m[(a, b)]);
                }
            }
        }
    }
    (mass, lumped)
}
