//! Element kinematics and constitutive law of the torsion-free Kirchhoff beam.
//!
//! The centerline of each element is a cubic Hermite curve in the parametric
//! coordinate `xi` on [-1, 1], driven by the position and (unnormalized)
//! tangent of its two nodes. Everything here is a pure function of its
//! inputs.

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;
pub type Mat3 = Matrix3<f64>;

/// Floor on |r'| below which an element is treated as degenerate.
///
/// r' is dimensionless (derivative with respect to reference arc length), so
/// the floor is relative to the unit stretch of the reference state.
pub const DEFAULT_DEGENERACY_FLOOR: f64 = 1e-12;

/// Isotropic circular cross-section.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MaterialSection {
    /// Young's modulus (Pa).
    pub youngs_modulus: f64,
    /// Mass density (kg/m³).
    pub density: f64,
    /// Cross-section radius (m).
    pub radius: f64,
    /// Area π R² (m²).
    pub area: f64,
    /// Second moment of area π R⁴ / 4 (m⁴).
    pub inertia: f64,
}

impl MaterialSection {
    pub fn circular(youngs_modulus: f64, density: f64, radius: f64) -> Result<Self> {
        for (name, v) in [("youngs_modulus", youngs_modulus), ("density", density), ("radius", radius)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Domain(format!("{name} must be positive, got {v}")));
            }
        }
        let pi = std::f64::consts::PI;
        Ok(MaterialSection {
            youngs_modulus,
            density,
            radius,
            area: pi * radius * radius,
            inertia: pi * radius.powi(4) / 4.0,
        })
    }

    /// Axial stiffness EA (N).
    pub fn ea(&self) -> f64 {
        self.youngs_modulus * self.area
    }

    /// Bending stiffness EI (N·m²).
    pub fn ei(&self) -> f64 {
        self.youngs_modulus * self.inertia
    }

    /// Mass per unit length ρA (kg/m).
    pub fn mass_per_length(&self) -> f64 {
        self.density * self.area
    }

    /// Longitudinal wave speed √(E/ρ) (m/s).
    pub fn wave_speed(&self) -> f64 {
        (self.youngs_modulus / self.density).sqrt()
    }
}

/// Mixed Hermite degrees of freedom of one element.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ElementDofs {
    pub p1: Vec3,
    pub t1: Vec3,
    pub p2: Vec3,
    pub t2: Vec3,
    /// Reference length (m).
    pub length: f64,
}

impl ElementDofs {
    /// Straight, unstretched element starting at `start` along the unit vector `dir`.
    pub fn reference(start: Vec3, dir: Vec3, length: f64) -> Self {
        let d = dir.normalize();
        ElementDofs { p1: start, t1: d, p2: start + d * length, t2: d, length }
    }

    /// Reads the 12 element DOFs laid out as `[p1, t1, p2, t2]`.
    pub fn from_slice(x: &[f64], length: f64) -> Self {
        let v = |k: usize| Vec3::new(x[3 * k], x[3 * k + 1], x[3 * k + 2]);
        ElementDofs { p1: v(0), t1: v(1), p2: v(2), t2: v(3), length }
    }

    pub fn write_to(&self, x: &mut [f64]) {
        for (k, v) in self.slots().iter().enumerate() {
            x[3 * k..3 * k + 3].copy_from_slice(v.as_slice());
        }
    }

    /// DOF vectors in slot order `[p1, t1, p2, t2]`.
    pub fn slots(&self) -> [Vec3; 4] {
        [self.p1, self.t1, self.p2, self.t2]
    }

    /// Applies the same rotation to every DOF vector and translates positions.
    pub fn transformed(&self, rot: &Mat3, shift: &Vec3) -> Self {
        ElementDofs {
            p1: rot * self.p1 + shift,
            t1: rot * self.t1,
            p2: rot * self.p2 + shift,
            t2: rot * self.t2,
            length: self.length,
        }
    }
}

/// The four Hermite shape functions and their parametric derivatives.
///
/// Arrays are ordered `[N_p1, N_p2, N_t1, N_t2]`.
#[derive(Clone, Copy, Debug)]
pub struct ShapeEval {
    pub xi: f64,
    pub length: f64,
    pub values: [f64; 4],
    pub d1: [f64; 4],
    pub d2: [f64; 4],
    pub d3: [f64; 4],
}

pub fn shape_functions(xi: f64, length: f64) -> Result<ShapeEval> {
    if !(-1.0..=1.0).contains(&xi) {
        return Err(Error::Domain(format!("parametric coordinate {xi} outside [-1, 1]")));
    }
    if !(length > 0.0) {
        return Err(Error::Domain(format!("element length must be positive, got {length}")));
    }
    let x2 = xi * xi;
    let x3 = x2 * xi;
    Ok(ShapeEval {
        xi,
        length,
        values: [
            0.25 * (2.0 - 3.0 * xi + x3),
            0.25 * (2.0 + 3.0 * xi - x3),
            0.25 * (1.0 - xi - x2 + x3),
            0.25 * (-1.0 - xi + x2 + x3),
        ],
        d1: [
            0.25 * (-3.0 + 3.0 * x2),
            0.25 * (3.0 - 3.0 * x2),
            0.25 * (-1.0 - 2.0 * xi + 3.0 * x2),
            0.25 * (-1.0 + 2.0 * xi + 3.0 * x2),
        ],
        d2: [1.5 * xi, -1.5 * xi, 0.25 * (-2.0 + 6.0 * xi), 0.25 * (2.0 + 6.0 * xi)],
        d3: [1.5, -1.5, 1.5, 1.5],
    })
}

/// Shape weights multiplying each DOF slot `[p1, t1, p2, t2]`, differentiated
/// with respect to arc length (`ds = L/2 dξ`, tangent slots scaled by L/2).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DofWeights {
    pub n: [f64; 4],
    pub d1: [f64; 4],
    pub d2: [f64; 4],
    pub d3: [f64; 4],
}

impl ShapeEval {
    /// Jacobian ds/dξ.
    pub fn jacobian(&self) -> f64 {
        0.5 * self.length
    }

    pub fn dof_weights(&self) -> DofWeights {
        let half = 0.5 * self.length;
        let j1 = 1.0 / half;
        let j2 = j1 * j1;
        let j3 = j2 * j1;
        // slot order p1, t1, p2, t2 <- shape order Np1, Np2, Nt1, Nt2
        let reorder = |a: &[f64; 4], scale: f64| [a[0] * scale, a[2] * half * scale, a[1] * scale, a[3] * half * scale];
        DofWeights {
            n: reorder(&self.values, 1.0),
            d1: reorder(&self.d1, j1),
            d2: reorder(&self.d2, j2),
            d3: reorder(&self.d3, j3),
        }
    }
}

/// Kinematic fields at one point of an element.
///
/// `t1`..`t6` and `g1_jac` are the auxiliary quantities that appear in the
/// nodal force vectors and their linearization.
#[derive(Clone, Copy, Debug)]
pub struct LocalKinematics {
    pub r: Vec3,
    pub r1: Vec3,
    pub r2: Vec3,
    pub r3: Vec3,
    /// |r'|
    pub stretch: f64,
    pub eps: f64,
    pub kappa: Vec3,
    pub g1: Vec3,
    pub t1: Vec3,
    pub t2: Vec3,
    pub t3: Vec3,
    pub t4: Vec3,
    pub t6: Vec3,
    /// ∂g1/∂r' = I/|r'| − r'⊗r'/|r'|³
    pub g1_jac: Mat3,
}

impl LocalKinematics {
    pub fn from_derivatives(r: Vec3, r1: Vec3, r2: Vec3, r3: Vec3, floor: f64) -> Result<Self> {
        let n = r1.norm();
        if !(n > floor) {
            return Err(Error::DegenerateElement { element: 0, norm: n, floor });
        }
        let n2 = n * n;
        let n4 = n2 * n2;
        let n6 = n4 * n2;
        let ab = r1.dot(&r2);
        let bb = r2.dot(&r2);
        let ac = r1.dot(&r3);
        let g1 = r1 / n;
        let eps = n - 1.0;
        Ok(LocalKinematics {
            r,
            r1,
            r2,
            r3,
            stretch: n,
            eps,
            kappa: r1.cross(&r2) / n2,
            g1,
            t1: g1 * eps,
            t2: r1 * (2.0 * ab * ab / n6) - (r1 * bb + r2 * ab) / n4,
            t3: r2 / n2 - r1 * (ab / n4),
            t4: r1 / n2,
            t6: r2 * (2.0 * ab / n4) + r1 * (ac / n4) - r1 * (2.0 * ab * ab / n6) - r3 / n2,
            g1_jac: Mat3::identity() / n - r1 * r1.transpose() / (n2 * n),
        })
    }
}

/// Evaluates the centerline kinematics of `dofs` at `xi`.
pub fn interpolate(dofs: &ElementDofs, xi: f64) -> Result<LocalKinematics> {
    let shape = shape_functions(xi, dofs.length)?;
    interpolate_weights(dofs, &shape.dof_weights(), DEFAULT_DEGENERACY_FLOOR)
}

pub fn interpolate_weights(dofs: &ElementDofs, w: &DofWeights, floor: f64) -> Result<LocalKinematics> {
    let x = dofs.slots();
    let mut r = Vec3::zeros();
    let mut r1 = Vec3::zeros();
    let mut r2 = Vec3::zeros();
    let mut r3 = Vec3::zeros();
    for a in 0..4 {
        r += x[a] * w.n[a];
        r1 += x[a] * w.d1[a];
        r2 += x[a] * w.d2[a];
        r3 += x[a] * w.d3[a];
    }
    LocalKinematics::from_derivatives(r, r1, r2, r3, floor)
}

/// Axial force f∥ = EA ε r'/|r'| (N).
pub fn axial_force(kin: &LocalKinematics, sec: &MaterialSection) -> Vec3 {
    kin.t1 * sec.ea()
}

/// Bending moment m⊥ = EI κ (N·m).
pub fn bending_moment(kin: &LocalKinematics, sec: &MaterialSection) -> Vec3 {
    kin.kappa * sec.ei()
}

/// Shear force f⊥ = r'/|r'|² × (m⊥' + m̃⊥) for an elastic section (N).
pub fn shear_force(kin: &LocalKinematics, sec: &MaterialSection, dist_moment: &Vec3) -> Vec3 {
    kin.t6 * sec.ei() + kin.t4.cross(dist_moment)
}

/// Total internal force resultant f = f∥ + f⊥ (N).
pub fn internal_force(kin: &LocalKinematics, sec: &MaterialSection, dist_moment: &Vec3) -> Vec3 {
    axial_force(kin, sec) + shear_force(kin, sec, dist_moment)
}

/// S(a) with S(a) b = a × b.
pub fn skew(a: &Vec3) -> Mat3 {
    Mat3::new(0.0, -a.z, a.y, a.z, 0.0, -a.x, -a.y, a.x, 0.0)
}

fn outer(a: &Vec3, b: &Vec3) -> Mat3 {
    a * b.transpose()
}

/// Partial derivatives of the auxiliary vectors with respect to r', r'' and r'''.
///
/// The derivative of any of them with respect to a DOF slot `b` follows by the
/// chain rule, e.g. `∂t2/∂x_b = dt2_d1 · S'_b + dt2_d2 · S''_b`.
#[derive(Clone, Copy, Debug)]
pub struct KinematicTangents {
    pub dt1_d1: Mat3,
    pub dt2_d1: Mat3,
    pub dt2_d2: Mat3,
    pub dt3_d1: Mat3,
    pub dt3_d2: Mat3,
    pub dt4_d1: Mat3,
    pub dt6_d1: Mat3,
    pub dt6_d2: Mat3,
    pub dt6_d3: Mat3,
    pub dkappa_d1: Mat3,
    pub dkappa_d2: Mat3,
}

impl KinematicTangents {
    pub fn new(kin: &LocalKinematics) -> Self {
        let a = &kin.r1;
        let b = &kin.r2;
        let c = &kin.r3;
        let n = kin.stretch;
        let n2 = n * n;
        let n3 = n2 * n;
        let n4 = n2 * n2;
        let n6 = n4 * n2;
        let n8 = n4 * n4;
        let ab = a.dot(b);
        let bb = b.dot(b);
        let ac = a.dot(c);
        let id = Mat3::identity();
        let aa = outer(a, a);
        let abo = outer(a, b);
        let bao = outer(b, a);
        let bbo = outer(b, b);

        let dt1_d1 = id * ((n - 1.0) / n) + aa / n3;
        let dt2_d1 = id * (2.0 * ab * ab / n6 - bb / n4)
            + aa * (-12.0 * ab * ab / n8 + 4.0 * bb / n6)
            + abo * (4.0 * ab / n6)
            + bao * (4.0 * ab / n6)
            - bbo / n4;
        let dt2_d2 = id * (-ab / n4) + aa * (4.0 * ab / n6) - abo * (2.0 / n4) - bao / n4;
        let dt3_d1 = id * (-ab / n4) + aa * (4.0 * ab / n6) - bao * (2.0 / n4) - abo / n4;
        let dt3_d2 = id / n2 - aa / n4;
        let dt4_d1 = id / n2 - aa * (2.0 / n4);
        let dt6_d1 = id * (ac / n4 - 2.0 * ab * ab / n6) + aa * (12.0 * ab * ab / n8 - 4.0 * ac / n6)
            - abo * (4.0 * ab / n6)
            - bao * (8.0 * ab / n6)
            + bbo * (2.0 / n4)
            + outer(a, c) / n4
            + outer(c, a) * (2.0 / n4);
        let dt6_d2 = id * (2.0 * ab / n4) + bao * (2.0 / n4) - aa * (4.0 * ab / n6);
        let dt6_d3 = aa / n4 - id / n2;
        let dkappa_d1 = -skew(b) * dt4_d1;
        let dkappa_d2 = skew(&kin.t4);
        KinematicTangents {
            dt1_d1,
            dt2_d1,
            dt2_d2,
            dt3_d1,
            dt3_d2,
            dt4_d1,
            dt6_d1,
            dt6_d2,
            dt6_d3,
            dkappa_d1,
            dkappa_d2,
        }
    }
}

/// ∂(G1 j)/∂r' at fixed j, where G1 = ∂g1/∂r'.
pub fn d_g1_times_vector(kin: &LocalKinematics, j: &Vec3) -> Mat3 {
    let a = &kin.r1;
    let n = kin.stretch;
    let n3 = n * n * n;
    let n5 = n3 * n * n;
    let aj = a.dot(j);
    -(outer(j, a) + outer(a, j) + Mat3::identity() * aj) / n3 + outer(a, a) * (3.0 * aj / n5)
}
