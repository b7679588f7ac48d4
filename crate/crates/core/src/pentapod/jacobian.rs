use nalgebra::SMatrix;
use num_rational::BigRational;

use super::architecture::{Architecture, Configuration};
use crate::polyalg::{det_poly, rint, vars, MultiPoly, Vars};

pub type Jacobian = SMatrix<f64, 5, 6>;

/// Pose variables in canonical order.
pub const POSE_VARS: [&str; 6] = ["u", "v", "w", "px", "py", "pz"];

pub fn pose_vars() -> Vars {
    vars(&POSE_VARS)
}

/// Default relative threshold on `σ_5/σ_1`.
pub const DEFAULT_SIGMA_TOL: f64 = 1e-8;

/// Row `j` is `(l_j, l̂_j)` with `l_j = p + r_j·i − a_j` and
/// `l̂_j = (p + r_j·i) × a_j`.
pub fn jacobian(arch: &Architecture, c: &Configuration) -> Jacobian {
    let mut jac = Jacobian::zeros();
    for j in 0..5 {
        let a = arch.base_point(j);
        let b = arch.platform_point(j, c);
        let l = b - a;
        let lh = b.cross(&a);
        for k in 0..3 {
            jac[(j, k)] = l[k];
            jac[(j, k + 3)] = lh[k];
        }
    }
    jac
}

/// Entries of the Jacobian as exact polynomials in `(u,v,w,p_x,p_y,p_z)`.
pub fn jacobian_symbolic(arch: &Architecture) -> Vec<Vec<MultiPoly<BigRational>>> {
    let vs = pose_vars();
    (0..5)
        .map(|j| {
            let a = arch.base_exact(j);
            let r = arch.offset_exact(j);
            // b_k = p_k + r·i_k
            let b: Vec<MultiPoly<BigRational>> = (0..3)
                .map(|k| {
                    let mut coeffs = vec![rint(0); 6];
                    coeffs[k] = r.clone();
                    coeffs[k + 3] = rint(1);
                    MultiPoly::linear(vs.clone(), rint(0), &coeffs)
                })
                .collect();
            let l: Vec<MultiPoly<BigRational>> =
                (0..3).map(|k| &b[k] - &MultiPoly::constant(vs.clone(), a[k].clone())).collect();
            let lh = [
                &b[1].scale(&a[2]) - &b[2].scale(&a[1]),
                &b[2].scale(&a[0]) - &b[0].scale(&a[2]),
                &b[0].scale(&a[1]) - &b[1].scale(&a[0]),
            ];
            l.into_iter().chain(lh).collect()
        })
        .collect()
}

/// `F_1..F_6`: determinants of the 5×5 submatrices with column `j` removed.
pub fn minors_symbolic(arch: &Architecture) -> [MultiPoly<BigRational>; 6] {
    let jac = jacobian_symbolic(arch);
    std::array::from_fn(|drop| {
        let sub: Vec<Vec<MultiPoly<BigRational>>> = jac
            .iter()
            .map(|row| row.iter().enumerate().filter(|(k, _)| *k != drop).map(|(_, e)| e.clone()).collect())
            .collect();
        det_poly(&sub)
    })
}

/// The six minors evaluated at a pose.
pub fn minors_at(arch: &Architecture, c: &Configuration) -> [f64; 6] {
    let jac = jacobian(arch, c);
    std::array::from_fn(|drop| {
        let sub = SMatrix::<f64, 5, 5>::from_fn(|r, k| jac[(r, if k < drop { k } else { k + 1 })]);
        sub.determinant()
    })
}

/// Minors divided by the product of the row norms (Hadamard bound), in `[0, 1]`.
pub fn normalized_minors_at(arch: &Architecture, c: &Configuration) -> [f64; 6] {
    let jac = jacobian(arch, c);
    let minors = minors_at(arch, c);
    std::array::from_fn(|drop| {
        let bound: f64 =
            (0..5).map(|r| (0..6).filter(|k| *k != drop).map(|k| jac[(r, k)].powi(2)).sum::<f64>().sqrt()).product();
        if bound == 0.0 {
            0.0
        } else {
            minors[drop].abs() / bound
        }
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SingularityCheck {
    pub singular: bool,
    pub sigma_min: f64,
    pub sigma_max: f64,
}

impl SingularityCheck {
    pub fn ratio(&self) -> f64 {
        if self.sigma_max == 0.0 {
            0.0
        } else {
            self.sigma_min / self.sigma_max
        }
    }
}

/// Rank test: singular iff `σ_5/σ_1 < tol`.
pub fn is_singular(arch: &Architecture, c: &Configuration, tol: f64) -> SingularityCheck {
    let sv = jacobian(arch, c).singular_values();
    let sigma_max = sv.max();
    let sigma_min = sv.min();
    let ratio = if sigma_max == 0.0 { 0.0 } else { sigma_min / sigma_max };
    SingularityCheck { singular: ratio < tol, sigma_min, sigma_max }
}
