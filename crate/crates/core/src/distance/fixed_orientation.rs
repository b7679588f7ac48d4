//! Pedal points on the quadric `Ω(i)` for a fixed orientation.
//!
//! For a multiplier `λ` the stationarity conditions are linear in `p`,
//! `(2I + λH)·p = 2g − λb`. Substituting the Cramer solution into `F` and
//! clearing `det(2I + λH)²` leaves the univariate `K(λ)` of degree 6.

use nalgebra::{Matrix3, Vector3};
use num_rational::BigRational;

use super::lagrangian::FixedOrientationLagrangian;
use super::newton::{newton_solve, NewtonOptions};
use super::{check_unit_target, Mode, PedalPoint, PedalSet, SolverOptions, RESIDUAL_TOL};
use crate::error::{Error, Result};
use crate::pentapod::{Architecture, Configuration, QuadricForm, SingularityModel};
use crate::polyalg::{
    interpolate_uni, is_real_root, polish_real_root, rational_from_decimal_f64, uni_roots, PolyError, Scalar, UniPoly,
};

const K_DEGREE: usize = 6;
const NODE_COUNT: usize = 9;

fn adjugate<S: Scalar>(m: &[[S; 3]; 3]) -> ([[S; 3]; 3], S) {
    let c = |r0: usize, r1: usize, c0: usize, c1: usize| {
        m[r0][c0].clone() * m[r1][c1].clone() - m[r0][c1].clone() * m[r1][c0].clone()
    };
    // adj[i][j] = cofactor(j, i)
    let adj = [
        [c(1, 2, 1, 2), -c(0, 2, 1, 2), c(0, 1, 1, 2)],
        [-c(1, 2, 0, 2), c(0, 2, 0, 2), -c(0, 1, 0, 2)],
        [c(1, 2, 0, 1), -c(0, 2, 0, 1), c(0, 1, 0, 1)],
    ];
    let det =
        m[0][0].clone() * adj[0][0].clone() + m[0][1].clone() * adj[1][0].clone() + m[0][2].clone() * adj[2][0].clone();
    (adj, det)
}

/// `(2I + λH, 2g − λb)` with `H = 2·quad`.
fn linear_system<S: Scalar>(omega: &QuadricForm<S>, target: &[S; 3], lambda: &S) -> ([[S; 3]; 3], [S; 3]) {
    let two = S::from_i64(2);
    let m = std::array::from_fn(|r| {
        std::array::from_fn(|c| {
            let diag = if r == c { two.clone() } else { S::zero() };
            diag + lambda.clone() * two.clone() * omega.quad[r][c].clone()
        })
    });
    let rhs = std::array::from_fn(|k| two.clone() * target[k].clone() - lambda.clone() * omega.linear[k].clone());
    (m, rhs)
}

/// `K(λ) = F(adj·rhs / det)·det²` at one value of `λ`.
fn k_value<S: Scalar>(omega: &QuadricForm<S>, target: &[S; 3], lambda: &S) -> S {
    let (m, rhs) = linear_system(omega, target, lambda);
    let (adj, det) = adjugate(&m);
    let q: [S; 3] = std::array::from_fn(|r| (0..3).fold(S::zero(), |acc, c| acc + adj[r][c].clone() * rhs[c].clone()));
    let mut quad = S::zero();
    let mut lin = S::zero();
    for r in 0..3 {
        lin = lin + omega.linear[r].clone() * q[r].clone();
        for c in 0..3 {
            quad = quad + q[r].clone() * omega.quad[r][c].clone() * q[c].clone();
        }
    }
    quad + det.clone() * lin + omega.constant.clone() * det.clone() * det
}

fn quad_norm<S: Scalar>(omega: &QuadricForm<S>) -> f64 {
    omega.quad.iter().flatten().map(|x| x.magnitude().powi(2)).sum::<f64>().sqrt()
}

/// Chebyshev nodes on `[−ρ, ρ]`, `ρ = 1/‖quad‖`, moved off the roots of `det(2I + λH)`.
fn nodes<S: Scalar>(omega: &QuadricForm<S>) -> Vec<S> {
    let norm = quad_norm(omega);
    let rho = if norm > 0.0 { 1.0 / norm } else { 1.0 };
    let rho: f64 = format!("{rho:.5e}").parse().expect("formatted float");
    let rho = S::from_rational(&rational_from_decimal_f64(rho));
    let nudge = rho.clone() / S::from_i64(1013);
    (0..NODE_COUNT)
        .map(|k| {
            let x = ((2 * k + 1) as f64 * std::f64::consts::PI / (2 * NODE_COUNT) as f64).cos();
            let x = rational_from_decimal_f64(format!("{x:.6}").parse().expect("formatted float"));
            let mut node = S::from_rational(&x) * rho.clone();
            for _ in 0..8 {
                let (m, _) = linear_system(omega, &std::array::from_fn(|_| S::zero()), &node);
                let (_, det) = adjugate(&m);
                if det.magnitude() > 1e-12 * (1.0 + 2.0 * norm * node.magnitude()).powi(3) && !det.is_zero() {
                    break;
                }
                node = node + nudge.clone();
            }
            node
        })
        .collect()
}

/// The univariate `K(λ)` of the pedal problem for target position `target`,
/// interpolated from nine nodes (seven determine it, two confirm the degree bound).
pub fn pedal_polynomial<S: Scalar>(
    omega: &QuadricForm<S>,
    target: &[S; 3],
) -> std::result::Result<UniPoly<S>, PolyError> {
    let nodes = nodes(omega);
    interpolate_uni("lambda", |l| k_value(omega, target, l), K_DEGREE, &nodes)
}

/// Real pedal candidates `(p, λ)` from a floating-point `K`, unpolished.
pub(crate) fn pedal_candidates_f64(model: &SingularityModel, i: &[f64; 3], target: &[f64; 3]) -> Vec<([f64; 3], f64)> {
    let Ok(omega) = model.orientation_quadric(i) else { return Vec::new() };
    let Ok(k) = pedal_polynomial(&omega, target) else { return Vec::new() };
    if k.degree() == 0 {
        return Vec::new();
    }
    let Ok(roots) = uni_roots(&k) else { return Vec::new() };
    roots
        .into_iter()
        .filter(|z| is_real_root(*z))
        .filter_map(|z| back_substitute(&omega, target, z.re).map(|p| (p, z.re)))
        .collect()
}

fn back_substitute(omega: &QuadricForm<f64>, target: &[f64; 3], lambda: f64) -> Option<[f64; 3]> {
    let (m, rhs) = linear_system(omega, target, &lambda);
    let m = Matrix3::from_fn(|r, c| m[r][c]);
    let scale = m.norm().max(1.0);
    if m.determinant().abs() <= 1e-12 * scale.powi(3) {
        return None;
    }
    let p = m.lu().solve(&Vector3::from(rhs))?;
    p.iter().all(|x| x.is_finite()).then(|| p.into())
}

/// Exact `K` for a target, with its quadric: exposed for inspection and tests.
pub struct FixedOrientationSolver {
    pub omega: QuadricForm<BigRational>,
    pub k: UniPoly<BigRational>,
}

impl FixedOrientationSolver {
    /// Builds `K` in rational arithmetic; the target is read through its
    /// shortest decimal representation.
    pub fn new(model: &SingularityModel, g: &Configuration) -> Result<Self> {
        let i = g.orientation.map(rational_from_decimal_f64);
        let target = g.position.map(rational_from_decimal_f64);
        let omega = model.orientation_quadric_exact(&i)?;
        let k = pedal_polynomial(&omega, &target)?;
        if k.is_zero() {
            return Err(Error::DegenerateOrientation);
        }
        Ok(Self { omega, k })
    }
}

/// Stationary points of `‖p − g_p‖² + λ·F(g_i, p)`, sorted by `l = ‖p − g_p‖`.
pub fn closest_fixed_orientation(
    model: &SingularityModel,
    arch: &Architecture,
    g: &Configuration,
    opts: &SolverOptions,
) -> Result<PedalSet> {
    check_unit_target(g)?;
    let solver = FixedOrientationSolver::new(model, g)?;
    let mut set = PedalSet::new(Mode::FixedOrientation);
    let degree = solver.k.degree();
    set.univariate_degree = Some(degree);
    if degree < K_DEGREE {
        set.warn(format!("K has degree {degree} < {K_DEGREE}: multipliers at infinity"));
    }
    if degree == 0 {
        return Err(Error::NoPedalPoint);
    }
    let omega_f = model.orientation_quadric(&g.orientation)?;
    let roots = uni_roots(&solver.k)?;
    let real: Vec<f64> = roots.iter().filter(|z| is_real_root(**z)).map(|z| z.re).collect();
    set.complex_count = Some(roots.len() - real.len());

    let lag = FixedOrientationLagrangian { model, orientation: g.orientation, target: g.position };
    for lambda0 in real {
        let lambda = polish_real_root(&solver.k, lambda0, opts.precision_bits);
        let Some(p0) = back_substitute(&omega_f, &g.position, lambda) else {
            set.warn(format!("λ = {lambda:e} makes 2I + λH singular; candidate excluded"));
            continue;
        };
        let out = newton_solve(&lag, &[p0[0], p0[1], p0[2], lambda], &NewtonOptions::default());
        if out.residual >= RESIDUAL_TOL {
            set.warn(format!("candidate at λ = {lambda:e} left with residual {:e}", out.residual));
            continue;
        }
        let p = Vector3::new(out.z[0], out.z[1], out.z[2]);
        set.points.push(PedalPoint {
            pose: Configuration::new(g.orientation, p.into()),
            lambda1: Some(out.z[3]),
            lambda2: None,
            distance: (p - g.position()).norm(),
            mu: None,
            residual: out.residual,
            is_real: true,
        });
    }
    set.sort();
    set.cross_check_rank(arch);
    if set.points.is_empty() {
        return Err(Error::NoPedalPoint);
    }
    Ok(set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::rint;

    fn sphere() -> QuadricForm<BigRational> {
        // p_x² + p_y² + p_z² − 1
        QuadricForm {
            quad: std::array::from_fn(|r| std::array::from_fn(|c| if r == c { rint(1) } else { rint(0) })),
            linear: [rint(0), rint(0), rint(0)],
            constant: rint(-1),
        }
    }

    #[test]
    fn adjugate_inverts() {
        let m = [[2.0, 1.0, 0.5], [0.0, 3.0, -1.0], [1.0, 0.0, 4.0]];
        let (adj, det) = adjugate(&m);
        let mm = Matrix3::from_fn(|r, c| m[r][c]);
        let inv = Matrix3::from_fn(|r, c| adj[r][c] / det);
        assert!((mm * inv - Matrix3::identity()).norm() < 1e-14);
        assert!((det - mm.determinant()).abs() < 1e-12);
    }

    #[test]
    fn sphere_pedal_polynomial() {
        // target (2,0,0): p = 2/(1+λ)·e_x, F = 4/(1+λ)² − 1, K = 64·(4 − (1+λ)²)·(1+λ)^4
        let k = pedal_polynomial(&sphere(), &[rint(2), rint(0), rint(0)]).unwrap();
        assert_eq!(k.degree(), 6);
        for l in [-3i64, -1, 0, 1, 2] {
            let x = rint(l);
            let onep = rint(1 + l);
            let expected = rint(64) * (rint(4) - onep.clone() * onep.clone()) * num_traits::pow(onep, 4);
            assert_eq!(k.eval(&x), expected);
        }
    }
}
