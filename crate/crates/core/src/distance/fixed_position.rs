//! Pedal points on the curve `ω` for a fixed position.
//!
//! The multipliers enter `∂L/∂u = ∂L/∂v = 0` linearly; eliminating them
//! leaves three quadrics in `(u, v, w)`, reduced to a univariate in `w` by a
//! cascade of Sylvester resultants and a GCD.

use nalgebra::{DMatrix, DVector, Vector3};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::lagrangian::FixedPositionLagrangian;
use super::newton::{newton_solve, NewtonOptions};
use super::{
    check_unit_target, spherical_distance_deg, Mode, PedalPoint, PedalSet, SolverOptions, DEDUP_TOL, RESIDUAL_TOL,
};
use crate::error::{Error, Result};
use crate::pentapod::{Architecture, Configuration, QuadricForm, SingularityModel};
use crate::polyalg::{
    is_real_root, polish_real_root, rational_from_decimal_f64, rint, sylvester_resultant, uni_gcd_many, uni_roots,
    vars, MultiPoly, UniPoly, Vars, DEFAULT_GCD_TOL,
};

const EXPECTED_DEGREE: usize = 8;
const FALLBACK_STARTS: usize = 400;

fn orientation_vars() -> Vars {
    vars(&["u", "v", "w"])
}

fn quadric_poly(q: &QuadricForm<BigRational>, vs: &Vars) -> MultiPoly<BigRational> {
    let x: Vec<MultiPoly<BigRational>> = (0..3).map(|k| MultiPoly::variable(vs.clone(), k)).collect();
    let mut f = MultiPoly::constant(vs.clone(), q.constant.clone());
    for k in 0..3 {
        f = &f + &x[k].scale(&q.linear[k]);
        for l in 0..3 {
            f = &f + &(&x[k] * &x[l]).scale(&q.quad[k][l]);
        }
    }
    f
}

/// Intermediate polynomials of the elimination.
#[derive(Clone, Debug)]
pub struct FixedPositionElimination {
    /// `∂L/∂w` with the multipliers eliminated, `F(·, p)` and `u²+v²+w²−1`.
    pub equations: [MultiPoly<BigRational>; 3],
    /// `R_1 = Res(E_2, E_3, u)`, `R_2 = Res(E_1, E_3, u)`, `R_3 = Res(E_1, E_2, u)`.
    pub r: [MultiPoly<BigRational>; 3],
    /// `G_1 = Res(R_2, R_3, v)`, `G_2 = Res(R_1, R_3, v)`, `G_3 = Res(R_1, R_2, v)` (nonzero ones).
    pub g: Vec<UniPoly<BigRational>>,
    /// Monic GCD of the `G_i`.
    pub gcd: UniPoly<BigRational>,
}

/// Runs the resultant cascade for target `g` (read through shortest decimals).
pub fn eliminate_fixed_position(model: &SingularityModel, g: &Configuration) -> Result<FixedPositionElimination> {
    let vs = orientation_vars();
    let p = g.position.map(rational_from_decimal_f64);
    let gi = g.orientation.map(rational_from_decimal_f64);
    let cone = model.position_cone_exact(&p)?;
    let fc = quadric_poly(&cone, &vs);
    let (fu, fv, fw) = (fc.partial(0), fc.partial(1), fc.partial(2));
    let u = MultiPoly::variable(vs.clone(), 0);
    let v = MultiPoly::variable(vs.clone(), 1);
    let w = MultiPoly::variable(vs.clone(), 2);
    let c = |x: &BigRational| MultiPoly::constant(vs.clone(), x.clone());
    let two = rint(2);

    let d = &(&v * &fu).scale(&two) - &(&u * &fv).scale(&two);
    let n1 = (&v.scale(&gi[0]) - &u.scale(&gi[1])).scale(&rint(4));
    let n2 = &(&(&v - &c(&gi[1])) * &fu).scale(&rint(-2)) + &(&(&u - &c(&gi[0])) * &fv).scale(&two);
    let e1 = &(&(&(&w - &c(&gi[2])) * &d).scale(&two) + &(&n1 * &fw)) + &(&w * &n2).scale(&two);
    let e3 = &(&(&(&u * &u) + &(&v * &v)) + &(&w * &w)) - &c(&rint(1));

    let res = |a: &MultiPoly<BigRational>, b: &MultiPoly<BigRational>, var: &str| -> Result<MultiPoly<BigRational>> {
        Ok(sylvester_resultant(a, b, var)?)
    };
    let r1 = res(&fc, &e3, "u")?;
    let r2 = res(&e1, &e3, "u")?;
    let r3 = res(&e1, &fc, "u")?;
    let pairs = [(&r2, &r3), (&r1, &r3), (&r1, &r2)];
    let mut gs = Vec::new();
    for (a, b) in pairs {
        if a.degree_in(1) == 0 || b.degree_in(1) == 0 {
            continue;
        }
        let gk = res(a, b, "v")?;
        if !gk.is_zero() {
            gs.push(gk.to_unipoly(2)?);
        }
    }
    if gs.is_empty() {
        return Err(Error::PositionDegenerate);
    }
    let gcd = uni_gcd_many(&gs, DEFAULT_GCD_TOL)?;
    Ok(FixedPositionElimination { equations: [e1, fc, e3], r: [r1, r2, r3], g: gs, gcd })
}

fn real_roots_f64(p: &UniPoly<f64>) -> Vec<f64> {
    if p.degree() == 0 {
        return Vec::new();
    }
    uni_roots(p).map(|r| r.into_iter().filter(|z| is_real_root(*z)).map(|z| z.re).collect()).unwrap_or_default()
}

/// Restricts a polynomial in `(u, v, w)` to the listed fixed values and reads it as univariate in `var`.
fn restrict(p: &MultiPoly<f64>, fixed: &[(usize, f64)], var: usize) -> Option<UniPoly<f64>> {
    let mut q = p.clone();
    for (k, x) in fixed {
        q = q.substitute(*k, x);
    }
    if q.is_zero() {
        return None;
    }
    q.to_unipoly(var).ok()
}

/// Least-squares multipliers `(λ_1, λ_2)` of `2(i − g) + λ_1∇F + 2λ_2·i = 0`.
fn multipliers(model: &SingularityModel, position: &[f64; 3], target: &[f64; 3], i: &[f64; 3]) -> Option<[f64; 2]> {
    let x = [i[0], i[1], i[2], position[0], position[1], position[2]];
    let grad = model.gradient(&x);
    let a = DMatrix::from_fn(3, 2, |r, c| if c == 0 { grad[r] } else { 2.0 * i[r] });
    let b = DVector::from_fn(3, |r, _| -2.0 * (i[r] - target[r]));
    let svd = a.svd(true, true);
    if svd.singular_values.min() <= 1e-12 * svd.singular_values.max().max(1.0) {
        return None;
    }
    let l = svd.solve(&b, 1e-14).ok()?;
    Some([l[0], l[1]])
}

fn push_unique(points: &mut Vec<PedalPoint>, candidate: PedalPoint) {
    let dup = points.iter_mut().find(|p| p.pose.max_abs_diff(&candidate.pose) < DEDUP_TOL);
    match dup {
        Some(p) if p.residual <= candidate.residual => {}
        Some(p) => *p = candidate,
        None => points.push(candidate),
    }
}

fn polish(lag: &FixedPositionLagrangian, g: &Configuration, i0: [f64; 3], set: &mut PedalSet) -> Option<PedalPoint> {
    let Some([l1, l2]) = multipliers(lag.model, &lag.position, &lag.target, &i0) else {
        set.warn("degenerate multiplier system at a candidate; discarded");
        return None;
    };
    let out = newton_solve(lag, &[i0[0], i0[1], i0[2], l1, l2], &NewtonOptions::default());
    if out.residual >= RESIDUAL_TOL {
        return None;
    }
    let i = Vector3::new(out.z[0], out.z[1], out.z[2]);
    Some(PedalPoint {
        pose: Configuration::new(i.into(), g.position),
        lambda1: Some(out.z[3]),
        lambda2: Some(out.z[4]),
        distance: spherical_distance_deg(&i, &g.orientation()),
        mu: None,
        residual: out.residual,
        is_real: true,
    })
}

/// Stationary points of `‖i − g_i‖² + λ_1·F(i, g_p) + λ_2·(‖i‖² − 1)`, sorted
/// by the angle to `g_i` in degrees.
pub fn closest_fixed_position(
    model: &SingularityModel,
    arch: &Architecture,
    g: &Configuration,
    opts: &SolverOptions,
) -> Result<PedalSet> {
    check_unit_target(g)?;
    let mut set = PedalSet::new(Mode::FixedPosition);
    let lag = FixedPositionLagrangian { model, position: g.position, target: g.orientation };
    let elim = eliminate_fixed_position(model, g)?;
    let degree = elim.gcd.degree();
    set.univariate_degree = Some(degree);

    if degree == EXPECTED_DEGREE {
        let roots = uni_roots(&elim.gcd)?;
        let real: Vec<f64> = roots.iter().filter(|z| is_real_root(**z)).map(|z| z.re).collect();
        set.complex_count = Some(roots.len() - real.len());
        let r_f: Vec<MultiPoly<f64>> = elim.r.iter().map(|r| r.to_f64()).collect();
        let eq_f: Vec<MultiPoly<f64>> = elim.equations.iter().map(|e| e.to_f64()).collect();
        for w0 in real {
            let w0 = polish_real_root(&elim.gcd, w0, opts.precision_bits);
            let rv: Vec<UniPoly<f64>> = r_f.iter().filter_map(|r| restrict(r, &[(2, w0)], 1)).collect();
            let common = uni_gcd_many(&rv, 1e-6).ok().filter(|c| c.degree() > 0);
            let vs = match common {
                Some(c) => real_roots_f64(&c),
                None => rv.first().map(real_roots_f64).unwrap_or_default(),
            };
            let mut best: Option<([f64; 3], f64)> = None;
            for v0 in vs {
                let mut us = Vec::new();
                for e in &eq_f[1..] {
                    if let Some(q) = restrict(e, &[(1, v0), (2, w0)], 0) {
                        us.extend(real_roots_f64(&q));
                    }
                }
                for u0 in us {
                    let x = [u0, v0, w0];
                    let score: f64 = eq_f
                        .iter()
                        .map(|e| e.eval(&x).abs() / e.eval_abs(&x.map(f64::abs)).max(1.0))
                        .fold(0.0, f64::max);
                    if best.is_none_or(|(_, s)| score < s) {
                        best = Some((x, score));
                    }
                }
            }
            match best {
                Some((i0, score)) if score < 1e-4 => match polish(&lag, g, i0, &mut set) {
                    Some(pt) => push_unique(&mut set.points, pt),
                    None => set.warn(format!("candidate at w = {w0} did not polish to the KKT tolerance")),
                },
                _ => set.warn(format!("no back-substitution found for w = {w0}")),
            }
        }
    } else {
        set.warn(format!(
            "non-generic instance: eliminated univariate has degree {degree}, expected {EXPECTED_DEGREE}; using multistart"
        ));
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        for _ in 0..FALLBACK_STARTS {
            let z: f64 = rng.gen_range(-1.0..1.0);
            let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let s = (1.0 - z * z).sqrt();
            if let Some(pt) = polish(&lag, g, [s * phi.cos(), s * phi.sin(), z], &mut set) {
                push_unique(&mut set.points, pt);
            }
        }
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

    #[test]
    fn quadric_poly_matches_form() {
        let q = QuadricForm {
            quad: [[rint(1), rint(2), rint(0)], [rint(2), rint(-1), rint(3)], [rint(0), rint(3), rint(5)]],
            linear: [rint(1), rint(0), rint(-2)],
            constant: rint(7),
        };
        let p = quadric_poly(&q, &orientation_vars());
        for x in [[1, 2, 3], [-1, 0, 4], [2, -3, 1]] {
            let x = x.map(rint);
            assert_eq!(p.eval(&x), q.eval(&x));
        }
    }
}
