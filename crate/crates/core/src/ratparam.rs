//! Rational parametrization of the singularity variety.
//!
//! The orientation comes from the inverse stereographic projection of
//! `(t_3, t_4)`. The position is a point of the line bundle through
//! `a·x(t_3,t_4)` spanned by the two sphere tangents, and `a` is the unique
//! value making the pose singular.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::pentapod::{Configuration, QuadricForm, SingularityModel};
use crate::polyalg::Scalar;

/// Relative size below which the coefficient of `a` counts as zero.
pub const EXCLUSION_TOL: f64 = 1e-12;

/// `(2t_3/D, 2t_4/D, (t_3²+t_4²−1)/D)` with `D = t_3²+t_4²+1`.
pub fn stereographic<S: Scalar>(t3: &S, t4: &S) -> [S; 3] {
    let one = S::one();
    let two = S::from_i64(2);
    let s = t3.clone() * t3.clone() + t4.clone() * t4.clone();
    let d = s.clone() + one.clone();
    [two.clone() * t3.clone() / d.clone(), two * t4.clone() / d.clone(), (s - one) / d]
}

/// Partial derivatives `(∂x/∂t_3, ∂x/∂t_4)` of [`stereographic`].
pub fn stereographic_partials<S: Scalar>(t3: &S, t4: &S) -> ([S; 3], [S; 3]) {
    let one = S::one();
    let two = S::from_i64(2);
    let four = S::from_i64(4);
    let (a, b) = (t3.clone() * t3.clone(), t4.clone() * t4.clone());
    let d = a.clone() + b.clone() + one.clone();
    let d2 = d.clone() * d;
    let cross = four.clone() * t3.clone() * t4.clone() / d2.clone();
    let dt3 = [
        -(two.clone() * (a.clone() - b.clone() - one.clone())) / d2.clone(),
        -cross.clone(),
        four.clone() * t3.clone() / d2.clone(),
    ];
    let dt4 = [-cross, two * (a - b + one) / d2.clone(), four * t4.clone() / d2];
    (dt3, dt4)
}

/// `(t_3, t_4) = (u, v)/(1 − w)`.
pub fn stereographic_inverse<S: Scalar>(i: &[S; 3]) -> Result<(S, S)> {
    let denom = S::one() - i[2].clone();
    let excluded = if S::EXACT { denom.is_zero() } else { denom.magnitude() <= 1e-12 };
    if excluded {
        return Err(Error::NorthPole);
    }
    Ok((i[0].clone() / denom.clone(), i[1].clone() / denom))
}

/// `p = a·x + t_1·∂x/∂t_3 + t_2·∂x/∂t_4`.
pub fn bundle_point<S: Scalar>(a: &S, t: &[S; 4]) -> [S; 3] {
    let x = stereographic(&t[2], &t[3]);
    let (dt3, dt4) = stereographic_partials(&t[2], &t[3]);
    std::array::from_fn(|k| a.clone() * x[k].clone() + t[0].clone() * dt3[k].clone() + t[1].clone() * dt4[k].clone())
}

/// Root of the linear equation `coefficient·a + rest = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct ASolution<S> {
    pub a: S,
    pub coefficient: S,
}

fn dot<S: Scalar>(x: &[S; 3], y: &[S; 3]) -> S {
    x.iter().zip(y).fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
}

fn mat_vec<S: Scalar>(m: &[[S; 3]; 3], x: &[S; 3]) -> [S; 3] {
    std::array::from_fn(|r| dot(&m[r], x))
}

fn solve_linear_in_a<S: Scalar>(omega: &QuadricForm<S>, x: &[S; 3], q: &[S; 3]) -> Result<ASolution<S>> {
    let two = S::from_i64(2);
    let aq = mat_vec(&omega.quad, q);
    // F(a·x + q) = a²·xᵀAx + a·(2xᵀAq + bᵀx) + (qᵀAq + bᵀq + c); xᵀA(x)x vanishes identically
    let alpha = two.clone() * dot(x, &aq) + dot(&omega.linear, x);
    let beta = dot(q, &aq) + dot(&omega.linear, q) + omega.constant.clone();
    let excluded = if S::EXACT {
        alpha.is_zero()
    } else {
        let mut scale = 0.0;
        for k in 0..3 {
            scale += omega.linear[k].magnitude() * x[k].magnitude();
            for l in 0..3 {
                scale += 2.0 * x[k].magnitude() * omega.quad[k][l].magnitude() * q[l].magnitude();
            }
        }
        scale == 0.0 || alpha.magnitude() <= EXCLUSION_TOL * scale
    };
    if excluded {
        return Err(Error::LineOnQuadric { coefficient: alpha.to_f64() });
    }
    Ok(ASolution { a: -beta / alpha.clone(), coefficient: alpha })
}

/// Solves for the bundle parameter `a` that puts the pose on the variety.
pub fn solve_a(model: &SingularityModel, t: &[f64; 4]) -> Result<ASolution<f64>> {
    let x = stereographic(&t[2], &t[3]);
    let omega = model.orientation_quadric(&x)?;
    let q = bundle_point(&0.0, t);
    solve_linear_in_a(&omega, &x, &q)
}

/// `Ω` at `x(t_3, t_4) = X/D` scaled by `D³` (and the squared denominators
/// of `t_3, t_4`), so that every entry is an integer, together with `(X, D)`.
fn cleared_quadric(
    model: &SingularityModel,
    t3: &BigRational,
    t4: &BigRational,
) -> Result<(QuadricForm<BigRational>, [BigInt; 3], BigInt)> {
    let (n3, d3) = (t3.numer(), t3.denom());
    let (n4, d4) = (t4.numer(), t4.denom());
    let (d3s, d4s) = (d3 * d3, d4 * d4);
    let (a, b, c) = (n3 * n3 * &d4s, n4 * n4 * &d3s, &d3s * &d4s);
    let x = [BigInt::from(2) * n3 * d3 * &d4s, BigInt::from(2) * n4 * d4 * &d3s, &a + &b - &c];
    let d = a + b + c;
    let mut q = QuadricForm::<BigRational>::zero();
    for (m, coef) in model.integer_polynomial().terms() {
        let e = m.exponents();
        let mut v = coef.numer().clone() * num_traits::pow(d.clone(), 3 - (e[0] + e[1] + e[2]) as usize);
        for k in 0..3 {
            v *= num_traits::pow(x[k].clone(), e[k] as usize);
        }
        let v = BigRational::from_integer(v);
        let free: Vec<usize> = (0..3).flat_map(|k| std::iter::repeat_n(k, e[3 + k] as usize)).collect();
        match free.as_slice() {
            [] => q.constant += v,
            [k] => q.linear[*k] += v,
            [k, l] if k == l => q.quad[*k][*k] += v,
            [k, l] => {
                let half = v / BigRational::from_integer(2.into());
                q.quad[*k][*l] += half.clone();
                q.quad[*l][*k] += half;
            }
            _ => unreachable!("F is quadratic in the position"),
        }
    }
    if q.is_zero() {
        return Err(Error::OrientationDegenerate);
    }
    Ok((q, x, d))
}

/// Exact [`solve_a`]. The coefficient is reported for the cleared quadric, so
/// only its vanishing is meaningful.
pub fn solve_a_exact(model: &SingularityModel, t: &[BigRational; 4]) -> Result<ASolution<BigRational>> {
    let (omega, x, d) = cleared_quadric(model, &t[2], &t[3])?;
    let x = x.map(BigRational::from_integer);
    let q = bundle_point(&BigRational::from_integer(0.into()), t);
    let sol = solve_linear_in_a(&omega, &x, &q)?;
    // a·X/D = a'·X
    Ok(ASolution { a: sol.a * BigRational::from_integer(d), coefficient: sol.coefficient })
}

/// Exact rational version: the result has rational coordinates.
pub fn param_point_exact(model: &SingularityModel, t: &[BigRational; 4]) -> Result<Configuration<BigRational>> {
    let sol = solve_a_exact(model, t)?;
    Ok(Configuration::new(stereographic(&t[2], &t[3]), bundle_point(&sol.a, t)))
}

/// A parametrized singular pose.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamPoint {
    pub t: [f64; 4],
    pub a: f64,
    /// Coefficient of `a` in the linear equation (exclusion diagnostic).
    pub coefficient: f64,
    pub xi: Configuration,
}

pub fn param_point(model: &SingularityModel, t: &[f64; 4]) -> Result<ParamPoint> {
    let sol = solve_a(model, t)?;
    let orientation = stereographic(&t[2], &t[3]);
    let position = bundle_point(&sol.a, t);
    Ok(ParamPoint { t: *t, a: sol.a, coefficient: sol.coefficient, xi: Configuration::new(orientation, position) })
}

/// Chart coordinates of a pose, without checking that it is singular.
///
/// The two tangent vectors are orthogonal with squared length `4/D²`, so
/// `t_1, t_2` are plain projections.
fn chart<S: Scalar>(c: &Configuration<S>) -> Result<[S; 4]> {
    let (t3, t4) = stereographic_inverse(&c.orientation)?;
    let (dt3, dt4) = stereographic_partials(&t3, &t4);
    let d = t3.clone() * t3.clone() + t4.clone() * t4.clone() + S::one();
    let norm2 = S::from_i64(4) / (d.clone() * d);
    let t1 = dot(&c.position, &dt3) / norm2.clone();
    let t2 = dot(&c.position, &dt4) / norm2;
    Ok([t1, t2, t3, t4])
}

/// Recovers `(t_1, t_2, t_3, t_4)` from a singular pose.
pub fn param_inverse(model: &SingularityModel, c: &Configuration, tol: f64) -> Result<[f64; 4]> {
    let residual = model.normalized_value(&c.coordinates());
    if residual > tol {
        return Err(Error::NotSingular { residual });
    }
    chart(c)
}

/// Exact inverse; the pose must satisfy `F = 0` exactly.
pub fn param_inverse_exact(model: &SingularityModel, c: &Configuration<BigRational>) -> Result<[BigRational; 4]> {
    let t = chart(c)?;
    let value = if stereographic(&t[2], &t[3]) == c.orientation {
        cleared_quadric(model, &t[2], &t[3])?.0.eval(&c.position)
    } else {
        model.orientation_quadric_exact(&c.orientation)?.eval(&c.position)
    };
    if !value.is_zero() {
        return Err(Error::NotSingular { residual: value.to_f64() });
    }
    Ok(t)
}

fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let mut value = 0.0;
    let mut factor = 1.0 / base as f64;
    while index > 0 {
        value += (index % base) as f64 * factor;
        index /= base;
        factor /= base as f64;
    }
    value
}

/// First `n` points of the 4-dimensional Halton sequence (bases 2, 3, 5, 7,
/// starting at index 1), mapped to `[−range, range]^4`.
pub fn halton_grid(n: usize, range: f64) -> Vec<[f64; 4]> {
    const BASES: [u64; 4] = [2, 3, 5, 7];
    (1..=n as u64).map(|i| std::array::from_fn(|k| (2.0 * radical_inverse(i, BASES[k]) - 1.0) * range)).collect()
}

/// [`halton_grid`] in exact arithmetic: the radical inverses are dyadic,
/// triadic, … fractions, so the `f64` grid is their rounding.
pub fn halton_grid_exact(n: usize, range: i64) -> Vec<[BigRational; 4]> {
    const BASES: [i64; 4] = [2, 3, 5, 7];
    let radical = |mut index: u64, base: i64| {
        let (mut num, mut den) = (BigInt::from(0), BigInt::from(1));
        while index > 0 {
            num = num * base + (index % base as u64) as i64;
            den *= base;
            index /= base as u64;
        }
        BigRational::new(num, den)
    };
    let one = BigRational::from_integer(1.into());
    let two = BigRational::from_integer(2.into());
    let r = BigRational::from_integer(range.into());
    (1..=n as u64).map(|i| std::array::from_fn(|k| (&two * radical(i, BASES[k]) - &one) * &r)).collect()
}

/// Evaluates [`param_point`] on every grid point, in parallel, keeping grid order.
pub fn sample(model: &SingularityModel, grid: &[[f64; 4]]) -> Vec<Result<ParamPoint>> {
    grid.par_iter().map(|t| param_point(model, t)).collect()
}
