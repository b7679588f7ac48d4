use num_rational::BigRational;
use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::architecture::{Architecture, Configuration};
use super::jacobian::{minors_symbolic, pose_vars};
use crate::error::{Error, Result};
use crate::polyalg::{nullspace, rint, Monomial, MultiPoly, Scalar, Vars};

/// Default threshold on the normalized value of `F`.
pub const DEFAULT_F_TOL: f64 = 1e-9;

/// Monomial support of `F` in a normalized frame, in coefficient order `A_1..A_43`.
/// Exponents are over `(u, v, w, p_x, p_y, p_z)`.
pub const SUPPORT_TEMPLATE: [[u32; 6]; 43] = [
    [2, 0, 0, 0, 1, 0],
    [2, 0, 0, 0, 0, 1],
    [1, 1, 0, 1, 0, 0],
    [1, 1, 0, 0, 1, 0],
    [1, 1, 0, 0, 0, 1],
    [1, 1, 0, 0, 0, 0],
    [1, 0, 1, 1, 0, 0],
    [1, 0, 1, 0, 1, 0],
    [1, 0, 1, 0, 0, 1],
    [1, 0, 1, 0, 0, 0],
    [1, 0, 0, 1, 1, 0],
    [1, 0, 0, 1, 0, 1],
    [1, 0, 0, 0, 2, 0],
    [1, 0, 0, 0, 1, 1],
    [1, 0, 0, 0, 1, 0],
    [1, 0, 0, 0, 0, 2],
    [1, 0, 0, 0, 0, 1],
    [0, 2, 0, 1, 0, 0],
    [0, 2, 0, 0, 0, 1],
    [0, 2, 0, 0, 0, 0],
    [0, 1, 1, 1, 0, 0],
    [0, 1, 1, 0, 1, 0],
    [0, 1, 1, 0, 0, 1],
    [0, 1, 1, 0, 0, 0],
    [0, 1, 0, 2, 0, 0],
    [0, 1, 0, 1, 1, 0],
    [0, 1, 0, 1, 0, 1],
    [0, 1, 0, 1, 0, 0],
    [0, 1, 0, 0, 1, 1],
    [0, 1, 0, 0, 1, 0],
    [0, 1, 0, 0, 0, 2],
    [0, 1, 0, 0, 0, 1],
    [0, 0, 2, 1, 0, 0],
    [0, 0, 2, 0, 1, 0],
    [0, 0, 2, 0, 0, 0],
    [0, 0, 1, 2, 0, 0],
    [0, 0, 1, 1, 1, 0],
    [0, 0, 1, 1, 0, 1],
    [0, 0, 1, 1, 0, 0],
    [0, 0, 1, 0, 2, 0],
    [0, 0, 1, 0, 1, 1],
    [0, 0, 1, 0, 1, 0],
    [0, 0, 1, 0, 0, 1],
];

const SAMPLE_POINTS: usize = 80;

/// A polynomial of degree ≤ 2 in three free variables, the other three fixed:
/// `xᵀ·quad·x + linear·x + constant` with `quad` symmetric.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadricForm<S> {
    pub quad: [[S; 3]; 3],
    pub linear: [S; 3],
    pub constant: S,
}

impl<S: Scalar> QuadricForm<S> {
    pub fn zero() -> Self {
        Self {
            quad: std::array::from_fn(|_| std::array::from_fn(|_| S::zero())),
            linear: std::array::from_fn(|_| S::zero()),
            constant: S::zero(),
        }
    }

    pub fn eval(&self, x: &[S; 3]) -> S {
        let mut acc = self.constant.clone();
        for k in 0..3 {
            acc = acc + self.linear[k].clone() * x[k].clone();
            for l in 0..3 {
                acc = acc + self.quad[k][l].clone() * x[k].clone() * x[l].clone();
            }
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.constant.is_zero()
            && self.linear.iter().all(|c| c.is_zero())
            && self.quad.iter().flatten().all(|c| c.is_zero())
    }

    /// Homogeneous symmetric 4×4 matrix `[[quad, linear/2], [linear/2ᵀ, constant]]`.
    pub fn matrix4(&self) -> [[S; 4]; 4] {
        let two = S::from_i64(2);
        std::array::from_fn(|r| {
            std::array::from_fn(|c| match (r, c) {
                (3, 3) => self.constant.clone(),
                (3, k) | (k, 3) => self.linear[k].clone() / two.clone(),
                (r, c) => self.quad[r][c].clone(),
            })
        })
    }
}

/// Which block of the pose variables is held fixed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum FixedBlock {
    Orientation,
    Position,
}

fn specialize<S: Scalar>(f: &MultiPoly<S>, fixed: FixedBlock, values: &[S; 3]) -> Result<QuadricForm<S>> {
    let (fixed_off, free_off) = match fixed {
        FixedBlock::Orientation => (0, 3),
        FixedBlock::Position => (3, 0),
    };
    let mut q = QuadricForm::<S>::zero();
    let two = S::from_i64(2);
    for (m, c) in f.terms() {
        let e = m.exponents();
        let mut coef = c.clone();
        for k in 0..3 {
            for _ in 0..e[fixed_off + k] {
                coef = coef * values[k].clone();
            }
        }
        if coef.is_zero() {
            continue;
        }
        let free: Vec<usize> = (0..3).flat_map(|k| std::iter::repeat_n(k, e[free_off + k] as usize)).collect();
        match free.as_slice() {
            [] => q.constant = q.constant.clone() + coef,
            [k] => q.linear[*k] = q.linear[*k].clone() + coef,
            [k, l] if k == l => q.quad[*k][*k] = q.quad[*k][*k].clone() + coef,
            [k, l] => {
                let half = coef / two.clone();
                q.quad[*k][*l] = q.quad[*k][*l].clone() + half.clone();
                q.quad[*l][*k] = q.quad[*l][*k].clone() + half;
            }
            _ => {
                return Err(Error::ArchitecturallyDegenerate(
                    "singularity polynomial has degree > 2 in a variable block".into(),
                ))
            }
        }
    }
    Ok(q)
}

/// Value, gradient and Hessian of `F` at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct Derivatives {
    pub value: f64,
    pub gradient: [f64; 6],
    pub hessian: [[f64; 6]; 6],
}

#[derive(Clone, Debug)]
struct CompiledTerm {
    exps: [u32; 6],
    coeff: f64,
}

fn powi(x: f64, e: u32) -> f64 {
    match e {
        0 => 1.0,
        1 => x,
        2 => x * x,
        3 => x * x * x,
        _ => x.powi(e as i32),
    }
}

/// The singularity polynomial `F` of an architecture, with fast evaluators.
#[derive(Clone, Debug)]
pub struct SingularityModel {
    exact: MultiPoly<BigRational>,
    integer: MultiPoly<BigRational>,
    float: MultiPoly<f64>,
    compiled: Vec<CompiledTerm>,
    normalization: BigRational,
}

impl SingularityModel {
    /// Wraps a polynomial in `(u,v,w,p_x,p_y,p_z)`. With `normalize`, it is
    /// rescaled so that `max |coefficient| = 1` and the leading coefficient is positive.
    pub fn from_polynomial(f: MultiPoly<BigRational>, normalize: bool) -> Result<Self> {
        let vs = pose_vars();
        let f = f.with_vars(&vs)?;
        if f.is_zero() {
            return Err(Error::ArchitecturallyDegenerate("singularity polynomial is zero".into()));
        }
        let normalization = if normalize {
            let max = f.terms().map(|(_, c)| c.abs()).max().expect("nonzero polynomial");
            let lead = f.leading_term().expect("nonzero polynomial").1;
            if lead.is_negative() {
                -rint(1) / max
            } else {
                rint(1) / max
            }
        } else {
            rint(1)
        };
        let exact = f.scale(&normalization);
        let integer = exact.primitive();
        let float = exact.to_f64();
        let compiled = float
            .terms()
            .map(|(m, c)| CompiledTerm { exps: std::array::from_fn(|k| m.exponents()[k]), coeff: *c })
            .collect();
        Ok(Self { exact, integer, float, compiled, normalization })
    }

    /// Exact polynomial (normalized).
    pub fn polynomial(&self) -> &MultiPoly<BigRational> {
        &self.exact
    }

    /// Primitive integer multiple of `F` (smaller coefficients for elimination).
    pub fn integer_polynomial(&self) -> &MultiPoly<BigRational> {
        &self.integer
    }

    pub fn polynomial_f64(&self) -> &MultiPoly<f64> {
        &self.float
    }

    /// Factor applied to the raw quotient to obtain the normalized polynomial.
    pub fn normalization(&self) -> &BigRational {
        &self.normalization
    }

    pub fn vars(&self) -> &Vars {
        self.exact.vars()
    }

    pub fn num_terms(&self) -> usize {
        self.compiled.len()
    }

    pub fn value(&self, x: &[f64; 6]) -> f64 {
        self.compiled.iter().map(|t| t.coeff * (0..6).map(|k| powi(x[k], t.exps[k])).product::<f64>()).sum()
    }

    /// `Σ |c_α|·|x^α|`, the natural scale for rounding errors in [`Self::value`].
    pub fn value_abs(&self, x: &[f64; 6]) -> f64 {
        self.compiled.iter().map(|t| t.coeff.abs() * (0..6).map(|k| powi(x[k].abs(), t.exps[k])).product::<f64>()).sum()
    }

    /// `|F(x)| / max(Σ|c_α·x^α|, 1)`.
    pub fn normalized_value(&self, x: &[f64; 6]) -> f64 {
        self.value(x).abs() / self.value_abs(x).max(1.0)
    }

    pub fn eval_config(&self, c: &Configuration) -> f64 {
        self.value(&c.coordinates())
    }

    pub fn is_on_variety(&self, c: &Configuration, tol: f64) -> bool {
        self.normalized_value(&c.coordinates()) < tol
    }

    pub fn gradient(&self, x: &[f64; 6]) -> [f64; 6] {
        self.derivatives(x).gradient
    }

    /// `Σ |c_α|·|∂x^α/∂x_k|`: per-component scale of the gradient's rounding error.
    pub fn gradient_abs(&self, x: &[f64; 6]) -> [f64; 6] {
        let mut g = [0.0; 6];
        for t in &self.compiled {
            for k in 0..6 {
                let e = t.exps[k];
                if e == 0 {
                    continue;
                }
                let rest: f64 = (0..6)
                    .map(|l| if l == k { powi(x[l].abs(), e - 1) } else { powi(x[l].abs(), t.exps[l]) })
                    .product();
                g[k] += t.coeff.abs() * e as f64 * rest;
            }
        }
        g
    }

    pub fn derivatives(&self, x: &[f64; 6]) -> Derivatives {
        let mut d = Derivatives { value: 0.0, gradient: [0.0; 6], hessian: [[0.0; 6]; 6] };
        for t in &self.compiled {
            let e = &t.exps;
            let pw: [f64; 6] = std::array::from_fn(|k| powi(x[k], e[k]));
            d.value += t.coeff * pw.iter().product::<f64>();
            let active: Vec<usize> = (0..6).filter(|&k| e[k] > 0).collect();
            let others =
                |skip: &[usize]| -> f64 { active.iter().filter(|k| !skip.contains(k)).map(|&k| pw[k]).product() };
            for &k in &active {
                let dk = e[k] as f64 * powi(x[k], e[k] - 1);
                d.gradient[k] += t.coeff * dk * others(&[k]);
                if e[k] >= 2 {
                    let dkk = (e[k] * (e[k] - 1)) as f64 * powi(x[k], e[k] - 2);
                    d.hessian[k][k] += t.coeff * dkk * others(&[k]);
                }
                for &l in active.iter().filter(|&&l| l > k) {
                    let dl = e[l] as f64 * powi(x[l], e[l] - 1);
                    let h = t.coeff * dk * dl * others(&[k, l]);
                    d.hessian[k][l] += h;
                    d.hessian[l][k] += h;
                }
            }
        }
        d
    }

    /// `F` at a fixed orientation: a quadric `Ω(i)` in `(p_x,p_y,p_z)`.
    pub fn orientation_quadric(&self, i: &[f64; 3]) -> Result<QuadricForm<f64>> {
        let q = specialize(&self.float, FixedBlock::Orientation, i)?;
        if q.is_zero() {
            return Err(Error::OrientationDegenerate);
        }
        Ok(q)
    }

    pub fn orientation_quadric_exact(&self, i: &[BigRational; 3]) -> Result<QuadricForm<BigRational>> {
        let q = specialize(&self.exact, FixedBlock::Orientation, i)?;
        if q.is_zero() {
            return Err(Error::OrientationDegenerate);
        }
        Ok(q)
    }

    /// `F` at a fixed position: a quadratic polynomial in `(u,v,w)` whose zero
    /// set on the unit sphere is the curve `ω`.
    pub fn position_cone(&self, p: &[f64; 3]) -> Result<QuadricForm<f64>> {
        let q = specialize(&self.float, FixedBlock::Position, p)?;
        if q.is_zero() {
            return Err(Error::PositionDegenerate);
        }
        Ok(q)
    }

    pub fn position_cone_exact(&self, p: &[BigRational; 3]) -> Result<QuadricForm<BigRational>> {
        let q = specialize(&self.exact, FixedBlock::Position, p)?;
        if q.is_zero() {
            return Err(Error::PositionDegenerate);
        }
        Ok(q)
    }

    /// Whether every monomial of `F` appears in [`SUPPORT_TEMPLATE`].
    pub fn support_within_template(&self) -> bool {
        self.compiled.iter().all(|t| SUPPORT_TEMPLATE.contains(&t.exps))
    }

    /// Coefficients `A_1..A_43` of the normalized polynomial.
    pub fn template_coefficients(&self) -> [f64; 43] {
        std::array::from_fn(|k| self.float.coefficient(&SUPPORT_TEMPLATE[k]))
    }
}

fn quadric_monomials() -> Vec<Monomial> {
    let mut out = vec![Monomial::one(6)];
    for k in 0..6 {
        let mut e = [0u32; 6];
        e[k] = 1;
        out.push(Monomial::new(e.to_vec()));
    }
    for k in 0..6 {
        for l in k..6 {
            let mut e = [0u32; 6];
            e[k] += 1;
            e[l] += 1;
            out.push(Monomial::new(e.to_vec()));
        }
    }
    out
}

fn monomial_value(m: &Monomial, x: &[BigRational]) -> BigRational {
    m.exponents().iter().zip(x).fold(rint(1), |acc, (&e, xi)| (0..e).fold(acc, |a, _| a * xi))
}

/// Cofactors `(Q_1, Q_2)` of degree ≤ 2 with `F_1·Q_2 = F_2·Q_1`, when unique up to scale.
fn cofactor_pair(
    f1: &MultiPoly<BigRational>,
    f2: &MultiPoly<BigRational>,
) -> Option<(MultiPoly<BigRational>, MultiPoly<BigRational>)> {
    let monos = quadric_monomials();
    let n = monos.len();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    let mut basis = Vec::new();
    for batch in 0..2 {
        let count = if batch == 0 { SAMPLE_POINTS } else { SAMPLE_POINTS / 2 };
        for _ in 0..count {
            let x: Vec<BigRational> = (0..6).map(|_| rint(rng.gen_range(-9..=9))).collect();
            let v1 = f1.eval(&x);
            let v2 = f2.eval(&x);
            let mut row = Vec::with_capacity(2 * n);
            for m in &monos {
                row.push(-(&v2 * monomial_value(m, &x)));
            }
            for m in &monos {
                row.push(&v1 * monomial_value(m, &x));
            }
            rows.push(row);
        }
        basis = nullspace(&rows, 2 * n);
        if basis.len() <= 1 {
            break;
        }
    }
    if basis.len() != 1 {
        return None;
    }
    let vec = &basis[0];
    let vs = f1.vars().clone();
    let q1 =
        MultiPoly::from_terms(vs.clone(), monos.iter().map(|m| m.exponents().to_vec()).zip(vec[..n].iter().cloned()));
    let q2 = MultiPoly::from_terms(vs, monos.iter().map(|m| m.exponents().to_vec()).zip(vec[n..].iter().cloned()));
    if q1.is_zero() || !(&(f1 * &q2) - &(f2 * &q1)).is_zero() {
        return None;
    }
    Some((q1, q2))
}

/// Extracts `F` using the minor pair `(first, second)` as the seed.
pub fn extract_f_with_pair(arch: &Architecture, first: usize, second: usize) -> Result<SingularityModel> {
    let minors = minors_symbolic(arch);
    extract_from_minors(&minors, &[(first, second)])
}

fn extract_from_minors(minors: &[MultiPoly<BigRational>; 6], pairs: &[(usize, usize)]) -> Result<SingularityModel> {
    if let Some(j) = minors.iter().position(|m| m.is_zero()) {
        return Err(Error::ArchitecturallyDegenerate(format!("minor F_{} vanishes identically", j + 1)));
    }
    for &(a, b) in pairs {
        let Some((q1, _)) = cofactor_pair(&minors[a], &minors[b]) else {
            log::debug!("minor pair ({}, {}) does not isolate a cubic common factor", a + 1, b + 1);
            continue;
        };
        let Ok(f) = minors[a].divide_exact(&q1) else {
            continue;
        };
        if f.total_degree() != 3 {
            return Err(Error::ArchitecturallyDegenerate(format!(
                "common factor has total degree {}",
                f.total_degree()
            )));
        }
        for (j, m) in minors.iter().enumerate() {
            if m.divide_exact(&f).is_err() {
                return Err(Error::ArchitecturallyDegenerate(format!("F does not divide F_{}", j + 1)));
            }
        }
        return SingularityModel::from_polynomial(f, true);
    }
    Err(Error::ArchitecturallyDegenerate("no minor pair yields a cubic greatest common divisor".into()))
}

/// Computes the singularity polynomial `F = gcd(F_1, …, F_6)` exactly.
pub fn extract_f(arch: &Architecture) -> Result<SingularityModel> {
    let minors = minors_symbolic(arch);
    let pairs: Vec<(usize, usize)> = (0..6).flat_map(|a| ((a + 1)..6).map(move |b| (a, b))).collect();
    extract_from_minors(&minors, &pairs)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn template_has_43_distinct_monomials() {
        let mut seen = std::collections::BTreeSet::new();
        for e in SUPPORT_TEMPLATE {
            assert!(seen.insert(e));
            assert!(e[..3].iter().sum::<u32>() >= 1);
            assert!(e.iter().sum::<u32>() <= 3);
        }
        assert_eq!(seen.len(), 43);
    }

    #[test]
    fn quadric_form_matches_polynomial() {
        let vs = pose_vars();
        // u·px² + v·py·pz − 3·w + 2·u·v
        let f = MultiPoly::from_terms(
            vs,
            [
                (vec![1, 0, 0, 2, 0, 0], rint(1)),
                (vec![0, 1, 0, 0, 1, 1], rint(1)),
                (vec![0, 0, 1, 0, 0, 0], rint(-3)),
                (vec![1, 1, 0, 0, 0, 0], rint(2)),
            ],
        );
        let model = SingularityModel::from_polynomial(f, false).unwrap();
        let i = [0.6, 0.8, 0.0];
        let q = model.orientation_quadric(&i).unwrap();
        for p in [[1.0, 2.0, 3.0], [-0.5, 0.25, 4.0]] {
            let x = [i[0], i[1], i[2], p[0], p[1], p[2]];
            assert!((q.eval(&p) - model.value(&x)).abs() < 1e-12);
        }
        let d = model.derivatives(&[0.3, -0.2, 0.5, 1.0, 2.0, -1.0]);
        assert!((d.hessian[3][3] - 0.6).abs() < 1e-15);
        assert!((d.hessian[4][5] - -0.2).abs() < 1e-15);
        assert!((d.gradient[0] - (1.0 + 2.0 * -0.2)).abs() < 1e-15);
    }
}
