use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::scalar::Scalar;
use super::unipoly::UniPoly;
use super::PolyError;

/// Shared, ordered list of indeterminate names.
pub type Vars = Arc<[String]>;

pub fn vars(names: &[&str]) -> Vars {
    names.iter().map(|s| s.to_string()).collect::<Vec<_>>().into()
}

/// Exponent vector ordered graded-lexicographically: total degree first, then
/// the exponent of the earliest variable.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    fn div(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse multivariate polynomial. Zero coefficients are never stored.
#[derive(Clone, PartialEq)]
pub struct MultiPoly<S> {
    vars: Vars,
    terms: BTreeMap<Monomial, S>,
}

impl<S: Scalar> MultiPoly<S> {
    pub fn zero(vars: Vars) -> Self {
        MultiPoly { vars, terms: BTreeMap::new() }
    }

    pub fn constant(vars: Vars, c: S) -> Self {
        let mut p = Self::zero(vars);
        let n = p.nvars();
        p.add_term(Monomial::one(n), c);
        p
    }

    pub fn variable(vars: Vars, index: usize) -> Self {
        let mut e = vec![0; vars.len()];
        e[index] = 1;
        let mut p = Self::zero(vars);
        p.add_term(Monomial(e), S::one());
        p
    }

    pub fn from_terms<I>(vars: Vars, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u32>, S)>,
    {
        let mut p = Self::zero(vars);
        for (e, c) in terms {
            assert_eq!(e.len(), p.nvars(), "exponent vector length mismatch");
            p.add_term(Monomial(e), c);
        }
        p
    }

    /// Affine-linear polynomial `c0 + Σ ck·x_k`.
    pub fn linear(vars: Vars, constant: S, coeffs: &[S]) -> Self {
        let n = vars.len();
        let mut p = Self::constant(vars, constant);
        for (k, c) in coeffs.iter().enumerate() {
            let mut e = vec![0; n];
            e[k] = 1;
            p.add_term(Monomial(e), c.clone());
        }
        p
    }

    pub fn vars(&self) -> &Vars {
        &self.vars
    }

    pub fn nvars(&self) -> usize {
        self.vars.len()
    }

    pub fn var_index(&self, name: &str) -> Result<usize, PolyError> {
        self.vars.iter().position(|v| v == name).ok_or_else(|| PolyError::UnknownVariable(name.to_string()))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in canonical order, leading term first.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &S)> + '_ {
        self.terms.iter().rev()
    }

    pub fn coefficient(&self, exponents: &[u32]) -> S {
        self.terms.get(&Monomial(exponents.to_vec())).cloned().unwrap_or_else(S::zero)
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &S)> {
        self.terms.iter().next_back()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn degree_in(&self, index: usize) -> u32 {
        self.terms.keys().map(|m| m.0[index]).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, m: Monomial, c: S) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                let sum = existing.clone() + c;
                if sum.is_zero() {
                    self.terms.remove(&m);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn scale(&self, c: &S) -> Self {
        if c.is_zero() {
            return Self::zero(self.vars.clone());
        }
        MultiPoly {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, v)| (m.clone(), v.clone() * c.clone()))
                .filter(|(_, v)| !v.is_zero())
                .collect(),
        }
    }

    pub fn map_coeffs<T: Scalar>(&self, f: impl Fn(&S) -> T) -> MultiPoly<T> {
        let mut out = MultiPoly::zero(self.vars.clone());
        for (m, c) in &self.terms {
            out.add_term(m.clone(), f(c));
        }
        out
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.magnitude()).fold(0.0, f64::max)
    }

    /// Evaluates at `point`, given in variable order.
    pub fn eval(&self, point: &[S]) -> S {
        assert_eq!(point.len(), self.nvars(), "point dimension mismatch");
        let maxdeg: Vec<u32> = (0..self.nvars()).map(|k| self.degree_in(k)).collect();
        let powers: Vec<Vec<S>> = point
            .iter()
            .zip(&maxdeg)
            .map(|(x, &d)| {
                let mut pw = Vec::with_capacity(d as usize + 1);
                pw.push(S::one());
                for k in 1..=d as usize {
                    let next = pw[k - 1].clone() * x.clone();
                    pw.push(next);
                }
                pw
            })
            .collect();
        let mut acc = S::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (k, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    t = t * powers[k][e as usize].clone();
                }
            }
            acc = acc + t;
        }
        acc
    }

    /// Evaluates with named assignments; every variable must be assigned.
    pub fn eval_named(&self, assignment: &[(&str, S)]) -> Result<S, PolyError> {
        let point = self
            .vars
            .iter()
            .map(|name| {
                assignment
                    .iter()
                    .find(|(n, _)| n == name)
                    .map(|(_, v)| v.clone())
                    .ok_or_else(|| PolyError::MissingVariable(name.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self.eval(&point))
    }

    /// `Σ |c|·|x^α|`, the natural scale for a relative residual of `eval`.
    pub fn eval_abs(&self, point: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| m.0.iter().zip(point).fold(c.magnitude(), |acc, (&e, x)| acc * f64::abs(*x).powi(e as i32)))
            .sum()
    }

    pub fn partial(&self, index: usize) -> Self {
        let mut out = Self::zero(self.vars.clone());
        for (m, c) in &self.terms {
            let e = m.0[index];
            if e == 0 {
                continue;
            }
            let mut dm = m.clone();
            dm.0[index] -= 1;
            out.add_term(dm, c.clone() * S::from_i64(e as i64));
        }
        out
    }

    /// Substitutes a value for one variable; the variable stays in the list with
    /// exponent zero everywhere.
    pub fn substitute(&self, index: usize, value: &S) -> Self {
        let mut out = Self::zero(self.vars.clone());
        for (m, c) in &self.terms {
            let e = m.0[index];
            let mut rm = m.clone();
            rm.0[index] = 0;
            let mut coeff = c.clone();
            for _ in 0..e {
                coeff = coeff * value.clone();
            }
            out.add_term(rm, coeff);
        }
        out
    }

    /// Substitutes the polynomial `value` (same variable list) for variable `index`.
    pub fn compose(&self, index: usize, value: &MultiPoly<S>) -> Self {
        self.assert_same_vars(value);
        let coeffs = self.coefficients_in(index);
        // Horner in `value`
        let mut acc = Self::zero(self.vars.clone());
        for c in coeffs.iter().rev() {
            acc = &(&acc * value) + c;
        }
        acc
    }

    /// Coefficients with respect to one variable: `self = Σ_k out[k]·x^k`.
    pub fn coefficients_in(&self, index: usize) -> Vec<MultiPoly<S>> {
        let d = self.degree_in(index) as usize;
        let mut out = vec![Self::zero(self.vars.clone()); d + 1];
        for (m, c) in &self.terms {
            let e = m.0[index] as usize;
            let mut rm = m.clone();
            rm.0[index] = 0;
            out[e].add_term(rm, c.clone());
        }
        if self.is_zero() {
            out.truncate(1);
        }
        out
    }

    pub fn to_unipoly(&self, index: usize) -> Result<UniPoly<S>, PolyError> {
        let d = self.degree_in(index) as usize;
        let mut coeffs = vec![S::zero(); d + 1];
        for (m, c) in &self.terms {
            if m.0.iter().enumerate().any(|(k, &e)| k != index && e > 0) {
                return Err(PolyError::NotUnivariate(self.vars[index].clone()));
            }
            coeffs[m.0[index] as usize] = c.clone();
        }
        Ok(UniPoly::new(self.vars[index].clone(), coeffs))
    }

    /// Multivariate division with remainder in graded-lex order.
    pub fn div_rem(&self, divisor: &MultiPoly<S>) -> Result<(Self, Self), PolyError> {
        self.assert_same_vars(divisor);
        let (lm, lc) = match divisor.leading_term() {
            Some((m, c)) => (m.clone(), c.clone()),
            None => return Err(PolyError::ZeroPolynomial),
        };
        let mut rest = self.clone();
        let mut quotient = Self::zero(self.vars.clone());
        let mut remainder = Self::zero(self.vars.clone());
        while let Some((m, c)) = rest.terms.iter().next_back().map(|(m, c)| (m.clone(), c.clone())) {
            if lm.divides(&m) {
                let shift = m.div(&lm);
                let factor = c / lc.clone();
                rest.sub_shifted(divisor, &shift, &factor);
                // guard against rounding residue in float mode
                rest.terms.remove(&m);
                quotient.add_term(shift, factor);
            } else {
                rest.terms.remove(&m);
                remainder.add_term(m, c);
            }
        }
        Ok((quotient, remainder))
    }

    /// Quotient of an exact division; fails with the remainder norm otherwise.
    pub fn divide_exact(&self, divisor: &MultiPoly<S>) -> Result<Self, PolyError> {
        let (q, r) = self.div_rem(divisor)?;
        if r.is_zero() {
            Ok(q)
        } else {
            Err(PolyError::InexactDivision { remainder_norm: r.max_abs_coeff() })
        }
    }

    fn sub_shifted(&mut self, p: &MultiPoly<S>, shift: &Monomial, factor: &S) {
        for (m, c) in &p.terms {
            self.add_term(m.mul(shift), -(c.clone() * factor.clone()));
        }
    }

    fn assert_same_vars(&self, other: &MultiPoly<S>) {
        assert!(
            Arc::ptr_eq(&self.vars, &other.vars) || self.vars == other.vars,
            "polynomials live in different variable lists"
        );
    }

    /// Same polynomial over another (compatible) variable list, by name.
    pub fn with_vars(&self, target: &Vars) -> Result<Self, PolyError> {
        let map = self
            .vars
            .iter()
            .map(|n| target.iter().position(|t| t == n).ok_or_else(|| PolyError::UnknownVariable(n.clone())))
            .collect::<Result<Vec<_>, _>>()?;
        let mut out = Self::zero(target.clone());
        for (m, c) in &self.terms {
            let mut e = vec![0; target.len()];
            for (k, &x) in m.0.iter().enumerate() {
                e[map[k]] = x;
            }
            out.add_term(Monomial(e), c.clone());
        }
        Ok(out)
    }
}

impl MultiPoly<BigRational> {
    /// Integer-coefficient multiple with unit content and positive leading coefficient.
    pub fn primitive(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let den_lcm = self.terms.values().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let num_gcd = self.terms.values().fold(BigInt::zero(), |acc, c| acc.gcd(&(c.numer() * (&den_lcm / c.denom()))));
        let mut factor = BigRational::new(den_lcm, num_gcd);
        if self.leading_term().map(|(_, c)| c.is_negative()).unwrap_or(false) {
            factor = -factor;
        }
        self.scale(&factor)
    }

    pub fn to_f64(&self) -> MultiPoly<f64> {
        self.map_coeffs(Scalar::to_f64)
    }
}

impl<'a, S: Scalar> Add<&'a MultiPoly<S>> for &'a MultiPoly<S> {
    type Output = MultiPoly<S>;
    fn add(self, rhs: &'a MultiPoly<S>) -> MultiPoly<S> {
        self.assert_same_vars(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }
}

impl<'a, S: Scalar> Sub<&'a MultiPoly<S>> for &'a MultiPoly<S> {
    type Output = MultiPoly<S>;
    fn sub(self, rhs: &'a MultiPoly<S>) -> MultiPoly<S> {
        self.assert_same_vars(rhs);
        let mut out = self.clone();
        for (m, c) in &rhs.terms {
            out.add_term(m.clone(), -c.clone());
        }
        out
    }
}

impl<'a, S: Scalar> Mul<&'a MultiPoly<S>> for &'a MultiPoly<S> {
    type Output = MultiPoly<S>;
    fn mul(self, rhs: &'a MultiPoly<S>) -> MultiPoly<S> {
        self.assert_same_vars(rhs);
        let mut out = MultiPoly::zero(self.vars.clone());
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca.clone() * cb.clone());
            }
        }
        out
    }
}

impl<S: Scalar> Neg for &MultiPoly<S> {
    type Output = MultiPoly<S>;
    fn neg(self) -> MultiPoly<S> {
        self.map_coeffs(|c| -c.clone())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<S: Scalar> $tr<MultiPoly<S>> for MultiPoly<S> {
            type Output = MultiPoly<S>;
            fn $m(self, rhs: MultiPoly<S>) -> MultiPoly<S> {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl<S: Scalar + fmt::Display> fmt::Display for MultiPoly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            for (name, &e) in self.vars.iter().zip(&m.0) {
                match e {
                    0 => {}
                    1 => write!(f, "*{name}")?,
                    _ => write!(f, "*{name}^{e}")?,
                }
            }
        }
        Ok(())
    }
}

impl<S: Scalar> fmt::Debug for MultiPoly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MultiPoly")
            .field("vars", &self.vars)
            .field("terms", &self.terms.len())
            .field("total_degree", &self.total_degree())
            .finish()
    }
}
