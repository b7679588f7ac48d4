use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::scalar::Scalar;
use super::PolyError;

/// Dense univariate polynomial, coefficients in ascending powers.
///
/// The leading coefficient is nonzero; the zero polynomial has no coefficients.
#[derive(Clone, PartialEq)]
pub struct UniPoly<S> {
    var: String,
    coeffs: Vec<S>,
}

impl<S: Scalar> UniPoly<S> {
    pub fn new(var: impl Into<String>, mut coeffs: Vec<S>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UniPoly { var: var.into(), coeffs }
    }

    pub fn zero(var: impl Into<String>) -> Self {
        UniPoly { var: var.into(), coeffs: Vec::new() }
    }

    pub fn constant(var: impl Into<String>, c: S) -> Self {
        Self::new(var, vec![c])
    }

    /// `x - root`
    pub fn linear_factor(var: impl Into<String>, root: S) -> Self {
        Self::new(var, vec![-root, S::one()])
    }

    pub fn var(&self) -> &str {
        &self.var
    }

    pub fn coeffs(&self) -> &[S] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> S {
        self.coeffs.last().cloned().unwrap_or_else(S::zero)
    }

    pub fn eval(&self, x: &S) -> S {
        self.coeffs.iter().rev().fold(S::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c.to_f64())
    }

    pub fn derivative(&self) -> Self {
        let coeffs = self.coeffs.iter().enumerate().skip(1).map(|(k, c)| c.clone() * S::from_i64(k as i64)).collect();
        Self::new(self.var.clone(), coeffs)
    }

    pub fn scale(&self, c: &S) -> Self {
        Self::new(self.var.clone(), self.coeffs.iter().map(|x| x.clone() * c.clone()).collect())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let inv = S::one() / self.leading();
        self.scale(&inv)
    }

    /// Euclidean coefficient norm.
    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.to_f64().powi(2)).sum::<f64>().sqrt()
    }

    pub fn map_coeffs<T: Scalar>(&self, f: impl Fn(&S) -> T) -> UniPoly<T> {
        UniPoly::new(self.var.clone(), self.coeffs.iter().map(f).collect())
    }

    pub fn to_f64(&self) -> UniPoly<f64> {
        self.map_coeffs(Scalar::to_f64)
    }

    /// Polynomial long division over the coefficient field.
    pub fn div_rem(&self, divisor: &UniPoly<S>) -> Result<(Self, Self), PolyError> {
        if divisor.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        if self.coeffs.len() < divisor.coeffs.len() {
            return Ok((Self::zero(self.var.clone()), self.clone()));
        }
        let mut rem = self.coeffs.clone();
        let dlen = divisor.coeffs.len();
        let lead = divisor.leading();
        let mut quot = vec![S::zero(); rem.len() - dlen + 1];
        for k in (0..quot.len()).rev() {
            let factor = rem[k + dlen - 1].clone() / lead.clone();
            for (j, dc) in divisor.coeffs.iter().enumerate() {
                rem[k + j] = rem[k + j].clone() - factor.clone() * dc.clone();
            }
            rem[k + dlen - 1] = S::zero();
            quot[k] = factor;
        }
        rem.truncate(dlen - 1);
        Ok((Self::new(self.var.clone(), quot), Self::new(self.var.clone(), rem)))
    }
}

impl<'a, S: Scalar> Add<&'a UniPoly<S>> for &'a UniPoly<S> {
    type Output = UniPoly<S>;
    fn add(self, rhs: &'a UniPoly<S>) -> UniPoly<S> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n)
            .map(|k| {
                let a = self.coeffs.get(k).cloned().unwrap_or_else(S::zero);
                let b = rhs.coeffs.get(k).cloned().unwrap_or_else(S::zero);
                a + b
            })
            .collect();
        UniPoly::new(self.var.clone(), coeffs)
    }
}

impl<'a, S: Scalar> Sub<&'a UniPoly<S>> for &'a UniPoly<S> {
    type Output = UniPoly<S>;
    fn sub(self, rhs: &'a UniPoly<S>) -> UniPoly<S> {
        self + &(-rhs)
    }
}

impl<'a, S: Scalar> Mul<&'a UniPoly<S>> for &'a UniPoly<S> {
    type Output = UniPoly<S>;
    fn mul(self, rhs: &'a UniPoly<S>) -> UniPoly<S> {
        if self.is_zero() || rhs.is_zero() {
            return UniPoly::zero(self.var.clone());
        }
        let mut out = vec![S::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        UniPoly::new(self.var.clone(), out)
    }
}

impl<S: Scalar> Neg for &UniPoly<S> {
    type Output = UniPoly<S>;
    fn neg(self) -> UniPoly<S> {
        self.map_coeffs(|c| -c.clone())
    }
}

impl<S: Scalar> fmt::Debug for UniPoly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "UniPoly({}; {:?})", self.var, self.coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::scalar::rint;
    use num_rational::BigRational;

    #[test]
    fn long_division() {
        let p = UniPoly::new("x", vec![rint(-6), rint(11), rint(-6), rint(1)]); // (x-1)(x-2)(x-3)
        let d = UniPoly::new("x", vec![rint(-1), rint(1)]);
        let (q, r) = p.div_rem(&d).unwrap();
        assert!(r.is_zero());
        assert_eq!(q, UniPoly::new("x", vec![rint(6), rint(-5), rint(1)]));
    }

    #[test]
    fn trims_and_degrees() {
        let p: UniPoly<BigRational> = UniPoly::new("x", vec![rint(5), rint(0), rint(0)]);
        assert_eq!(p.degree(), 0);
        assert!(UniPoly::<f64>::new("x", vec![0.0, 0.0]).is_zero());
        assert_eq!(p.derivative(), UniPoly::zero("x"));
    }
}
