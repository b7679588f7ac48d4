use nalgebra::{DMatrix, DVector};

use super::resultant::sylvester_f64;
use super::scalar::Scalar;
use super::unipoly::UniPoly;
use super::PolyError;

/// Default rank threshold for the floating GCD, relative to the largest
/// singular value of the (unit-norm) Sylvester matrix.
pub const DEFAULT_GCD_TOL: f64 = 1e-8;

/// Monic greatest common divisor.
///
/// Rational mode runs the Euclidean algorithm with monic remainders (exact).
/// Float mode decides the degree from the numerical rank of the Sylvester
/// subresultant matrices and recovers the factor by least squares.
pub fn uni_gcd<S: Scalar>(p: &UniPoly<S>, q: &UniPoly<S>, tol: f64) -> Result<UniPoly<S>, PolyError> {
    if p.is_zero() || q.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    if S::EXACT {
        let mut a = p.monic();
        let mut b = q.monic();
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b)?;
            a = b;
            b = r.monic();
        }
        Ok(a.monic())
    } else {
        let g = approximate_gcd(&p.to_f64(), &q.to_f64(), tol);
        Ok(g.map_coeffs(|c| S::from_f64(*c)))
    }
}

/// GCD of a list of polynomials, folded pairwise.
pub fn uni_gcd_many<S: Scalar>(polys: &[UniPoly<S>], tol: f64) -> Result<UniPoly<S>, PolyError> {
    let mut iter = polys.iter();
    let first = iter.next().ok_or(PolyError::ZeroPolynomial)?;
    let mut g = first.monic();
    for p in iter {
        if g.degree() == 0 {
            break;
        }
        g = uni_gcd(&g, p, tol)?;
    }
    Ok(g)
}

fn approximate_gcd(p: &UniPoly<f64>, q: &UniPoly<f64>, tol: f64) -> UniPoly<f64> {
    let var = p.var().to_string();
    let one = UniPoly::constant(var.clone(), 1.0);
    let (n, m) = (p.degree(), q.degree());
    if n == 0 || m == 0 {
        return one;
    }
    let pn = p.scale(&(1.0 / p.norm()));
    let qn = q.scale(&(1.0 / q.norm()));
    for k in (1..=n.min(m)).rev() {
        // p·v − q·u = 0 with deg v = m−k, deg u = n−k
        let rows = n + m - k + 1;
        let cols = (m - k + 1) + (n - k + 1);
        let mut s = DMatrix::<f64>::zeros(rows, cols);
        for j in 0..=(m - k) {
            for (i, c) in pn.coeffs().iter().enumerate() {
                s[(i + j, j)] = *c;
            }
        }
        for j in 0..=(n - k) {
            for (i, c) in qn.coeffs().iter().enumerate() {
                s[(i + j, m - k + 1 + j)] = -*c;
            }
        }
        let svd = s.clone().svd(false, true);
        let sv = &svd.singular_values;
        let (imin, smin) = sv.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).map(|(i, v)| (i, *v)).unwrap();
        let smax = sv.max();
        if smax == 0.0 || smin / smax >= tol {
            continue;
        }
        let vt = svd.v_t.expect("requested right singular vectors");
        let null = vt.row(imin).transpose();
        let u: Vec<f64> = (0..=(n - k)).map(|j| null[m - k + 1 + j]).collect();
        // p ≈ g·u, solve for g (degree k) in least squares
        let mut conv = DMatrix::<f64>::zeros(n + 1, k + 1);
        for j in 0..=k {
            for (i, c) in u.iter().enumerate() {
                conv[(i + j, j)] = *c;
            }
        }
        let rhs = DVector::from_column_slice(pn.coeffs());
        let Ok(g) = conv.svd(true, true).solve(&rhs, 1e-14) else {
            continue;
        };
        return UniPoly::new(var, g.iter().copied().collect()).monic();
    }
    one
}

/// Sylvester-matrix rank deficiency `σ_min/σ_max`, a measure of how close two
/// polynomials are to sharing a root.
pub fn sylvester_conditioning(p: &UniPoly<f64>, q: &UniPoly<f64>) -> f64 {
    let rows = sylvester_f64(p.coeffs(), q.coeffs());
    let n = rows.len();
    if n == 0 {
        return 1.0;
    }
    let m = DMatrix::from_fn(n, n, |i, j| rows[i][j]);
    let sv = m.singular_values();
    sv.min() / sv.max()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::scalar::rint;

    fn from_roots(roots: &[f64]) -> UniPoly<f64> {
        roots.iter().fold(UniPoly::constant("x", 1.0), |acc, r| &acc * &UniPoly::linear_factor("x", *r))
    }

    #[test]
    fn exact_common_linear_factor() {
        let a = UniPoly::new("x", vec![rint(2), rint(-3), rint(1)]); // (x-1)(x-2)
        let b = UniPoly::new("x", vec![rint(3), rint(-4), rint(1)]); // (x-1)(x-3)
        let g = uni_gcd(&a, &b, DEFAULT_GCD_TOL).unwrap();
        assert_eq!(g, UniPoly::new("x", vec![rint(-1), rint(1)]));
    }

    #[test]
    fn coprime_gives_one() {
        let a = UniPoly::new("x", vec![rint(1), rint(0), rint(1)]);
        let b = UniPoly::new("x", vec![rint(-1), rint(1)]);
        assert_eq!(uni_gcd(&a, &b, DEFAULT_GCD_TOL).unwrap(), UniPoly::constant("x", rint(1)));
        let af = from_roots(&[0.5, 3.0]);
        let bf = from_roots(&[-1.0, 2.0]);
        assert_eq!(uni_gcd(&af, &bf, DEFAULT_GCD_TOL).unwrap().degree(), 0);
    }

    #[test]
    fn float_gcd_recovers_shared_quadratic() {
        let a = from_roots(&[1.0, -2.0, 0.25, 4.0]);
        let b = from_roots(&[1.0, -2.0, 3.5]);
        let g = uni_gcd(&a, &b, DEFAULT_GCD_TOL).unwrap();
        assert_eq!(g.degree(), 2);
        let expect = from_roots(&[1.0, -2.0]);
        for (x, y) in g.coeffs().iter().zip(expect.coeffs()) {
            assert!((x - y).abs() < 1e-9, "{g:?}");
        }
    }

    #[test]
    fn zero_input_is_an_error() {
        let a = UniPoly::new("x", vec![rint(1), rint(1)]);
        assert!(uni_gcd(&a, &UniPoly::zero("x"), DEFAULT_GCD_TOL).is_err());
    }
}
