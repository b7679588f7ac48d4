use super::linalg::{det, det_poly};
use super::multipoly::MultiPoly;
use super::scalar::Scalar;
use super::unipoly::UniPoly;
use super::PolyError;

/// Sylvester matrix of two coefficient lists given in ascending powers.
fn sylvester_rows<T: Clone>(p: &[T], q: &[T], zero: &T) -> Vec<Vec<T>> {
    let n = p.len() - 1;
    let m = q.len() - 1;
    let size = n + m;
    let mut rows = Vec::with_capacity(size);
    for shift in 0..m {
        let mut row = vec![zero.clone(); size];
        for (k, c) in p.iter().rev().enumerate() {
            row[shift + k] = c.clone();
        }
        rows.push(row);
    }
    for shift in 0..n {
        let mut row = vec![zero.clone(); size];
        for (k, c) in q.iter().rev().enumerate() {
            row[shift + k] = c.clone();
        }
        rows.push(row);
    }
    rows
}

/// Resultant of `p` and `q` with respect to `var`, as the determinant of the
/// Sylvester matrix with polynomial entries. The result does not involve `var`.
pub fn sylvester_resultant<S: Scalar>(
    p: &MultiPoly<S>,
    q: &MultiPoly<S>,
    var: &str,
) -> Result<MultiPoly<S>, PolyError> {
    let idx = p.var_index(var)?;
    if p.degree_in(idx) == 0 || q.degree_in(idx) == 0 {
        return Err(PolyError::ZeroDegree(var.to_string()));
    }
    let pc = p.coefficients_in(idx);
    let qc = q.coefficients_in(idx);
    let zero = MultiPoly::zero(p.vars().clone());
    let rows = sylvester_rows(&pc, &qc, &zero);
    Ok(det_poly(&rows))
}

/// Resultant of two univariate polynomials over the coefficient field.
pub fn uni_resultant<S: Scalar>(p: &UniPoly<S>, q: &UniPoly<S>) -> Result<S, PolyError> {
    if p.degree() == 0 || q.degree() == 0 {
        return Err(PolyError::ZeroDegree(p.var().to_string()));
    }
    Ok(det(sylvester_rows(p.coeffs(), q.coeffs(), &S::zero())))
}

/// Sylvester matrix in floating point (used by the approximate GCD).
pub(crate) fn sylvester_f64(p: &[f64], q: &[f64]) -> Vec<Vec<f64>> {
    sylvester_rows(p, q, &0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::multipoly::vars;
    use crate::polyalg::scalar::rint;
    use num_rational::BigRational;
    use proptest::prelude::*;

    type Q = BigRational;

    fn xt() -> (MultiPoly<Q>, MultiPoly<Q>, MultiPoly<Q>) {
        let v = vars(&["x", "t"]);
        (MultiPoly::variable(v.clone(), 0), MultiPoly::variable(v.clone(), 1), MultiPoly::constant(v, rint(1)))
    }

    #[test]
    fn common_root_gives_zero() {
        let (x, _, one) = xt();
        let p = &x - &one;
        assert!(sylvester_resultant(&p, &p, "x").unwrap().is_zero());
    }

    #[test]
    fn parametric_resultant() {
        let (x, t, one) = xt();
        let p = &(&x * &x) - &t;
        let q = &x - &one;
        let r = sylvester_resultant(&p, &q, "x").unwrap();
        assert_eq!(r, &one - &t);
    }

    #[test]
    fn product_formula() {
        let (x, _, one) = xt();
        let p = &(&x * &x) + &one;
        let q = &(&x * &x) - &one;
        let r = sylvester_resultant(&p, &q, "x").unwrap();
        assert_eq!(r, one.scale(&rint(4)));
        let pu = UniPoly::new("x", vec![rint(1), rint(0), rint(1)]);
        let qu = UniPoly::new("x", vec![rint(-1), rint(0), rint(1)]);
        assert_eq!(uni_resultant(&pu, &qu).unwrap(), rint(4));
    }

    #[test]
    fn zero_degree_is_rejected() {
        let (x, t, _) = xt();
        assert_eq!(sylvester_resultant(&t, &x, "x").unwrap_err(), PolyError::ZeroDegree("x".into()));
    }

    proptest! {
        #[test]
        fn planted_common_factor_vanishes(
            root in -20i64..20,
            a in proptest::collection::vec(-9i64..9, 1..4),
            b in proptest::collection::vec(-9i64..9, 1..4),
        ) {
            let mut a = a; let mut b = b;
            *a.last_mut().unwrap() = 1;
            *b.last_mut().unwrap() = 2;
            let f = UniPoly::new("x", vec![rint(-root), rint(1)]);
            let p = &f * &UniPoly::new("x", a.into_iter().map(rint).collect());
            let q = &f * &UniPoly::new("x", b.into_iter().map(rint).collect());
            prop_assert_eq!(uni_resultant(&p, &q).unwrap(), rint(0));
        }
    }
}
