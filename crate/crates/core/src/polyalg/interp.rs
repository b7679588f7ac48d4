use super::scalar::Scalar;
use super::unipoly::UniPoly;
use super::PolyError;

/// Interpolates `eval` by a polynomial of degree at most `degree_bound`.
///
/// The first `degree_bound + 1` nodes define the interpolant (Newton divided
/// differences); any further nodes are used as a consistency check, exact in
/// rational mode and relative `1e-8` in float mode.
pub fn interpolate_uni<S, F>(var: &str, eval: F, degree_bound: usize, nodes: &[S]) -> Result<UniPoly<S>, PolyError>
where
    S: Scalar,
    F: Fn(&S) -> S,
{
    let needed = degree_bound + 1;
    if nodes.len() < needed {
        return Err(PolyError::TooFewNodes { needed, got: nodes.len() });
    }
    for (i, a) in nodes.iter().enumerate() {
        if nodes[..i].iter().any(|b| b == a) {
            return Err(PolyError::DuplicateNode(i));
        }
    }
    let values: Vec<S> = nodes.iter().map(&eval).collect();

    let xs = &nodes[..needed];
    let mut dd: Vec<S> = values[..needed].to_vec();
    for level in 1..needed {
        for i in (level..needed).rev() {
            dd[i] = (dd[i].clone() - dd[i - 1].clone()) / (xs[i].clone() - xs[i - level].clone());
        }
    }
    // expand Newton form into monomial coefficients
    let mut poly = UniPoly::constant(var, dd[needed - 1].clone());
    for i in (0..needed - 1).rev() {
        let factor = UniPoly::linear_factor(var, xs[i].clone());
        poly = &(&poly * &factor) + &UniPoly::constant(var, dd[i].clone());
    }

    for (index, (x, y)) in nodes.iter().zip(&values).enumerate().skip(needed) {
        let got = poly.eval(x);
        let ok =
            if S::EXACT { got == *y } else { (got.clone() - y.clone()).magnitude() <= 1e-8 * (1.0 + y.magnitude()) };
        if !ok {
            return Err(PolyError::InterpolationMismatch { degree_bound, index });
        }
    }
    Ok(poly)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::scalar::{rational, rint};
    use num_rational::BigRational;
    use proptest::prelude::*;

    #[test]
    fn square_from_three_nodes() {
        let p = interpolate_uni("x", |x: &BigRational| x * x, 2, &[rint(0), rint(1), rint(2)]).unwrap();
        assert_eq!(p, UniPoly::new("x", vec![rint(0), rint(0), rint(1)]));
    }

    #[test]
    fn constant_trims_to_degree_zero() {
        let nodes: Vec<BigRational> = (0..4).map(rint).collect();
        let p = interpolate_uni("x", |_| rint(5), 3, &nodes).unwrap();
        assert_eq!(p.degree(), 0);
        assert_eq!(p.coeffs(), &[rint(5)]);
    }

    #[test]
    fn duplicate_and_missing_nodes() {
        let err = interpolate_uni("x", |x: &BigRational| x.clone(), 1, &[rint(1), rint(1)]).unwrap_err();
        assert_eq!(err, PolyError::DuplicateNode(1));
        let err = interpolate_uni("x", |x: &BigRational| x.clone(), 2, &[rint(1), rint(2)]).unwrap_err();
        assert_eq!(err, PolyError::TooFewNodes { needed: 3, got: 2 });
    }

    #[test]
    fn extra_nodes_detect_degree_overflow() {
        let nodes: Vec<BigRational> = (0..5).map(rint).collect();
        let err = interpolate_uni("x", |x: &BigRational| x * x * x, 2, &nodes).unwrap_err();
        assert!(matches!(err, PolyError::InterpolationMismatch { .. }));
    }

    proptest! {
        #[test]
        fn reproduces_any_polynomial_exactly(coeffs in proptest::collection::vec(-50i64..50, 1..8)) {
            let target = UniPoly::new("x", coeffs.into_iter().map(rint).collect());
            let bound = 7;
            let nodes: Vec<BigRational> = (0..10).map(|k| rational(2 * k - 9, 3)).collect();
            let p = interpolate_uni("x", |x| target.eval(x), bound, &nodes).unwrap();
            prop_assert_eq!(p, target);
        }
    }
}
