//! All complex roots of a univariate polynomial.
//!
//! Aberth–Ehrlich simultaneous iteration started from Newton-polygon radii,
//! with a companion-matrix eigenvalue fallback, followed by Newton polishing
//! against the original coefficients.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::scalar::Scalar;
use super::unipoly::UniPoly;
use super::PolyError;

const MAX_ABERTH_ITERATIONS: usize = 800;

/// Imaginary parts below this (relative to `max(1, |z|)`) count as real.
pub const REAL_ROOT_TOL: f64 = 1e-8;

/// Backward-error style residual `|p(z)| / (‖p‖·max(1,|z|)^deg)`.
pub fn root_residual<S: Scalar>(p: &UniPoly<S>, z: Complex64) -> f64 {
    let pf = p.to_f64();
    let scale = pf.norm() * z.norm().max(1.0).powi(pf.degree() as i32);
    pf.eval_complex(z).norm() / scale
}

pub fn is_real_root(z: Complex64) -> bool {
    z.im.abs() < REAL_ROOT_TOL * z.norm().max(1.0)
}

/// Roots with multiplicity, sorted by real part then imaginary part.
pub fn uni_roots<S: Scalar>(p: &UniPoly<S>) -> Result<Vec<Complex64>, PolyError> {
    if p.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    let pf = p.to_f64();
    let mut coeffs: Vec<f64> = pf.coeffs().to_vec();
    let mut roots = Vec::with_capacity(pf.degree());
    // exact zero roots
    while coeffs.len() > 1 && coeffs[0] == 0.0 {
        coeffs.remove(0);
        roots.push(Complex64::new(0.0, 0.0));
    }
    let reduced = UniPoly::new(pf.var(), coeffs);
    if reduced.degree() > 0 {
        let found = match aberth(&reduced) {
            Some(r) => r,
            None => {
                log::debug!("Aberth iteration stalled, falling back to companion matrix");
                companion_roots(&reduced)
            }
        };
        roots.extend(found.into_iter().map(|z| polish(&reduced, z)));
    }
    roots.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(roots)
}

fn eval_with_derivative(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::zero();
    let mut dp = Complex64::zero();
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// Initial radii from the upper convex hull of `(k, log|a_k|)`.
fn newton_polygon_guesses(coeffs: &[f64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    let pts: Vec<(usize, f64)> =
        coeffs.iter().enumerate().filter(|(_, c)| **c != 0.0).map(|(k, c)| (k, c.abs().ln())).collect();
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for &pt in &pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (b.0 as f64 - a.0 as f64) * (pt.1 - a.1) - (b.1 - a.1) * (pt.0 as f64 - a.0 as f64);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    let mut guesses = Vec::with_capacity(n);
    let sigma = 0.7;
    for w in hull.windows(2) {
        let (k0, l0) = w[0];
        let (k1, l1) = w[1];
        let count = k1 - k0;
        let radius = ((l0 - l1) / count as f64).exp();
        for j in 0..count {
            let angle = 2.0 * std::f64::consts::PI * (j as f64) / (count as f64)
                + 2.0 * std::f64::consts::PI * (k0 as f64) / (n as f64)
                + sigma;
            guesses.push(Complex64::from_polar(radius, angle));
        }
    }
    guesses
}

fn aberth(p: &UniPoly<f64>) -> Option<Vec<Complex64>> {
    let coeffs: Vec<Complex64> = p.coeffs().iter().map(|c| Complex64::new(*c, 0.0)).collect();
    let n = p.degree();
    if n == 1 {
        return Some(vec![Complex64::new(-p.coeffs()[0] / p.coeffs()[1], 0.0)]);
    }
    let mut z = newton_polygon_guesses(p.coeffs());
    let mut done = vec![false; n];
    for _ in 0..MAX_ABERTH_ITERATIONS {
        for i in 0..n {
            if done[i] {
                continue;
            }
            let (pv, dv) = eval_with_derivative(&coeffs, z[i]);
            if pv == Complex64::zero() {
                done[i] = true;
                continue;
            }
            let ratio = pv / dv;
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != i)
                .map(|j| {
                    let d = z[i] - z[j];
                    if d == Complex64::zero() {
                        Complex64::new(1e300, 0.0)
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let step = ratio / (Complex64::one() - ratio * repulsion);
            if !step.is_finite() {
                continue;
            }
            z[i] -= step;
            if step.norm() <= 4.0 * f64::EPSILON * z[i].norm().max(f64::MIN_POSITIVE) {
                done[i] = true;
            }
        }
        if done.iter().all(|d| *d) {
            return Some(z);
        }
    }
    // accept if every root already satisfies the residual target
    if z.iter().all(|r| root_residual(p, *r) < 1e-13) {
        Some(z)
    } else {
        None
    }
}

fn companion_roots(p: &UniPoly<f64>) -> Vec<Complex64> {
    let n = p.degree();
    let lead = p.leading();
    let mut m = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        m[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        m[(i, n - 1)] = -p.coeffs()[i] / lead;
    }
    m.complex_eigenvalues().iter().copied().collect()
}

fn polish(p: &UniPoly<f64>, mut z: Complex64) -> Complex64 {
    let coeffs: Vec<Complex64> = p.coeffs().iter().map(|c| Complex64::new(*c, 0.0)).collect();
    let mut best = eval_with_derivative(&coeffs, z).0.norm();
    for _ in 0..4 {
        let (pv, dv) = eval_with_derivative(&coeffs, z);
        if dv == Complex64::zero() {
            break;
        }
        let candidate = z - pv / dv;
        let value = eval_with_derivative(&coeffs, candidate).0.norm();
        if value < best {
            best = value;
            z = candidate;
        } else {
            break;
        }
    }
    z
}

fn round_to_bits(x: &BigRational, bits: u32) -> BigRational {
    if x.is_zero() {
        return x.clone();
    }
    let approx = f64::abs(Scalar::to_f64(x));
    let exponent = approx.log2().floor() as i64;
    let shift = bits as i64 - 1 - exponent;
    let two = BigInt::from(2);
    let scale = if shift >= 0 {
        BigRational::from_integer(num_traits::pow(two, shift as usize))
    } else {
        BigRational::new(BigInt::one(), num_traits::pow(two, (-shift) as usize))
    };
    (x * &scale).round() / scale
}

/// Newton refinement of a real root of an exact polynomial, carried out in
/// rational arithmetic rounded to `bits` significant bits per step.
///
/// Returns the starting value unchanged when the iteration does not settle
/// close to it.
pub fn polish_real_root(p: &UniPoly<BigRational>, x0: f64, bits: u32) -> f64 {
    let dp = p.derivative();
    let mut x = <BigRational as Scalar>::from_f64(x0);
    let threshold = 2f64.powi(-(bits.min(1000) as i32));
    for _ in 0..64 {
        let d = dp.eval(&x);
        if d.is_zero() {
            return x0;
        }
        let step = p.eval(&x) / d;
        x = round_to_bits(&(&x - &step), bits);
        let xs = Scalar::to_f64(&x);
        if !xs.is_finite() || (xs - x0).abs() > 1e-3 * (1.0 + x0.abs()) {
            return x0;
        }
        if Scalar::to_f64(&Signed::abs(&step)) <= threshold * xs.abs().max(f64::MIN_POSITIVE) {
            break;
        }
    }
    Scalar::to_f64(&x)
}
