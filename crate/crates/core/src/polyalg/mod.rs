//! Exact and floating polynomial algebra: sparse multivariate and dense
//! univariate polynomials, resultants, GCDs, interpolation and root finding.

mod gcd;
mod interp;
mod linalg;
mod multipoly;
mod resultant;
mod roots;
mod scalar;
mod unipoly;

pub use gcd::{sylvester_conditioning, uni_gcd, uni_gcd_many, DEFAULT_GCD_TOL};
pub use interp::interpolate_uni;
pub use linalg::{det, det_poly, nullspace, solve};
pub use multipoly::{vars, Monomial, MultiPoly, Vars};
pub use resultant::{sylvester_resultant, uni_resultant};
pub use roots::{is_real_root, polish_real_root, root_residual, uni_roots, REAL_ROOT_TOL};
pub use scalar::{parse_rational, rational, rational_from_decimal_f64, rint, ParseRationalError, Scalar};
pub use unipoly::UniPoly;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PolyError {
    #[error("variable `{0}` has no assigned value")]
    MissingVariable(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("polynomial has degree zero in `{0}`")]
    ZeroDegree(String),
    #[error("zero polynomial")]
    ZeroPolynomial,
    #[error("division leaves a remainder of norm {remainder_norm:e}")]
    InexactDivision { remainder_norm: f64 },
    #[error("interpolation node {0} repeats an earlier node")]
    DuplicateNode(usize),
    #[error("interpolation needs {needed} nodes, got {got}")]
    TooFewNodes { needed: usize, got: usize },
    #[error("samples exceed degree bound {degree_bound} (first mismatch at node {index})")]
    InterpolationMismatch { degree_bound: usize, index: usize },
    #[error("polynomial is not univariate in `{0}`")]
    NotUnivariate(String),
    #[error("iteration did not converge")]
    NoConvergence,
}
