//! Closest singular configurations.
//!
//! Four regimes are covered: fixed orientation, fixed position, the full
//! configuration-space metric and its equiform relaxation. Every solver returns
//! a [`PedalSet`], the stationary points of the constrained distance sorted by
//! distance.

mod checks;
mod fixed_orientation;
mod fixed_position;
mod lagrangian;
mod multistart;
mod newton;

use std::cmp::Ordering;
use std::fmt;

use nalgebra::{SMatrix, Vector3};

use crate::error::Result;
use crate::pentapod::{is_singular, Architecture, Configuration, SingularityModel};

pub use checks::{local_minimality, project_to_variety, LocalMinimality};
pub use fixed_orientation::{closest_fixed_orientation, pedal_polynomial, FixedOrientationSolver};
pub use fixed_position::{closest_fixed_position, eliminate_fixed_position, FixedPositionElimination};
pub use lagrangian::{FixedOrientationLagrangian, FixedPositionLagrangian, Lagrangian, MetricLagrangian};
pub use multistart::{closest_equiform, closest_general};
pub use newton::{newton_solve, NewtonOptions, NewtonOutcome};

/// Normalized KKT residual every reported pedal point satisfies.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Pose-space distance below which two pedal points are merged.
pub const DEDUP_TOL: f64 = 1e-7;

/// Averages of the offsets that define the configuration-space metric.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricContext {
    pub mean_r: f64,
    pub mean_r2: f64,
}

impl MetricContext {
    pub fn new(arch: &Architecture) -> Self {
        let r = arch.offsets();
        Self { mean_r: r.iter().sum::<f64>() / 5.0, mean_r2: r.iter().map(|x| x * x).sum::<f64>() / 5.0 }
    }

    /// `‖Δp‖² + 2·mean_r·(Δp·Δi) + mean_r2·‖Δi‖²` for pose coordinates `(u,v,w,p_x,p_y,p_z)`.
    pub fn distance_squared(&self, a: &[f64; 6], b: &[f64; 6]) -> f64 {
        let mut dp2 = 0.0;
        let mut dpi = 0.0;
        let mut di2 = 0.0;
        for k in 0..3 {
            let di = a[k] - b[k];
            let dp = a[k + 3] - b[k + 3];
            dp2 += dp * dp;
            dpi += dp * di;
            di2 += di * di;
        }
        (dp2 + 2.0 * self.mean_r * dpi + self.mean_r2 * di2).max(0.0)
    }

    pub fn distance(&self, a: &[f64; 6], b: &[f64; 6]) -> f64 {
        self.distance_squared(a, b).sqrt()
    }

    /// Gram matrix of the quadratic form in the coordinates `(u,v,w,p_x,p_y,p_z)`.
    pub fn gram(&self) -> SMatrix<f64, 6, 6> {
        SMatrix::from_fn(|r, c| match (r < 3, c < 3) {
            (true, true) if r == c => self.mean_r2,
            (false, false) if r == c => 1.0,
            (true, false) if c == r + 3 => self.mean_r,
            (false, true) if r == c + 3 => self.mean_r,
            _ => 0.0,
        })
    }

    /// Eigenvalues of [`Self::gram`]; the two 2×2 blocks `[[m2, m1], [m1, 1]]` each appear three times.
    pub fn gram_eigenvalues(&self) -> [f64; 2] {
        let tr = self.mean_r2 + 1.0;
        let det = self.mean_r2 - self.mean_r * self.mean_r;
        let disc = (tr * tr - 4.0 * det).max(0.0).sqrt();
        [(tr - disc) / 2.0, (tr + disc) / 2.0]
    }

    pub fn is_positive_definite(&self) -> bool {
        self.mean_r2 > self.mean_r * self.mean_r
    }
}

/// Root mean square displacement of the five platform anchors between two poses.
pub fn metric_d(arch: &Architecture, c1: &Configuration, c2: &Configuration) -> f64 {
    MetricContext::new(arch).distance(&c1.coordinates(), &c2.coordinates())
}

/// [`metric_d`] evaluated anchor by anchor.
pub fn metric_d_direct(arch: &Architecture, c1: &Configuration, c2: &Configuration) -> f64 {
    let sum: f64 = (0..5).map(|j| (arch.platform_point(j, c1) - arch.platform_point(j, c2)).norm_squared()).sum();
    (sum / 5.0).sqrt()
}

/// Angle between two orientations in degrees, with the cosine clamped to `[−1, 1]`.
pub fn spherical_distance_deg(i: &Vector3<f64>, j: &Vector3<f64>) -> f64 {
    let c = i.dot(j) / (i.norm() * j.norm());
    c.clamp(-1.0, 1.0).acos().to_degrees()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    FixedOrientation,
    FixedPosition,
    General,
    Equiform,
}

impl Mode {
    pub const ALL: [Mode; 4] = [Mode::FixedOrientation, Mode::FixedPosition, Mode::General, Mode::Equiform];

    pub fn name(self) -> &'static str {
        match self {
            Mode::FixedOrientation => "fixed-orientation",
            Mode::FixedPosition => "fixed-position",
            Mode::General => "general",
            Mode::Equiform => "equiform",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let key = s.to_ascii_lowercase().replace('_', "-");
        Mode::ALL.into_iter().find(|m| m.name() == key).ok_or_else(|| {
            format!("unknown mode `{s}` (expected one of fixed-orientation, fixed-position, general, equiform)")
        })
    }
}

/// A stationary point of the constrained distance.
///
/// Multiplier slots per mode: fixed orientation `λ_1 = λ` (of `F`);
/// fixed position `λ_1` of `F`, `λ_2` of the unit-sphere constraint;
/// general `λ_1` of the unit-sphere constraint, `λ_2` of `F`;
/// equiform `λ_2` of `F` only.
#[derive(Clone, Debug, PartialEq)]
pub struct PedalPoint {
    pub pose: Configuration,
    pub lambda1: Option<f64>,
    pub lambda2: Option<f64>,
    /// Translation length, angle in degrees, or metric distance depending on the mode.
    pub distance: f64,
    pub mu: Option<f64>,
    pub residual: f64,
    pub is_real: bool,
}

impl PedalPoint {
    fn cmp_key(&self, other: &Self) -> Ordering {
        self.distance.total_cmp(&other.distance).then_with(|| {
            self.pose
                .coordinates()
                .iter()
                .zip(other.pose.coordinates())
                .map(|(a, b)| a.total_cmp(&b))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PedalSet {
    pub mode: Mode,
    pub points: Vec<PedalPoint>,
    /// Number of non-real solutions, when the mode counts them.
    pub complex_count: Option<usize>,
    /// Degree of the eliminated univariate polynomial, when one is formed.
    pub univariate_degree: Option<usize>,
    pub warnings: Vec<String>,
}

impl PedalSet {
    pub(crate) fn new(mode: Mode) -> Self {
        Self { mode, points: Vec::new(), complex_count: None, univariate_degree: None, warnings: Vec::new() }
    }

    pub(crate) fn warn(&mut self, message: impl Into<String>) {
        let message = message.into();
        log::warn!("{}: {message}", self.mode);
        self.warnings.push(message);
    }

    /// Sorts ascending by distance, ties broken lexicographically by pose.
    pub(crate) fn sort(&mut self) {
        self.points.sort_by(|a, b| a.cmp_key(b));
    }

    /// The closest real pedal point.
    pub fn minimizer(&self) -> Option<&PedalPoint> {
        self.points.iter().find(|p| p.is_real)
    }

    pub fn real_count(&self) -> usize {
        self.points.iter().filter(|p| p.is_real).count()
    }

    /// Flags points whose Jacobian is not numerically rank deficient. A
    /// non-unit orientation stands for the platform scaled by its norm.
    pub(crate) fn cross_check_rank(&mut self, arch: &Architecture) {
        let suspicious = self.points.iter().filter(|p| !is_singular(arch, &p.pose, 1e-6).singular).count();
        if suspicious > 0 {
            self.warn(format!("{suspicious} pedal point(s) have full-rank Jacobian"));
        }
    }
}

/// Settings for the multistart solvers and the exact root refinement.
#[derive(Clone, Debug, PartialEq)]
pub struct SolverOptions {
    pub seed: u64,
    pub starts: usize,
    /// Half-width of the position box around the target; defaults to three
    /// times the fixed-orientation distance.
    pub box_half_width: Option<f64>,
    /// Significant bits kept while refining roots of exact univariate polynomials.
    pub precision_bits: u32,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { seed: 0, starts: 5000, box_half_width: None, precision_bits: 128 }
    }
}

/// Minimizer distance of the chosen regime.
pub fn singularity_free_radius(
    model: &SingularityModel,
    arch: &Architecture,
    g: &Configuration,
    mode: Mode,
    opts: &SolverOptions,
) -> Result<f64> {
    let set = solve(model, arch, g, mode, opts)?;
    Ok(set.minimizer().map(|p| p.distance).expect("solvers return at least one real point"))
}

/// Dispatches to the solver of `mode`.
pub fn solve(
    model: &SingularityModel,
    arch: &Architecture,
    g: &Configuration,
    mode: Mode,
    opts: &SolverOptions,
) -> Result<PedalSet> {
    match mode {
        Mode::FixedOrientation => closest_fixed_orientation(model, arch, g, opts),
        Mode::FixedPosition => closest_fixed_position(model, arch, g, opts),
        Mode::General => closest_general(model, arch, g, opts),
        Mode::Equiform => closest_equiform(model, arch, g, opts),
    }
}

pub(crate) fn check_unit_target(g: &Configuration) -> Result<()> {
    g.check_unit()?;
    if g.position.iter().any(|x| !x.is_finite()) {
        return Err(crate::Error::InvalidConfiguration("non-finite position".into()));
    }
    Ok(())
}
