use nalgebra::{DMatrix, DVector, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{spherical_distance_deg, MetricContext, Mode, PedalPoint};
use crate::pentapod::{Architecture, Configuration, SingularityModel};

/// Moves `x` onto `F = 0` (and `‖i‖ = 1` when `unit`) by minimum-norm
/// Gauss–Newton steps in the coordinates flagged `free`.
pub fn project_to_variety(model: &SingularityModel, x: &[f64; 6], free: &[bool; 6], unit: bool) -> Option<[f64; 6]> {
    let idx: Vec<usize> = (0..6).filter(|&k| free[k]).collect();
    let rows = if unit { 2 } else { 1 };
    let mut y = *x;
    for _ in 0..50 {
        let grad = model.gradient(&y);
        let f = model.value(&y);
        let g = y[0] * y[0] + y[1] * y[1] + y[2] * y[2] - 1.0;
        let done = f.abs() <= 1e-14 * model.value_abs(&y).max(1.0) && (!unit || g.abs() <= 1e-15);
        if done {
            return Some(y);
        }
        let jac = DMatrix::from_fn(rows, idx.len(), |r, c| {
            let k = idx[c];
            match r {
                0 => grad[k],
                _ if k < 3 => 2.0 * y[k],
                _ => 0.0,
            }
        });
        let c = if unit { DVector::from_vec(vec![f, g]) } else { DVector::from_vec(vec![f]) };
        let step = jac.svd(true, true).solve(&c, 1e-14).ok()?;
        for (s, &k) in step.iter().zip(&idx) {
            y[k] -= s;
        }
        if y.iter().any(|v| !v.is_finite()) {
            return None;
        }
    }
    let f = model.normalized_value(&y);
    (f < 1e-12).then_some(y)
}

/// Outcome of the perturbation test around a pedal point.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalMinimality {
    pub samples: usize,
    pub projected: usize,
    /// Perturbed feasible points strictly closer than the candidate.
    pub violations: usize,
    /// Largest decrease of the distance seen (negative when none).
    pub worst_gain: f64,
}

impl LocalMinimality {
    pub fn holds(&self) -> bool {
        self.violations == 0 && self.projected > 0
    }
}

/// Perturbs `point` by random steps of length `magnitude` in the mode's free
/// coordinates, projects back onto the constraint set and compares distances.
#[allow(clippy::too_many_arguments)]
pub fn local_minimality(
    model: &SingularityModel,
    arch: &Architecture,
    g: &Configuration,
    mode: Mode,
    point: &PedalPoint,
    samples: usize,
    magnitude: f64,
    seed: u64,
) -> LocalMinimality {
    let metric = MetricContext::new(arch);
    let target = g.coordinates();
    let distance = |x: &[f64; 6]| match mode {
        Mode::FixedOrientation => (Vector3::new(x[3], x[4], x[5]) - g.position()).norm(),
        Mode::FixedPosition => spherical_distance_deg(&Vector3::new(x[0], x[1], x[2]), &g.orientation()),
        Mode::General | Mode::Equiform => metric.distance(&target, x),
    };
    let free = match mode {
        Mode::FixedOrientation => [false, false, false, true, true, true],
        Mode::FixedPosition => [true, true, true, false, false, false],
        Mode::General | Mode::Equiform => [true; 6],
    };
    let unit = mode != Mode::Equiform && mode != Mode::FixedOrientation;
    let x0 = point.pose.coordinates();
    let d0 = distance(&x0);
    let tol = 1e-9 * d0.max(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = LocalMinimality { samples, projected: 0, violations: 0, worst_gain: f64::NEG_INFINITY };
    for _ in 0..samples {
        let dir: Vec<f64> = (0..6).map(|k| if free[k] { rng.gen_range(-1.0..1.0) } else { 0.0 }).collect();
        let n = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        if n == 0.0 {
            continue;
        }
        let x: [f64; 6] = std::array::from_fn(|k| x0[k] + magnitude * dir[k] / n);
        let Some(y) = project_to_variety(model, &x, &free, unit) else { continue };
        out.projected += 1;
        let gain = d0 - distance(&y);
        out.worst_gain = out.worst_gain.max(gain);
        if gain > tol {
            out.violations += 1;
        }
    }
    out
}
