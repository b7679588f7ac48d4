//! Seeded multistart Newton for the full metric problem and its equiform relaxation.
//!
//! Each start draws an orientation on the unit sphere and a position in a box
//! around the target. Besides the box point, the start also seeds Newton from
//! the fixed-orientation pedal points of `Ω(i)` for the shifted target
//! `g_p − mean_r·(i − g_i)`, which solve the position block of the KKT system
//! exactly for that orientation.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::fixed_orientation::{closest_fixed_orientation, pedal_candidates_f64};
use super::lagrangian::{Lagrangian, MetricLagrangian};
use super::newton::{newton_solve, NewtonOptions};
use super::{check_unit_target, MetricContext, Mode, PedalPoint, PedalSet, SolverOptions, DEDUP_TOL, RESIDUAL_TOL};
use crate::error::{Error, Result};
use crate::pentapod::{Architecture, Configuration, SingularityModel};

const GENERAL_BOUND: usize = 80;
const EQUIFORM_BOUND: usize = 28;
/// Equiform solutions with a smaller orientation norm are the degenerate `i = 0` locus.
const MIN_SCALE: f64 = 1e-6;

/// Stationary points of `d(X, G)² + λ_1·(‖i‖² − 1) + λ_2·F`.
pub fn closest_general(
    model: &SingularityModel,
    arch: &Architecture,
    g: &Configuration,
    opts: &SolverOptions,
) -> Result<PedalSet> {
    run(model, arch, g, opts, false)
}

/// Stationary points of `d(X, G)² + λ_2·F` with the orientation norm free.
pub fn closest_equiform(
    model: &SingularityModel,
    arch: &Architecture,
    g: &Configuration,
    opts: &SolverOptions,
) -> Result<PedalSet> {
    run(model, arch, g, opts, true)
}

fn default_box(model: &SingularityModel, arch: &Architecture, g: &Configuration, opts: &SolverOptions) -> f64 {
    closest_fixed_orientation(model, arch, g, opts)
        .ok()
        .and_then(|s| s.minimizer().map(|p| 3.0 * p.distance))
        .filter(|h| *h > 0.0)
        .unwrap_or(10.0)
}

fn least_squares_multipliers(lag: &MetricLagrangian, x: &[f64; 6]) -> Vec<f64> {
    let grad_f = lag.model.gradient(x);
    let mut z: Vec<f64> = x.to_vec();
    z.extend(std::iter::repeat_n(0.0, lag.dim() - 6));
    // the pose rows of ∇L at zero multipliers are ∇d²
    let g0 = lag.gradient(&z);
    let cols = if lag.equiform { 1 } else { 2 };
    let a = DMatrix::from_fn(6, cols, |r, c| {
        if c + 1 == cols {
            grad_f[r]
        } else if r < 3 {
            2.0 * x[r]
        } else {
            0.0
        }
    });
    let b = DVector::from_fn(6, |r, _| -g0[r]);
    let sol = a.svd(true, true).solve(&b, 1e-12).unwrap_or_else(|_| DVector::zeros(cols));
    z.truncate(6);
    z.extend(sol.iter().map(|v| if v.is_finite() { *v } else { 0.0 }));
    z
}

fn sample_start(rng: &mut ChaCha8Rng, g: &Configuration, half_width: f64) -> [f64; 6] {
    let z: f64 = rng.gen_range(-1.0..=1.0);
    let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let s = (1.0 - z * z).max(0.0).sqrt();
    let mut x = [s * phi.cos(), s * phi.sin(), z, 0.0, 0.0, 0.0];
    for k in 0..3 {
        x[k + 3] = g.position[k] + rng.gen_range(-half_width..=half_width);
    }
    x
}

fn converged_from_start(lag: &MetricLagrangian, k: usize, seed: u64, half_width: f64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(k as u64);
    let g = Configuration::from_coordinates(&lag.target);
    let x0 = sample_start(&mut rng, &g, half_width);
    let i = [x0[0], x0[1], x0[2]];
    let m1 = lag.metric.mean_r;
    let shifted: [f64; 3] = std::array::from_fn(|c| g.position[c] - m1 * (i[c] - g.orientation[c]));
    let mut seeds = vec![x0];
    for (p, _) in pedal_candidates_f64(lag.model, &i, &shifted) {
        seeds.push([i[0], i[1], i[2], p[0], p[1], p[2]]);
    }
    let opts = NewtonOptions::default();
    seeds
        .into_iter()
        .filter_map(|x| {
            let z0 = least_squares_multipliers(lag, &x);
            let out = newton_solve(lag, &z0, &opts);
            (out.residual < RESIDUAL_TOL).then_some(out.z)
        })
        .collect()
}

fn run(
    model: &SingularityModel,
    arch: &Architecture,
    g: &Configuration,
    opts: &SolverOptions,
    equiform: bool,
) -> Result<PedalSet> {
    check_unit_target(g)?;
    let metric = MetricContext::new(arch);
    if !metric.is_positive_definite() {
        return Err(Error::InvalidArchitecture("configuration-space metric is degenerate".into()));
    }
    let mode = if equiform { Mode::Equiform } else { Mode::General };
    let mut set = PedalSet::new(mode);
    let half_width = opts.box_half_width.unwrap_or_else(|| default_box(model, arch, g, opts));
    let lag = MetricLagrangian { model, metric, target: g.coordinates(), equiform };

    let found: Vec<Vec<Vec<f64>>> =
        (0..opts.starts).into_par_iter().map(|k| converged_from_start(&lag, k, opts.seed, half_width)).collect();

    for z in found.into_iter().flatten() {
        let pose = Configuration::from_coordinates(&z[..6]);
        let mu = pose.orientation_norm();
        if equiform && mu < MIN_SCALE {
            continue;
        }
        let residual = lag.normalized_residual(&z);
        let point = PedalPoint {
            distance: metric.distance(&lag.target, &pose.coordinates()),
            lambda1: (!equiform).then(|| z[6]),
            lambda2: Some(z[z.len() - 1]),
            mu: equiform.then_some(mu),
            residual,
            is_real: true,
            pose,
        };
        match set.points.iter_mut().find(|p| p.pose.max_abs_diff(&point.pose) < DEDUP_TOL) {
            Some(p) if p.residual <= point.residual => {}
            Some(p) => *p = point,
            None => set.points.push(point),
        }
    }

    let bound = if equiform { EQUIFORM_BOUND } else { GENERAL_BOUND };
    if set.points.len() > bound {
        set.warn(format!("{} distinct pedal points exceed the generic count {bound}", set.points.len()));
    }
    if set.points.is_empty() {
        return Err(Error::NoPedalPoint);
    }
    set.sort();
    set.cross_check_rank(arch);
    Ok(set)
}
