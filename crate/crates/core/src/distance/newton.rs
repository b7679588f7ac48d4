use nalgebra::DVector;

use super::lagrangian::Lagrangian;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NewtonOptions {
    pub max_iterations: usize,
    /// Stop once the normalized residual drops below this.
    pub tolerance: f64,
    /// Give up when the iterate leaves this ball.
    pub max_norm: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self { max_iterations: 80, tolerance: 1e-12, max_norm: 1e6 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NewtonOutcome {
    pub z: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

/// Damped Newton on `∇L = 0` with a backtracking line search on `‖∇L‖²`.
///
/// Returns the final iterate; callers decide acceptance from `residual`
/// (the normalized KKT residual).
pub fn newton_solve(lag: &dyn Lagrangian, z0: &[f64], opts: &NewtonOptions) -> NewtonOutcome {
    let mut z = DVector::from_column_slice(z0);
    let mut g = lag.gradient(z.as_slice());
    let mut merit = g.norm_squared();
    let mut iterations = 0;
    let mut stalled = 0;
    while iterations < opts.max_iterations {
        iterations += 1;
        if !merit.is_finite() {
            break;
        }
        let h = lag.hessian(z.as_slice());
        let step = match h.clone().lu().solve(&g) {
            Some(s) if s.iter().all(|x| x.is_finite()) => s,
            _ => match h.svd(true, true).solve(&g, 1e-14) {
                Ok(s) => s,
                Err(_) => break,
            },
        };
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..30 {
            let trial = &z - &step * t;
            let gt = lag.gradient(trial.as_slice());
            let mt = gt.norm_squared();
            if mt.is_finite() && mt <= (1.0 - 1e-4 * t) * merit {
                z = trial;
                g = gt;
                merit = mt;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted {
            // a full step that fails the descent test may still be at rounding level
            let trial = &z - &step;
            let gt = lag.gradient(trial.as_slice());
            if gt.norm_squared().is_finite() && gt.norm_squared() <= 4.0 * merit {
                z = trial;
                g = gt;
                merit = g.norm_squared();
            }
            stalled += 1;
            if stalled > 2 {
                break;
            }
        }
        if z.norm() > opts.max_norm {
            break;
        }
        if lag.normalized_residual(z.as_slice()) < opts.tolerance {
            break;
        }
        if step.norm() * t <= 1e-15 * z.norm().max(1.0) {
            break;
        }
    }
    let residual = lag.normalized_residual(z.as_slice());
    NewtonOutcome {
        z: z.as_slice().to_vec(),
        residual: if residual.is_finite() { residual } else { f64::INFINITY },
        iterations,
    }
}
