//! Lagrangians of the four closest-singularity problems.
//!
//! Each exposes `L`, its gradient over all unknowns (the KKT residual, whose
//! last entries are the constraints) and the Hessian used by Newton, plus a
//! per-equation magnitude used to normalize residuals.

use nalgebra::{DMatrix, DVector};

use super::MetricContext;
use crate::pentapod::SingularityModel;

pub trait Lagrangian: Sync {
    fn dim(&self) -> usize;
    fn value(&self, z: &[f64]) -> f64;
    fn gradient(&self, z: &[f64]) -> DVector<f64>;
    fn hessian(&self, z: &[f64]) -> DMatrix<f64>;
    /// Sum of absolute values of the summands of each gradient entry.
    fn gradient_scale(&self, z: &[f64]) -> DVector<f64>;

    /// `max_k |∇L_k| / max(scale_k, 1)`.
    fn normalized_residual(&self, z: &[f64]) -> f64 {
        let g = self.gradient(z);
        let s = self.gradient_scale(z);
        g.iter().zip(s.iter()).map(|(r, s)| r.abs() / s.max(1.0)).fold(0.0, f64::max)
    }
}

fn abs_gradient(model: &SingularityModel, x: &[f64; 6]) -> [f64; 6] {
    model.gradient_abs(x)
}

fn pose(z: &[f64]) -> [f64; 6] {
    std::array::from_fn(|k| z[k])
}

/// `‖p − g_p‖² + λ·F(i₀, p)` over `(p_x, p_y, p_z, λ)` at a fixed orientation.
pub struct FixedOrientationLagrangian<'a> {
    pub model: &'a SingularityModel,
    pub orientation: [f64; 3],
    pub target: [f64; 3],
}

impl FixedOrientationLagrangian<'_> {
    fn full(&self, z: &[f64]) -> [f64; 6] {
        let i = self.orientation;
        [i[0], i[1], i[2], z[0], z[1], z[2]]
    }
}

impl Lagrangian for FixedOrientationLagrangian<'_> {
    fn dim(&self) -> usize {
        4
    }

    fn value(&self, z: &[f64]) -> f64 {
        let d2: f64 = (0..3).map(|k| (z[k] - self.target[k]).powi(2)).sum();
        d2 + z[3] * self.model.value(&self.full(z))
    }

    fn gradient(&self, z: &[f64]) -> DVector<f64> {
        let x = self.full(z);
        let d = self.model.derivatives(&x);
        DVector::from_fn(
            4,
            |k, _| {
                if k < 3 {
                    2.0 * (z[k] - self.target[k]) + z[3] * d.gradient[k + 3]
                } else {
                    d.value
                }
            },
        )
    }

    fn hessian(&self, z: &[f64]) -> DMatrix<f64> {
        let d = self.model.derivatives(&self.full(z));
        let mut h = DMatrix::zeros(4, 4);
        for k in 0..3 {
            for l in 0..3 {
                h[(k, l)] = z[3] * d.hessian[k + 3][l + 3];
            }
            h[(k, k)] += 2.0;
            h[(k, 3)] = d.gradient[k + 3];
            h[(3, k)] = d.gradient[k + 3];
        }
        h
    }

    fn gradient_scale(&self, z: &[f64]) -> DVector<f64> {
        let x = self.full(z);
        let ag = abs_gradient(self.model, &x);
        DVector::from_fn(4, |k, _| {
            if k < 3 {
                2.0 * (z[k].abs() + self.target[k].abs()) + z[3].abs() * ag[k + 3]
            } else {
                self.model.value_abs(&x)
            }
        })
    }
}

/// `‖i − g_i‖² + λ_1·F(i, p₀) + λ_2·(‖i‖² − 1)` over `(u, v, w, λ_1, λ_2)`.
pub struct FixedPositionLagrangian<'a> {
    pub model: &'a SingularityModel,
    pub position: [f64; 3],
    pub target: [f64; 3],
}

impl FixedPositionLagrangian<'_> {
    fn full(&self, z: &[f64]) -> [f64; 6] {
        let p = self.position;
        [z[0], z[1], z[2], p[0], p[1], p[2]]
    }
}

impl Lagrangian for FixedPositionLagrangian<'_> {
    fn dim(&self) -> usize {
        5
    }

    fn value(&self, z: &[f64]) -> f64 {
        let d2: f64 = (0..3).map(|k| (z[k] - self.target[k]).powi(2)).sum();
        let g = z[0] * z[0] + z[1] * z[1] + z[2] * z[2] - 1.0;
        d2 + z[3] * self.model.value(&self.full(z)) + z[4] * g
    }

    fn gradient(&self, z: &[f64]) -> DVector<f64> {
        let d = self.model.derivatives(&self.full(z));
        DVector::from_fn(5, |k, _| match k {
            0..=2 => 2.0 * (z[k] - self.target[k]) + z[3] * d.gradient[k] + 2.0 * z[4] * z[k],
            3 => d.value,
            _ => z[0] * z[0] + z[1] * z[1] + z[2] * z[2] - 1.0,
        })
    }

    fn hessian(&self, z: &[f64]) -> DMatrix<f64> {
        let d = self.model.derivatives(&self.full(z));
        let mut h = DMatrix::zeros(5, 5);
        for k in 0..3 {
            for l in 0..3 {
                h[(k, l)] = z[3] * d.hessian[k][l];
            }
            h[(k, k)] += 2.0 + 2.0 * z[4];
            h[(k, 3)] = d.gradient[k];
            h[(3, k)] = d.gradient[k];
            h[(k, 4)] = 2.0 * z[k];
            h[(4, k)] = 2.0 * z[k];
        }
        h
    }

    fn gradient_scale(&self, z: &[f64]) -> DVector<f64> {
        let x = self.full(z);
        let ag = abs_gradient(self.model, &x);
        DVector::from_fn(5, |k, _| match k {
            0..=2 => 2.0 * (z[k].abs() + self.target[k].abs()) + z[3].abs() * ag[k] + 2.0 * (z[4] * z[k]).abs(),
            3 => self.model.value_abs(&x),
            _ => z[0] * z[0] + z[1] * z[1] + z[2] * z[2] + 1.0,
        })
    }
}

/// `d(X, G)² + λ_1·(‖i‖² − 1) + λ_2·F` over `(u,v,w,p_x,p_y,p_z,λ_1,λ_2)`,
/// or without the `λ_1` term and unknown in the equiform relaxation.
pub struct MetricLagrangian<'a> {
    pub model: &'a SingularityModel,
    pub metric: MetricContext,
    pub target: [f64; 6],
    pub equiform: bool,
}

impl MetricLagrangian<'_> {
    fn split(&self, z: &[f64]) -> (f64, f64) {
        if self.equiform {
            (0.0, z[6])
        } else {
            (z[6], z[7])
        }
    }

    /// Gradient of `d²` with respect to the pose.
    fn metric_gradient(&self, x: &[f64; 6]) -> [f64; 6] {
        let (m1, m2) = (self.metric.mean_r, self.metric.mean_r2);
        std::array::from_fn(|k| {
            let (di, dp) = if k < 3 {
                (x[k] - self.target[k], x[k + 3] - self.target[k + 3])
            } else {
                (x[k - 3] - self.target[k - 3], x[k] - self.target[k])
            };
            if k < 3 {
                2.0 * m2 * di + 2.0 * m1 * dp
            } else {
                2.0 * dp + 2.0 * m1 * di
            }
        })
    }
}

impl Lagrangian for MetricLagrangian<'_> {
    fn dim(&self) -> usize {
        if self.equiform {
            7
        } else {
            8
        }
    }

    fn value(&self, z: &[f64]) -> f64 {
        let x = pose(z);
        let (l1, l2) = self.split(z);
        let g = x[0] * x[0] + x[1] * x[1] + x[2] * x[2] - 1.0;
        self.metric.distance_squared(&self.target, &x) + l1 * g + l2 * self.model.value(&x)
    }

    fn gradient(&self, z: &[f64]) -> DVector<f64> {
        let x = pose(z);
        let (l1, l2) = self.split(z);
        let d = self.model.derivatives(&x);
        let md = self.metric_gradient(&x);
        let n = self.dim();
        DVector::from_fn(n, |k, _| match k {
            0..=2 => md[k] + 2.0 * l1 * x[k] + l2 * d.gradient[k],
            3..=5 => md[k] + l2 * d.gradient[k],
            6 if !self.equiform => x[0] * x[0] + x[1] * x[1] + x[2] * x[2] - 1.0,
            _ => d.value,
        })
    }

    fn hessian(&self, z: &[f64]) -> DMatrix<f64> {
        let x = pose(z);
        let (l1, l2) = self.split(z);
        let d = self.model.derivatives(&x);
        let (m1, m2) = (self.metric.mean_r, self.metric.mean_r2);
        let n = self.dim();
        let f_col = n - 1;
        let mut h = DMatrix::zeros(n, n);
        for k in 0..6 {
            for l in 0..6 {
                h[(k, l)] = l2 * d.hessian[k][l];
            }
            h[(k, f_col)] = d.gradient[k];
            h[(f_col, k)] = d.gradient[k];
        }
        for k in 0..3 {
            h[(k, k)] += 2.0 * m2 + 2.0 * l1;
            h[(k + 3, k + 3)] += 2.0;
            h[(k, k + 3)] += 2.0 * m1;
            h[(k + 3, k)] += 2.0 * m1;
            if !self.equiform {
                h[(k, 6)] = 2.0 * x[k];
                h[(6, k)] = 2.0 * x[k];
            }
        }
        h
    }

    fn gradient_scale(&self, z: &[f64]) -> DVector<f64> {
        let x = pose(z);
        let (l1, l2) = self.split(z);
        let ag = abs_gradient(self.model, &x);
        let (m1, m2) = (self.metric.mean_r.abs(), self.metric.mean_r2);
        let t = &self.target;
        let n = self.dim();
        DVector::from_fn(n, |k, _| match k {
            0..=2 => {
                2.0 * m2 * (x[k].abs() + t[k].abs())
                    + 2.0 * m1 * (x[k + 3].abs() + t[k + 3].abs())
                    + 2.0 * (l1 * x[k]).abs()
                    + l2.abs() * ag[k]
            }
            3..=5 => 2.0 * (x[k].abs() + t[k].abs()) + 2.0 * m1 * (x[k - 3].abs() + t[k - 3].abs()) + l2.abs() * ag[k],
            6 if !self.equiform => x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + 1.0,
            _ => self.model.value_abs(&x),
        })
    }
}
