use nalgebra::{Matrix3, Rotation3, Unit, Vector3};
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::polyalg::{rational_from_decimal_f64, rint, Scalar};

/// Base anchors `a_1..a_5` and platform offsets `r_1..r_5` of a linear pentapod.
///
/// Coordinates are stored exactly; `f64` copies are kept for the numeric paths.
#[derive(Clone, Debug, PartialEq)]
pub struct Architecture {
    base: [[BigRational; 3]; 5],
    offsets: [BigRational; 5],
    base_f: [Vector3<f64>; 5],
    offsets_f: [f64; 5],
}

impl Architecture {
    pub fn new(base: [[BigRational; 3]; 5], offsets: [BigRational; 5]) -> Result<Self> {
        let arch = Self::new_unchecked(base, offsets);
        arch.validate()?;
        Ok(arch)
    }

    /// Builds an architecture from floating values, read through their
    /// shortest decimal representation (so `0.6` becomes `3/5`).
    pub fn from_f64(base: [[f64; 3]; 5], offsets: [f64; 5]) -> Result<Self> {
        if base.iter().flatten().chain(offsets.iter()).any(|x| !x.is_finite()) {
            return Err(Error::InvalidArchitecture("non-finite coordinate".into()));
        }
        Self::new(base.map(|a| a.map(rational_from_decimal_f64)), offsets.map(rational_from_decimal_f64))
    }

    pub fn from_integers(base: [[i64; 3]; 5], offsets: [i64; 5]) -> Result<Self> {
        Self::new(base.map(|a| a.map(rint)), offsets.map(rint))
    }

    /// Skips validation; for deliberately degenerate designs.
    pub fn new_unchecked(base: [[BigRational; 3]; 5], offsets: [BigRational; 5]) -> Self {
        let base_f = std::array::from_fn(|j| Vector3::from_fn(|k, _| base[j][k].to_f64()));
        let offsets_f = std::array::from_fn(|j| offsets[j].to_f64());
        Self { base, offsets, base_f, offsets_f }
    }

    fn validate(&self) -> Result<()> {
        for j in 0..5 {
            for k in 0..j {
                if self.base[j] == self.base[k] && self.offsets[j] == self.offsets[k] {
                    return Err(Error::InvalidArchitecture(format!("legs {} and {} coincide", k + 1, j + 1)));
                }
            }
        }
        if self.offsets.iter().all(|r| *r == self.offsets[0]) {
            return Err(Error::InvalidArchitecture("all offsets r_j are equal".into()));
        }
        if self.base.iter().all(|a| *a == self.base[0]) {
            return Err(Error::InvalidArchitecture("all base points coincide".into()));
        }
        Ok(())
    }

    pub fn base_exact(&self, j: usize) -> &[BigRational; 3] {
        &self.base[j]
    }

    pub fn offset_exact(&self, j: usize) -> &BigRational {
        &self.offsets[j]
    }

    pub fn base_point(&self, j: usize) -> Vector3<f64> {
        self.base_f[j]
    }

    pub fn offset(&self, j: usize) -> f64 {
        self.offsets_f[j]
    }

    pub fn base_points(&self) -> &[Vector3<f64>; 5] {
        &self.base_f
    }

    pub fn offsets(&self) -> &[f64; 5] {
        &self.offsets_f
    }

    /// Platform anchor `b_j = p + r_j·i`.
    pub fn platform_point(&self, j: usize, c: &Configuration) -> Vector3<f64> {
        c.position() + c.orientation() * self.offsets_f[j]
    }

    /// Whether the frame conditions `x1=y1=z1=y2=z2=z3=0`, `x2=1` hold exactly.
    pub fn is_normalized(&self) -> bool {
        let z = |x: &BigRational| x.is_zero();
        self.base[0].iter().all(z)
            && self.base[1][0] == rint(1)
            && z(&self.base[1][1])
            && z(&self.base[1][2])
            && z(&self.base[2][2])
    }
}

/// A pose `(u,v,w,p_x,p_y,p_z)` of the linear platform.
#[derive(Clone, Debug, PartialEq)]
pub struct Configuration<S = f64> {
    pub orientation: [S; 3],
    pub position: [S; 3],
}

impl<S: Scalar> Configuration<S> {
    pub fn new(orientation: [S; 3], position: [S; 3]) -> Self {
        Self { orientation, position }
    }

    /// `[u, v, w, p_x, p_y, p_z]`
    pub fn coordinates(&self) -> [S; 6] {
        let [u, v, w] = self.orientation.clone();
        let [x, y, z] = self.position.clone();
        [u, v, w, x, y, z]
    }

    pub fn from_coordinates(x: &[S]) -> Self {
        Self {
            orientation: [x[0].clone(), x[1].clone(), x[2].clone()],
            position: [x[3].clone(), x[4].clone(), x[5].clone()],
        }
    }

    pub fn to_f64(&self) -> Configuration<f64> {
        Configuration {
            orientation: self.orientation.clone().map(|x| x.to_f64()),
            position: self.position.clone().map(|x| x.to_f64()),
        }
    }
}

impl Configuration<f64> {
    pub fn from_vectors(orientation: Vector3<f64>, position: Vector3<f64>) -> Self {
        Self { orientation: orientation.into(), position: position.into() }
    }

    pub fn orientation(&self) -> Vector3<f64> {
        Vector3::from(self.orientation)
    }

    pub fn position(&self) -> Vector3<f64> {
        Vector3::from(self.position)
    }

    pub fn orientation_norm(&self) -> f64 {
        self.orientation().norm()
    }

    /// Checks `u²+v²+w² = 1` within `1e-12`.
    pub fn check_unit(&self) -> Result<()> {
        let n2 = self.orientation().norm_squared();
        if (n2 - 1.0).abs() > 1e-12 || !n2.is_finite() {
            return Err(Error::InvalidConfiguration(format!("orientation norm² is {n2}, expected 1")));
        }
        Ok(())
    }

    /// Maximum coordinate difference.
    pub fn max_abs_diff(&self, other: &Configuration) -> f64 {
        self.coordinates().iter().zip(other.coordinates()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max)
    }

    pub fn euclidean_distance(&self, other: &Configuration) -> f64 {
        self.coordinates().iter().zip(other.coordinates()).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt()
    }
}

/// `x ↦ scale·R·(x − origin)`; orientations transform by `R` alone.
#[derive(Clone, Debug, PartialEq)]
pub struct SimilarityTransform {
    pub rotation: Matrix3<f64>,
    pub origin: Vector3<f64>,
    pub scale: f64,
}

impl SimilarityTransform {
    pub fn identity() -> Self {
        Self { rotation: Matrix3::identity(), origin: Vector3::zeros(), scale: 1.0 }
    }

    pub fn is_identity(&self) -> bool {
        self.rotation == Matrix3::identity() && self.origin == Vector3::zeros() && self.scale == 1.0
    }

    pub fn apply_point(&self, x: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * (x - self.origin) * self.scale
    }

    pub fn invert_point(&self, y: &Vector3<f64>) -> Vector3<f64> {
        self.rotation.transpose() * (y / self.scale) + self.origin
    }

    pub fn apply(&self, c: &Configuration) -> Configuration {
        Configuration::from_vectors(self.rotation * c.orientation(), self.apply_point(&c.position()))
    }

    pub fn invert(&self, c: &Configuration) -> Configuration {
        Configuration::from_vectors(self.rotation.transpose() * c.orientation(), self.invert_point(&c.position()))
    }

    /// Lengths (and the metric `d`) scale by `scale`.
    pub fn map_length(&self, d: f64) -> f64 {
        d * self.scale
    }
}

/// Moves the architecture into the frame `x1=y1=z1=y2=z2=z3=0`, `x2=1`.
///
/// Offsets scale along with the base. When no rotation is needed the result
/// is exact; otherwise rotated coordinates pass through `f64`.
pub fn normalize_frame(arch: &Architecture) -> Result<(Architecture, SimilarityTransform)> {
    let a1 = arch.base_exact(0);
    if arch.base_exact(1) == a1 {
        return Err(Error::CoincidentAnchors);
    }
    let shifted: Vec<[BigRational; 3]> =
        (0..5).map(|j| std::array::from_fn(|k| &arch.base_exact(j)[k] - &a1[k])).collect();
    let origin = arch.base_point(0);

    let aligned = shifted[1][1].is_zero() && shifted[1][2].is_zero() && shifted[1][0].is_positive();
    if aligned && shifted[2][2].is_zero() {
        let s = BigRational::from_integer(1.into()) / &shifted[1][0];
        let base: [[BigRational; 3]; 5] = std::array::from_fn(|j| shifted[j].clone().map(|x| x * &s));
        let offsets: [BigRational; 5] = std::array::from_fn(|j| arch.offset_exact(j) * &s);
        let transform = SimilarityTransform { rotation: Matrix3::identity(), origin, scale: s.to_f64() };
        return Ok((Architecture::new_unchecked(base, offsets), transform));
    }

    let d2 = arch.base_point(1) - origin;
    let len = d2.norm();
    let dir = d2 / len;
    let ex = Vector3::x();
    let r1 = if (dir + ex).norm() < 1e-15 {
        Rotation3::from_axis_angle(&Vector3::z_axis(), std::f64::consts::PI)
    } else {
        Rotation3::rotation_between(&dir, &ex).unwrap_or_else(Rotation3::identity)
    };
    let a3 = r1 * (arch.base_point(2) - origin);
    // rotate about x so that z3 = 0, by the smaller of the two admissible angles
    let (y3, z3) = (a3.y, a3.z);
    let angle = if z3.abs() <= 1e-15 * a3.norm().max(1.0) {
        0.0
    } else {
        let theta = -z3.atan2(y3);
        let alt = if theta > 0.0 { theta - std::f64::consts::PI } else { theta + std::f64::consts::PI };
        if (theta.abs() - alt.abs()).abs() < 1e-15 {
            // both rotate by π/2: keep y3 ≥ 0
            if y3.mul_add(theta.cos(), -z3 * theta.sin()) >= 0.0 {
                theta
            } else {
                alt
            }
        } else if theta.abs() < alt.abs() {
            theta
        } else {
            alt
        }
    };
    let r2 = Rotation3::from_axis_angle(&Unit::new_unchecked(ex), angle);
    let rotation = (r2 * r1).into_inner();
    let transform = SimilarityTransform { rotation, origin, scale: 1.0 / len };
    let mut base: [[f64; 3]; 5] = std::array::from_fn(|j| transform.apply_point(&arch.base_point(j)).into());
    base[0] = [0.0; 3];
    base[1] = [1.0, 0.0, 0.0];
    base[2][2] = 0.0;
    let offsets: [f64; 5] = std::array::from_fn(|j| arch.offset(j) / len);
    let normalized = Architecture::new_unchecked(
        base.map(|a| a.map(rational_from_decimal_f64)),
        offsets.map(rational_from_decimal_f64),
    );
    Ok((normalized, transform))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polyalg::rational;

    fn caption() -> Architecture {
        Architecture::from_integers([[0, 0, 0], [5, 0, 0], [-4, -3, 0], [3, 7, -6], [9, -5, 4]], [0, 2, 4, 5, 10])
            .unwrap()
    }

    #[test]
    fn validation() {
        let same_r = Architecture::from_integers([[0, 0, 0], [1, 0, 0], [2, 0, 0], [3, 1, 0], [4, 0, 1]], [1; 5]);
        assert!(same_r.is_err());
        let dup = Architecture::from_integers([[0, 0, 0], [0, 0, 0], [2, 0, 0], [3, 1, 0], [4, 0, 1]], [1, 1, 2, 3, 4]);
        assert!(dup.is_err());
        let flat = Architecture::from_integers([[1, 1, 1]; 5], [0, 1, 2, 3, 4]);
        assert!(flat.is_err());
    }

    #[test]
    fn caption_frame_scales_exactly() {
        let (n, t) = normalize_frame(&caption()).unwrap();
        assert_eq!(t.scale, 0.2);
        assert_eq!(t.rotation, Matrix3::identity());
        assert_eq!(n.base_exact(1), &[rint(1), rint(0), rint(0)]);
        assert_eq!(n.base_exact(2), &[rational(-4, 5), rational(-3, 5), rint(0)]);
        assert_eq!(n.offset_exact(4), &rint(2));
        assert!(n.is_normalized());
    }

    #[test]
    fn normalized_is_fixed_point() {
        let (n, _) = normalize_frame(&caption()).unwrap();
        let (m, t) = normalize_frame(&n).unwrap();
        assert_eq!(m, n);
        assert!(t.is_identity());
    }

    #[test]
    fn general_frame_conditions() {
        let arch = Architecture::from_f64(
            [[1.0, 2.0, 3.0], [2.0, 4.0, 1.0], [-1.0, 0.5, 2.0], [3.0, -2.0, 5.0], [0.0, 1.0, -1.0]],
            [0.0, 1.0, 2.5, -1.0, 3.0],
        )
        .unwrap();
        let (n, t) = normalize_frame(&arch).unwrap();
        assert!(n.is_normalized());
        for j in 0..5 {
            let mapped = t.apply_point(&arch.base_point(j));
            assert!((mapped - n.base_point(j)).norm() < 1e-12);
            assert!((t.invert_point(&mapped) - arch.base_point(j)).norm() < 1e-12);
        }
    }

    #[test]
    fn coincident_anchors_rejected() {
        let arch = Architecture::new_unchecked(
            [[0, 0, 0], [0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]].map(|a| a.map(rint)),
            [0, 1, 2, 3, 4].map(rint),
        );
        assert_eq!(normalize_frame(&arch).unwrap_err(), Error::CoincidentAnchors);
    }
}
