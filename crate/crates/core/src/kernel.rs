//! Gaussian kernel density estimator and the discrete kernel distance.
//!
//! With `K(x, y) = exp(-|x - y|^2 / (2 h^2))` the two estimators satisfy the
//! exact identity
//!
//! ```text
//! D_K(x)^2 + 2 (sqrt(2 pi) h)^d p_h(x) = 1 + (1/n^2) sum_ij K(X_i, X_j)
//! ```
//!
//! so sublevel sets of the squared kernel distance are superlevel sets of the
//! density estimate, rescaled.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::cloud::{squared_distance, PointCloud};
use crate::error::{Result, TdaError};
use crate::grid::{EvaluationGrid, Orientation, ScalarField};

/// Gaussian bandwidth `h > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    h: f64,
}

impl KernelParams {
    pub fn new(h: f64) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(TdaError::invalid(format!("bandwidth h must be positive and finite, got {h}")));
        }
        Ok(KernelParams { h })
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// `(sqrt(2 pi) h)^d`, the Gaussian normalizer.
    pub fn normalizer(&self, d: usize) -> f64 {
        ((2.0 * PI).sqrt() * self.h).powi(d as i32)
    }

    #[inline]
    pub(crate) fn kernel_sq(&self, sq_dist: f64) -> f64 {
        (-sq_dist / (2.0 * self.h * self.h)).exp()
    }

    /// `K_h(x, y)`.
    #[inline]
    pub fn kernel(&self, x: &[f64], y: &[f64]) -> f64 {
        self.kernel_sq(squared_distance(x, y))
    }
}

fn kernel_sum(cloud: &PointCloud, params: KernelParams, query: &[f64]) -> f64 {
    cloud.points().map(|p| params.kernel(query, p)).sum()
}

fn kde_scale(cloud: &PointCloud, params: KernelParams) -> f64 {
    1.0 / (cloud.len() as f64 * params.normalizer(cloud.dim()))
}

fn check(cloud: &PointCloud, query_dim: usize) -> Result<()> {
    cloud.require_nonempty()?;
    cloud.check_dim("query", query_dim)
}

/// `p̂_h(x) = 1 / (n (sqrt(2 pi) h)^d) * sum_i K(x, X_i)`.
pub fn kde_at(cloud: &PointCloud, params: KernelParams, query: &[f64]) -> Result<f64> {
    check(cloud, query.len())?;
    Ok(kernel_sum(cloud, params, query) * kde_scale(cloud, params))
}

/// KDE at every grid site (superlevel orientation).
pub fn kde_field(cloud: &PointCloud, params: KernelParams, grid: &EvaluationGrid) -> Result<ScalarField> {
    grid.check_cloud(cloud)?;
    cloud.require_nonempty()?;
    let scale = kde_scale(cloud, params);
    let values = grid.evaluate(|| (), |_, site| kernel_sum(cloud, params, site) * scale);
    ScalarField::new(grid.clone(), values, Orientation::Superlevel)
}

/// Precomputed pieces of the kernel distance for one cloud.
///
/// The self-energy `(1/n^2) sum_ij K(X_i, X_j)` does not depend on the query
/// and is computed once here.
#[derive(Debug, Clone)]
pub struct KernelDistance<'a> {
    cloud: &'a PointCloud,
    params: KernelParams,
    self_energy: f64,
}

impl<'a> KernelDistance<'a> {
    pub fn new(cloud: &'a PointCloud, params: KernelParams) -> Result<Self> {
        cloud.require_nonempty()?;
        let n = cloud.len();
        let mut total = 0.0;
        for i in 0..n {
            let pi = cloud.point(i);
            // diagonal terms are K(x, x) = 1
            let row: f64 = (i + 1..n).map(|j| params.kernel(pi, cloud.point(j))).sum();
            total += 1.0 + 2.0 * row;
        }
        Ok(KernelDistance {
            cloud,
            params,
            self_energy: total / (n * n) as f64,
        })
    }

    pub fn self_energy(&self) -> f64 {
        self.self_energy
    }

    /// `D̂_K(x)^2` before any clamping.
    fn raw_squared(&self, query: &[f64]) -> f64 {
        let n = self.cloud.len() as f64;
        self.self_energy + 1.0 - 2.0 * kernel_sum(self.cloud, self.params, query) / n
    }

    fn clamp(radicand: f64) -> Result<f64> {
        if radicand >= 0.0 {
            Ok(radicand)
        } else if radicand > -1e-9 {
            Ok(0.0)
        } else {
            Err(TdaError::Internal(format!(
                "kernel distance radicand {radicand} is negative; kernel is not positive definite"
            )))
        }
    }

    pub fn squared_at(&self, query: &[f64]) -> Result<f64> {
        self.cloud.check_dim("query", query.len())?;
        Self::clamp(self.raw_squared(query))
    }

    pub fn at(&self, query: &[f64]) -> Result<f64> {
        Ok(self.squared_at(query)?.sqrt())
    }

    pub fn squared_field(&self, grid: &EvaluationGrid) -> Result<ScalarField> {
        grid.check_cloud(self.cloud)?;
        let raw = grid.evaluate(|| (), |_, site| self.raw_squared(site));
        let values = raw.into_iter().map(Self::clamp).collect::<Result<Vec<_>>>()?;
        ScalarField::new(grid.clone(), values, Orientation::Sublevel)
    }
}

/// `D̂_K(x)`: RKHS distance between the empirical measure and the Dirac mass at `x`.
pub fn kernel_distance_at(cloud: &PointCloud, params: KernelParams, query: &[f64]) -> Result<f64> {
    check(cloud, query.len())?;
    KernelDistance::new(cloud, params)?.at(query)
}

/// `D̂_K` at every grid site (sublevel orientation).
pub fn kernel_distance_field(
    cloud: &PointCloud,
    params: KernelParams,
    grid: &EvaluationGrid,
) -> Result<ScalarField> {
    kernel_distance_squared_field(cloud, params, grid)?.map(f64::sqrt)
}

/// `D̂_K^2` at every grid site; the field used for persistence.
pub fn kernel_distance_squared_field(
    cloud: &PointCloud,
    params: KernelParams,
    grid: &EvaluationGrid,
) -> Result<ScalarField> {
    KernelDistance::new(cloud, params)?.squared_field(grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

    fn line(xs: &[f64]) -> PointCloud {
        PointCloud::new(xs.iter().map(|&x| vec![x]).collect()).unwrap()
    }

    #[test]
    fn kde_examples() {
        let p = KernelParams::new(1.0).unwrap();
        let one = line(&[0.0]);
        assert!((kde_at(&one, p, &[0.0]).unwrap() - INV_SQRT_2PI).abs() < 1e-15);
        let e = (-0.5f64).exp() * INV_SQRT_2PI;
        assert!((kde_at(&one, p, &[1.0]).unwrap() - e).abs() < 1e-15);
        // (2 e^{-1/2}) / (2 sqrt(2 pi))
        assert!((kde_at(&line(&[-1.0, 1.0]), p, &[0.0]).unwrap() - e).abs() < 1e-15);
    }

    #[test]
    fn kernel_distance_examples() {
        let p = KernelParams::new(1.0).unwrap();
        assert_eq!(kernel_distance_at(&line(&[0.0]), p, &[0.0]).unwrap(), 0.0);

        let h = 0.7;
        let p = KernelParams::new(h).unwrap();
        let r: f64 = 1.3;
        let expect = (2.0 - 2.0 * (-r * r / (2.0 * h * h)).exp()).sqrt();
        assert!((kernel_distance_at(&line(&[0.0]), p, &[r]).unwrap() - expect).abs() < 1e-14);

        let p = KernelParams::new(1.0).unwrap();
        let expect = (0.25 * (2.0 + 2.0 * (-2.0f64).exp()) + 1.0 - 2.0 * (-0.5f64).exp()).sqrt();
        let got = kernel_distance_at(&line(&[-1.0, 1.0]), p, &[0.0]).unwrap();
        assert!((got - expect).abs() < 1e-14, "{got} vs {expect}");
    }

    #[test]
    fn far_field_limit() {
        let c = PointCloud::new(vec![vec![0.0, 0.0], vec![0.5, 0.2], vec![-0.1, 0.4]]).unwrap();
        let p = KernelParams::new(0.3).unwrap();
        let kd = KernelDistance::new(&c, p).unwrap();
        let far = kd.at(&[30.0, 0.0]).unwrap();
        assert!((far - (1.0 + kd.self_energy()).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn kde_field_symmetric_and_positive() {
        let c = PointCloud::new(vec![vec![-1.0, 0.0], vec![1.0, 0.0]]).unwrap();
        let g = EvaluationGrid::new(vec![-2.0, -1.0], vec![2.0, 1.0], vec![9, 5]).unwrap();
        let f = kde_field(&c, KernelParams::new(0.6).unwrap(), &g).unwrap();
        assert_eq!(f.orientation(), Orientation::Superlevel);
        for i in 0..g.site_count() {
            let mut mi = g.multi_index(i);
            assert!(f.values()[i] > 0.0);
            mi[0] = 8 - mi[0];
            let j = g.flat_index(&mi);
            assert!((f.values()[i] - f.values()[j]).abs() <= 1e-12);
            assert_eq!(f.values()[i], kde_at(&c, KernelParams::new(0.6).unwrap(), &g.site(i)).unwrap());
        }
    }

    #[test]
    fn affine_identity_on_grid() {
        let c = PointCloud::new(vec![vec![0.1, 0.2], vec![0.5, -0.3], vec![-0.4, 0.0], vec![0.2, 0.2]]).unwrap();
        let g = EvaluationGrid::new(vec![-1.0, -1.0], vec![1.0, 1.0], vec![11, 11]).unwrap();
        let p = KernelParams::new(0.35).unwrap();
        let kd = KernelDistance::new(&c, p).unwrap();
        let d2 = kd.squared_field(&g).unwrap();
        let kde = kde_field(&c, p, &g).unwrap();
        let konst = kd.self_energy() + 1.0;
        let scale = 2.0 * p.normalizer(2);
        for (a, b) in d2.values().iter().zip(kde.values()) {
            assert!((a + scale * b - konst).abs() / konst <= 1e-10);
        }
        let unsq = kernel_distance_field(&c, p, &g).unwrap();
        for (i, v) in unsq.values().iter().enumerate() {
            assert_eq!(*v, kd.at(&g.site(i)).unwrap());
        }
    }

    #[test]
    fn bad_bandwidth() {
        for h in [0.0, -1.0, f64::INFINITY, f64::NAN] {
            assert!(KernelParams::new(h).is_err());
        }
    }
}
