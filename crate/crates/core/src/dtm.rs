//! Empirical distance to a measure.
//!
//! For mass `m` the empirical DTM at `x` is the root mean square distance
//! from `x` to its `k = ceil(m n)` nearest sample points.

use serde::{Deserialize, Serialize};

use crate::cloud::{squared_distance, PointCloud};
use crate::error::{Result, TdaError};
use crate::grid::{EvaluationGrid, Orientation, ScalarField};

/// Mass resolution `m` in `(0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DtmParams {
    m: f64,
}

impl DtmParams {
    pub fn new(m: f64) -> Result<Self> {
        if !(m > 0.0 && m <= 1.0) {
            return Err(TdaError::invalid(format!("DTM mass m must lie in (0, 1], got {m}")));
        }
        Ok(DtmParams { m })
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    /// Neighbor count `ceil(m n)`, clamped to `[1, n]`.
    pub fn k(&self, n: usize) -> usize {
        // m * n can land a hair above an integer (0.07 * 100 = 7.000000000000001)
        let raw = self.m * n as f64;
        let k = if (raw - raw.round()).abs() <= 1e-9 * raw.max(1.0) {
            raw.round()
        } else {
            raw.ceil()
        };
        (k as usize).clamp(1, n.max(1))
    }
}

/// Mean of the `k` smallest entries of `sq`, summed in ascending order. Reorders `sq`.
fn mean_of_smallest(sq: &mut [f64], k: usize) -> f64 {
    if k < sq.len() {
        sq.select_nth_unstable_by(k - 1, f64::total_cmp);
    }
    let head = &mut sq[..k];
    head.sort_unstable_by(f64::total_cmp);
    head.iter().sum::<f64>() / k as f64
}

fn dtm_squared_with(cloud: &PointCloud, k: usize, query: &[f64], buf: &mut Vec<f64>) -> f64 {
    buf.clear();
    buf.extend(cloud.points().map(|p| squared_distance(query, p)));
    mean_of_smallest(buf, k)
}

fn check(cloud: &PointCloud, query_dim: usize) -> Result<()> {
    cloud.require_nonempty()?;
    cloud.check_dim("query", query_dim)
}

/// `δ̂(x)`: DTM of the empirical measure at one query point.
pub fn dtm_at(cloud: &PointCloud, params: DtmParams, query: &[f64]) -> Result<f64> {
    Ok(dtm_squared_at(cloud, params, query)?.sqrt())
}

/// `δ̂²(x)`.
pub fn dtm_squared_at(cloud: &PointCloud, params: DtmParams, query: &[f64]) -> Result<f64> {
    check(cloud, query.len())?;
    let k = params.k(cloud.len());
    Ok(dtm_squared_with(cloud, k, query, &mut Vec::with_capacity(cloud.len())))
}

/// DTM evaluated at every grid site (sublevel orientation).
pub fn dtm_field(cloud: &PointCloud, params: DtmParams, grid: &EvaluationGrid) -> Result<ScalarField> {
    dtm_squared_field(cloud, params, grid)?.map(f64::sqrt)
}

/// Squared DTM at every grid site.
pub fn dtm_squared_field(
    cloud: &PointCloud,
    params: DtmParams,
    grid: &EvaluationGrid,
) -> Result<ScalarField> {
    grid.check_cloud(cloud)?;
    cloud.require_nonempty()?;
    let k = params.k(cloud.len());
    let n = cloud.len();
    let values = grid.evaluate(
        || Vec::with_capacity(n),
        |buf, site| dtm_squared_with(cloud, k, site, buf),
    );
    ScalarField::new(grid.clone(), values, Orientation::Sublevel)
}

/// Indices of the `k` nearest neighbors of `query`, ordered by (distance, index).
pub fn nearest_neighbors(cloud: &PointCloud, params: DtmParams, query: &[f64]) -> Result<Vec<usize>> {
    check(cloud, query.len())?;
    let k = params.k(cloud.len());
    let mut order: Vec<(f64, usize)> = cloud
        .points()
        .enumerate()
        .map(|(i, p)| (squared_distance(query, p), i))
        .collect();
    order.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    Ok(order.into_iter().take(k).map(|(_, i)| i).collect())
}

/// DTM through its quantile representation `(1/m) ∫_0^m F_x^{-1}(u) du`.
///
/// `F_x` is the distribution of squared distances from `x` under the empirical
/// measure, whose quantile function is a step function; the integral is
/// evaluated exactly piece by piece. Agrees with [`dtm_at`] whenever `m n`
/// is an integer.
pub fn dtm_quantile_oracle(cloud: &PointCloud, m: f64, query: &[f64]) -> Result<f64> {
    DtmParams::new(m)?;
    check(cloud, query.len())?;
    let n = cloud.len() as f64;
    let mut sq: Vec<f64> = cloud.points().map(|p| squared_distance(query, p)).collect();
    sq.sort_unstable_by(f64::total_cmp);
    // step i covers quantile levels ((i-1)/n, i/n]
    let mut integral = 0.0;
    let mut level = 0.0;
    for (i, &s) in sq.iter().enumerate() {
        let top = ((i + 1) as f64 / n).min(m);
        if top > level {
            integral += (top - level) * s;
            level = top;
        }
        if level >= m {
            break;
        }
    }
    Ok((integral / m).sqrt())
}
