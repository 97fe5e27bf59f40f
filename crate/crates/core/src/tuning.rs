//! Smoothing-parameter selection and point-cloud preprocessing.
//!
//! For each candidate parameter the selection computes the diagram of the
//! estimator, a bootstrap cutoff `c(param) / sqrt(n)`, and
//!
//! ```text
//! N = #{ i : l_i > cutoff }        S = sum_i max(l_i - cutoff, 0)
//! ```
//!
//! over the finite lifetimes `l_i` of one homology dimension. The cutoff is
//! the band half-width itself, not twice it as in feature significance.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bootstrap::{bootstrap_band, BootstrapConfig};
use crate::cloud::{squared_distance, PointCloud};
use crate::error::{Result, TdaError};
use crate::estimator::Estimator;
use crate::grid::EvaluationGrid;
use crate::kernel::KernelParams;
use crate::persistence::field_diagram;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TuningPoint {
    pub parameter: f64,
    pub cutoff: f64,
    #[serde(rename = "N")]
    pub count: usize,
    #[serde(rename = "S")]
    pub total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuningCurve {
    pub points: Vec<TuningPoint>,
    /// Parameter values attaining the maximum `N` (all ties).
    pub argmax_count: Vec<f64>,
    /// Parameter values attaining the maximum `S` (all ties).
    pub argmax_total: Vec<f64>,
}

impl TuningCurve {
    pub fn from_points(points: Vec<TuningPoint>) -> Self {
        let best_n = points.iter().map(|p| p.count).max();
        let best_s = points.iter().map(|p| p.total).fold(f64::NEG_INFINITY, f64::max);
        TuningCurve {
            argmax_count: points
                .iter()
                .filter(|p| Some(p.count) == best_n)
                .map(|p| p.parameter)
                .collect(),
            argmax_total: points
                .iter()
                .filter(|p| p.total == best_s)
                .map(|p| p.parameter)
                .collect(),
            points,
        }
    }

    /// CSV with header `parameter,cutoff,N,S`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("parameter,cutoff,N,S\n");
        for p in &self.points {
            s.push_str(&format!("{},{},{},{}\n", p.parameter, p.cutoff, p.count, p.total));
        }
        s
    }
}

/// `(N, S)` for lifetimes against a cutoff.
pub fn significance_summary(lifetimes: &[f64], cutoff: f64) -> (usize, f64) {
    let count = lifetimes.iter().filter(|&&l| l > cutoff).count();
    let total = lifetimes.iter().map(|&l| (l - cutoff).max(0.0)).sum();
    (count, total)
}

/// Seed for parameter index `index`, drawn from stream `index` of the master seed.
pub fn derived_seed(master: u64, index: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index as u64);
    rng.next_u64()
}

/// Evaluates `N` and `S` for every parameter value in `parameters`.
///
/// Each value gets its own bootstrap seeded by [`derived_seed`]; the cutoff is
/// the per-dimension width when the band has one.
pub fn tune(
    cloud: &PointCloud,
    estimator: &Estimator,
    parameters: &[f64],
    dim: usize,
    grid: &EvaluationGrid,
    cfg: &BootstrapConfig,
) -> Result<TuningCurve> {
    if parameters.is_empty() {
        return Err(TdaError::invalid("parameter grid is empty"));
    }
    cfg.validate()?;
    let mut points = Vec::with_capacity(parameters.len());
    for (i, &value) in parameters.iter().enumerate() {
        let attach = |e| TdaError::Parameter {
            value,
            source: Box::new(e),
        };
        let est = estimator.with_parameter(value).map_err(attach)?;
        let diagram = est
            .field(cloud, grid)
            .and_then(|f| field_diagram(&f))
            .map_err(attach)?;
        let cfg_i = BootstrapConfig {
            seed: derived_seed(cfg.seed, i),
            ..*cfg
        };
        let band = bootstrap_band(cloud, &est, grid, &cfg_i).map_err(attach)?;
        let cutoff = band.width_for(dim);
        let (count, total) = significance_summary(&diagram.lifetimes(dim).finite, cutoff);
        points.push(TuningPoint {
            parameter: value,
            cutoff,
            count,
            total,
        });
    }
    Ok(TuningCurve::from_points(points))
}

/// How boundary points are laid out on each axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryLayout {
    /// `c` equally spaced lattice points per axis, corners included.
    PerEdge(usize),
    /// Lattice spacing; each axis gets `round(len / spacing) + 1` points.
    Spacing(f64),
}

/// Number of lattice points on the boundary of a box with `c_i` points per
/// axis: `prod c_i - prod (c_i - 2)`.
pub fn boundary_point_count(per_axis: &[usize]) -> usize {
    let all: usize = per_axis.iter().product();
    let inner: usize = per_axis.iter().map(|&c| c.saturating_sub(2)).product();
    all - inner
}

/// Appends a deterministic lattice of points on the faces of the box
/// `[lower, upper]`. Corner and edge points are emitted once.
///
/// Returns the augmented cloud and whether every original point lies in the box.
pub fn augment_boundary(
    cloud: &PointCloud,
    lower: &[f64],
    upper: &[f64],
    layout: BoundaryLayout,
) -> Result<(PointCloud, bool)> {
    let d = cloud.dim();
    cloud.check_dim("box", lower.len())?;
    cloud.check_dim("box", upper.len())?;
    if (0..d).any(|i| !(lower[i] < upper[i])) {
        return Err(TdaError::invalid("box lower corner must lie below upper corner"));
    }
    let contained = cloud
        .points()
        .all(|p| p.iter().enumerate().all(|(i, &c)| c >= lower[i] && c <= upper[i]));

    let per_axis: Vec<usize> = match layout {
        BoundaryLayout::PerEdge(0) => return Ok((cloud.clone(), contained)),
        BoundaryLayout::PerEdge(1) => {
            return Err(TdaError::invalid("boundary lattice needs at least 2 points per edge"))
        }
        BoundaryLayout::PerEdge(c) => vec![c; d],
        BoundaryLayout::Spacing(s) => {
            if !(s > 0.0 && s.is_finite()) {
                return Err(TdaError::invalid(format!("boundary spacing must be positive, got {s}")));
            }
            (0..d)
                .map(|i| (((upper[i] - lower[i]) / s).round() as usize).max(1) + 1)
                .collect()
        }
    };

    let mut coords = cloud.as_flat().to_vec();
    let total: usize = per_axis.iter().product();
    let mut idx = vec![0usize; d];
    for _ in 0..total {
        let on_face = idx.iter().zip(&per_axis).any(|(&j, &c)| j == 0 || j == c - 1);
        if on_face {
            for i in 0..d {
                let c = per_axis[i];
                coords.push(if idx[i] == c - 1 {
                    upper[i]
                } else {
                    lower[i] + idx[i] as f64 * (upper[i] - lower[i]) / (c - 1) as f64
                });
            }
        }
        for i in (0..d).rev() {
            idx[i] += 1;
            if idx[i] < per_axis[i] {
                break;
            }
            idx[i] = 0;
        }
    }
    Ok((PointCloud::from_flat(d, coords)?, contained))
}

/// Result of density truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct Truncation {
    pub cloud: PointCloud,
    /// Indices of the kept points in the input.
    pub kept: Vec<usize>,
}

impl Truncation {
    pub fn is_empty(&self) -> bool {
        self.kept.is_empty()
    }
}

/// Keeps the points whose KDE value (estimated from the whole input cloud,
/// themselves included) is at least `threshold`. Order is preserved.
pub fn truncate_by_density(cloud: &PointCloud, params: KernelParams, threshold: f64) -> Result<Truncation> {
    if !(threshold >= 0.0) {
        return Err(TdaError::invalid(format!("density threshold must be nonnegative, got {threshold}")));
    }
    cloud.require_nonempty()?;
    let n = cloud.len();
    let scale = 1.0 / (n as f64 * params.normalizer(cloud.dim()));
    let kept: Vec<usize> = (0..n)
        .filter(|&i| {
            let x = cloud.point(i);
            let density: f64 = cloud.points().map(|p| params.kernel(x, p)).sum::<f64>() * scale;
            density >= threshold
        })
        .collect();
    Ok(Truncation {
        cloud: cloud.select(&kept),
        kept,
    })
}

/// Mean-shift data sharpening.
///
/// Every iteration moves all points simultaneously to the Gaussian-weighted
/// average of the previous iteration's points.
pub fn sharpen(cloud: &PointCloud, params: KernelParams, iterations: usize) -> Result<PointCloud> {
    if iterations < 1 {
        return Err(TdaError::invalid("sharpening needs at least one iteration"));
    }
    cloud.require_nonempty()?;
    let d = cloud.dim();
    let mut current = cloud.clone();
    for _ in 0..iterations {
        let mut next = Vec::with_capacity(current.as_flat().len());
        for x in current.points() {
            let mut num = vec![0.0; d];
            let mut den = 0.0;
            for p in current.points() {
                let w = params.kernel_sq(squared_distance(x, p));
                den += w;
                for (acc, &c) in num.iter_mut().zip(p) {
                    *acc += w * c;
                }
            }
            next.extend(num.into_iter().map(|v| v / den));
        }
        current = PointCloud::from_flat(d, next)?;
    }
    Ok(current)
}
