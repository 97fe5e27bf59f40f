use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cloud::{squared_distance, PointCloud};
use crate::error::{Result, TdaError};

/// A closed axis-aligned lattice of evaluation sites.
///
/// Site `j` along axis `i` sits at `lower[i] + j * (upper[i] - lower[i]) / (resolution[i] - 1)`,
/// so both box corners are sites. Sites are enumerated row-major with axis 0 slowest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "GridParts", into = "GridParts")]
pub struct EvaluationGrid {
    lower: Vec<f64>,
    upper: Vec<f64>,
    resolution: Vec<usize>,
    strides: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct GridParts {
    lower: Vec<f64>,
    upper: Vec<f64>,
    resolution: Vec<usize>,
}

impl TryFrom<GridParts> for EvaluationGrid {
    type Error = TdaError;

    fn try_from(p: GridParts) -> Result<Self> {
        EvaluationGrid::new(p.lower, p.upper, p.resolution)
    }
}

impl From<EvaluationGrid> for GridParts {
    fn from(g: EvaluationGrid) -> Self {
        GridParts {
            lower: g.lower,
            upper: g.upper,
            resolution: g.resolution,
        }
    }
}

impl EvaluationGrid {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, resolution: Vec<usize>) -> Result<Self> {
        let d = lower.len();
        if d == 0 {
            return Err(TdaError::InvalidGrid("grid needs at least one axis".into()));
        }
        if upper.len() != d || resolution.len() != d {
            return Err(TdaError::InvalidGrid(format!(
                "lower has {d} axes, upper has {}, resolution has {}",
                upper.len(),
                resolution.len()
            )));
        }
        for i in 0..d {
            if !(lower[i].is_finite() && upper[i].is_finite()) {
                return Err(TdaError::InvalidGrid(format!("axis {i} has a non-finite bound")));
            }
            if lower[i] >= upper[i] {
                return Err(TdaError::InvalidGrid(format!(
                    "axis {i}: lower bound {} is not below upper bound {}",
                    lower[i], upper[i]
                )));
            }
            if resolution[i] < 2 {
                return Err(TdaError::InvalidGrid(format!(
                    "axis {i}: resolution {} is below 2",
                    resolution[i]
                )));
            }
        }
        let mut strides = vec![1; d];
        for i in (0..d - 1).rev() {
            strides[i] = strides[i + 1] * resolution[i + 1];
        }
        Ok(EvaluationGrid {
            lower,
            upper,
            resolution,
            strides,
        })
    }

    /// Bounding box of `cloud` padded by `padding` times its extent on every side.
    ///
    /// Degenerate axes (all points share a coordinate) are widened to unit length first.
    pub fn around(cloud: &PointCloud, padding: f64, resolution: usize) -> Result<Self> {
        if !(padding >= 0.0 && padding.is_finite()) {
            return Err(TdaError::invalid(format!("padding must be nonnegative, got {padding}")));
        }
        let (mut lo, mut hi) = cloud.bounding_box().ok_or(TdaError::EmptyCloud)?;
        for i in 0..lo.len() {
            if hi[i] - lo[i] <= 0.0 {
                lo[i] -= 0.5;
                hi[i] += 0.5;
            }
            let pad = padding * (hi[i] - lo[i]);
            lo[i] -= pad;
            hi[i] += pad;
        }
        let d = lo.len();
        EvaluationGrid::new(lo, hi, vec![resolution; d])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn resolution(&self) -> &[usize] {
        &self.resolution
    }

    pub fn site_count(&self) -> usize {
        self.resolution.iter().product()
    }

    pub fn spacing(&self, axis: usize) -> f64 {
        (self.upper[axis] - self.lower[axis]) / (self.resolution[axis] - 1) as f64
    }

    /// Per-axis lattice indices of a flat site index.
    pub fn multi_index(&self, index: usize) -> Vec<usize> {
        self.strides
            .iter()
            .zip(&self.resolution)
            .map(|(&s, &r)| (index / s) % r)
            .collect()
    }

    pub fn flat_index(&self, multi: &[usize]) -> usize {
        multi.iter().zip(&self.strides).map(|(m, s)| m * s).sum()
    }

    fn axis_coordinate(&self, axis: usize, j: usize) -> f64 {
        if j + 1 == self.resolution[axis] {
            self.upper[axis]
        } else {
            self.lower[axis] + j as f64 * self.spacing(axis)
        }
    }

    /// Writes the coordinates of site `index` into `out`.
    pub fn site_into(&self, index: usize, out: &mut [f64]) {
        for axis in 0..self.dim() {
            let j = (index / self.strides[axis]) % self.resolution[axis];
            out[axis] = self.axis_coordinate(axis, j);
        }
    }

    pub fn site(&self, index: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.site_into(index, &mut out);
        out
    }

    /// All site coordinates in enumeration order.
    pub fn sites(&self) -> Vec<Vec<f64>> {
        (0..self.site_count()).map(|i| self.site(i)).collect()
    }

    /// Index of the site closest to `point` (coordinates outside the box clamp to the faces).
    pub fn nearest_site_index(&self, point: &[f64]) -> usize {
        let multi: Vec<usize> = (0..self.dim())
            .map(|axis| {
                let t = (point[axis] - self.lower[axis]) / self.spacing(axis);
                t.round().clamp(0.0, (self.resolution[axis] - 1) as f64) as usize
            })
            .collect();
        self.flat_index(&multi)
    }

    pub(crate) fn check_cloud(&self, cloud: &PointCloud) -> Result<()> {
        if self.dim() != cloud.dim() {
            return Err(TdaError::DimensionMismatch {
                left_name: "evaluation grid",
                left: self.dim(),
                right_name: "point cloud",
                right: cloud.dim(),
            });
        }
        Ok(())
    }

    /// Evaluates `f` at every site in parallel. `init` builds per-worker scratch space.
    ///
    /// The result depends only on `f`, never on scheduling.
    pub(crate) fn evaluate<S, I, F>(&self, init: I, f: F) -> Vec<f64>
    where
        I: Fn() -> S + Sync + Send,
        F: Fn(&mut S, &[f64]) -> f64 + Sync + Send,
    {
        let d = self.dim();
        (0..self.site_count())
            .into_par_iter()
            .map_init(
                || (vec![0.0; d], init()),
                |(site, scratch), i| {
                    self.site_into(i, site);
                    f(scratch, site)
                },
            )
            .collect()
    }
}

/// Which filtration direction of a field carries the topology.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    /// Sublevel sets `{f <= t}`; distance-like fields.
    Sublevel,
    /// Superlevel sets `{f >= t}`; density fields.
    Superlevel,
}

/// A finite real value at every site of an [`EvaluationGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: EvaluationGrid,
    values: Vec<f64>,
    orientation: Orientation,
}

impl ScalarField {
    pub fn new(grid: EvaluationGrid, values: Vec<f64>, orientation: Orientation) -> Result<Self> {
        if values.len() != grid.site_count() {
            return Err(TdaError::InvalidGrid(format!(
                "{} values for a grid of {} sites",
                values.len(),
                grid.site_count()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(TdaError::Internal(format!("field value at site {i} is not finite")));
        }
        Ok(ScalarField {
            grid,
            values,
            orientation,
        })
    }

    pub fn grid(&self) -> &EvaluationGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    /// Same grid and orientation, values transformed pointwise.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<ScalarField> {
        ScalarField::new(
            self.grid.clone(),
            self.values.iter().map(|&v| f(v)).collect(),
            self.orientation,
        )
    }

    /// `max_x |self(x) - other(x)|`. Fields must share a grid.
    pub fn sup_distance(&self, other: &ScalarField) -> Result<f64> {
        if self.grid != other.grid {
            return Err(TdaError::InvalidGrid("fields live on different grids".into()));
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

/// Distance from each grid site to the nearest sample point.
pub fn empirical_distance_field(cloud: &PointCloud, grid: &EvaluationGrid) -> Result<ScalarField> {
    grid.check_cloud(cloud)?;
    cloud.require_nonempty()?;
    let values = grid.evaluate(
        || (),
        |_, site| {
            cloud
                .points()
                .map(|p| squared_distance(site, p))
                .fold(f64::INFINITY, f64::min)
                .sqrt()
        },
    );
    ScalarField::new(grid.clone(), values, Orientation::Sublevel)
}
