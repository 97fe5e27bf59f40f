use crate::error::{Result, TdaError};

/// A finite sample of points in `d`-dimensional Euclidean space.
///
/// Coordinates are stored flat in row-major order. All coordinates are
/// finite; an empty cloud can exist (for example after density truncation)
/// but every estimator rejects it.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
}

impl PointCloud {
    /// Builds a cloud from a list of points, checking that all share one dimension.
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let dim = match points.first() {
            Some(p) => p.len(),
            None => return Err(TdaError::EmptyCloud),
        };
        let mut coords = Vec::with_capacity(points.len() * dim);
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(TdaError::InvalidCloud(format!(
                    "point {i} has {} coordinates, expected {dim}",
                    p.len()
                )));
            }
            coords.extend_from_slice(p);
        }
        Self::from_flat(dim, coords)
    }

    /// Builds a cloud from flat row-major coordinates.
    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(TdaError::InvalidCloud("dimension must be at least 1".into()));
        }
        if coords.len() % dim != 0 {
            return Err(TdaError::InvalidCloud(format!(
                "{} coordinates do not split into points of dimension {dim}",
                coords.len()
            )));
        }
        if let Some(pos) = coords.iter().position(|c| !c.is_finite()) {
            return Err(TdaError::InvalidCloud(format!(
                "point {} has a non-finite coordinate",
                pos / dim
            )));
        }
        Ok(PointCloud { dim, coords })
    }

    /// An empty cloud of the given dimension.
    pub fn empty(dim: usize) -> Result<Self> {
        Self::from_flat(dim, Vec::new())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.coords
    }

    /// Errors unless the cloud has at least one point.
    pub fn require_nonempty(&self) -> Result<()> {
        if self.is_empty() {
            Err(TdaError::EmptyCloud)
        } else {
            Ok(())
        }
    }

    /// Errors unless `other` has this cloud's dimension.
    pub(crate) fn check_dim(&self, other_name: &'static str, other: usize) -> Result<()> {
        if other != self.dim {
            return Err(TdaError::DimensionMismatch {
                left_name: other_name,
                left: other,
                right_name: "point cloud",
                right: self.dim,
            });
        }
        Ok(())
    }

    /// Axis-aligned bounding box `(lower, upper)`; `None` for an empty cloud.
    pub fn bounding_box(&self) -> Option<(Vec<f64>, Vec<f64>)> {
        let mut pts = self.points();
        let first = pts.next()?;
        let mut lo = first.to_vec();
        let mut hi = first.to_vec();
        for p in pts {
            for (i, &c) in p.iter().enumerate() {
                lo[i] = lo[i].min(c);
                hi[i] = hi[i].max(c);
            }
        }
        Some((lo, hi))
    }

    /// Picks points by index, in the given order (indices may repeat).
    pub fn select(&self, indices: &[usize]) -> PointCloud {
        let mut coords = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            coords.extend_from_slice(self.point(i));
        }
        PointCloud { dim: self.dim, coords }
    }

    /// Concatenates another cloud of the same dimension.
    pub fn concat(&self, other: &PointCloud) -> Result<PointCloud> {
        self.check_dim("appended cloud", other.dim)?;
        let mut coords = self.coords.clone();
        coords.extend_from_slice(&other.coords);
        Ok(PointCloud { dim: self.dim, coords })
    }
}

/// Squared Euclidean distance. Callers guarantee equal lengths.
#[inline]
pub(crate) fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}
