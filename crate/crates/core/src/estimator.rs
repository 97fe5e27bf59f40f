use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cloud::PointCloud;
use crate::dtm::{dtm_field, dtm_squared_field, DtmParams};
use crate::error::{Result, TdaError};
use crate::grid::{empirical_distance_field, EvaluationGrid, ScalarField};
use crate::kernel::{kde_field, kernel_distance_field, kernel_distance_squared_field, KernelParams};

/// A scalar-field estimator together with its smoothing parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Estimator {
    /// Distance to the nearest sample point.
    Dist,
    /// Distance to measure at mass `m`; `squared` switches to `δ̂²`.
    Dtm {
        m: f64,
        #[serde(default)]
        squared: bool,
    },
    /// Gaussian kernel density estimate (superlevel orientation).
    Kde { h: f64 },
    /// Kernel distance; `squared` (the default) gives `D̂_K²`.
    Kdist {
        h: f64,
        #[serde(default = "yes")]
        squared: bool,
    },
}

fn yes() -> bool {
    true
}

impl Estimator {
    pub fn dtm(m: f64) -> Self {
        Estimator::Dtm { m, squared: false }
    }

    pub fn kde(h: f64) -> Self {
        Estimator::Kde { h }
    }

    pub fn kdist(h: f64) -> Self {
        Estimator::Kdist { h, squared: true }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Estimator::Dist => Ok(()),
            Estimator::Dtm { m, .. } => DtmParams::new(m).map(|_| ()),
            Estimator::Kde { h } | Estimator::Kdist { h, .. } => KernelParams::new(h).map(|_| ()),
        }
    }

    /// Evaluates the estimator of `cloud` on `grid`.
    pub fn field(&self, cloud: &PointCloud, grid: &EvaluationGrid) -> Result<ScalarField> {
        match *self {
            Estimator::Dist => empirical_distance_field(cloud, grid),
            Estimator::Dtm { m, squared: false } => dtm_field(cloud, DtmParams::new(m)?, grid),
            Estimator::Dtm { m, squared: true } => dtm_squared_field(cloud, DtmParams::new(m)?, grid),
            Estimator::Kde { h } => kde_field(cloud, KernelParams::new(h)?, grid),
            Estimator::Kdist { h, squared: true } => {
                kernel_distance_squared_field(cloud, KernelParams::new(h)?, grid)
            }
            Estimator::Kdist { h, squared: false } => {
                kernel_distance_field(cloud, KernelParams::new(h)?, grid)
            }
        }
    }

    /// The smoothing parameter (`m` or `h`), if any.
    pub fn parameter(&self) -> Option<f64> {
        match *self {
            Estimator::Dist => None,
            Estimator::Dtm { m, .. } => Some(m),
            Estimator::Kde { h } | Estimator::Kdist { h, .. } => Some(h),
        }
    }

    /// Same estimator with its smoothing parameter replaced.
    pub fn with_parameter(&self, value: f64) -> Result<Self> {
        let e = match *self {
            Estimator::Dist => {
                return Err(TdaError::invalid("the distance function has no smoothing parameter"))
            }
            Estimator::Dtm { squared, .. } => Estimator::Dtm { m: value, squared },
            Estimator::Kde { .. } => Estimator::Kde { h: value },
            Estimator::Kdist { squared, .. } => Estimator::Kdist { h: value, squared },
        };
        e.validate()?;
        Ok(e)
    }
}

impl fmt::Display for Estimator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Estimator::Dist => write!(f, "dist"),
            Estimator::Dtm { m, squared } => write!(f, "dtm(m={m}{})", if squared { ", squared" } else { "" }),
            Estimator::Kde { h } => write!(f, "kde(h={h})"),
            Estimator::Kdist { h, squared } => {
                write!(f, "kdist(h={h}{})", if squared { ", squared" } else { "" })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Orientation;

    #[test]
    fn orientation_per_estimator() {
        let c = PointCloud::new(vec![vec![0.0, 0.0], vec![1.0, 0.5]]).unwrap();
        let g = EvaluationGrid::new(vec![-1.0, -1.0], vec![2.0, 2.0], vec![4, 4]).unwrap();
        for e in [Estimator::Dist, Estimator::dtm(0.5), Estimator::kdist(0.4)] {
            assert_eq!(e.field(&c, &g).unwrap().orientation(), Orientation::Sublevel);
        }
        assert_eq!(Estimator::kde(0.4).field(&c, &g).unwrap().orientation(), Orientation::Superlevel);
    }

    #[test]
    fn squared_dtm_squares() {
        let c = PointCloud::new(vec![vec![0.0], vec![1.0], vec![3.0]]).unwrap();
        let g = EvaluationGrid::new(vec![-1.0], vec![4.0], vec![6]).unwrap();
        let a = Estimator::dtm(0.6).field(&c, &g).unwrap();
        let b = Estimator::Dtm { m: 0.6, squared: true }.field(&c, &g).unwrap();
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x * x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn parameter_swap_and_serde() {
        let e = Estimator::kdist(0.3).with_parameter(0.5).unwrap();
        assert_eq!(e, Estimator::Kdist { h: 0.5, squared: true });
        assert!(Estimator::dtm(0.1).with_parameter(2.0).is_err());
        assert!(Estimator::Dist.with_parameter(0.1).is_err());
        let s = serde_json::to_string(&Estimator::dtm(0.1)).unwrap();
        assert_eq!(s, r#"{"kind":"dtm","m":0.1,"squared":false}"#);
        let back: Estimator = serde_json::from_str(r#"{"kind":"kdist","h":0.2}"#).unwrap();
        assert_eq!(back, Estimator::kdist(0.2));
    }
}
