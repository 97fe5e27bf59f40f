//! Bootstrap confidence bands.
//!
//! Both methods resample the cloud with replacement `B` times and recompute
//! the estimator on the same grid. The sup-norm bootstrap records
//! `sqrt(n) * max_x |f*(x) - f(x)|`; the bottleneck bootstrap records
//! `sqrt(n) * W_inf(D*, D)` per homology dimension. The band half-width is
//! the empirical `1 - alpha` quantile of the statistics divided by `sqrt(n)`.
//!
//! Replicate `b` draws its indices from stream `b` of a ChaCha8 generator
//! seeded with the configured seed, so results do not depend on how
//! replicates are scheduled across threads.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bottleneck::bottleneck_distance;
use crate::cloud::PointCloud;
use crate::diagram::{Feature, PersistenceDiagram};
use crate::error::{Result, TdaError};
use crate::estimator::Estimator;
use crate::grid::{EvaluationGrid, Orientation};
use crate::persistence::field_diagram;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BandMethod {
    SupNorm,
    Bottleneck,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BootstrapConfig {
    pub replicates: usize,
    pub alpha: f64,
    pub seed: u64,
    pub method: BandMethod,
}

impl BootstrapConfig {
    pub fn new(replicates: usize, alpha: f64, seed: u64, method: BandMethod) -> Result<Self> {
        let cfg = BootstrapConfig {
            replicates,
            alpha,
            seed,
            method,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.replicates < 1 {
            return Err(TdaError::invalid("bootstrap needs at least one replicate"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(TdaError::invalid(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        Ok(())
    }
}

/// A bootstrap confidence band and the replicate statistics behind it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceBand {
    pub alpha: f64,
    /// `c / sqrt(n)`, in field-value units.
    pub half_width: f64,
    pub method: BandMethod,
    /// Per-dimension half-widths (bottleneck method only).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub per_dim: Option<BTreeMap<usize, f64>>,
    /// Scalar statistics `sqrt(n) * stat_b`, in replicate order.
    pub replicates: Vec<f64>,
    /// Per-dimension statistics (bottleneck method only).
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub per_dim_replicates: Option<BTreeMap<usize, Vec<f64>>>,
    /// Sample size used for the `sqrt(n)` scaling.
    pub n: usize,
}

impl ConfidenceBand {
    /// The half-width that applies to features of dimension `dim`.
    pub fn width_for(&self, dim: usize) -> f64 {
        self.per_dim
            .as_ref()
            .and_then(|m| m.get(&dim).copied())
            .unwrap_or(self.half_width)
    }

    /// Half-width recomputed from the stored statistics at another level.
    pub fn half_width_at(&self, alpha: f64) -> f64 {
        bootstrap_quantile(&self.replicates, alpha) / (self.n as f64).sqrt()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("band serialization cannot fail")
    }
}

/// `theta_(ceil((1 - alpha) B))` of the ascending-sorted statistics (1-based).
pub fn bootstrap_quantile(stats: &[f64], alpha: f64) -> f64 {
    assert!(!stats.is_empty(), "quantile of no statistics");
    let mut sorted = stats.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let b = sorted.len();
    let raw = (1.0 - alpha) * b as f64;
    // absorb representation error such as 0.9 * 50 = 45.000000000000001
    let rank = (raw - 1e-9).ceil().clamp(1.0, b as f64) as usize;
    sorted[rank - 1]
}

/// Resample of `cloud` for replicate `index`.
pub fn resample(cloud: &PointCloud, seed: u64, index: usize) -> PointCloud {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    let n = cloud.len();
    let idx: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
    cloud.select(&idx)
}

fn check(cloud: &PointCloud, estimator: &Estimator, cfg: &BootstrapConfig, want: BandMethod) -> Result<()> {
    cfg.validate()?;
    estimator.validate()?;
    cloud.require_nonempty()?;
    if cfg.method != want {
        return Err(TdaError::invalid(format!(
            "configuration asks for {:?} but {:?} bootstrap was called",
            cfg.method, want
        )));
    }
    Ok(())
}

fn tag(index: usize) -> impl FnOnce(TdaError) -> TdaError {
    move |e| TdaError::Replicate {
        index,
        source: Box::new(e),
    }
}

/// Sup-norm (functional) bootstrap band.
pub fn supnorm_bootstrap(
    cloud: &PointCloud,
    estimator: &Estimator,
    grid: &EvaluationGrid,
    cfg: &BootstrapConfig,
) -> Result<ConfidenceBand> {
    check(cloud, estimator, cfg, BandMethod::SupNorm)?;
    let base = estimator.field(cloud, grid)?;
    let root_n = (cloud.len() as f64).sqrt();
    let stats = (0..cfg.replicates)
        .into_par_iter()
        .map(|b| {
            let star = estimator.field(&resample(cloud, cfg.seed, b), grid).map_err(tag(b))?;
            Ok(root_n * star.sup_distance(&base)?)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(ConfidenceBand {
        alpha: cfg.alpha,
        half_width: bootstrap_quantile(&stats, cfg.alpha) / root_n,
        method: BandMethod::SupNorm,
        per_dim: None,
        replicates: stats,
        per_dim_replicates: None,
        n: cloud.len(),
    })
}

/// Bottleneck bootstrap band with per-dimension widths for dimensions `0..d-1`.
pub fn bottleneck_bootstrap(
    cloud: &PointCloud,
    estimator: &Estimator,
    grid: &EvaluationGrid,
    cfg: &BootstrapConfig,
) -> Result<ConfidenceBand> {
    check(cloud, estimator, cfg, BandMethod::Bottleneck)?;
    let base = field_diagram(&estimator.field(cloud, grid)?)?;
    let dims: Vec<usize> = (0..grid.dim()).collect();
    let root_n = (cloud.len() as f64).sqrt();
    let per_rep = (0..cfg.replicates)
        .into_par_iter()
        .map(|b| {
            let star = field_diagram(&estimator.field(&resample(cloud, cfg.seed, b), grid).map_err(tag(b))?)?;
            Ok(dims
                .iter()
                .map(|&k| root_n * bottleneck_distance(&star, &base, k))
                .collect::<Vec<f64>>())
        })
        .collect::<Result<Vec<Vec<f64>>>>()?;

    let mut per_dim_replicates = BTreeMap::new();
    let mut per_dim = BTreeMap::new();
    for (slot, &k) in dims.iter().enumerate() {
        let stats: Vec<f64> = per_rep.iter().map(|r| r[slot]).collect();
        per_dim.insert(k, bootstrap_quantile(&stats, cfg.alpha) / root_n);
        per_dim_replicates.insert(k, stats);
    }
    let scalar: Vec<f64> = per_rep.iter().map(|r| r.iter().copied().fold(0.0, f64::max)).collect();
    Ok(ConfidenceBand {
        alpha: cfg.alpha,
        half_width: bootstrap_quantile(&scalar, cfg.alpha) / root_n,
        method: BandMethod::Bottleneck,
        per_dim: Some(per_dim),
        replicates: scalar,
        per_dim_replicates: Some(per_dim_replicates),
        n: cloud.len(),
    })
}

/// Dispatches on `cfg.method`.
pub fn bootstrap_band(
    cloud: &PointCloud,
    estimator: &Estimator,
    grid: &EvaluationGrid,
    cfg: &BootstrapConfig,
) -> Result<ConfidenceBand> {
    match cfg.method {
        BandMethod::SupNorm => supnorm_bootstrap(cloud, estimator, grid, cfg),
        BandMethod::Bottleneck => bottleneck_bootstrap(cloud, estimator, grid, cfg),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnotatedFeature {
    #[serde(flatten)]
    pub feature: Feature,
    pub significant: bool,
}

/// A diagram with each feature flagged significant or not.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnotatedDiagram {
    pub orientation: Orientation,
    pub features: Vec<AnnotatedFeature>,
}

impl AnnotatedDiagram {
    pub fn significant_count(&self, dim: usize) -> usize {
        self.features
            .iter()
            .filter(|f| f.significant && f.feature.dim == dim)
            .count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("diagram serialization cannot fail")
    }
}

/// A finite feature is significant when its lifetime strictly exceeds twice
/// the applicable half-width; essential features always are.
pub fn annotate_significance(diagram: &PersistenceDiagram, band: &ConfidenceBand) -> AnnotatedDiagram {
    let features = diagram
        .features()
        .iter()
        .map(|&f| AnnotatedFeature {
            feature: f,
            significant: f.is_essential() || f.lifetime() > 2.0 * band.width_for(f.dim),
        })
        .collect();
    AnnotatedDiagram {
        orientation: diagram.orientation(),
        features,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn band(half_width: f64, per_dim: Option<BTreeMap<usize, f64>>) -> ConfidenceBand {
        ConfidenceBand {
            alpha: 0.05,
            half_width,
            method: BandMethod::SupNorm,
            per_dim,
            replicates: vec![],
            per_dim_replicates: None,
            n: 1,
        }
    }

    #[test]
    fn quantile_convention() {
        let s: Vec<f64> = (1..=50).rev().map(|i| i as f64).collect();
        assert_eq!(bootstrap_quantile(&s, 0.1), 45.0);
        assert_eq!(bootstrap_quantile(&s, 0.05), 48.0);
        assert_eq!(bootstrap_quantile(&[3.0], 0.05), 3.0);
        assert_eq!(bootstrap_quantile(&[1.0, 2.0], 0.99), 1.0);
    }

    #[test]
    fn strict_significance() {
        let d = PersistenceDiagram::new(
            Orientation::Sublevel,
            vec![
                Feature::new(1, 0.0, 0.5),
                Feature::new(1, 1.0, 1.4),
                Feature::new(0, 0.0, f64::INFINITY),
            ],
        )
        .unwrap();
        let a = annotate_significance(&d, &band(0.2, None));
        assert_eq!(a.significant_count(1), 1);
        assert_eq!(a.significant_count(0), 1);
        let a = annotate_significance(&d, &band(0.0, Some(BTreeMap::from([(1, 0.3)]))));
        assert_eq!(a.significant_count(1), 0);
    }

    #[test]
    fn resample_is_stream_split() {
        let c = PointCloud::new((0..40).map(|i| vec![i as f64]).collect()).unwrap();
        assert_eq!(resample(&c, 7, 3), resample(&c, 7, 3));
        assert_ne!(resample(&c, 7, 3), resample(&c, 7, 4));
        assert_ne!(resample(&c, 7, 3), resample(&c, 8, 3));
    }

    #[test]
    fn single_replicate_and_degenerate_cloud() {
        let g = EvaluationGrid::new(vec![-1.0, -1.0], vec![1.0, 1.0], vec![6, 6]).unwrap();
        let same = PointCloud::new(vec![vec![0.2, 0.1]; 10]).unwrap();
        let e = Estimator::dtm(0.2);
        let cfg = BootstrapConfig::new(5, 0.1, 1, BandMethod::SupNorm).unwrap();
        let b = supnorm_bootstrap(&same, &e, &g, &cfg).unwrap();
        assert_eq!(b.half_width, 0.0);
        let cfg = BootstrapConfig::new(5, 0.1, 1, BandMethod::Bottleneck).unwrap();
        let b = bottleneck_bootstrap(&same, &e, &g, &cfg).unwrap();
        assert_eq!(b.half_width, 0.0);
        assert!(b.per_dim.unwrap().values().all(|&w| w == 0.0));

        let c = PointCloud::new(vec![vec![0.0, 0.0], vec![0.5, 0.5], vec![-0.5, 0.3], vec![0.1, -0.6]]).unwrap();
        let cfg = BootstrapConfig::new(1, 0.05, 9, BandMethod::SupNorm).unwrap();
        let b = supnorm_bootstrap(&c, &e, &g, &cfg).unwrap();
        assert_eq!(b.replicates.len(), 1);
        assert_eq!(b.half_width, b.replicates[0] / 2.0);
        let cfg = BootstrapConfig::new(1, 0.05, 9, BandMethod::Bottleneck).unwrap();
        let b = bottleneck_bootstrap(&c, &e, &g, &cfg).unwrap();
        for (k, w) in b.per_dim.as_ref().unwrap() {
            assert_eq!(*w, b.per_dim_replicates.as_ref().unwrap()[k][0] / 2.0);
        }
    }

    #[test]
    fn config_validation() {
        assert!(BootstrapConfig::new(0, 0.1, 0, BandMethod::SupNorm).is_err());
        assert!(BootstrapConfig::new(10, 1.0, 0, BandMethod::SupNorm).is_err());
        assert!(BootstrapConfig::new(10, 0.0, 0, BandMethod::SupNorm).is_err());
        let c = PointCloud::new(vec![vec![0.0]]).unwrap();
        let g = EvaluationGrid::new(vec![0.0], vec![1.0], vec![3]).unwrap();
        let cfg = BootstrapConfig::new(2, 0.1, 0, BandMethod::Bottleneck).unwrap();
        assert!(supnorm_bootstrap(&c, &Estimator::dtm(0.5), &g, &cfg).is_err());
    }

    #[test]
    fn wider_alpha_gives_narrower_band() {
        let band = ConfidenceBand {
            replicates: vec![0.4, 0.1, 0.9, 0.3, 0.7, 0.2],
            n: 4,
            ..band(0.0, None)
        };
        let mut prev = f64::INFINITY;
        for a in [0.01, 0.1, 0.2, 0.3, 0.5, 0.8] {
            let w = band.half_width_at(a);
            assert!(w <= prev);
            prev = w;
        }
    }
}
