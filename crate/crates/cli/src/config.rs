//! Pipeline configuration: what the user asked for, and the fully resolved
//! form written next to every output as `resolved-config.json`.

use std::path::{Path, PathBuf};

use robust_tda::bootstrap::{BandMethod, BootstrapConfig};
use robust_tda::estimator::Estimator;
use robust_tda::grid::EvaluationGrid;
use robust_tda::io::read_cloud_file;
use robust_tda::PointCloud;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const DEFAULT_PADDING: f64 = 0.1;

/// Auto-grid resolution per axis for a cloud of dimension `d`.
pub fn default_resolution(d: usize) -> usize {
    match d {
        1 => 256,
        2 => 64,
        3 => 32,
        _ => 16,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum GridSpec {
    /// Bounding box of the cloud padded by `padding` times its extent per side.
    Auto {
        padding: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        resolution: Option<Vec<usize>>,
    },
    Explicit {
        lower: Vec<f64>,
        upper: Vec<f64>,
        resolution: Vec<usize>,
    },
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec::Auto {
            padding: DEFAULT_PADDING,
            resolution: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandSettings {
    pub replicates: usize,
    pub alpha: f64,
    pub method: BandMethod,
}

impl Default for BandSettings {
    fn default() -> Self {
        BandSettings {
            replicates: 100,
            alpha: 0.05,
            method: BandMethod::SupNorm,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TuneSettings {
    pub values: Vec<f64>,
    pub dim: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub input: PathBuf,
    pub estimator: Estimator,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub band: BandSettings,
    pub output: PathBuf,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tune: Option<TuneSettings>,
}

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Validation(format!("malformed config {}: {e}", path.display())))
    }

    pub fn bootstrap(&self) -> Result<BootstrapConfig, CliError> {
        Ok(BootstrapConfig::new(
            self.band.replicates,
            self.band.alpha,
            self.seed,
            self.band.method,
        )?)
    }

    /// Reads the input cloud and pins the grid to explicit bounds.
    pub fn resolve(mut self) -> Result<Resolved, CliError> {
        self.estimator.validate()?;
        self.bootstrap()?;
        let cloud = read_cloud_file(&self.input).map_err(|e| match e {
            robust_tda::TdaError::Io(io) => CliError::Io(format!("cannot read {}: {io}", self.input.display())),
            other => other.into(),
        })?;
        cloud.require_nonempty()?;
        let d = cloud.dim();
        let grid = match &self.grid {
            GridSpec::Auto { padding, resolution } => {
                let res = broadcast(resolution.as_deref(), d)?.unwrap_or_else(|| vec![default_resolution(d); d]);
                let g = EvaluationGrid::around(&cloud, *padding, res[0])?;
                EvaluationGrid::new(g.lower().to_vec(), g.upper().to_vec(), res)?
            }
            GridSpec::Explicit {
                lower,
                upper,
                resolution,
            } => {
                let res = broadcast(Some(resolution), d)?.expect("resolution given");
                EvaluationGrid::new(lower.clone(), upper.clone(), res)?
            }
        };
        self.grid = GridSpec::Explicit {
            lower: grid.lower().to_vec(),
            upper: grid.upper().to_vec(),
            resolution: grid.resolution().to_vec(),
        };
        Ok(Resolved {
            config: self,
            cloud,
            grid,
        })
    }
}

/// A single resolution applies to every axis.
fn broadcast(res: Option<&[usize]>, d: usize) -> Result<Option<Vec<usize>>, CliError> {
    match res {
        None => Ok(None),
        Some([r]) => Ok(Some(vec![*r; d])),
        Some(r) if r.len() == d => Ok(Some(r.to_vec())),
        Some(r) => Err(CliError::Validation(format!(
            "grid resolution has {} entries but the cloud has dimension {d}",
            r.len()
        ))),
    }
}

pub struct Resolved {
    pub config: PipelineConfig,
    pub cloud: PointCloud,
    pub grid: EvaluationGrid,
}

impl Resolved {
    pub fn config_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.config).expect("config serialization cannot fail");
        s.push('\n');
        s
    }
}
