use std::cmp::Ordering;
use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Result, TdaError};
use crate::grid::Orientation;
use crate::io::extended_float;

/// One point of a persistence diagram.
///
/// `birth` and `death` are filtration values of the field that produced the
/// diagram. For sublevel filtrations `birth <= death` and an essential class
/// has `death = +inf`; superlevel filtrations run downwards, so `birth >= death`
/// and essential classes die at `-inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Feature {
    pub dim: usize,
    pub birth: f64,
    #[serde(with = "extended_float")]
    pub death: f64,
}

impl Feature {
    pub fn new(dim: usize, birth: f64, death: f64) -> Self {
        Feature { dim, birth, death }
    }

    pub fn is_essential(&self) -> bool {
        self.death.is_infinite()
    }

    /// `|death - birth|`; infinite for essential features.
    pub fn lifetime(&self) -> f64 {
        (self.death - self.birth).abs()
    }

    fn sort_key_cmp(&self, other: &Feature) -> Ordering {
        self.dim
            .cmp(&other.dim)
            .then(self.birth.total_cmp(&other.birth))
            .then(self.death.total_cmp(&other.death))
    }
}

/// Multiset of persistence features, kept sorted by `(dim, birth, death)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DiagramParts")]
pub struct PersistenceDiagram {
    orientation: Orientation,
    features: Vec<Feature>,
}

#[derive(Deserialize)]
struct DiagramParts {
    #[serde(default = "default_orientation")]
    orientation: Orientation,
    features: Vec<Feature>,
}

fn default_orientation() -> Orientation {
    Orientation::Sublevel
}

impl TryFrom<DiagramParts> for PersistenceDiagram {
    type Error = TdaError;

    fn try_from(p: DiagramParts) -> Result<Self> {
        PersistenceDiagram::new(p.orientation, p.features)
    }
}

/// Finite lifetimes of one homology dimension, plus the count of essential features.
#[derive(Debug, Clone, PartialEq)]
pub struct Lifetimes {
    /// Sorted descending.
    pub finite: Vec<f64>,
    pub infinite: usize,
}

impl PersistenceDiagram {
    pub fn new(orientation: Orientation, mut features: Vec<Feature>) -> Result<Self> {
        for f in &features {
            if !f.birth.is_finite() || f.death.is_nan() {
                return Err(TdaError::Format(format!("feature {f:?} has an invalid birth or death")));
            }
            let ordered = match orientation {
                Orientation::Sublevel => f.birth <= f.death,
                Orientation::Superlevel => f.birth >= f.death,
            };
            if !ordered {
                return Err(TdaError::Format(format!(
                    "feature {f:?} dies before it is born in a {orientation:?} diagram"
                )));
            }
        }
        features.sort_by(Feature::sort_key_cmp);
        Ok(PersistenceDiagram {
            orientation,
            features,
        })
    }

    pub fn empty(orientation: Orientation) -> Self {
        PersistenceDiagram {
            orientation,
            features: Vec::new(),
        }
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn features(&self) -> &[Feature] {
        &self.features
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    pub fn in_dim(&self, dim: usize) -> impl Iterator<Item = &Feature> + '_ {
        self.features.iter().filter(move |f| f.dim == dim)
    }

    /// Homology dimensions that have at least one feature.
    pub fn dims(&self) -> BTreeSet<usize> {
        self.features.iter().map(|f| f.dim).collect()
    }

    pub fn lifetimes(&self, dim: usize) -> Lifetimes {
        let mut finite = Vec::new();
        let mut infinite = 0;
        for f in self.in_dim(dim) {
            if f.is_essential() {
                infinite += 1;
            } else {
                finite.push(f.lifetime());
            }
        }
        finite.sort_by(|a, b| b.total_cmp(a));
        Lifetimes { finite, infinite }
    }

    /// Number of features alive at threshold `t`: born at or before `t`, dying after it.
    pub fn alive_at(&self, dim: usize, t: f64) -> usize {
        self.in_dim(dim)
            .filter(|f| match self.orientation {
                Orientation::Sublevel => f.birth <= t && t < f.death,
                Orientation::Superlevel => f.birth >= t && t > f.death,
            })
            .count()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("diagram serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| TdaError::Format(format!("diagram json: {e}")))
    }
}
