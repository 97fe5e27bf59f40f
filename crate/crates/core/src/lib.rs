//! # robust-tda
//!
//! Topological inference for noisy point clouds.
//!
//! The pipeline has three stages:
//!
//! 1. evaluate a distance-like or density field of the sample on a grid
//!    ([`dtm`], [`kernel`], [`grid::empirical_distance_field`]);
//! 2. compute the persistence diagram of its sublevel (or superlevel)
//!    filtration ([`persistence`]);
//! 3. bootstrap a confidence band that separates topological signal from
//!    noise ([`bootstrap`]), optionally choosing the smoothing parameter by
//!    maximal significant persistence ([`tuning`]).
//!
//! ```
//! use robust_tda::prelude::*;
//!
//! let cloud = sample_circle(Circle::default(), 200, 0.05, 7)?;
//! let grid = EvaluationGrid::around(&cloud, 0.1, 24)?;
//! let field = dtm_field(&cloud, DtmParams::new(0.1)?, &grid)?;
//! let diagram = field_diagram(&field)?;
//! let loops = diagram.lifetimes(1);
//! assert!(loops.finite[0] > 0.5);
//! # Ok::<(), robust_tda::TdaError>(())
//! ```
//!
//! The guide in `book/` walks through every stage; its code listings run as
//! doc-tests of this crate.

pub mod bootstrap;
pub mod bottleneck;
pub mod cloud;
pub mod datagen;
pub mod diagram;
pub mod dtm;
pub mod error;
pub mod estimator;
pub mod grid;
pub mod io;
pub mod kernel;
pub mod persistence;
pub mod tuning;

pub use cloud::PointCloud;
pub use error::{Result, TdaError};

pub mod prelude {
    pub use crate::bootstrap::{
        annotate_significance, bootstrap_band, bottleneck_bootstrap, supnorm_bootstrap, BandMethod,
        BootstrapConfig, ConfidenceBand,
    };
    pub use crate::bottleneck::{bottleneck_all_dims, bottleneck_distance};
    pub use crate::cloud::PointCloud;
    pub use crate::datagen::{
        sample_cassini, sample_circle, sample_grid2d, sample_voronoi, CassiniOval, Circle, VoronoiMode,
        VoronoiModelSpec,
    };
    pub use crate::diagram::{Feature, PersistenceDiagram};
    pub use crate::dtm::{dtm_at, dtm_field, DtmParams};
    pub use crate::estimator::Estimator;
    pub use crate::grid::{empirical_distance_field, EvaluationGrid, Orientation, ScalarField};
    pub use crate::kernel::{kde_at, kde_field, kernel_distance_at, kernel_distance_field, KernelParams};
    pub use crate::persistence::{build_complex, compute_diagram, field_diagram};
    pub use crate::tuning::{augment_boundary, sharpen, truncate_by_density, tune, BoundaryLayout};
    pub use crate::TdaError;
}

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/distance-to-measure.md")]
    mod distance_to_measure {}
    #[doc = include_str!("../../../book/src/kernels.md")]
    mod kernels {}
    #[doc = include_str!("../../../book/src/persistence.md")]
    mod persistence {}
    #[doc = include_str!("../../../book/src/bottleneck.md")]
    mod bottleneck {}
    #[doc = include_str!("../../../book/src/bootstrap.md")]
    mod bootstrap {}
    #[doc = include_str!("../../../book/src/tuning.md")]
    mod tuning {}
    #[doc = include_str!("../../../book/src/synthetic-data.md")]
    mod synthetic_data {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
