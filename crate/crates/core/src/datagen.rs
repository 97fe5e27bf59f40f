//! Seeded synthetic point clouds.
//!
//! Every sampler is a pure function of its specification and seed. Random
//! numbers come from ChaCha8 so outputs are identical across platforms.

use std::fmt;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cloud::{squared_distance, PointCloud};
use crate::error::{Result, TdaError};

/// A signal distribution `Q` that can be sampled point by point.
pub trait SignalSampler: Sync {
    fn dim(&self) -> usize;
    fn sample_point(&self, rng: &mut dyn RngCore) -> Vec<f64>;
}

/// Uniform distribution on a circle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Circle {
    pub center: [f64; 2],
    pub radius: f64,
}

impl Default for Circle {
    fn default() -> Self {
        Circle {
            center: [0.0, 0.0],
            radius: 1.0,
        }
    }
}

impl SignalSampler for Circle {
    fn dim(&self) -> usize {
        2
    }

    fn sample_point(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        let t = rng.random_range(0.0..std::f64::consts::TAU);
        vec![
            self.center[0] + self.radius * t.cos(),
            self.center[1] + self.radius * t.sin(),
        ]
    }
}

/// Cassini oval `(x² + y²)² - 2c²(x² - y²) = a⁴ - c⁴`, for `a >= c` (a single
/// closed curve; `a = c` is the lemniscate).
///
/// Points are drawn uniformly with respect to arc length: the polar angle is
/// tabulated finely, chord lengths between consecutive curve points give a
/// cumulative length table, and a uniform length is mapped back to an angle.
/// Every sample is an exact curve point `point_at(theta)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CassiniOval {
    a: f64,
    c: f64,
    /// Cumulative chord length at `theta_i = i * TAU / STEPS`.
    cumulative: Vec<f64>,
}

const CASSINI_STEPS: usize = 1 << 16;

impl Default for CassiniOval {
    fn default() -> Self {
        CassiniOval::new(1.02, 1.0).expect("default oval is valid")
    }
}

impl CassiniOval {
    pub fn new(a: f64, c: f64) -> Result<Self> {
        if !(c > 0.0 && a >= c && a.is_finite()) {
            return Err(TdaError::invalid(format!(
                "Cassini oval needs a >= c > 0, got a = {a}, c = {c}"
            )));
        }
        let mut oval = CassiniOval {
            a,
            c,
            cumulative: Vec::new(),
        };
        let step = std::f64::consts::TAU / CASSINI_STEPS as f64;
        let mut cumulative = Vec::with_capacity(CASSINI_STEPS + 1);
        let mut total = 0.0;
        let mut prev = oval.point_at(0.0);
        cumulative.push(0.0);
        for i in 1..=CASSINI_STEPS {
            let p = oval.point_at(i as f64 * step);
            total += (p[0] - prev[0]).hypot(p[1] - prev[1]);
            cumulative.push(total);
            prev = p;
        }
        oval.cumulative = cumulative;
        Ok(oval)
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// Approximate curve length.
    pub fn length(&self) -> f64 {
        *self.cumulative.last().expect("table is filled")
    }

    /// Left-hand side minus right-hand side of the implicit equation.
    pub fn residual(&self, p: &[f64]) -> f64 {
        let (x, y) = (p[0], p[1]);
        let r2 = x * x + y * y;
        r2 * r2 - 2.0 * self.c * self.c * (x * x - y * y) - (self.a.powi(4) - self.c.powi(4))
    }

    /// Point of the curve at polar angle `theta` (the origin where the ray misses).
    pub fn point_at(&self, theta: f64) -> [f64; 2] {
        let c2 = self.c * self.c;
        let cos2 = (2.0 * theta).cos();
        let disc = (c2 * c2 * cos2 * cos2 + self.a.powi(4) - c2 * c2).max(0.0);
        let r = (c2 * cos2 + disc.sqrt()).max(0.0).sqrt();
        [r * theta.cos(), r * theta.sin()]
    }

    /// Polar angle at arc-length position `s` in `[0, length]`.
    fn angle_at_length(&self, s: f64) -> f64 {
        let i = self.cumulative.partition_point(|&v| v <= s).clamp(1, CASSINI_STEPS);
        let (lo, hi) = (self.cumulative[i - 1], self.cumulative[i]);
        let frac = if hi > lo { (s - lo) / (hi - lo) } else { 0.0 };
        (i as f64 - 1.0 + frac) * std::f64::consts::TAU / CASSINI_STEPS as f64
    }
}

impl SignalSampler for CassiniOval {
    fn dim(&self) -> usize {
        2
    }

    fn sample_point(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        let s = rng.random_range(0.0..self.length());
        self.point_at(self.angle_at_length(s)).to_vec()
    }
}

/// Uniform distribution on the union of `lines` equispaced horizontal and
/// `lines` vertical segments spanning a box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineGrid {
    pub lines: usize,
    pub lower: [f64; 2],
    pub upper: [f64; 2],
}

impl LineGrid {
    pub fn new(lines: usize, lower: [f64; 2], upper: [f64; 2]) -> Result<Self> {
        if lines < 2 {
            return Err(TdaError::invalid("a line grid needs at least 2 lines per axis"));
        }
        if !(lower[0] < upper[0] && lower[1] < upper[1]) {
            return Err(TdaError::invalid("line grid box is empty"));
        }
        Ok(LineGrid { lines, lower, upper })
    }

    fn line_position(&self, axis: usize, j: usize) -> f64 {
        self.lower[axis] + j as f64 * (self.upper[axis] - self.lower[axis]) / (self.lines - 1) as f64
    }

    /// Distance from `p` to the nearest grid line segment.
    pub fn distance_to_skeleton(&self, p: &[f64]) -> f64 {
        let mut best = f64::INFINITY;
        for axis in 0..2 {
            let other = 1 - axis;
            // segments at fixed coordinate along `axis`, spanning `other`
            let along = p[other].clamp(self.lower[other], self.upper[other]) - p[other];
            for j in 0..self.lines {
                let across = p[axis] - self.line_position(axis, j);
                best = best.min((across * across + along * along).sqrt());
            }
        }
        best
    }
}

impl SignalSampler for LineGrid {
    fn dim(&self) -> usize {
        2
    }

    fn sample_point(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        let which = rng.random_range(0..2 * self.lines);
        let (axis, j) = (which / self.lines, which % self.lines);
        let other = 1 - axis;
        let mut p = [0.0; 2];
        p[axis] = self.line_position(axis, j);
        p[other] = rng.random_range(self.lower[other]..=self.upper[other]);
        p.to_vec()
    }
}

/// `P = pi R + (1 - pi) (Q * Phi_sigma)` with `R` uniform on a box and
/// `Phi_sigma` isotropic Gaussian noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureSpec {
    pub pi: f64,
    pub outlier_lower: Vec<f64>,
    pub outlier_upper: Vec<f64>,
    pub sigma: f64,
}

impl MixtureSpec {
    pub fn validate(&self, dim: usize) -> Result<()> {
        if !(0.0..=1.0).contains(&self.pi) {
            return Err(TdaError::invalid(format!("outlier fraction must lie in [0, 1], got {}", self.pi)));
        }
        if !(self.sigma >= 0.0 && self.sigma.is_finite()) {
            return Err(TdaError::invalid(format!("noise scale must be nonnegative, got {}", self.sigma)));
        }
        check_box(&self.outlier_lower, &self.outlier_upper, dim)
    }
}

fn check_box(lower: &[f64], upper: &[f64], dim: usize) -> Result<()> {
    if lower.len() != dim || upper.len() != dim {
        return Err(TdaError::DimensionMismatch {
            left_name: "outlier box",
            left: lower.len(),
            right_name: "signal",
            right: dim,
        });
    }
    if lower.iter().zip(upper).any(|(l, u)| !(l <= u) || !l.is_finite() || !u.is_finite()) {
        return Err(TdaError::invalid("outlier box lower corner must not exceed upper corner"));
    }
    Ok(())
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn uniform_in_box(rng: &mut dyn RngCore, lower: &[f64], upper: &[f64]) -> Vec<f64> {
    lower
        .iter()
        .zip(upper)
        .map(|(&l, &u)| if l < u { rng.random_range(l..u) } else { l })
        .collect()
}

fn jitter(rng: &mut dyn RngCore, p: &mut [f64], sigma: f64) {
    if sigma > 0.0 {
        for c in p {
            let z: f64 = StandardNormal.sample(rng);
            *c += sigma * z;
        }
    }
}

/// Mixture sample with a per-point outlier flag.
pub fn sample_mixture_labeled(
    spec: &MixtureSpec,
    signal: &dyn SignalSampler,
    n: usize,
    seed: u64,
) -> Result<(PointCloud, Vec<bool>)> {
    let d = signal.dim();
    spec.validate(d)?;
    let mut rng = rng_for(seed, 0);
    let mut coords = Vec::with_capacity(n * d);
    let mut outlier = Vec::with_capacity(n);
    for _ in 0..n {
        let is_outlier = rng.random_bool(spec.pi);
        let p = if is_outlier {
            uniform_in_box(&mut rng, &spec.outlier_lower, &spec.outlier_upper)
        } else {
            let mut p = signal.sample_point(&mut rng);
            jitter(&mut rng, &mut p, spec.sigma);
            p
        };
        coords.extend(p);
        outlier.push(is_outlier);
    }
    Ok((PointCloud::from_flat(d, coords)?, outlier))
}

pub fn sample_mixture(spec: &MixtureSpec, signal: &dyn SignalSampler, n: usize, seed: u64) -> Result<PointCloud> {
    Ok(sample_mixture_labeled(spec, signal, n, seed)?.0)
}

/// `count` points drawn uniformly from a box.
pub fn uniform_box(count: usize, lower: &[f64], upper: &[f64], seed: u64) -> Result<PointCloud> {
    check_box(lower, upper, lower.len())?;
    let mut rng = rng_for(seed, 0);
    let mut coords = Vec::with_capacity(count * lower.len());
    for _ in 0..count {
        coords.extend(uniform_in_box(&mut rng, lower, upper));
    }
    PointCloud::from_flat(lower.len(), coords)
}

/// Appends `count` uniform outliers drawn from `[lower, upper]`.
pub fn add_uniform_outliers(
    cloud: &PointCloud,
    count: usize,
    lower: &[f64],
    upper: &[f64],
    seed: u64,
) -> Result<PointCloud> {
    cloud.concat(&uniform_box(count, lower, upper, seed)?)
}

/// Mixed into the seed of outlier streams so they differ from the signal stream.
const OUTLIER_SEED: u64 = 0x6f75_746c_6965_7273;

fn signal_only(signal: &dyn SignalSampler, n: usize, sigma: f64, seed: u64) -> Result<PointCloud> {
    let d = signal.dim();
    let spec = MixtureSpec {
        pi: 0.0,
        outlier_lower: vec![0.0; d],
        outlier_upper: vec![0.0; d],
        sigma,
    };
    sample_mixture(&spec, signal, n, seed)
}

/// `n` points on the default Cassini oval with Gaussian jitter `sigma`.
pub fn sample_cassini(n: usize, sigma: f64, seed: u64) -> Result<PointCloud> {
    sample_cassini_with(&CassiniOval::default(), n, sigma, seed)
}

pub fn sample_cassini_with(oval: &CassiniOval, n: usize, sigma: f64, seed: u64) -> Result<PointCloud> {
    if n == 0 {
        return Err(TdaError::invalid("sample size must be positive"));
    }
    signal_only(oval, n, sigma, seed)
}

/// Default Cassini sample plus `outliers` uniform points in the bounding box
/// of the signal.
pub fn sample_cassini_outliers(n: usize, outliers: usize, sigma: f64, seed: u64) -> Result<PointCloud> {
    sample_cassini_outliers_with(&CassiniOval::default(), n, outliers, sigma, seed)
}

pub fn sample_cassini_outliers_with(
    oval: &CassiniOval,
    n: usize,
    outliers: usize,
    sigma: f64,
    seed: u64,
) -> Result<PointCloud> {
    let signal = sample_cassini_with(oval, n, sigma, seed)?;
    let (lower, upper) = signal.bounding_box().expect("signal is nonempty");
    add_uniform_outliers(&signal, outliers, &lower, &upper, seed ^ OUTLIER_SEED)
}

/// `n` points on a circle with Gaussian jitter `sigma`.
pub fn sample_circle(circle: Circle, n: usize, sigma: f64, seed: u64) -> Result<PointCloud> {
    signal_only(&circle, n, sigma, seed)
}

/// Noisy line grid on the unit square plus uniform outliers on the same square.
pub fn sample_grid2d(lines: usize, points: usize, sigma: f64, outliers: usize, seed: u64) -> Result<PointCloud> {
    let grid = LineGrid::new(lines, [0.0, 0.0], [1.0, 1.0])?;
    let signal = signal_only(&grid, points, sigma, seed)?;
    let noise = uniform_box(outliers, &[0.0, 0.0], &[1.0, 1.0], seed ^ OUTLIER_SEED)?;
    signal.concat(&noise)
}

/// Which part of a Voronoi tessellation to sample around.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VoronoiMode {
    /// Faces (2D: cell edges), where at least two nuclei are nearest.
    Wall,
    /// Lines, where at least three nuclei are nearest.
    Filament,
    /// Nodes, where at least four nuclei are nearest.
    Cluster,
}

impl VoronoiMode {
    /// Minimal near-tie multiplicity of lattice sites in this mode.
    pub fn min_multiplicity(self) -> u8 {
        match self {
            VoronoiMode::Wall => 2,
            VoronoiMode::Filament => 3,
            VoronoiMode::Cluster => 4,
        }
    }
}

impl fmt::Display for VoronoiMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VoronoiMode::Wall => "wall",
            VoronoiMode::Filament => "filament",
            VoronoiMode::Cluster => "cluster",
        })
    }
}

/// Disjoint classification of a lattice site by its near-tie multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stratum {
    Cell,
    Face,
    Line,
    Node,
}

impl Stratum {
    pub fn from_multiplicity(m: u8) -> Self {
        match m {
            0 | 1 => Stratum::Cell,
            2 => Stratum::Face,
            3 => Stratum::Line,
            _ => Stratum::Node,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VoronoiModelSpec {
    pub nuclei: usize,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub mode: VoronoiMode,
    pub n: usize,
    /// Standard deviation of the Gaussian jitter around the skeleton.
    pub thickness: f64,
    pub seed: u64,
    /// Fine-lattice points per axis used for classification.
    #[serde(default = "default_lattice")]
    pub lattice: usize,
    /// Sites within this distance of the bisector between their nearest nucleus
    /// and another nucleus count as tied with it; defaults to 1.5 lattice spacings.
    #[serde(default)]
    pub tolerance: Option<f64>,
}

fn default_lattice() -> usize {
    101
}

impl VoronoiModelSpec {
    /// The 3D model on `[0, 50]^3`.
    pub fn cube(nuclei: usize, mode: VoronoiMode, n: usize, thickness: f64, seed: u64) -> Self {
        VoronoiModelSpec {
            nuclei,
            lower: vec![0.0; 3],
            upper: vec![50.0; 3],
            mode,
            n,
            thickness,
            seed,
            lattice: default_lattice(),
            tolerance: None,
        }
    }

    /// The 2D variant on `[0, 50]^2`.
    pub fn square(nuclei: usize, mode: VoronoiMode, n: usize, thickness: f64, seed: u64) -> Self {
        VoronoiModelSpec {
            lower: vec![0.0; 2],
            upper: vec![50.0; 2],
            lattice: 201,
            ..Self::cube(nuclei, mode, n, thickness, seed)
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    /// Fine-lattice spacing (the largest over axes).
    pub fn spacing(&self) -> f64 {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| (u - l) / (self.lattice - 1) as f64)
            .fold(0.0, f64::max)
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance.unwrap_or(1.5 * self.spacing())
    }

    pub fn validate(&self) -> Result<()> {
        if self.nuclei < 2 {
            return Err(TdaError::invalid("a Voronoi model needs at least 2 nuclei"));
        }
        if self.n < 1 {
            return Err(TdaError::invalid("sample size must be positive"));
        }
        if !(self.thickness >= 0.0 && self.thickness.is_finite()) {
            return Err(TdaError::invalid("thickness must be nonnegative"));
        }
        if self.lattice < 2 {
            return Err(TdaError::invalid("classification lattice needs at least 2 points per axis"));
        }
        if !(2..=3).contains(&self.dim()) {
            return Err(TdaError::invalid("Voronoi models are 2- or 3-dimensional"));
        }
        if self.tolerance().is_nan() || self.tolerance() < 0.0 {
            return Err(TdaError::invalid("tolerance must be nonnegative"));
        }
        check_box(&self.lower, &self.upper, self.dim())?;
        if self.lower.iter().zip(&self.upper).any(|(l, u)| l >= u) {
            return Err(TdaError::invalid("Voronoi box is empty"));
        }
        Ok(())
    }
}

/// Nuclei and the classified fine lattice of a Voronoi model.
#[derive(Debug, Clone)]
pub struct VoronoiModel {
    spec: VoronoiModelSpec,
    nuclei: PointCloud,
    /// Near-tie multiplicity per lattice site, capped at 4.
    multiplicity: Vec<u8>,
    /// Index of the nearest nucleus per lattice site.
    owner: Vec<u32>,
}

impl VoronoiModel {
    pub fn new(spec: &VoronoiModelSpec) -> Result<Self> {
        spec.validate()?;
        let nuclei = {
            let mut rng = rng_for(spec.seed, 0);
            let mut coords = Vec::with_capacity(spec.nuclei * spec.dim());
            for _ in 0..spec.nuclei {
                coords.extend(uniform_in_box(&mut rng, &spec.lower, &spec.upper));
            }
            PointCloud::from_flat(spec.dim(), coords)?
        };
        let tol = spec.tolerance();
        let total = spec.lattice.pow(spec.dim() as u32);
        let (multiplicity, owner): (Vec<u8>, Vec<u32>) = (0..total)
            .into_par_iter()
            .map_init(
                || (vec![0.0; spec.dim()], vec![0.0; spec.nuclei]),
                |(site, dist), i| {
                    lattice_site(spec, i, site);
                    for (d, z) in dist.iter_mut().zip(nuclei.points()) {
                        *d = squared_distance(site, z);
                    }
                    let (best, &dmin) = dist
                        .iter()
                        .enumerate()
                        .min_by(|a, b| a.1.total_cmp(b.1))
                        .expect("at least two nuclei");
                    let zb = nuclei.point(best);
                    // distance from the site to the bisector of nuclei `best` and `j`
                    let near = (0..spec.nuclei)
                        .filter(|&j| j != best)
                        .filter(|&j| {
                            let gap = squared_distance(zb, nuclei.point(j)).sqrt();
                            (dist[j] - dmin) / (2.0 * gap) <= tol
                        })
                        .count();
                    ((near + 1).min(4) as u8, best as u32)
                },
            )
            .unzip();
        Ok(VoronoiModel {
            spec: spec.clone(),
            nuclei,
            multiplicity,
            owner,
        })
    }

    pub fn nuclei(&self) -> &PointCloud {
        &self.nuclei
    }

    pub fn lattice_len(&self) -> usize {
        self.multiplicity.len()
    }

    pub fn site(&self, index: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.spec.dim()];
        lattice_site(&self.spec, index, &mut out);
        out
    }

    pub fn stratum(&self, index: usize) -> Stratum {
        Stratum::from_multiplicity(self.multiplicity[index])
    }

    /// Lattice sites eligible for a sampling mode.
    pub fn sites_for(&self, mode: VoronoiMode) -> Vec<usize> {
        let min = mode.min_multiplicity();
        (0..self.multiplicity.len())
            .filter(|&i| self.multiplicity[i] >= min)
            .collect()
    }

    /// Number of nuclei whose cell contains at least one lattice site.
    pub fn realized_cells(&self) -> usize {
        let mut seen = vec![false; self.spec.nuclei];
        for &o in &self.owner {
            seen[o as usize] = true;
        }
        seen.into_iter().filter(|&s| s).count()
    }

    /// Draws the model's `n` points.
    pub fn sample(&self) -> Result<PointCloud> {
        let spec = &self.spec;
        let eligible = self.sites_for(spec.mode);
        if eligible.is_empty() {
            return Err(TdaError::EmptyStratum {
                mode: spec.mode,
                tolerance: spec.tolerance(),
            });
        }
        let d = spec.dim();
        let half: Vec<f64> = (0..d)
            .map(|i| 0.5 * (spec.upper[i] - spec.lower[i]) / (spec.lattice - 1) as f64)
            .collect();
        let mut rng = rng_for(spec.seed, 1);
        let mut coords = Vec::with_capacity(spec.n * d);
        let mut site = vec![0.0; d];
        for _ in 0..spec.n {
            let pick = eligible[rng.random_range(0..eligible.len())];
            lattice_site(spec, pick, &mut site);
            for (c, h) in site.iter_mut().zip(&half) {
                *c += rng.random_range(-h..=*h);
            }
            jitter(&mut rng, &mut site, spec.thickness);
            coords.extend_from_slice(&site);
        }
        PointCloud::from_flat(d, coords)
    }
}

fn lattice_site(spec: &VoronoiModelSpec, mut index: usize, out: &mut [f64]) {
    let r = spec.lattice;
    for axis in (0..spec.dim()).rev() {
        let j = index % r;
        index /= r;
        out[axis] = spec.lower[axis] + j as f64 * (spec.upper[axis] - spec.lower[axis]) / (r - 1) as f64;
    }
}

/// Samples a Voronoi wall, filament or cluster model.
pub fn sample_voronoi(spec: &VoronoiModelSpec) -> Result<PointCloud> {
    VoronoiModel::new(spec)?.sample()
}
