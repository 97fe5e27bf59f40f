//! The `generate`, `bottleneck` and `preprocess` subcommands.

use std::path::{Path, PathBuf};

use robust_tda::bottleneck::{bottleneck_all_dims, bottleneck_distance};
use robust_tda::datagen::{
    sample_cassini_outliers_with, sample_circle, sample_grid2d,
    sample_mixture, sample_voronoi, CassiniOval, Circle, MixtureSpec, SignalSampler, VoronoiModelSpec,
};
use robust_tda::diagram::PersistenceDiagram;
use robust_tda::io::{read_cloud_file, write_cloud};
use robust_tda::kernel::KernelParams;
use robust_tda::tuning::{augment_boundary, sharpen, truncate_by_density, BoundaryLayout};
use robust_tda::PointCloud;
use serde::de::DeserializeOwned;
use serde_json::{Map, Value};

use crate::error::CliError;
use crate::{GenerateKind, GenerateOut, PreprocessIo, PreprocessOp, SignalArg};

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Validation(format!("malformed {}: {e}", path.display())))
}

fn read_input(path: &Path) -> Result<PointCloud, CliError> {
    read_cloud_file(path).map_err(|e| match e {
        robust_tda::TdaError::Io(io) => CliError::Io(format!("cannot read {}: {io}", path.display())),
        other => other.into(),
    })
}

fn emit(cloud: &PointCloud, output: Option<&PathBuf>) -> Result<(), CliError> {
    let mut buf = Vec::new();
    write_cloud(cloud, &mut buf)?;
    match output {
        Some(path) => std::fs::write(path, buf)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(&buf)
                .map_err(|e| CliError::Io(format!("cannot write to stdout: {e}")))
        }
    }
}

pub fn generate(kind: GenerateKind) -> Result<(), CliError> {
    let (cloud, out): (PointCloud, GenerateOut) = match kind {
        GenerateKind::Cassini {
            n,
            outliers,
            sigma,
            a,
            c,
            out,
        } => {
            let d = CassiniOval::default();
            let oval = match (a, c) {
                (None, None) => d,
                _ => CassiniOval::new(a.unwrap_or(d.a()), c.unwrap_or(d.c()))?,
            };
            (sample_cassini_outliers_with(&oval, n, outliers, sigma, out.seed)?, out)
        }
        GenerateKind::Circle { n, sigma, radius, out } => {
            let circle = Circle {
                radius,
                ..Circle::default()
            };
            (sample_circle(circle, n, sigma, out.seed)?, out)
        }
        GenerateKind::Grid2d {
            lines,
            n,
            sigma,
            outliers,
            out,
        } => (sample_grid2d(lines, n, sigma, outliers, out.seed)?, out),
        GenerateKind::Voronoi {
            spec,
            nuclei,
            mode,
            n,
            thickness,
            dim,
            out,
        } => {
            let spec = match spec {
                Some(path) => read_json::<VoronoiModelSpec>(&path)?,
                None => match dim {
                    2 => VoronoiModelSpec::square(nuclei, mode.into(), n, thickness, out.seed),
                    3 => VoronoiModelSpec::cube(nuclei, mode.into(), n, thickness, out.seed),
                    d => return Err(CliError::Validation(format!("voronoi models are 2D or 3D, got {d}"))),
                },
            };
            (sample_voronoi(&spec)?, out)
        }
        GenerateKind::Mixture { spec, signal, n, out } => {
            let spec: MixtureSpec = read_json(&spec)?;
            let cassini = CassiniOval::default();
            let circle = Circle::default();
            let base: &dyn SignalSampler = match signal {
                SignalArg::Circle => &circle,
                SignalArg::Cassini => &cassini,
            };
            (sample_mixture(&spec, base, n, out.seed)?, out)
        }
    };
    emit(&cloud, out.output.as_ref())
}

fn distance_value(v: f64) -> Value {
    if v.is_finite() {
        Value::from(v)
    } else {
        Value::from("inf")
    }
}

pub fn bottleneck(first: &Path, second: &Path, dim: Option<usize>) -> Result<(), CliError> {
    let load = |p: &Path| -> Result<PersistenceDiagram, CliError> {
        let text = std::fs::read_to_string(p).map_err(|e| CliError::Io(format!("cannot read {}: {e}", p.display())))?;
        Ok(PersistenceDiagram::from_json(&text)?)
    };
    let (a, b) = (load(first)?, load(second)?);
    if a.orientation() != b.orientation() {
        return Err(CliError::Validation("diagrams have different orientations".into()));
    }
    let mut map = Map::new();
    match dim {
        Some(k) => {
            map.insert(k.to_string(), distance_value(bottleneck_distance(&a, &b, k)));
        }
        None => {
            for (k, v) in bottleneck_all_dims(&a, &b) {
                map.insert(k.to_string(), distance_value(v));
            }
        }
    }
    println!("{}", serde_json::to_string_pretty(&Value::Object(map)).expect("json"));
    Ok(())
}

pub fn preprocess(op: PreprocessOp) -> Result<(), CliError> {
    let (cloud, io): (PointCloud, PreprocessIo) = match op {
        PreprocessOp::Augment {
            io,
            lower,
            upper,
            per_edge,
            spacing,
        } => {
            let layout = match (per_edge, spacing) {
                (Some(c), _) => BoundaryLayout::PerEdge(c),
                (None, Some(s)) => BoundaryLayout::Spacing(s),
                (None, None) => unreachable!("clap requires one of the layouts"),
            };
            let input = read_input(&io.input)?;
            let (out, contained) = augment_boundary(&input, &lower, &upper, layout)?;
            if !contained {
                eprintln!("warning: some input points lie outside the augmentation box");
            }
            (out, io)
        }
        PreprocessOp::Truncate { io, h, threshold } => {
            let input = read_input(&io.input)?;
            let t = truncate_by_density(&input, KernelParams::new(h)?, threshold)?;
            if t.is_empty() {
                eprintln!("warning: no point reaches density {threshold}; output is empty");
            }
            (t.cloud, io)
        }
        PreprocessOp::Sharpen { io, h, iterations } => {
            let input = read_input(&io.input)?;
            (sharpen(&input, KernelParams::new(h)?, iterations)?, io)
        }
    };
    emit(&cloud, io.output.as_ref())
}
