//! The `diagram`, `band` and `tune` subcommands.

use std::path::{Path, PathBuf};

use robust_tda::bootstrap::{annotate_significance, bootstrap_band};
use robust_tda::diagram::PersistenceDiagram;
use robust_tda::estimator::Estimator;
use robust_tda::io::write_field;
use robust_tda::persistence::field_diagram;
use robust_tda::tuning;

use crate::config::{GridSpec, PipelineConfig, Resolved, TuneSettings, DEFAULT_PADDING};
use crate::error::{write_file, CliError};
use crate::{EstimatorKind, PipelineArgs};

const DEFAULT_OUTPUT: &str = "tda-out";

fn missing(what: &str) -> CliError {
    CliError::Validation(format!("missing {what}"))
}

fn estimator_from_flags(kind: EstimatorKind, args: &PipelineArgs) -> Result<Estimator, CliError> {
    let need = |v: Option<f64>, flag: &str| v.ok_or_else(|| missing(&format!("--{flag} for this estimator")));
    Ok(match kind {
        EstimatorKind::Dist => Estimator::Dist,
        EstimatorKind::Dtm => Estimator::Dtm {
            m: need(args.m, "m")?,
            squared: args.squared.unwrap_or(false),
        },
        EstimatorKind::Kde => Estimator::Kde { h: need(args.h, "h")? },
        EstimatorKind::Kdist => Estimator::Kdist {
            h: need(args.h, "h")?,
            squared: args.squared.unwrap_or(true),
        },
    })
}

/// Merges a config file (if any) with command-line overrides.
pub fn build_config(args: &PipelineArgs) -> Result<PipelineConfig, CliError> {
    let base = args.config.as_deref().map(PipelineConfig::load).transpose()?;

    let input = args
        .input
        .clone()
        .or_else(|| base.as_ref().map(|c| c.input.clone()))
        .ok_or_else(|| missing("--input"))?;

    let estimator = match (args.estimator, &base) {
        (Some(kind), _) => estimator_from_flags(kind, args)?,
        (None, Some(c)) => {
            let mut e = c.estimator;
            if let Some(v) = args.m.or(args.h) {
                e = e.with_parameter(v)?;
            }
            e
        }
        (None, None) => return Err(missing("--estimator")),
    };

    let grid = match (&args.lower, &args.upper) {
        (Some(lower), Some(upper)) => GridSpec::Explicit {
            lower: lower.clone(),
            upper: upper.clone(),
            resolution: args.resolution.clone().ok_or_else(|| missing("--resolution for an explicit grid"))?,
        },
        (Some(_), None) | (None, Some(_)) => {
            return Err(CliError::Validation("--lower and --upper must be given together".into()))
        }
        (None, None) if args.padding.is_some() || args.resolution.is_some() => {
            let inherited = match base.as_ref().map(|c| &c.grid) {
                Some(GridSpec::Auto { padding, resolution }) => (*padding, resolution.clone()),
                _ => (DEFAULT_PADDING, None),
            };
            GridSpec::Auto {
                padding: args.padding.unwrap_or(inherited.0),
                resolution: args.resolution.clone().or(inherited.1),
            }
        }
        (None, None) => base.as_ref().map(|c| c.grid.clone()).unwrap_or_default(),
    };

    let mut band = base.as_ref().map(|c| c.band).unwrap_or_default();
    if let Some(b) = args.replicates {
        band.replicates = b;
    }
    if let Some(a) = args.alpha {
        band.alpha = a;
    }
    if let Some(m) = args.method {
        band.method = m.into();
    }

    Ok(PipelineConfig {
        input,
        estimator,
        grid,
        band,
        output: args
            .output
            .clone()
            .or_else(|| base.as_ref().map(|c| c.output.clone()))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT)),
        seed: args.seed.or(base.as_ref().map(|c| c.seed)).unwrap_or(0),
        tune: base.and_then(|c| c.tune),
    })
}

fn prepare_output(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))
}

/// Writes field.csv, diagram.json and resolved-config.json.
fn write_diagram(run: &Resolved) -> Result<PersistenceDiagram, CliError> {
    let out = &run.config.output;
    prepare_output(out)?;
    let field = run.config.estimator.field(&run.cloud, &run.grid)?;
    let diagram = field_diagram(&field)?;

    let mut csv = Vec::new();
    write_field(&field, &mut csv)?;
    std::fs::write(out.join("field.csv"), csv)
        .map_err(|e| CliError::Io(format!("cannot write field.csv: {e}")))?;
    write_file(&out.join("diagram.json"), &(diagram.to_json() + "\n"))?;
    write_file(&out.join("resolved-config.json"), &run.config_json())?;
    Ok(diagram)
}

fn summarize(diagram: &PersistenceDiagram) {
    for dim in diagram.dims() {
        println!("dim {dim}: {} features", diagram.in_dim(dim).count());
    }
}

pub fn diagram(args: &PipelineArgs) -> Result<(), CliError> {
    let run = build_config(args)?.resolve()?;
    let d = write_diagram(&run)?;
    summarize(&d);
    Ok(())
}

pub fn band(args: &PipelineArgs) -> Result<(), CliError> {
    let run = build_config(args)?.resolve()?;
    let diagram = write_diagram(&run)?;
    let cfg = run.config.bootstrap()?;
    let band = bootstrap_band(&run.cloud, &run.config.estimator, &run.grid, &cfg)?;
    let annotated = annotate_significance(&diagram, &band);
    let out = &run.config.output;
    write_file(&out.join("band.json"), &(band.to_json() + "\n"))?;
    write_file(&out.join("annotated-diagram.json"), &(annotated.to_json() + "\n"))?;

    println!("half-width: {}", band.half_width);
    if let Some(per_dim) = &band.per_dim {
        for (dim, w) in per_dim {
            println!("dim {dim} width: {w}");
        }
    }
    for dim in diagram.dims() {
        println!("dim {dim}: {} significant", annotated.significant_count(dim));
    }
    Ok(())
}

fn join(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

pub fn tune(args: &PipelineArgs, values: Option<Vec<f64>>, dim: Option<usize>) -> Result<(), CliError> {
    let mut config = build_config(args)?;
    let inherited = config.tune.take();
    let values = values
        .or_else(|| inherited.as_ref().map(|t| t.values.clone()))
        .ok_or_else(|| missing("--values"))?;
    let dim = dim.or(inherited.map(|t| t.dim)).unwrap_or(1);
    config.tune = Some(TuneSettings { values, dim });

    let run = config.resolve()?;
    let settings = run.config.tune.as_ref().expect("tuning settings are set");
    let cfg = run.config.bootstrap()?;
    let curve = tuning::tune(
        &run.cloud,
        &run.config.estimator,
        &settings.values,
        settings.dim,
        &run.grid,
        &cfg,
    )?;
    let out = &run.config.output;
    prepare_output(out)?;
    write_file(&out.join("tuning.csv"), &curve.to_csv())?;
    write_file(&out.join("resolved-config.json"), &run.config_json())?;

    println!("argmax N: {}", join(&curve.argmax_count));
    println!("argmax S: {}", join(&curve.argmax_total));
    Ok(())
}
