mod config;
mod error;
mod pipeline;
mod tools;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use robust_tda::bootstrap::BandMethod;
use robust_tda::datagen::VoronoiMode;

use crate::error::CliError;

#[derive(Parser)]
#[command(name = "tda", version, about = "Topological inference for noisy point clouds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic point cloud as CSV.
    Generate {
        #[command(subcommand)]
        kind: GenerateKind,
    },
    /// Evaluate a field on a grid and compute its persistence diagram.
    Diagram(PipelineArgs),
    /// Diagram plus bootstrap confidence band and significance annotation.
    Band(PipelineArgs),
    /// Bottleneck distance between two diagram JSON files.
    Bottleneck {
        first: PathBuf,
        second: PathBuf,
        /// Restrict to one homology dimension.
        #[arg(long)]
        dim: Option<usize>,
    },
    /// Choose the smoothing parameter by maximal significant persistence.
    Tune {
        #[command(flatten)]
        pipeline: PipelineArgs,
        /// Candidate parameter values, comma separated.
        #[arg(long, value_delimiter = ',')]
        values: Option<Vec<f64>>,
        /// Homology dimension whose lifetimes are scored.
        #[arg(long)]
        dim: Option<usize>,
    },
    /// Transform a point cloud before analysis.
    Preprocess {
        #[command(subcommand)]
        op: PreprocessOp,
    },
}

#[derive(Clone, Copy, ValueEnum)]
pub enum EstimatorKind {
    Dist,
    Dtm,
    Kde,
    Kdist,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum MethodArg {
    Supnorm,
    Bottleneck,
}

impl From<MethodArg> for BandMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Supnorm => BandMethod::SupNorm,
            MethodArg::Bottleneck => BandMethod::Bottleneck,
        }
    }
}

/// Flags shared by the pipeline subcommands. With `--config`, flags given on
/// the command line override the file.
#[derive(Args, Default)]
pub struct PipelineArgs {
    /// A previously written resolved-config.json (or any pipeline config).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Point cloud CSV, one point per row.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub estimator: Option<EstimatorKind>,
    /// DTM mass parameter.
    #[arg(long)]
    pub m: Option<f64>,
    /// Kernel bandwidth.
    #[arg(long)]
    pub h: Option<f64>,
    /// Use the squared DTM / kernel distance.
    #[arg(long)]
    pub squared: Option<bool>,
    /// Explicit grid lower corner, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub lower: Option<Vec<f64>>,
    /// Explicit grid upper corner, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub upper: Option<Vec<f64>>,
    /// Sites per axis: one value for all axes or one per axis.
    #[arg(long, value_delimiter = ',')]
    pub resolution: Option<Vec<usize>>,
    /// Auto-grid padding as a fraction of the extent per side.
    #[arg(long)]
    pub padding: Option<f64>,
    /// Output directory.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Bootstrap replicates.
    #[arg(long)]
    pub replicates: Option<usize>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,
}

#[derive(Subcommand)]
enum GenerateKind {
    /// Cassini oval plus uniform outliers in its bounding box.
    Cassini {
        #[arg(long, default_value_t = 500)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        outliers: usize,
        #[arg(long, default_value_t = 0.0)]
        sigma: f64,
        #[arg(long)]
        a: Option<f64>,
        #[arg(long)]
        c: Option<f64>,
        #[command(flatten)]
        out: GenerateOut,
    },
    /// Circle with Gaussian noise.
    Circle {
        #[arg(long, default_value_t = 300)]
        n: usize,
        #[arg(long, default_value_t = 0.0)]
        sigma: f64,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[command(flatten)]
        out: GenerateOut,
    },
    /// Noisy line grid on the unit square plus uniform outliers.
    Grid2d {
        #[arg(long, default_value_t = 3)]
        lines: usize,
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        #[arg(long, default_value_t = 0.0)]
        sigma: f64,
        #[arg(long, default_value_t = 0)]
        outliers: usize,
        #[command(flatten)]
        out: GenerateOut,
    },
    /// Voronoi wall, filament or cluster model.
    Voronoi {
        /// JSON model specification; other flags are ignored when given.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, default_value_t = 20)]
        nuclei: usize,
        #[arg(long, value_enum, default_value = "wall")]
        mode: ModeArg,
        #[arg(long, default_value_t = 3000)]
        n: usize,
        #[arg(long, default_value_t = 0.2)]
        thickness: f64,
        /// 2 for the square variant, 3 for the cube.
        #[arg(long, default_value_t = 3)]
        dim: usize,
        #[command(flatten)]
        out: GenerateOut,
    },
    /// Signal/outlier mixture from a JSON specification.
    Mixture {
        /// JSON with `pi`, `outlier_lower`, `outlier_upper`, `sigma`.
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, value_enum, default_value = "circle")]
        signal: SignalArg,
        #[arg(long, default_value_t = 1000)]
        n: usize,
        #[command(flatten)]
        out: GenerateOut,
    },
}

#[derive(Args)]
struct GenerateOut {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV file to write; standard output when absent.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Wall,
    Filament,
    Cluster,
}

impl From<ModeArg> for VoronoiMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Wall => VoronoiMode::Wall,
            ModeArg::Filament => VoronoiMode::Filament,
            ModeArg::Cluster => VoronoiMode::Cluster,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SignalArg {
    Circle,
    Cassini,
}

#[derive(Subcommand)]
enum PreprocessOp {
    /// Add a deterministic lattice of points on the faces of a box.
    Augment {
        #[command(flatten)]
        io: PreprocessIo,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        lower: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        upper: Vec<f64>,
        /// Lattice points per axis, corners included.
        #[arg(long, conflicts_with = "spacing", required_unless_present = "spacing")]
        per_edge: Option<usize>,
        /// Lattice spacing.
        #[arg(long)]
        spacing: Option<f64>,
    },
    /// Drop points whose kernel density is below a threshold.
    Truncate {
        #[command(flatten)]
        io: PreprocessIo,
        #[arg(long)]
        h: f64,
        #[arg(long)]
        threshold: f64,
    },
    /// Mean-shift sharpening.
    Sharpen {
        #[command(flatten)]
        io: PreprocessIo,
        #[arg(long)]
        h: f64,
        #[arg(long, default_value_t = 1)]
        iterations: usize,
    },
}

#[derive(Args)]
struct PreprocessIo {
    #[arg(long)]
    input: PathBuf,
    /// CSV file to write; standard output when absent.
    #[arg(long)]
    output: Option<PathBuf>,
}

fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("TDA_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| CliError::Validation(format!("TDA_THREADS must be a nonnegative integer, got {raw:?}")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Internal(format!("cannot start thread pool: {e}")))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    init_threads()?;
    match cli.command {
        Command::Generate { kind } => tools::generate(kind),
        Command::Diagram(args) => pipeline::diagram(&args),
        Command::Band(args) => pipeline::band(&args),
        Command::Bottleneck { first, second, dim } => tools::bottleneck(&first, &second, dim),
        Command::Tune { pipeline, values, dim } => pipeline::tune(&pipeline, values, dim),
        Command::Preprocess { op } => tools::preprocess(op),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
