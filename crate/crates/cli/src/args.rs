//! Argument definitions. Method and tie-break values are validated against
//! the runtime registries, so the help text and the dispatch tables can
//! never drift apart.

use std::path::PathBuf;

use clap::builder::PossibleValuesParser;
use clap::{Args, Parser, Subcommand};
use efdm::matching::{self, LambdaSpec, MatchConfig, Method, TieBreak, DEFAULT_ALPHA};

use crate::error::CliError;

fn method_parser() -> PossibleValuesParser {
    PossibleValuesParser::new(matching::method_names())
}

fn tie_break_parser() -> PossibleValuesParser {
    PossibleValuesParser::new(matching::tie_break_names())
}

#[derive(Debug, Parser)]
#[command(
    name = "efdm",
    version,
    about = "Channel-wise distribution matching for images and feature tensors"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Transfer per-channel pixel distributions from style images onto a
    /// content image.
    Image(ImageArgs),
    /// Match a feature tensor to a style tensor, channel by channel.
    Tensor(TensorArgs),
    /// Report per-channel statistics and 64-bin histograms of a tensor or
    /// image.
    Stats(StatsArgs),
    /// Time the matching kernels on synthetic vectors.
    Bench(BenchArgs),
}

/// Matching flags shared by the image and tensor subcommands.
#[derive(Debug, Args)]
pub struct MatchFlags {
    /// Matching method.
    #[arg(long, default_value = "efdm", value_parser = method_parser())]
    pub method: String,

    /// Rule for ordering equal values while sorting.
    #[arg(long = "tie-break", default_value = "quicksort", value_parser = tie_break_parser())]
    pub tie_break: String,

    /// Fixed mixing weight for efdmix in [0, 1]; drawn from
    /// Beta(alpha, alpha) per instance when omitted.
    #[arg(long)]
    pub lambda: Option<f64>,

    /// Beta parameter for sampled mixing weights.
    #[arg(long, default_value_t = DEFAULT_ALPHA)]
    pub alpha: f64,

    /// RNG seed; a fixed seed makes outputs byte-identical across runs.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl MatchFlags {
    pub fn config(&self) -> Result<MatchConfig, CliError> {
        let method = Method::from_name(&self.method)
            .map_err(|e| CliError::Usage(e.to_string()))?;
        let tie_break = TieBreak::from_name(&self.tie_break)
            .map_err(|e| CliError::Usage(e.to_string()))?;
        let cfg = MatchConfig {
            method,
            tie_break,
            lambda: match self.lambda {
                Some(l) => LambdaSpec::Fixed(l),
                None => LambdaSpec::Sampled,
            },
            alpha: self.alpha,
            seed: self.seed,
            ..MatchConfig::default()
        };
        cfg.validate().map_err(CliError::from)?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct ImageArgs {
    /// Content image (PNG or binary PPM, 8-bit RGB).
    pub content: PathBuf,

    /// Style image; repeat the flag to interpolate several styles.
    #[arg(long = "style", required = true)]
    pub styles: Vec<PathBuf>,

    /// Interpolation weight per style, same order as --style; must sum
    /// to 1. Uniform when omitted.
    #[arg(long = "weight")]
    pub weights: Vec<f64>,

    #[command(flatten)]
    pub flags: MatchFlags,

    /// Report content/style/combined losses using this style weight.
    #[arg(long)]
    pub omega: Option<f64>,

    /// Report mean-squared losses instead of Euclidean norms.
    #[arg(long, requires = "omega")]
    pub mse: bool,

    /// Emit CSV on stdout instead of an aligned table.
    #[arg(long)]
    pub csv: bool,

    /// Output image path (written as PNG).
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct TensorArgs {
    /// Content tensor (.npy, rank 4).
    pub x: PathBuf,

    /// Style tensor (.npy, rank 4).
    pub y: PathBuf,

    #[command(flatten)]
    pub flags: MatchFlags,

    /// Resample style rows whose plane size differs from the content's
    /// (sort-matching methods otherwise require equal height and width).
    #[arg(long)]
    pub resample: bool,

    /// Report content/style/combined losses using this style weight.
    #[arg(long)]
    pub omega: Option<f64>,

    /// Report mean-squared losses instead of Euclidean norms.
    #[arg(long, requires = "omega")]
    pub mse: bool,

    /// Emit CSV on stdout instead of an aligned table.
    #[arg(long)]
    pub csv: bool,

    /// Output tensor path (.npy).
    #[arg(long, short)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Input file: NPY tensor or PNG/PPM image, detected by content.
    pub input: PathBuf,

    /// Report the largest standardized magnitude max |(v - mean) / std|
    /// instead of the raw max |v|.
    #[arg(long)]
    pub standardized_linf: bool,

    /// Emit CSV on stdout instead of aligned tables.
    #[arg(long)]
    pub csv: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Elements per vector.
    #[arg(long, default_value_t = 262_144, value_parser = clap::value_parser!(u64).range(1024..))]
    pub n: u64,

    /// Comma-separated methods to time.
    #[arg(
        long,
        value_delimiter = ',',
        default_values_t = ["adain".to_string(), "hm".to_string(), "efdm".to_string()],
        value_parser = method_parser()
    )]
    pub methods: Vec<String>,

    /// Timed repetitions per method (two untimed warm-up runs precede them).
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u32).range(5..))]
    pub runs: u32,

    /// Seed for the synthetic input vectors.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Time the binned library-equivalent histogram path with this many
    /// bins instead of the exact sort-based one.
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    pub bins: Option<u64>,

    /// Emit CSV on stdout instead of an aligned table.
    #[arg(long)]
    pub csv: bool,
}
