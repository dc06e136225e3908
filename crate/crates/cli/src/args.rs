use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "gaussgrasp",
    version,
    about = "Grasp-map generation, extraction and evaluation"
)]
pub struct Cli {
    /// TOML file with default values for any flag; explicit flags win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Worker threads (>= 1).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate ground-truth GMAP1 tensors from annotated scenes.
    Gen(GenArgs),
    /// Decode grasps from GMAP1 tensors.
    Extract(ExtractArgs),
    /// Compute losses between predicted and ground-truth tensors.
    Loss(LossArgs),
    /// Rectangle-metric evaluation of predicted grasps.
    Eval(EvalArgs),
    /// Planar jaw-collision check of predicted grasps against object masks.
    Oracle(OracleArgs),
    /// Write a seeded synthetic corpus of annotated scenes.
    Synth(SynthArgs),
    /// Render tensor channels as PNG heatmaps.
    Viz(VizArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Binary,
    Soft,
    Strong,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SoftRuleArg {
    Floor,
    LiteralMin,
}

#[derive(Debug, Clone, Args, Default)]
pub struct MapArgs {
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Gaussian sigma in pixels.
    #[arg(long)]
    pub sigma: Option<f64>,
    /// Number of angle bins.
    #[arg(long)]
    pub bins: Option<usize>,
    /// Maximum gripper opening in pixels (width channel normaliser).
    #[arg(long)]
    pub wmax: Option<f64>,
    #[arg(long)]
    pub soft_floor: Option<f64>,
    #[arg(long, value_enum)]
    pub soft_rule: Option<SoftRuleArg>,
}

#[derive(Debug, Clone, Args, Default)]
pub struct GripperArgs {
    #[arg(long)]
    pub jaw_thickness: Option<f64>,
    #[arg(long)]
    pub jaw_length: Option<f64>,
    /// Smallest opening the gripper can grasp with, in pixels.
    #[arg(long)]
    pub grip_min: Option<f64>,
    /// Largest gripper opening, in pixels.
    #[arg(long)]
    pub grip_max: Option<f64>,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Directory of scene directories.
    #[arg(long)]
    pub scenes: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub map: MapArgs,
    /// Also write a quality heatmap PNG per bin.
    #[arg(long)]
    pub heatmaps: bool,
    #[arg(long, default_value = "heat")]
    pub colormap: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Strategy {
    /// Global quality maximum over all bins.
    Argmax,
    /// Uniformly random (bin, pixel) among positive-quality pixels.
    RandomSupport,
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    /// Directory of `.gmap` tensors.
    #[arg(long)]
    pub maps: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub wmax: Option<f64>,
    #[arg(long, value_enum, default_value = "argmax")]
    pub strategy: Strategy,
    /// Gaussian blur applied to Q before decoding (0 = off).
    #[arg(long, default_value_t = 0.0)]
    pub smooth_sigma: f64,
    /// Number of grasps per scene (greedy suppression when > 1).
    #[arg(long, default_value_t = 1)]
    pub top_k: usize,
    #[arg(long, default_value_t = 0.0)]
    pub min_separation: f64,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Mse,
    SmoothL1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReductionArg {
    Mean,
    Sum,
}

#[derive(Debug, Args)]
pub struct LossArgs {
    /// Directory of predicted `.gmap` tensors.
    #[arg(long)]
    pub pred: PathBuf,
    /// Directory of ground-truth `.gmap` tensors.
    #[arg(long)]
    pub gt: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "mse")]
    pub kind: KindArg,
    /// Weight angle and width terms by ground-truth quality.
    #[arg(long)]
    pub positional: bool,
    #[arg(long, value_enum, default_value = "mean")]
    pub reduction: ReductionArg,
    /// Also write per-scene gradient tensors.
    #[arg(long)]
    pub write_grad: bool,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub scenes: PathBuf,
    /// Directory of per-scene prediction files (`<scene_id>.txt`).
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Comma-separated IoU thresholds in (0, 1); empty for none.
    #[arg(long)]
    pub thresholds: Option<String>,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long)]
    pub scenes: PathBuf,
    #[arg(long)]
    pub pred: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub gripper: GripperArgs,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Number of scenes.
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Image side in pixels.
    #[arg(long, default_value_t = 96)]
    pub size: usize,
    #[command(flatten)]
    pub gripper: GripperArgs,
}

#[derive(Debug, Args)]
pub struct VizArgs {
    #[arg(long)]
    pub maps: PathBuf,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value = "q")]
    pub channel: String,
    #[arg(long, default_value = "heat")]
    pub colormap: String,
}
