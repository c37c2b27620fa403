use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use shs_core::gnn::TrainConfig;
use shs_core::graph::{GeneratorSpec, GrpParams, SfParams};

use crate::commands::UsageError;

#[derive(Debug, Parser)]
#[command(
    name = "shs",
    version,
    about = "Structural hole spanner discovery: exact ground truth, GraphSHS, Meta-GraphSHS and benchmarks"
)]
pub struct Cli {
    /// Seed for every random choice (graphs, splits, initialization, deletions).
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,

    /// Use the original experiment sizes instead of the desk-scale defaults.
    #[arg(long, global = true)]
    pub paper_scale: bool,

    /// Repeat every timed section three times and report the fastest run.
    #[arg(long, global = true)]
    pub timing_strict: bool,

    /// Compute betweenness on graphs above the node cap.
    #[arg(long, global = true)]
    pub force: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic graph and write it as an edge list.
    Generate(GenerateArgs),
    /// Compute ground truth, labels and features for a graph.
    Prepare(PrepareArgs),
    /// Train GraphSHS on a prepared dataset.
    Train(TrainArgs),
    /// Meta-train Meta-GraphSHS on a task manifest.
    TrainMeta(TrainMetaArgs),
    /// Evaluate a checkpoint on a prepared dataset.
    Eval(EvalArgs),
    /// Accuracy and runtime benchmark against the baselines.
    Bench(BenchArgs),
    /// Meta-learning benchmark on a mixed ER/SF/GRP task corpus.
    BenchMeta(BenchMetaArgs),
    /// Repeated edge deletions: incremental GraphSHS versus full recomputation.
    Dynamic(DynamicArgs),
    /// Accuracy as a function of depth or embedding width.
    Sweep(SweepArgs),
    /// Convert a report between csv, json and markdown.
    Report(ReportArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    Er,
    Sf,
    Grp,
}

#[derive(Debug, Args)]
pub struct GeneratorArgs {
    #[arg(long, value_enum, default_value = "sf")]
    pub family: FamilyArg,
    /// Node count [default: 1000, or 5000 with --paper-scale].
    #[arg(long)]
    pub nodes: Option<usize>,
    /// ER edge probability.
    #[arg(long, default_value_t = 0.001)]
    pub p: f64,
    #[arg(long, default_value_t = SfParams::default().alpha)]
    pub alpha: f64,
    #[arg(long, default_value_t = SfParams::default().beta)]
    pub beta: f64,
    #[arg(long, default_value_t = SfParams::default().gamma)]
    pub gamma: f64,
    #[arg(long, default_value_t = GrpParams::default().mean_size)]
    pub mean_size: f64,
    #[arg(long, default_value_t = GrpParams::default().shape)]
    pub shape: f64,
    #[arg(long, default_value_t = GrpParams::default().p_in)]
    pub p_in: f64,
    #[arg(long, default_value_t = GrpParams::default().p_out)]
    pub p_out: f64,
}

impl GeneratorArgs {
    pub fn spec(&self, default_nodes: usize, seed: u64) -> GeneratorSpec {
        let n = self.nodes.unwrap_or(default_nodes);
        match self.family {
            FamilyArg::Er => GeneratorSpec::Er { n, p: self.p, seed },
            FamilyArg::Sf => GeneratorSpec::Sf {
                n,
                params: SfParams {
                    alpha: self.alpha,
                    beta: self.beta,
                    gamma: self.gamma,
                },
                seed,
            },
            FamilyArg::Grp => GeneratorSpec::Grp {
                n,
                params: GrpParams {
                    mean_size: self.mean_size,
                    shape: self.shape,
                    p_in: self.p_in,
                    p_out: self.p_out,
                },
                seed,
            },
        }
    }
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub generator: GeneratorArgs,
}

#[derive(Debug, Args)]
pub struct PrepareArgs {
    /// Edge-list file to prepare instead of generating a graph.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Dataset id [default: derived from the generator or file name].
    #[arg(long)]
    pub id: Option<String>,
    /// Comma-separated top-k percentages to label.
    #[arg(long, default_value = "5,10,20")]
    pub k: String,
    /// Node cap above which betweenness needs --force.
    #[arg(long, default_value_t = shs_bench::DEFAULT_NODE_CAP)]
    pub node_cap: usize,
    #[command(flatten)]
    pub generator: GeneratorArgs,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[arg(long, default_value_t = TrainConfig::default().epochs)]
    pub epochs: usize,
    #[arg(long, default_value_t = TrainConfig::default().learning_rate)]
    pub learning_rate: f64,
    #[arg(long, default_value_t = TrainConfig::default().weight_decay)]
    pub weight_decay: f64,
    #[arg(long, default_value_t = TrainConfig::default().layers)]
    pub layers: usize,
    #[arg(long, default_value_t = TrainConfig::default().hidden)]
    pub hidden: usize,
}

impl ModelArgs {
    /// The model configuration; invalid values are usage errors.
    pub fn config(&self, seed: u64) -> anyhow::Result<TrainConfig> {
        let config = TrainConfig {
            epochs: self.epochs,
            learning_rate: self.learning_rate,
            weight_decay: self.weight_decay,
            layers: self.layers,
            hidden: self.hidden,
            seed,
            ..TrainConfig::default()
        };
        config.validate().map_err(|e| UsageError(e.to_string()))?;
        Ok(config)
    }
}

#[derive(Debug, Args)]
pub struct MetaArgs {
    /// Inner (adaptation and fine-tuning) learning rate.
    #[arg(long, default_value_t = 0.1)]
    pub inner_lr: f64,
    /// Outer learning rate.
    #[arg(long, default_value_t = 0.001)]
    pub meta_lr: f64,
    #[arg(long, default_value_t = 1)]
    pub inner_steps: usize,
    #[arg(long, default_value_t = 200)]
    pub meta_epochs: usize,
    /// Meta-epochs without improvement before stopping.
    #[arg(long, default_value_t = 20)]
    pub patience: usize,
    #[arg(long, default_value_t = 10)]
    pub fine_tune_steps: usize,
}

impl MetaArgs {
    /// The meta-learning configuration; invalid values are usage errors.
    pub fn config(&self, seed: u64) -> anyhow::Result<shs_core::meta::MetaConfig> {
        let config = shs_core::meta::MetaConfig {
            inner_lr: self.inner_lr,
            meta_lr: self.meta_lr,
            inner_steps: self.inner_steps,
            meta_epochs: self.meta_epochs,
            patience: self.patience,
            fine_tune_steps: self.fine_tune_steps,
            seed,
            ..shs_core::meta::MetaConfig::default()
        };
        config.validate().map_err(|e| UsageError(e.to_string()))?;
        Ok(config)
    }
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Prepared dataset directory.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value_t = 5.0)]
    pub k: f64,
    #[command(flatten)]
    pub model: ModelArgs,
}

#[derive(Debug, Args)]
pub struct TrainMetaArgs {
    /// Task manifest; without it a corpus is generated into <out>/tasks.
    #[arg(long)]
    pub tasks: Option<PathBuf>,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub meta: MetaArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Ranked,
    Argmax,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Checkpoint file.
    #[arg(long)]
    pub model: PathBuf,
    /// Prepared dataset directory.
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long, default_value_t = 5.0)]
    pub k: f64,
    #[arg(long, value_enum, default_value = "ranked")]
    pub mode: ModeArg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OrderArg {
    Ascending,
    Descending,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Graph family for training and test graphs.
    #[arg(long, default_value = "sf")]
    pub family: String,
    #[arg(long, default_value = "5,10,20")]
    pub k: String,
    /// Comma-separated subset of graphshs, constraint, closeness, brandes.
    #[arg(long, default_value = "graphshs,constraint,closeness,brandes")]
    pub methods: String,
    /// Comma-separated test graph sizes [default: 1000,1000,1000, or the
    /// original 5000,10000,20000,50000 with --paper-scale].
    #[arg(long)]
    pub test_nodes: Option<String>,
    /// Training graph size [default: 1000, or 5000 with --paper-scale].
    #[arg(long)]
    pub train_nodes: Option<usize>,
    /// Count feature extraction as GraphSHS inference time.
    #[arg(long)]
    pub include_features: bool,
    /// Constraint ranking direction for the constraint baseline.
    #[arg(long, value_enum, default_value = "ascending")]
    pub constraint_order: OrderArg,
    #[arg(long, default_value_t = 1)]
    pub repeat: usize,
    #[arg(long, default_value_t = shs_bench::DEFAULT_NODE_CAP)]
    pub node_cap: usize,
    #[command(flatten)]
    pub model: ModelArgs,
}

#[derive(Debug, Args)]
pub struct BenchMetaArgs {
    /// Comma-separated seeds, one corpus and split per seed [default: --seed .. --seed+4].
    #[arg(long)]
    pub seeds: Option<String>,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub meta: MetaArgs,
}

#[derive(Debug, Args)]
pub struct DynamicArgs {
    #[arg(long, default_value_t = 5000)]
    pub nodes: usize,
    #[arg(long, default_value_t = 100)]
    pub deletions: usize,
    #[arg(long, default_value_t = 5.0)]
    pub k: f64,
    /// GraphSHS checkpoint; without it a model is trained on a fresh SF graph.
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[command(flatten)]
    pub model_args: ModelArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AxisArg {
    Layers,
    Hidden,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long, value_enum, default_value = "layers")]
    pub axis: AxisArg,
    #[arg(long, default_value_t = 5.0)]
    pub k: f64,
    #[command(flatten)]
    pub model: ModelArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
    Markdown,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Report written by bench or bench-meta (csv or json).
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value = "markdown")]
    pub format: FormatArg,
    /// Destination file; printed to stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
}
