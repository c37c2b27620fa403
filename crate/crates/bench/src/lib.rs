//! Experiment harness for structural-hole-spanner discovery: dataset
//! preparation, the static and meta-learning benchmarks, the dynamic
//! edge-deletion experiment, sensitivity sweeps, and report emission.

pub mod config;
pub mod dataset;
pub mod dynamic;
pub mod error;
pub mod manifest;
pub mod meta_bench;
pub mod report;
pub mod static_bench;
pub mod sweep;
pub mod timing;

pub use config::{DatasetSpec, ExperimentConfig, Family, Method, Scale, DEFAULT_NODE_CAP};
pub use dataset::{load_dataset, prepare_dataset, write_dataset, DatasetManifest, PrepareOptions, PreparedDataset};
pub use dynamic::{run_dynamic_experiment, DynamicConfig, DynamicReport, DynamicStep};
pub use error::{BenchError, Result};
pub use meta_bench::{run_meta_benchmark, MetaBenchConfig, MetaBenchOutcome, MethodSummary};
pub use report::{emit_report, ReportFormat, ReportRow};
pub use static_bench::{run_static_benchmark, StaticOutcome, TrainedModel, MAJORITY};
pub use sweep::{run_sensitivity_sweep, SweepAxis, SweepRow};
