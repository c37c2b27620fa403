use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use shs_core::centrality::accuracy;
use shs_core::gnn::{predict_ranked, train, TrainConfig};

use crate::dataset::PreparedDataset;
use crate::error::{BenchError, Result};
use crate::report::TableRow;
use crate::timing::timed;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    Layers,
    Hidden,
}

impl SweepAxis {
    pub fn values(self) -> Vec<usize> {
        match self {
            SweepAxis::Layers => (1..=6).collect(),
            SweepAxis::Hidden => vec![16, 32, 64, 128, 256],
        }
    }

    fn apply(self, base: &TrainConfig, value: usize) -> TrainConfig {
        match self {
            SweepAxis::Layers => TrainConfig {
                layers: value,
                ..base.clone()
            },
            SweepAxis::Hidden => TrainConfig {
                hidden: value,
                ..base.clone()
            },
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SweepAxis::Layers => "layers",
            SweepAxis::Hidden => "hidden",
        })
    }
}

impl FromStr for SweepAxis {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "layers" => Ok(SweepAxis::Layers),
            "hidden" => Ok(SweepAxis::Hidden),
            other => Err(BenchError::config(format!(
                "unknown sweep axis {other:?} (expected layers or hidden)"
            ))),
        }
    }
}

/// One model of a sweep, with every hyperparameter it was trained with.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis: SweepAxis,
    pub value: usize,
    pub layers: usize,
    pub hidden: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    pub weight_decay: f64,
    pub seed: u64,
    pub k_percent: f64,
    /// Means over the test datasets.
    pub accuracy: f64,
    pub overlap: f64,
    pub train_seconds: f64,
}

impl TableRow for SweepRow {
    fn titles() -> Vec<&'static str> {
        vec![
            "Axis",
            "Value",
            "Layers",
            "Hidden",
            "Epochs",
            "LR",
            "Weight decay",
            "Seed",
            "Top-k (%)",
            "Accuracy (%)",
            "Overlap (%)",
            "Train (s)",
        ]
    }

    fn cells(&self) -> Vec<String> {
        vec![
            self.axis.to_string(),
            self.value.to_string(),
            self.layers.to_string(),
            self.hidden.to_string(),
            self.epochs.to_string(),
            self.learning_rate.to_string(),
            self.weight_decay.to_string(),
            self.seed.to_string(),
            self.k_percent.to_string(),
            format!("{:.2}", 100.0 * self.accuracy),
            format!("{:.2}", 100.0 * self.overlap),
            format!("{:.2}", self.train_seconds),
        ]
    }
}

/// Trains one model per axis value (same seed and other hyperparameters) and
/// reports the mean top-k accuracy over the test datasets.
pub fn run_sensitivity_sweep(
    train_data: &PreparedDataset,
    tests: &[PreparedDataset],
    base: &TrainConfig,
    axis: SweepAxis,
    k_percent: f64,
) -> Result<Vec<SweepRow>> {
    if tests.is_empty() {
        return Err(BenchError::config("the sweep needs at least one test dataset"));
    }
    let labels = train_data.labels_for(k_percent)?;
    axis.values()
        .into_iter()
        .map(|value| {
            let config = axis.apply(base, value);
            let (outcome, train_seconds) = timed(|| {
                train(
                    &train_data.graph,
                    train_data.features.normalized().view(),
                    &labels.labels,
                    &config,
                )
            })?;
            let mut acc = 0.0;
            let mut overlap = 0.0;
            for test in tests {
                let prediction = predict_ranked(
                    &outcome.params,
                    &test.graph,
                    test.features.normalized().view(),
                    k_percent,
                )?;
                let metrics = accuracy(&prediction.labels.labels, &test.labels_for(k_percent)?.labels)?;
                acc += metrics.accuracy;
                overlap += metrics.overlap;
            }
            let count = tests.len() as f64;
            Ok(SweepRow {
                axis,
                value,
                layers: config.layers,
                hidden: config.hidden,
                epochs: config.epochs,
                learning_rate: config.learning_rate,
                weight_decay: config.weight_decay,
                seed: config.seed,
                k_percent,
                accuracy: acc / count,
                overlap: overlap / count,
                train_seconds,
            })
        })
        .collect()
}
