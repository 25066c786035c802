//! Training and evaluation of the tagger.
//!
//! Three modes share one forward pass:
//!
//! - `baseline`: only the NER loss `L_y` is backpropagated.
//! - `grad_rev`: `L_y + L_d` is backpropagated, with the discriminator reading
//!   `scale_gradient(h, -λ)`. D itself trains normally; F receives reversed,
//!   λ-scaled discriminator gradients.
//! - `loss_rev`: the single scalar `L_y - λ·L_d` is backpropagated everywhere,
//!   so D's own gradients are reversed and scaled too.
//!
//! Both losses are means over tokens. `L_y` only covers tokens of labeled
//! sentences; `L_d` covers every token, each supervised with its sentence's
//! region.

mod embeddings;
mod evaluate;
mod inter_regional;
mod losses;
mod optim;
mod probe;
mod train;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Region;
use crate::metrics::MetricsError;
use crate::model::ModelError;

pub use embeddings::{sentence_embeddings, write_embeddings_tsv};
pub use evaluate::{evaluate, evaluate_predictions, predict_corpus, EvalReport, Prediction, Scores};
pub use inter_regional::{inter_regional, RegionMatrix};
pub use losses::{compute_losses, examples_from_corpus, Example, LossBreakdown};
pub use optim::{clip_gradients, global_norm, AdamState};
pub use probe::{domain_accuracy, fit_domain_probe, ProbeConfig};
pub use train::{train, EpochRecord, TrainData, TrainOutcome};

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("invalid training config: {0}")]
    Config(String),
    #[error("{0} set is empty")]
    EmptySubset(&'static str),
    #[error("region {region} has no {subset} sentences")]
    EmptyRegion { region: Region, subset: &'static str },
    #[error("non-finite value during {context}")]
    NonFinite { context: String },
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Baseline,
    GradRev,
    LossRev,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Baseline, Mode::GradRev, Mode::LossRev];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Baseline => "baseline",
            Mode::GradRev => "grad_rev",
            Mode::LossRev => "loss_rev",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = TrainError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Mode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| TrainError::Config(format!("unknown mode `{s}` (baseline, grad_rev, loss_rev)")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub mode: Mode,
    pub epochs: usize,
    pub lr: f64,
    pub weight_decay: f64,
    pub batch_size: usize,
    pub clip_norm: f64,
    /// Ignored in baseline mode.
    pub lambda: f64,
    /// Seeds the per-epoch shuffling.
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            mode: Mode::Baseline,
            epochs: 15,
            lr: 1e-3,
            weight_decay: 0.01,
            batch_size: 32,
            clip_norm: 2.0,
            lambda: 0.1,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), TrainError> {
        let bad = |m: &str| Err(TrainError::Config(m.to_string()));
        if self.epochs == 0 {
            return bad("epochs must be at least 1");
        }
        if self.batch_size == 0 {
            return bad("batch_size must be at least 1");
        }
        if !(self.lr.is_finite() && self.lr > 0.0) {
            return bad("lr must be positive");
        }
        if !(self.weight_decay.is_finite() && self.weight_decay >= 0.0) {
            return bad("weight_decay must be non-negative");
        }
        if !(self.clip_norm.is_finite() && self.clip_norm > 0.0) {
            return bad("clip_norm must be positive");
        }
        if !(self.lambda.is_finite() && self.lambda >= 0.0) {
            return bad("lambda must be non-negative");
        }
        Ok(())
    }

    /// λ as used by the mode (0 for baseline).
    pub fn effective_lambda(&self) -> f64 {
        match self.mode {
            Mode::Baseline => 0.0,
            Mode::GradRev | Mode::LossRev => self.lambda,
        }
    }
}
