use std::path::Path;

use anyhow::{Context, Result};
use histnero::corpus::SplitSpec;
use histnero::model::TaggerConfig;
use histnero::training::TrainConfig;
use serde::{Deserialize, Serialize};

use crate::args::TrainFlags;

/// Everything a run can be configured with. Loaded from the `--config` file,
/// then overridden by flags.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub train: TrainConfig,
    pub model: TaggerConfig,
    pub split: SplitSpec,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        toml::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn apply(&mut self, f: &TrainFlags) {
        let t = &mut self.train;
        if let Some(v) = f.mode {
            t.mode = v;
        }
        if let Some(v) = f.lambda {
            t.lambda = v;
        }
        if let Some(v) = f.epochs {
            t.epochs = v;
        }
        if let Some(v) = f.lr {
            t.lr = v;
        }
        if let Some(v) = f.batch {
            t.batch_size = v;
        }
        if let Some(v) = f.clip {
            t.clip_norm = v;
        }
        if let Some(v) = f.weight_decay {
            t.weight_decay = v;
        }
        let m = &mut self.model;
        if let Some(v) = f.vocab_size {
            m.vocab_size = v;
        }
        if let Some(v) = f.embed_dim {
            m.embed_dim = v;
        }
        if let Some(v) = f.hidden_dim {
            m.hidden_dim = v;
        }
        if let Some(v) = f.window {
            m.context_window = v;
        }
        if let Some(seed) = f.seed {
            self.set_seed(seed);
        }
    }

    /// One seed drives initialization, shuffling and splitting.
    pub fn set_seed(&mut self, seed: u64) {
        self.train.seed = seed;
        self.model.seed = seed;
        self.split.seed = seed;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use histnero::training::Mode;

    #[test]
    fn flags_override_file() {
        let mut cfg: RunConfig = toml::from_str(
            "[train]\nmode = \"grad_rev\"\nepochs = 3\nlambda = 0.5\n[model]\nhidden_dim = 16\n",
        )
        .unwrap();
        assert_eq!(cfg.train.mode, Mode::GradRev);
        assert_eq!(cfg.train.lr, TrainConfig::default().lr);
        cfg.apply(&TrainFlags {
            mode: Some(Mode::LossRev),
            epochs: Some(7),
            seed: Some(9),
            ..TrainFlags::default()
        });
        assert_eq!(cfg.train.mode, Mode::LossRev);
        assert_eq!(cfg.train.epochs, 7);
        assert_eq!(cfg.train.lambda, 0.5);
        assert_eq!(cfg.model.hidden_dim, 16);
        assert_eq!((cfg.train.seed, cfg.model.seed, cfg.split.seed), (9, 9, 9));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(toml::from_str::<RunConfig>("[train]\nlearning_rate = 1.0\n").is_err());
        assert!(toml::from_str::<RunConfig>("[optimizer]\n").is_err());
    }
}
