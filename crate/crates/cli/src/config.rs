//! Experiment configuration: JSON schema, built-in profiles, validation,
//! and content hashing.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use emcomm::agents::AgentConfig;
use emcomm::data::ObjectSpace;
use emcomm::game::ReconstructionConfig;

/// Full experiment configuration. Unknown keys are rejected so typos fail
/// loudly instead of silently running defaults.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub space: SpaceSection,
    pub channel: ChannelSection,
    pub model: ModelSection,
    pub optim: OptimSection,
    pub experts: ExpertSection,
    pub imitation: ImitationSection,
    /// Seed for the data split.
    pub data_seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSection {
    pub n_att: usize,
    pub n_val: usize,
    pub held_out_value: u16,
    pub train_fraction: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSection {
    pub vocab: usize,
    pub msg_len: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub d_hidden: usize,
    pub d_embed: usize,
    #[serde(default = "default_init_scale")]
    pub init_scale: f64,
}

fn default_init_scale() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimSection {
    pub lr: f64,
    pub batch_size: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpertSection {
    pub count: usize,
    pub epochs: usize,
    pub lambda: f64,
    pub base_seed: u64,
}

/// Imitation defaults per role and algorithm; command-line flags override.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ImitationSection {
    pub epochs_sender_sv: usize,
    pub epochs_sender_rf: usize,
    pub epochs_receiver_sv: usize,
    pub epochs_receiver_rf: usize,
    pub lr: f64,
    pub batch_size: usize,
}

/// Entropy coefficients explored by the experiments; configs outside the
/// studied range are rejected.
pub const LAMBDA_GRID: [f64; 5] = [0.0, 0.01, 0.1, 0.5, 1.0];

impl ExperimentConfig {
    /// Desk-scale profile: the full pipeline runs in minutes while keeping
    /// the attribute-value structure intact.
    pub fn desk() -> Self {
        Self {
            space: SpaceSection {
                n_att: 3,
                n_val: 6,
                held_out_value: 5,
                train_fraction: 0.5,
            },
            channel: ChannelSection {
                vocab: 6,
                msg_len: 6,
            },
            model: ModelSection {
                d_hidden: 64,
                d_embed: 64,
                init_scale: 1.0,
            },
            optim: OptimSection {
                lr: 0.005,
                batch_size: 16,
            },
            experts: ExpertSection {
                count: 12,
                epochs: 500,
                lambda: 0.3,
                base_seed: 100,
            },
            imitation: ImitationSection {
                epochs_sender_sv: 300,
                epochs_sender_rf: 800,
                epochs_receiver_sv: 400,
                epochs_receiver_rf: 1000,
                lr: 0.005,
                batch_size: 16,
            },
            data_seed: 1,
        }
    }

    /// Paper-scale profile. Long-running: expert pretraining alone covers a
    /// 531441-object space for 1000 epochs; budget hours, not minutes.
    pub fn paper() -> Self {
        Self {
            space: SpaceSection {
                n_att: 6,
                n_val: 10,
                held_out_value: 9,
                train_fraction: 0.01,
            },
            channel: ChannelSection {
                vocab: 10,
                msg_len: 10,
            },
            model: ModelSection {
                d_hidden: 128,
                d_embed: 128,
                init_scale: 1.0,
            },
            optim: OptimSection {
                lr: 0.005,
                batch_size: 1024,
            },
            experts: ExpertSection {
                count: 30,
                epochs: 1000,
                lambda: 0.1,
                base_seed: 100,
            },
            imitation: ImitationSection {
                epochs_sender_sv: 500,
                epochs_sender_rf: 2000,
                epochs_receiver_sv: 7000,
                epochs_receiver_rf: 7000,
                lr: 0.005,
                batch_size: 1024,
            },
            data_seed: 1,
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let cfg: ExperimentConfig =
            serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.space.n_val < 2 {
            bail!("space.n_val must be >= 2 (one value is held out)");
        }
        if self.space.held_out_value as usize >= self.space.n_val {
            bail!("space.held_out_value out of range");
        }
        if !(0.0 < self.space.train_fraction && self.space.train_fraction <= 1.0) {
            bail!("space.train_fraction must be in (0, 1]");
        }
        if self.channel.vocab < 2 || self.channel.msg_len < 1 {
            bail!("channel needs vocab >= 2 and msg_len >= 1");
        }
        if self.optim.lr <= 0.0 || self.imitation.lr <= 0.0 {
            bail!("learning rates must be positive");
        }
        if self.optim.batch_size == 0 || self.imitation.batch_size == 0 {
            bail!("batch sizes must be >= 1");
        }
        if self.experts.count == 0 {
            bail!("experts.count must be >= 1");
        }
        validate_lambda(self.experts.lambda)?;
        Ok(())
    }

    pub fn object_space(&self) -> Result<ObjectSpace> {
        Ok(ObjectSpace::new(
            self.space.n_att,
            self.space.n_val,
            self.space.held_out_value,
        )?)
    }

    pub fn agent_config(&self) -> AgentConfig {
        AgentConfig {
            n_att: self.space.n_att,
            n_val: self.space.n_val,
            vocab: self.channel.vocab,
            msg_len: self.channel.msg_len,
            d_hidden: self.model.d_hidden,
            d_embed: self.model.d_embed,
            init_scale: self.model.init_scale,
        }
    }

    pub fn reconstruction_config(&self) -> Result<ReconstructionConfig> {
        Ok(ReconstructionConfig {
            agent: self.agent_config(),
            space: self.object_space()?,
            lambda: self.experts.lambda,
            lr: self.optim.lr,
            batch_size: self.optim.batch_size,
            epochs: self.experts.epochs,
            seed: self.data_seed,
        })
    }

    /// Hash of the full resolved configuration.
    pub fn config_hash(&self) -> String {
        hash_json(self)
    }

    /// Hash of the parts that pin the data split and expert pool; imitation
    /// runs with different k / lambda / seeds still share it.
    pub fn setup_hash(&self) -> String {
        #[derive(Serialize)]
        struct Setup<'a> {
            space: &'a SpaceSection,
            channel: &'a ChannelSection,
            model: &'a ModelSection,
            optim: &'a OptimSection,
            experts: &'a ExpertSection,
            data_seed: u64,
        }
        hash_json(&Setup {
            space: &self.space,
            channel: &self.channel,
            model: &self.model,
            optim: &self.optim,
            experts: &self.experts,
            data_seed: self.data_seed,
        })
    }
}

/// Entropy coefficients must come from the studied grid's range.
pub fn validate_lambda(lambda: f64) -> Result<()> {
    let max = LAMBDA_GRID[LAMBDA_GRID.len() - 1];
    if !(0.0..=max).contains(&lambda) {
        bail!("lambda {lambda} outside the studied range [0, {max}]");
    }
    Ok(())
}

pub fn hash_json<T: Serialize>(value: &T) -> String {
    let json = serde_json::to_string(value).expect("config serializes");
    let digest = Sha256::digest(json.as_bytes());
    digest[..6].iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profiles_validate() {
        ExperimentConfig::desk().validate().unwrap();
        ExperimentConfig::paper().validate().unwrap();
    }

    #[test]
    fn unknown_keys_rejected() {
        let mut json = serde_json::to_value(ExperimentConfig::desk()).unwrap();
        json["space"]["typo_field"] = 1.into();
        let parsed: std::result::Result<ExperimentConfig, _> = serde_json::from_value(json);
        assert!(parsed.is_err());
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        let a = ExperimentConfig::desk();
        let mut b = ExperimentConfig::desk();
        assert_eq!(a.config_hash(), b.config_hash());
        b.experts.lambda = 0.5;
        assert_ne!(a.config_hash(), b.config_hash());
        // Setup hash covers expert settings too.
        assert_ne!(a.setup_hash(), b.setup_hash());
    }

    #[test]
    fn lambda_range_enforced() {
        assert!(validate_lambda(0.0).is_ok());
        assert!(validate_lambda(1.0).is_ok());
        assert!(validate_lambda(1.5).is_err());
        assert!(validate_lambda(-0.1).is_err());
    }
}
