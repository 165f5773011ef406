use std::path::{Path, PathBuf};

use model::ModelConfig;
use serde::{Deserialize, Serialize};
use synth_data::{SpoofGeneratorConfig, SubsetSizes, DEFAULT_BONAFIDE_FRAC};
use training::{LossConfig, TrainConfig};

use crate::error::EvalError;

/// Corpus generation knobs.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DataConfig {
    /// Seed of the corpus generator; independent of the training seed.
    pub seed: u64,
    pub sizes: SubsetSizes,
    pub bonafide_frac: f64,
    pub spoof: SpoofGeneratorConfig,
}

impl Default for DataConfig {
    fn default() -> Self {
        DataConfig {
            seed: 100,
            sizes: SubsetSizes {
                train: 400,
                dev: 100,
                eval: 200,
            },
            bonafide_frac: DEFAULT_BONAFIDE_FRAC,
            spoof: SpoofGeneratorConfig::default(),
        }
    }
}

/// Everything one run needs, written back next to the outputs so a
/// result directory is self-describing. Partial files work: absent
/// sections and fields keep their defaults, unknown keys are rejected.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub data: DataConfig,
    pub model: ModelConfig,
    pub loss: LossConfig,
    pub train: TrainConfig,
}

impl RunConfig {
    /// Reads and validates a TOML file; `None` gives the defaults.
    pub fn load(path: Option<&Path>) -> Result<RunConfig, EvalError> {
        let cfg = match path {
            None => RunConfig::default(),
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| EvalError::Config {
                    detail: format!("cannot read {}: {e}", p.display()),
                })?;
                toml::from_str(&text).map_err(|e| EvalError::Config {
                    detail: format!("{}: {e}", p.display()),
                })?
            }
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), EvalError> {
        self.model.validate()?;
        self.loss.validate()?;
        self.train.validate()?;
        self.data.spoof.validate()?;
        if !(0.0..=1.0).contains(&self.data.bonafide_frac) {
            return Err(EvalError::Config {
                detail: format!("bonafide_frac {} outside [0,1]", self.data.bonafide_frac),
            });
        }
        Ok(())
    }

    pub fn to_toml(&self) -> Result<String, EvalError> {
        toml::to_string_pretty(self).map_err(|e| EvalError::Config {
            detail: format!("config serialization failed: {e}"),
        })
    }

    /// Writes the fully resolved configuration into `dir` and returns
    /// the file's path.
    pub fn write_resolved(&self, dir: &Path) -> Result<PathBuf, EvalError> {
        let path = dir.join("resolved_config.toml");
        std::fs::write(&path, self.to_toml()?).map_err(|e| EvalError::Io {
            path: path.display().to_string(),
            source: e,
        })?;
        Ok(path)
    }

    /// FNV-1a over the canonical TOML text, so equal configurations
    /// hash equally no matter where they came from.
    pub fn hash(&self) -> Result<String, EvalError> {
        Ok(format!("{:016x}", fnv1a64(self.to_toml()?.as_bytes())))
    }
}

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

// ----------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate_and_roundtrip() {
        let cfg = RunConfig::default();
        cfg.validate().unwrap();
        let text = cfg.to_toml().unwrap();
        let back: RunConfig = toml::from_str(&text).unwrap();
        assert_eq!(back.to_toml().unwrap(), text);
    }

    #[test]
    fn partial_toml_keeps_defaults_elsewhere() {
        let cfg: RunConfig = toml::from_str("[train]\nlr = 0.001\n").unwrap();
        assert_eq!(cfg.train.lr, 0.001);
        assert_eq!(cfg.train.batch_size, TrainConfig::default().batch_size);
        assert_eq!(cfg.model, ModelConfig::default());
        assert_eq!(cfg.data.sizes.train, 400);
    }

    #[test]
    fn unknown_keys_are_rejected_at_every_level() {
        assert!(toml::from_str::<RunConfig>("banana = 1\n").is_err());
        assert!(toml::from_str::<RunConfig>("[train]\nbanana = 1\n").is_err());
        assert!(toml::from_str::<RunConfig>("[model]\nbanana = 1\n").is_err());
        assert!(toml::from_str::<RunConfig>("[data.spoof]\nbanana = 1\n").is_err());
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        let a = RunConfig::default().hash().unwrap();
        let b = RunConfig::default().hash().unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 16);

        let mut changed = RunConfig::default();
        changed.train.lr *= 2.0;
        assert_ne!(changed.hash().unwrap(), a);
    }

    #[test]
    fn fnv_matches_known_vectors() {
        assert_eq!(fnv1a64(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a64(b"a"), 0xaf63dc4c8601ec8c);
        assert_eq!(fnv1a64(b"foobar"), 0x85944171f73967e8);
    }
}
