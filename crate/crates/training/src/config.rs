use serde::{Deserialize, Serialize};

use crate::error::TrainError;

/// Mixing weights of the objective: reconstruction, KL and weighted
/// cross entropy, plus the class weight that counters the corpus
/// imbalance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LossConfig {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    /// Cross-entropy weight of bonafide trials; spoof trials get the
    /// complement.
    pub ce_weight_bonafide: f64,
}

impl Default for LossConfig {
    fn default() -> Self {
        LossConfig {
            alpha: 0.95,
            beta: 0.05,
            gamma: 1.0,
            ce_weight_bonafide: 0.9,
        }
    }
}

impl LossConfig {
    pub fn validate(&self) -> Result<(), TrainError> {
        let bad = |detail: String| Err(TrainError::Config { detail });
        for (name, v) in [("alpha", self.alpha), ("beta", self.beta), ("gamma", self.gamma)] {
            if !v.is_finite() || v < 0.0 {
                return bad(format!("{name} = {v} must be finite and nonnegative"));
            }
        }
        if self.alpha + self.beta + self.gamma == 0.0 {
            return bad("all loss weights are zero, nothing to optimize".into());
        }
        if !self.ce_weight_bonafide.is_finite()
            || self.ce_weight_bonafide <= 0.0
            || self.ce_weight_bonafide >= 1.0
        {
            return bad(format!(
                "ce_weight_bonafide = {} must lie strictly inside (0, 1)",
                self.ce_weight_bonafide
            ));
        }
        Ok(())
    }

    pub fn spoof_weight(&self) -> f64 {
        1.0 - self.ce_weight_bonafide
    }
}

/// Optimizer and schedule knobs. Epochs count from 1; the first
/// `warmup_epochs` of them optimize reconstruction alone with the
/// backbone unfrozen, the rest train adapters and heads on the frozen
/// backbone.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainConfig {
    pub lr: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub warmup_epochs: usize,
    pub seed: u64,
    /// Apply waveform augmentation to training clips.
    pub augment: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            lr: 3e-5,
            batch_size: 8,
            epochs: 50,
            warmup_epochs: 5,
            seed: 0,
            augment: false,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), TrainError> {
        let bad = |detail: String| Err(TrainError::Config { detail });
        if !self.lr.is_finite() || self.lr <= 0.0 {
            return bad(format!("lr = {} must be finite and positive", self.lr));
        }
        if self.batch_size == 0 {
            return bad("batch_size must be nonzero".into());
        }
        if self.epochs == 0 {
            return bad("epochs must be nonzero".into());
        }
        if self.warmup_epochs > self.epochs {
            return bad(format!(
                "warmup_epochs {} exceeds epochs {}",
                self.warmup_epochs, self.epochs
            ));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
