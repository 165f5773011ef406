use serde::{Deserialize, Serialize};

use crate::error::ModelError;

/// Epsilon inside every layer-norm denominator.
pub const LN_EPS: f64 = 1e-5;

/// The log standard deviation of the latent posterior is clamped to
/// [-LOG_SIGMA_CLAMP, LOG_SIGMA_CLAMP] so entropies and KL terms stay
/// bounded no matter what the variance encoder emits.
pub const LOG_SIGMA_CLAMP: f64 = 7.0;

/// Where the residual-bottleneck adapter sits inside each encoder block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdapterPlacement {
    /// On the attention residual, before the first layer norm.
    PostAttention,
    /// On the feed-forward residual, before the final layer norm.
    PostFfn,
}

/// Every architectural knob of the network. The defaults describe the
/// full-size detector; tests shrink them for cheap gradient probes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelConfig {
    /// Encoder blocks in the backbone.
    pub layers: usize,
    /// Residual stream width D.
    pub width: usize,
    /// Attention heads. Only 1 is supported.
    pub heads: usize,
    /// Feed-forward hidden width.
    pub ffn_width: usize,
    /// Frontend convolution kernel, in samples.
    pub frontend_kernel: usize,
    /// Frontend convolution stride, in samples. One latent frame covers
    /// this many samples, and the decoder upsamples back by the same
    /// factor.
    pub frontend_stride: usize,
    /// Adapter bottleneck projection width.
    pub adapter_dim: usize,
    pub adapter_placement: AdapterPlacement,
    /// Latent dimensionality K of the per-frame Gaussian.
    pub latent_dim: usize,
    /// Hidden channels between the two encoder convolutions.
    pub encoder_hidden: usize,
    /// Per-stage upsampling rates of the decoder. Their product must
    /// equal `frontend_stride`.
    pub decoder_rates: Vec<usize>,
    /// Channel widths between decoder stages (one fewer than rates; the
    /// chain is latent_dim -> widths... -> 1).
    pub decoder_widths: Vec<usize>,
    /// Hidden width of the entropy classifier.
    pub classifier_hidden: usize,
    /// Expected input length in samples.
    pub clip_samples: usize,
}

impl Default for ModelConfig {
    fn default() -> Self {
        let width = 128;
        ModelConfig {
            layers: 2,
            width,
            heads: 1,
            ffn_width: 256,
            frontend_kernel: 400,
            frontend_stride: 320,
            adapter_dim: 256.min(2 * width),
            adapter_placement: AdapterPlacement::PostFfn,
            latent_dim: 192,
            encoder_hidden: 96,
            decoder_rates: vec![5, 4, 4, 2, 2],
            decoder_widths: vec![64, 32, 16, 8],
            classifier_hidden: 64,
            clip_samples: audio_dsp::CLIP_SAMPLES,
        }
    }
}

impl ModelConfig {
    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |detail: String| Err(ModelError::Config { detail });
        if self.heads != 1 {
            return bad(format!("{} heads requested, only 1 supported", self.heads));
        }
        for (name, v) in [
            ("layers", self.layers),
            ("width", self.width),
            ("ffn_width", self.ffn_width),
            ("frontend_kernel", self.frontend_kernel),
            ("frontend_stride", self.frontend_stride),
            ("adapter_dim", self.adapter_dim),
            ("latent_dim", self.latent_dim),
            ("encoder_hidden", self.encoder_hidden),
            ("classifier_hidden", self.classifier_hidden),
        ] {
            if v == 0 {
                return bad(format!("{name} must be nonzero"));
            }
        }
        if self.clip_samples < self.frontend_kernel {
            return bad(format!(
                "clip of {} samples shorter than frontend kernel {}",
                self.clip_samples, self.frontend_kernel
            ));
        }
        if self.decoder_rates.is_empty() || self.decoder_rates.iter().any(|&r| r == 0) {
            return bad("decoder rates must be nonempty and nonzero".into());
        }
        let product: usize = self.decoder_rates.iter().product();
        if product != self.frontend_stride {
            return bad(format!(
                "decoder rates multiply to {product}, frontend stride is {}",
                self.frontend_stride
            ));
        }
        if self.decoder_widths.len() + 1 != self.decoder_rates.len() {
            return bad(format!(
                "{} decoder widths for {} rates",
                self.decoder_widths.len(),
                self.decoder_rates.len()
            ));
        }
        if self.decoder_widths.iter().any(|&w| w == 0) {
            return bad("decoder widths must be nonzero".into());
        }
        Ok(())
    }

    /// Latent frames C produced by the frontend for a standard clip.
    pub fn frames(&self) -> usize {
        (self.clip_samples - self.frontend_kernel) / self.frontend_stride + 1
    }

    /// Samples emitted by the decoder: C frames times the stride.
    pub fn decoded_len(&self) -> usize {
        self.frames() * self.frontend_stride
    }

    /// Channel chain through the decoder, input to output.
    pub fn decoder_channels(&self) -> Vec<usize> {
        let mut chain = Vec::with_capacity(self.decoder_rates.len() + 1);
        chain.push(self.latent_dim);
        chain.extend_from_slice(&self.decoder_widths);
        chain.push(1);
        chain
    }
}

// ---------------------------------------------------------------------------
