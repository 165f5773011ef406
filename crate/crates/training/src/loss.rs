use audio_dsp::{hann_window, mel_filterbank, HOP, MEL_BINS, N_BINS, WIN};
use tensor_core::{Graph, NodeId, Scalar, Tensor};

use crate::config::LossConfig;
use crate::error::TrainError;
use synth_data::Label;

// ----------------------------------------------------------------------
// differentiable log-mel path
// ----------------------------------------------------------------------

/// Analysis window and transposed filterbank held as plain tensors, so a
/// training loop can build them once and mount them into every clip
/// graph.
#[derive(Debug, Clone)]
pub struct MelBank<F: Scalar> {
    /// Window, length `win`.
    pub window: Tensor<F>,
    /// Filterbank transposed to `[win / 2 + 1, mel]` so a power frame
    /// row multiplies straight into it.
    pub fb_t: Tensor<F>,
    pub win: usize,
    pub hop: usize,
}

impl<F: Scalar> MelBank<F> {
    /// The bank matching the spectrogram the evaluation code computes on
    /// waveforms directly.
    pub fn standard() -> Self {
        let window = Tensor {
            shape: vec![WIN],
            data: hann_window().iter().map(|&v| F::of(v as f64)).collect(),
        };
        let fb = mel_filterbank();
        let mut data = vec![F::zero(); N_BINS * MEL_BINS];
        for m in 0..MEL_BINS {
            for k in 0..N_BINS {
                data[k * MEL_BINS + m] = F::of(fb.data[m * N_BINS + k] as f64);
            }
        }
        MelBank {
            window,
            fb_t: Tensor {
                shape: vec![N_BINS, MEL_BINS],
                data,
            },
            win: WIN,
            hop: HOP,
        }
    }

    /// Mounts the constants into `g`.
    pub fn mount(&self, g: &mut Graph<F>) -> Result<MelNodes, TrainError> {
        Ok(MelNodes {
            window: g.constant(self.window.clone())?,
            fb_t: g.constant(self.fb_t.clone())?,
            win: self.win,
            hop: self.hop,
        })
    }
}

/// Graph handles of one mounted [`MelBank`].
#[derive(Debug, Clone, Copy)]
pub struct MelNodes {
    pub window: NodeId,
    pub fb_t: NodeId,
    pub win: usize,
    pub hop: usize,
}

/// Log-mel spectrogram as graph ops: frame, window, power spectrum,
/// filterbank, floored log. `wave` is a rank-1 signal; the result is
/// `[T, mel]` and gradients flow back into the waveform.
pub fn mel_node<F: Scalar>(
    g: &mut Graph<F>,
    wave: NodeId,
    mel: &MelNodes,
    floor: F,
) -> Result<NodeId, TrainError> {
    let framed = g.frame(wave, mel.win, mel.hop)?;
    let windowed = g.mul_row(framed, mel.window)?;
    let power = g.spectral_power(windowed)?;
    let banked = g.matmul(power, mel.fb_t)?;
    Ok(g.ln_floor(banked, floor)?)
}

// ----------------------------------------------------------------------
// objective terms
// ----------------------------------------------------------------------

/// Mean squared error between two log-mel spectrograms, both cropped to
/// their common leading frames. Decoded audio is slightly shorter than
/// the input it reconstructs, so the tail frames of the longer one carry
/// no signal to compare against.
pub fn loss_recon_node<F: Scalar>(
    g: &mut Graph<F>,
    pred: NodeId,
    gt: NodeId,
) -> Result<NodeId, TrainError> {
    let ps = g.value(pred).shape.clone();
    let gs = g.value(gt).shape.clone();
    if ps.len() != 2 || gs.len() != 2 || ps[1] != gs[1] {
        return Err(TrainError::Data {
            detail: format!("mel shapes {ps:?} vs {gs:?} cannot be compared"),
        });
    }
    let t = ps[0].min(gs[0]);
    if t == 0 {
        return Err(TrainError::Data {
            detail: "mel spectrograms share no frames".into(),
        });
    }
    let p = if ps[0] > t { g.crop_rows(pred, t)? } else { pred };
    let q = if gs[0] > t { g.crop_rows(gt, t)? } else { gt };
    let d = g.sub(p, q)?;
    let sq = g.mul(d, d)?;
    Ok(g.mean_all(sq)?)
}

/// KL divergence of the diagonal Gaussian posterior from the standard
/// normal, averaged over every frame and latent dimension:
/// mean of -(1 + 2 log sigma - mu^2 - sigma^2) / 2.
pub fn loss_kl_node<F: Scalar>(
    g: &mut Graph<F>,
    mu: NodeId,
    log_sigma: NodeId,
) -> Result<NodeId, TrainError> {
    let two_ls = g.mul_const(log_sigma, F::of(2.0))?;
    let sigma2 = g.exp(two_ls)?;
    let mu2 = g.mul(mu, mu)?;
    let t = g.add_const(two_ls, F::one())?;
    let t = g.sub(t, mu2)?;
    let t = g.sub(t, sigma2)?;
    let t = g.mul_const(t, F::of(-0.5))?;
    Ok(g.mean_all(t)?)
}

/// Class-weighted cross entropy on one clip's logits. Bonafide is class
/// 0 and carries `ce_weight_bonafide`; spoof carries the complement, so
/// the scarce class dominates the gradient.
pub fn loss_cls_node<F: Scalar>(
    g: &mut Graph<F>,
    logits: NodeId,
    label: Label,
    cfg: &LossConfig,
) -> Result<NodeId, TrainError> {
    let (class, weight) = match label {
        Label::Bonafide => (0, cfg.ce_weight_bonafide),
        Label::Spoof => (1, cfg.spoof_weight()),
    };
    Ok(g.weighted_nll(logits, class, F::of(weight))?)
}

/// alpha * recon + beta * kl + gamma * cls.
pub fn total_loss_node<F: Scalar>(
    g: &mut Graph<F>,
    cfg: &LossConfig,
    recon: NodeId,
    kl: NodeId,
    cls: NodeId,
) -> Result<NodeId, TrainError> {
    combine(
        g,
        &[(cfg.alpha, recon), (cfg.beta, kl), (cfg.gamma, cls)],
    )
}

/// Weighted sum of scalar nodes in the given order.
pub(crate) fn combine<F: Scalar>(
    g: &mut Graph<F>,
    terms: &[(f64, NodeId)],
) -> Result<NodeId, TrainError> {
    let mut acc: Option<NodeId> = None;
    for &(coef, node) in terms {
        let scaled = g.mul_const(node, F::of(coef))?;
        acc = Some(match acc {
            None => scaled,
            Some(a) => g.add(a, scaled)?,
        });
    }
    acc.ok_or_else(|| TrainError::Config {
        detail: "objective has no terms".into(),
    })
}

/// Fails loudly on a NaN or infinite objective value, naming where in
/// the run it happened.
pub fn ensure_finite_scalar(v: f64, context: &str) -> Result<f64, TrainError> {
    if !v.is_finite() {
        return Err(TrainError::NonFinite {
            context: format!("{context}: value {v}"),
        });
    }
    Ok(v)
}

// ----------------------------------------------------------------------
