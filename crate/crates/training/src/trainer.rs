use std::collections::HashMap;

use audio_dsp::{rawboost_augment, RawBoostConfig, Waveform, LOG_FLOOR};
use model::{entropy_node, reparameterize, Model, ModelConfig, TrainPhase};
use scoring::{compute_eer, ScoreSet};
use serde::Serialize;
use tensor_core::{adam_step, AdamConfig, AdamState, Graph, Rng, Scalar, Tensor, TensorError};

use crate::config::{LossConfig, TrainConfig};
use crate::data::LoadedClip;
use crate::error::TrainError;
use crate::loss::{
    combine, ensure_finite_scalar, loss_cls_node, loss_kl_node, loss_recon_node, mel_node, MelBank,
};

// ----------------------------------------------------------------------
// reporting
// ----------------------------------------------------------------------

/// Per-epoch averages over the training set plus the dev-set error.
/// Terms outside the epoch's objective (the KL and classification terms
/// during warm-up, or any term whose weight is zero) report as zero.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct EpochStats {
    pub epoch: usize,
    pub l_recon: f64,
    pub l_kl: f64,
    pub l_cls: f64,
    pub total: f64,
    pub dev_eer: f64,
}

/// Result of a full run: the model from the epoch with the lowest dev
/// EER (earliest such epoch on ties), plus the whole history.
#[derive(Debug)]
pub struct TrainOutcome {
    pub model: Model<f32>,
    pub history: Vec<EpochStats>,
    pub best_epoch: usize,
    pub best_dev_eer: f64,
}

/// One JSON object per epoch, one line each.
pub fn write_history_ndjson(path: &std::path::Path, history: &[EpochStats]) -> Result<(), TrainError> {
    let mut out = String::new();
    for h in history {
        let line = serde_json::to_string(h).map_err(|e| TrainError::Data {
            detail: format!("stats serialization failed: {e}"),
        })?;
        out.push_str(&line);
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| TrainError::Io {
        path: path.display().to_string(),
        source: e,
    })
}

// ----------------------------------------------------------------------
// scoring helpers
// ----------------------------------------------------------------------

/// Softmax probability of the bonafide class, computed stably in f64.
pub fn bonafide_probability(logits: [f32; 2]) -> f64 {
    let a = logits[0] as f64;
    let b = logits[1] as f64;
    let m = a.max(b);
    let ea = (a - m).exp();
    let eb = (b - m).exp();
    ea / (ea + eb)
}

/// Scores every clip with a gradient-free forward pass.
pub fn score_clips(model: &Model<f32>, clips: &[LoadedClip]) -> Result<ScoreSet, TrainError> {
    let mut scores = Vec::with_capacity(clips.len());
    let mut labels = Vec::with_capacity(clips.len());
    for c in clips {
        let inf = model.infer(&c.samples)?;
        scores.push(bonafide_probability(inf.logits));
        labels.push(c.label);
    }
    Ok(ScoreSet::new(scores, labels)?)
}

// ----------------------------------------------------------------------
// the training loop
// ----------------------------------------------------------------------

#[derive(Debug, Clone, Copy, Default)]
struct Parts {
    recon: f64,
    kl: f64,
    cls: f64,
    total: f64,
}

/// Derived random streams. Splitting from the run's origin keeps every
/// stochastic choice pinned to (seed, epoch, clip) no matter how the
/// surrounding code evolves.
const STREAM_INIT: u64 = 0;
const STREAM_SHUFFLE: u64 = 1;
const STREAM_CLIP: u64 = 2;
const CLIP_AUGMENT: u64 = 0;
const CLIP_REPARAM: u64 = 1;

pub fn train(
    model_cfg: ModelConfig,
    loss_cfg: &LossConfig,
    train_cfg: &TrainConfig,
    train_clips: &[LoadedClip],
    dev_clips: &[LoadedClip],
) -> Result<TrainOutcome, TrainError> {
    train_with(model_cfg, loss_cfg, train_cfg, train_clips, dev_clips, |_| {})
}

/// Like [`train`], invoking `on_epoch` after each epoch so callers can
/// stream progress.
pub fn train_with(
    model_cfg: ModelConfig,
    loss_cfg: &LossConfig,
    train_cfg: &TrainConfig,
    train_clips: &[LoadedClip],
    dev_clips: &[LoadedClip],
    mut on_epoch: impl FnMut(&EpochStats),
) -> Result<TrainOutcome, TrainError> {
    loss_cfg.validate()?;
    train_cfg.validate()?;
    if train_cfg.warmup_epochs > 0 && loss_cfg.alpha == 0.0 {
        return Err(TrainError::Config {
            detail: "warm-up optimizes the reconstruction term alone, so alpha must be positive"
                .into(),
        });
    }
    for (name, clips) in [("train", train_clips), ("dev", dev_clips)] {
        if clips.is_empty() {
            return Err(TrainError::Data {
                detail: format!("{name} set is empty"),
            });
        }
        if let Some(c) = clips.iter().find(|c| c.samples.len() != model_cfg.clip_samples) {
            return Err(TrainError::Data {
                detail: format!(
                    "{name} clip {} has {} samples, model expects {}",
                    c.path,
                    c.samples.len(),
                    model_cfg.clip_samples
                ),
            });
        }
    }

    let root = Rng::new(train_cfg.seed);
    let mut model = Model::<f32>::init(model_cfg, &root.split(STREAM_INIT))?;
    let adam_cfg = AdamConfig {
        lr: train_cfg.lr,
        ..AdamConfig::default()
    };
    let mut adam: HashMap<String, AdamState<f32>> = HashMap::new();
    let mel_bank: MelBank<f32> = MelBank::standard();
    let rawboost = RawBoostConfig::default();

    let mut history = Vec::with_capacity(train_cfg.epochs);
    let mut best: Option<(f64, usize, Model<f32>)> = None;

    for epoch in 1..=train_cfg.epochs {
        let phase = if epoch <= train_cfg.warmup_epochs {
            TrainPhase::WarmUp
        } else {
            TrainPhase::Adapters
        };

        let mut order: Vec<usize> = (0..train_clips.len()).collect();
        root.split(STREAM_SHUFFLE).split(epoch as u64).shuffle(&mut order);

        let mut sums = Parts::default();
        for batch in order.chunks(train_cfg.batch_size) {
            let mut grad_sums: HashMap<String, Tensor<f32>> = HashMap::new();
            for &ci in batch {
                let clip = &train_clips[ci];
                let (parts, grads) = clip_pass(
                    &model, clip, ci, epoch, phase, loss_cfg, train_cfg, &mel_bank, &rawboost,
                    &root,
                )
                .map_err(|e| match nonfinite_op(&e) {
                    // Overflow surfaces as an op refusing to build a
                    // non-finite node; pin the run position onto it.
                    Some(op) => TrainError::NonFinite {
                        context: format!(
                            "epoch {epoch}, clip {ci} ({}): op {op} went non-finite",
                            clip.path
                        ),
                    },
                    None => e,
                })?;
                sums.recon += parts.recon;
                sums.kl += parts.kl;
                sums.cls += parts.cls;
                sums.total += parts.total;
                for (name, g) in grads {
                    match grad_sums.get_mut(&name) {
                        Some(acc) => {
                            for (a, b) in acc.data.iter_mut().zip(&g.data) {
                                *a += *b;
                            }
                        }
                        None => {
                            grad_sums.insert(name, g);
                        }
                    }
                }
            }
            let scale = 1.0 / batch.len() as f32;
            for (name, param) in model.params.iter_mut() {
                if let Some(gsum) = grad_sums.get(name) {
                    let avg = Tensor {
                        shape: gsum.shape.clone(),
                        data: gsum.data.iter().map(|&v| v * scale).collect(),
                    };
                    let state = adam
                        .entry(name.to_string())
                        .or_insert_with(|| AdamState::new(param.data.len()));
                    adam_step(param, &avg, state, &adam_cfg, name)?;
                }
            }
        }

        let n = train_clips.len() as f64;
        let dev_scores = score_clips(&model, dev_clips)?;
        let eer = compute_eer(&dev_scores)?;
        let stats = EpochStats {
            epoch,
            l_recon: sums.recon / n,
            l_kl: sums.kl / n,
            l_cls: sums.cls / n,
            total: sums.total / n,
            dev_eer: eer.eer,
        };
        on_epoch(&stats);
        history.push(stats);

        let improved = match &best {
            None => true,
            Some((best_eer, _, _)) => eer.eer < *best_eer,
        };
        if improved {
            best = Some((eer.eer, epoch, model.clone()));
        }
    }

    let (best_dev_eer, best_epoch, best_model) = best.expect("at least one epoch ran");
    Ok(TrainOutcome {
        model: best_model,
        history,
        best_epoch,
        best_dev_eer,
    })
}

/// Picks a non-finite op failure out of either wrapping level.
fn nonfinite_op(e: &TrainError) -> Option<&'static str> {
    match e {
        TrainError::Tensor(TensorError::NonFinite { op })
        | TrainError::Model(model::ModelError::Tensor(TensorError::NonFinite { op })) => Some(op),
        _ => None,
    }
}

/// Forward and backward for one clip, returning the loss parts and the
/// gradients of every parameter trainable in this phase.
#[allow(clippy::too_many_arguments)]
fn clip_pass(
    model: &Model<f32>,
    clip: &LoadedClip,
    clip_index: usize,
    epoch: usize,
    phase: TrainPhase,
    loss_cfg: &LossConfig,
    train_cfg: &TrainConfig,
    mel_bank: &MelBank<f32>,
    rawboost: &RawBoostConfig,
    root: &Rng,
) -> Result<(Parts, Vec<(String, Tensor<f32>)>), TrainError> {
    let clip_rng = root
        .split(STREAM_CLIP)
        .split(epoch as u64)
        .split(clip_index as u64);

    let samples: Vec<f32> = if train_cfg.augment {
        let w = Waveform::from_samples(clip.samples.clone())?;
        let mut arng = clip_rng.split(CLIP_AUGMENT);
        rawboost_augment(&w, rawboost, &mut arng).samples
    } else {
        clip.samples.clone()
    };

    let mut g: Graph<f32> = Graph::new();
    let m = model.mount(&mut g, phase)?;
    let wave = g.constant(Tensor::new(vec![1, samples.len()], samples.clone())?)?;
    let x = model.backbone_forward(&mut g, &m, wave)?;
    let (mu, log_sigma) = model.encode(&mut g, &m, x)?;

    let use_recon = loss_cfg.alpha > 0.0;
    let use_kl = phase == TrainPhase::Adapters && loss_cfg.beta > 0.0;
    let use_cls = phase == TrainPhase::Adapters && loss_cfg.gamma > 0.0;

    let mut parts = Parts::default();
    let mut terms: Vec<(f64, tensor_core::NodeId)> = Vec::new();

    if use_recon {
        let mut erng = clip_rng.split(CLIP_REPARAM);
        let eps = g.constant(Tensor::randn(
            &mut erng,
            &[model.cfg.frames(), model.cfg.latent_dim],
        ))?;
        let z = reparameterize(&mut g, mu, log_sigma, eps)?;
        let decoded = model.decode(&mut g, &m, z)?;
        let mel = mel_bank.mount(&mut g)?;
        let pred = mel_node(&mut g, decoded, &mel, LOG_FLOOR)?;
        let gt = audio_dsp::mel_spectrogram(&Waveform::from_samples(samples)?)?;
        let gt_node = g.constant(gt.frames)?;
        let recon = loss_recon_node(&mut g, pred, gt_node)?;
        parts.recon = g.value(recon).data[0].as_f64();
        terms.push((loss_cfg.alpha, recon));
    }
    if use_kl {
        let kl = loss_kl_node(&mut g, mu, log_sigma)?;
        parts.kl = g.value(kl).data[0].as_f64();
        terms.push((loss_cfg.beta, kl));
    }
    if use_cls {
        let h = entropy_node(&mut g, log_sigma)?;
        let logits = model.classify(&mut g, &m, h)?;
        let cls = loss_cls_node(&mut g, logits, clip.label, loss_cfg)?;
        parts.cls = g.value(cls).data[0].as_f64();
        terms.push((loss_cfg.gamma, cls));
    }

    let total = combine(&mut g, &terms)?;
    parts.total = ensure_finite_scalar(
        g.value(total).data[0].as_f64(),
        &format!("epoch {epoch}, clip {clip_index} ({})", clip.path),
    )?;
    g.backward(total)?;

    let mut grads = Vec::new();
    for (name, _) in model.params.iter() {
        if phase.trainable(name) {
            if let Some(grad) = g.grad(m.id(name)?) {
                grads.push((name.to_string(), grad));
            }
        }
    }
    Ok((parts, grads))
}
