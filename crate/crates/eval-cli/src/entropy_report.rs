use std::path::Path;

use model::{frame_entropy, Model};
use scoring::{compute_auc, ScoreSet};
use serde::Serialize;
use synth_data::Label;
use training::LoadedClip;

use crate::error::EvalError;

pub const HISTOGRAM_BINS: usize = 64;

/// Mean and population standard deviation of one latent frame's entropy
/// across every clip of one class.
#[derive(Debug, Clone)]
pub struct FrameStat {
    pub frame_index: usize,
    pub class: Label,
    pub mean: f64,
    pub std: f64,
}

/// One histogram bin over utterance-mean entropies, counted per class.
#[derive(Debug, Clone)]
pub struct HistBin {
    pub lo: f64,
    pub hi: f64,
    pub bonafide: usize,
    pub spoof: usize,
}

/// How the two entropy distributions separate.
#[derive(Debug, Clone, Serialize)]
pub struct EntropySummary {
    pub mean_bonafide: f64,
    pub mean_spoof: f64,
    /// bonafide mean minus spoof mean.
    pub gap: f64,
    /// Probability that a random bonafide clip has higher utterance
    /// entropy than a random spoof clip.
    pub auc_bonafide_higher: f64,
    /// The same separation read direction-free.
    pub auc_direction_free: f64,
    /// "bonafide" or "spoof", whichever class sits higher.
    pub higher_class: &'static str,
}

#[derive(Debug, Clone)]
pub struct EntropyStats {
    pub per_frame: Vec<FrameStat>,
    pub histogram: Vec<HistBin>,
    pub summary: EntropySummary,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.max(0.0).sqrt())
}

/// Collects per-frame and utterance-level entropy statistics for both
/// classes. Needs at least one clip of each.
pub fn entropy_stats(model: &Model<f32>, clips: &[LoadedClip]) -> Result<EntropyStats, EvalError> {
    let frames = model.cfg.frames();
    // per_class[class][frame] lists one entropy per clip.
    let mut per_class = [vec![Vec::new(); frames], vec![Vec::new(); frames]];
    let mut utt: [Vec<f64>; 2] = [Vec::new(), Vec::new()];

    for c in clips {
        let inf = model.infer(&c.samples)?;
        let h = frame_entropy(&inf.latent, false);
        if h.len() != frames {
            return Err(EvalError::Data {
                detail: format!("{}: {} frames, model yields {frames}", c.path, h.len()),
            });
        }
        let k = match c.label {
            Label::Bonafide => 0,
            Label::Spoof => 1,
        };
        for (f, v) in h.h.iter().enumerate() {
            per_class[k][f].push(*v);
        }
        utt[k].push(h.mean());
    }
    if utt[0].is_empty() || utt[1].is_empty() {
        return Err(EvalError::Data {
            detail: "entropy statistics need clips of both classes".into(),
        });
    }

    let mut per_frame = Vec::with_capacity(2 * frames);
    for (k, class) in [(0, Label::Bonafide), (1, Label::Spoof)] {
        for f in 0..frames {
            let (mean, std) = mean_std(&per_class[k][f]);
            per_frame.push(FrameStat {
                frame_index: f,
                class,
                mean,
                std,
            });
        }
    }

    let histogram = build_histogram(&utt[0], &utt[1]);

    let mean_bonafide = utt[0].iter().sum::<f64>() / utt[0].len() as f64;
    let mean_spoof = utt[1].iter().sum::<f64>() / utt[1].len() as f64;
    let mut scores = Vec::new();
    let mut labels = Vec::new();
    for (k, class) in [(0, Label::Bonafide), (1, Label::Spoof)] {
        for &v in &utt[k] {
            scores.push(v);
            labels.push(class);
        }
    }
    let auc = compute_auc(&ScoreSet::new(scores, labels)?)?;
    let summary = EntropySummary {
        mean_bonafide,
        mean_spoof,
        gap: mean_bonafide - mean_spoof,
        auc_bonafide_higher: auc,
        auc_direction_free: auc.max(1.0 - auc),
        higher_class: if auc >= 0.5 { "bonafide" } else { "spoof" },
    };

    Ok(EntropyStats {
        per_frame,
        histogram,
        summary,
    })
}

fn build_histogram(bona: &[f64], spoof: &[f64]) -> Vec<HistBin> {
    let all = bona.iter().chain(spoof);
    let lo = all.clone().cloned().fold(f64::INFINITY, f64::min);
    let hi = all.cloned().fold(f64::NEG_INFINITY, f64::max);
    let width = if hi > lo {
        (hi - lo) / HISTOGRAM_BINS as f64
    } else {
        1.0
    };
    let slot = |v: f64| (((v - lo) / width) as usize).min(HISTOGRAM_BINS - 1);

    let mut bins: Vec<HistBin> = (0..HISTOGRAM_BINS)
        .map(|i| HistBin {
            lo: lo + i as f64 * width,
            hi: lo + (i + 1) as f64 * width,
            bonafide: 0,
            spoof: 0,
        })
        .collect();
    for &v in bona {
        bins[slot(v)].bonafide += 1;
    }
    for &v in spoof {
        bins[slot(v)].spoof += 1;
    }
    bins
}

// ----------------------------------------------------------------------
// output files
// ----------------------------------------------------------------------

fn write_text(path: &Path, text: &str) -> Result<(), EvalError> {
    std::fs::write(path, text).map_err(|e| EvalError::Io {
        path: path.display().to_string(),
        source: e,
    })
}

pub fn write_frame_stats_csv(path: &Path, stats: &EntropyStats) -> Result<(), EvalError> {
    let mut out = String::from("frame_index,class,mean,std\n");
    for s in &stats.per_frame {
        out.push_str(&format!(
            "{},{},{},{}\n",
            s.frame_index, s.class, s.mean, s.std
        ));
    }
    write_text(path, &out)
}

pub fn write_histogram_csv(path: &Path, stats: &EntropyStats) -> Result<(), EvalError> {
    let mut out = String::from("bin_lo,bin_hi,bonafide,spoof\n");
    for b in &stats.histogram {
        out.push_str(&format!("{},{},{},{}\n", b.lo, b.hi, b.bonafide, b.spoof));
    }
    write_text(path, &out)
}

pub fn write_entropy_summary_json(path: &Path, stats: &EntropyStats) -> Result<(), EvalError> {
    let text = serde_json::to_string_pretty(&stats.summary).map_err(|e| EvalError::Data {
        detail: format!("summary serialization failed: {e}"),
    })?;
    write_text(path, &text)
}

// ----------------------------------------------------------------------
