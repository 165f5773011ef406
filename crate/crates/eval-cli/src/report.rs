use std::path::Path;

use model::{frame_entropy, Model};
use scoring::{compute_auc, compute_eer, ScoreSet};
use serde::Serialize;
use synth_data::Label;
use training::{bonafide_probability, LoadedClip};

use crate::error::EvalError;

/// One scored clip. `utt_entropy_mean` is the per-frame sum of latent
/// log standard deviations averaged over frames, the same quantity the
/// classifier reads (the constant Gaussian term is dropped).
#[derive(Debug, Clone)]
pub struct ClipScore {
    pub path: String,
    pub label: Label,
    pub score: f64,
    pub utt_entropy_mean: f64,
}

#[derive(Debug, Clone)]
pub struct EvalReport {
    /// Sorted by clip path.
    pub rows: Vec<ClipScore>,
    pub eer: f64,
    pub threshold: f64,
    pub n_bonafide: usize,
    pub n_spoof: usize,
}

impl EvalReport {
    pub fn score_set(&self) -> Result<ScoreSet, EvalError> {
        Ok(ScoreSet::new(
            self.rows.iter().map(|r| r.score).collect(),
            self.rows.iter().map(|r| r.label).collect(),
        )?)
    }

    /// Probability that a random bonafide clip outscores a random spoof
    /// clip, with half credit for ties.
    pub fn auc(&self) -> Result<f64, EvalError> {
        Ok(compute_auc(&self.score_set()?)?)
    }
}

/// Scores every clip with a gradient-free forward pass: softmax
/// probability of the bonafide class plus the utterance entropy mean.
pub fn evaluate(model: &Model<f32>, clips: &[LoadedClip]) -> Result<EvalReport, EvalError> {
    if clips.is_empty() {
        return Err(EvalError::Data {
            detail: "no clips to evaluate".into(),
        });
    }
    let mut rows = Vec::with_capacity(clips.len());
    for c in clips {
        let inf = model.infer(&c.samples)?;
        rows.push(ClipScore {
            path: c.path.clone(),
            label: c.label,
            score: bonafide_probability(inf.logits),
            utt_entropy_mean: frame_entropy(&inf.latent, false).mean(),
        });
    }
    rows.sort_by(|a, b| a.path.cmp(&b.path));

    let set = ScoreSet::new(
        rows.iter().map(|r| r.score).collect(),
        rows.iter().map(|r| r.label).collect(),
    )?;
    let point = compute_eer(&set)?;
    Ok(EvalReport {
        rows,
        eer: point.eer,
        threshold: point.threshold,
        n_bonafide: set.bonafide_count(),
        n_spoof: set.spoof_count(),
    })
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

pub fn write_scores_csv(path: &Path, report: &EvalReport) -> Result<(), EvalError> {
    let mut out = String::from("clip,label,score,utt_entropy_mean\n");
    for r in &report.rows {
        out.push_str(&format!(
            "{},{},{},{}\n",
            r.path, r.label, r.score, r.utt_entropy_mean
        ));
    }
    write_text(path, &out)
}

#[derive(Debug, Serialize)]
struct Counts {
    bonafide: usize,
    spoof: usize,
}

#[derive(Debug, Serialize)]
struct Summary<'a> {
    eer: f64,
    threshold: f64,
    counts: Counts,
    config_hash: &'a str,
}

pub fn write_summary_json(
    path: &Path,
    report: &EvalReport,
    config_hash: &str,
) -> Result<(), EvalError> {
    let s = Summary {
        eer: report.eer,
        threshold: report.threshold,
        counts: Counts {
            bonafide: report.n_bonafide,
            spoof: report.n_spoof,
        },
        config_hash,
    };
    let text = serde_json::to_string_pretty(&s).map_err(|e| EvalError::Data {
        detail: format!("summary serialization failed: {e}"),
    })?;
    write_text(path, &text)
}
