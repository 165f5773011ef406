use std::path::Path;

use audio_dsp::{PerturbSpec, Waveform};
use model::Model;
use scoring::{compute_eer, ScoreSet};
use tensor_core::Rng;
use training::{bonafide_probability, LoadedClip};

use crate::error::EvalError;

/// EER of one sweep cell.
#[derive(Debug, Clone)]
pub struct PerturbCell {
    pub spec: String,
    pub eer: f64,
}

/// Runs the full duration/bitrate sweep over already-standardized
/// clips. Each cell perturbs every clip, rescores it and recomputes the
/// EER; randomness (the segment offset of the duration cells) derives
/// from `seed`, the cell and the clip index, so the sweep is
/// reproducible clip by clip. The 4 s cell copies the whole clip, which
/// makes it an exact baseline.
pub fn perturb_eval(
    model: &Model<f32>,
    clips: &[LoadedClip],
    seed: u64,
) -> Result<Vec<PerturbCell>, EvalError> {
    if clips.is_empty() {
        return Err(EvalError::Data {
            detail: "no clips to perturb".into(),
        });
    }
    let root = Rng::new(seed);
    let mut cells = Vec::new();
    for (si, spec) in PerturbSpec::all().into_iter().enumerate() {
        let mut scores = Vec::with_capacity(clips.len());
        let mut labels = Vec::with_capacity(clips.len());
        for (ci, c) in clips.iter().enumerate() {
            let w = Waveform::from_samples(c.samples.clone())?;
            let mut rng = root.split(si as u64).split(ci as u64);
            let p = spec.apply(&w, &mut rng)?;
            let inf = model.infer(&p.samples)?;
            scores.push(bonafide_probability(inf.logits));
            labels.push(c.label);
        }
        let point = compute_eer(&ScoreSet::new(scores, labels)?)?;
        cells.push(PerturbCell {
            spec: spec.label(),
            eer: point.eer,
        });
    }
    Ok(cells)
}

pub fn write_perturb_csv(path: &Path, cells: &[PerturbCell]) -> Result<(), EvalError> {
    let mut out = String::from("spec,eer\n");
    for c in cells {
        out.push_str(&format!("{},{}\n", c.spec, c.eer));
    }
    std::fs::write(path, out).map_err(|e| EvalError::Io {
        path: path.display().to_string(),
        source: e,
    })
}
