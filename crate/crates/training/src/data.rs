use std::path::Path;

use audio_dsp::{read_wav, standardize_clip, Waveform};
use synth_data::{DatasetManifest, Label, Subset};

use crate::error::TrainError;

/// One clip in memory: length-standardized samples plus its ground
/// truth.
#[derive(Debug, Clone)]
pub struct LoadedClip {
    pub path: String,
    pub label: Label,
    pub samples: Vec<f32>,
}

/// Standardizes a waveform into a [`LoadedClip`]; used both by the disk
/// loader and by tests that synthesize corpora in memory.
pub fn clip_from_waveform(path: &str, label: Label, w: &Waveform) -> Result<LoadedClip, TrainError> {
    let std = standardize_clip(w)?;
    Ok(LoadedClip {
        path: path.to_string(),
        label,
        samples: std.samples,
    })
}

/// Reads every clip of one subset under `root`. Entries are sorted by
/// path first, so a shuffled manifest loads into the same clip order,
/// and every missing file is reported in a single error instead of
/// failing one at a time.
pub fn load_subset(
    root: &Path,
    manifest: &DatasetManifest,
    subset: Subset,
) -> Result<Vec<LoadedClip>, TrainError> {
    let mut entries = manifest.subset(subset);
    if entries.is_empty() {
        return Err(TrainError::Data {
            detail: format!("subset {subset} has no manifest entries"),
        });
    }
    entries.sort_by(|a, b| a.path.cmp(&b.path));

    let missing: Vec<&str> = entries
        .iter()
        .filter(|e| !root.join(&e.path).is_file())
        .map(|e| e.path.as_str())
        .collect();
    if !missing.is_empty() {
        return Err(TrainError::Data {
            detail: format!(
                "{} clips missing under {}: {}",
                missing.len(),
                root.display(),
                missing.join(", ")
            ),
        });
    }

    let mut clips = Vec::with_capacity(entries.len());
    for e in entries {
        let w = read_wav(&root.join(&e.path))?;
        clips.push(clip_from_waveform(&e.path, e.label, &w)?);
    }
    Ok(clips)
}
