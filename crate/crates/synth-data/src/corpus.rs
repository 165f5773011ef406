use std::path::Path;

use audio_dsp::write_wav;
use serde::{Deserialize, Serialize};
use tensor_core::Rng;

use crate::bonafide::gen_bonafide;
use crate::error::SynthError;
use crate::manifest::{DatasetManifest, Label, ManifestEntry, Subset};
use crate::spoof::{gen_spoof, SpoofGeneratorConfig};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubsetSizes {
    pub train: usize,
    pub dev: usize,
    pub eval: usize,
}

/// Bonafide share of each subset, mirroring the heavy class imbalance of
/// real anti-spoofing corpora.
pub const DEFAULT_BONAFIDE_FRAC: f64 = 0.1;

/// Generates WAVs under `out_dir/{train,dev,eval}/` and returns the
/// manifest (also written as `out_dir/manifest.csv`). Same seed and sizes
/// give byte-identical files and manifest.
pub fn build_corpus(
    out_dir: &Path,
    sizes: SubsetSizes,
    bonafide_frac: f64,
    cfg: &SpoofGeneratorConfig,
    rng: &Rng,
) -> Result<DatasetManifest, SynthError> {
    cfg.validate()?;
    if !(0.0..=1.0).contains(&bonafide_frac) {
        return Err(SynthError::InvalidConfig {
            detail: format!("bonafide_frac {bonafide_frac} outside [0,1]"),
        });
    }
    let mut entries = Vec::new();
    for (subset, n, tag) in [
        (Subset::Train, sizes.train, 0u64),
        (Subset::Dev, sizes.dev, 1),
        (Subset::Eval, sizes.eval, 2),
    ] {
        if n == 0 {
            return Err(SynthError::InvalidConfig {
                detail: format!("subset {subset} is empty"),
            });
        }
        let n_bona = ((n as f64 * bonafide_frac).round() as usize).clamp(1, n - 1);
        let n_spoof = n - n_bona;
        let dir = out_dir.join(subset.as_str());
        std::fs::create_dir_all(&dir).map_err(|e| SynthError::Io {
            path: dir.display().to_string(),
            source: e,
        })?;
        let bona = gen_bonafide(&rng.split(tag).split(0), n_bona);
        let spoof = gen_spoof(&rng.split(tag).split(1), cfg, n_spoof)?;
        for (i, w) in bona.iter().enumerate() {
            let rel = format!("{}/bonafide_{i:04}.wav", subset.as_str());
            write_wav(&out_dir.join(&rel), w)?;
            entries.push(ManifestEntry {
                path: rel,
                label: Label::Bonafide,
                subset,
            });
        }
        for (i, w) in spoof.iter().enumerate() {
            let rel = format!("{}/spoof_{i:04}.wav", subset.as_str());
            write_wav(&out_dir.join(&rel), w)?;
            entries.push(ManifestEntry {
                path: rel,
                label: Label::Spoof,
                subset,
            });
        }
    }
    let manifest = DatasetManifest { entries };
    crate::manifest::save_manifest(&manifest, &out_dir.join("manifest.csv"))?;
    Ok(manifest)
}
