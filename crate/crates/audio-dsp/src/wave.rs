use crate::error::DspError;

pub const SAMPLE_RATE: u32 = 16000;

/// Canonical clip length: a hair over four seconds at 16 kHz.
pub const CLIP_SAMPLES: usize = 64600;

/// Mono 16 kHz audio. Samples are finite floats, nominally in [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    pub samples: Vec<f32>,
    pub sample_rate: u32,
}

impl Waveform {
    pub fn from_samples(samples: Vec<f32>) -> Result<Self, DspError> {
        if samples.is_empty() {
            return Err(DspError::EmptyInput {
                op: "Waveform::from_samples",
            });
        }
        if samples.iter().any(|s| !s.is_finite()) {
            return Err(DspError::NonFinite {
                op: "Waveform::from_samples",
            });
        }
        Ok(Waveform {
            samples,
            sample_rate: SAMPLE_RATE,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Forces a clip to exactly `CLIP_SAMPLES` samples: longer input keeps its
/// prefix, shorter input is tiled end-to-end with the final tile truncated.
pub fn standardize_clip(w: &Waveform) -> Result<Waveform, DspError> {
    if w.samples.is_empty() {
        return Err(DspError::EmptyInput {
            op: "standardize_clip",
        });
    }
    let mut out = Vec::with_capacity(CLIP_SAMPLES);
    while out.len() < CLIP_SAMPLES {
        let take = (CLIP_SAMPLES - out.len()).min(w.samples.len());
        out.extend_from_slice(&w.samples[..take]);
    }
    Ok(Waveform {
        samples: out,
        sample_rate: w.sample_rate,
    })
}
