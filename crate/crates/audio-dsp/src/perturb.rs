use tensor_core::Rng;

use crate::augment::convolve_same;
use crate::error::DspError;
use crate::wave::{standardize_clip, Waveform, CLIP_SAMPLES, SAMPLE_RATE};

/// One cell of the robustness sweep grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PerturbSpec {
    Duration { seconds: u32 },
    Bitrate { kbps: u32 },
}

impl PerturbSpec {
    /// The full 3+3 sweep grid in report order.
    pub fn all() -> Vec<PerturbSpec> {
        vec![
            PerturbSpec::Duration { seconds: 2 },
            PerturbSpec::Duration { seconds: 3 },
            PerturbSpec::Duration { seconds: 4 },
            PerturbSpec::Bitrate { kbps: 115 },
            PerturbSpec::Bitrate { kbps: 165 },
            PerturbSpec::Bitrate { kbps: 190 },
        ]
    }

    pub fn label(&self) -> String {
        match self {
            PerturbSpec::Duration { seconds } => format!("duration_{seconds}s"),
            PerturbSpec::Bitrate { kbps } => format!("bitrate_{kbps}kbps"),
        }
    }

    pub fn apply(&self, w: &Waveform, rng: &mut Rng) -> Result<Waveform, DspError> {
        match self {
            PerturbSpec::Duration { seconds } => duration_perturb(w, *seconds, rng),
            PerturbSpec::Bitrate { kbps } => bitrate_perturb(w, *kbps),
        }
    }
}

/// Cuts a random contiguous segment of the requested duration and tiles it
/// back out to the canonical clip length. Four seconds means the whole
/// standardized clip, so that setting is the identity.
pub fn duration_perturb(w: &Waveform, seconds: u32, rng: &mut Rng) -> Result<Waveform, DspError> {
    let seg = match seconds {
        2 => 2 * SAMPLE_RATE as usize,
        3 => 3 * SAMPLE_RATE as usize,
        4 => CLIP_SAMPLES,
        _ => {
            return Err(DspError::InvalidArg {
                op: "duration_perturb",
                detail: format!("duration {seconds}s not in {{2,3,4}}"),
            })
        }
    };
    if w.samples.is_empty() {
        return Err(DspError::EmptyInput {
            op: "duration_perturb",
        });
    }
    let seg = seg.min(w.samples.len());
    let max_off = w.samples.len() - seg;
    let off = if max_off == 0 {
        0
    } else {
        rng.below(max_off + 1)
    };
    let cut = Waveform {
        samples: w.samples[off..off + seg].to_vec(),
        sample_rate: w.sample_rate,
    };
    standardize_clip(&cut)
}

/// Windowed-sinc lowpass, Hamming window, unity DC gain.
fn lowpass_taps(cutoff_hz: f64, taps: usize) -> Vec<f64> {
    let fc = cutoff_hz / SAMPLE_RATE as f64;
    let mid = (taps / 2) as f64;
    let mut h: Vec<f64> = (0..taps)
        .map(|n| {
            let t = n as f64 - mid;
            let sinc = if t == 0.0 {
                2.0 * fc
            } else {
                (std::f64::consts::TAU * fc * t).sin() / (std::f64::consts::PI * t)
            };
            let ham = 0.54 - 0.46 * (std::f64::consts::TAU * n as f64 / (taps - 1) as f64).cos();
            sinc * ham
        })
        .collect();
    let sum: f64 = h.iter().sum();
    for v in h.iter_mut() {
        *v /= sum;
    }
    h
}

/// Codec proxy, not a real MP3 encoder: a lowpass at a rate-dependent cutoff
/// followed by uniform requantization. Gives graded, deterministic
/// degradation without an external codec.
pub fn bitrate_perturb(w: &Waveform, kbps: u32) -> Result<Waveform, DspError> {
    let (cutoff_hz, bits) = match kbps {
        115 => (5500.0, 9u32),
        165 => (7000.0, 11),
        190 => (7500.0, 12),
        _ => {
            return Err(DspError::InvalidArg {
                op: "bitrate_perturb",
                detail: format!("bitrate {kbps} kbps not in {{115,165,190}}"),
            })
        }
    };
    let h = lowpass_taps(cutoff_hz, 101);
    let mut y = convolve_same(&w.samples, &h);
    let scale = ((1i32 << (bits - 1)) - 1) as f32;
    for v in y.iter_mut() {
        *v = ((*v * scale).round() / scale).clamp(-1.0, 1.0);
    }
    Ok(Waveform {
        samples: y,
        sample_rate: w.sample_rate,
    })
}
