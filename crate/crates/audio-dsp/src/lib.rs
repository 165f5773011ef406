//! Plain (non-differentiable) signal processing for the spoofing detector:
//! clip standardization, the STFT/log-mel front-end, training-time noise
//! augmentation, and the duration/bitrate perturbations used by the
//! robustness sweep.
//!
//! The model crate mirrors the mel path with differentiable ops; it pulls
//! the window and filterbank from here so the two stay in lock step.

mod augment;
mod error;
mod mel;
mod perturb;
mod stft;
mod wav;
mod wave;

pub use augment::{rawboost_augment, RawBoostConfig};
pub use error::DspError;
pub use mel::{mel_filterbank, mel_spectrogram, MelSpectrogram, LOG_FLOOR, MEL_BINS};
pub use perturb::{bitrate_perturb, duration_perturb, PerturbSpec};
pub use stft::{frame_count, hann_window, stft_magnitude, HOP, N_BINS, WIN};
pub use wav::{read_wav, write_wav};
pub use wave::{standardize_clip, Waveform, CLIP_SAMPLES, SAMPLE_RATE};
