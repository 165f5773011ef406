use tensor_core::Tensor;

use crate::error::DspError;
use crate::stft::{frame_count, stft_magnitude, N_BINS, WIN};
use crate::wave::{Waveform, SAMPLE_RATE};

pub const MEL_BINS: usize = 80;

/// Energies below this are clamped before the log.
pub const LOG_FLOOR: f32 = 1e-10;

const FMIN_HZ: f64 = 0.0;
const FMAX_HZ: f64 = 8000.0;

/// Log-mel energies, shape [T, 80].
#[derive(Debug, Clone)]
pub struct MelSpectrogram {
    pub frames: Tensor<f32>,
}

impl MelSpectrogram {
    pub fn t(&self) -> usize {
        self.frames.shape[0]
    }
}

fn hz_to_mel(f: f64) -> f64 {
    2595.0 * (1.0 + f / 700.0).log10()
}

fn mel_to_hz(m: f64) -> f64 {
    700.0 * (10f64.powf(m / 2595.0) - 1.0)
}

/// Triangular filterbank on the mel scale, shape [80, 513]. Filter edges are
/// spaced evenly in mel between 0 Hz and Nyquist; triangles are evaluated at
/// the FFT bin centers without area normalization.
pub fn mel_filterbank() -> Tensor<f32> {
    let lo = hz_to_mel(FMIN_HZ);
    let hi = hz_to_mel(FMAX_HZ);
    let edges: Vec<f64> = (0..MEL_BINS + 2)
        .map(|i| mel_to_hz(lo + (hi - lo) * i as f64 / (MEL_BINS + 1) as f64))
        .collect();
    let mut fb = Tensor::zeros(&[MEL_BINS, N_BINS]);
    for i in 0..MEL_BINS {
        let (l, c, r) = (edges[i], edges[i + 1], edges[i + 2]);
        let row = &mut fb.data[i * N_BINS..(i + 1) * N_BINS];
        for (j, cell) in row.iter_mut().enumerate() {
            let f = j as f64 * SAMPLE_RATE as f64 / WIN as f64;
            let rise = (f - l) / (c - l);
            let fall = (r - f) / (r - c);
            *cell = rise.min(fall).max(0.0) as f32;
        }
    }
    fb
}

/// Windowed power spectra pushed through the filterbank, then a floored
/// natural log. Shape [T, 80].
pub fn mel_spectrogram(w: &Waveform) -> Result<MelSpectrogram, DspError> {
    let mags = stft_magnitude(w)?;
    let t = frame_count(w.samples.len());
    let fb = mel_filterbank();
    let mut out = Tensor::zeros(&[t, MEL_BINS]);
    let mut power = vec![0f32; N_BINS];
    for frame in 0..t {
        let mrow = &mags.data[frame * N_BINS..(frame + 1) * N_BINS];
        for (p, &m) in power.iter_mut().zip(mrow.iter()) {
            *p = m * m;
        }
        let orow = &mut out.data[frame * MEL_BINS..(frame + 1) * MEL_BINS];
        for (i, cell) in orow.iter_mut().enumerate() {
            let frow = &fb.data[i * N_BINS..(i + 1) * N_BINS];
            let mut acc = 0f32;
            for (&fv, &pv) in frow.iter().zip(power.iter()) {
                acc = fv.mul_add(pv, acc);
            }
            *cell = acc.max(LOG_FLOOR).ln();
        }
    }
    Ok(MelSpectrogram { frames: out })
}
