use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use tensor_core::Tensor;

use crate::error::DspError;
use crate::wave::Waveform;

pub const WIN: usize = 1024;
pub const HOP: usize = 256;
pub const N_BINS: usize = WIN / 2 + 1;

/// Periodic Hann window of length `WIN`.
pub fn hann_window() -> Vec<f32> {
    (0..WIN)
        .map(|n| 0.5 - 0.5 * (std::f32::consts::TAU * n as f32 / WIN as f32).cos())
        .collect()
}

/// Number of analysis frames for a clip of `len` samples. No center padding:
/// the first frame starts at sample 0 and the last one ends inside the clip.
pub fn frame_count(len: usize) -> usize {
    (len - WIN) / HOP + 1
}

/// Magnitude spectrogram, shape [T, 513].
pub fn stft_magnitude(w: &Waveform) -> Result<Tensor<f32>, DspError> {
    if w.samples.len() < WIN {
        return Err(DspError::TooShort {
            op: "stft_magnitude",
            len: w.samples.len(),
            need: WIN,
        });
    }
    let window = hann_window();
    let t = frame_count(w.samples.len());
    let mut planner = FftPlanner::<f32>::new();
    let fft = planner.plan_fft_forward(WIN);
    let mut out = Tensor::zeros(&[t, N_BINS]);
    let mut buf = vec![Complex::new(0.0f32, 0.0); WIN];
    for frame in 0..t {
        let start = frame * HOP;
        for (n, b) in buf.iter_mut().enumerate() {
            *b = Complex::new(w.samples[start + n] * window[n], 0.0);
        }
        fft.process(&mut buf);
        let row = &mut out.data[frame * N_BINS..(frame + 1) * N_BINS];
        for (k, r) in row.iter_mut().enumerate() {
            *r = buf[k].norm();
        }
    }
    Ok(out)
}
