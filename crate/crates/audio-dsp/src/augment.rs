use tensor_core::Rng;

use crate::wave::Waveform;

/// Switches for the three augmentation families. The colored-noise SNR is
/// drawn uniformly from `snr_db_range` per call.
#[derive(Debug, Clone)]
pub struct RawBoostConfig {
    pub convolutive: bool,
    pub impulsive: bool,
    pub colored: bool,
    pub snr_db_range: (f64, f64),
}

impl Default for RawBoostConfig {
    fn default() -> Self {
        RawBoostConfig {
            convolutive: true,
            impulsive: true,
            colored: true,
            snr_db_range: (10.0, 40.0),
        }
    }
}

impl RawBoostConfig {
    pub fn disabled() -> Self {
        RawBoostConfig {
            convolutive: false,
            impulsive: false,
            colored: false,
            snr_db_range: (10.0, 40.0),
        }
    }
}

/// Linear convolution keeping the input length, with the filter delay
/// compensated. Samples outside the clip are treated as zero.
pub(crate) fn convolve_same(x: &[f32], h: &[f64]) -> Vec<f32> {
    let mid = (h.len() / 2) as isize;
    let n = x.len() as isize;
    let mut y = vec![0f32; x.len()];
    for (i, yi) in y.iter_mut().enumerate() {
        let mut acc = 0f64;
        for (t, &ht) in h.iter().enumerate() {
            let idx = i as isize + mid - t as isize;
            if idx >= 0 && idx < n {
                acc += ht * x[idx as usize] as f64;
            }
        }
        *yi = acc as f32;
    }
    y
}

// ---------------------------------------------------------------------------
// the three noise families
// ---------------------------------------------------------------------------

/// Multi-band filtering built by frequency sampling: a flat response with a
/// handful of random Gaussian-shaped notches, turned into a 65-tap
/// linear-phase FIR.
fn convolutive_noise(x: &[f32], rng: &mut Rng) -> Vec<f32> {
    const TAPS: usize = 65;
    const GRID: usize = TAPS / 2 + 1;
    let mut mag = [1.0f64; GRID];
    let n_notches = 2 + rng.below(4) as usize;
    for _ in 0..n_notches {
        let center = 2.0 + rng.uniform() * 28.0;
        let width = 1.0 + rng.uniform() * 3.0;
        let depth = 0.1 + rng.uniform() * 0.8;
        for (m, g) in mag.iter_mut().enumerate() {
            let d = (m as f64 - center) / width;
            *g *= 1.0 - depth * (-0.5 * d * d).exp();
        }
    }
    let mid = (TAPS / 2) as f64;
    let mut h = [0f64; TAPS];
    for (n, hn) in h.iter_mut().enumerate() {
        let mut acc = mag[0];
        for (m, &g) in mag.iter().enumerate().skip(1) {
            acc += 2.0 * g * (std::f64::consts::TAU * m as f64 * (n as f64 - mid) / TAPS as f64).cos();
        }
        *hn = acc / TAPS as f64;
    }
    convolve_same(x, &h)
}

/// Impulses at random positions whose amplitude scales with the local sample,
/// so silence stays silent.
fn impulsive_noise(x: &mut [f32], rng: &mut Rng) {
    let frac = 0.001 + rng.uniform() * 0.009;
    let count = (x.len() as f64 * frac) as usize;
    let scale = 0.1 + rng.uniform() * 1.9;
    for _ in 0..count {
        let p = rng.below(x.len());
        let u = rng.uniform() * 2.0 - 1.0;
        x[p] += (scale * u * x[p] as f64) as f32;
    }
}

/// Stationary colored noise from a one-pole lowpass over white Gaussian
/// samples, scaled to hit the drawn SNR exactly.
fn colored_noise(x: &mut [f32], snr_db_range: (f64, f64), rng: &mut Rng) {
    let snr_db = snr_db_range.0 + rng.uniform() * (snr_db_range.1 - snr_db_range.0);
    let pole = 0.5 + rng.uniform() * 0.45;
    let n = x.len();
    let mut noise = vec![0f64; n];
    let mut state = 0f64;
    for v in noise.iter_mut() {
        state = pole * state + (1.0 - pole) * rng.normal();
        *v = state;
    }
    let ps: f64 = x.iter().map(|&s| s as f64 * s as f64).sum::<f64>() / n as f64;
    let pn: f64 = noise.iter().map(|&v| v * v).sum::<f64>() / n as f64;
    if ps > 0.0 && pn > 0.0 {
        let g = (ps / (pn * 10f64.powf(snr_db / 10.0))).sqrt();
        for (s, v) in x.iter_mut().zip(noise.iter()) {
            *s += (g * v) as f32;
        }
    }
}

/// Applies the enabled families in order (convolutive, impulsive, colored)
/// and clips the result to [-1, 1]. With everything disabled this is the
/// identity on in-range input.
pub fn rawboost_augment(w: &Waveform, cfg: &RawBoostConfig, rng: &mut Rng) -> Waveform {
    let mut x = w.samples.clone();
    if cfg.convolutive {
        x = convolutive_noise(&x, rng);
    }
    if cfg.impulsive {
        impulsive_noise(&mut x, rng);
    }
    if cfg.colored {
        colored_noise(&mut x, cfg.snr_db_range, rng);
    }
    for v in x.iter_mut() {
        *v = v.clamp(-1.0, 1.0);
    }
    Waveform {
        samples: x,
        sample_rate: w.sample_rate,
    }
}
