use audio_dsp::{Waveform, CLIP_SAMPLES, SAMPLE_RATE};
use serde::{Deserialize, Serialize};
use tensor_core::Rng;

use crate::bonafide::BONAFIDE_COMPONENTS;
use crate::error::SynthError;

/// Latent frames per clip: 202 steps of 320 samples, trimmed to 64600.
const LATENT_FRAMES: usize = 202;

/// Upsampling factors of the frozen decoder stages (product 320).
const STAGE_RATES: [usize; 5] = [5, 4, 4, 2, 2];
const STAGE_WIDTHS: [usize; 6] = [8, 16, 12, 8, 4, 1];

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SpoofGeneratorConfig {
    /// Latent dimension k, the information bottleneck.
    pub latent_dim: usize,
    /// Seed for the frozen decoder weights, shared by every clip.
    pub decoder_seed: u64,
    /// Component count of the bonafide generator; k must stay below it so
    /// the two classes actually differ in intrinsic dimension.
    pub n_harmonics: usize,
    /// RMS of additive noise relative to the decoded signal. Kept small so
    /// spoof clips stay close to their low-rank skeleton.
    pub noise_floor: f64,
}

impl Default for SpoofGeneratorConfig {
    fn default() -> Self {
        SpoofGeneratorConfig {
            latent_dim: 8,
            decoder_seed: 7100,
            n_harmonics: BONAFIDE_COMPONENTS,
            noise_floor: 0.02,
        }
    }
}

impl SpoofGeneratorConfig {
    pub fn validate(&self) -> Result<(), SynthError> {
        if self.latent_dim < 1 || self.latent_dim > 64 {
            return Err(SynthError::InvalidConfig {
                detail: format!("latent_dim {} outside 1..=64", self.latent_dim),
            });
        }
        if self.latent_dim >= self.n_harmonics {
            return Err(SynthError::InvalidConfig {
                detail: format!(
                    "latent_dim {} must be below the bonafide component count {}",
                    self.latent_dim, self.n_harmonics
                ),
            });
        }
        if !self.noise_floor.is_finite() || self.noise_floor < 0.0 {
            return Err(SynthError::InvalidConfig {
                detail: "noise_floor must be finite and nonnegative".into(),
            });
        }
        Ok(())
    }
}

/// A stack of random linear transposed convolutions with no nonlinearities.
/// Linearity is the point: every output sample is a linear function of the
/// latents, so clip rank is pinned to latent dimension by construction.
struct FrozenDecoder {
    // weights[stage][c_in][c_out][tap], kernel length 2*rate
    weights: Vec<Vec<f32>>,
}

impl FrozenDecoder {
    fn new(latent_dim: usize, seed: u64) -> FrozenDecoder {
        let rng = Rng::new(seed);
        let mut weights = Vec::new();
        let mut widths = STAGE_WIDTHS;
        widths[0] = latent_dim;
        for (s, &rate) in STAGE_RATES.iter().enumerate() {
            let (c_in, c_out, k) = (widths[s], widths[s + 1], 2 * rate);
            let mut stage_rng = rng.split(s as u64);
            let std = 1.0 / ((c_in * k) as f64).sqrt();
            let w: Vec<f32> = (0..c_in * c_out * k)
                .map(|_| (stage_rng.normal() * std) as f32)
                .collect();
            weights.push(w);
        }
        FrozenDecoder { weights }
    }

    /// x is [c_in, t] row-major; output [c_out, t*rate].
    fn stage(&self, s: usize, x: &[f32], t: usize, latent_dim: usize) -> Vec<f32> {
        let mut widths = STAGE_WIDTHS;
        widths[0] = latent_dim;
        let (c_in, c_out, rate) = (widths[s], widths[s + 1], STAGE_RATES[s]);
        let k = 2 * rate;
        let t_out = t * rate;
        let full = t * rate + rate;
        let mut acc = vec![0f32; c_out * full];
        let w = &self.weights[s];
        for ci in 0..c_in {
            let xrow = &x[ci * t..(ci + 1) * t];
            for co in 0..c_out {
                let wrow = &w[(ci * c_out + co) * k..(ci * c_out + co + 1) * k];
                let arow = &mut acc[co * full..(co + 1) * full];
                for (j, &xv) in xrow.iter().enumerate() {
                    let base = j * rate;
                    for (tap, &wv) in wrow.iter().enumerate() {
                        arow[base + tap] += wv * xv;
                    }
                }
            }
        }
        // trim half a kernel from each side so length is exactly t*rate
        let mut out = vec![0f32; c_out * t_out];
        let off = rate / 2;
        for co in 0..c_out {
            out[co * t_out..(co + 1) * t_out]
                .copy_from_slice(&acc[co * full + off..co * full + off + t_out]);
        }
        out
    }

    fn decode(&self, z: &[f32], latent_dim: usize) -> Vec<f32> {
        let mut x = z.to_vec();
        let mut t = LATENT_FRAMES;
        for s in 0..STAGE_RATES.len() {
            x = self.stage(s, &x, t, latent_dim);
            t *= STAGE_RATES[s];
        }
        x.truncate(CLIP_SAMPLES);
        x
    }
}

/// Latent track: standard normal control points every 20..28 frames,
/// linearly interpolated. Slow variation keeps nearly all frame-space
/// energy inside the k-dimensional latent subspace.
fn smooth_latents(latent_dim: usize, rng: &mut Rng) -> Vec<f32> {
    let spacing = 20 + rng.below(9);
    let n_ctrl = LATENT_FRAMES / spacing + 2;
    let ctrl: Vec<f64> = (0..n_ctrl * latent_dim).map(|_| rng.normal()).collect();
    let mut z = vec![0f32; latent_dim * LATENT_FRAMES];
    for j in 0..LATENT_FRAMES {
        let pos = j as f64 / spacing as f64;
        let m = (pos as usize).min(n_ctrl - 2);
        let a = pos - m as f64;
        for d in 0..latent_dim {
            let v = (1.0 - a) * ctrl[m * latent_dim + d] + a * ctrl[(m + 1) * latent_dim + d];
            z[d * LATENT_FRAMES + j] = v as f32;
        }
    }
    z
}

fn gen_one(decoder: &FrozenDecoder, cfg: &SpoofGeneratorConfig, rng: &mut Rng) -> Waveform {
    let z = smooth_latents(cfg.latent_dim, rng);
    let mut x = decoder.decode(&z, cfg.latent_dim);
    if cfg.noise_floor > 0.0 {
        let rms =
            (x.iter().map(|&v| v as f64 * v as f64).sum::<f64>() / x.len() as f64).sqrt();
        let g = cfg.noise_floor * rms;
        for v in x.iter_mut() {
            *v += (g * rng.normal()) as f32;
        }
    }
    let peak = x.iter().fold(0f32, |m, &v| m.max(v.abs()));
    let scale = 0.9 / peak;
    for v in x.iter_mut() {
        *v *= scale;
    }
    Waveform {
        samples: x,
        sample_rate: SAMPLE_RATE,
    }
}

/// Clip i depends only on (`rng` seed, i, decoder_seed); the decoder itself
/// is built once and shared by all n clips.
pub fn gen_spoof(
    rng: &Rng,
    cfg: &SpoofGeneratorConfig,
    n: usize,
) -> Result<Vec<Waveform>, SynthError> {
    cfg.validate()?;
    let decoder = FrozenDecoder::new(cfg.latent_dim, cfg.decoder_seed);
    Ok((0..n)
        .map(|i| gen_one(&decoder, cfg, &mut rng.split(i as u64)))
        .collect())
}
