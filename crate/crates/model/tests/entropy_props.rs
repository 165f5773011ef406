//! Entropy spot values and the full-Gaussian oracle.

use std::f64::consts::PI;

use model::{frame_entropy, LatentGaussian};
use tensor_core::{Rng, Tensor};

fn gaussian_with(log_sigma: Tensor<f32>) -> LatentGaussian<f32> {
    let mu = Tensor::zeros(&log_sigma.shape.clone());
    LatentGaussian::new(mu, log_sigma).unwrap()
}

#[test]
fn unit_sigma_is_exactly_zero() {
    let g = gaussian_with(Tensor::zeros(&[201, 192]));
    let e = frame_entropy(&g, false);
    assert!(e.h.iter().all(|&v| v == 0.0));
}

#[test]
fn sigma_e_gives_latent_dim() {
    let g = gaussian_with(Tensor::full(&[201, 192], 1.0f32));
    let e = frame_entropy(&g, false);
    assert!(e.h.iter().all(|&v| v == 192.0));
}

#[test]
fn reciprocal_sigmas_cancel() {
    let v = 2.0f32.ln();
    let g = gaussian_with(Tensor::new(vec![1, 2], vec![v, -v]).unwrap());
    let e = frame_entropy(&g, false);
    assert_eq!(e.h, vec![0.0]);
}

// The dropped constant: with the diagnostic flag the output must match
// the frame's full differential entropy, computed independently per cell
// as 0.5 * ln(2 pi e sigma^2).
#[test]
fn full_gaussian_oracle_over_random_posteriors() {
    let root = Rng::new(2024);
    let mut worst = 0.0f64;
    for case in 0..1000u64 {
        let mut r = root.split(case);
        let (t, k) = if case < 3 {
            (201, 192)
        } else {
            (1 + r.below(40), 1 + r.below(40))
        };
        let mut ls = Tensor::<f32>::zeros(&[t, k]);
        for v in ls.data.iter_mut() {
            *v = r.uniform_in(-7.0, 7.0) as f32;
        }
        let g = gaussian_with(ls);
        let with_constant = frame_entropy(&g, true);
        for (row, &h) in with_constant.h.iter().enumerate() {
            let mut oracle = 0.0f64;
            for i in 0..k {
                let sigma = (g.log_sigma.data[row * k + i] as f64).exp();
                oracle += 0.5 * (2.0 * PI * std::f64::consts::E * sigma * sigma).ln();
            }
            worst = worst.max((h - oracle).abs());
        }
    }
    assert!(worst < 1e-6, "worst absolute gap {worst:e}");
}

#[test]
fn flag_adds_fixed_offset() {
    let mut r = Rng::new(5);
    let mut ls = Tensor::<f32>::zeros(&[7, 13]);
    for v in ls.data.iter_mut() {
        *v = r.normal() as f32;
    }
    let g = gaussian_with(ls);
    let plain = frame_entropy(&g, false);
    let full = frame_entropy(&g, true);
    let offset = 13.0 / 2.0 * ((2.0 * PI).ln() + 1.0);
    for (a, b) in plain.h.iter().zip(&full.h) {
        assert!((b - a - offset).abs() < 1e-9);
    }
}
