use std::f64::consts::PI;

use tensor_core::{Scalar, Tensor};

use crate::error::ModelError;

/// Diagonal-Gaussian posterior over the latent sequence: per-frame mean
/// and log standard deviation, both `[C, K]`.
#[derive(Debug, Clone)]
pub struct LatentGaussian<F: Scalar> {
    pub mu: Tensor<F>,
    pub log_sigma: Tensor<F>,
}

impl<F: Scalar> LatentGaussian<F> {
    pub fn new(mu: Tensor<F>, log_sigma: Tensor<F>) -> Result<Self, ModelError> {
        if mu.shape.len() != 2 || mu.shape != log_sigma.shape {
            return Err(ModelError::Shape {
                op: "latent_gaussian",
                detail: format!(
                    "mu {:?} and log_sigma {:?} must be equal rank-2 shapes",
                    mu.shape, log_sigma.shape
                ),
            });
        }
        Ok(LatentGaussian { mu, log_sigma })
    }

    pub fn frames(&self) -> usize {
        self.mu.shape[0]
    }

    pub fn dims(&self) -> usize {
        self.mu.shape[1]
    }
}

/// One scalar entropy per latent frame.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropySequence {
    pub h: Vec<f64>,
}

impl EntropySequence {
    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    /// Utterance-level mean entropy.
    pub fn mean(&self) -> f64 {
        if self.h.is_empty() {
            return 0.0;
        }
        self.h.iter().sum::<f64>() / self.h.len() as f64
    }
}

/// Per-frame posterior entropy up to an additive constant: the sum of
/// log standard deviations across latent dimensions, accumulated at f64.
///
/// With `include_constant` the dropped Gaussian term K/2 * (ln 2pi + 1)
/// is added back, giving the full differential entropy of each frame.
pub fn frame_entropy<F: Scalar>(g: &LatentGaussian<F>, include_constant: bool) -> EntropySequence {
    let (t, k) = (g.frames(), g.dims());
    let constant = if include_constant {
        k as f64 / 2.0 * ((2.0 * PI).ln() + 1.0)
    } else {
        0.0
    };
    let ls = &g.log_sigma.data;
    let mut h = Vec::with_capacity(t);
    for r in 0..t {
        let mut acc = 0.0f64;
        for i in 0..k {
            acc += ls[r * k + i].as_f64();
        }
        h.push(acc + constant);
    }
    EntropySequence { h }
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_mismatch_rejected() {
        let mu: Tensor<f32> = Tensor::zeros(&[3, 4]);
        let ls: Tensor<f32> = Tensor::zeros(&[3, 5]);
        assert!(LatentGaussian::new(mu, ls).is_err());
    }

    #[test]
    fn unit_sigma_gives_zero() {
        let g = LatentGaussian::new(Tensor::<f32>::zeros(&[4, 6]), Tensor::zeros(&[4, 6])).unwrap();
        let e = frame_entropy(&g, false);
        assert_eq!(e.h, vec![0.0; 4]);
        assert_eq!(e.mean(), 0.0);
    }
}
