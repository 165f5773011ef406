//! Minimal tensor library with reverse-mode automatic differentiation.
//!
//! Everything the detector needs and nothing more: dense row-major tensors,
//! a tape-based graph covering the ops the model is built from, Adam, a
//! splittable deterministic RNG, and a finite-difference gradient checker.
//!
//! The graph is generic over the element type. Production code runs `f32`;
//! gradient checks instantiate the same ops at `f64` so the comparison
//! against central differences has numerical headroom.

mod adam;
mod error;
mod gradcheck;
mod graph;
pub mod kernels;
mod rng;
mod tensor;

pub use adam::{adam_step, AdamConfig, AdamState};
pub use error::TensorError;
pub use gradcheck::{grad_check, GradCheckReport};
pub use graph::{Graph, NodeId};
pub use rng::Rng;
pub use tensor::Tensor;

use std::fmt::Debug;

/// Element type of tensors and graphs. Implemented for `f32` and `f64`.
pub trait Scalar: rustfft::FftNum + num_traits::Float + Debug {
    fn of(x: f64) -> Self;
    fn as_f64(self) -> f64;
}

impl Scalar for f32 {
    fn of(x: f64) -> Self {
        x as f32
    }
    fn as_f64(self) -> f64 {
        self as f64
    }
}

impl Scalar for f64 {
    fn of(x: f64) -> Self {
        x
    }
    fn as_f64(self) -> f64 {
        self
    }
}
