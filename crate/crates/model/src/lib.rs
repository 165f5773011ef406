//! The detector network.
//!
//! A small convolutional-transformer backbone turns a standardized clip
//! into a feature sequence; twin convolutional encoders map that to a
//! diagonal-Gaussian latent per frame; a transposed-convolution decoder
//! reconstructs the waveform from latent samples; and a two-layer
//! classifier reads nothing but the per-frame entropy of the posterior.
//! The backbone can be frozen while lightweight residual adapters keep
//! its features adjustable.
//!
//! Everything is built on the `tensor_core` graph, generic over f32 and
//! f64 so gradient probes can run at full double precision against the
//! exact production composition.

pub mod config;
pub mod entropy;
pub mod error;
pub mod net;
pub mod params;

pub use config::{AdapterPlacement, ModelConfig, LN_EPS, LOG_SIGMA_CLAMP};
pub use entropy::{frame_entropy, EntropySequence, LatentGaussian};
pub use error::ModelError;
pub use net::{entropy_node, reparameterize, Inference, Model, Mounted, TrainPhase};
pub use params::ParamStore;
