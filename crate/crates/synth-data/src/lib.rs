//! Synthetic bonafide/spoof corpus. Bonafide clips are sums of many jittered
//! harmonic stacks plus broadband noise; spoof clips come out of a frozen
//! random linear decoder driven by a low-dimensional latent track. The only
//! systematic difference between the classes is intrinsic dimensionality,
//! which is exactly what the detector is supposed to pick up.

mod bonafide;
mod corpus;
mod error;
mod manifest;
pub mod rank;
mod spoof;

pub use bonafide::{broadband_noise, gen_bonafide, BONAFIDE_COMPONENTS};
pub use corpus::{build_corpus, SubsetSizes, DEFAULT_BONAFIDE_FRAC};
pub use error::SynthError;
pub use manifest::{load_manifest, save_manifest, DatasetManifest, Label, ManifestEntry, Subset};
pub use spoof::{gen_spoof, SpoofGeneratorConfig};
