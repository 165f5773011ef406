//! End-to-end optimization of the spoofing detector: the composite
//! objective (log-mel reconstruction, KL regularization, weighted cross
//! entropy), the two-phase loop that warms the backbone up on
//! reconstruction and then trains adapters on top of it frozen, and the
//! checkpoint format.
//!
//! Runs are pure functions of their seed: data order, augmentation and
//! reparameterization noise all derive from pinned random streams, so a
//! repeated run writes byte-identical checkpoints.

mod checkpoint;
mod config;
mod data;
mod error;
mod loss;
mod trainer;

pub use checkpoint::{
    load_checkpoint, save_checkpoint, CheckpointMeta, CHECKPOINT_MAGIC, CHECKPOINT_VERSION,
};
pub use config::{LossConfig, TrainConfig};
pub use data::{clip_from_waveform, load_subset, LoadedClip};
pub use error::TrainError;
pub use loss::{
    ensure_finite_scalar, loss_cls_node, loss_kl_node, loss_recon_node, mel_node, total_loss_node,
    MelBank, MelNodes,
};
pub use trainer::{
    bonafide_probability, score_clips, train, train_with, write_history_ndjson, EpochStats,
    TrainOutcome,
};
