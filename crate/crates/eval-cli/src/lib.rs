//! Command-line front end tying the whole detector together: corpus
//! generation, training, scoring with EER reports, entropy distribution
//! statistics, the duration/bitrate robustness sweep and a
//! finite-difference gradient verification. Every command is a plain
//! function here so tests drive them in-process; the binary is a thin
//! argument parser on top.

mod commands;
mod config;
mod entropy_report;
mod error;
mod gradcheck;
mod perturb_report;
mod report;

pub use commands::{
    cmd_entropy_stats, cmd_eval, cmd_gen_data, cmd_gradcheck, cmd_perturb_eval, cmd_train,
    load_clips, parse_subset, CHECKPOINT_FILE, ENTROPY_SUMMARY_FILE, FRAME_STATS_FILE,
    HISTOGRAM_FILE, HISTORY_FILE, PERTURB_FILE, RESOLVED_CONFIG_FILE, SCORES_FILE, SUMMARY_FILE,
};
pub use config::{fnv1a64, DataConfig, RunConfig};
pub use entropy_report::{
    entropy_stats, write_entropy_summary_json, write_frame_stats_csv, write_histogram_csv,
    EntropyStats, EntropySummary, FrameStat, HistBin, HISTOGRAM_BINS,
};
pub use error::EvalError;
pub use gradcheck::{run_gradcheck, GradCheckResult};
pub use perturb_report::{perturb_eval, write_perturb_csv, PerturbCell};
pub use report::{evaluate, write_scores_csv, write_summary_json, ClipScore, EvalReport};
