use std::path::Path;

use synth_data::{build_corpus, load_manifest, Subset};
use tensor_core::Rng;
use training::{
    load_checkpoint, load_subset, save_checkpoint, train_with, write_history_ndjson,
    CheckpointMeta, LoadedClip,
};

use crate::config::RunConfig;
use crate::entropy_report::{
    entropy_stats, write_entropy_summary_json, write_frame_stats_csv, write_histogram_csv,
};
use crate::error::EvalError;
use crate::gradcheck::run_gradcheck;
use crate::perturb_report::{perturb_eval, write_perturb_csv};
use crate::report::{evaluate, write_scores_csv, write_summary_json};

pub const RESOLVED_CONFIG_FILE: &str = "resolved_config.toml";
pub const CHECKPOINT_FILE: &str = "checkpoint.ckpt";
pub const HISTORY_FILE: &str = "history.ndjson";
pub const SCORES_FILE: &str = "scores.csv";
pub const SUMMARY_FILE: &str = "summary.json";
pub const FRAME_STATS_FILE: &str = "frame_stats.csv";
pub const HISTOGRAM_FILE: &str = "entropy_histogram.csv";
pub const ENTROPY_SUMMARY_FILE: &str = "entropy_summary.json";
pub const PERTURB_FILE: &str = "perturb.csv";

pub fn parse_subset(s: &str) -> Result<Subset, EvalError> {
    match s {
        "train" => Ok(Subset::Train),
        "dev" => Ok(Subset::Dev),
        "eval" => Ok(Subset::Eval),
        other => Err(EvalError::Config {
            detail: format!("subset {other:?} not one of train, dev, eval"),
        }),
    }
}

/// Reads one subset through the manifest in `data_dir`.
pub fn load_clips(data_dir: &Path, subset: Subset) -> Result<Vec<LoadedClip>, EvalError> {
    let manifest = load_manifest(&data_dir.join("manifest.csv"))?;
    Ok(load_subset(data_dir, &manifest, subset)?)
}

fn ensure_dir(dir: &Path) -> Result<(), EvalError> {
    std::fs::create_dir_all(dir).map_err(|e| EvalError::Io {
        path: dir.display().to_string(),
        source: e,
    })
}

/// Loads a checkpoint and folds its embedded model configuration into
/// the resolved run configuration, so reports hash what actually ran.
fn load_model(
    checkpoint: &Path,
    cfg: &mut RunConfig,
) -> Result<(model::Model<f32>, CheckpointMeta), EvalError> {
    let (model, meta) = load_checkpoint(checkpoint)?;
    cfg.model = model.cfg.clone();
    Ok((model, meta))
}

// ----------------------------------------------------------------------
// subcommands
// ----------------------------------------------------------------------

pub fn cmd_gen_data(
    config: Option<&Path>,
    out: &Path,
    seed: Option<u64>,
) -> Result<(), EvalError> {
    let mut cfg = RunConfig::load(config)?;
    if let Some(s) = seed {
        cfg.data.seed = s;
    }
    ensure_dir(out)?;
    let manifest = build_corpus(
        out,
        cfg.data.sizes,
        cfg.data.bonafide_frac,
        &cfg.data.spoof,
        &Rng::new(cfg.data.seed),
    )?;
    cfg.write_resolved(out)?;
    println!(
        "wrote {} clips under {} (seed {})",
        manifest.entries.len(),
        out.display(),
        cfg.data.seed
    );
    Ok(())
}

pub fn cmd_train(
    config: Option<&Path>,
    data: &Path,
    out: &Path,
    seed: Option<u64>,
) -> Result<(), EvalError> {
    let mut cfg = RunConfig::load(config)?;
    if let Some(s) = seed {
        cfg.train.seed = s;
    }
    ensure_dir(out)?;

    let manifest = load_manifest(&data.join("manifest.csv"))?;
    let train_clips = load_subset(data, &manifest, Subset::Train)?;
    let dev_clips = load_subset(data, &manifest, Subset::Dev)?;
    println!(
        "training on {} clips, validating on {} (seed {})",
        train_clips.len(),
        dev_clips.len(),
        cfg.train.seed
    );

    let outcome = train_with(
        cfg.model.clone(),
        &cfg.loss,
        &cfg.train,
        &train_clips,
        &dev_clips,
        |s| {
            println!(
                "epoch {:>3}  recon {:.5}  kl {:.5}  cls {:.5}  total {:.5}  dev_eer {:.4}",
                s.epoch, s.l_recon, s.l_kl, s.l_cls, s.total, s.dev_eer
            );
        },
    )?;

    save_checkpoint(
        &outcome.model,
        CheckpointMeta {
            epoch: outcome.best_epoch,
            dev_eer: outcome.best_dev_eer,
        },
        &out.join(CHECKPOINT_FILE),
    )?;
    write_history_ndjson(&out.join(HISTORY_FILE), &outcome.history)?;
    cfg.write_resolved(out)?;
    println!(
        "kept epoch {} (dev EER {:.4}) in {}",
        outcome.best_epoch,
        outcome.best_dev_eer,
        out.join(CHECKPOINT_FILE).display()
    );
    Ok(())
}

pub fn cmd_eval(
    config: Option<&Path>,
    checkpoint: &Path,
    data: &Path,
    subset: &str,
    out: &Path,
) -> Result<(), EvalError> {
    let mut cfg = RunConfig::load(config)?;
    let subset = parse_subset(subset)?;
    let (model, meta) = load_model(checkpoint, &mut cfg)?;
    let clips = load_clips(data, subset)?;
    ensure_dir(out)?;

    let report = evaluate(&model, &clips)?;
    write_scores_csv(&out.join(SCORES_FILE), &report)?;
    write_summary_json(&out.join(SUMMARY_FILE), &report, &cfg.hash()?)?;
    cfg.write_resolved(out)?;
    println!(
        "{} {subset} clips ({} bonafide, {} spoof), checkpoint epoch {}",
        report.rows.len(),
        report.n_bonafide,
        report.n_spoof,
        meta.epoch
    );
    println!("EER {:.4} at threshold {:.4}", report.eer, report.threshold);
    Ok(())
}

pub fn cmd_entropy_stats(
    config: Option<&Path>,
    checkpoint: &Path,
    data: &Path,
    subset: &str,
    out: &Path,
) -> Result<(), EvalError> {
    let mut cfg = RunConfig::load(config)?;
    let subset = parse_subset(subset)?;
    let (model, _) = load_model(checkpoint, &mut cfg)?;
    let clips = load_clips(data, subset)?;
    ensure_dir(out)?;

    let stats = entropy_stats(&model, &clips)?;
    write_frame_stats_csv(&out.join(FRAME_STATS_FILE), &stats)?;
    write_histogram_csv(&out.join(HISTOGRAM_FILE), &stats)?;
    write_entropy_summary_json(&out.join(ENTROPY_SUMMARY_FILE), &stats)?;
    cfg.write_resolved(out)?;
    let s = &stats.summary;
    println!(
        "utterance entropy: bonafide {:.4}, spoof {:.4}, gap {:.4}",
        s.mean_bonafide, s.mean_spoof, s.gap
    );
    println!(
        "separation AUC {:.4} ({} runs higher)",
        s.auc_direction_free, s.higher_class
    );
    Ok(())
}

pub fn cmd_perturb_eval(
    config: Option<&Path>,
    checkpoint: &Path,
    data: &Path,
    subset: &str,
    out: &Path,
    seed: Option<u64>,
) -> Result<(), EvalError> {
    let mut cfg = RunConfig::load(config)?;
    let subset = parse_subset(subset)?;
    let (model, _) = load_model(checkpoint, &mut cfg)?;
    let clips = load_clips(data, subset)?;
    ensure_dir(out)?;

    let cells = perturb_eval(&model, &clips, seed.unwrap_or(cfg.train.seed))?;
    write_perturb_csv(&out.join(PERTURB_FILE), &cells)?;
    cfg.write_resolved(out)?;
    for c in &cells {
        println!("{:<18} EER {:.4}", c.spec, c.eer);
    }
    Ok(())
}

pub fn cmd_gradcheck() -> Result<(), EvalError> {
    let results = run_gradcheck()?;
    let mut failures = Vec::new();
    for r in &results {
        println!(
            "[{}] {:<28} max rel err {:.3e} (bound {:.0e})",
            if r.passed() { "PASS" } else { "FAIL" },
            r.name,
            r.max_rel_err,
            r.bound
        );
        if !r.passed() {
            failures.push(r.name.clone());
        }
    }
    if !failures.is_empty() {
        return Err(EvalError::Data {
            detail: format!("gradient probes failed: {}", failures.join(", ")),
        });
    }
    Ok(())
}
