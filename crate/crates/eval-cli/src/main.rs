use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use eval_cli::{
    cmd_entropy_stats, cmd_eval, cmd_gen_data, cmd_gradcheck, cmd_perturb_eval, cmd_train,
};

#[derive(Parser)]
#[command(
    name = "spoofdet",
    version,
    about = "Synthetic-speech detector: data generation, training and evaluation"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate the synthetic corpus and its manifest
    GenData {
        /// Run configuration TOML; defaults apply where absent
        #[arg(long)]
        config: Option<PathBuf>,
        /// Corpus output directory
        #[arg(long)]
        out: PathBuf,
        /// Overrides the corpus seed from the configuration
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Train the detector and keep the best dev-EER checkpoint
    Train {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Corpus directory holding manifest.csv
        #[arg(long)]
        data: PathBuf,
        /// Output directory for checkpoint and history
        #[arg(long)]
        out: PathBuf,
        /// Overrides the training seed from the configuration
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Score one subset and report its EER
    Eval {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        data: PathBuf,
        /// train, dev or eval
        #[arg(long, default_value = "eval")]
        subset: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Per-frame and per-utterance entropy statistics by class
    EntropyStats {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = "eval")]
        subset: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// EER under the duration and bitrate perturbation grid
    PerturbEval {
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long, default_value = "eval")]
        subset: String,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the sweep seed (defaults to the training seed)
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Verify analytic gradients against finite differences
    Gradcheck,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };

    let result = match cli.cmd {
        Cmd::GenData { config, out, seed } => cmd_gen_data(config.as_deref(), &out, seed),
        Cmd::Train {
            config,
            data,
            out,
            seed,
        } => cmd_train(config.as_deref(), &data, &out, seed),
        Cmd::Eval {
            config,
            checkpoint,
            data,
            subset,
            out,
        } => cmd_eval(config.as_deref(), &checkpoint, &data, &subset, &out),
        Cmd::EntropyStats {
            config,
            checkpoint,
            data,
            subset,
            out,
        } => cmd_entropy_stats(config.as_deref(), &checkpoint, &data, &subset, &out),
        Cmd::PerturbEval {
            config,
            checkpoint,
            data,
            subset,
            out,
            seed,
        } => cmd_perturb_eval(config.as_deref(), &checkpoint, &data, &subset, &out, seed),
        Cmd::Gradcheck => cmd_gradcheck(),
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
