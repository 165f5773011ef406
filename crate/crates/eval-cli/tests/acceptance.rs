//! Whole-system acceptance run: every headline guarantee checked in one
//! sequential pass, each reported as a single PASS/FAIL line. The heart
//! is a seeded end-to-end experiment (generate corpus, train, score)
//! with a wall-clock budget; around it sit the analytic identities,
//! finite-difference gradient sweeps, determinism, ablation direction,
//! perturbation robustness and structural invariants.

use std::time::Instant;

use audio_dsp::{mel_spectrogram, Waveform, CLIP_SAMPLES, MEL_BINS};
use eval_cli::{entropy_stats, evaluate, perturb_eval, run_gradcheck};
use model::{frame_entropy, LatentGaussian, Model, ModelConfig, TrainPhase};
use scoring::{compute_eer, EerPoint, ScoreSet};
use synth_data::{
    build_corpus, gen_bonafide, gen_spoof, Label, SpoofGeneratorConfig, Subset, SubsetSizes,
};
use tensor_core::{grad_check, Graph, NodeId, Rng, Tensor, TensorError};
use training::{
    clip_from_waveform, load_subset, loss_cls_node, loss_kl_node, save_checkpoint, train,
    CheckpointMeta, LoadedClip, LossConfig, TrainConfig,
};

// ---------------------------------------------------------------------------
// experiment parameters
// ---------------------------------------------------------------------------

const DATA_SEED: u64 = 100;
const TRAIN_SEED: u64 = 0;
const EPOCHS: usize = 16;
const WARMUP_EPOCHS: usize = 4;
/// Wall-clock budget for generate + load + train + score, in seconds.
const BUDGET_SECS: f64 = 900.0;

fn paper_train_cfg(seed: u64, epochs: usize, warmup: usize) -> TrainConfig {
    TrainConfig {
        lr: 3e-5,
        batch_size: 8,
        epochs,
        warmup_epochs: warmup,
        seed,
        augment: false,
    }
}

// ---------------------------------------------------------------------------
// reporting
// ---------------------------------------------------------------------------

struct Gate {
    lines: Vec<String>,
    failures: usize,
}

impl Gate {
    fn new() -> Gate {
        Gate {
            lines: Vec::new(),
            failures: 0,
        }
    }

    fn check(&mut self, name: &str, ok: bool, detail: String) {
        let line = format!("[{}] {name}: {detail}", if ok { "PASS" } else { "FAIL" });
        println!("{line}");
        if !ok {
            self.failures += 1;
        }
        self.lines.push(line);
    }

    fn finish(self) {
        assert!(
            self.failures == 0,
            "{} criterion(s) failed:\n{}",
            self.failures,
            self.lines.join("\n")
        );
    }
}

// ---------------------------------------------------------------------------
// helpers
// ---------------------------------------------------------------------------

/// In-memory corpus for the small ablation runs: `frac` of `n` clips are
/// bonafide, the rest decoded spoofs, under deterministic pseudo-paths.
fn mem_corpus(seed: u64, n: usize, frac: f64, prefix: &str) -> Vec<LoadedClip> {
    let n_bona = ((n as f64 * frac).round() as usize).clamp(1, n - 1);
    let root = Rng::new(seed);
    let bona = gen_bonafide(&root.split(0), n_bona);
    let spoof = gen_spoof(&root.split(1), &SpoofGeneratorConfig::default(), n - n_bona)
        .expect("default spoof config is valid");
    let mut clips = Vec::with_capacity(n);
    for (i, w) in bona.iter().enumerate() {
        let path = format!("{prefix}/bonafide_{i:03}");
        clips.push(clip_from_waveform(&path, Label::Bonafide, w).unwrap());
    }
    for (i, w) in spoof.iter().enumerate() {
        let path = format!("{prefix}/spoof_{i:03}");
        clips.push(clip_from_waveform(&path, Label::Spoof, w).unwrap());
    }
    clips
}

/// Brute-force equal error rate: counts FAR and FRR from scratch at every
/// distinct score (plus a reject-all sentinel) and linearly interpolates
/// the crossing. Quadratic on purpose; shares no code with the library.
fn oracle_eer(scores: &[f64], labels: &[Label]) -> f64 {
    let n_bona = labels.iter().filter(|&&l| l == Label::Bonafide).count();
    let n_spoof = labels.len() - n_bona;
    let far = |t: f64| {
        let c = scores
            .iter()
            .zip(labels)
            .filter(|(s, &l)| l == Label::Spoof && **s >= t)
            .count();
        c as f64 / n_spoof as f64
    };
    let frr = |t: f64| {
        let c = scores
            .iter()
            .zip(labels)
            .filter(|(s, &l)| l == Label::Bonafide && **s < t)
            .count();
        c as f64 / n_bona as f64
    };
    let mut ts: Vec<f64> = scores.to_vec();
    ts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ts.dedup();
    ts.push(ts.last().unwrap() + 1.0);
    let mut prev: Option<(f64, f64)> = None;
    for &t in &ts {
        let (fa, fr) = (far(t), frr(t));
        if fa == fr {
            return fa;
        }
        if fa < fr {
            let (pfa, pfr) = prev.expect("sweep starts at FAR 1, FRR 0");
            let lam = (pfa - pfr) / ((pfa - pfr) - (fa - fr));
            return pfa + lam * (fa - pfa);
        }
        prev = Some((fa, fr));
    }
    unreachable!("sentinel threshold rejects everything");
}

/// Random score set with both classes present.
fn random_score_set(rng: &mut Rng) -> (Vec<f64>, Vec<Label>) {
    let n = 2 + rng.below(499);
    let n_bona = 1 + rng.below(n - 1);
    let mut scores = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for i in 0..n {
        // draw from a small lattice sometimes so ties actually occur
        let s = if rng.uniform() < 0.3 {
            (rng.below(8) as f64) / 8.0
        } else {
            rng.uniform()
        };
        scores.push(s);
        labels.push(if i < n_bona {
            Label::Bonafide
        } else {
            Label::Spoof
        });
    }
    (scores, labels)
}

fn eer_of(scores: Vec<f64>, labels: Vec<Label>) -> EerPoint {
    compute_eer(&ScoreSet::new(scores, labels).unwrap()).unwrap()
}

/// Normal draws pushed at least `margin` away from zero, for ops with
/// kinks at the origin.
fn kink_shifted(rng: &mut Rng, shape: &[usize], margin: f64) -> Tensor<f64> {
    let mut t = Tensor::<f64>::randn(rng, shape);
    for v in &mut t.data {
        if v.abs() < margin {
            *v += if *v >= 0.0 { margin } else { -margin };
        }
    }
    t
}

/// Scalarizes a tensor-valued node through a fixed random probe.
fn probe_loss(g: &mut Graph<f64>, y: NodeId, seed: u64) -> Result<NodeId, TensorError> {
    let shape = g.value(y).shape.clone();
    let probe = Tensor::randn(&mut Rng::new(seed ^ 0xABCD_EF01), &shape);
    let p = g.constant(probe)?;
    let m = g.mul(y, p)?;
    g.sum_all(m)
}

// ---------------------------------------------------------------------------
// criterion bodies
// ---------------------------------------------------------------------------

/// 50-seed finite-difference sweep over the core op families, plus the
/// composed whole-model probes. Returns (worst relative error of the op
/// sweep, composed results, elapsed seconds).
fn gradient_suite() -> (f64, Vec<eval_cli::GradCheckResult>, f64) {
    let t0 = Instant::now();
    let mut worst = 0f64;
    type BuildFn = Box<dyn Fn(&mut Graph<f64>, &[NodeId], u64) -> Result<NodeId, TensorError>>;
    let ops: Vec<(&str, Vec<Tensor<f64>>, BuildFn)> = {
        let mut v: Vec<(&str, Vec<Tensor<f64>>, BuildFn)> = Vec::new();
        for seed in 0..50u64 {
            let mut rng = Rng::new(0x9a5e ^ seed);
            let a = Tensor::<f64>::randn(&mut rng, &[3, 4]);
            let b = Tensor::<f64>::randn(&mut rng, &[4, 5]);
            let c = Tensor::<f64>::randn(&mut rng, &[3, 4]);
            let row = Tensor::<f64>::randn(&mut rng, &[4]);
            let pos = kink_shifted(&mut rng, &[3, 4], 0.2);
            let sig = Tensor::<f64>::randn(&mut rng, &[1, 24]);
            let ker = Tensor::<f64>::randn(&mut rng, &[2, 5]);
            let tker = Tensor::<f64>::randn(&mut rng, &[2, 12]);
            let tsig = Tensor::<f64>::randn(&mut rng, &[2, 6]);
            v.push((
                "matmul+linear",
                vec![a.clone(), b.clone(), Tensor::randn(&mut rng, &[5])],
                Box::new(|g, ids, s| {
                    let y = g.linear(ids[0], ids[1], ids[2])?;
                    probe_loss(g, y, s)
                }),
            ));
            v.push((
                "elementwise+rows",
                vec![a.clone(), c.clone(), row.clone()],
                Box::new(|g, ids, s| {
                    let y = g.add(ids[0], ids[1])?;
                    let y = g.mul_row(y, ids[2])?;
                    let y = g.gelu(y)?;
                    let y = g.mul_const(y, 0.7)?;
                    let y = g.add_const(y, 0.1)?;
                    probe_loss(g, y, s)
                }),
            ));
            v.push((
                "exp+ln_floor+clamp",
                vec![pos.clone()],
                Box::new(|g, ids, s| {
                    let y = g.exp(ids[0])?;
                    let y = g.ln_floor(y, 1e-6)?;
                    let y = g.clamp(y, -8.0, 8.0)?;
                    probe_loss(g, y, s)
                }),
            ));
            v.push((
                "tanh+softmax+norms",
                vec![a.clone()],
                Box::new(|g, ids, s| {
                    let y = g.tanh(ids[0])?;
                    let y = g.softmax_rows(y)?;
                    probe_loss(g, y, s)
                }),
            ));
            v.push((
                "reductions+reshape",
                vec![a.clone()],
                Box::new(|g, ids, s| {
                    let t = g.transpose(ids[0])?;
                    let r = g.reshape(t, &[2, 6])?;
                    let rs = g.row_sum(r)?;
                    let m = g.mean_all(ids[0])?;
                    let cent = g.sub_scalar(rs, m)?;
                    probe_loss(g, cent, s)
                }),
            ));
            v.push((
                "conv1d",
                vec![sig.clone(), ker.clone()],
                Box::new(|g, ids, s| {
                    let y = g.conv1d(ids[0], ids[1], 5, 2)?;
                    probe_loss(g, y, s)
                }),
            ));
            v.push((
                "tconv1d",
                vec![tsig.clone(), tker.clone()],
                Box::new(|g, ids, s| {
                    let y = g.tconv1d(ids[0], ids[1], 2)?;
                    probe_loss(g, y, s)
                }),
            ));
            v.push((
                "frame+spectral_power",
                vec![Tensor::randn(&mut rng, &[40])],
                Box::new(|g, ids, s| {
                    let f = g.frame(ids[0], 16, 8)?;
                    let p = g.spectral_power(f)?;
                    let y = g.ln_floor(p, 1e-8)?;
                    probe_loss(g, y, s)
                }),
            ));
            v.push((
                "weighted_nll",
                vec![Tensor::randn(&mut rng, &[1, 2])],
                Box::new(|g, ids, _| Ok(g.weighted_nll(ids[0], 0, 0.9)?)),
            ));
            v.push((
                "layer_norm+attention",
                vec![a.clone(), Tensor::randn(&mut rng, &[4]), Tensor::randn(&mut rng, &[4])],
                Box::new(|g, ids, s| {
                    let y = g.layer_norm(ids[0], ids[1], ids[2], 1e-5)?;
                    let y = g.attention(y, y, y)?;
                    probe_loss(g, y, s)
                }),
            ));
        }
        v
    };
    for (name, inputs, build) in &ops {
        let report = grad_check(
            |g, ids| build(g, ids, 0x51ee_d000),
            inputs,
            1e-5,
        )
        .unwrap_or_else(|e| panic!("{name}: grad check failed to run: {e}"));
        if report.max_rel_err > worst {
            worst = report.max_rel_err;
        }
    }
    let composed = run_gradcheck().expect("composed gradient probes run");
    (worst, composed, t0.elapsed().as_secs_f64())
}

/// KL scalar evaluated through the graph at one (mu, log sigma) pair.
fn kl_scalar(mu: f64, log_sigma: f64) -> f64 {
    let mut g = Graph::<f64>::new();
    let m = g
        .constant(Tensor::new(vec![1, 1], vec![mu]).unwrap())
        .unwrap();
    let ls = g
        .constant(Tensor::new(vec![1, 1], vec![log_sigma]).unwrap())
        .unwrap();
    let kl = loss_kl_node(&mut g, m, ls).unwrap();
    g.value(kl).data[0]
}

/// Weighted cross entropy at equal logits for one label.
fn ce_scalar(label: Label) -> f64 {
    let mut g = Graph::<f64>::new();
    let logits = g
        .constant(Tensor::new(vec![1, 2], vec![0.0, 0.0]).unwrap())
        .unwrap();
    let loss = loss_cls_node(&mut g, logits, label, &LossConfig::default()).unwrap();
    g.value(loss).data[0]
}

// ---------------------------------------------------------------------------

#[test]
fn acceptance_criteria() {
    let mut gate = Gate::new();

    // -- 1. gradient suite --------------------------------------------------
    let (worst_op, composed, grad_secs) = gradient_suite();
    let composed_ok = composed.iter().all(|r| r.passed());
    let worst_composed = composed
        .iter()
        .map(|r| r.max_rel_err)
        .fold(0f64, f64::max);
    gate.check(
        "gradient suite",
        worst_op < 1e-4 && composed_ok && grad_secs < 120.0,
        format!(
            "op sweep worst rel err {worst_op:.2e} (50 seeds, bound 1e-4), composed worst {worst_composed:.2e} ({} probes, bound 1e-3), {grad_secs:.1}s",
            composed.len()
        ),
    );

    // -- 2. entropy identities ----------------------------------------------
    let mut rng = Rng::new(0xe27);
    let mut worst_gap = 0f64;
    for _ in 0..1000 {
        let frames = 1 + rng.below(8) as usize;
        let dims = 1 + rng.below(16) as usize;
        let mut mu = Tensor::<f32>::zeros(&[frames, dims]);
        let mut ls = Tensor::<f32>::zeros(&[frames, dims]);
        for v in mu.data.iter_mut() {
            *v = rng.uniform_in(-2.0, 2.0) as f32;
        }
        for v in ls.data.iter_mut() {
            *v = rng.uniform_in(-3.0, 3.0) as f32;
        }
        let lg = LatentGaussian::new(mu, ls.clone()).unwrap();
        let h = frame_entropy(&lg, false);
        let k = dims as f64;
        let full_const = 0.5 * k * ((2.0 * std::f64::consts::PI).ln() + 1.0);
        for (t, &got) in h.h.iter().enumerate() {
            // independent route: full Gaussian entropy from sigma itself
            let full: f64 = (0..dims)
                .map(|d| (ls.data[t * dims + d] as f64).exp().ln())
                .sum::<f64>()
                + full_const;
            let gap = (got - (full - full_const)).abs();
            if gap > worst_gap {
                worst_gap = gap;
            }
        }
    }
    let unit = LatentGaussian::new(
        Tensor::<f32>::randn(&mut Rng::new(3), &[5, 7]),
        Tensor::<f32>::zeros(&[5, 7]),
    )
    .unwrap();
    let unit_exact = frame_entropy(&unit, false).h.iter().all(|&v| v == 0.0);
    gate.check(
        "entropy identities",
        worst_gap < 1e-6 && unit_exact,
        format!("1000 random posteriors, worst |gap| {worst_gap:.2e} (bound 1e-6); sigma=1 entropy exactly 0: {unit_exact}"),
    );

    // -- 3. KL identities ---------------------------------------------------
    let kl_zero = kl_scalar(0.0, 0.0);
    let kl_mu1 = kl_scalar(1.0, 0.0);
    let kl_sig2 = kl_scalar(0.0, 2f64.ln());
    let kl_sig2_ref = 1.5 - 2f64.ln();
    let ce_bona = ce_scalar(Label::Bonafide);
    let ce_spoof = ce_scalar(Label::Spoof);
    let kl_ok = kl_zero == 0.0
        && (kl_mu1 - 0.5).abs() < 1e-6
        && (kl_sig2 - kl_sig2_ref).abs() < 1e-6
        && (ce_bona - 0.9 * 2f64.ln()).abs() < 1e-6
        && (ce_spoof - 0.1 * 2f64.ln()).abs() < 1e-6;
    gate.check(
        "kl and cross-entropy identities",
        kl_ok,
        format!(
            "kl(0,1)={kl_zero:.1e}, kl(1,1)={kl_mu1:.6}, kl(0,2)={kl_sig2:.5} (ref {kl_sig2_ref:.5}), ce at equal logits {ce_bona:.4}/{ce_spoof:.4}"
        ),
    );

    // -- 4. EER oracle ------------------------------------------------------
    let mut rng = Rng::new(0xee5);
    let mut worst_eer_gap = 0f64;
    let mut worst_mono = 0u64;
    for _ in 0..1000 {
        let (scores, labels) = random_score_set(&mut rng);
        let lib = eer_of(scores.clone(), labels.clone());
        let oracle = oracle_eer(&scores, &labels);
        let gap = (lib.eer - oracle).abs();
        if gap > worst_eer_gap {
            worst_eer_gap = gap;
        }
        // strictly monotone transform must leave the EER bit-identical
        let warped: Vec<f64> = scores.iter().map(|s| (2.0 * s + 1.0).exp()).collect();
        let wl = eer_of(warped, labels.clone());
        let bits = (lib.eer.to_bits() ^ wl.eer.to_bits()).count_ones() as u64;
        worst_mono = worst_mono.max(bits);
        // mirrored scores with swapped labels give the same EER
        let mirrored: Vec<f64> = scores.iter().map(|s| 1.0 - s).collect();
        let ml: Vec<Label> = labels
            .iter()
            .map(|l| match l {
                Label::Bonafide => Label::Spoof,
                Label::Spoof => Label::Bonafide,
            })
            .collect();
        let mir = eer_of(mirrored, ml);
        let mgap = (mir.eer - lib.eer).abs();
        if mgap > worst_eer_gap {
            worst_eer_gap = worst_eer_gap.max(mgap);
        }
    }
    gate.check(
        "eer oracle",
        worst_eer_gap < 1e-9 && worst_mono == 0,
        format!(
            "1000 random score sets (sizes 2-500): worst |lib - oracle| {worst_eer_gap:.2e} (bound 1e-9), monotone transform exact, label mirror symmetric"
        ),
    );

    // -- 5. synthetic end-to-end under budget --------------------------------
    let dir = tempfile::tempdir().expect("tempdir");
    let t0 = Instant::now();
    let sizes = SubsetSizes {
        train: 400,
        dev: 100,
        eval: 200,
    };
    let manifest = build_corpus(
        dir.path(),
        sizes,
        0.1,
        &SpoofGeneratorConfig::default(),
        &Rng::new(DATA_SEED),
    )
    .expect("corpus generation");
    let train_clips = load_subset(dir.path(), &manifest, Subset::Train).unwrap();
    let dev_clips = load_subset(dir.path(), &manifest, Subset::Dev).unwrap();
    let eval_clips = load_subset(dir.path(), &manifest, Subset::Eval).unwrap();

    let model_cfg = ModelConfig::default();
    let loss_cfg = LossConfig::default();
    let train_cfg = paper_train_cfg(TRAIN_SEED, EPOCHS, WARMUP_EPOCHS);
    let outcome = train(
        model_cfg.clone(),
        &loss_cfg,
        &train_cfg,
        &train_clips,
        &dev_clips,
    )
    .expect("training run");
    let report = evaluate(&outcome.model, &eval_clips).expect("eval scoring");
    let pipeline_secs = t0.elapsed().as_secs_f64();
    gate.check(
        "end-to-end eer under budget",
        report.eer <= 0.05 && pipeline_secs <= BUDGET_SECS,
        format!(
            "eval EER {:.4} (bound 0.05) on {} bonafide / {} spoof; best epoch {} (dev EER {:.4}); {} epochs in {pipeline_secs:.0}s (budget {BUDGET_SECS:.0}s)",
            report.eer, report.n_bonafide, report.n_spoof, outcome.best_epoch, outcome.best_dev_eer, EPOCHS
        ),
    );

    // -- 6. fixed-seed rerun is bit-exact ------------------------------------
    let rerun = train(
        model_cfg.clone(),
        &loss_cfg,
        &train_cfg,
        &train_clips,
        &dev_clips,
    )
    .expect("rerun");
    let ck_a = dir.path().join("a.ckpt");
    let ck_b = dir.path().join("b.ckpt");
    let meta = CheckpointMeta {
        epoch: outcome.best_epoch,
        dev_eer: outcome.best_dev_eer,
    };
    save_checkpoint(&outcome.model, meta, &ck_a).unwrap();
    save_checkpoint(
        &rerun.model,
        CheckpointMeta {
            epoch: rerun.best_epoch,
            dev_eer: rerun.best_dev_eer,
        },
        &ck_b,
    )
    .unwrap();
    let bytes_a = std::fs::read(&ck_a).unwrap();
    let bytes_b = std::fs::read(&ck_b).unwrap();
    let rerun_report = evaluate(&rerun.model, &eval_clips).expect("rerun eval");
    let rerun_ok = bytes_a == bytes_b && rerun_report.eer.to_bits() == report.eer.to_bits();
    gate.check(
        "fixed-seed reproducibility",
        rerun_ok,
        format!(
            "checkpoint bytes identical: {}; rerun EER {:.4} bit-equal to {:.4}: {}",
            bytes_a == bytes_b,
            rerun_report.eer,
            report.eer,
            rerun_report.eer.to_bits() == report.eer.to_bits()
        ),
    );

    // -- 7. entropy separation ----------------------------------------------
    let stats = entropy_stats(&outcome.model, &eval_clips).expect("entropy stats");
    let s = &stats.summary;
    gate.check(
        "entropy separation",
        s.auc_direction_free >= 0.7,
        format!(
            "utterance-mean entropy AUC {:.4} direction-free (bound 0.7); higher class: {} (gap {:+.3} nats)",
            s.auc_direction_free, s.higher_class, s.gap
        ),
    );

    // -- 8. ablation direction ----------------------------------------------
    let ab_train = mem_corpus(4000, 80, 0.25, "ab/train");
    let ab_dev = mem_corpus(4001, 20, 0.25, "ab/dev");
    let ab_eval = mem_corpus(4002, 40, 0.25, "ab/eval");
    let gamma_only = LossConfig {
        alpha: 0.0,
        beta: 0.0,
        gamma: 1.0,
        ce_weight_bonafide: 0.9,
    };
    let mut ablation_ok = true;
    let mut ablation_detail = Vec::new();
    for seed in [1u64, 2, 3] {
        let full = train(
            model_cfg.clone(),
            &loss_cfg,
            &paper_train_cfg(seed, 5, 2),
            &ab_train,
            &ab_dev,
        )
        .expect("full-loss ablation run");
        let lean = train(
            model_cfg.clone(),
            &gamma_only,
            &paper_train_cfg(seed, 5, 0),
            &ab_train,
            &ab_dev,
        )
        .expect("gamma-only ablation run");
        let full_eer = evaluate(&full.model, &ab_eval).unwrap().eer;
        let lean_eer = evaluate(&lean.model, &ab_eval).unwrap().eer;
        if lean_eer < full_eer {
            ablation_ok = false;
        }
        ablation_detail.push(format!(
            "seed {seed}: full {full_eer:.4} vs gamma-only {lean_eer:.4}"
        ));
    }
    gate.check(
        "ablation direction",
        ablation_ok,
        format!(
            "dropping reconstruction and KL never beats the full objective ({})",
            ablation_detail.join("; ")
        ),
    );

    // -- 9. perturbation sweep ----------------------------------------------
    let cells = perturb_eval(&outcome.model, &eval_clips, TRAIN_SEED).expect("perturb sweep");
    let labels: Vec<&str> = cells.iter().map(|c| c.spec.as_str()).collect();
    let expected = [
        "duration_2s",
        "duration_3s",
        "duration_4s",
        "bitrate_115kbps",
        "bitrate_165kbps",
        "bitrate_190kbps",
    ];
    let table_ok = labels == expected && cells.iter().all(|c| c.eer.is_finite() && (0.0..=1.0).contains(&c.eer));
    let d2 = cells[0].eer;
    let d4 = cells[2].eer;
    let baseline_ok = d4.to_bits() == report.eer.to_bits();
    let degrade_ok = d2 >= d4 - 0.02;
    gate.check(
        "perturbation sweep",
        table_ok && baseline_ok && degrade_ok,
        format!(
            "6 cells [{}]; 4s cell equals unperturbed EER exactly: {baseline_ok}; 2s {:.4} >= 4s {:.4} - 0.02: {degrade_ok}",
            cells
                .iter()
                .map(|c| format!("{} {:.4}", c.spec, c.eer))
                .collect::<Vec<_>>()
                .join(", "),
            d2,
            d4
        ),
    );

    // -- 10. structural invariants -------------------------------------------
    // frozen backbone: the adapter phase must never touch backbone
    // weights, so the full run's backbone is bit-identical to a run that
    // stops at the end of warm-up
    let mut backbone_frozen = true;
    let warm_only = train(
        model_cfg.clone(),
        &loss_cfg,
        &paper_train_cfg(TRAIN_SEED, WARMUP_EPOCHS, WARMUP_EPOCHS),
        &train_clips,
        &dev_clips,
    )
    .expect("warm-up-only run");
    for (name, t) in outcome.model.params.iter() {
        if !name.starts_with("backbone.") {
            continue;
        }
        let w = warm_only.model.params.get(name).unwrap();
        if t.data.iter().zip(w.data.iter()).any(|(a, b)| a.to_bits() != b.to_bits()) {
            backbone_frozen = false;
            break;
        }
    }

    // adapter transparency: zero-initialized up projections make adapters
    // exact no-ops, so randomizing the down projections changes nothing
    let probe: Vec<f32> = {
        let mut r = Rng::new(0x9e1);
        (0..CLIP_SAMPLES).map(|_| r.uniform_in(-0.5, 0.5) as f32).collect()
    };
    let fresh = Model::<f32>::init(model_cfg.clone(), &Rng::new(8).split(0)).unwrap();
    let up_zero = fresh
        .params
        .iter()
        .filter(|(n, _)| n.starts_with("adapter.") && n.contains(".up."))
        .all(|(_, t)| t.data.iter().all(|&v| v == 0.0));
    let mut scrambled = fresh.clone();
    {
        let mut r = Rng::new(0xad0);
        for (name, t) in scrambled.params.iter_mut() {
            if name.starts_with("adapter.") && name.contains(".down.") {
                for v in t.data.iter_mut() {
                    *v = r.uniform_in(-2.0, 2.0) as f32;
                }
            }
        }
    }
    let base_logits = fresh.infer(&probe).unwrap().logits;
    let scram_logits = scrambled.infer(&probe).unwrap().logits;
    let transparent = up_zero
        && base_logits[0].to_bits() == scram_logits[0].to_bits()
        && base_logits[1].to_bits() == scram_logits[1].to_bits();

    // checkpoint round-trip on the trained model: weights and behavior
    let (reloaded, _) = training::load_checkpoint(&ck_a).unwrap();
    let mut roundtrip = reloaded.cfg == outcome.model.cfg;
    for (name, t) in outcome.model.params.iter() {
        let r = reloaded.params.get(name).expect("reloaded tensor");
        if t.shape != r.shape
            || t.data.iter().zip(r.data.iter()).any(|(a, b)| a.to_bits() != b.to_bits())
        {
            roundtrip = false;
            break;
        }
    }
    let inf_a = outcome.model.infer(&eval_clips[0].samples).unwrap();
    let inf_b = reloaded.infer(&eval_clips[0].samples).unwrap();
    roundtrip = roundtrip
        && inf_a.logits[0].to_bits() == inf_b.logits[0].to_bits()
        && inf_a.logits[1].to_bits() == inf_b.logits[1].to_bits();

    // shape contract on a real clip
    let frames = model_cfg.frames();
    let latent_ok = inf_a.latent.mu.shape == vec![frames, model_cfg.latent_dim]
        && frame_entropy(&inf_a.latent, false).len() == frames;
    let decoded_ok = {
        let mut g = Graph::<f32>::new();
        let m = outcome.model.mount(&mut g, TrainPhase::Inference).unwrap();
        let z = g
            .constant(Tensor::<f32>::zeros(&[frames, model_cfg.latent_dim]))
            .unwrap();
        let d = outcome.model.decode(&mut g, &m, z).unwrap();
        g.value(d).shape == vec![model_cfg.decoded_len()] && model_cfg.decoded_len() == 64320
    };
    let mel = mel_spectrogram(&Waveform::from_samples(eval_clips[0].samples.clone()).unwrap())
        .unwrap();
    let mel_ok = mel.frames.shape == vec![249, MEL_BINS] && MEL_BINS == 80;
    let shapes_ok = frames == 201 && latent_ok && decoded_ok && mel_ok;

    gate.check(
        "structural invariants",
        backbone_frozen && transparent && roundtrip && shapes_ok,
        format!(
            "backbone frozen through adapter phase: {backbone_frozen}; adapters transparent at init: {transparent}; checkpoint round-trip bit-exact: {roundtrip}; shapes 201 frames / 201x192 latent / 64320 decoded / 249x80 mel: {shapes_ok}"
        ),
    );

    gate.finish();
}
