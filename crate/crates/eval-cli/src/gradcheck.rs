use model::{entropy_node, reparameterize, Model, ModelConfig, TrainPhase};
use synth_data::Label;
use tensor_core::{grad_check, Rng, Tensor};
use training::{
    loss_cls_node, loss_kl_node, loss_recon_node, mel_node, total_loss_node, LossConfig, MelBank,
};

use crate::error::EvalError;

/// One finite-difference probe: the largest relative disagreement
/// between analytic and numeric gradients, and the bound it must stay
/// under.
#[derive(Debug, Clone)]
pub struct GradCheckResult {
    pub name: String,
    pub max_rel_err: f64,
    pub bound: f64,
}

impl GradCheckResult {
    pub fn passed(&self) -> bool {
        self.max_rel_err < self.bound
    }
}

fn tiny_cfg() -> ModelConfig {
    ModelConfig {
        layers: 1,
        width: 6,
        heads: 1,
        ffn_width: 8,
        frontend_kernel: 8,
        frontend_stride: 4,
        adapter_dim: 5,
        latent_dim: 4,
        encoder_hidden: 5,
        decoder_rates: vec![2, 2],
        decoder_widths: vec![3],
        classifier_hidden: 4,
        clip_samples: 20,
        ..ModelConfig::default()
    }
}

/// Adapters initialize to zero; the probe wants them contributing, so
/// their up projections get noise.
fn tiny_model(seed: u64) -> Result<Model<f64>, EvalError> {
    let mut model = Model::<f64>::init(tiny_cfg(), &Rng::new(seed))?;
    for blk in 0..model.cfg.layers {
        for tail in ["up.w", "up.b"] {
            let name = format!("adapter.block{blk}.{tail}");
            let shape = model
                .params
                .get(&name)
                .ok_or_else(|| EvalError::Data {
                    detail: format!("parameter {name} missing"),
                })?
                .shape
                .clone();
            *model.params.get_mut(&name).unwrap() =
                Tensor::randn_scaled(&mut Rng::new(seed ^ 0xada0), &shape, 0.3);
        }
    }
    Ok(model)
}

fn tiny_mel_bank() -> MelBank<f64> {
    let mut rng = Rng::new(0x3e1);
    let window = Tensor {
        shape: vec![8],
        data: (0..8).map(|_| rng.uniform_in(0.4, 1.0)).collect(),
    };
    let fb_t = Tensor {
        shape: vec![5, 4],
        data: (0..20).map(|_| rng.uniform_in(0.2, 1.0)).collect(),
    };
    MelBank {
        window,
        fb_t,
        win: 8,
        hop: 4,
    }
}

/// Probes the complete composed objective and the mel path alone with
/// central finite differences at f64 on a shrunken configuration, one
/// result per probed parameter.
pub fn run_gradcheck() -> Result<Vec<GradCheckResult>, EvalError> {
    const H: f64 = 1e-5;
    let model = tiny_model(8)?;
    let cfg = model.cfg.clone();
    let loss_cfg = LossConfig::default();
    let bank = tiny_mel_bank();

    let wave = Tensor::<f64> {
        shape: vec![1, cfg.clip_samples],
        data: Tensor::<f64>::randn(&mut Rng::new(70), &[cfg.clip_samples])
            .data
            .iter()
            .map(|v| v * 0.3)
            .collect(),
    };
    let eps = Tensor::<f64>::randn(&mut Rng::new(71), &[cfg.frames(), cfg.latent_dim]);
    let gt = Tensor::<f64>::randn(&mut Rng::new(72), &[3, 4]);

    let names = [
        "adapter.block0.up.w",
        "enc_mu.c2.w",
        "enc_ls.c1.w",
        "dec.s0.w",
        "dec.s1.b",
        "cls.fc1.w",
        "backbone.frontend.b",
    ];

    let mut results = Vec::new();
    for name in names {
        let input = model
            .params
            .get(name)
            .ok_or_else(|| EvalError::Data {
                detail: format!("parameter {name} missing"),
            })?
            .clone();
        let report = grad_check(
            |g, ids| {
                let mut m = model.mount(g, TrainPhase::Inference).unwrap();
                m.set(name, ids[0]).unwrap();
                let w = g.constant(wave.clone())?;
                let x = model.backbone_forward(g, &m, w).unwrap();
                let (mu, ls) = model.encode(g, &m, x).unwrap();

                let kl = loss_kl_node(g, mu, ls).unwrap();
                let h = entropy_node(g, ls).unwrap();
                let logits = model.classify(g, &m, h).unwrap();
                let cls = loss_cls_node(g, logits, Label::Bonafide, &loss_cfg).unwrap();

                let e = g.constant(eps.clone())?;
                let z = reparameterize(g, mu, ls, e).unwrap();
                let decoded = model.decode(g, &m, z).unwrap();
                let nodes = bank.mount(g).unwrap();
                let pred = mel_node(g, decoded, &nodes, 1e-30).unwrap();
                let gt_node = g.constant(gt.clone())?;
                let recon = loss_recon_node(g, pred, gt_node).unwrap();

                Ok(total_loss_node(g, &loss_cfg, recon, kl, cls).unwrap())
            },
            &[input],
            H,
        )
        .map_err(|e| EvalError::Data {
            detail: format!("gradient probe {name}: {e}"),
        })?;
        results.push(GradCheckResult {
            name: format!("objective/{name}"),
            max_rel_err: report.max_rel_err,
            bound: 1e-3,
        });
    }

    let wave1 = Tensor::<f64>::randn(&mut Rng::new(73), &[20]);
    let report = grad_check(
        |g, ids| {
            let nodes = bank.mount(g).unwrap();
            let mel = mel_node(g, ids[0], &nodes, 1e-30).unwrap();
            g.mean_all(mel)
        },
        &[wave1],
        H,
    )
    .map_err(|e| EvalError::Data {
        detail: format!("gradient probe mel: {e}"),
    })?;
    results.push(GradCheckResult {
        name: "mel/waveform".into(),
        max_rel_err: report.max_rel_err,
        bound: 1e-4,
    });

    Ok(results)
}
