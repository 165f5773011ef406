//! Finite-difference checks of the composed network pieces, run at f64
//! on a shrunken configuration so every coordinate can be probed.

use model::{entropy_node, Model, ModelConfig, TrainPhase};
use tensor_core::{grad_check, Rng, Tensor};

const H: f64 = 1e-5;

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

fn tiny_model(seed: u64) -> Model<f64> {
    let mut model = Model::<f64>::init(tiny_cfg(), &Rng::new(seed)).unwrap();
    // The up projections start at zero; give them life so the adapter
    // path carries real gradients.
    for blk in 0..model.cfg.layers {
        for tail in ["up.w", "up.b"] {
            let name = format!("adapter.block{blk}.{tail}");
            let shape = model.params.get(&name).unwrap().shape.clone();
            *model.params.get_mut(&name).unwrap() =
                Tensor::randn_scaled(&mut Rng::new(seed ^ 0xada0), &shape, 0.3);
        }
    }
    model
}

fn randn(seed: u64, shape: &[usize]) -> Tensor<f64> {
    Tensor::randn(&mut Rng::new(seed), shape)
}

fn param(model: &Model<f64>, name: &str) -> Tensor<f64> {
    model.params.get(name).unwrap().clone()
}

#[test]
fn adapter_grads_match_finite_differences() {
    let model = tiny_model(1);
    let names = [
        "adapter.block0.down.w",
        "adapter.block0.down.b",
        "adapter.block0.up.w",
        "adapter.block0.up.b",
    ];
    let mut inputs = vec![randn(10, &[4, 6])];
    inputs.extend(names.iter().map(|n| param(&model, n)));
    let report = grad_check(
        |g, ids| {
            let mut m = model.mount(g, TrainPhase::Inference).unwrap();
            for (j, n) in names.iter().enumerate() {
                m.set(n, ids[j + 1]).unwrap();
            }
            let y = model.adapter_forward(g, &m, 0, ids[0]).unwrap();
            g.mean_all(y)
        },
        &inputs,
        H,
    )
    .unwrap();
    assert!(report.max_rel_err < 1e-4, "{report:?}");
}

#[test]
fn encoder_grads_match_finite_differences() {
    let model = tiny_model(2);
    let names = [
        "enc_mu.c1.w",
        "enc_mu.c1.b",
        "enc_mu.c2.w",
        "enc_mu.c2.b",
        "enc_ls.c1.w",
        "enc_ls.c2.w",
    ];
    let mut inputs = vec![randn(20, &[4, 6])];
    inputs.extend(names.iter().map(|n| param(&model, n)));
    let report = grad_check(
        |g, ids| {
            let mut m = model.mount(g, TrainPhase::Inference).unwrap();
            for (j, n) in names.iter().enumerate() {
                m.set(n, ids[j + 1]).unwrap();
            }
            let (mu, ls) = model.encode(g, &m, ids[0]).unwrap();
            let a = g.mean_all(mu)?;
            let se = g.exp(ls)?;
            let b = g.mean_all(se)?;
            g.add(a, b)
        },
        &inputs,
        H,
    )
    .unwrap();
    assert!(report.max_rel_err < 1e-4, "{report:?}");
}

#[test]
fn classifier_grads_match_finite_differences() {
    let model = tiny_model(3);
    let names = ["cls.fc1.w", "cls.fc1.b", "cls.fc2.w", "cls.fc2.b"];
    let mut inputs = vec![randn(30, &[4])];
    inputs.extend(names.iter().map(|n| param(&model, n)));
    let report = grad_check(
        |g, ids| {
            let mut m = model.mount(g, TrainPhase::Inference).unwrap();
            for (j, n) in names.iter().enumerate() {
                m.set(n, ids[j + 1]).unwrap();
            }
            let logits = model.classify(g, &m, ids[0]).unwrap();
            g.weighted_nll(logits, 0, 0.9)
        },
        &inputs,
        H,
    )
    .unwrap();
    assert!(report.max_rel_err < 1e-4, "{report:?}");
}

#[test]
fn decoder_grads_match_finite_differences() {
    let model = tiny_model(4);
    let names = ["dec.s0.w", "dec.s0.b", "dec.s1.w", "dec.s1.b"];
    let mut inputs = vec![randn(40, &[4, 4])];
    inputs.extend(names.iter().map(|n| param(&model, n)));
    let report = grad_check(
        |g, ids| {
            let mut m = model.mount(g, TrainPhase::Inference).unwrap();
            for (j, n) in names.iter().enumerate() {
                m.set(n, ids[j + 1]).unwrap();
            }
            let out = model.decode(g, &m, ids[0]).unwrap();
            let sq = g.mul(out, out)?;
            g.mean_all(sq)
        },
        &inputs,
        H,
    )
    .unwrap();
    assert!(report.max_rel_err < 1e-3, "{report:?}");
}

#[test]
fn backbone_grads_match_finite_differences() {
    let model = tiny_model(5);
    let names = [
        "backbone.frontend.w",
        "backbone.block0.attn.wq",
        "backbone.block0.ffn.w1",
        "backbone.block0.ln1.gamma",
    ];
    let mut wave = randn(50, &[1, 20]);
    for v in wave.data.iter_mut() {
        *v *= 0.3;
    }
    let mut inputs = vec![wave];
    inputs.extend(names.iter().map(|n| param(&model, n)));
    let report = grad_check(
        |g, ids| {
            let mut m = model.mount(g, TrainPhase::Inference).unwrap();
            for (j, n) in names.iter().enumerate() {
                m.set(n, ids[j + 1]).unwrap();
            }
            let x = model.backbone_forward(g, &m, ids[0]).unwrap();
            let sq = g.mul(x, x)?;
            g.mean_all(sq)
        },
        &inputs,
        H,
    )
    .unwrap();
    assert!(report.max_rel_err < 1e-3, "{report:?}");
}

#[test]
fn latent_sampling_grads_match_finite_differences() {
    let model = tiny_model(6);
    let eps = randn(60, &[4, 4]);
    let inputs = vec![randn(61, &[4, 4]), randn(62, &[4, 4])];
    let report = grad_check(
        |g, ids| {
            let e = g.constant(eps.clone())?;
            let z = model::reparameterize(g, ids[0], ids[1], e).unwrap();
            let m = model.mount(g, TrainPhase::Inference).unwrap();
            let out = model.decode(g, &m, z).unwrap();
            let sq = g.mul(out, out)?;
            g.mean_all(sq)
        },
        &inputs,
        H,
    )
    .unwrap();
    assert!(report.max_rel_err < 1e-3, "{report:?}");
}

#[test]
fn entropy_to_logits_grads_match_finite_differences() {
    let model = tiny_model(7);
    let inputs = vec![randn(70, &[4, 4])];
    let report = grad_check(
        |g, ids| {
            let m = model.mount(g, TrainPhase::Inference).unwrap();
            let h = entropy_node(g, ids[0]).unwrap();
            let logits = model.classify(g, &m, h).unwrap();
            g.weighted_nll(logits, 1, 0.1)
        },
        &inputs,
        H,
    )
    .unwrap();
    assert!(report.max_rel_err < 1e-4, "{report:?}");
}
