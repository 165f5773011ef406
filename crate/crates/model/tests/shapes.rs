//! End-to-end shape and geometry contracts at the default configuration.

use std::f64::consts::TAU;

use audio_dsp::frame_count;
use model::{entropy_node, Model, ModelConfig, TrainPhase};
use tensor_core::{Graph, Rng, Tensor};

fn test_clip(n: usize) -> Vec<f32> {
    (0..n)
        .map(|i| {
            let t = i as f64 / 16000.0;
            (0.5 * (TAU * 220.0 * t).sin() + 0.3 * (TAU * 1337.0 * t).sin()) as f32
        })
        .collect()
}

#[test]
fn default_pipeline_shapes() {
    let model = Model::<f32>::init(ModelConfig::default(), &Rng::new(11)).unwrap();
    let clip = test_clip(model.cfg.clip_samples);

    let mut g = Graph::new();
    let m = model.mount(&mut g, TrainPhase::Inference).unwrap();
    let wave = g
        .constant(Tensor::new(vec![1, clip.len()], clip).unwrap())
        .unwrap();
    let x = model.backbone_forward(&mut g, &m, wave).unwrap();
    assert_eq!(g.value(x).shape, vec![201, 128]);
    assert!(g.value(x).is_finite());

    let (mu, ls) = model.encode(&mut g, &m, x).unwrap();
    assert_eq!(g.value(mu).shape, vec![201, 192]);
    assert_eq!(g.value(ls).shape, vec![201, 192]);
    assert!(g.value(ls).data.iter().all(|&v| (-7.0..=7.0).contains(&v)));

    let h = entropy_node(&mut g, ls).unwrap();
    assert_eq!(g.value(h).shape, vec![201]);

    let logits = model.classify(&mut g, &m, h).unwrap();
    assert_eq!(g.value(logits).shape, vec![1, 2]);
    assert!(g.value(logits).is_finite());

    let out = model.decode(&mut g, &m, mu).unwrap();
    assert_eq!(g.value(out).shape, vec![64320]);
    assert!(g.value(out).data.iter().all(|&v| v.abs() < 1.0));
}

#[test]
fn zero_waveform_gives_identical_frames() {
    let model = Model::<f32>::init(ModelConfig::default(), &Rng::new(3)).unwrap();
    let mut g = Graph::new();
    let m = model.mount(&mut g, TrainPhase::Inference).unwrap();
    let n = model.cfg.clip_samples;
    let wave = g.constant(Tensor::zeros(&[1, n])).unwrap();
    let x = model.backbone_forward(&mut g, &m, wave).unwrap();
    let v = g.value(x);
    let d = v.shape[1];
    let first = &v.data[..d];
    for r in 1..v.shape[0] {
        assert_eq!(&v.data[r * d..(r + 1) * d], first, "frame {r} differs");
    }
}

#[test]
fn wrong_clip_length_rejected() {
    let model = Model::<f32>::init(ModelConfig::default(), &Rng::new(4)).unwrap();
    assert!(model.infer(&vec![0.0f32; 64000]).is_err());

    let mut g = Graph::new();
    let m = model.mount(&mut g, TrainPhase::Inference).unwrap();
    let wave = g.constant(Tensor::zeros(&[1, 64000])).unwrap();
    assert!(model.backbone_forward(&mut g, &m, wave).is_err());
}

#[test]
fn classify_rejects_wrong_frame_count() {
    let model = Model::<f32>::init(ModelConfig::default(), &Rng::new(5)).unwrap();
    let mut g = Graph::new();
    let m = model.mount(&mut g, TrainPhase::Inference).unwrap();
    let h = g.constant(Tensor::zeros(&[200])).unwrap();
    let err = model.classify(&mut g, &m, h).unwrap_err();
    assert!(err.to_string().contains("201"), "unexpected error: {err}");
}

#[test]
fn classifier_with_zero_weights_emits_biases() {
    let mut model = Model::<f32>::init(ModelConfig::default(), &Rng::new(6)).unwrap();
    for name in ["cls.fc1.w", "cls.fc1.b", "cls.fc2.w"] {
        let t = model.params.get_mut(name).unwrap();
        t.data.iter_mut().for_each(|v| *v = 0.0);
    }
    model.params.get_mut("cls.fc2.b").unwrap().data = vec![0.3, -0.2];

    let mut g = Graph::new();
    let m = model.mount(&mut g, TrainPhase::Inference).unwrap();
    let h = g
        .constant(Tensor::new(vec![201], (0..201).map(|i| i as f32 * 0.01).collect()).unwrap())
        .unwrap();
    let logits = model.classify(&mut g, &m, h).unwrap();
    assert_eq!(g.value(logits).data, vec![0.3, -0.2]);
}

#[test]
fn decoded_and_source_mel_frame_margin() {
    let cfg = ModelConfig::default();
    assert_eq!(frame_count(cfg.decoded_len()), 248);
    assert_eq!(frame_count(cfg.clip_samples), 249);
}

#[test]
fn infer_runs_whole_head() {
    let model = Model::<f32>::init(ModelConfig::default(), &Rng::new(12)).unwrap();
    let clip = test_clip(model.cfg.clip_samples);
    let inf = model.infer(&clip).unwrap();
    assert!(inf.logits.iter().all(|v| v.is_finite()));
    assert_eq!(inf.latent.frames(), 201);
    assert_eq!(inf.latent.dims(), 192);
}
