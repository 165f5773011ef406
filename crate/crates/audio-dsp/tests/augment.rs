use audio_dsp::{rawboost_augment, RawBoostConfig, Waveform, CLIP_SAMPLES, SAMPLE_RATE};
use tensor_core::Rng;

fn speechy_clip() -> Waveform {
    let mut samples = vec![0f32; CLIP_SAMPLES];
    for (n, s) in samples.iter_mut().enumerate() {
        let t = n as f64 / SAMPLE_RATE as f64;
        let v = 0.2 * (std::f64::consts::TAU * 220.0 * t).sin()
            + 0.1 * (std::f64::consts::TAU * 1320.0 * t).sin();
        *s = v as f32;
    }
    Waveform::from_samples(samples).unwrap()
}

#[test]
fn disabled_config_is_identity() {
    let w = speechy_clip();
    let mut rng = Rng::new(42);
    let out = rawboost_augment(&w, &RawBoostConfig::disabled(), &mut rng);
    assert_eq!(out.samples, w.samples);
}

#[test]
fn colored_noise_hits_the_requested_snr() {
    let w = speechy_clip();
    let cfg = RawBoostConfig {
        convolutive: false,
        impulsive: false,
        colored: true,
        snr_db_range: (20.0, 20.0),
    };
    let mut rng = Rng::new(1234);
    let out = rawboost_augment(&w, &cfg, &mut rng);
    let ps: f64 = w.samples.iter().map(|&s| s as f64 * s as f64).sum();
    let pn: f64 = w
        .samples
        .iter()
        .zip(out.samples.iter())
        .map(|(&a, &b)| {
            let d = (b - a) as f64;
            d * d
        })
        .sum();
    let snr = 10.0 * (ps / pn).log10();
    assert!((snr - 20.0).abs() < 1.0, "measured snr {snr} dB");
}

#[test]
fn fixed_seed_is_bit_identical() {
    let w = speechy_clip();
    let a = rawboost_augment(&w, &RawBoostConfig::default(), &mut Rng::new(99));
    let b = rawboost_augment(&w, &RawBoostConfig::default(), &mut Rng::new(99));
    assert_eq!(a.samples, b.samples);
}

#[test]
fn different_seeds_differ() {
    let w = speechy_clip();
    let a = rawboost_augment(&w, &RawBoostConfig::default(), &mut Rng::new(1));
    let b = rawboost_augment(&w, &RawBoostConfig::default(), &mut Rng::new(2));
    assert_ne!(a.samples, b.samples);
}

#[test]
fn length_rate_and_range_are_preserved() {
    let w = speechy_clip();
    let out = rawboost_augment(&w, &RawBoostConfig::default(), &mut Rng::new(7));
    assert_eq!(out.samples.len(), CLIP_SAMPLES);
    assert_eq!(out.sample_rate, SAMPLE_RATE);
    assert!(out.samples.iter().all(|s| (-1.0..=1.0).contains(s)));
}
