use audio_dsp::{read_wav, write_wav, Waveform};
use tensor_core::Rng;

#[test]
fn grid_values_round_trip_exactly() {
    let mut rng = Rng::new(77);
    let samples: Vec<f32> = (0..12_345)
        .map(|_| {
            let v = (rng.uniform() * 65535.0) as i64 - 32768;
            v as f32 / 32768.0
        })
        .collect();
    let w = Waveform::from_samples(samples).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("clip.wav");
    write_wav(&path, &w).unwrap();
    let back = read_wav(&path).unwrap();
    assert_eq!(back.samples, w.samples);
    assert_eq!(back.sample_rate, 16000);
}

#[test]
fn garbage_bytes_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("junk.wav");
    std::fs::write(&path, b"RIFFxxxxNOPE").unwrap();
    let err = read_wav(&path).unwrap_err();
    assert!(err.to_string().contains("RIFF/WAVE"));
}

#[test]
fn missing_file_reports_the_path() {
    let err = read_wav(std::path::Path::new("/nonexistent/clip.wav")).unwrap_err();
    assert!(err.to_string().contains("/nonexistent/clip.wav"));
}
