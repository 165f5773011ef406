use std::path::Path;

use crate::error::DspError;
use crate::wave::{Waveform, SAMPLE_RATE};

fn io_err(path: &Path, source: std::io::Error) -> DspError {
    DspError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn bad(detail: impl Into<String>) -> DspError {
    DspError::BadFormat {
        detail: detail.into(),
    }
}

fn u16_at(b: &[u8], at: usize) -> u16 {
    u16::from_le_bytes([b[at], b[at + 1]])
}

fn u32_at(b: &[u8], at: usize) -> u32 {
    u32::from_le_bytes([b[at], b[at + 1], b[at + 2], b[at + 3]])
}

/// Reads a RIFF/WAVE file. Only PCM 16-bit mono at 16 kHz is accepted;
/// anything else is rejected with a message naming the offending field.
pub fn read_wav(path: &Path) -> Result<Waveform, DspError> {
    let bytes = std::fs::read(path).map_err(|e| io_err(path, e))?;
    parse_wav(&bytes)
}

fn parse_wav(b: &[u8]) -> Result<Waveform, DspError> {
    if b.len() < 12 || &b[0..4] != b"RIFF" || &b[8..12] != b"WAVE" {
        return Err(bad("missing RIFF/WAVE header"));
    }
    let mut at = 12usize;
    let mut fmt_seen = false;
    let mut data: Option<&[u8]> = None;
    while at + 8 <= b.len() {
        let id = &b[at..at + 4];
        let size = u32_at(b, at + 4) as usize;
        let body_at = at + 8;
        if body_at + size > b.len() {
            return Err(bad("chunk runs past end of file"));
        }
        let body = &b[body_at..body_at + size];
        match id {
            b"fmt " => {
                if size < 16 {
                    return Err(bad("fmt chunk too small"));
                }
                let format = u16_at(body, 0);
                let channels = u16_at(body, 2);
                let rate = u32_at(body, 4);
                let bits = u16_at(body, 14);
                if format != 1 {
                    return Err(bad(format!("format tag {format}, want PCM (1)")));
                }
                if channels != 1 {
                    return Err(bad(format!("{channels} channels, want mono")));
                }
                if rate != SAMPLE_RATE {
                    return Err(bad(format!("sample rate {rate}, want {SAMPLE_RATE}")));
                }
                if bits != 16 {
                    return Err(bad(format!("{bits} bits per sample, want 16")));
                }
                fmt_seen = true;
            }
            b"data" => data = Some(body),
            _ => {}
        }
        // chunk bodies are word-aligned
        at = body_at + size + (size & 1);
    }
    if !fmt_seen {
        return Err(bad("no fmt chunk"));
    }
    let data = data.ok_or_else(|| bad("no data chunk"))?;
    if data.len() % 2 != 0 {
        return Err(bad("odd data chunk length for 16-bit samples"));
    }
    let samples: Vec<f32> = data
        .chunks_exact(2)
        .map(|c| i16::from_le_bytes([c[0], c[1]]) as f32 / 32768.0)
        .collect();
    Waveform::from_samples(samples)
}

/// Writes PCM 16-bit mono 16 kHz. Samples are clamped to [-1, 1] and scaled
/// by 32768 so that values read back by `read_wav` round-trip exactly.
pub fn write_wav(path: &Path, w: &Waveform) -> Result<(), DspError> {
    let n = w.samples.len();
    let data_len = (n * 2) as u32;
    let mut out = Vec::with_capacity(44 + n * 2);
    out.extend_from_slice(b"RIFF");
    out.extend_from_slice(&(36 + data_len).to_le_bytes());
    out.extend_from_slice(b"WAVE");
    out.extend_from_slice(b"fmt ");
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&SAMPLE_RATE.to_le_bytes());
    out.extend_from_slice(&(SAMPLE_RATE * 2).to_le_bytes());
    out.extend_from_slice(&2u16.to_le_bytes());
    out.extend_from_slice(&16u16.to_le_bytes());
    out.extend_from_slice(b"data");
    out.extend_from_slice(&data_len.to_le_bytes());
    for &s in &w.samples {
        let v = (s.clamp(-1.0, 1.0) * 32768.0).round();
        let v = v.clamp(-32768.0, 32767.0) as i16;
        out.extend_from_slice(&v.to_le_bytes());
    }
    std::fs::write(path, out).map_err(|e| io_err(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_garbage() {
        assert!(parse_wav(b"not a wav file").is_err());
    }

    #[test]
    fn rejects_stereo() {
        let mut b = Vec::new();
        b.extend_from_slice(b"RIFF");
        b.extend_from_slice(&40u32.to_le_bytes());
        b.extend_from_slice(b"WAVE");
        b.extend_from_slice(b"fmt ");
        b.extend_from_slice(&16u32.to_le_bytes());
        b.extend_from_slice(&1u16.to_le_bytes());
        b.extend_from_slice(&2u16.to_le_bytes());
        b.extend_from_slice(&16000u32.to_le_bytes());
        b.extend_from_slice(&64000u32.to_le_bytes());
        b.extend_from_slice(&4u16.to_le_bytes());
        b.extend_from_slice(&16u16.to_le_bytes());
        b.extend_from_slice(b"data");
        b.extend_from_slice(&4u32.to_le_bytes());
        b.extend_from_slice(&[0, 0, 0, 0]);
        let err = parse_wav(&b).unwrap_err();
        assert!(err.to_string().contains("mono"));
    }
}
