use std::fmt;

#[derive(Debug)]
pub enum SynthError {
    InvalidConfig { detail: String },
    BadManifest { detail: String },
    Io { path: String, source: std::io::Error },
    Dsp(audio_dsp::DspError),
}

impl fmt::Display for SynthError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SynthError::InvalidConfig { detail } => write!(f, "invalid generator config: {detail}"),
            SynthError::BadManifest { detail } => write!(f, "bad manifest: {detail}"),
            SynthError::Io { path, source } => write!(f, "{path}: {source}"),
            SynthError::Dsp(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for SynthError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            SynthError::Io { source, .. } => Some(source),
            SynthError::Dsp(e) => Some(e),
            _ => None,
        }
    }
}

impl From<audio_dsp::DspError> for SynthError {
    fn from(e: audio_dsp::DspError) -> Self {
        SynthError::Dsp(e)
    }
}
