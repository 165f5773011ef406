use std::error::Error;
use std::fmt;

use audio_dsp::DspError;
use model::ModelError;
use scoring::ScoreError;
use synth_data::SynthError;
use training::TrainError;

#[derive(Debug)]
pub enum EvalError {
    /// Rejected configuration or command-line argument.
    Config { detail: String },
    /// Inputs that parse but cannot be evaluated.
    Data { detail: String },
    Io {
        path: String,
        source: std::io::Error,
    },
    Train(TrainError),
    Model(ModelError),
    Dsp(DspError),
    Synth(SynthError),
    Score(ScoreError),
}

impl EvalError {
    /// Process exit status: 1 for configuration mistakes the caller can
    /// fix by editing arguments or the TOML, 2 for runtime failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            EvalError::Config { .. } => 1,
            EvalError::Train(TrainError::Config { .. }) => 1,
            EvalError::Model(ModelError::Config { .. }) => 1,
            EvalError::Synth(SynthError::InvalidConfig { .. }) => 1,
            _ => 2,
        }
    }
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::Config { detail } => write!(f, "bad configuration: {detail}"),
            EvalError::Data { detail } => write!(f, "bad data: {detail}"),
            EvalError::Io { path, source } => write!(f, "io error on {path}: {source}"),
            EvalError::Train(e) => write!(f, "{e}"),
            EvalError::Model(e) => write!(f, "{e}"),
            EvalError::Dsp(e) => write!(f, "{e}"),
            EvalError::Synth(e) => write!(f, "{e}"),
            EvalError::Score(e) => write!(f, "{e}"),
        }
    }
}

impl Error for EvalError {
    fn source(&self) -> Option<&(dyn Error + 'static)> {
        match self {
            EvalError::Io { source, .. } => Some(source),
            EvalError::Train(e) => Some(e),
            EvalError::Model(e) => Some(e),
            EvalError::Dsp(e) => Some(e),
            EvalError::Synth(e) => Some(e),
            EvalError::Score(e) => Some(e),
            _ => None,
        }
    }
}

impl From<TrainError> for EvalError {
    fn from(e: TrainError) -> Self {
        EvalError::Train(e)
    }
}

impl From<ModelError> for EvalError {
    fn from(e: ModelError) -> Self {
        EvalError::Model(e)
    }
}

impl From<DspError> for EvalError {
    fn from(e: DspError) -> Self {
        EvalError::Dsp(e)
    }
}

impl From<SynthError> for EvalError {
    fn from(e: SynthError) -> Self {
        EvalError::Synth(e)
    }
}

impl From<ScoreError> for EvalError {
    fn from(e: ScoreError) -> Self {
        EvalError::Score(e)
    }
}
