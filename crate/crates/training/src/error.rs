use std::error::Error;
use std::fmt;

use audio_dsp::DspError;
use model::ModelError;
use scoring::ScoreError;
use synth_data::SynthError;
use tensor_core::TensorError;

#[derive(Debug)]
pub enum TrainError {
    Config { detail: String },
    Data { detail: String },
    /// The objective stopped being a number; training aborts rather than
    /// stepping the optimizer into garbage.
    NonFinite { context: String },
    Checkpoint { detail: String },
    Io { path: String, source: std::io::Error },
    Model(ModelError),
    Tensor(TensorError),
    Dsp(DspError),
    Synth(SynthError),
    Score(ScoreError),
}

impl fmt::Display for TrainError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrainError::Config { detail } => write!(f, "bad training config: {detail}"),
            TrainError::Data { detail } => write!(f, "bad training data: {detail}"),
            TrainError::NonFinite { context } => {
                write!(f, "non-finite objective at {context}")
            }
            TrainError::Checkpoint { detail } => write!(f, "bad checkpoint: {detail}"),
            TrainError::Io { path, source } => write!(f, "io error on {path}: {source}"),
            TrainError::Model(e) => write!(f, "model error: {e}"),
            TrainError::Tensor(e) => write!(f, "tensor error: {e}"),
            TrainError::Dsp(e) => write!(f, "signal error: {e}"),
            TrainError::Synth(e) => write!(f, "data generation error: {e}"),
            TrainError::Score(e) => write!(f, "scoring error: {e}"),
        }
    }
}

impl Error for TrainError {
    fn source(&self) -> Option<&(dyn Error + 'static)> {
        match self {
            TrainError::Io { source, .. } => Some(source),
            TrainError::Model(e) => Some(e),
            TrainError::Tensor(e) => Some(e),
            TrainError::Dsp(e) => Some(e),
            TrainError::Synth(e) => Some(e),
            TrainError::Score(e) => Some(e),
            _ => None,
        }
    }
}

impl From<ModelError> for TrainError {
    fn from(e: ModelError) -> Self {
        TrainError::Model(e)
    }
}

impl From<TensorError> for TrainError {
    fn from(e: TensorError) -> Self {
        TrainError::Tensor(e)
    }
}

impl From<DspError> for TrainError {
    fn from(e: DspError) -> Self {
        TrainError::Dsp(e)
    }
}

impl From<SynthError> for TrainError {
    fn from(e: SynthError) -> Self {
        TrainError::Synth(e)
    }
}

impl From<ScoreError> for TrainError {
    fn from(e: ScoreError) -> Self {
        TrainError::Score(e)
    }
}
