use std::error::Error;
use std::fmt;

use tensor_core::TensorError;

#[derive(Debug)]
pub enum ModelError {
    /// Rejected configuration.
    Config { detail: String },
    /// An input tensor with the wrong shape or length.
    Shape { op: &'static str, detail: String },
    /// A forward pass asked for a parameter the store does not hold.
    MissingParam { name: String },
    /// Two parameters registered under one name.
    DuplicateParam { name: String },
    /// Failure inside the computation graph.
    Tensor(TensorError),
}

impl fmt::Display for ModelError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelError::Config { detail } => write!(f, "bad model config: {detail}"),
            ModelError::Shape { op, detail } => write!(f, "{op}: {detail}"),
            ModelError::MissingParam { name } => write!(f, "missing parameter {name:?}"),
            ModelError::DuplicateParam { name } => write!(f, "duplicate parameter {name:?}"),
            ModelError::Tensor(e) => write!(f, "tensor error: {e}"),
        }
    }
}

impl Error for ModelError {
    fn source(&self) -> Option<&(dyn Error + 'static)> {
        match self {
            ModelError::Tensor(e) => Some(e),
            _ => None,
        }
    }
}

impl From<TensorError> for ModelError {
    fn from(e: TensorError) -> Self {
        ModelError::Tensor(e)
    }
}
