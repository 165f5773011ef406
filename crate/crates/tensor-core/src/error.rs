use std::error::Error;
use std::fmt;

/// Errors surfaced by tensor construction, graph ops and the optimizer.
#[derive(Debug, Clone, PartialEq)]
pub enum TensorError {
    /// Operand shapes are incompatible with the op's contract.
    ShapeMismatch {
        op: &'static str,
        expected: String,
        got: String,
    },
    /// Data length does not match the product of the shape dimensions.
    LengthMismatch { expected: usize, got: usize },
    /// `backward` was asked to run from a non-scalar node.
    NotScalar { op: &'static str, shape: Vec<usize> },
    /// An op produced NaN or infinity from finite inputs.
    NonFinite { op: &'static str },
    /// A gradient fed to the optimizer contains NaN or infinity.
    NonFiniteGrad { param: String },
    /// Input value outside the op's domain (e.g. log of a non-positive).
    Domain { op: &'static str, detail: String },
    /// Structurally invalid argument (zero-size dims, bad strides, ...).
    InvalidArg { op: &'static str, detail: String },
}

impl fmt::Display for TensorError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TensorError::ShapeMismatch { op, expected, got } => {
                write!(f, "{op}: shape mismatch, expected {expected}, got {got}")
            }
            TensorError::LengthMismatch { expected, got } => {
                write!(f, "tensor data length {got} does not match shape product {expected}")
            }
            TensorError::NotScalar { op, shape } => {
                write!(f, "{op}: expected a scalar node, got shape {shape:?}")
            }
            TensorError::NonFinite { op } => {
                write!(f, "{op}: produced a non-finite value")
            }
            TensorError::NonFiniteGrad { param } => {
                write!(f, "optimizer step aborted: non-finite gradient for parameter '{param}'")
            }
            TensorError::Domain { op, detail } => write!(f, "{op}: {detail}"),
            TensorError::InvalidArg { op, detail } => write!(f, "{op}: {detail}"),
        }
    }
}

impl Error for TensorError {}
