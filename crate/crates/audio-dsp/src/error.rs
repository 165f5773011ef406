use std::fmt;

#[derive(Debug)]
pub enum DspError {
    EmptyInput { op: &'static str },
    TooShort { op: &'static str, len: usize, need: usize },
    NonFinite { op: &'static str },
    BadFormat { detail: String },
    Io { path: String, source: std::io::Error },
    InvalidArg { op: &'static str, detail: String },
}

impl fmt::Display for DspError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DspError::EmptyInput { op } => write!(f, "{op}: empty input"),
            DspError::TooShort { op, len, need } => {
                write!(f, "{op}: input of {len} samples is shorter than {need}")
            }
            DspError::NonFinite { op } => write!(f, "{op}: non-finite sample"),
            DspError::BadFormat { detail } => write!(f, "bad wav data: {detail}"),
            DspError::Io { path, source } => write!(f, "{path}: {source}"),
            DspError::InvalidArg { op, detail } => write!(f, "{op}: {detail}"),
        }
    }
}

impl std::error::Error for DspError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            DspError::Io { source, .. } => Some(source),
            _ => None,
        }
    }
}
