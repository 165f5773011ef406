use std::error::Error;
use std::fmt;

#[derive(Debug)]
pub enum ScoreError {
    /// Score and label vectors disagree in length, or the set is empty.
    Shape { detail: String },
    /// A score is NaN or infinite; threshold sweeps need a total order.
    NonFinite { index: usize, value: f64 },
    /// EER and AUC compare the two classes, so both must be present.
    SingleClass { present: &'static str },
}

impl fmt::Display for ScoreError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScoreError::Shape { detail } => write!(f, "bad score set: {detail}"),
            ScoreError::NonFinite { index, value } => {
                write!(f, "score {index} is not finite ({value})")
            }
            ScoreError::SingleClass { present } => {
                write!(f, "score set holds only {present} trials; need both classes")
            }
        }
    }
}

impl Error for ScoreError {}
