//! Error types shared by the property checkers and metric functions.

use crate::oracle::OracleError;

/// Failure modes of property checks and metric evaluation.
///
/// Validation failures are reported separately as
/// [`Violation`](crate::model::Violation) lists; this enum covers the
/// errors that can still occur on a structurally valid explanation.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("confidence {0} is outside [0, 1]")]
    OutOfRangeConfidence(f64),

    #[error("no proposition carries the prediction role")]
    MissingPredictionRole,

    #[error("framework is cyclic (strengths undefined); cycle through: {}", .0.join(" -> "))]
    CyclicFramework(Vec<String>),

    #[error("{n} arguments exceed the brute-force bound of {max}")]
    TooLarge { n: usize, max: usize },

    #[error(transparent)]
    Oracle(#[from] OracleError),
}
