use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the arithmetic, step maps and solvers.
///
/// Numeric variants carry an optional step index; callers that iterate or
/// evaluate a closed form at a given `ell` attach it with [`Error::at_step`].
#[derive(Debug, Clone, PartialEq, Error, Serialize, Deserialize)]
#[serde(tag = "kind", content = "detail", rename_all = "snake_case")]
pub enum Error {
    #[error("zero raised to negative power {exponent}{}", fmt_step(.step))]
    ZeroToNegativePower { exponent: i64, step: Option<usize> },

    #[error("non-finite result{}", fmt_step(.step))]
    Overflow { step: Option<usize> },

    #[error("integer exponent exceeds the 64-bit range{}", fmt_step(.step))]
    ExponentOverflow { step: Option<usize> },

    #[error("exponent {numerator}/{denominator} is not an integer")]
    NonIntegerExponent { numerator: i128, denominator: i128 },

    #[error("special closed form needs q = 2k and r = 2(1+k), got k={k}, q={q}, r={r}")]
    QrMismatch { k: i64, q: i64, r: i64 },

    #[error("linear change of variables is singular (determinant 0)")]
    SingularChange,

    #[error("inversion quadratic is degenerate (leading coefficient 0)")]
    DegenerateQuadratic,

    #[error("invalid parameters: {0}")]
    InvalidParams(String),
}

fn fmt_step(step: &Option<usize>) -> String {
    match step {
        Some(s) => format!(" at step {s}"),
        None => String::new(),
    }
}

impl Error {
    /// Attach a step index to a numeric error. An index already present is kept.
    pub fn at_step(self, ell: usize) -> Self {
        match self {
            Error::ZeroToNegativePower { exponent, step } => Error::ZeroToNegativePower {
                exponent,
                step: step.or(Some(ell)),
            },
            Error::Overflow { step } => Error::Overflow {
                step: step.or(Some(ell)),
            },
            Error::ExponentOverflow { step } => Error::ExponentOverflow {
                step: step.or(Some(ell)),
            },
            other => other,
        }
    }

    pub fn step(&self) -> Option<usize> {
        match self {
            Error::ZeroToNegativePower { step, .. }
            | Error::Overflow { step }
            | Error::ExponentOverflow { step } => *step,
            _ => None,
        }
    }

    /// True for failures caused by the numbers along an orbit rather than by
    /// the parameters themselves.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::ZeroToNegativePower { .. }
                | Error::Overflow { .. }
                | Error::ExponentOverflow { .. }
                | Error::DegenerateQuadratic
        )
    }

    /// Short stable label, used as a key when counting skipped draws.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::ZeroToNegativePower { .. } => "zero_to_negative_power",
            Error::Overflow { .. } => "overflow",
            Error::ExponentOverflow { .. } => "exponent_overflow",
            Error::NonIntegerExponent { .. } => "non_integer_exponent",
            Error::QrMismatch { .. } => "qr_mismatch",
            Error::SingularChange => "singular_change",
            Error::DegenerateQuadratic => "degenerate_quadratic",
            Error::InvalidParams(_) => "invalid_params",
        }
    }
}
