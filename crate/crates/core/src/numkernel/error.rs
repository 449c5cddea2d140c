use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

/// Error type shared by all numerical operations.
///
/// Overflow and NaN are hard errors, never silently propagated: cancellation
/// diagnostics downstream are only trustworthy if non-finite intermediate
/// values abort the computation.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Input outside the declared domain of an operation.
    Domain(String),
    /// A non-finite value (NaN or infinity) appeared during evaluation.
    NonFinite(String),
    /// The adaptive precision driver asked for more mantissa bits than the
    /// configured cap allows; carries the deficit.
    PrecisionOverflow { required: usize, cap: usize },
    /// Harmonic-oscillator evolution requested at a time with `|cos t|`
    /// below the singular-time guard.
    SingularTime { t: f64 },
    /// Piecewise target halves disagree in value at the glue point.
    Glue { left: f64, right: f64 },
    /// Piecewise target halves have equal derivatives at the glue point,
    /// so there is no non-analyticity point.
    Degenerate,
    /// Loop classification could not decide a side at the given resolution.
    Ambiguous(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn non_finite(msg: impl Into<String>) -> Self {
        Error::NonFinite(msg.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(m) => write!(f, "domain error: {m}"),
            Error::NonFinite(m) => write!(f, "non-finite value: {m}"),
            Error::PrecisionOverflow { required, cap } => write!(
                f,
                "precision overflow: {required} bits required, cap is {cap} (deficit {})",
                required.saturating_sub(*cap)
            ),
            Error::SingularTime { t } => {
                write!(f, "singular time: |cos t| too small at t = {t}")
            }
            Error::Glue { left, right } => {
                write!(f, "glue mismatch at 1/2: left = {left}, right = {right}")
            }
            Error::Degenerate => write!(
                f,
                "degenerate target: equal one-sided derivatives at 1/2, no non-analyticity point"
            ),
            Error::Ambiguous(m) => write!(f, "ambiguous classification: {m}"),
        }
    }
}
