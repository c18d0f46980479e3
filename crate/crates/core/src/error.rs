use thiserror::Error;

/// Every failure the library can signal.
///
/// Numeric payloads are carried as `f64` so the error type stays independent
/// of the scalar the caller works in.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("pole of the gamma function at z = {re} + {im}i")]
    Pole { re: f64, im: f64 },

    #[error("{what} did not converge after {iterations} iterations (best estimate {best}, est. error {est_error})")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
        best: f64,
        est_error: f64,
    },

    #[error("degenerate Whittaker index: 2*mu = {two_mu_re} + {two_mu_im}i is an integer")]
    DegenerateIndex { two_mu_re: f64, two_mu_im: f64 },

    #[error("overflow evaluating {what} at {at}")]
    Overflow { what: &'static str, at: f64 },

    #[error("lambda = {re} + {im}i lies within {distance} of the spectrum")]
    Spectrum { re: f64, im: f64, distance: f64 },

    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),

    #[error("integrand grows without bound past x = {at}; supply a truncation envelope")]
    MissingEnvelope { at: f64 },

    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
