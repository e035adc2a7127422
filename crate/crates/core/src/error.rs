use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("mode index {n} exceeds truncation bound {max}")]
    Truncation { n: usize, max: usize },

    #[error("{what} out of domain: {reason}")]
    Domain { what: &'static str, reason: String },

    #[error("small-angle regime violated: |k|·w0 = {k_w0:.3e} (limit {limit})")]
    SmallAngle { k_w0: f64, limit: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("quadrature did not converge: estimated error {residual:.3e} after {subdivisions} subdivisions")]
    NoConvergence { residual: f64, subdivisions: usize },

    #[error("degenerate measurement: {0}")]
    Degenerate(String),
}

impl Error {
    pub(crate) fn domain(what: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            what,
            reason: reason.into(),
        }
    }

    /// True for failures of the numerics rather than of the inputs.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::NoConvergence { .. } | Error::Degenerate(_))
    }
}
