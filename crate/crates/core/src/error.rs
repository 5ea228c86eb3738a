use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("eigensolver failure: {detail} (matrix scale {condition:.3e})")]
    Eigensolver { detail: String, condition: f64 },

    #[error("at xi = {xi}: {source}")]
    AtParameter {
        xi: Complex64,
        #[source]
        source: Box<Error>,
    },

    #[error("no interior minimum of the band function in [{lo}, {hi}]")]
    Bracketing { lo: f64, hi: f64 },

    #[error("gap certification failed: {0}")]
    Certification(String),

    #[error("z = {z} is within {distance:.3e} of the spectrum")]
    NearSingular { z: Complex64, distance: f64 },

    #[error("contour node z = {z} hits a near-singular resolvent")]
    Contour { z: Complex64 },

    #[error("projection trace {trace} is not close to an integer")]
    RankAmbiguity { trace: Complex64 },

    #[error("projection has rank {rank}, expected 1")]
    RankNotOne { rank: i64 },

    #[error("bilinear overlap |{overlap}| below threshold {threshold}: strip half-width exceeded")]
    StripExceeded { overlap: Complex64, threshold: f64 },

    #[error("quotient value {quotient} and direct eigenvalue {direct} differ by {difference:.3e}")]
    Disagreement {
        quotient: Complex64,
        direct: Complex64,
        difference: f64,
    },
}

impl Error {
    pub fn at(self, xi: impl Into<Complex64>) -> Self {
        Error::AtParameter {
            xi: xi.into(),
            source: Box::new(self),
        }
    }
}
