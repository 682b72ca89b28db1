use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("frequency {omega} lies below the band cutoff {omega_c}")]
    BelowCutoff { omega: f64, omega_c: f64 },

    #[error("no root bracketed for {what} on [{lo}, {hi}]")]
    RootNotBracketed { what: String, lo: f64, hi: f64 },

    #[error("time window too short: edge amplitude is {edge_ratio:.3e} of the peak (limit {limit:.1e})")]
    WindowTooShort { edge_ratio: f64, limit: f64 },

    #[error("quadrature under-resolved: {0}")]
    QuadratureResolution(String),

    #[error("integrator failed at t = {t}: {reason}")]
    Integration { t: f64, reason: String },

    #[error("Fock truncation did not converge up to {n_levels} levels (change {change:.3e})")]
    TruncationNotConverged { n_levels: usize, change: f64 },

    #[error("time {t} outside trajectory span [{start}, {end}]")]
    OutOfSpan { t: f64, start: f64, end: f64 },

    #[error("regime violated: {0}")]
    Regime(String),

    #[error("degenerate coupling at d = {d}: {reason}")]
    DegenerateCoupling { d: f64, reason: String },

    #[error("peak extraction failed: {0}")]
    Peak(String),

    #[error("scan point d = {d} failed: {source}")]
    ScanPoint { d: f64, source: Box<Error> },

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn ensure_positive(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            reason: format!("must be finite and > 0, got {value}"),
        })
    }
}
