use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter violates a documented invariant.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: {what} (expected {expected}, got {got})")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("mode index {index} out of range for {modes} modes")]
    IndexOutOfRange { index: usize, modes: usize },

    #[error("no root of the group-velocity dispersion in [{lo:e}, {hi:e}] rad/s")]
    NoRootInBracket { lo: f64, hi: f64 },

    #[error("undepleted-pump regime violated: weak power {weak:e} W exceeds {limit:e} W")]
    UndepletedRegime { weak: f64, limit: f64 },

    #[error("integrator failed to converge: half-step discrepancy {discrepancy:e} > {tolerance:e}")]
    Convergence { discrepancy: f64, tolerance: f64 },

    #[error("frequency set admits no energy-conserving four-wave-mixing closure")]
    NoEnergyClosure,

    #[error("symplectic condition violated: residual {residual:e}")]
    Symplectic { residual: f64 },

    #[error("photon number {photons} exceeds Fock cutoff {cutoff}")]
    CutoffOverflow { photons: usize, cutoff: usize },

    #[error("truncation tail {tail:e} exceeds bound {bound:e}")]
    TruncationTail { tail: f64, bound: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("fit did not converge after {iterations} iterations")]
    FitNonConvergence { iterations: usize },

    #[error("data outside model range: {0}")]
    OutOfModelRange(String),

    #[error("division undefined: {0}")]
    ZeroDivision(String),

    #[error("missing data: {0}")]
    MissingData(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn check_len(what: &'static str, expected: usize, got: usize) -> Result<()> {
        if expected == got {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { what, expected, got })
        }
    }
}
