use thiserror::Error;

/// Errors raised anywhere in the model, numerics and response pipeline.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dispersive regime violated: coupling laser is resonant with the atomic transition (omega_c == omega_a)")]
    DispersiveRegime,

    #[error("singular matrix: pivot magnitude {pivot:e}")]
    Singular { pivot: f64 },

    #[error("matrix is ill-conditioned: condition estimate {estimate:e} exceeds {threshold:e}")]
    IllConditioned { estimate: f64, threshold: f64 },

    #[error("characteristic polynomial is not real: relative imaginary part {relative_imag:e}")]
    SymmetryViolation { relative_imag: f64 },

    #[error("drift matrix violates conjugation symmetry: deviation {deviation:e}")]
    DriftSymmetry { deviation: f64 },

    #[error("invalid polynomial: {0}")]
    InvalidPolynomial(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("mean fields are inconsistent with the model: {what} residual {residual:e}")]
    InconsistentMeanField { what: &'static str, residual: f64 },

    #[error("no stable coupling frequency satisfies Delta = omega_m; candidates: {}", format_candidates(.candidates))]
    NoStableRoot {
        candidates: Vec<TuneCandidateSummary>,
    },

    #[error("more than one stable coupling frequency satisfies Delta = omega_m; candidates: {}", format_candidates(.candidates))]
    AmbiguousBranch {
        candidates: Vec<TuneCandidateSummary>,
    },

    #[error("steady state is dynamically unstable (max Re lambda = {max_real_part:e} rad/s)")]
    Unstable { max_real_part: f64 },

    #[error("Routh-Hurwitz verdict ({hurwitz}) disagrees with eigenvalue verdict ({eigen}) at margin {margin:e} rad/s")]
    StabilityMismatch {
        hurwitz: bool,
        eigen: bool,
        margin: f64,
    },

    #[error("coupling-frequency tuning did not converge: |Delta - omega_m| = {residual:e} rad/s")]
    TuningFailed { residual: f64 },

    #[error("found {found} peak(s); at least two are needed to resolve the normal-mode splitting")]
    TooFewPeaks { found: usize },

    #[error("at omega = {omega:e} rad/s: {source}")]
    AtFrequency {
        omega: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn at_frequency(self, omega: f64) -> Self {
        Error::AtFrequency {
            omega,
            source: Box::new(self),
        }
    }

    /// True when the failure means the requested operating point has no
    /// stable steady state (as opposed to bad input or a numerical fault).
    pub fn is_unstable_regime(&self) -> bool {
        match self {
            Error::NoStableRoot { .. } | Error::Unstable { .. } => true,
            Error::AtFrequency { source, .. } => source.is_unstable_regime(),
            _ => false,
        }
    }

    /// True for invalid user-supplied parameters.
    pub fn is_invalid_input(&self) -> bool {
        match self {
            Error::InvalidParameter { .. } | Error::DispersiveRegime | Error::InvalidGrid(_) => {
                true
            }
            Error::AtFrequency { source, .. } => source.is_invalid_input(),
            _ => false,
        }
    }
}

/// Compact description of one root of the tuning polynomial, carried by
/// tuning errors so callers can print the full candidate table.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct TuneCandidateSummary {
    pub omega_c: f64,
    pub detuning: Option<f64>,
    pub stable: bool,
    pub margin: Option<f64>,
}

fn format_candidates(c: &[TuneCandidateSummary]) -> String {
    if c.is_empty() {
        return "none".to_string();
    }
    c.iter()
        .map(|t| {
            format!(
                "[omega_c={:.6e}, Delta={}, stable={}, margin={}]",
                t.omega_c,
                t.detuning.map_or("n/a".to_string(), |d| format!("{d:.6e}")),
                t.stable,
                t.margin.map_or("n/a".to_string(), |m| format!("{m:.3e}")),
            )
        })
        .collect::<Vec<_>>()
        .join(", ")
}

pub type Result<T> = std::result::Result<T, Error>;
