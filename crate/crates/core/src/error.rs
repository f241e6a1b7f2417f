use thiserror::Error;

/// Errors raised by the model, spectral, dynamics and optimal-zone layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SapError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("undefined mixing angle: both couplings are zero")]
    UndefinedMixingAngle,

    #[error("degenerate dressed basis: J_BM = {j_bm:e} is below the floor {floor:e}")]
    DegenerateDressedBasis { j_bm: f64, floor: f64 },

    #[error(
        "equal-g formula called with unequal outer-well nonlinearities (g_L = {g_l}, g_R = {g_r})"
    )]
    UnequalNonlinearity { g_l: f64, g_r: f64 },

    #[error("pole in boundary curve: delta_M equals g_L = {g_l}")]
    CurvePole { g_l: f64 },

    #[error("J0,min undefined: {0}")]
    UndefinedThreshold(&'static str),

    #[error("outside OZ applicability: negative radicand {radicand:e} in J0,min")]
    OutsideApplicability { radicand: f64 },

    #[error("integration failed at t = {t}: {reason}")]
    IntegrationFailed { t: f64, reason: String },

    #[error("norm drift {drift:e} exceeds the hard limit {limit:e} at t = {t}")]
    NormDrift { drift: f64, limit: f64, t: f64 },

    #[error("sweep point delta = {delta} failed: {source}")]
    SweepPoint {
        delta: f64,
        #[source]
        source: Box<SapError>,
    },
}

impl SapError {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        SapError::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// True for failures of the numerical machinery rather than bad input.
    pub fn is_numerical(&self) -> bool {
        match self {
            SapError::IntegrationFailed { .. } | SapError::NormDrift { .. } => true,
            SapError::SweepPoint { source, .. } => source.is_numerical(),
            _ => false,
        }
    }
}

pub type Result<T> = std::result::Result<T, SapError>;
