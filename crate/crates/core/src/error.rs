use thiserror::Error;

#[derive(Debug, Error)]
pub enum LadderError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// The requested operation is only defined in a narrower coupling regime.
    #[error("parameters outside the required regime: {0}")]
    Regime(String),

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("singular system: {0}")]
    Singular(String),

    /// The characteristic quartic lost degree (flat band / triple point).
    #[error("characteristic polynomial degenerates: leading coefficient {0:e}")]
    RootDeficiency(f64),

    #[error("no transition found in [{lo}, {hi}]")]
    NoTransition { lo: f64, hi: f64 },

    #[error("loop passes within {0:e} of a gapless point, shrink the radius")]
    GaplessLoop(f64),

    #[error("reference energy lies on the PBC curve (distance {0:e})")]
    ReferenceOnCurve(f64),

    #[error("two-component fit failed: relative residual {0:.3}")]
    Decomposition(f64),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl LadderError {
    pub fn is_config(&self) -> bool {
        matches!(self, LadderError::Config(_) | LadderError::InvalidParams(_))
    }
}

pub type Result<T> = std::result::Result<T, LadderError>;
