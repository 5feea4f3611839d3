use thiserror::Error;

pub type Result<T> = std::result::Result<T, GimbalError>;

#[derive(Debug, Error)]
pub enum GimbalError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("singular system: min pivot {pivot:.3e} below threshold {threshold:.3e} (condition estimate {condition:.3e})")]
    SingularSystem {
        pivot: f64,
        threshold: f64,
        condition: f64,
    },

    #[error("non-finite state at t = {t} s")]
    NonFinite { t: f64 },

    #[error("field-of-regard limit hit on {axis} axis at t = {t} s (angle {angle} rad, limit {limit} rad)")]
    LimitHit {
        axis: &'static str,
        t: f64,
        angle: f64,
        limit: f64,
    },

    #[error("sample rate {fs} Hz must exceed twice the cutoff {cutoff} Hz")]
    BadRate { fs: f64, cutoff: f64 },

    #[error("rank-deficient regressor (numerical rank {rank} of {cols}); retry with a ridge term such as 1e-10")]
    RankDeficient { rank: usize, cols: usize },

    #[error("amplitude {amplitude_deg} deg exceeds field of regard {limit_deg} deg")]
    AmplitudeExceedsFor { amplitude_deg: f64, limit_deg: f64 },

    #[error("model is not trained (missing input normalization)")]
    ModelNotTrained,

    #[error("training diverged: damping factor reached {lambda:.3e}")]
    Diverged { lambda: f64 },

    #[error("run produced no usable samples")]
    EmptyRun,

    #[error("envelope never dropped below the bandwidth threshold")]
    NoCrossing,

    #[error("logs do not share a time base: {0}")]
    MismatchedTimeBase(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("at t = {t} s: {source}")]
    AtTime {
        t: f64,
        #[source]
        source: Box<GimbalError>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl GimbalError {
    /// Short machine-readable tag, used by the CLI's error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            GimbalError::InvalidParams(_) => "InvalidParams",
            GimbalError::SingularSystem { .. } => "SingularSystem",
            GimbalError::NonFinite { .. } => "NonFinite",
            GimbalError::LimitHit { .. } => "LimitHit",
            GimbalError::BadRate { .. } => "BadRate",
            GimbalError::RankDeficient { .. } => "RankDeficient",
            GimbalError::AmplitudeExceedsFor { .. } => "AmplitudeExceedsFor",
            GimbalError::ModelNotTrained => "ModelNotTrained",
            GimbalError::Diverged { .. } => "Diverged",
            GimbalError::EmptyRun => "EmptyRun",
            GimbalError::NoCrossing => "NoCrossing",
            GimbalError::MismatchedTimeBase(_) => "MismatchedTimeBase",
            GimbalError::Config(_) => "Config",
            GimbalError::AtTime { source, .. } => source.kind(),
            GimbalError::Io(_) => "Io",
            GimbalError::Json(_) => "Json",
            GimbalError::Csv(_) => "Csv",
        }
    }

    pub fn at(self, t: f64) -> GimbalError {
        match self {
            e @ GimbalError::AtTime { .. } => e,
            e => GimbalError::AtTime {
                t,
                source: Box::new(e),
            },
        }
    }
}
