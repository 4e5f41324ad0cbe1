use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{what} would need {requested} entries, cap is {cap}")]
    Resource {
        what: &'static str,
        requested: u128,
        cap: u128,
    },

    #[error("grid of degree {available} cannot resolve band {required}")]
    Bandwidth { required: u64, available: u64 },

    #[error("fields live on different models ({left} vs {right})")]
    ModelMismatch { left: String, right: String },

    #[error("window [{lo}, {hi}) contains no modes")]
    EmptyWindow { lo: f64, hi: f64 },

    #[error("lattice cap around frequency {lambda} with width {width} contains no modes")]
    EmptyCap { lambda: f64, width: f64 },

    #[error("degree {degree} exceeds the sphere degree cap {cap}")]
    DegreeCap { degree: u32, cap: u32 },

    #[error("degenerate fit input: {0}")]
    DegenerateFit(String),

    #[error("config: {0}")]
    Config(String),

    #[error("audit violation: {0}")]
    Audit(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
