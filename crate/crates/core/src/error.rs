use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("structural precondition violated: {0}")]
    Precondition(String),

    #[error("invalid disintegration: {0}")]
    InvalidDisintegration(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("tensor of {cells} cells exceeds the cap of {cap}")]
    TensorTooLarge { cells: u128, cap: usize },

    #[error("degenerate discretization: all centroid values zero; increase b")]
    DegenerateDiscretization,

    #[error("conditioning on a zero-mass slice (axis {axis}, bin {bin})")]
    ZeroMassSlice { axis: usize, bin: usize },

    /// Carries the predicted size so callers can renegotiate `ε` or `b`.
    #[error("cover infeasible: predicted size {predicted} (log {log_predicted:.3}) exceeds limit {limit}")]
    CoverTooLarge {
        predicted: f64,
        log_predicted: f64,
        limit: usize,
    },

    #[error("{what} = {value} exceeds the enumeration cap {cap}")]
    AboveCap {
        what: &'static str,
        value: usize,
        cap: usize,
    },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Short machine-readable tag used in CLI error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::InvalidGraph(_) => "invalid_graph",
            Error::Precondition(_) => "precondition",
            Error::InvalidDisintegration(_) => "invalid_disintegration",
            Error::ShapeMismatch(_) => "shape_mismatch",
            Error::TensorTooLarge { .. } => "tensor_too_large",
            Error::DegenerateDiscretization => "degenerate_discretization",
            Error::ZeroMassSlice { .. } => "zero_mass_slice",
            Error::CoverTooLarge { .. } => "cover_too_large",
            Error::AboveCap { .. } => "above_cap",
            Error::Empty(_) => "empty",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }
}
