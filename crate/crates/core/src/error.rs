use thiserror::Error;

/// Errors raised by dataset construction, fitting and model selection.
#[derive(Error, Debug)]
pub enum Error {
    #[error("dataset: missing column '{0}'")]
    MissingColumn(String),

    #[error("dataset: non-numeric cell at row {row}, column {col}")]
    NonNumeric { row: usize, col: String },

    #[error("dataset: non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: String },

    #[error("dataset: no data rows")]
    EmptyDataset,

    #[error("dataset: design point {index} outside domain bounds")]
    OutOfDomain { index: usize },

    #[error("dimension mismatch: dataset is {dataset}-dimensional, basis is {basis}-dimensional")]
    DimensionMismatch { dataset: usize, basis: usize },

    #[error("basis: need at least 2 centers per dimension, got {0}")]
    TooFewCenters(usize),

    #[error("basis: width scale must be positive, got {0}")]
    NonPositiveScale(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("singular system: {0}")]
    SingularSystem(String),

    #[error("noise variance collapsed below {floor:e} at iteration {iteration}")]
    AlphaCollapse { floor: f64, iteration: usize },

    #[error("singular information matrix (condition estimate {cond:e})")]
    SingularInformation { cond: f64 },

    #[error("selection failed: every grid point failed to fit (last error: {0})")]
    SelectionFailed(String),

    #[error("simulation: {0}")]
    Simulation(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
