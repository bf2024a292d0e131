use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate geometry: rx element {rx} coincides with tx element {tx}")]
    DegenerateGeometry { rx: usize, tx: usize },

    #[error("empty spectrum: bandwidth parameter must be positive, got {0}")]
    EmptySpectrum(f64),

    #[error("no usable subchannel")]
    NoUsableSubchannel,

    #[error("infeasible partition: bound {bound} x {streams} streams cannot cover {antennas} antennas")]
    InfeasiblePartition {
        antennas: usize,
        streams: usize,
        bound: usize,
    },

    #[error("empty index set")]
    EmptySet,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("missing sweep axis: {0}")]
    MissingAxis(String),

    #[error("no records to emit")]
    NoRecords,

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
