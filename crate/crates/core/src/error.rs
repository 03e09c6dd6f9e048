use thiserror::Error;

/// Errors raised by the symbol calculus and the checkers built on it.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("angle {name} = {value} outside [{lo}, {hi})")]
    AngleOutOfRange {
        name: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    #[error("band must be at least 1")]
    ZeroBand,

    #[error("label band {label_band} exceeds grid band {grid_band}")]
    BandExceeded { label_band: u32, grid_band: u32 },

    #[error("grid band {have} too small, need at least {need}")]
    GridTooSmall { need: u32, have: u32 },

    #[error("group model mismatch: expected {expected}, found {found}")]
    ModelMismatch { expected: String, found: String },

    #[error("invalid label: {0}")]
    InvalidLabel(String),

    #[error("matrix for label {label} has shape {rows}x{cols}, expected {dim}x{dim}")]
    DimensionMismatch {
        label: String,
        rows: usize,
        cols: usize,
        dim: usize,
    },

    #[error("range is empty")]
    EmptyRange,

    #[error("range {range} too small: need at least {min} labels per direction")]
    RangeTooSmall { range: u32, min: u32 },

    #[error("range {range} exceeds the exact region of the symbol (exact up to band {exact})")]
    RangeNotExact { range: u32, exact: i64 },

    #[error("difference of band {margin} needs more than the exact band {exact} of the symbol")]
    MarginExceeded { margin: u32, exact: u32 },

    #[error("vector field is not normalised: norm {norm}")]
    NotNormalised { norm: f64 },

    #[error(
        "X + c is not invertible: c = {c_re}{c_im:+}i cancels the eigenvalue {eig_re}{eig_im:+}i of the symbol of X at label {label}"
    )]
    Exceptional {
        label: String,
        c_re: f64,
        c_im: f64,
        eig_re: f64,
        eig_im: f64,
    },

    #[error("ladder under-resolved by the grid; smallest usable r is {smallest_r:e}")]
    Unresolved { smallest_r: f64 },

    #[error("ladder too short: {points} usable points, need at least {min}")]
    LadderTooShort { points: usize, min: usize },

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
