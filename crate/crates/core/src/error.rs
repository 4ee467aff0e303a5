use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("schema syntax error on line {line}: {message}")]
    SchemaSyntax { line: usize, message: String },

    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("bad value {token:?} in column {column:?} (row {row}): {reason}")]
    BadValue {
        row: usize,
        column: String,
        token: String,
        reason: String,
    },

    #[error("schema declares no class column")]
    NoClassColumn,

    #[error("class column {column:?} is not binary: {values:?}")]
    NonBinaryClass { column: String, values: Vec<String> },

    #[error("row index {index} out of range for {len} rows")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("training row {0} has no class value")]
    UnlabeledTrainingRow(usize),

    #[error("csv: {0}")]
    Csv(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("empty input")]
    EmptyInput,

    #[error("attribute {0:?} has the wrong kind for this operation")]
    WrongKind(String),

    #[error("no level grid for ordered attribute {0:?}")]
    MissingGrid(String),

    #[error("a class has no training rows")]
    DegenerateClassDistribution,

    #[error("encoded instance has no antecedent components")]
    NoComponents,

    #[error("training rows contain only one class")]
    SingleClassTraining,

    #[error("too few rows: {0}")]
    TooFewRows(String),

    #[error("dataset has {rows} rows, above the leave-one-out cap of {cap}")]
    DatasetTooLarge { rows: usize, cap: usize },

    #[error("{count} components exceed the exhaustive limit of {limit}")]
    TooManyComponents { count: usize, limit: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
