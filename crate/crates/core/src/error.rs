use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("embedding matrix must have at least one row and one column (got {rows}x{cols})")]
    EmptyMatrix { rows: usize, cols: usize },

    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },

    #[error("similarity value {value} at ({row}, {col}) is outside [0, 1]")]
    SimilarityOutOfRange { row: usize, col: usize, value: f64 },

    #[error("edge ({src}, {tgt}) lies outside a {src_len}x{tgt_len} alignment")]
    EdgeOutOfRange {
        src: usize,
        tgt: usize,
        src_len: usize,
        tgt_len: usize,
    },

    #[error("invalid word spans at subword {index}: {reason}")]
    InvalidSpans { index: usize, reason: String },

    #[error("subword index {index} is not covered by any word span")]
    UncoveredSubword { index: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("null filter needs at least one aligned edge in the corpus")]
    NoAlignedEdges,

    #[error("gold alignment has no sure edges")]
    NoSureEdges,

    #[error("no gold alignment for pair `{0}`")]
    MissingGold(String),

    #[error("invalid frequency bins: {0}")]
    InvalidBins(String),

    #[error("tag sequence for pair `{pair_id}` has {tags} tags but {tokens} tokens")]
    TagLengthMismatch {
        pair_id: String,
        tags: usize,
        tokens: usize,
    },

    #[error("pair id mismatch at record {index}: source `{src}` vs target `{tgt}`")]
    PairIdMismatch {
        index: usize,
        src: String,
        tgt: String,
    },

    #[error("pair count mismatch: source has {src}, target has {tgt}")]
    PairCountMismatch { src: usize, tgt: usize },

    #[error("embedding file: {0}")]
    Format(String),

    #[error("sentence `{id}`: {reason}")]
    Sentence { id: String, reason: String },

    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
