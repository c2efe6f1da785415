//! File formats and CSV reporting.

pub mod embedding;
pub mod pharaoh;
pub mod report;
pub mod text;

pub use embedding::{
    EmbeddingCorpus, EmbeddingHeader, EmbeddingReader, EmbeddingWriter, Encoding, Level,
    SentenceEmbedding,
};
pub use pharaoh::{
    read_alignments, read_alignments_path, read_gold, read_gold_path, write_alignments, write_gold,
};
