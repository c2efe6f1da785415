//! Word alignment from multilingual embeddings, without parallel training data.
//!
//! A sentence pair is turned into a similarity matrix of its token embeddings;
//! alignment edges are then extracted with mutual argmax ([`argmax_align`]),
//! its iterated form ([`itermax_align`]) or a maximum-weight maximal matching
//! ([`match_align`]). Optional extensions are a distortion prior and a
//! corpus-level null-word filter. The [`eval`] module scores alignments
//! against sure/possible gold data, and [`symmetrize`] combines asymmetric
//! alignments from other aligners.
//!
//! All numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix it to `f64`, which is what the command line tool uses.

pub mod alignment;
pub mod error;
pub mod eval;
pub mod extract;
pub mod io;
pub mod pair;
pub mod runner;
pub mod scalar;
pub mod similarity;
pub mod subword;
pub mod symmetrize;

pub use alignment::{AlignmentSet, Edge};
pub use error::{Error, Result};
pub use eval::{corpus_score, score, GoldAlignment, ScoreReport};
pub use extract::{
    align_pair, align_similarity, argmax_align, itermax_align, match_align, null_filter,
    ExtractionConfig, Method,
};
pub use pair::{TokenizedSentencePair, WordSpans};
pub use runner::{run_corpus, RunOptions};
pub use scalar::Scalar;
pub use similarity::{
    apply_distortion, cosine_similarity_matrix, pool_subword_to_word, EmbeddingMatrix,
    SimilarityMatrix,
};
pub use subword::{build_word_spans, convert_subword_to_word, SpanHints};
pub use symmetrize::{grow_diag_final_and, intersect};

pub type Embeddings = EmbeddingMatrix<f64>;
pub type Embeddings32 = EmbeddingMatrix<f32>;
pub type Similarity = SimilarityMatrix<f64>;
pub type Similarity32 = SimilarityMatrix<f32>;
pub type PairAlignment = extract::PairAlignment<f64>;
pub type CorpusAlignmentRun = extract::CorpusAlignmentRun<f64>;
