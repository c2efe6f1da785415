//! Alignment extraction from similarity matrices.

mod argmax;
mod matching;
mod null;

use std::fmt;
use std::str::FromStr;

pub use argmax::{argmax_align, itermax_align};
pub use matching::{alignment_weight, match_align};
pub use null::{
    edge_entropy, nearest_rank, normalized_entropy, null_filter, CorpusAlignmentRun, PairAlignment,
};

use crate::alignment::AlignmentSet;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::similarity::{
    apply_distortion, cosine_similarity_matrix, EmbeddingMatrix, SimilarityMatrix,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum Method {
    #[default]
    Argmax,
    Itermax,
    Match,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Argmax => "argmax",
            Method::Itermax => "itermax",
            Method::Match => "match",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "argmax" => Ok(Method::Argmax),
            "itermax" => Ok(Method::Itermax),
            "match" => Ok(Method::Match),
            other => Err(Error::InvalidConfig(format!("unknown method `{other}`"))),
        }
    }
}

/// Extraction settings. Defaults: 2 Itermax rounds with `alpha = 0.9`,
/// `kappa = 0.5`, and the 95th percentile for the null threshold.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtractionConfig {
    pub method: Method,
    pub n_max: usize,
    pub alpha: f64,
    pub kappa: f64,
    pub dist_enabled: bool,
    pub null_enabled: bool,
    pub null_percentile: f64,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        Self {
            method: Method::Argmax,
            n_max: 2,
            alpha: 0.9,
            kappa: 0.5,
            dist_enabled: false,
            null_enabled: false,
            null_percentile: 95.0,
        }
    }
}

impl ExtractionConfig {
    pub fn with_method(method: Method) -> Self {
        Self {
            method,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_max == 0 {
            return Err(Error::InvalidConfig("n_max must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::InvalidConfig(format!(
                "alpha {} outside [0, 1]",
                self.alpha
            )));
        }
        if !(0.0..=1.0).contains(&self.kappa) {
            return Err(Error::InvalidConfig(format!(
                "kappa {} outside [0, 1]",
                self.kappa
            )));
        }
        if !(self.null_percentile > 0.0 && self.null_percentile <= 100.0) {
            return Err(Error::InvalidConfig(format!(
                "null percentile {} outside (0, 100]",
                self.null_percentile
            )));
        }
        Ok(())
    }
}

/// Runs the selected method on `sim` (after the distortion prior, if
/// enabled). When the null filter is on, each edge's entropy statistic is
/// recorded against the matrix the method saw; the filter itself runs over
/// the whole corpus with [`null_filter`].
pub fn align_similarity<T: Scalar>(
    pair_id: &str,
    sim: &SimilarityMatrix<T>,
    cfg: &ExtractionConfig,
) -> Result<PairAlignment<T>> {
    cfg.validate()?;
    let distorted;
    let sim = if cfg.dist_enabled {
        distorted = apply_distortion(sim, T::of(cfg.kappa))?;
        &distorted
    } else {
        sim
    };
    let alignment: AlignmentSet = match cfg.method {
        Method::Argmax => argmax_align(sim),
        Method::Itermax => itermax_align(sim, cfg.n_max, T::of(cfg.alpha)),
        Method::Match => match_align(sim),
    };
    let out = PairAlignment::new(pair_id, alignment);
    Ok(if cfg.null_enabled {
        out.with_entropies(sim)
    } else {
        out
    })
}

/// [`align_similarity`] on the cosine similarity of two embedding matrices.
pub fn align_pair<T: Scalar>(
    pair_id: &str,
    src: &EmbeddingMatrix<T>,
    tgt: &EmbeddingMatrix<T>,
    cfg: &ExtractionConfig,
) -> Result<PairAlignment<T>> {
    let sim = cosine_similarity_matrix(src, tgt)?;
    align_similarity(pair_id, &sim, cfg)
}

/// Applies the corpus-level null pass when `cfg.null_enabled`; otherwise
/// returns the run unchanged.
pub fn finish_corpus<T: Scalar>(
    run: CorpusAlignmentRun<T>,
    cfg: &ExtractionConfig,
) -> Result<CorpusAlignmentRun<T>> {
    if !cfg.null_enabled {
        return Ok(run);
    }
    let (filtered, tau) = null_filter(&run, cfg.null_percentile)?;
    log::info!(
        "null filter: tau = {tau} at percentile {}, kept {} of {} edges",
        cfg.null_percentile,
        filtered.edge_count(),
        run.edge_count()
    );
    Ok(filtered)
}
