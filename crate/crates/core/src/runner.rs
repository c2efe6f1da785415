//! Corpus-level pipeline: align every sentence pair of two embedding files,
//! run the null pass, convert subword alignments to words, and score.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::alignment::AlignmentSet;
use crate::error::{Error, Result};
use crate::eval::{corpus_score, gold_set, GoldAlignment, ScoreReport};
use crate::extract::{align_pair, finish_corpus, CorpusAlignmentRun, ExtractionConfig, Method};
use crate::io::{EmbeddingCorpus, Level, SentenceEmbedding};
use crate::scalar::Scalar;
use crate::similarity::{pool_subword_to_word, EmbeddingMatrix};
use crate::subword::convert_subword_to_word;

/// Word-level alignments in corpus order.
pub type WordAlignments = Vec<(String, AlignmentSet)>;

#[derive(Clone, Debug, PartialEq)]
pub struct RunOptions {
    pub cfg: ExtractionConfig,
    /// Level at which edges are extracted; output is always word level.
    pub level: Level,
    /// Worker threads; 0 lets rayon decide.
    pub workers: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            cfg: ExtractionConfig::default(),
            level: Level::Word,
            workers: 1,
        }
    }
}

fn check_ids(src: &[SentenceEmbedding], tgt: &[SentenceEmbedding]) -> Result<()> {
    if let Some((index, (s, t))) = src
        .iter()
        .zip(tgt)
        .enumerate()
        .find(|(_, (s, t))| s.id != t.id)
    {
        return Err(Error::PairIdMismatch {
            index,
            src: s.id.clone(),
            tgt: t.id.clone(),
        });
    }
    if src.len() != tgt.len() {
        return Err(Error::PairCountMismatch {
            src: src.len(),
            tgt: tgt.len(),
        });
    }
    Ok(())
}

/// The matrix to align for one side at the requested level.
fn side_matrix<T: Scalar>(s: &SentenceEmbedding, level: Level) -> Result<EmbeddingMatrix<T>> {
    let m = s.matrix.cast::<T>();
    match (level, &s.spans) {
        (Level::Subword, Some(_)) | (Level::Word, None) => Ok(m),
        (Level::Word, Some(spans)) => pool_subword_to_word(&m, spans),
        (Level::Subword, None) => Err(Error::Sentence {
            id: s.id.clone(),
            reason: "subword-level alignment needs a subword-level embedding file".into(),
        }),
    }
}

/// Runs extraction over all pairs with `opts.workers` threads. The output is
/// identical for every worker count.
pub fn run_corpus<T: Scalar>(
    src: &EmbeddingCorpus,
    tgt: &EmbeddingCorpus,
    opts: &RunOptions,
) -> Result<WordAlignments> {
    opts.cfg.validate()?;
    check_ids(&src.sentences, &tgt.sentences)?;

    let align_one = |k: usize| -> Result<_> {
        let (s, t) = (&src.sentences[k], &tgt.sentences[k]);
        let sm = side_matrix::<T>(s, opts.level)?;
        let tm = side_matrix::<T>(t, opts.level)?;
        align_pair(&s.id, &sm, &tm, &opts.cfg)
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(opts.workers)
        .build()
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let pairs = pool.install(|| {
        (0..src.sentences.len())
            .into_par_iter()
            .map(align_one)
            .collect::<Result<Vec<_>>>()
    })?;

    let run = finish_corpus(CorpusAlignmentRun::new(pairs), &opts.cfg)?;

    run.pairs
        .into_iter()
        .enumerate()
        .map(|(k, p)| {
            let (s, t) = (&src.sentences[k], &tgt.sentences[k]);
            let words = match opts.level {
                Level::Word => p.alignment,
                Level::Subword => convert_subword_to_word(
                    &p.alignment,
                    s.spans.as_ref().expect("checked in side_matrix"),
                    t.spans.as_ref().expect("checked in side_matrix"),
                )?,
            };
            Ok((p.pair_id, words))
        })
        .collect()
}

/// Scores word alignments against gold given in corpus order.
pub fn score_run(alignments: &WordAlignments, golds: &[GoldAlignment]) -> Result<ScoreReport> {
    for ((id, a), g) in alignments.iter().zip(golds) {
        let (gs, gt) = g.min_dims();
        if gs > a.src_len() || gt > a.tgt_len() {
            return Err(Error::Sentence {
                id: id.clone(),
                reason: format!(
                    "gold edge outside the {}x{} word grid",
                    a.src_len(),
                    a.tgt_len()
                ),
            });
        }
    }
    let golds = gold_set(alignments.iter().map(|(id, _)| id.clone()), golds.to_vec());
    corpus_score(alignments, &golds)
}

/// Configuration axis varied by [`sweep`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepAxis {
    Method,
    NMax,
    Alpha,
    /// Turns the distortion prior on.
    Kappa,
    /// Turns the null filter on.
    NullPercentile,
    Dist,
    Null,
    Level,
}

impl SweepAxis {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepAxis::Method => "method",
            SweepAxis::NMax => "n-max",
            SweepAxis::Alpha => "alpha",
            SweepAxis::Kappa => "kappa",
            SweepAxis::NullPercentile => "null-percentile",
            SweepAxis::Dist => "dist",
            SweepAxis::Null => "null",
            SweepAxis::Level => "level",
        }
    }

    /// Applies one axis value on top of `base`.
    pub fn apply(self, base: &RunOptions, value: &str) -> Result<RunOptions> {
        let bad =
            || Error::InvalidConfig(format!("bad value `{value}` for axis {}", self.as_str()));
        let num = || value.parse::<f64>().map_err(|_| bad());
        let flag = || match value {
            "on" | "true" | "1" => Ok(true),
            "off" | "false" | "0" => Ok(false),
            _ => Err(bad()),
        };
        let mut o = base.clone();
        match self {
            SweepAxis::Method => o.cfg.method = value.parse::<Method>()?,
            SweepAxis::NMax => o.cfg.n_max = value.parse().map_err(|_| bad())?,
            SweepAxis::Alpha => o.cfg.alpha = num()?,
            SweepAxis::Kappa => {
                o.cfg.kappa = num()?;
                o.cfg.dist_enabled = true;
            }
            SweepAxis::NullPercentile => {
                o.cfg.null_percentile = num()?;
                o.cfg.null_enabled = true;
            }
            SweepAxis::Dist => o.cfg.dist_enabled = flag()?,
            SweepAxis::Null => o.cfg.null_enabled = flag()?,
            SweepAxis::Level => o.level = value.parse()?,
        }
        o.cfg.validate()?;
        Ok(o)
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "method" => SweepAxis::Method,
            "n-max" | "n_max" => SweepAxis::NMax,
            "alpha" => SweepAxis::Alpha,
            "kappa" => SweepAxis::Kappa,
            "null-percentile" | "null_percentile" | "tau" => SweepAxis::NullPercentile,
            "dist" => SweepAxis::Dist,
            "null" => SweepAxis::Null,
            "level" => SweepAxis::Level,
            other => {
                return Err(Error::InvalidConfig(format!(
                    "unknown sweep axis `{other}`"
                )))
            }
        })
    }
}

/// One row of a sweep table.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    /// Axis name; `layer` for [`sweep_layers`].
    pub axis: String,
    pub value: String,
    pub cfg: ExtractionConfig,
    pub level: Level,
    pub report: ScoreReport,
}

/// Runs the corpus once per axis value and scores each run.
pub fn sweep<T: Scalar>(
    src: &EmbeddingCorpus,
    tgt: &EmbeddingCorpus,
    golds: &[GoldAlignment],
    base: &RunOptions,
    axis: SweepAxis,
    values: &[String],
) -> Result<Vec<SweepRow>> {
    values
        .iter()
        .map(|v| {
            let opts = axis.apply(base, v)?;
            let run = run_corpus::<T>(src, tgt, &opts)?;
            Ok(SweepRow {
                axis: axis.to_string(),
                value: v.clone(),
                cfg: opts.cfg,
                level: opts.level,
                report: score_run(&run, golds)?,
            })
        })
        .collect()
}

/// Embeddings of one model layer, for [`sweep_layers`].
pub struct LayerInput {
    pub label: String,
    pub src: EmbeddingCorpus,
    pub tgt: EmbeddingCorpus,
}

/// Scores the same configuration on embeddings from several layers.
pub fn sweep_layers<T: Scalar>(
    layers: &[LayerInput],
    golds: &[GoldAlignment],
    base: &RunOptions,
) -> Result<Vec<SweepRow>> {
    layers
        .iter()
        .map(|l| {
            let run = run_corpus::<T>(&l.src, &l.tgt, base)?;
            Ok(SweepRow {
                axis: "layer".into(),
                value: l.label.clone(),
                cfg: base.cfg.clone(),
                level: base.level,
                report: score_run(&run, golds)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::EmbeddingHeader;
    use crate::pair::WordSpans;

    fn sent(id: &str, rows: &[Vec<f32>], spans: Option<WordSpans>) -> SentenceEmbedding {
        SentenceEmbedding {
            id: id.into(),
            tokens: (0..rows.len()).map(|k| format!("t{k}")).collect(),
            spans,
            matrix: EmbeddingMatrix::from_rows(rows).unwrap(),
        }
    }

    fn corpus(level: Level, s: Vec<SentenceEmbedding>) -> EmbeddingCorpus {
        EmbeddingCorpus {
            header: EmbeddingHeader::new(2, level),
            sentences: s,
        }
    }

    #[test]
    fn id_mismatch_names_first_divergent_pair() {
        let a = corpus(
            Level::Word,
            vec![
                sent("1", &[vec![1.0, 0.0]], None),
                sent("2", &[vec![1.0, 0.0]], None),
            ],
        );
        let b = corpus(
            Level::Word,
            vec![
                sent("1", &[vec![1.0, 0.0]], None),
                sent("3", &[vec![1.0, 0.0]], None),
            ],
        );
        match run_corpus::<f64>(&a, &b, &RunOptions::default()) {
            Err(Error::PairIdMismatch { index, src, tgt }) => {
                assert_eq!((index, src.as_str(), tgt.as_str()), (1, "2", "3"));
            }
            other => panic!("{other:?}"),
        }
        let short = corpus(Level::Word, vec![sent("1", &[vec![1.0, 0.0]], None)]);
        assert!(matches!(
            run_corpus::<f64>(&a, &short, &RunOptions::default()),
            Err(Error::PairCountMismatch { src: 2, tgt: 1 })
        ));
    }

    #[test]
    fn subword_run_converts_to_words() {
        // Source: "foot ##ball" -> 1 word; target: 2 single-piece words.
        let src = corpus(
            Level::Subword,
            vec![sent(
                "p",
                &[vec![1.0, 0.1], vec![0.1, 1.0]],
                Some(WordSpans::new(vec![0..2], 2).unwrap()),
            )],
        );
        let tgt = corpus(
            Level::Subword,
            vec![sent(
                "p",
                &[vec![1.0, 0.0], vec![0.0, 1.0]],
                Some(WordSpans::identity(2)),
            )],
        );
        let opts = RunOptions {
            level: Level::Subword,
            ..RunOptions::default()
        };
        let out = run_corpus::<f64>(&src, &tgt, &opts).unwrap();
        assert_eq!(out[0].1.dims(), (1, 2));
        assert_eq!(out[0].1.iter().collect::<Vec<_>>(), vec![(0, 0), (0, 1)]);

        // Word level pools the two pieces into one vector; only one edge fits.
        let words = run_corpus::<f64>(&src, &tgt, &RunOptions::default()).unwrap();
        assert_eq!(words[0].1.dims(), (1, 2));
        assert_eq!(words[0].1.len(), 1);
    }

    #[test]
    fn subword_level_needs_spans() {
        let a = corpus(Level::Word, vec![sent("1", &[vec![1.0, 0.0]], None)]);
        let opts = RunOptions {
            level: Level::Subword,
            ..RunOptions::default()
        };
        assert!(run_corpus::<f64>(&a, &a, &opts).is_err());
    }

    #[test]
    fn axis_application() {
        let base = RunOptions::default();
        let k = SweepAxis::Kappa.apply(&base, "0.3").unwrap();
        assert!(k.cfg.dist_enabled);
        assert_eq!(k.cfg.kappa, 0.3);
        let n = SweepAxis::NullPercentile.apply(&base, "90").unwrap();
        assert!(n.cfg.null_enabled);
        assert_eq!(
            SweepAxis::Method.apply(&base, "match").unwrap().cfg.method,
            Method::Match
        );
        assert!(SweepAxis::Alpha.apply(&base, "1.5").is_err());
        assert!(SweepAxis::NMax.apply(&base, "0").is_err());
        assert!(SweepAxis::Dist.apply(&base, "maybe").is_err());
        assert_eq!(
            "tau".parse::<SweepAxis>().unwrap(),
            SweepAxis::NullPercentile
        );
    }

    #[test]
    fn gold_outside_grid_is_rejected() {
        let a = vec![("p".to_string(), AlignmentSet::new(2, 2))];
        assert!(score_run(&a, &[GoldAlignment::sure_only([(2, 0)])]).is_err());
        assert!(score_run(&a, &[GoldAlignment::sure_only([(1, 0)])]).is_ok());
    }
}
