//! Scoring against sure/possible gold alignments and binned analyses.
//!
//! Corpus scores are micro-averaged: edge counts are summed over all pairs
//! before precision, recall, F1 and AER are computed.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::ops::{Add, AddAssign};

use crate::alignment::{AlignmentSet, Edge};
use crate::error::{Error, Result};

/// Sure edges `S` and possible edges `P`, with `S ⊆ P`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GoldAlignment {
    sure: BTreeSet<Edge>,
    possible: BTreeSet<Edge>,
}

impl GoldAlignment {
    /// Sure edges are added to the possible set if missing.
    pub fn new(
        sure: impl IntoIterator<Item = Edge>,
        possible: impl IntoIterator<Item = Edge>,
    ) -> Self {
        let sure: BTreeSet<Edge> = sure.into_iter().collect();
        let mut possible: BTreeSet<Edge> = possible.into_iter().collect();
        possible.extend(sure.iter().copied());
        Self { sure, possible }
    }

    /// Gold with `S = P`.
    pub fn sure_only(edges: impl IntoIterator<Item = Edge>) -> Self {
        Self::new(edges, [])
    }

    pub fn sure(&self) -> &BTreeSet<Edge> {
        &self.sure
    }

    pub fn possible(&self) -> &BTreeSet<Edge> {
        &self.possible
    }

    pub fn add_sure(&mut self, e: Edge) {
        self.sure.insert(e);
        self.possible.insert(e);
    }

    pub fn add_possible(&mut self, e: Edge) {
        self.possible.insert(e);
    }

    /// Smallest `(src_len, tgt_len)` holding every possible edge.
    pub fn min_dims(&self) -> (usize, usize) {
        let s = self.possible.iter().map(|e| e.0 + 1).max().unwrap_or(0);
        let t = self.possible.iter().map(|e| e.1 + 1).max().unwrap_or(0);
        (s, t)
    }
}

/// Raw edge counts behind a score. They add across pairs and bins.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EdgeCounts {
    pub predicted: usize,
    pub sure: usize,
    pub predicted_sure: usize,
    pub predicted_possible: usize,
}

impl EdgeCounts {
    pub fn of(pred: &AlignmentSet, gold: &GoldAlignment) -> Self {
        Self::of_filtered(pred, gold, |_| true)
    }

    fn of_filtered(pred: &AlignmentSet, gold: &GoldAlignment, keep: impl Fn(Edge) -> bool) -> Self {
        let mut c = EdgeCounts {
            sure: gold.sure.iter().filter(|&&e| keep(e)).count(),
            ..Self::default()
        };
        for e in pred.iter().filter(|&e| keep(e)) {
            c.predicted += 1;
            if gold.sure.contains(&e) {
                c.predicted_sure += 1;
            }
            if gold.possible.contains(&e) {
                c.predicted_possible += 1;
            }
        }
        c
    }

    /// Strict scoring: a gold side without sure edges is an error.
    pub fn report(self) -> Result<ScoreReport> {
        if self.sure == 0 {
            return Err(Error::NoSureEdges);
        }
        Ok(self.report_lenient())
    }

    /// Like [`EdgeCounts::report`], but a bin without sure edges yields recall
    /// 0, F1 0, AER 1 and `empty = true` instead of an error.
    pub fn report_lenient(self) -> ScoreReport {
        let precision = ratio(self.predicted_possible, self.predicted);
        let recall = ratio(self.predicted_sure, self.sure);
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        let denom = self.predicted + self.sure;
        let aer = if denom == 0 {
            1.0
        } else {
            1.0 - (self.predicted_sure + self.predicted_possible) as f64 / denom as f64
        };
        ScoreReport {
            precision,
            recall,
            f1,
            aer,
            counts: self,
            empty: self.sure == 0,
        }
    }
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

impl Add for EdgeCounts {
    type Output = EdgeCounts;

    fn add(self, o: EdgeCounts) -> EdgeCounts {
        EdgeCounts {
            predicted: self.predicted + o.predicted,
            sure: self.sure + o.sure,
            predicted_sure: self.predicted_sure + o.predicted_sure,
            predicted_possible: self.predicted_possible + o.predicted_possible,
        }
    }
}

impl AddAssign for EdgeCounts {
    fn add_assign(&mut self, o: EdgeCounts) {
        *self = *self + o;
    }
}

impl std::iter::Sum for EdgeCounts {
    fn sum<I: Iterator<Item = EdgeCounts>>(iter: I) -> Self {
        iter.fold(EdgeCounts::default(), Add::add)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScoreReport {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub aer: f64,
    pub counts: EdgeCounts,
    /// No sure edges fell into this report (only produced by binned scoring).
    pub empty: bool,
}

/// Precision against `P`, recall against `S`, their F1, and AER.
///
/// Without predictions, precision and F1 are 0. Gold without sure edges is an
/// error.
pub fn score(pred: &AlignmentSet, gold: &GoldAlignment) -> Result<ScoreReport> {
    EdgeCounts::of(pred, gold).report()
}

/// A predicted alignment with a pair id, as consumed by the corpus scorers.
pub trait Predicted {
    fn pair_id(&self) -> &str;
    fn alignment(&self) -> &AlignmentSet;
}

impl<T> Predicted for crate::extract::PairAlignment<T> {
    fn pair_id(&self) -> &str {
        &self.pair_id
    }
    fn alignment(&self) -> &AlignmentSet {
        &self.alignment
    }
}

impl Predicted for (String, AlignmentSet) {
    fn pair_id(&self) -> &str {
        &self.0
    }
    fn alignment(&self) -> &AlignmentSet {
        &self.1
    }
}

/// Gold alignments keyed by pair id.
pub type GoldSet = BTreeMap<String, GoldAlignment>;

/// Pairs gold alignments with ids by position, e.g. the ids of an embedding
/// file with the lines of a gold file.
pub fn gold_set<I, S>(ids: I, golds: Vec<GoldAlignment>) -> GoldSet
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    ids.into_iter().map(Into::into).zip(golds).collect()
}

fn lookup<'g>(golds: &'g GoldSet, id: &str) -> Result<&'g GoldAlignment> {
    golds
        .get(id)
        .ok_or_else(|| Error::MissingGold(id.to_string()))
}

pub fn corpus_counts<P: Predicted>(runs: &[P], golds: &GoldSet) -> Result<EdgeCounts> {
    let mut total = EdgeCounts::default();
    for p in runs {
        total += EdgeCounts::of(p.alignment(), lookup(golds, p.pair_id())?);
    }
    Ok(total)
}

/// Micro-averaged corpus score.
pub fn corpus_score<P: Predicted>(runs: &[P], golds: &GoldSet) -> Result<ScoreReport> {
    corpus_counts(runs, golds)?.report()
}

/// Half-open frequency bins `[b_0, b_1), ..., [b_{k-1}, ∞)` from strictly
/// increasing boundaries.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FrequencyBins {
    bounds: Vec<u64>,
}

impl FrequencyBins {
    pub fn new(bounds: Vec<u64>) -> Result<Self> {
        if bounds.is_empty() {
            return Err(Error::InvalidBins("no bin boundaries".into()));
        }
        if let Some(w) = bounds.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidBins(format!(
                "boundaries must strictly increase, got {} then {}",
                w[0], w[1]
            )));
        }
        Ok(Self { bounds })
    }

    pub fn len(&self) -> usize {
        self.bounds.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bounds.is_empty()
    }

    /// Bin holding `freq`, or `None` below the first boundary.
    pub fn bin_of(&self, freq: u64) -> Option<usize> {
        let k = self.bounds.partition_point(|&b| b <= freq);
        k.checked_sub(1)
    }

    /// `(lower, upper)`; `upper` is `None` for the open last bin.
    pub fn range(&self, bin: usize) -> (u64, Option<u64>) {
        (self.bounds[bin], self.bounds.get(bin + 1).copied())
    }

    pub fn label(&self, bin: usize) -> String {
        match self.range(bin) {
            (lo, Some(hi)) => format!("[{lo},{hi})"),
            (lo, None) => format!("[{lo},inf)"),
        }
    }
}

/// Word frequencies of each side; missing words count as 0.
#[derive(Clone, Debug, Default)]
pub struct FrequencyTable {
    pub src: HashMap<String, u64>,
    pub tgt: HashMap<String, u64>,
}

impl FrequencyTable {
    pub fn src_freq(&self, w: &str) -> u64 {
        self.src.get(w).copied().unwrap_or(0)
    }

    pub fn tgt_freq(&self, w: &str) -> u64 {
        self.tgt.get(w).copied().unwrap_or(0)
    }
}

/// Word tokens of one pair, for the binned analyses.
#[derive(Clone, Debug, PartialEq)]
pub struct PairWords<'a> {
    pub pair_id: &'a str,
    pub src: &'a [String],
    pub tgt: &'a [String],
}

#[derive(Clone, Debug, PartialEq)]
pub struct BinReport {
    pub bin: String,
    pub report: ScoreReport,
}

/// Scores per frequency bin. Each edge of `A`, `S` and `P` goes to the bin of
/// `min(freq(src word), freq(tgt word))`.
pub fn frequency_bin_scores<P: Predicted>(
    runs: &[P],
    golds: &GoldSet,
    words: &[PairWords<'_>],
    freqs: &FrequencyTable,
    bins: &FrequencyBins,
) -> Result<Vec<BinReport>> {
    let by_id: HashMap<&str, &PairWords<'_>> = words.iter().map(|w| (w.pair_id, w)).collect();
    let mut totals = vec![EdgeCounts::default(); bins.len()];
    for p in runs {
        let gold = lookup(golds, p.pair_id())?;
        let w = by_id.get(p.pair_id()).ok_or_else(|| Error::Sentence {
            id: p.pair_id().to_string(),
            reason: "no word tokens for frequency lookup".into(),
        })?;
        let bin_of_edge = |(i, j): Edge| -> Option<usize> {
            let fs = w.src.get(i).map_or(0, |s| freqs.src_freq(s));
            let ft = w.tgt.get(j).map_or(0, |t| freqs.tgt_freq(t));
            bins.bin_of(fs.min(ft))
        };
        for (b, total) in totals.iter_mut().enumerate() {
            *total += EdgeCounts::of_filtered(p.alignment(), gold, |e| bin_of_edge(e) == Some(b));
        }
    }
    Ok(totals
        .into_iter()
        .enumerate()
        .map(|(b, c)| BinReport {
            bin: bins.label(b),
            report: c.report_lenient(),
        })
        .collect())
}

/// Per-token tags of one pair, e.g. part-of-speech tags.
#[derive(Clone, Debug, PartialEq)]
pub struct PairTags<'a> {
    pub pair_id: &'a str,
    pub src: &'a [String],
    pub tgt: &'a [String],
}

/// Scores restricted, for each tag, to edges where at least one endpoint
/// carries that tag. An edge whose endpoints have different tags counts
/// under both. Returned in tag order.
pub fn tag_bin_scores<P: Predicted>(
    runs: &[P],
    golds: &GoldSet,
    tags: &[PairTags<'_>],
) -> Result<Vec<BinReport>> {
    let all: BTreeSet<&str> = tags
        .iter()
        .flat_map(|t| t.src.iter().chain(t.tgt.iter()))
        .map(String::as_str)
        .collect();
    let all: Vec<&str> = all.into_iter().collect();
    tag_scores_for(runs, golds, tags, &all)
}

/// [`tag_bin_scores`] for an explicit tag list; tags that occur nowhere get
/// an empty report.
pub fn tag_scores_for<P: Predicted>(
    runs: &[P],
    golds: &GoldSet,
    tags: &[PairTags<'_>],
    wanted: &[&str],
) -> Result<Vec<BinReport>> {
    let by_id: HashMap<&str, &PairTags<'_>> = tags.iter().map(|t| (t.pair_id, t)).collect();
    let mut totals = vec![EdgeCounts::default(); wanted.len()];
    for p in runs {
        let gold = lookup(golds, p.pair_id())?;
        let t = by_id.get(p.pair_id()).ok_or_else(|| Error::Sentence {
            id: p.pair_id().to_string(),
            reason: "no tags".into(),
        })?;
        let (le, lf) = p.alignment().dims();
        for (side, n, len) in [("source", t.src.len(), le), ("target", t.tgt.len(), lf)] {
            if n != len {
                log::debug!("{side} tag length mismatch in `{}`", p.pair_id());
                return Err(Error::TagLengthMismatch {
                    pair_id: p.pair_id().to_string(),
                    tags: n,
                    tokens: len,
                });
            }
        }
        for (k, tag) in wanted.iter().enumerate() {
            let has = |(i, j): Edge| {
                t.src.get(i).is_some_and(|s| s == tag) || t.tgt.get(j).is_some_and(|s| s == tag)
            };
            totals[k] += EdgeCounts::of_filtered(p.alignment(), gold, has);
        }
    }
    Ok(wanted
        .iter()
        .zip(totals)
        .map(|(tag, c)| BinReport {
            bin: tag.to_string(),
            report: c.report_lenient(),
        })
        .collect())
}
