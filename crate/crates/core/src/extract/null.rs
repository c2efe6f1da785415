//! Null-word filtering by normalized entropy of the similarity distribution.

use std::collections::BTreeMap;

use crate::alignment::{AlignmentSet, Edge};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::similarity::SimilarityMatrix;

/// Entropy of `values / sum(values)` divided by `ln(values.len())`.
///
/// Length-1 distributions and all-zero inputs give 0; `0 ln 0` is taken as 0.
pub fn normalized_entropy<T: Scalar>(values: impl Iterator<Item = T> + Clone) -> T {
    let n = values.clone().count();
    if n <= 1 {
        return T::zero();
    }
    let total: T = values.clone().sum();
    if total <= T::zero() {
        return T::zero();
    }
    let h: T = values
        .filter(|v| *v > T::zero())
        .map(|v| {
            let p = v / total;
            -(p * p.ln())
        })
        .sum();
    h / T::of_usize(n).ln()
}

/// `min(row entropy of i, column entropy of j)` for edge `(i, j)`.
pub fn edge_entropy<T: Scalar>(sim: &SimilarityMatrix<T>, i: usize, j: usize) -> T {
    let view = sim.view();
    let row = normalized_entropy(view.row(i).into_iter().copied());
    let col = normalized_entropy(view.column(j).into_iter().copied());
    row.min(col)
}

/// An alignment with the entropy statistic of each of its edges.
#[derive(Clone, Debug, PartialEq)]
pub struct PairAlignment<T> {
    pub pair_id: String,
    pub alignment: AlignmentSet,
    /// Present when the null filter is enabled for the run.
    pub edge_entropy: Option<BTreeMap<Edge, T>>,
}

impl<T: Scalar> PairAlignment<T> {
    pub fn new(pair_id: impl Into<String>, alignment: AlignmentSet) -> Self {
        Self {
            pair_id: pair_id.into(),
            alignment,
            edge_entropy: None,
        }
    }

    /// Records the entropy statistic of every edge against `sim`.
    pub fn with_entropies(mut self, sim: &SimilarityMatrix<T>) -> Self {
        let stats = self
            .alignment
            .iter()
            .map(|(i, j)| ((i, j), edge_entropy(sim, i, j)))
            .collect();
        self.edge_entropy = Some(stats);
        self
    }
}

/// Alignments for a whole corpus, one record per sentence pair.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CorpusAlignmentRun<T> {
    pub pairs: Vec<PairAlignment<T>>,
}

impl<T: Scalar> CorpusAlignmentRun<T> {
    pub fn new(pairs: Vec<PairAlignment<T>>) -> Self {
        Self { pairs }
    }

    pub fn edge_count(&self) -> usize {
        self.pairs.iter().map(|p| p.alignment.len()).sum()
    }

    /// All per-edge statistics, in pair order then row-major.
    pub fn entropies(&self) -> Result<Vec<T>> {
        let mut out = Vec::with_capacity(self.edge_count());
        for p in &self.pairs {
            let stats = p.edge_entropy.as_ref().ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "pair `{}` has no entropy statistics recorded",
                    p.pair_id
                ))
            })?;
            for e in p.alignment.iter() {
                let h = stats.get(&e).ok_or_else(|| {
                    Error::InvalidConfig(format!(
                        "pair `{}` is missing the entropy of edge {e:?}",
                        p.pair_id
                    ))
                })?;
                out.push(*h);
            }
        }
        Ok(out)
    }
}

/// Nearest-rank percentile: the smallest value with at least `percentile`%
/// of the data at or below it.
pub fn nearest_rank<T: Scalar>(values: &[T], percentile: f64) -> Option<T> {
    if values.is_empty() || !(percentile > 0.0 && percentile <= 100.0) {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("entropies are finite"));
    let rank = ((percentile / 100.0) * sorted.len() as f64).ceil() as usize;
    Some(sorted[rank.clamp(1, sorted.len()) - 1])
}

/// Sets `tau` to the given percentile of all edge statistics in the corpus
/// and drops every edge whose statistic exceeds it. Returns the filtered run
/// and `tau`.
pub fn null_filter<T: Scalar>(
    run: &CorpusAlignmentRun<T>,
    percentile: f64,
) -> Result<(CorpusAlignmentRun<T>, T)> {
    if !(percentile > 0.0 && percentile <= 100.0) {
        return Err(Error::InvalidConfig(format!(
            "null percentile {percentile} outside (0, 100]"
        )));
    }
    let all = run.entropies()?;
    let tau = nearest_rank(&all, percentile).ok_or(Error::NoAlignedEdges)?;
    let pairs = run
        .pairs
        .iter()
        .map(|p| {
            let stats = p.edge_entropy.as_ref().expect("checked by entropies()");
            let mut alignment = p.alignment.clone();
            let mut kept = stats.clone();
            for e in p.alignment.iter() {
                if stats[&e] > tau {
                    alignment.remove(e.0, e.1);
                    kept.remove(&e);
                }
            }
            PairAlignment {
                pair_id: p.pair_id.clone(),
                alignment,
                edge_entropy: Some(kept),
            }
        })
        .collect();
    Ok((CorpusAlignmentRun { pairs }, tau))
}
