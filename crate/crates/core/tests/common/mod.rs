//! Test support: brute-force oracles and seeded synthetic corpora.

#![allow(dead_code)]

use std::collections::BTreeSet;

use embalign::io::{EmbeddingCorpus, EmbeddingHeader, Level, SentenceEmbedding};
use embalign::{EmbeddingMatrix, GoldAlignment, Similarity, WordSpans};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform `[0, 1)` entries; ties have probability zero.
pub fn random_similarity(rng: &mut impl Rng, rows: usize, cols: usize) -> Similarity {
    let data: Vec<Vec<f64>> = (0..rows)
        .map(|_| (0..cols).map(|_| rng.gen::<f64>()).collect())
        .collect();
    Similarity::from_rows(&data).unwrap()
}

/// Entries drawn from a handful of levels, so ties and zeros are common.
pub fn coarse_similarity(rng: &mut impl Rng, rows: usize, cols: usize) -> Similarity {
    let levels = [0.0, 0.25, 0.5, 0.75, 1.0];
    let data: Vec<Vec<f64>> = (0..rows)
        .map(|_| (0..cols).map(|_| *levels.choose(rng).unwrap()).collect())
        .collect();
    Similarity::from_rows(&data).unwrap()
}

/// Enumerates every matching of the complete bipartite graph, keeps the
/// maximal ones (no free row and free column left together), and returns
/// the largest total weight among them.
pub fn brute_force_max_maximal_matching(sim: &Similarity) -> f64 {
    let (le, lf) = sim.dims();
    let mut best = f64::NEG_INFINITY;
    let mut col_used = vec![false; lf];
    let mut row_used = vec![false; le];
    fn rec(
        i: usize,
        sim: &Similarity,
        row_used: &mut Vec<bool>,
        col_used: &mut Vec<bool>,
        weight: f64,
        best: &mut f64,
    ) {
        let (le, lf) = sim.dims();
        if i == le {
            let free_row = row_used.iter().any(|u| !u);
            let free_col = col_used.iter().any(|u| !u);
            if !(free_row && free_col) && weight > *best {
                *best = weight;
            }
            return;
        }
        // leave row i unmatched
        rec(i + 1, sim, row_used, col_used, weight, best);
        for j in 0..lf {
            if !col_used[j] {
                col_used[j] = true;
                row_used[i] = true;
                rec(i + 1, sim, row_used, col_used, weight + sim.get(i, j), best);
                col_used[j] = false;
                row_used[i] = false;
            }
        }
    }
    rec(0, sim, &mut row_used, &mut col_used, 0.0, &mut best);
    best
}

/// Direct definition of mutual argmax, written independently of the library:
/// for each cell, check it is the first maximum of its row and its column.
pub fn brute_force_argmax(sim: &Similarity) -> BTreeSet<(usize, usize)> {
    let (le, lf) = sim.dims();
    let mut out = BTreeSet::new();
    for i in 0..le {
        for j in 0..lf {
            let v = sim.get(i, j);
            if v == 0.0 {
                continue;
            }
            let row_first = (0..lf).all(|l| sim.get(i, l) < v || (sim.get(i, l) == v && l >= j));
            let col_first = (0..le).all(|l| sim.get(l, j) < v || (sim.get(l, j) == v && l >= i));
            if row_first && col_first {
                out.insert((i, j));
            }
        }
    }
    out
}

pub struct SyntheticCorpus {
    pub src: EmbeddingCorpus,
    pub tgt: EmbeddingCorpus,
    pub gold: Vec<GoldAlignment>,
}

fn unit_gaussian(rng: &mut impl Rng, dim: usize) -> Vec<f32> {
    let v: Vec<f32> = (0..dim)
        .map(|_| {
            // Box-Muller
            let u1: f32 = rng.gen_range(1e-7..1.0);
            let u2: f32 = rng.gen();
            (-2.0 * u1.ln()).sqrt() * (std::f32::consts::TAU * u2).cos()
        })
        .collect();
    v
}

fn noisy(base: &[f32], noise: f32, rng: &mut impl Rng) -> Vec<f32> {
    let n = unit_gaussian(rng, base.len());
    base.iter().zip(n).map(|(b, e)| b + noise * e).collect()
}

/// A parallel corpus with a planted word alignment.
///
/// Each source word carries a concept vector. Most target words copy the
/// concept of the source word they translate (plus noise, with a mild
/// local reordering); some source words have two translations; some words
/// on either side are untranslated and get unrelated vectors. Gold sure
/// edges are the planted links.
pub fn synthetic_corpus(seed: u64, pairs: usize, dim: usize, noise: f32) -> SyntheticCorpus {
    let mut rng = rng(seed);
    let header = EmbeddingHeader::new(dim, Level::Word);
    let mut src_s = Vec::new();
    let mut tgt_s = Vec::new();
    let mut gold = Vec::new();
    for p in 0..pairs {
        let le = rng.gen_range(4..=12);
        let concepts: Vec<Vec<f32>> = (0..le).map(|_| unit_gaussian(&mut rng, dim)).collect();
        let mut src_rows: Vec<Vec<f32>> =
            concepts.iter().map(|c| noisy(c, noise, &mut rng)).collect();

        // target: sequence of (source word or None)
        let mut tgt_links: Vec<Option<usize>> = Vec::new();
        for i in 0..le {
            let r: f64 = rng.gen();
            if r < 0.12 {
                continue; // untranslated source word
            }
            tgt_links.push(Some(i));
            if r > 0.88 {
                tgt_links.push(Some(i)); // two-word translation
            }
            if rng.gen::<f64>() < 0.1 {
                tgt_links.push(None); // inserted target word
            }
        }
        if tgt_links.is_empty() {
            tgt_links.push(Some(0));
        }
        // local reordering
        for k in 1..tgt_links.len() {
            if rng.gen::<f64>() < 0.2 {
                tgt_links.swap(k - 1, k);
            }
        }
        let tgt_rows: Vec<Vec<f32>> = tgt_links
            .iter()
            .map(|l| match l {
                Some(i) => noisy(&concepts[*i], noise, &mut rng),
                None => unit_gaussian(&mut rng, dim),
            })
            .collect();
        // untranslated source words drift away from their concept
        for i in 0..le {
            if !tgt_links.contains(&Some(i)) {
                src_rows[i] = unit_gaussian(&mut rng, dim);
            }
        }
        let sure = tgt_links
            .iter()
            .enumerate()
            .filter_map(|(j, l)| l.map(|i| (i, j)));
        gold.push(GoldAlignment::sure_only(sure));

        let id = format!("{p}");
        src_s.push(sentence(&id, "s", &src_rows, None));
        tgt_s.push(sentence(&id, "t", &tgt_rows, None));
    }
    SyntheticCorpus {
        src: EmbeddingCorpus {
            header,
            sentences: src_s,
        },
        tgt: EmbeddingCorpus {
            header,
            sentences: tgt_s,
        },
        gold,
    }
}

pub fn sentence(
    id: &str,
    prefix: &str,
    rows: &[Vec<f32>],
    spans: Option<WordSpans>,
) -> SentenceEmbedding {
    SentenceEmbedding {
        id: id.to_string(),
        tokens: (0..rows.len()).map(|k| format!("{prefix}{k}")).collect(),
        spans,
        matrix: EmbeddingMatrix::from_rows(rows).unwrap(),
    }
}

/// Splits every word of a word-level corpus into 1-3 subword pieces with
/// jittered copies of the word vector, producing a subword-level corpus
/// whose word alignment is unchanged.
pub fn split_into_subwords(c: &EmbeddingCorpus, seed: u64) -> EmbeddingCorpus {
    let mut rng = rng(seed);
    let header = EmbeddingHeader::new(c.header.dim, Level::Subword);
    let sentences = c
        .sentences
        .iter()
        .map(|s| {
            let mut rows = Vec::new();
            let mut tokens = Vec::new();
            let mut ranges = Vec::new();
            for (w, row) in s.matrix.view().outer_iter().enumerate() {
                let pieces = rng.gen_range(1..=3);
                let start = rows.len();
                for k in 0..pieces {
                    rows.push(noisy(&row.to_vec(), 0.05, &mut rng));
                    tokens.push(if k == 0 {
                        s.tokens[w].clone()
                    } else {
                        format!("##{k}")
                    });
                }
                ranges.push(start..rows.len());
            }
            let n = rows.len();
            SentenceEmbedding {
                id: s.id.clone(),
                tokens,
                spans: Some(WordSpans::new(ranges, n).unwrap()),
                matrix: EmbeddingMatrix::from_rows(&rows).unwrap(),
            }
        })
        .collect();
    EmbeddingCorpus { header, sentences }
}
