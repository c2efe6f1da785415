//! Mutual-argmax extraction and its iterated variant.

use ndarray::Array2;

use crate::alignment::AlignmentSet;
use crate::scalar::Scalar;
use crate::similarity::SimilarityMatrix;

/// Index of the first maximum, or `None` when every value is zero.
fn first_argmax<T: Scalar>(values: impl Iterator<Item = T>) -> Option<usize> {
    let mut best: Option<(usize, T)> = None;
    for (k, v) in values.enumerate() {
        match best {
            Some((_, b)) if v <= b => {}
            _ => best = Some((k, v)),
        }
    }
    best.filter(|&(_, v)| v > T::zero()).map(|(k, _)| k)
}

/// Aligns `(i, j)` when `j` is the argmax of row `i` and `i` the argmax of
/// column `j`. Ties go to the smaller index in each scan; all-zero rows and
/// columns take no edges.
pub fn argmax_align<T: Scalar>(sim: &SimilarityMatrix<T>) -> AlignmentSet {
    let (le, lf) = sim.dims();
    let view = sim.view();
    let row_best: Vec<Option<usize>> = view
        .outer_iter()
        .map(|row| first_argmax(row.iter().copied()))
        .collect();
    let col_best: Vec<Option<usize>> = view
        .columns()
        .into_iter()
        .map(|col| first_argmax(col.iter().copied()))
        .collect();

    let mut out = AlignmentSet::new(le, lf);
    for (i, best) in row_best.iter().enumerate() {
        if let Some(j) = *best {
            if col_best[j] == Some(i) {
                out.insert(i, j).expect("argmax indices are in range");
            }
        }
    }
    out
}

/// Repeated argmax over a reweighted matrix. Pairs where both tokens are
/// already aligned are zeroed, pairs where exactly one is aligned are scaled
/// by `alpha`, and new mutual argmaxes are added each round.
pub fn itermax_align<T: Scalar>(sim: &SimilarityMatrix<T>, n_max: usize, alpha: T) -> AlignmentSet {
    let (le, lf) = sim.dims();
    let mut aligned = AlignmentSet::new(le, lf);
    let mut mask = Array2::from_elem((le, lf), T::one());
    for _ in 0..n_max {
        let src_aligned: Vec<bool> = aligned.src_degrees().iter().map(|&d| d > 0).collect();
        let tgt_aligned: Vec<bool> = aligned.tgt_degrees().iter().map(|&d| d > 0).collect();
        for ((i, j), m) in mask.indexed_iter_mut() {
            *m = match (src_aligned[i], tgt_aligned[j]) {
                (false, false) => T::one(),
                (true, true) => T::zero(),
                _ => alpha,
            };
        }
        let found = argmax_align(&sim.hadamard(&mask));
        if found.is_empty() {
            // The mask only depends on `aligned`, so later rounds would repeat this one.
            break;
        }
        aligned
            .extend_from(&found)
            .expect("same dimensions by construction");
    }
    aligned
}
