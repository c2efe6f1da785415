//! Maximum-weight maximal matching on the complete bipartite graph induced by
//! a similarity matrix.
//!
//! Every cell is an edge (zero-weight ones included), so a maximal matching
//! always has `min(l_e, l_f)` edges and the problem reduces to a rectangular
//! assignment problem. That is solved with the shortest-augmenting-path
//! Hungarian method in O(n^2 m), `n <= m`.

use crate::alignment::AlignmentSet;
use crate::scalar::Scalar;
use crate::similarity::SimilarityMatrix;

/// Minimum-cost assignment of every row of an `n x m` cost matrix (`n <= m`)
/// to a distinct column. Returns the column of each row.
///
/// Strict comparisons in the column scan make the lowest column index win
/// ties, so the result is deterministic for a fixed input.
pub(crate) fn min_cost_assignment<T: Scalar>(
    n: usize,
    m: usize,
    cost: impl Fn(usize, usize) -> T,
) -> Vec<usize> {
    assert!(n <= m, "assignment needs at least as many columns as rows");
    if n == 0 {
        return Vec::new();
    }
    let inf = T::infinity();
    // 1-based potentials; index 0 is the virtual start column.
    let mut u = vec![T::zero(); n + 1];
    let mut v = vec![T::zero(); m + 1];
    let mut row_of_col = vec![0usize; m + 1];
    let mut way = vec![0usize; m + 1];
    let mut minv = vec![inf; m + 1];
    let mut used = vec![false; m + 1];

    for i in 1..=n {
        row_of_col[0] = i;
        let mut j0 = 0usize;
        minv.iter_mut().for_each(|x| *x = inf);
        used.iter_mut().for_each(|x| *x = false);
        loop {
            used[j0] = true;
            let i0 = row_of_col[j0];
            let mut delta = inf;
            let mut j1 = 0usize;
            for j in 1..=m {
                if used[j] {
                    continue;
                }
                let cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if cur < minv[j] {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if minv[j] < delta {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for j in 0..=m {
                if used[j] {
                    u[row_of_col[j]] = u[row_of_col[j]] + delta;
                    v[j] = v[j] - delta;
                } else {
                    minv[j] = minv[j] - delta;
                }
            }
            j0 = j1;
            if row_of_col[j0] == 0 {
                break;
            }
        }
        // Flip the augmenting path.
        loop {
            let j1 = way[j0];
            row_of_col[j0] = row_of_col[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }

    let mut assignment = vec![usize::MAX; n];
    for j in 1..=m {
        if row_of_col[j] > 0 {
            assignment[row_of_col[j] - 1] = j - 1;
        }
    }
    debug_assert!(assignment.iter().all(|&j| j < m));
    assignment
}

/// Returns a matching of size `min(l_e, l_f)` with maximum total similarity.
pub fn match_align<T: Scalar>(sim: &SimilarityMatrix<T>) -> AlignmentSet {
    let (le, lf) = sim.dims();
    let mut out = AlignmentSet::new(le, lf);
    if le <= lf {
        let cols = min_cost_assignment(le, lf, |i, j| -sim.get(i, j));
        for (i, j) in cols.into_iter().enumerate() {
            out.insert(i, j).expect("assignment in range");
        }
    } else {
        let rows = min_cost_assignment(lf, le, |j, i| -sim.get(i, j));
        for (j, i) in rows.into_iter().enumerate() {
            out.insert(i, j).expect("assignment in range");
        }
    }
    out
}

/// Sum of similarities over the edges of `a`.
pub fn alignment_weight<T: Scalar>(sim: &SimilarityMatrix<T>, a: &AlignmentSet) -> T {
    a.iter().map(|(i, j)| sim.get(i, j)).sum()
}
