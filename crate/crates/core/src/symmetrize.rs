//! Combining forward and backward asymmetric alignments.
//!
//! Both inputs must be in the same `(source, target)` orientation.

use crate::alignment::AlignmentSet;
use crate::error::Result;

pub fn intersect(fwd: &AlignmentSet, bwd: &AlignmentSet) -> Result<AlignmentSet> {
    fwd.intersection(bwd)
}

/// Neighbour offsets for the grow step: horizontal/vertical first, then the
/// diagonals.
const NEIGHBOURS: [(isize, isize); 8] = [
    (-1, 0),
    (0, -1),
    (1, 0),
    (0, 1),
    (-1, -1),
    (-1, 1),
    (1, -1),
    (1, 1),
];

/// grow-diag-final-and.
///
/// Starts from the intersection. The grow step repeatedly scans the current
/// alignment row-major and adds union edges in the 8-neighbourhood of an
/// aligned point when their source or target word is still unaligned, until
/// nothing changes. The final-and step then adds, row-major, every remaining
/// union edge whose source and target words are both unaligned.
pub fn grow_diag_final_and(fwd: &AlignmentSet, bwd: &AlignmentSet) -> Result<AlignmentSet> {
    let union = fwd.union(bwd)?;
    let mut out = fwd.intersection(bwd)?;
    let (le, lf) = out.dims();
    let mut src_aligned: Vec<bool> = out.src_degrees().iter().map(|&d| d > 0).collect();
    let mut tgt_aligned: Vec<bool> = out.tgt_degrees().iter().map(|&d| d > 0).collect();

    loop {
        let mut added = false;
        for i in 0..le {
            for j in 0..lf {
                if !out.contains(i, j) {
                    continue;
                }
                for (di, dj) in NEIGHBOURS {
                    let (Some(ni), Some(nj)) = (i.checked_add_signed(di), j.checked_add_signed(dj))
                    else {
                        continue;
                    };
                    if ni >= le || nj >= lf || !union.contains(ni, nj) || out.contains(ni, nj) {
                        continue;
                    }
                    if !src_aligned[ni] || !tgt_aligned[nj] {
                        out.insert(ni, nj)?;
                        src_aligned[ni] = true;
                        tgt_aligned[nj] = true;
                        added = true;
                    }
                }
            }
        }
        if !added {
            break;
        }
    }

    for (i, j) in union.iter() {
        if !src_aligned[i] && !tgt_aligned[j] {
            out.insert(i, j)?;
            src_aligned[i] = true;
            tgt_aligned[j] = true;
        }
    }
    Ok(out)
}
