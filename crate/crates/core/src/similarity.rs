//! Embedding matrices, similarity matrices, the distortion prior and
//! subword pooling.

use log::warn;
use ndarray::{Array2, ArrayView1, ArrayView2, Axis};

use crate::error::{Error, Result};
use crate::pair::WordSpans;
use crate::scalar::Scalar;

/// One row per token, `dim` columns. Every value is finite.
#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingMatrix<T> {
    values: Array2<T>,
}

impl<T: Scalar> EmbeddingMatrix<T> {
    pub fn new(values: Array2<T>) -> Result<Self> {
        let (rows, cols) = values.dim();
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyMatrix { rows, cols });
        }
        if let Some(((row, col), _)) = values.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite { row, col });
        }
        Ok(Self { values })
    }

    /// Builds from row-major data of `rows * dim` values.
    pub fn from_flat(rows: usize, dim: usize, data: Vec<T>) -> Result<Self> {
        let values = Array2::from_shape_vec((rows, dim), data)
            .map_err(|e| Error::DimensionMismatch(e.to_string()))?;
        Self::new(values)
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch(format!(
                "row of length {} in a matrix of dim {dim}",
                bad.len()
            )));
        }
        Self::from_flat(rows.len(), dim, rows.concat())
    }

    pub fn rows(&self) -> usize {
        self.values.nrows()
    }

    pub fn dim(&self) -> usize {
        self.values.ncols()
    }

    pub fn row(&self, i: usize) -> ArrayView1<'_, T> {
        self.values.row(i)
    }

    pub fn view(&self) -> ArrayView2<'_, T> {
        self.values.view()
    }

    pub fn into_inner(self) -> Array2<T> {
        self.values
    }

    /// Converts the scalar type, e.g. `f32` file payloads into `f64`.
    pub fn cast<U: Scalar>(&self) -> EmbeddingMatrix<U> {
        EmbeddingMatrix {
            values: self.values.mapv(|v| U::of(v.as_f64())),
        }
    }

    /// Indices of rows whose Euclidean norm is zero.
    pub fn zero_norm_rows(&self) -> Vec<usize> {
        self.values
            .outer_iter()
            .enumerate()
            .filter(|(_, r)| r.iter().all(|v| v.is_zero()))
            .map(|(i, _)| i)
            .collect()
    }
}

/// `src_len x tgt_len` matrix with every entry in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SimilarityMatrix<T> {
    values: Array2<T>,
}

impl<T: Scalar> SimilarityMatrix<T> {
    pub fn new(values: Array2<T>) -> Result<Self> {
        for ((row, col), &v) in values.indexed_iter() {
            if !(v >= T::zero() && v <= T::one()) {
                return Err(Error::SimilarityOutOfRange {
                    row,
                    col,
                    value: v.as_f64(),
                });
            }
        }
        Ok(Self { values })
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch("ragged similarity rows".into()));
        }
        let values = Array2::from_shape_vec((rows.len(), cols), rows.concat())
            .map_err(|e| Error::DimensionMismatch(e.to_string()))?;
        Self::new(values)
    }

    /// Caller guarantees the `[0, 1]` invariant.
    pub(crate) fn from_array_unchecked(values: Array2<T>) -> Self {
        debug_assert!(values.iter().all(|&v| v >= T::zero() && v <= T::one()));
        Self { values }
    }

    pub fn src_len(&self) -> usize {
        self.values.nrows()
    }

    pub fn tgt_len(&self) -> usize {
        self.values.ncols()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.values.dim()
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.values[[i, j]]
    }

    pub fn view(&self) -> ArrayView2<'_, T> {
        self.values.view()
    }

    pub fn transpose(&self) -> Self {
        Self {
            values: self.values.t().to_owned(),
        }
    }

    /// Elementwise product with a weight matrix whose entries lie in `[0, 1]`.
    pub fn hadamard(&self, weights: &Array2<T>) -> Self {
        debug_assert_eq!(self.values.dim(), weights.dim());
        Self::from_array_unchecked(&self.values * weights)
    }
}

fn dot<T: Scalar>(a: ArrayView1<'_, T>, b: ArrayView1<'_, T>) -> T {
    a.iter().zip(b.iter()).map(|(&x, &y)| x * y).sum()
}

/// `S_ij = (cos(src_i, tgt_j) + 1) / 2`.
///
/// Rows with zero norm get similarity 0 against everything (and a warning),
/// which also keeps them out of argmax-based extraction.
pub fn cosine_similarity_matrix<T: Scalar>(
    src: &EmbeddingMatrix<T>,
    tgt: &EmbeddingMatrix<T>,
) -> Result<SimilarityMatrix<T>> {
    if src.dim() != tgt.dim() {
        return Err(Error::DimensionMismatch(format!(
            "source dim {} vs target dim {}",
            src.dim(),
            tgt.dim()
        )));
    }
    let norms = |m: &EmbeddingMatrix<T>| -> Vec<T> {
        m.values.outer_iter().map(|r| dot(r, r).sqrt()).collect()
    };
    let src_norms = norms(src);
    let tgt_norms = norms(tgt);
    for (side, ns) in [("source", &src_norms), ("target", &tgt_norms)] {
        let zero: Vec<usize> = ns
            .iter()
            .enumerate()
            .filter(|(_, n)| n.is_zero())
            .map(|(i, _)| i)
            .collect();
        if !zero.is_empty() {
            warn!("zero-norm {side} embedding rows {zero:?}; their similarities are set to 0");
        }
    }

    let two = T::one() + T::one();
    let mut out = Array2::zeros((src.rows(), tgt.rows()));
    for (i, a) in src.values.outer_iter().enumerate() {
        if src_norms[i].is_zero() {
            continue;
        }
        for (j, b) in tgt.values.outer_iter().enumerate() {
            if tgt_norms[j].is_zero() {
                continue;
            }
            let cos = dot(a, b) / (src_norms[i] * tgt_norms[j]);
            out[[i, j]] = ((cos + T::one()) / two).unit_clamp();
        }
    }
    Ok(SimilarityMatrix::from_array_unchecked(out))
}

/// The prior `P_ij = 1 - kappa * ((i+1)/l_e - (j+1)/l_f)^2`.
pub fn distortion_matrix<T: Scalar>(src_len: usize, tgt_len: usize, kappa: T) -> Array2<T> {
    let le = T::of_usize(src_len);
    let lf = T::of_usize(tgt_len);
    Array2::from_shape_fn((src_len, tgt_len), |(i, j)| {
        let d = T::of_usize(i + 1) / le - T::of_usize(j + 1) / lf;
        T::one() - kappa * d * d
    })
}

/// Multiplies `sim` by the distortion prior. `kappa = 0` returns the input
/// bit for bit.
pub fn apply_distortion<T: Scalar>(
    sim: &SimilarityMatrix<T>,
    kappa: T,
) -> Result<SimilarityMatrix<T>> {
    if !(kappa >= T::zero() && kappa <= T::one()) {
        return Err(Error::InvalidConfig(format!(
            "kappa {kappa} outside [0, 1]"
        )));
    }
    let (le, lf) = sim.dims();
    let prior = distortion_matrix(le, lf, kappa);
    let out = (&sim.values * &prior).mapv(Scalar::unit_clamp);
    Ok(SimilarityMatrix::from_array_unchecked(out))
}

/// Averages subword rows into one row per word.
pub fn pool_subword_to_word<T: Scalar>(
    emb: &EmbeddingMatrix<T>,
    spans: &WordSpans,
) -> Result<EmbeddingMatrix<T>> {
    if spans.subword_count() != emb.rows() {
        return Err(Error::DimensionMismatch(format!(
            "spans cover {} subwords, matrix has {} rows",
            spans.subword_count(),
            emb.rows()
        )));
    }
    let mut out = Array2::zeros((spans.word_count(), emb.dim()));
    for (w, span) in spans.iter().enumerate() {
        if span.is_empty() {
            return Err(Error::InvalidSpans {
                index: span.start,
                reason: "empty span".into(),
            });
        }
        let block = emb.values.slice(ndarray::s![span.clone(), ..]);
        let n = T::of_usize(span.len());
        let mean = block.sum_axis(Axis(0)).mapv(|v| v / n);
        out.row_mut(w).assign(&mean);
    }
    EmbeddingMatrix::new(out)
}
