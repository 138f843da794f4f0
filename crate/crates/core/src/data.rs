//! Sparse feature rows, labeled examples and datasets.
//!
//! Feature vectors are stored sparsely while iterates are dense, so every
//! per-example kernel here touches only the stored entries of `x`.

use crate::error::{Error, Result};

/// A sparse vector with strictly increasing indices and no stored zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVector {
    indices: Vec<usize>,
    values: Vec<f64>,
    dim: usize,
}

impl SparseVector {
    /// Builds a vector from `(index, value)` pairs. Zero values are dropped.
    pub fn new(entries: Vec<(usize, f64)>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidSparseVector("dim must be positive".into()));
        }
        let mut indices = Vec::with_capacity(entries.len());
        let mut values = Vec::with_capacity(entries.len());
        for (idx, val) in entries {
            if idx >= dim {
                return Err(Error::InvalidSparseVector(format!(
                    "index {idx} out of range for dim {dim}"
                )));
            }
            if let Some(&last) = indices.last() {
                if idx <= last {
                    return Err(Error::InvalidSparseVector(format!(
                        "indices not strictly increasing at {idx}"
                    )));
                }
            }
            if !val.is_finite() {
                return Err(Error::InvalidSparseVector(format!(
                    "non-finite value at index {idx}"
                )));
            }
            if val != 0.0 {
                indices.push(idx);
                values.push(val);
            }
        }
        Ok(Self {
            indices,
            values,
            dim,
        })
    }

    pub fn from_dense(dense: &[f64]) -> Result<Self> {
        Self::new(dense.iter().copied().enumerate().collect(), dense.len())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.indices
            .iter()
            .copied()
            .zip(self.values.iter().copied())
    }

    /// Inner product with a dense vector of at least `dim` entries.
    #[inline]
    pub fn dot(&self, dense: &[f64]) -> f64 {
        debug_assert!(dense.len() >= self.dim);
        self.iter().map(|(i, v)| v * dense[i]).sum()
    }

    /// `dense += scale * self`
    #[inline]
    pub fn axpy_into(&self, scale: f64, dense: &mut [f64]) {
        debug_assert!(dense.len() >= self.dim);
        for (i, v) in self.iter() {
            dense[i] += scale * v;
        }
    }

    pub fn squared_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum()
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.axpy_into(1.0, &mut out);
        out
    }

    /// Reinterprets the vector in a larger logical dimension.
    pub fn with_dim(mut self, dim: usize) -> Result<Self> {
        if let Some(&last) = self.indices.last() {
            if last >= dim {
                return Err(Error::InvalidSparseVector(format!(
                    "index {last} out of range for dim {dim}"
                )));
            }
        }
        if dim == 0 {
            return Err(Error::InvalidSparseVector("dim must be positive".into()));
        }
        self.dim = dim;
        Ok(self)
    }
}

/// Binary class label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Label {
    Negative,
    Positive,
}

impl Label {
    pub fn sign(self) -> f64 {
        match self {
            Label::Negative => -1.0,
            Label::Positive => 1.0,
        }
    }

    pub fn from_sign(y: f64) -> Result<Self> {
        if y == 1.0 {
            Ok(Label::Positive)
        } else if y == -1.0 {
            Ok(Label::Negative)
        } else {
            Err(Error::InvalidLabel(y))
        }
    }

    pub fn flipped(self) -> Self {
        match self {
            Label::Negative => Label::Positive,
            Label::Positive => Label::Negative,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledExample {
    pub x: SparseVector,
    pub y: Label,
}

impl LabeledExample {
    pub fn new(x: SparseVector, y: Label) -> Self {
        Self { x, y }
    }

    /// `y * <w, x>`
    #[inline]
    pub fn margin(&self, w: &[f64]) -> f64 {
        self.y.sign() * self.x.dot(w)
    }
}

/// A non-empty collection of examples sharing one feature dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    examples: Vec<LabeledExample>,
    dim: usize,
}

impl Dataset {
    pub fn new(examples: Vec<LabeledExample>, dim: usize) -> Result<Self> {
        if examples.is_empty() {
            return Err(Error::EmptyDataset);
        }
        if let Some(bad) = examples.iter().find(|e| e.x.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: bad.x.dim(),
            });
        }
        Ok(Self { examples, dim })
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn examples(&self) -> &[LabeledExample] {
        &self.examples
    }

    pub fn get(&self, i: usize) -> &LabeledExample {
        &self.examples[i]
    }

    pub fn nnz(&self) -> usize {
        self.examples.iter().map(|e| e.x.nnz()).sum()
    }

    pub fn max_squared_norm(&self) -> f64 {
        self.examples
            .iter()
            .map(|e| e.x.squared_norm())
            .fold(0.0, f64::max)
    }

    /// Copies the examples at `indices` into a new dataset of the same dimension.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let examples = indices.iter().map(|&i| self.examples[i].clone()).collect();
        Self::new(examples, self.dim)
    }

    pub(crate) fn check_dim(&self, w: &[f64]) -> Result<()> {
        if w.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: w.len(),
            });
        }
        Ok(())
    }
}

pub(crate) fn squared_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}
