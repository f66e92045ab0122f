//! Finite cochain complexes of exact rational matrices and their cohomology.
//!
//! One rank engine serves the de Rham, Lie-algebra and Cech computations:
//! dimensions come out of fraction-free elimination, so every Betti number is
//! exact.

use thiserror::Error;

use crate::linalg::SparseMat;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ComplexError {
    #[error("delta({p}) has shape {rows}x{cols}, expected {expect_rows}x{expect_cols}")]
    ShapeMismatch {
        p: usize,
        rows: usize,
        cols: usize,
        expect_rows: usize,
        expect_cols: usize,
    },
    #[error("not a complex: delta({p_next}) * delta({p}) != 0")]
    NotAComplex { p: usize, p_next: usize },
}

/// A finite sequence of coboundary matrices `delta_p : B^p -> B^{p+1}` with
/// `delta_{p+1} * delta_p = 0`, checked on construction.
#[derive(Debug, Clone)]
pub struct CochainComplex {
    dims: Vec<usize>,
    deltas: Vec<SparseMat>,
}

impl CochainComplex {
    /// Builds and validates a complex. `dims` lists the cochain space
    /// dimensions; `deltas[p]` must have shape `dims[p+1] x dims[p]`.
    pub fn new(dims: Vec<usize>, deltas: Vec<SparseMat>) -> Result<Self, ComplexError> {
        assert_eq!(
            deltas.len() + 1,
            dims.len().max(1),
            "need one delta per adjacent pair of cochain spaces"
        );
        for (p, d) in deltas.iter().enumerate() {
            if d.nrows() != dims[p + 1] || d.ncols() != dims[p] {
                return Err(ComplexError::ShapeMismatch {
                    p,
                    rows: d.nrows(),
                    cols: d.ncols(),
                    expect_rows: dims[p + 1],
                    expect_cols: dims[p],
                });
            }
        }
        for p in 0..deltas.len().saturating_sub(1) {
            if !deltas[p + 1].mul(&deltas[p]).is_zero() {
                return Err(ComplexError::NotAComplex { p, p_next: p + 1 });
            }
        }
        Ok(CochainComplex { dims, deltas })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn delta(&self, p: usize) -> &SparseMat {
        &self.deltas[p]
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    /// Exact cohomology dimensions `h^p = dim Ker delta_p - dim Im delta_{p-1}`.
    pub fn betti(&self) -> BettiTable {
        let ranks: Vec<usize> = self.deltas.iter().map(SparseMat::rank).collect();
        let h = (0..self.dims.len())
            .map(|p| {
                let out_rank = if p < ranks.len() { ranks[p] } else { 0 };
                let in_rank = if p > 0 { ranks[p - 1] } else { 0 };
                self.dims[p] - out_rank - in_rank
            })
            .collect();
        BettiTable { h }
    }

    /// Euler characteristic from the cochain dimensions.
    pub fn euler_characteristic(&self) -> i64 {
        self.dims
            .iter()
            .enumerate()
            .map(|(p, &d)| if p % 2 == 0 { d as i64 } else { -(d as i64) })
            .sum()
    }
}

/// Per-degree cohomology dimensions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BettiTable {
    h: Vec<usize>,
}

impl BettiTable {
    pub fn from_dims(h: Vec<usize>) -> Self {
        BettiTable { h }
    }

    pub fn dims(&self) -> &[usize] {
        &self.h
    }

    pub fn dim(&self, p: usize) -> usize {
        self.h.get(p).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.h
            .iter()
            .enumerate()
            .map(|(p, &d)| if p % 2 == 0 { d as i64 } else { -(d as i64) })
            .sum()
    }

    /// Degreewise sum of two tables (shorter one padded with zeros).
    pub fn add(&self, other: &BettiTable) -> BettiTable {
        let n = self.h.len().max(other.h.len());
        let h = (0..n).map(|p| self.dim(p) + other.dim(p)).collect();
        BettiTable { h }
    }

    /// Drops trailing zero entries.
    pub fn trimmed(&self) -> BettiTable {
        let mut h = self.h.clone();
        while matches!(h.last(), Some(0)) {
            h.pop();
        }
        BettiTable { h }
    }
}
