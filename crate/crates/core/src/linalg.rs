//! Exact linear algebra over the rationals.
//!
//! Ranks are computed by fraction-free Gaussian elimination: rows are scaled
//! to integer vectors, combined by cross-multiplication only, and divided by
//! their gcd after every combination, so no rational arithmetic and no
//! coefficient blow-up occurs during elimination. [`RowSpan`] keeps a reduced
//! echelon basis over the rationals for span-membership and quotient
//! computations.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::scalar::Scalar;

/// Sparse matrix with exact rational entries, stored row-major with
/// column-sorted rows.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseMat {
    nrows: usize,
    ncols: usize,
    rows: Vec<Vec<(usize, Scalar)>>,
}

impl SparseMat {
    pub fn zero(nrows: usize, ncols: usize) -> Self {
        SparseMat {
            nrows,
            ncols,
            rows: vec![Vec::new(); nrows],
        }
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n).map(|i| vec![(i, crate::scalar::int(1))]).collect();
        SparseMat {
            nrows: n,
            ncols: n,
            rows,
        }
    }

    /// Builds from `(row, col, value)` triplets; repeated positions are summed.
    pub fn from_triplets(
        nrows: usize,
        ncols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, Scalar)>,
    ) -> Self {
        let mut acc: Vec<BTreeMap<usize, Scalar>> = vec![BTreeMap::new(); nrows];
        for (r, c, v) in triplets {
            assert!(r < nrows && c < ncols, "triplet out of bounds");
            let slot = acc[r].entry(c).or_insert_with(Scalar::zero);
            *slot += v;
        }
        let rows = acc
            .into_iter()
            .map(|m| m.into_iter().filter(|(_, v)| !v.is_zero()).collect())
            .collect();
        SparseMat {
            nrows,
            ncols,
            rows,
        }
    }

    pub fn from_dense(rows: &[Vec<Scalar>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        let rows = rows
            .iter()
            .map(|r| {
                assert_eq!(r.len(), ncols, "ragged dense matrix");
                r.iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(j, v)| (j, v.clone()))
                    .collect()
            })
            .collect();
        SparseMat {
            nrows,
            ncols,
            rows,
        }
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rows(&self) -> &[Vec<(usize, Scalar)>] {
        &self.rows
    }

    pub fn set(&mut self, r: usize, c: usize, v: Scalar) {
        assert!(r < self.nrows && c < self.ncols);
        let row = &mut self.rows[r];
        match row.binary_search_by_key(&c, |&(j, _)| j) {
            Ok(k) => {
                if v.is_zero() {
                    row.remove(k);
                } else {
                    row[k].1 = v;
                }
            }
            Err(k) => {
                if !v.is_zero() {
                    row.insert(k, (c, v));
                }
            }
        }
    }

    pub fn get(&self, r: usize, c: usize) -> Scalar {
        self.rows[r]
            .binary_search_by_key(&c, |&(j, _)| j)
            .map(|k| self.rows[r][k].1.clone())
            .unwrap_or_else(|_| Scalar::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(Vec::is_empty)
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &SparseMat) -> SparseMat {
        assert_eq!(self.ncols, rhs.nrows, "shape mismatch in mul");
        let mut rows = Vec::with_capacity(self.nrows);
        for row in &self.rows {
            let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
            for (k, v) in row {
                for (j, w) in &rhs.rows[*k] {
                    let slot = acc.entry(*j).or_insert_with(Scalar::zero);
                    *slot += v * w;
                }
            }
            rows.push(
                acc.into_iter()
                    .filter(|(_, v)| !v.is_zero())
                    .collect::<Vec<_>>(),
            );
        }
        SparseMat {
            nrows: self.nrows,
            ncols: rhs.ncols,
            rows,
        }
    }

    pub fn add(&self, rhs: &SparseMat) -> SparseMat {
        self.combine(rhs, false)
    }

    pub fn sub(&self, rhs: &SparseMat) -> SparseMat {
        self.combine(rhs, true)
    }

    fn combine(&self, rhs: &SparseMat, negate: bool) -> SparseMat {
        assert_eq!((self.nrows, self.ncols), (rhs.nrows, rhs.ncols));
        let mut rows = Vec::with_capacity(self.nrows);
        for (a, b) in self.rows.iter().zip(&rhs.rows) {
            let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
            for (j, v) in a {
                *acc.entry(*j).or_insert_with(Scalar::zero) += v;
            }
            for (j, v) in b {
                let slot = acc.entry(*j).or_insert_with(Scalar::zero);
                if negate {
                    *slot -= v;
                } else {
                    *slot += v;
                }
            }
            rows.push(
                acc.into_iter()
                    .filter(|(_, v)| !v.is_zero())
                    .collect::<Vec<_>>(),
            );
        }
        SparseMat {
            nrows: self.nrows,
            ncols: self.ncols,
            rows,
        }
    }

    pub fn scale(&self, s: &Scalar) -> SparseMat {
        if s.is_zero() {
            return SparseMat::zero(self.nrows, self.ncols);
        }
        let rows = self
            .rows
            .iter()
            .map(|r| r.iter().map(|(j, v)| (*j, v * s)).collect())
            .collect();
        SparseMat {
            nrows: self.nrows,
            ncols: self.ncols,
            rows,
        }
    }

    /// Applies the matrix to a dense column vector.
    pub fn apply(&self, v: &[Scalar]) -> Vec<Scalar> {
        assert_eq!(v.len(), self.ncols);
        self.rows
            .iter()
            .map(|row| {
                let mut acc = Scalar::zero();
                for (j, w) in row {
                    acc += w * &v[*j];
                }
                acc
            })
            .collect()
    }

    pub fn transpose(&self) -> SparseMat {
        let mut rows: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); self.ncols];
        for (i, row) in self.rows.iter().enumerate() {
            for (j, v) in row {
                rows[*j].push((i, v.clone()));
            }
        }
        SparseMat {
            nrows: self.ncols,
            ncols: self.nrows,
            rows,
        }
    }

    pub fn to_dense(&self) -> Vec<Vec<Scalar>> {
        let mut out = vec![vec![Scalar::zero(); self.ncols]; self.nrows];
        for (i, row) in self.rows.iter().enumerate() {
            for (j, v) in row {
                out[i][*j] = v.clone();
            }
        }
        out
    }

    /// Exact rank by fraction-free elimination.
    pub fn rank(&self) -> usize {
        let mut elim = IntEchelon::new(self.ncols);
        for row in &self.rows {
            elim.insert(scale_to_int(row));
        }
        elim.rank()
    }
}

/// Clears denominators from a sparse rational row and divides by the content,
/// producing a primitive integer row.
fn scale_to_int(row: &[(usize, Scalar)]) -> Vec<(usize, BigInt)> {
    if row.is_empty() {
        return Vec::new();
    }
    let mut lcm = BigInt::one();
    for (_, v) in row {
        lcm = lcm.lcm(v.denom());
    }
    let mut out: Vec<(usize, BigInt)> = row
        .iter()
        .map(|(j, v)| (*j, v.numer() * (&lcm / v.denom())))
        .collect();
    normalize_int_row(&mut out);
    out
}

fn normalize_int_row(row: &mut Vec<(usize, BigInt)>) {
    row.retain(|(_, v)| !v.is_zero());
    if row.is_empty() {
        return;
    }
    let mut g = BigInt::zero();
    for (_, v) in row.iter() {
        g = g.gcd(v);
        if g.is_one() {
            break;
        }
    }
    if g.is_negative() {
        g = -g;
    }
    if !g.is_one() && !g.is_zero() {
        for (_, v) in row.iter_mut() {
            *v = &*v / &g;
        }
    }
}

/// Fraction-free row echelon accumulator over the integers. Rows are combined
/// by cross-multiplication (`lead_p * r - lead_r * p`) and re-normalized by
/// their gcd, so elimination never leaves the integers.
struct IntEchelon {
    #[allow(dead_code)]
    ncols: usize,
    // pivot column -> primitive integer row with that leading column
    pivots: BTreeMap<usize, Vec<(usize, BigInt)>>,
}

impl IntEchelon {
    fn new(ncols: usize) -> Self {
        IntEchelon {
            ncols,
            pivots: BTreeMap::new(),
        }
    }

    fn insert(&mut self, mut row: Vec<(usize, BigInt)>) -> bool {
        loop {
            let Some(&(lead, _)) = row.first() else {
                return false;
            };
            let Some(pivot) = self.pivots.get(&lead) else {
                self.pivots.insert(lead, row);
                return true;
            };
            let a = pivot[0].1.clone();
            let b = row[0].1.clone();
            row = int_row_combine(&a, &row, &b, pivot);
            normalize_int_row(&mut row);
        }
    }

    fn rank(&self) -> usize {
        self.pivots.len()
    }
}

/// Computes `a * r - b * p` on sparse integer rows.
fn int_row_combine(
    a: &BigInt,
    r: &[(usize, BigInt)],
    b: &BigInt,
    p: &[(usize, BigInt)],
) -> Vec<(usize, BigInt)> {
    let mut out = Vec::with_capacity(r.len() + p.len());
    let (mut i, mut j) = (0, 0);
    while i < r.len() || j < p.len() {
        let ci = r.get(i).map(|&(c, _)| c);
        let cj = p.get(j).map(|&(c, _)| c);
        match (ci, cj) {
            (Some(ci), Some(cj)) if ci == cj => {
                let v = a * &r[i].1 - b * &p[j].1;
                if !v.is_zero() {
                    out.push((ci, v));
                }
                i += 1;
                j += 1;
            }
            (Some(ci), Some(cj)) if ci < cj => {
                out.push((ci, a * &r[i].1));
                i += 1;
            }
            (Some(_), Some(cj)) => {
                out.push((cj, -(b * &p[j].1)));
                j += 1;
            }
            (Some(ci), None) => {
                out.push((ci, a * &r[i].1));
                i += 1;
            }
            (None, Some(cj)) => {
                out.push((cj, -(b * &p[j].1)));
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    out
}

/// Reduced echelon basis over the rationals, for incremental span building,
/// membership tests and canonical quotient representatives.
#[derive(Debug, Clone, Default)]
pub struct RowSpan {
    ncols: usize,
    // pivot column -> row, normalized to pivot value 1 and fully reduced
    pivots: BTreeMap<usize, Vec<(usize, Scalar)>>,
}

impl RowSpan {
    pub fn new(ncols: usize) -> Self {
        RowSpan {
            ncols,
            pivots: BTreeMap::new(),
        }
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    /// Reduces a row against the span; the residual is supported on non-pivot
    /// columns and is the canonical representative of the row's class modulo
    /// the span.
    pub fn reduce(&self, row: &[(usize, Scalar)]) -> Vec<(usize, Scalar)> {
        let mut acc: BTreeMap<usize, Scalar> = row
            .iter()
            .filter(|(_, v)| !v.is_zero())
            .map(|(j, v)| (*j, v.clone()))
            .collect();
        loop {
            let hit = acc
                .iter()
                .find(|(j, _)| self.pivots.contains_key(j))
                .map(|(j, v)| (*j, v.clone()));
            let Some((col, coef)) = hit else { break };
            let pivot = &self.pivots[&col];
            for (j, w) in pivot {
                let slot = acc.entry(*j).or_insert_with(Scalar::zero);
                *slot -= &coef * w;
                if slot.is_zero() {
                    acc.remove(j);
                }
            }
        }
        acc.into_iter().collect()
    }

    /// Inserts the row; returns true when it enlarged the span.
    pub fn insert(&mut self, row: &[(usize, Scalar)]) -> bool {
        let mut red = self.reduce(row);
        let Some((lead, lv)) = red.first().cloned() else {
            return false;
        };
        let inv = Scalar::one() / lv;
        for (_, v) in red.iter_mut() {
            *v *= &inv;
        }
        // back-substitute into existing pivot rows to keep them fully reduced
        for pivot in self.pivots.values_mut() {
            if let Ok(k) = pivot.binary_search_by_key(&lead, |&(j, _)| j) {
                let c = pivot[k].1.clone();
                let mut acc: BTreeMap<usize, Scalar> =
                    pivot.iter().map(|(j, v)| (*j, v.clone())).collect();
                for (j, w) in &red {
                    let slot = acc.entry(*j).or_insert_with(Scalar::zero);
                    *slot -= &c * w;
                    if slot.is_zero() {
                        acc.remove(j);
                    }
                }
                *pivot = acc.into_iter().collect();
            }
        }
        self.pivots.insert(lead, red);
        true
    }

    pub fn contains(&self, row: &[(usize, Scalar)]) -> bool {
        self.reduce(row).is_empty()
    }

    pub fn pivot_columns(&self) -> Vec<usize> {
        self.pivots.keys().copied().collect()
    }

    pub fn basis_rows(&self) -> Vec<Vec<(usize, Scalar)>> {
        self.pivots.values().cloned().collect()
    }
}

/// Basis of the right null space of `m`, as dense vectors.
pub fn nullspace(m: &SparseMat) -> Vec<Vec<Scalar>> {
    let ncols = m.ncols();
    let mut span = RowSpan::new(ncols);
    for row in m.rows() {
        span.insert(row);
    }
    let pivot_cols = span.pivot_columns();
    let mut basis = Vec::new();
    for free in 0..ncols {
        if pivot_cols.contains(&free) {
            continue;
        }
        let mut v = vec![Scalar::zero(); ncols];
        v[free] = Scalar::one();
        for row in span.basis_rows() {
            let lead = row[0].0;
            let coeff = row
                .iter()
                .find(|(j, _)| *j == free)
                .map(|(_, c)| c.clone())
                .unwrap_or_else(Scalar::zero);
            v[lead] = -coeff;
        }
        basis.push(v);
    }
    basis
}

/// Solves `m x = b` exactly; returns `None` when the system is inconsistent.
pub fn solve(m: &SparseMat, b: &[Scalar]) -> Option<Vec<Scalar>> {
    assert_eq!(b.len(), m.nrows());
    // Eliminate on the augmented transpose-free system: reduce [m | b] rows.
    let ncols = m.ncols();
    let mut span = RowSpan::new(ncols + 1);
    for (i, row) in m.rows().iter().enumerate() {
        let mut aug: Vec<(usize, Scalar)> = row.clone();
        if !b[i].is_zero() {
            aug.push((ncols, b[i].clone()));
        }
        span.insert(&aug);
    }
    // Inconsistent iff some pivot sits in the augmented column.
    if span.pivot_columns().contains(&ncols) {
        return None;
    }
    let mut x = vec![Scalar::zero(); ncols];
    for row in span.basis_rows() {
        let lead = row[0].0;
        // row reads: x_lead + sum(free coeffs) = rhs; free variables set to 0.
        let rhs = row
            .iter()
            .find(|(j, _)| *j == ncols)
            .map(|(_, v)| v.clone())
            .unwrap_or_else(Scalar::zero);
        x[lead] = rhs;
    }
    // The fully reduced echelon rows may still couple pivot variables to free
    // ones; with free variables pinned to zero the pivot values above solve
    // the system. Verify exactly.
    let check = m.apply(&x);
    if check == b { Some(x) } else { None }
}
