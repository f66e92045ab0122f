//! Cech cochain complex of a finite cover with user-supplied presheaf data.
//!
//! A cover assigns a finite-dimensional rational space to every strictly
//! increasing index tuple (dimension 0 encodes an empty intersection) and a
//! restriction matrix to every face inclusion. Cochains live on the
//! increasing tuples only; the antisymmetric extension is implicit in the
//! alternating-sum coboundary. The complex computes `H*(U; S)` for the one
//! given cover; it equals the cohomology of the underlying space only for
//! good covers.

use std::collections::BTreeMap;

use num_traits::Zero;
use thiserror::Error;

use crate::complex::{BettiTable, CochainComplex, ComplexError};
use crate::linalg::SparseMat;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CechError {
    #[error("tuple {tuple:?} is not strictly increasing or out of range")]
    BadTuple { tuple: Vec<usize> },
    #[error("restriction for tuple {tuple:?}, face {face} has shape {rows}x{cols}, expected {expect_rows}x{expect_cols}")]
    RestrictionShape {
        tuple: Vec<usize>,
        face: usize,
        rows: usize,
        cols: usize,
        expect_rows: usize,
        expect_cols: usize,
    },
    #[error("missing restriction for tuple {tuple:?}, face {face} (dimensions differ, no identity default)")]
    MissingRestriction { tuple: Vec<usize>, face: usize },
    #[error("restrictions do not commute on tuple {tuple:?} (faces {face_a} and {face_b})")]
    Incompatible {
        tuple: Vec<usize>,
        face_a: usize,
        face_b: usize,
    },
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// Presheaf data on a finite cover: dimensions per increasing tuple and
/// restriction matrices per face inclusion. A restriction for `(tuple, k)`
/// maps the space of `tuple` minus its `k`-th entry into the space of
/// `tuple`. Omitted restrictions default to the identity when the two
/// dimensions agree (and to the zero map when either space is trivial).
#[derive(Debug, Clone)]
pub struct CoverPresheaf {
    n_opens: usize,
    p_max: usize,
    dims: BTreeMap<Vec<usize>, usize>,
    restrictions: BTreeMap<(Vec<usize>, usize), SparseMat>,
}

impl CoverPresheaf {
    /// Starts a cover description over `n_opens` opens, with cochain degrees
    /// up to `p_max` (tuples of size `p_max + 1`). All dimensions default to
    /// zero.
    pub fn new(n_opens: usize, p_max: usize) -> Self {
        CoverPresheaf {
            n_opens,
            p_max,
            dims: BTreeMap::new(),
            restrictions: BTreeMap::new(),
        }
    }

    /// The constant presheaf of dimension `d` on every nonempty tuple listed
    /// in `tuples` (identity restrictions elsewhere defaulted).
    pub fn constant_on(
        n_opens: usize,
        p_max: usize,
        d: usize,
        tuples: impl IntoIterator<Item = Vec<usize>>,
    ) -> Result<Self, CechError> {
        let mut cp = CoverPresheaf::new(n_opens, p_max);
        for t in tuples {
            cp.set_dim(t, d)?;
        }
        Ok(cp)
    }

    pub fn n_opens(&self) -> usize {
        self.n_opens
    }

    pub fn p_max(&self) -> usize {
        self.p_max
    }

    fn check_tuple(&self, tuple: &[usize]) -> Result<(), CechError> {
        let ok = !tuple.is_empty()
            && tuple.len() <= self.p_max + 1
            && tuple.windows(2).all(|w| w[0] < w[1])
            && tuple.iter().all(|&i| i < self.n_opens);
        if ok {
            Ok(())
        } else {
            Err(CechError::BadTuple {
                tuple: tuple.to_vec(),
            })
        }
    }

    pub fn set_dim(&mut self, tuple: Vec<usize>, dim: usize) -> Result<(), CechError> {
        self.check_tuple(&tuple)?;
        self.dims.insert(tuple, dim);
        Ok(())
    }

    pub fn set_restriction(
        &mut self,
        tuple: Vec<usize>,
        face: usize,
        matrix: SparseMat,
    ) -> Result<(), CechError> {
        self.check_tuple(&tuple)?;
        if face >= tuple.len() || tuple.len() < 2 {
            return Err(CechError::BadTuple { tuple });
        }
        let expect_rows = self.dim(&tuple);
        let mut source = tuple.clone();
        source.remove(face);
        let expect_cols = self.dim(&source);
        if matrix.nrows() != expect_rows || matrix.ncols() != expect_cols {
            return Err(CechError::RestrictionShape {
                tuple,
                face,
                rows: matrix.nrows(),
                cols: matrix.ncols(),
                expect_rows,
                expect_cols,
            });
        }
        self.restrictions.insert((tuple, face), matrix);
        Ok(())
    }

    pub fn dim(&self, tuple: &[usize]) -> usize {
        self.dims.get(tuple).copied().unwrap_or(0)
    }

    /// The restriction matrix for deleting entry `face` of `tuple`.
    pub fn restriction(&self, tuple: &[usize], face: usize) -> Result<SparseMat, CechError> {
        if let Some(m) = self.restrictions.get(&(tuple.to_vec(), face)) {
            return Ok(m.clone());
        }
        let rows = self.dim(tuple);
        let mut source = tuple.to_vec();
        source.remove(face);
        let cols = self.dim(&source);
        if rows == cols {
            return Ok(SparseMat::identity(rows));
        }
        if rows == 0 || cols == 0 {
            return Ok(SparseMat::zero(rows, cols));
        }
        Err(CechError::MissingRestriction {
            tuple: tuple.to_vec(),
            face,
        })
    }

    fn tuples(&self, p: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(p + 1);
        fn rec(
            n: usize,
            k: usize,
            start: usize,
            cur: &mut Vec<usize>,
            out: &mut Vec<Vec<usize>>,
        ) {
            if cur.len() == k {
                out.push(cur.clone());
                return;
            }
            for i in start..n {
                cur.push(i);
                rec(n, k, i + 1, cur, out);
                cur.pop();
            }
        }
        rec(self.n_opens, p + 1, 0, &mut cur, &mut out);
        out
    }

    /// Checks the presheaf axiom `r o r = r` on every composable face pair:
    /// removing entry `a` then entry `b` must agree with the other order.
    pub fn check_compatible(&self) -> Result<(), CechError> {
        for p in 2..=self.p_max {
            for tuple in self.tuples(p) {
                if self.dim(&tuple) == 0 {
                    continue;
                }
                for a in 0..tuple.len() {
                    for b in (a + 1)..tuple.len() {
                        // route 1: delete b first, then a
                        let mut minus_b = tuple.clone();
                        minus_b.remove(b);
                        let r1 = self
                            .restriction(&tuple, b)?
                            .mul(&self.restriction(&minus_b, a)?);
                        // route 2: delete a first, then b (which shifted)
                        let mut minus_a = tuple.clone();
                        minus_a.remove(a);
                        let r2 = self
                            .restriction(&tuple, a)?
                            .mul(&self.restriction(&minus_a, b - 1)?);
                        if r1 != r2 {
                            return Err(CechError::Incompatible {
                                tuple,
                                face_a: a,
                                face_b: b,
                            });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Assembles the Cech complex with the alternating-sum coboundary
    /// `delta s(i_0..i_{p+1}) = sum_k (-1)^k r(s(i_0.. without i_k ..))`.
    pub fn cech_complex(&self) -> Result<CochainComplex, CechError> {
        self.check_compatible()?;
        let mut dims = Vec::with_capacity(self.p_max + 1);
        let mut offsets: Vec<BTreeMap<Vec<usize>, usize>> = Vec::with_capacity(self.p_max + 1);
        for p in 0..=self.p_max {
            let mut total = 0;
            let mut offset = BTreeMap::new();
            for t in self.tuples(p) {
                offset.insert(t.clone(), total);
                total += self.dim(&t);
            }
            dims.push(total);
            offsets.push(offset);
        }
        let mut deltas = Vec::with_capacity(self.p_max);
        for p in 0..self.p_max {
            let mut triplets = Vec::new();
            for tuple in self.tuples(p + 1) {
                if self.dim(&tuple) == 0 {
                    continue;
                }
                let row_base = offsets[p + 1][&tuple];
                for face in 0..tuple.len() {
                    let mut source = tuple.clone();
                    source.remove(face);
                    if self.dim(&source) == 0 {
                        continue;
                    }
                    let col_base = offsets[p][&source];
                    let r = self.restriction(&tuple, face)?;
                    for (i, row) in r.rows().iter().enumerate() {
                        for (j, v) in row {
                            let coeff = if face % 2 == 1 { -v.clone() } else { v.clone() };
                            triplets.push((row_base + i, col_base + j, coeff));
                        }
                    }
                }
            }
            deltas.push(SparseMat::from_triplets(dims[p + 1], dims[p], triplets));
        }
        Ok(CochainComplex::new(dims, deltas)?)
    }

    pub fn cech_betti(&self) -> Result<BettiTable, CechError> {
        Ok(self.cech_complex()?.betti())
    }

    /// Checks the one-cocycle condition
    /// `s(j,k) - s(i,k) + s(i,j) = 0` on every triple overlap for a cochain
    /// given per ordered pair.
    pub fn is_one_cocycle(
        &self,
        cochain: &BTreeMap<Vec<usize>, Vec<crate::scalar::Scalar>>,
    ) -> Result<bool, CechError> {
        let complex = self.cech_complex()?;
        if complex.len() < 2 {
            return Ok(true);
        }
        // assemble the C^1 vector
        let mut v = vec![crate::scalar::Scalar::zero(); complex.dims()[1]];
        let mut offset = 0;
        for t in self.tuples(1) {
            let d = self.dim(&t);
            if let Some(vals) = cochain.get(&t) {
                for (k, val) in vals.iter().enumerate().take(d) {
                    v[offset + k] = val.clone();
                }
            }
            offset += d;
        }
        if complex.len() < 3 {
            // no triple overlaps tracked: the condition is vacuous
            return Ok(true);
        }
        let image = complex.delta(1).apply(&v);
        Ok(image.iter().all(num_traits::Zero::is_zero))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    /// Two opens with a connected overlap: an interval.
    fn interval_cover() -> CoverPresheaf {
        let mut cp = CoverPresheaf::new(2, 1);
        cp.set_dim(vec![0], 1).unwrap();
        cp.set_dim(vec![1], 1).unwrap();
        cp.set_dim(vec![0, 1], 1).unwrap();
        cp
    }

    /// Two opens whose overlap has two components: a circle.
    fn circle_two_cover() -> CoverPresheaf {
        let mut cp = CoverPresheaf::new(2, 1);
        cp.set_dim(vec![0], 1).unwrap();
        cp.set_dim(vec![1], 1).unwrap();
        cp.set_dim(vec![0, 1], 2).unwrap();
        let restrict = SparseMat::from_dense(&[vec![int(1)], vec![int(1)]]);
        cp.set_restriction(vec![0, 1], 0, restrict.clone()).unwrap();
        cp.set_restriction(vec![0, 1], 1, restrict).unwrap();
        cp
    }

    /// Three arcs covering a circle: single pairwise overlaps, empty triple
    /// overlap.
    fn circle_three_cover() -> CoverPresheaf {
        let mut cp = CoverPresheaf::new(3, 2);
        for i in 0..3 {
            cp.set_dim(vec![i], 1).unwrap();
        }
        for pair in [vec![0, 1], vec![0, 2], vec![1, 2]] {
            cp.set_dim(pair, 1).unwrap();
        }
        // triple overlap left at dimension 0
        cp
    }

    #[test]
    fn single_open() {
        let mut cp = CoverPresheaf::new(1, 0);
        cp.set_dim(vec![0], 1).unwrap();
        assert_eq!(cp.cech_betti().unwrap().dims(), &[1]);
    }

    #[test]
    fn interval_betti() {
        let betti = interval_cover().cech_betti().unwrap();
        assert_eq!(betti.dims(), &[1, 0]);
    }

    #[test]
    fn circle_two_cover_betti() {
        let betti = circle_two_cover().cech_betti().unwrap();
        assert_eq!(betti.dims(), &[1, 1]);
    }

    #[test]
    fn circle_three_cover_betti() {
        let betti = circle_three_cover().cech_betti().unwrap();
        assert_eq!(betti.dims(), &[1, 1, 0]);
    }

    #[test]
    fn h0_equals_equalizer_of_restrictions() {
        // H^0 is the kernel of delta_0: sections agreeing on overlaps
        let cp = circle_two_cover();
        let complex = cp.cech_complex().unwrap();
        let d0 = complex.delta(0);
        assert_eq!(d0.ncols() - d0.rank(), 1);
    }

    #[test]
    fn cocycle_condition_on_handmade_cochain() {
        let cp = circle_three_cover();
        // s(0,1) = 1, s(0,2) = 3, s(1,2) = 2: the triple overlap is empty, so
        // the cocycle identity holds vacuously
        let mut s = BTreeMap::new();
        s.insert(vec![0, 1], vec![int(1)]);
        s.insert(vec![0, 2], vec![int(3)]);
        s.insert(vec![1, 2], vec![int(2)]);
        assert!(cp.is_one_cocycle(&s).unwrap());

        // on a cover with a real triple overlap the condition is enforced
        let mut full = CoverPresheaf::new(3, 2);
        for i in 0..3 {
            full.set_dim(vec![i], 1).unwrap();
        }
        for pair in [vec![0, 1], vec![0, 2], vec![1, 2]] {
            full.set_dim(pair, 1).unwrap();
        }
        full.set_dim(vec![0, 1, 2], 1).unwrap();
        let mut good = BTreeMap::new();
        good.insert(vec![0, 1], vec![int(1)]);
        good.insert(vec![0, 2], vec![int(3)]);
        good.insert(vec![1, 2], vec![int(2)]);
        // s(1,2) - s(0,2) + s(0,1) = 2 - 3 + 1 = 0
        assert!(full.is_one_cocycle(&good).unwrap());
        let mut bad = good.clone();
        bad.insert(vec![1, 2], vec![int(5)]);
        assert!(!full.is_one_cocycle(&bad).unwrap());
    }

    #[test]
    fn incompatible_restrictions_rejected() {
        let mut cp = CoverPresheaf::new(3, 2);
        for i in 0..3 {
            cp.set_dim(vec![i], 1).unwrap();
        }
        for pair in [vec![0, 1], vec![0, 2], vec![1, 2]] {
            cp.set_dim(pair, 1).unwrap();
        }
        cp.set_dim(vec![0, 1, 2], 1).unwrap();
        // make one composite disagree: scale a single face map by 2
        cp.set_restriction(
            vec![0, 1, 2],
            0,
            SparseMat::from_dense(&[vec![int(2)]]),
        )
        .unwrap();
        // r_{012,0} o r_{12,*} != r_{012,*} o r_{..} for some pair
        assert!(matches!(
            cp.cech_complex(),
            Err(CechError::Incompatible { .. })
        ));
    }

    #[test]
    fn good_cover_of_two_sphere_boundary() {
        // tetrahedron boundary: 4 opens, all pairwise and triple overlaps
        // contractible, quadruple empty: Betti (1, 0, 1)
        let mut cp = CoverPresheaf::new(4, 3);
        for i in 0..4 {
            cp.set_dim(vec![i], 1).unwrap();
        }
        for i in 0..4 {
            for j in (i + 1)..4 {
                cp.set_dim(vec![i, j], 1).unwrap();
            }
        }
        for i in 0..4 {
            for j in (i + 1)..4 {
                for k in (j + 1)..4 {
                    cp.set_dim(vec![i, j, k], 1).unwrap();
                }
            }
        }
        let betti = cp.cech_betti().unwrap();
        assert_eq!(betti.dims(), &[1, 0, 1, 0]);
    }
}
