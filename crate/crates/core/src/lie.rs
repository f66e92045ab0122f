//! Chevalley-Eilenberg cohomology of finite-dimensional Lie algebras over
//! the rationals with finite-dimensional module coefficients.
//!
//! Cochains are skew maps stored on strictly increasing index tuples tensored
//! with a module basis. The coboundary is the literal alternating sum: the
//! derivative terms `(-1)^q rho(e_{j_q})` and the bracket terms
//! `(-1)^{q+r} c([e_{j_q}, e_{j_r}], ...)`, with the inserted bracket index
//! sorted into the remaining tuple by transposition signs.

use std::collections::BTreeMap;

use num_traits::Zero;
use thiserror::Error;

use crate::complex::{BettiTable, CochainComplex, ComplexError};
use crate::linalg::SparseMat;
use crate::scalar::Scalar;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LieError {
    #[error("structure constants are not antisymmetric at ({i},{j})")]
    NotAntisymmetric { i: usize, j: usize },
    #[error("Jacobi identity fails on basis triple ({i},{j},{k})")]
    JacobiFails { i: usize, j: usize, k: usize },
    #[error("module action does not represent the bracket at ({i},{j})")]
    NotAModule { i: usize, j: usize },
    #[error("dimension mismatch: {0}")]
    Shape(String),
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

/// Finite-dimensional Lie algebra given by structure constants
/// `[e_i, e_j] = sum_k c[i][j][k] e_k`; antisymmetry and the Jacobi identity
/// are verified on construction.
#[derive(Debug, Clone)]
pub struct LieAlgebra {
    dim: usize,
    // bracket[i][j] is the coefficient vector of [e_i, e_j]
    bracket: Vec<Vec<Vec<Scalar>>>,
}

impl LieAlgebra {
    pub fn new(dim: usize, bracket: Vec<Vec<Vec<Scalar>>>) -> Result<Self, LieError> {
        if bracket.len() != dim
            || bracket
                .iter()
                .any(|r| r.len() != dim || r.iter().any(|v| v.len() != dim))
        {
            return Err(LieError::Shape(format!(
                "expected {dim}x{dim} bracket table of {dim}-vectors"
            )));
        }
        let alg = LieAlgebra { dim, bracket };
        for i in 0..dim {
            for j in 0..dim {
                let anti: Vec<Scalar> = (0..dim)
                    .map(|k| &alg.bracket[i][j][k] + &alg.bracket[j][i][k])
                    .collect();
                if anti.iter().any(|v| !v.is_zero()) {
                    return Err(LieError::NotAntisymmetric { i, j });
                }
            }
        }
        for i in 0..dim {
            for j in (i + 1)..dim {
                for k in (j + 1)..dim {
                    // [[e_i, e_j], e_k] + [[e_j, e_k], e_i] + [[e_k, e_i], e_j]
                    let mut total = vec![Scalar::zero(); dim];
                    for (a, b, c) in [(i, j, k), (j, k, i), (k, i, j)] {
                        let inner = &alg.bracket[a][b];
                        for (m, coeff) in inner.iter().enumerate() {
                            if coeff.is_zero() {
                                continue;
                            }
                            for t in 0..dim {
                                total[t] += coeff * &alg.bracket[m][c][t];
                            }
                        }
                    }
                    if total.iter().any(|v| !v.is_zero()) {
                        return Err(LieError::JacobiFails { i, j, k });
                    }
                }
            }
        }
        Ok(alg)
    }

    pub fn abelian(dim: usize) -> Self {
        LieAlgebra {
            dim,
            bracket: vec![vec![vec![Scalar::zero(); dim]; dim]; dim],
        }
    }

    /// `sl2` over the rationals in the basis `(e, f, h)`:
    /// `[e,f] = h`, `[h,e] = 2e`, `[h,f] = -2f`.
    pub fn sl2() -> Self {
        let mut b = vec![vec![vec![Scalar::zero(); 3]; 3]; 3];
        let one = crate::scalar::int(1);
        let two = crate::scalar::int(2);
        // indices: e = 0, f = 1, h = 2
        b[0][1][2] = one.clone();
        b[1][0][2] = -one.clone();
        b[2][0][0] = two.clone();
        b[0][2][0] = -two.clone();
        b[2][1][1] = -two.clone();
        b[1][2][1] = two;
        LieAlgebra::new(3, b).expect("sl2 satisfies the axioms")
    }

    /// The 3-dimensional Heisenberg algebra: `[e1, e2] = e3`.
    pub fn heisenberg() -> Self {
        let mut b = vec![vec![vec![Scalar::zero(); 3]; 3]; 3];
        let one = crate::scalar::int(1);
        b[0][1][2] = one.clone();
        b[1][0][2] = -one;
        LieAlgebra::new(3, b).expect("heisenberg satisfies the axioms")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn bracket_coeffs(&self, i: usize, j: usize) -> &[Scalar] {
        &self.bracket[i][j]
    }
}

/// Finite-dimensional module over a Lie algebra: one action matrix per basis
/// element, with `rho([e_i, e_j]) = rho(e_i) rho(e_j) - rho(e_j) rho(e_i)`
/// verified on construction.
#[derive(Debug, Clone)]
pub struct LieModule {
    dim: usize,
    actions: Vec<SparseMat>,
}

impl LieModule {
    pub fn new(g: &LieAlgebra, dim: usize, actions: Vec<SparseMat>) -> Result<Self, LieError> {
        if actions.len() != g.dim() {
            return Err(LieError::Shape(format!(
                "expected {} action matrices",
                g.dim()
            )));
        }
        for m in &actions {
            if m.nrows() != dim || m.ncols() != dim {
                return Err(LieError::Shape(format!(
                    "action matrices must be {dim}x{dim}"
                )));
            }
        }
        for i in 0..g.dim() {
            for j in 0..g.dim() {
                let mut lhs = SparseMat::zero(dim, dim);
                for (k, coeff) in g.bracket_coeffs(i, j).iter().enumerate() {
                    if !coeff.is_zero() {
                        lhs = lhs.add(&actions[k].scale(coeff));
                    }
                }
                let rhs = actions[i].mul(&actions[j]).sub(&actions[j].mul(&actions[i]));
                if !lhs.sub(&rhs).is_zero() {
                    return Err(LieError::NotAModule { i, j });
                }
            }
        }
        Ok(LieModule { dim, actions })
    }

    /// The trivial one-dimensional module.
    pub fn trivial(g: &LieAlgebra) -> Self {
        LieModule {
            dim: 1,
            actions: vec![SparseMat::zero(1, 1); g.dim()],
        }
    }

    /// The adjoint module: `rho(e_i) = [e_i, -]`.
    pub fn adjoint(g: &LieAlgebra) -> Self {
        let n = g.dim();
        let actions = (0..n)
            .map(|i| {
                let mut triplets = Vec::new();
                for j in 0..n {
                    for (k, coeff) in g.bracket_coeffs(i, j).iter().enumerate() {
                        if !coeff.is_zero() {
                            triplets.push((k, j, coeff.clone()));
                        }
                    }
                }
                SparseMat::from_triplets(n, n, triplets)
            })
            .collect();
        LieModule { dim: n, actions }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn action(&self, i: usize) -> &SparseMat {
        &self.actions[i]
    }
}

/// Strictly increasing `k`-tuples over `0..n`.
fn tuples(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
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
    rec(n, k, 0, &mut cur, &mut out);
    out
}

/// Sorts `value` into the ascending tuple `rest`; returns the transposition
/// parity and the sorted tuple, or `None` when the index repeats (a skew
/// cochain vanishes there).
fn insert_sorted(value: usize, rest: &[usize]) -> Option<(bool, Vec<usize>)> {
    if rest.contains(&value) {
        return None;
    }
    let pos = rest.partition_point(|&x| x < value);
    let mut tuple = Vec::with_capacity(rest.len() + 1);
    tuple.extend_from_slice(&rest[..pos]);
    tuple.push(value);
    tuple.extend_from_slice(&rest[pos..]);
    Some((pos % 2 == 1, tuple))
}

/// Matrix of the Chevalley-Eilenberg coboundary
/// `delta_k : C^k(g; M) -> C^{k+1}(g; M)` on the increasing-tuple basis.
pub fn ce_delta(g: &LieAlgebra, module: &LieModule, k: usize) -> SparseMat {
    let n = g.dim();
    let d = module.dim();
    let src = tuples(n, k);
    let dst = tuples(n, k + 1);
    let src_index: BTreeMap<&[usize], usize> =
        src.iter().enumerate().map(|(i, t)| (t.as_slice(), i)).collect();
    let rows = dst.len() * d;
    let cols = src.len() * d;
    let mut triplets: Vec<(usize, usize, Scalar)> = Vec::new();
    for (r_tuple, tuple) in dst.iter().enumerate() {
        // derivative terms: (-1)^q rho(e_{j_q}) c(tuple minus q)
        for q in 0..tuple.len() {
            let mut rest = tuple.clone();
            let jq = rest.remove(q);
            let col_tuple = src_index[rest.as_slice()];
            let action = module.action(jq);
            for (mr, row) in action.rows().iter().enumerate() {
                for (mc, v) in row {
                    let mut coeff = v.clone();
                    if q % 2 == 1 {
                        coeff = -coeff;
                    }
                    triplets.push((r_tuple * d + mr, col_tuple * d + mc, coeff));
                }
            }
        }
        // bracket terms: (-1)^{q+r} c([e_{j_q}, e_{j_r}] ^ rest)
        for q in 0..tuple.len() {
            for r in (q + 1)..tuple.len() {
                let mut rest = tuple.clone();
                rest.remove(r);
                rest.remove(q);
                for (m, coeff) in g.bracket_coeffs(tuple[q], tuple[r]).iter().enumerate() {
                    if coeff.is_zero() {
                        continue;
                    }
                    let Some((parity, sorted)) = insert_sorted(m, &rest) else {
                        continue;
                    };
                    let col_tuple = src_index[sorted.as_slice()];
                    let mut c = coeff.clone();
                    if ((q + r) % 2 == 1) ^ parity {
                        c = -c;
                    }
                    for t in 0..d {
                        triplets.push((r_tuple * d + t, col_tuple * d + t, c.clone()));
                    }
                }
            }
        }
    }
    SparseMat::from_triplets(rows, cols, triplets)
}

/// Assembles the full Chevalley-Eilenberg complex `0 -> M -> C^1 -> ... ->
/// C^n`; `delta delta = 0` doubles as a check of the Jacobi identity and the
/// module axioms.
pub fn ce_complex(g: &LieAlgebra, module: &LieModule) -> Result<CochainComplex, LieError> {
    let n = g.dim();
    let d = module.dim();
    let dims: Vec<usize> = (0..=n).map(|k| tuples(n, k).len() * d).collect();
    let deltas: Vec<SparseMat> = (0..n).map(|k| ce_delta(g, module, k)).collect();
    Ok(CochainComplex::new(dims, deltas)?)
}

/// Exact Chevalley-Eilenberg cohomology dimensions.
pub fn lie_betti(g: &LieAlgebra, module: &LieModule) -> Result<BettiTable, LieError> {
    Ok(ce_complex(g, module)?.betti())
}
