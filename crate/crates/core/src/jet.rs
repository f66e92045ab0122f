//! First-order jets of the model ring, the canonical splitting, factorization
//! of first-order operators through the jet module, and connections with
//! curvature on free modules.
//!
//! Jets are computed per total-weight block of the untruncated ring: the
//! defining relations are weight-homogeneous, so each block is an exact
//! finite-dimensional quotient of the tensor square and there are no
//! truncation edge effects. In the graded case the tensor square carries the
//! Koszul twist `delta_b(a (x) p) = (ba) (x) p - (-1)^{[b][a]} a (x) (bp)`.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::derivation::GradedDerivation;
use crate::diffop::{LinearOperator, OperatorError};
use crate::form::Form;
use crate::linalg::RowSpan;
use crate::ring::{koszul_sign, Element, KoszulProduct, Monomial, RingError, RingSpec};
use crate::scalar::{int, Scalar};

/// Sparse vector in the tensor-square block basis.
type PairVec = Vec<(usize, Scalar)>;

/// Square matrix of ring elements (connection coefficients, curvature).
pub type ElementMatrix = Vec<Vec<Element>>;

/// The weight-`w` block of the first-order jet module `J^1 = (A (x) A) / m^2`.
#[derive(Debug, Clone)]
pub struct JetModule {
    ring: RingSpec,
    weight: u32,
    pair_basis: Vec<(Monomial, Monomial)>,
    pair_index: BTreeMap<(Monomial, Monomial), usize>,
    relations: RowSpan,
}

impl JetModule {
    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn ring(&self) -> &RingSpec {
        &self.ring
    }

    /// Dimension of the tensor-square block before the quotient.
    pub fn pair_dim(&self) -> usize {
        self.pair_basis.len()
    }

    pub fn pair_basis(&self) -> &[(Monomial, Monomial)] {
        &self.pair_basis
    }

    /// Dimension of the jet block.
    pub fn dim(&self) -> usize {
        self.pair_basis.len() - self.relations.rank()
    }

    /// Dimension predicted by the canonical splitting
    /// `J^1 = i_1(A) + O^1`: `dim A_w + sum_gen dim A_{w - weight(gen)}`.
    pub fn expected_dim(&self) -> usize {
        let mut d = self.ring.monomials_of_weight(self.weight).len();
        for i in 0..self.ring.n_even() {
            let gw = self.ring.even_weight(i);
            if gw <= self.weight {
                d += self.ring.monomials_of_weight(self.weight - gw).len();
            }
        }
        for a in 0..self.ring.n_odd() {
            let gw = self.ring.odd_weight(a);
            if gw <= self.weight {
                d += self.ring.monomials_of_weight(self.weight - gw).len();
            }
        }
        d
    }

    /// Canonical representative of the class of a tensor-square vector.
    pub fn reduce(&self, v: &PairVec) -> PairVec {
        self.relations.reduce(v)
    }

    fn pair(&self, m1: &Monomial, m2: &Monomial) -> Option<usize> {
        self.pair_index.get(&(m1.clone(), m2.clone())).copied()
    }

    /// The tensor `e1 (x) e2` expanded in the block basis. Terms of the wrong
    /// weight are rejected.
    pub fn tensor(&self, e1: &Element, e2: &Element) -> Result<PairVec, RingError> {
        let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
        for (m1, c1) in e1.terms() {
            for (m2, c2) in e2.terms() {
                let Some(k) = self.pair(m1, m2) else {
                    return Err(RingError::InvalidSpec(format!(
                        "tensor term has weight {} != block weight {}",
                        m1.weight(&self.ring) + m2.weight(&self.ring),
                        self.weight
                    )));
                };
                let slot = acc.entry(k).or_insert_with(Scalar::zero);
                *slot += c1 * c2;
            }
        }
        Ok(acc.into_iter().filter(|(_, v)| !v.is_zero()).collect())
    }

    /// Class of `i_1(e) = e (x) 1`.
    pub fn i1(&self, e: &Element) -> Result<PairVec, RingError> {
        Ok(self.reduce(&self.tensor(e, &Element::one(&self.ring))?))
    }

    /// Class of `d^1(e) = 1 (x) e - e (x) 1`.
    pub fn d1(&self, e: &Element) -> Result<PairVec, RingError> {
        let one = Element::one(&self.ring);
        let a = self.tensor(&one, e)?;
        let b = self.tensor(e, &one)?;
        let mut acc: BTreeMap<usize, Scalar> = a.into_iter().collect();
        for (k, v) in b {
            let slot = acc.entry(k).or_insert_with(Scalar::zero);
            *slot -= v;
        }
        let vec: PairVec = acc.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        Ok(self.reduce(&vec))
    }

    /// Class of `a * d^1(g) = a (x) g - (a g) (x) 1`, formed inside this
    /// block (so `weight(a) + weight(g)` must equal the block weight).
    pub fn mul_d1(&self, a: &Element, g: &Element) -> Result<PairVec, RingError> {
        let one = Element::one(&self.ring);
        let first = self.tensor(&a.gmul(&one)?, g)?; // a (x) g
        let second = self.tensor(&a.gmul(g)?, &one)?; // (a g) (x) 1
        let mut acc: BTreeMap<usize, Scalar> = first.into_iter().collect();
        for (k, v) in second {
            let slot = acc.entry(k).or_insert_with(Scalar::zero);
            *slot -= v;
        }
        let vec: PairVec = acc.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        Ok(self.reduce(&vec))
    }
}

/// Builds the weight-`w` block of the first-order jet module. The relation
/// span is generated by all `delta_{b0} delta_{b1} (a (x) p)` over monomial
/// quadruples of total weight `w`, with the graded twist on the deltas.
pub fn build_jet1(ring: &RingSpec, w: u32) -> JetModule {
    let work = ring.with_trunc(ring.trunc().max(w));
    let mut pair_basis = Vec::new();
    for w1 in 0..=w {
        for m1 in work.monomials_of_weight(w1) {
            for m2 in work.monomials_of_weight(w - w1) {
                pair_basis.push((m1.clone(), m2));
            }
        }
    }
    pair_basis.sort();
    let pair_index: BTreeMap<(Monomial, Monomial), usize> = pair_basis
        .iter()
        .enumerate()
        .map(|(k, p)| (p.clone(), k))
        .collect();

    // sparse delta on (monomial, monomial, sign) triples:
    // delta_b(x (x) y) = (b x) (x) y - (-1)^{[b][x]} x (x) (b y)
    let delta = |b: &Monomial, terms: &[(Monomial, Monomial, Scalar)]| {
        let mut out: Vec<(Monomial, Monomial, Scalar)> = Vec::new();
        for (m1, m2, coeff) in terms {
            match koszul_sign(b, m1) {
                KoszulProduct::Zero => {}
                KoszulProduct::Term { sign, monomial } => {
                    out.push((monomial, m2.clone(), if sign { -coeff } else { coeff.clone() }));
                }
            }
            match koszul_sign(b, m2) {
                KoszulProduct::Zero => {}
                KoszulProduct::Term { sign, monomial } => {
                    let twist = b.parity() && m1.parity();
                    let mut c = -coeff.clone();
                    if sign ^ twist {
                        c = -c;
                    }
                    out.push((m1.clone(), monomial, c));
                }
            }
        }
        out
    };

    let mut relations = RowSpan::new(pair_basis.len());
    // quadruple weights: wb0 + wb1 + wa + wp = w with wb0, wb1 >= 1
    for wb0 in 1..=w {
        for b0 in work.monomials_of_weight(wb0) {
            for wb1 in 1..=(w - wb0) {
                for b1 in work.monomials_of_weight(wb1) {
                    let rest = w - wb0 - wb1;
                    for wa in 0..=rest {
                        for a in work.monomials_of_weight(wa) {
                            for p in work.monomials_of_weight(rest - wa) {
                                let seed = vec![(a.clone(), p.clone(), int(1))];
                                let after = delta(&b0, &delta(&b1, &seed));
                                let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
                                for (m1, m2, c) in after {
                                    let k = pair_index[&(m1, m2)];
                                    let slot = acc.entry(k).or_insert_with(Scalar::zero);
                                    *slot += c;
                                }
                                let row: PairVec = acc
                                    .into_iter()
                                    .filter(|(_, v)| !v.is_zero())
                                    .collect();
                                relations.insert(&row);
                            }
                        }
                    }
                }
            }
        }
    }

    JetModule {
        ring: work,
        weight: w,
        pair_basis,
        pair_index,
        relations,
    }
}

/// Verifies the canonical splitting `J^1 = i_1(A) + O^1` on the block:
/// the `i_1` classes and the `a d^1(gen)` classes have the expected ranks and
/// span the quotient with trivial intersection. Returns
/// `(dim i_1 part, dim O^1 part, dim block)`.
pub fn splitting_ranks(jet: &JetModule) -> Result<(usize, usize, usize), RingError> {
    let ring = jet.ring().clone();
    let w = jet.weight();
    let mut i1_span = RowSpan::new(jet.pair_dim());
    for m in ring.monomials_of_weight(w) {
        let e = Element::from_monomial(&ring, m, int(1));
        i1_span.insert(&jet.i1(&e)?);
    }
    let mut o1_span = RowSpan::new(jet.pair_dim());
    let mut gens: Vec<Element> = Vec::new();
    for i in 0..ring.n_even() {
        gens.push(Element::even_gen(&ring, i)?);
    }
    for a in 0..ring.n_odd() {
        gens.push(Element::odd_gen(&ring, a)?);
    }
    let mut joint = RowSpan::new(jet.pair_dim());
    for m in ring.monomials_of_weight(w) {
        let e = Element::from_monomial(&ring, m, int(1));
        joint.insert(&jet.i1(&e)?);
    }
    for g in &gens {
        let gw = g.n_degree().expect("generators are homogeneous");
        if gw > w {
            continue;
        }
        for m in ring.monomials_of_weight(w - gw) {
            let a = Element::from_monomial(&ring, m, int(1));
            let cls = jet.mul_d1(&a, g)?;
            o1_span.insert(&cls);
            joint.insert(&cls);
        }
    }
    Ok((i1_span.rank(), o1_span.rank(), joint.rank()))
}

/// The A-linear factorization of a first-order operator through the jet
/// block: `f(m1 (x) m2) = m1 * Delta(m2)`, with
/// `f o J^1 = Delta` on the block weight.
#[derive(Debug)]
pub struct JetFactorization {
    values: Vec<Element>,
}

impl JetFactorization {
    /// Applies the factor map to a tensor-square vector.
    pub fn apply(&self, jet: &JetModule, v: &PairVec) -> Element {
        let mut out = Element::zero(jet.ring());
        for (k, c) in v {
            out = out.add(&self.values[*k].scale(c));
        }
        out
    }
}

/// Factors a first-order operator through the jet block: checks the order
/// bound, builds `f`, and verifies that `f` kills every relation (so it is
/// well defined on the quotient).
pub fn factor_through_jet(
    jet: &JetModule,
    op: &LinearOperator,
) -> Result<JetFactorization, OperatorError> {
    op.order_of(1, true)?;
    let ring = jet.ring().clone();
    let mut values = Vec::with_capacity(jet.pair_dim());
    for (m1, m2) in jet.pair_basis() {
        let e2 = Element::from_monomial(&ring, m2.clone(), int(1));
        // the operator may live on a ring with a different truncation bound;
        // map through terms
        let image = apply_across_trunc(op, &e2)?;
        let e1 = Element::from_monomial(&ring, m1.clone(), int(1));
        let prod = e1.gmul(&image)?;
        if prod.truncated() {
            return Err(OperatorError::Ring(RingError::InvalidSpec(
                "truncation bound too small to factor at this weight".into(),
            )));
        }
        values.push(prod);
    }
    let f = JetFactorization { values };
    for row in jet.relations.basis_rows() {
        if !f.apply(jet, &row).is_zero() {
            return Err(OperatorError::ContractViolation { bound: 1 });
        }
    }
    Ok(f)
}

fn apply_across_trunc(op: &LinearOperator, e: &Element) -> Result<Element, OperatorError> {
    let op_ring = op.algebra().ring().clone();
    let moved = Element::from_terms(
        &op_ring,
        e.terms().map(|(m, c)| {
            (
                Monomial::new(&op_ring, m.even_exp().to_vec(), m.odd_set().to_vec())
                    .expect("same generator counts"),
                c.clone(),
            )
        }),
    );
    if moved.truncated() || moved.num_terms() != e.num_terms() {
        return Err(OperatorError::Ring(RingError::InvalidSpec(
            "operator truncation bound cannot hold this weight block".into(),
        )));
    }
    let image = op.apply(&moved)?;
    if image.truncated() {
        return Err(OperatorError::Ring(RingError::InvalidSpec(
            "operator output truncated inside the jet block".into(),
        )));
    }
    let back_ring = e.ring();
    Ok(Element::from_terms(
        back_ring,
        image.terms().map(|(m, c)| {
            (
                Monomial::new(back_ring, m.even_exp().to_vec(), m.odd_set().to_vec())
                    .expect("same generator counts"),
                c.clone(),
            )
        }),
    ))
}

/// Pairing of a derivation with a one-form presentation of `O^1`
/// (`f_u(d^1 a) = u(a)` extended A-linearly): with the identification of the
/// jet summand `O^1` with one-forms, this is the graded interior product.
pub fn duality_pairing(u: &GradedDerivation, omega: &Form) -> Result<Element, RingError> {
    let paired = omega.interior(u)?;
    paired.as_element().ok_or_else(|| {
        RingError::InvalidSpec("duality pairing expects a one-form".into())
    })
}

/// Connection on the free module `A^r`, stored as one `r x r` coefficient
/// matrix per basis derivation; `nabla_u = u (componentwise) + omega(u)` with
/// `omega(u) = sum_i u^i omega_{x_i} + sum_a u^a omega_{c_a}`.
#[derive(Debug, Clone)]
pub struct Connection {
    ring: RingSpec,
    rank: usize,
    omega_even: Vec<ElementMatrix>,
    omega_odd: Vec<ElementMatrix>,
}

impl Connection {
    pub fn new(
        ring: &RingSpec,
        rank: usize,
        omega_even: Vec<ElementMatrix>,
        omega_odd: Vec<ElementMatrix>,
    ) -> Result<Self, RingError> {
        if omega_even.len() != ring.n_even() || omega_odd.len() != ring.n_odd() {
            return Err(RingError::InvalidSpec(
                "one coefficient matrix per basis derivation is required".into(),
            ));
        }
        for m in omega_even.iter().chain(&omega_odd) {
            if m.len() != rank || m.iter().any(|row| row.len() != rank) {
                return Err(RingError::InvalidSpec(format!(
                    "coefficient matrices must be {rank} x {rank}"
                )));
            }
            for row in m {
                for e in row {
                    ring.check_same(e.ring())?;
                }
            }
        }
        Ok(Connection {
            ring: ring.clone(),
            rank,
            omega_even,
            omega_odd,
        })
    }

    /// The flat connection: all coefficient matrices zero.
    pub fn flat(ring: &RingSpec, rank: usize) -> Self {
        let zero_mat =
            vec![vec![Element::zero(ring); rank]; rank];
        Connection {
            ring: ring.clone(),
            rank,
            omega_even: vec![zero_mat.clone(); ring.n_even()],
            omega_odd: vec![zero_mat; ring.n_odd()],
        }
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn ring(&self) -> &RingSpec {
        &self.ring
    }

    /// The coefficient matrix `omega(u)` for an arbitrary derivation, by
    /// A-linearity of `u -> nabla_u`.
    pub fn omega(&self, u: &GradedDerivation) -> Result<ElementMatrix, RingError> {
        let mut out = vec![vec![Element::zero(&self.ring); self.rank]; self.rank];
        for (i, m) in self.omega_even.iter().enumerate() {
            let coeff = u.even_coeff(i);
            if coeff.is_zero() {
                continue;
            }
            for (r, row) in m.iter().enumerate() {
                for (c, e) in row.iter().enumerate() {
                    out[r][c] = out[r][c].add(&coeff.gmul(e)?);
                }
            }
        }
        for (a, m) in self.omega_odd.iter().enumerate() {
            let coeff = u.odd_coeff(a);
            if coeff.is_zero() {
                continue;
            }
            for (r, row) in m.iter().enumerate() {
                for (c, e) in row.iter().enumerate() {
                    out[r][c] = out[r][c].add(&coeff.gmul(e)?);
                }
            }
        }
        Ok(out)
    }

    /// Applies `nabla_u` to a vector of elements.
    pub fn apply(
        &self,
        u: &GradedDerivation,
        p: &[Element],
    ) -> Result<Vec<Element>, RingError> {
        if p.len() != self.rank {
            return Err(RingError::InvalidSpec("vector length != rank".into()));
        }
        let om = self.omega(u)?;
        let mut out = Vec::with_capacity(self.rank);
        for i in 0..self.rank {
            let mut v = u.apply(&p[i])?;
            for j in 0..self.rank {
                v = v.add(&om[i][j].gmul(&p[j])?);
            }
            out.push(v);
        }
        Ok(out)
    }

    /// Leibniz probe: `nabla_u(a p) = u(a) p + (-1)^{[a][u]} a nabla_u(p)`
    /// checked for the given homogeneous data.
    pub fn check_leibniz(
        &self,
        u: &GradedDerivation,
        a: &Element,
        p: &[Element],
    ) -> Result<bool, RingError> {
        let pu = u.z2_degree().ok_or_else(|| {
            RingError::InvalidSpec("Leibniz probe needs a homogeneous derivation".into())
        })?;
        let pa = a.z2_degree().ok_or_else(|| {
            RingError::InvalidSpec("Leibniz probe needs a homogeneous multiplier".into())
        })?;
        let ap: Vec<Element> = p
            .iter()
            .map(|e| a.gmul(e))
            .collect::<Result<_, _>>()?;
        let lhs = self.apply(u, &ap)?;
        let ua = u.apply(a)?;
        let napla = self.apply(u, p)?;
        let mut ok = true;
        for i in 0..self.rank {
            let mut rhs = ua.gmul(&p[i])?;
            let second = a.gmul(&napla[i])?;
            rhs = rhs.add(&if pa && pu { second.neg() } else { second });
            ok &= rhs == lhs[i];
        }
        Ok(ok)
    }

    /// Curvature `R(u, v) = [nabla_u, nabla_v] - nabla_{[u,v]}` as an
    /// operator matrix built from diffop atoms, for homogeneous `u`, `v`.
    /// The result is a module operator whose entries can be order-checked.
    pub fn curvature(
        &self,
        alg: &crate::diffop::OpAlgebra,
        u: &GradedDerivation,
        v: &GradedDerivation,
    ) -> Result<ModuleOperator, OperatorError> {
        let pu = u.z2_degree().ok_or_else(|| {
            RingError::InvalidSpec("curvature needs homogeneous derivations".into())
        })?;
        let pv = v.z2_degree().ok_or_else(|| {
            RingError::InvalidSpec("curvature needs homogeneous derivations".into())
        })?;
        let nu = self.nabla_operator(alg, u)?;
        let nv = self.nabla_operator(alg, v)?;
        let uv = nu.compose(&nv);
        let vu = nv.compose(&nu);
        let bracket = self.nabla_operator(alg, &u.superbracket(v)?)?;
        let commutator = if pu && pv { uv.add(&vu) } else { uv.sub(&vu) };
        Ok(commutator.sub(&bracket))
    }

    /// `nabla_u` as an `r x r` matrix of linear operators on the ring.
    pub fn nabla_operator(
        &self,
        alg: &crate::diffop::OpAlgebra,
        u: &GradedDerivation,
    ) -> Result<ModuleOperator, OperatorError> {
        let om = self.omega(u)?;
        let du = alg.derivation(u)?;
        let mut entries = Vec::with_capacity(self.rank);
        for i in 0..self.rank {
            let mut row = Vec::with_capacity(self.rank);
            for j in 0..self.rank {
                let mut op = alg.left_mul(&om[i][j])?;
                if i == j {
                    op = op.add(&du);
                }
                row.push(op);
            }
            entries.push(row);
        }
        Ok(ModuleOperator {
            rank: self.rank,
            entries,
        })
    }
}

/// An `r x r` matrix of linear operators acting on `A^r`.
#[derive(Debug, Clone)]
pub struct ModuleOperator {
    rank: usize,
    entries: Vec<Vec<LinearOperator>>,
}

impl ModuleOperator {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn entry(&self, i: usize, j: usize) -> &LinearOperator {
        &self.entries[i][j]
    }

    pub fn compose(&self, other: &ModuleOperator) -> ModuleOperator {
        assert_eq!(self.rank, other.rank);
        let entries = (0..self.rank)
            .map(|i| {
                (0..self.rank)
                    .map(|j| {
                        let mut acc: Option<LinearOperator> = None;
                        for k in 0..self.rank {
                            let term = self.entries[i][k].compose(&other.entries[k][j]);
                            acc = Some(match acc {
                                None => term,
                                Some(prev) => prev.add(&term),
                            });
                        }
                        acc.expect("rank >= 1")
                    })
                    .collect()
            })
            .collect();
        ModuleOperator {
            rank: self.rank,
            entries,
        }
    }

    pub fn add(&self, other: &ModuleOperator) -> ModuleOperator {
        assert_eq!(self.rank, other.rank);
        let entries = (0..self.rank)
            .map(|i| {
                (0..self.rank)
                    .map(|j| self.entries[i][j].add(&other.entries[i][j]))
                    .collect()
            })
            .collect();
        ModuleOperator {
            rank: self.rank,
            entries,
        }
    }

    pub fn sub(&self, other: &ModuleOperator) -> ModuleOperator {
        assert_eq!(self.rank, other.rank);
        let entries = (0..self.rank)
            .map(|i| {
                (0..self.rank)
                    .map(|j| self.entries[i][j].sub(&other.entries[i][j]))
                    .collect()
            })
            .collect();
        ModuleOperator {
            rank: self.rank,
            entries,
        }
    }

    pub fn apply(&self, p: &[Element]) -> Result<Vec<Element>, RingError> {
        assert_eq!(p.len(), self.rank);
        let mut out = Vec::with_capacity(self.rank);
        for i in 0..self.rank {
            let mut acc: Option<Element> = None;
            for j in 0..self.rank {
                let term = self.entries[i][j].apply(&p[j])?;
                acc = Some(match acc {
                    None => term,
                    Some(prev) => prev.add(&term),
                });
            }
            out.push(acc.expect("rank >= 1"));
        }
        Ok(out)
    }

    /// Largest graded order over all entries; zero-order means A-linear.
    pub fn order_of(&self, s_max: u32, graded: bool) -> Result<u32, OperatorError> {
        let mut order = 0;
        for row in &self.entries {
            for op in row {
                order = order.max(op.order_of(s_max, graded)?);
            }
        }
        Ok(order)
    }

    /// When every entry is a multiplication operator, the matrix of
    /// multiplier elements (entry applied to 1).
    pub fn as_element_matrix(&self) -> Result<ElementMatrix, OperatorError> {
        self.order_of(0, true)?;
        let mut out = Vec::with_capacity(self.rank);
        for row in &self.entries {
            let mut r = Vec::with_capacity(self.rank);
            for op in row {
                let one = Element::one(op.algebra().ring());
                r.push(op.apply(&one)?);
            }
            out.push(r);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffop::OpAlgebra;

    #[test]
    fn jet_block_dims_commutative() {
        // n=1, even weight 1: w=0 block is the constants
        let ring = RingSpec::with_uniform_weights(1, 0, 1, 1, 8).unwrap();
        let jet = build_jet1(&ring, 0);
        assert_eq!(jet.dim(), 1);
        assert_eq!(jet.expected_dim(), 1);

        // w=3: {x^3, x^2 dx}
        let jet3 = build_jet1(&ring, 3);
        assert_eq!(jet3.dim(), 2);
        assert_eq!(jet3.expected_dim(), 2);

        // n=2, w=1: A_1 of rank 2 plus O^1 of rank 2
        let ring2 = RingSpec::with_uniform_weights(2, 0, 1, 1, 8).unwrap();
        let jet21 = build_jet1(&ring2, 1);
        assert_eq!(jet21.dim(), 4);
        assert_eq!(jet21.expected_dim(), 4);
    }

    #[test]
    fn jet_block_dims_graded() {
        // pure Grassmann factor: w=2 block of Lambda(c1, c2)
        let ring = RingSpec::new(0, 2, 4);
        let jet = build_jet1(&ring, 2);
        assert_eq!(jet.expected_dim(), 5);
        assert_eq!(jet.dim(), 5);
        // mixed ring
        let ring2 = RingSpec::with_uniform_weights(1, 1, 1, 1, 8).unwrap();
        for w in 0..=4 {
            let j = build_jet1(&ring2, w);
            assert_eq!(j.dim(), j.expected_dim(), "weight {w}");
        }
    }

    #[test]
    fn bare_relation_rows_are_not_enough() {
        // the K-span of the raw rows ab(x)1 - b(x)a - a(x)b + 1(x)ab alone is
        // strictly smaller than the module-generated relation span: on Q[x]
        // at weight 3 it leaves a quotient of dimension 3, not 2
        let ring = RingSpec::with_uniform_weights(1, 0, 1, 1, 8).unwrap();
        let jet = build_jet1(&ring, 3);
        assert_eq!(jet.dim(), 2);
        let mut bare = RowSpan::new(jet.pair_dim());
        for wa in 1..3u32 {
            for a in ring.monomials_of_weight(wa) {
                for b in ring.monomials_of_weight(3 - wa) {
                    let ea = Element::from_monomial(&ring, a.clone(), int(1));
                    let eb = Element::from_monomial(&ring, b, int(1));
                    let ab = ea.gmul(&eb).unwrap();
                    let one = Element::one(&ring);
                    let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
                    let mut push = |v: PairVec, negate: bool| {
                        for (k, val) in v {
                            let slot = acc.entry(k).or_insert_with(Scalar::zero);
                            if negate {
                                *slot -= val;
                            } else {
                                *slot += val;
                            }
                        }
                    };
                    push(jet.tensor(&ab, &one).unwrap(), false);
                    push(jet.tensor(&eb, &ea).unwrap(), true);
                    push(jet.tensor(&ea, &eb).unwrap(), true);
                    push(jet.tensor(&one, &ab).unwrap(), false);
                    let row: PairVec =
                        acc.into_iter().filter(|(_, v)| !v.is_zero()).collect();
                    bare.insert(&row);
                }
            }
        }
        assert_eq!(jet.pair_dim() - bare.rank(), 3);
        assert!(bare.rank() < jet.pair_dim() - jet.dim());
    }

    #[test]
    fn splitting_is_direct() {
        for (n, wgt) in [(1usize, 1u32), (2, 1), (1, 2)] {
            let ring = RingSpec::with_uniform_weights(n, 0, wgt, 1, 8).unwrap();
            for w in 0..=4 {
                let jet = build_jet1(&ring, w);
                let (i1_rank, o1_rank, joint) = splitting_ranks(&jet).unwrap();
                assert_eq!(
                    i1_rank + o1_rank,
                    joint,
                    "splitting overlaps at n={n}, weight {w}"
                );
                assert_eq!(joint, jet.dim(), "splitting misses the block");
            }
        }
    }

    #[test]
    fn d1_satisfies_leibniz_in_quotient() {
        let ring = RingSpec::with_uniform_weights(1, 1, 1, 1, 8).unwrap();
        let x = Element::even_gen(&ring, 0).unwrap();
        let c = Element::odd_gen(&ring, 0).unwrap();
        for (a, b) in [(x.clone(), x.clone()), (x.clone(), c.clone()), (c.clone(), c.clone())] {
            let wa = a.n_degree().unwrap();
            let wb = b.n_degree().unwrap();
            let jet = build_jet1(&ring, wa + wb);
            let ab = a.gmul(&b).unwrap();
            let lhs = jet.d1(&ab).unwrap();
            // d1(ab) = a d1(b) + (-1)^{[a][b]} b d1(a)
            let t1 = jet.mul_d1(&a, &b).unwrap();
            let t2 = jet.mul_d1(&b, &a).unwrap();
            let sign = a.z2_degree().unwrap() && b.z2_degree().unwrap();
            let mut acc: BTreeMap<usize, Scalar> = t1.into_iter().collect();
            for (k, v) in t2 {
                let slot = acc.entry(k).or_insert_with(Scalar::zero);
                if sign {
                    *slot -= v;
                } else {
                    *slot += v;
                }
            }
            let rhs: PairVec = acc.into_iter().filter(|(_, v)| !v.is_zero()).collect();
            assert_eq!(jet.reduce(&to_pairvec(&lhs)), jet.reduce(&rhs));
        }
    }

    fn to_pairvec(v: &PairVec) -> PairVec {
        v.clone()
    }

    #[test]
    fn d1_matches_exterior_d_through_the_identification() {
        // map a one-form sum e_g dg to sum e_g d1(g) and compare classes
        let ring = RingSpec::with_uniform_weights(2, 1, 1, 1, 8).unwrap();
        let probes = [
            Element::even_gen(&ring, 0).unwrap(),
            Element::even_gen(&ring, 0)
                .unwrap()
                .gmul(&Element::even_gen(&ring, 1).unwrap())
                .unwrap(),
            Element::even_gen(&ring, 0)
                .unwrap()
                .gmul(&Element::odd_gen(&ring, 0).unwrap())
                .unwrap(),
            Element::odd_gen(&ring, 0).unwrap(),
        ];
        for e in &probes {
            let w = e.n_degree().unwrap();
            let jet = build_jet1(&ring, w);
            let direct = jet.d1(e).unwrap();
            // exterior_d route
            let df = Form::from_element(e).exterior_d();
            let mut acc: BTreeMap<usize, Scalar> = BTreeMap::new();
            for (fm, coeff) in df.terms() {
                let gen: Element = if fm.dx_set().len() == 1 {
                    Element::even_gen(&ring, fm.dx_set()[0] as usize).unwrap()
                } else {
                    Element::odd_gen(&ring, fm.dc_multi()[0] as usize).unwrap()
                };
                for (k, v) in jet.mul_d1(coeff, &gen).unwrap() {
                    let slot = acc.entry(k).or_insert_with(Scalar::zero);
                    *slot += v;
                }
            }
            let via_forms: PairVec =
                acc.into_iter().filter(|(_, v)| !v.is_zero()).collect();
            assert_eq!(direct, jet.reduce(&via_forms), "probe {e}");
        }
    }

    #[test]
    fn duality_pairing_examples() {
        let ring = RingSpec::new(2, 0, 8);
        let d1 = GradedDerivation::even_partial(&ring, 0).unwrap();
        let dx1 = Form::dx(&ring, 0).unwrap();
        let dx2 = Form::dx(&ring, 1).unwrap();
        assert_eq!(
            duality_pairing(&d1, &dx1).unwrap(),
            Element::one(&ring)
        );
        assert!(duality_pairing(&d1, &dx2).unwrap().is_zero());
        let x1 = Element::even_gen(&ring, 0).unwrap();
        let xd1 = d1.left_mul(&x1).unwrap();
        assert_eq!(duality_pairing(&xd1, &dx1).unwrap(), x1);
    }

    #[test]
    fn duality_pairing_nondegenerate_on_basis() {
        let ring = RingSpec::new(2, 2, 8);
        let mut gens: Vec<(GradedDerivation, Form)> = Vec::new();
        for i in 0..2 {
            gens.push((
                GradedDerivation::even_partial(&ring, i).unwrap(),
                Form::dx(&ring, i).unwrap(),
            ));
        }
        for a in 0..2 {
            gens.push((
                GradedDerivation::odd_partial(&ring, a).unwrap(),
                Form::dc(&ring, a).unwrap(),
            ));
        }
        for (i, (u, _)) in gens.iter().enumerate() {
            for (j, (_, omega)) in gens.iter().enumerate() {
                let p = duality_pairing(u, omega).unwrap();
                if i == j {
                    assert_eq!(p, Element::one(&ring));
                } else {
                    assert!(p.is_zero());
                }
            }
        }
    }

    #[test]
    fn factor_through_jet_examples() {
        let ring = RingSpec::with_uniform_weights(2, 0, 1, 1, 8).unwrap();
        let alg = OpAlgebra::new(&ring);
        let x1 = Element::even_gen(&ring, 0).unwrap();
        let d1 = alg
            .derivation(&GradedDerivation::even_partial(&ring, 0).unwrap())
            .unwrap();

        let jet = build_jet1(&ring, 1);
        // Delta = d/dx1: f(d1 x1) = 1, f(i1(a)) = 0
        let f = factor_through_jet(&jet, &d1).unwrap();
        let d1x1 = jet.d1(&x1).unwrap();
        assert_eq!(f.apply(&jet, &d1x1), Element::one(&ring));
        let i1x1 = jet.i1(&x1).unwrap();
        assert!(f.apply(&jet, &i1x1).is_zero());

        // Delta = identity: f is the projection a (x) b -> ab
        let f_id = factor_through_jet(&jet, &alg.identity()).unwrap();
        assert_eq!(f_id.apply(&jet, &jet.i1(&x1).unwrap()), x1);
        assert!(f_id.apply(&jet, &jet.d1(&x1).unwrap()).is_zero());

        // Delta = x1 d/dx1: f(d1 x1) = x1
        let xd1 = d1.compose(&alg.left_mul(&x1).unwrap());
        // compose order: x1 . (d/dx1) is left_mul(x1) o d1
        let op = alg.left_mul(&x1).unwrap().compose(&d1);
        let _ = xd1;
        let f_x = factor_through_jet(&jet, &op).unwrap();
        assert_eq!(f_x.apply(&jet, &jet.d1(&x1).unwrap()), x1);

        // f o J^1 = Delta on the block: J^1(b) = 1 (x) b
        let one = Element::one(&ring);
        for m in ring.monomials_of_weight(1) {
            let b = Element::from_monomial(&ring, m, int(1));
            let j1b = jet.reduce(&jet.tensor(&one, &b).unwrap());
            assert_eq!(f.apply(&jet, &j1b), d1.apply(&b).unwrap());
        }

        // second-order operators do not factor
        assert!(factor_through_jet(&jet, &d1.compose(&d1)).is_err());
    }

    #[test]
    fn curvature_worked_example() {
        // rank 1, n=2: nabla_{d1} = d1 + x2, nabla_{d2} = d2
        // => R(d1, d2) = multiplication by -1
        let ring = RingSpec::new(2, 0, 8);
        let alg = OpAlgebra::new(&ring);
        let x2 = Element::even_gen(&ring, 1).unwrap();
        let conn = Connection::new(
            &ring,
            1,
            vec![vec![vec![x2.clone()]], vec![vec![Element::zero(&ring)]]],
            vec![],
        )
        .unwrap();
        let u = GradedDerivation::even_partial(&ring, 0).unwrap();
        let v = GradedDerivation::even_partial(&ring, 1).unwrap();
        let r = conn.curvature(&alg, &u, &v).unwrap();
        assert_eq!(r.order_of(2, true).unwrap(), 0);
        let m = r.as_element_matrix().unwrap();
        assert_eq!(m[0][0], Element::one(&ring).neg());

        // flat connection: curvature vanishes
        let flat = Connection::flat(&ring, 2);
        let rf = flat.curvature(&alg, &u, &v).unwrap();
        let mf = rf.as_element_matrix().unwrap();
        assert!(mf.iter().all(|row| row.iter().all(Element::is_zero)));

        // u = v kills the curvature for even u
        let ruu = conn.curvature(&alg, &u, &u).unwrap();
        assert!(ruu
            .as_element_matrix()
            .unwrap()
            .iter()
            .all(|row| row.iter().all(Element::is_zero)));
    }

    #[test]
    fn connection_leibniz_probe() {
        // graded Leibniz needs omega(u) of the same parity as u: even
        // coefficients on the even derivations, odd on the odd ones
        let ring = RingSpec::new(2, 1, 8);
        let x1 = Element::even_gen(&ring, 0).unwrap();
        let x2 = Element::even_gen(&ring, 1).unwrap();
        let c1 = Element::odd_gen(&ring, 0).unwrap();
        let conn = Connection::new(
            &ring,
            1,
            vec![vec![vec![x1.clone()]], vec![vec![x2.clone()]]],
            vec![vec![vec![c1.clone()]]],
        )
        .unwrap();
        let us = [
            GradedDerivation::even_partial(&ring, 0).unwrap(),
            GradedDerivation::odd_partial(&ring, 0).unwrap(),
        ];
        let multipliers = [x1.clone(), c1.clone()];
        let vecs = [vec![x1.clone()], vec![c1.clone()], vec![Element::one(&ring)]];
        for u in &us {
            for a in &multipliers {
                for p in &vecs {
                    assert!(conn.check_leibniz(u, a, p).unwrap());
                }
            }
        }
    }
}
