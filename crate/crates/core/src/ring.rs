//! The model ring `A = Q[x1..xn] (x) Lambda(c1..cm)`: canonical sparse
//! elements, graded-commutative multiplication, degree bookkeeping, body and
//! soul maps, and substitution homomorphisms.
//!
//! Signs come from one place only: reordering odd generators into strictly
//! ascending position. Even generators are Z2-even and commute with
//! everything; odd generators anticommute pairwise and square to zero. The
//! N-degree of a generator is its configured weight (default 2 for even
//! generators, 1 for odd ones, so that the Z2-degree is the N-degree mod 2).

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::Zero;
use thiserror::Error;

use crate::scalar::{format_scalar, int, Scalar};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RingError {
    #[error("elements belong to different ring specifications")]
    SpecMismatch,
    #[error("generator index {index} out of range for {kind} generators (count {count})")]
    GeneratorOutOfRange {
        kind: &'static str,
        index: usize,
        count: usize,
    },
    #[error("invalid ring spec: {0}")]
    InvalidSpec(String),
    #[error("invalid substitution: {0}")]
    InvalidSubstitution(String),
}

#[derive(Debug, PartialEq, Eq)]
struct RingSpecData {
    n_even: usize,
    n_odd: usize,
    even_weights: Vec<u32>,
    odd_weights: Vec<u32>,
    trunc: u32,
}

/// Shape of the model ring: generator counts, per-generator N-weights and the
/// truncation bound on total polynomial degree in the even variables.
#[derive(Debug, Clone)]
pub struct RingSpec(Arc<RingSpecData>);

impl PartialEq for RingSpec {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0
    }
}

impl Eq for RingSpec {}

impl RingSpec {
    /// Ring with default weights: even generators in degree 2, odd in degree 1.
    pub fn new(n_even: usize, n_odd: usize, trunc: u32) -> Self {
        Self::with_uniform_weights(n_even, n_odd, 2, 1, trunc)
            .expect("default weights are always valid")
    }

    pub fn with_uniform_weights(
        n_even: usize,
        n_odd: usize,
        even_weight: u32,
        odd_weight: u32,
        trunc: u32,
    ) -> Result<Self, RingError> {
        Self::with_weights(
            vec![even_weight; n_even],
            vec![odd_weight; n_odd],
            trunc,
        )
    }

    pub fn with_weights(
        even_weights: Vec<u32>,
        odd_weights: Vec<u32>,
        trunc: u32,
    ) -> Result<Self, RingError> {
        if even_weights.contains(&0) {
            return Err(RingError::InvalidSpec(
                "even generator weights must be positive".into(),
            ));
        }
        if odd_weights.iter().any(|&w| w % 2 == 0) {
            return Err(RingError::InvalidSpec(
                "odd generator weights must be odd (Z2-degree 1)".into(),
            ));
        }
        Ok(RingSpec(Arc::new(RingSpecData {
            n_even: even_weights.len(),
            n_odd: odd_weights.len(),
            even_weights,
            odd_weights,
            trunc,
        })))
    }

    pub fn n_even(&self) -> usize {
        self.0.n_even
    }

    pub fn n_odd(&self) -> usize {
        self.0.n_odd
    }

    pub fn trunc(&self) -> u32 {
        self.0.trunc
    }

    pub fn even_weight(&self, i: usize) -> u32 {
        self.0.even_weights[i]
    }

    pub fn odd_weight(&self, a: usize) -> u32 {
        self.0.odd_weights[a]
    }

    /// True when every N-weight reduces mod 2 to the generator's Z2-degree,
    /// i.e. the associated Z2 structure is the N-grading mod 2.
    pub fn grading_association_holds(&self) -> bool {
        self.0.even_weights.iter().all(|w| w % 2 == 0)
    }

    /// Same spec with a different truncation bound.
    pub fn with_trunc(&self, trunc: u32) -> RingSpec {
        RingSpec(Arc::new(RingSpecData {
            trunc,
            n_even: self.0.n_even,
            n_odd: self.0.n_odd,
            even_weights: self.0.even_weights.clone(),
            odd_weights: self.0.odd_weights.clone(),
        }))
    }

    pub(crate) fn check_same(&self, other: &RingSpec) -> Result<(), RingError> {
        if self == other {
            Ok(())
        } else {
            Err(RingError::SpecMismatch)
        }
    }

    /// All monomials with total polynomial degree at most `max_even_degree`.
    pub fn monomials_up_to(&self, max_even_degree: u32) -> Vec<Monomial> {
        let mut evens: Vec<Vec<u32>> = Vec::new();
        enumerate_exponents(self.n_even(), max_even_degree, &mut Vec::new(), &mut evens);
        let odds = subsets(self.n_odd());
        let mut out = Vec::with_capacity(evens.len() * odds.len());
        for e in &evens {
            for o in &odds {
                out.push(Monomial {
                    even_exp: e.clone(),
                    odd_set: o.clone(),
                });
            }
        }
        out.sort();
        out
    }

    /// All monomials of exact N-weight `w` (ignores the truncation bound).
    pub fn monomials_of_weight(&self, w: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        let odds = subsets(self.n_odd());
        for o in &odds {
            let ow: u32 = o.iter().map(|&a| self.odd_weight(a as usize)).sum();
            if ow > w {
                continue;
            }
            let mut evens = Vec::new();
            enumerate_weighted(&self.0.even_weights, w - ow, &mut Vec::new(), &mut evens);
            for e in evens {
                out.push(Monomial {
                    even_exp: e,
                    odd_set: o.clone(),
                });
            }
        }
        out.sort();
        out
    }
}

fn enumerate_exponents(n: usize, budget: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if prefix.len() == n {
        out.push(prefix.clone());
        return;
    }
    for e in 0..=budget {
        prefix.push(e);
        enumerate_exponents(n, budget - e, prefix, out);
        prefix.pop();
    }
}

fn enumerate_weighted(weights: &[u32], target: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    if prefix.len() == weights.len() {
        if target == 0 {
            out.push(prefix.clone());
        }
        return;
    }
    let w = weights[prefix.len()];
    let mut e = 0;
    loop {
        let used = w * e;
        if used > target {
            break;
        }
        prefix.push(e);
        enumerate_weighted(weights, target - used, prefix, out);
        prefix.pop();
        e += 1;
    }
}

fn subsets(m: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::with_capacity(1 << m);
    for mask in 0u32..(1 << m) {
        let mut s = Vec::new();
        for a in 0..m {
            if mask & (1 << a) != 0 {
                s.push(a as u8);
            }
        }
        out.push(s);
    }
    out
}

/// Monomial `x^alpha * c_{i1}...c_{ik}` in canonical form: odd indices
/// strictly ascending. Any reordering sign is produced at construction time,
/// never stored.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    even_exp: Vec<u32>,
    odd_set: Vec<u8>,
}

impl Monomial {
    pub fn unit(ring: &RingSpec) -> Self {
        Monomial {
            even_exp: vec![0; ring.n_even()],
            odd_set: Vec::new(),
        }
    }

    pub fn new(ring: &RingSpec, even_exp: Vec<u32>, odd_set: Vec<u8>) -> Result<Self, RingError> {
        if even_exp.len() != ring.n_even() {
            return Err(RingError::InvalidSpec(format!(
                "expected {} even exponents, got {}",
                ring.n_even(),
                even_exp.len()
            )));
        }
        for w in odd_set.windows(2) {
            if w[0] >= w[1] {
                return Err(RingError::InvalidSpec(
                    "odd indices must be strictly ascending".into(),
                ));
            }
        }
        if let Some(&last) = odd_set.last() {
            if last as usize >= ring.n_odd() {
                return Err(RingError::GeneratorOutOfRange {
                    kind: "odd",
                    index: last as usize,
                    count: ring.n_odd(),
                });
            }
        }
        Ok(Monomial { even_exp, odd_set })
    }

    pub fn even_exp(&self) -> &[u32] {
        &self.even_exp
    }

    pub fn odd_set(&self) -> &[u8] {
        &self.odd_set
    }

    /// Total polynomial degree in the even variables.
    pub fn even_degree(&self) -> u32 {
        self.even_exp.iter().sum()
    }

    /// N-degree with the ring's weights.
    pub fn weight(&self, ring: &RingSpec) -> u32 {
        let e: u32 = self
            .even_exp
            .iter()
            .enumerate()
            .map(|(i, &k)| ring.even_weight(i) * k)
            .sum();
        let o: u32 = self
            .odd_set
            .iter()
            .map(|&a| ring.odd_weight(a as usize))
            .sum();
        e + o
    }

    /// Z2-degree: parity of the number of odd factors.
    pub fn parity(&self) -> bool {
        self.odd_set.len() % 2 == 1
    }

    pub fn is_unit(&self) -> bool {
        self.even_exp.iter().all(|&e| e == 0) && self.odd_set.is_empty()
    }
}

/// Result of multiplying two canonical monomials.
pub enum KoszulProduct {
    /// The odd index sets intersect, so the product vanishes.
    Zero,
    /// Merged canonical monomial together with the reordering sign.
    Term { sign: bool, monomial: Monomial },
}

/// Multiplies two monomials: returns the zero flag when an odd index repeats,
/// otherwise the shuffle parity of merging the two ascending odd sequences
/// and the merged canonical monomial. Even exponents add; the truncation
/// bound is not consulted here.
pub fn koszul_sign(m1: &Monomial, m2: &Monomial) -> KoszulProduct {
    let mut inversions = 0usize;
    let mut merged = Vec::with_capacity(m1.odd_set.len() + m2.odd_set.len());
    let (a, b) = (&m1.odd_set, &m2.odd_set);
    let (mut i, mut j) = (0usize, 0usize);
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) if x == y => return KoszulProduct::Zero,
            (Some(&x), Some(&y)) if x < y => {
                merged.push(x);
                i += 1;
            }
            (Some(_), Some(&y)) => {
                // y jumps over the remaining factors of m1
                inversions += a.len() - i;
                merged.push(y);
                j += 1;
            }
            (Some(&x), None) => {
                merged.push(x);
                i += 1;
            }
            (None, Some(&y)) => {
                merged.push(y);
                j += 1;
            }
            (None, None) => unreachable!(),
        }
    }
    let even_exp = m1
        .even_exp
        .iter()
        .zip(&m2.even_exp)
        .map(|(x, y)| x + y)
        .collect();
    KoszulProduct::Term {
        sign: inversions % 2 == 1,
        monomial: Monomial {
            even_exp,
            odd_set: merged,
        },
    }
}

/// Sparse element of the model ring: a canonical monomial-to-scalar map with
/// no stored zeros, plus a flag recording whether any product term was
/// dropped by the even-degree truncation bound.
#[derive(Debug, Clone)]
pub struct Element {
    ring: RingSpec,
    terms: BTreeMap<Monomial, Scalar>,
    truncated: bool,
}

impl PartialEq for Element {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.terms == other.terms
    }
}

impl Eq for Element {}

impl Element {
    pub fn zero(ring: &RingSpec) -> Self {
        Element {
            ring: ring.clone(),
            terms: BTreeMap::new(),
            truncated: false,
        }
    }

    pub fn one(ring: &RingSpec) -> Self {
        Element::scalar(ring, int(1))
    }

    pub fn scalar(ring: &RingSpec, s: Scalar) -> Self {
        let mut terms = BTreeMap::new();
        if !s.is_zero() {
            terms.insert(Monomial::unit(ring), s);
        }
        Element {
            ring: ring.clone(),
            terms,
            truncated: false,
        }
    }

    /// The even generator `x_i` (zero-based index).
    pub fn even_gen(ring: &RingSpec, i: usize) -> Result<Self, RingError> {
        if i >= ring.n_even() {
            return Err(RingError::GeneratorOutOfRange {
                kind: "even",
                index: i,
                count: ring.n_even(),
            });
        }
        let mut exp = vec![0; ring.n_even()];
        exp[i] = 1;
        let m = Monomial {
            even_exp: exp,
            odd_set: Vec::new(),
        };
        Ok(Element::from_monomial(ring, m, int(1)))
    }

    /// The odd generator `c_a` (zero-based index).
    pub fn odd_gen(ring: &RingSpec, a: usize) -> Result<Self, RingError> {
        if a >= ring.n_odd() {
            return Err(RingError::GeneratorOutOfRange {
                kind: "odd",
                index: a,
                count: ring.n_odd(),
            });
        }
        let m = Monomial {
            even_exp: vec![0; ring.n_even()],
            odd_set: vec![a as u8],
        };
        Ok(Element::from_monomial(ring, m, int(1)))
    }

    pub fn from_monomial(ring: &RingSpec, m: Monomial, coeff: Scalar) -> Self {
        let mut terms = BTreeMap::new();
        if !coeff.is_zero() && m.even_degree() <= ring.trunc() {
            terms.insert(m, coeff);
        }
        Element {
            ring: ring.clone(),
            terms,
            truncated: false,
        }
    }

    pub fn from_terms(
        ring: &RingSpec,
        terms: impl IntoIterator<Item = (Monomial, Scalar)>,
    ) -> Self {
        let mut out = Element::zero(ring);
        for (m, c) in terms {
            out.add_term(m, c);
        }
        out
    }

    pub fn ring(&self) -> &RingSpec {
        &self.ring
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// True when some product overflowed the truncation bound while producing
    /// this value.
    pub fn truncated(&self) -> bool {
        self.truncated
    }

    fn add_term(&mut self, m: Monomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        if m.even_degree() > self.ring.trunc() {
            self.truncated = true;
            return;
        }
        let entry = self.terms.entry(m);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Element) -> Element {
        self.ring.check_same(&other.ring).expect("ring mismatch in add");
        let mut out = self.clone();
        out.truncated |= other.truncated;
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Element) -> Element {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Element {
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = -c.clone();
        }
        out
    }

    pub fn scale(&self, s: &Scalar) -> Element {
        if s.is_zero() {
            let mut z = Element::zero(&self.ring);
            z.truncated = self.truncated;
            return z;
        }
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c *= s;
        }
        out
    }

    /// Graded-commutative product. Bilinear extension of [`koszul_sign`];
    /// terms whose even degree overflows the truncation bound are dropped and
    /// the truncation flag is raised on the result.
    pub fn gmul(&self, other: &Element) -> Result<Element, RingError> {
        self.ring.check_same(&other.ring)?;
        let mut out = Element::zero(&self.ring);
        out.truncated = self.truncated || other.truncated;
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                match koszul_sign(m1, m2) {
                    KoszulProduct::Zero => {}
                    KoszulProduct::Term { sign, monomial } => {
                        let mut c = c1 * c2;
                        if sign {
                            c = -c;
                        }
                        out.add_term(monomial, c);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn pow(&self, k: u32) -> Result<Element, RingError> {
        let mut out = Element::one(&self.ring);
        for _ in 0..k {
            out = out.gmul(self)?;
        }
        Ok(out)
    }

    /// Splits into N-homogeneous parts keyed by N-degree. The parts sum to
    /// the element; an empty map encodes zero.
    pub fn grade(&self) -> BTreeMap<u32, Element> {
        let mut out: BTreeMap<u32, Element> = BTreeMap::new();
        for (m, c) in &self.terms {
            let w = m.weight(&self.ring);
            out.entry(w)
                .or_insert_with(|| Element::zero(&self.ring))
                .add_term(m.clone(), c.clone());
        }
        out
    }

    /// Splits into the even and odd Z2-parts.
    pub fn z2_grade(&self) -> (Element, Element) {
        let mut even = Element::zero(&self.ring);
        let mut odd = Element::zero(&self.ring);
        for (m, c) in &self.terms {
            if m.parity() {
                odd.add_term(m.clone(), c.clone());
            } else {
                even.add_term(m.clone(), c.clone());
            }
        }
        (even, odd)
    }

    /// Z2-degree of a homogeneous element; `None` when mixed. Zero counts as
    /// even.
    pub fn z2_degree(&self) -> Option<bool> {
        let mut parity = None;
        for m in self.terms.keys() {
            match parity {
                None => parity = Some(m.parity()),
                Some(p) if p == m.parity() => {}
                _ => return None,
            }
        }
        Some(parity.unwrap_or(false))
    }

    /// N-degree of a homogeneous element; `None` when mixed or zero.
    pub fn n_degree(&self) -> Option<u32> {
        let mut deg = None;
        for m in self.terms.keys() {
            let w = m.weight(&self.ring);
            match deg {
                None => deg = Some(w),
                Some(d) if d == w => {}
                _ => return None,
            }
        }
        deg
    }

    /// Constant term: the projection onto the ground field.
    pub fn body(&self) -> Scalar {
        self.terms
            .get(&Monomial::unit(&self.ring))
            .cloned()
            .unwrap_or_else(Scalar::zero)
    }

    /// Complement of the body in the ideal generated by the positive-degree
    /// generators: `a = body(a) + soul(a)`.
    pub fn soul(&self) -> Element {
        let mut out = self.clone();
        out.terms.remove(&Monomial::unit(&self.ring));
        out
    }

    /// Coefficient of a specific monomial.
    pub fn coeff(&self, m: &Monomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(Scalar::zero)
    }

    /// Maximum total polynomial degree appearing in the element (0 for zero).
    pub fn max_even_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(Monomial::even_degree)
            .max()
            .unwrap_or(0)
    }

    /// Partial derivative in the even generator `x_i`.
    pub fn even_partial(&self, i: usize) -> Element {
        let mut out = Element::zero(&self.ring);
        for (m, c) in &self.terms {
            let e = m.even_exp[i];
            if e == 0 {
                continue;
            }
            let mut exp = m.even_exp.clone();
            exp[i] = e - 1;
            out.add_term(
                Monomial {
                    even_exp: exp,
                    odd_set: m.odd_set.clone(),
                },
                c * int(e as i64),
            );
        }
        out
    }

    /// Odd partial derivative in `c_a`, acting from the left: strips the
    /// factor with the sign of moving the derivation past the preceding odd
    /// factors.
    pub fn odd_partial(&self, a: usize) -> Element {
        let mut out = Element::zero(&self.ring);
        for (m, c) in &self.terms {
            let Some(pos) = m.odd_set.iter().position(|&b| b as usize == a) else {
                continue;
            };
            let mut odd = m.odd_set.clone();
            odd.remove(pos);
            let mut coeff = c.clone();
            if pos % 2 == 1 {
                coeff = -coeff;
            }
            out.add_term(
                Monomial {
                    even_exp: m.even_exp.clone(),
                    odd_set: odd,
                },
                coeff,
            );
        }
        out
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            write_signed_term(f, k == 0, c, &monomial_factors(m))?;
        }
        Ok(())
    }
}

pub(crate) fn monomial_factors(m: &Monomial) -> Vec<String> {
    let mut factors = Vec::new();
    for (i, &e) in m.even_exp.iter().enumerate() {
        match e {
            0 => {}
            1 => factors.push(format!("x{}", i + 1)),
            _ => factors.push(format!("x{}^{}", i + 1, e)),
        }
    }
    for &a in &m.odd_set {
        factors.push(format!("c{}", a + 1));
    }
    factors
}

pub(crate) fn write_signed_term(
    f: &mut fmt::Formatter<'_>,
    first: bool,
    coeff: &Scalar,
    factors: &[String],
) -> fmt::Result {
    let neg = coeff < &Scalar::zero();
    if first {
        if neg {
            write!(f, "-")?;
        }
    } else if neg {
        write!(f, " - ")?;
    } else {
        write!(f, " + ")?;
    }
    let mag = if neg { -coeff.clone() } else { coeff.clone() };
    if factors.is_empty() {
        write!(f, "{}", format_scalar(&mag))
    } else if mag == int(1) {
        write!(f, "{}", factors.join("*"))
    } else {
        write!(f, "{}*{}", format_scalar(&mag), factors.join("*"))
    }
}

/// Ring endomorphism data: an image for every generator. Validated so that
/// the images satisfy the defining relations of the ring (odd images
/// anticommute and square to zero, even images are central among the images).
#[derive(Debug, Clone)]
pub struct Substitution {
    ring: RingSpec,
    even_images: Vec<Element>,
    odd_images: Vec<Element>,
}

impl Substitution {
    pub fn new(
        ring: &RingSpec,
        even_images: Vec<Element>,
        odd_images: Vec<Element>,
    ) -> Result<Self, RingError> {
        if even_images.len() != ring.n_even() || odd_images.len() != ring.n_odd() {
            return Err(RingError::InvalidSubstitution(
                "image count does not match generator count".into(),
            ));
        }
        for e in even_images.iter().chain(&odd_images) {
            ring.check_same(e.ring())?;
        }
        for (i, g) in odd_images.iter().enumerate() {
            let sq = g.gmul(g)?;
            if !sq.is_zero() {
                return Err(RingError::InvalidSubstitution(format!(
                    "odd image {} does not square to zero",
                    i + 1
                )));
            }
            for (j, h) in odd_images.iter().enumerate().skip(i + 1) {
                let anti = g.gmul(h)?.add(&h.gmul(g)?);
                if !anti.is_zero() {
                    return Err(RingError::InvalidSubstitution(format!(
                        "odd images {} and {} do not anticommute",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        for (i, e) in even_images.iter().enumerate() {
            for (j, e2) in even_images.iter().enumerate().skip(i + 1) {
                if e.gmul(e2)? != e2.gmul(e)? {
                    return Err(RingError::InvalidSubstitution(format!(
                        "even images {} and {} do not commute",
                        i + 1,
                        j + 1
                    )));
                }
            }
            for (a, g) in odd_images.iter().enumerate() {
                if e.gmul(g)? != g.gmul(e)? {
                    return Err(RingError::InvalidSubstitution(format!(
                        "even image {} and odd image {} do not commute",
                        i + 1,
                        a + 1
                    )));
                }
            }
        }
        Ok(Substitution {
            ring: ring.clone(),
            even_images,
            odd_images,
        })
    }

    pub fn identity(ring: &RingSpec) -> Self {
        let even = (0..ring.n_even())
            .map(|i| Element::even_gen(ring, i).unwrap())
            .collect();
        let odd = (0..ring.n_odd())
            .map(|a| Element::odd_gen(ring, a).unwrap())
            .collect();
        Substitution {
            ring: ring.clone(),
            even_images: even,
            odd_images: odd,
        }
    }

    pub fn even_image(&self, i: usize) -> &Element {
        &self.even_images[i]
    }

    pub fn odd_image(&self, a: usize) -> &Element {
        &self.odd_images[a]
    }

    /// Applies the substitution homomorphism.
    pub fn apply(&self, a: &Element) -> Result<Element, RingError> {
        self.ring.check_same(a.ring())?;
        let mut out = Element::zero(&self.ring);
        out.truncated = a.truncated();
        for (m, c) in a.terms() {
            let mut term = Element::scalar(&self.ring, c.clone());
            for (i, &e) in m.even_exp().iter().enumerate() {
                for _ in 0..e {
                    term = term.gmul(&self.even_images[i])?;
                }
            }
            for &idx in m.odd_set() {
                term = term.gmul(&self.odd_images[idx as usize])?;
            }
            out = out.add(&term);
        }
        Ok(out)
    }

    /// True when every generator image is N-homogeneous of the generator's
    /// N-degree.
    pub fn preserves_n_grading(&self) -> bool {
        let even_ok = self.even_images.iter().enumerate().all(|(i, e)| {
            e.is_zero() || e.n_degree() == Some(self.ring.even_weight(i))
        });
        let odd_ok = self.odd_images.iter().enumerate().all(|(a, g)| {
            g.is_zero() || g.n_degree() == Some(self.ring.odd_weight(a))
        });
        even_ok && odd_ok
    }

    /// True when every generator image is Z2-homogeneous of the generator's
    /// Z2-degree.
    pub fn preserves_z2_grading(&self) -> bool {
        let even_ok = self
            .even_images
            .iter()
            .all(|e| e.z2_degree() == Some(false));
        let odd_ok = self
            .odd_images
            .iter()
            .all(|g| g.is_zero() || g.z2_degree() == Some(true));
        even_ok && odd_ok
    }
}
