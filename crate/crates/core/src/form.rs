//! The bigraded ring of graded exterior forms in coordinates.
//!
//! Forms are intrinsic algebra elements: the free bigraded algebra over the
//! model ring on the one-form generators `dx_i`, `dc_a`. The `dx` are
//! antisymmetric among themselves, the `dc` are symmetric among themselves
//! (so `dc` powers are unbounded), and every commutation sign comes from one
//! bidegree table: a generator `g` carries `(|g|, [g])` with
//! `x:(0,0), c:(0,1), dx:(1,0), dc:(1,1)`, and moving `g` past `h` costs
//! `(-1)^{|g||h| + [g][h]}`. Coefficients are always written to the left of
//! the form generators.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::derivation::GradedDerivation;
use crate::ring::{koszul_sign, monomial_factors, write_signed_term, KoszulProduct};
use crate::ring::{Element, RingError, RingSpec};
use crate::scalar::Scalar;

/// Product of one-form generators in canonical order: the `dx` factors with
/// strictly ascending indices, then the `dc` factors with non-decreasing
/// indices and multiplicities.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FormMonomial {
    dx_set: Vec<u8>,
    dc_multi: Vec<u8>,
}

impl FormMonomial {
    pub fn unit() -> Self {
        FormMonomial {
            dx_set: Vec::new(),
            dc_multi: Vec::new(),
        }
    }

    pub fn new(ring: &RingSpec, dx_set: Vec<u8>, dc_multi: Vec<u8>) -> Result<Self, RingError> {
        for w in dx_set.windows(2) {
            if w[0] >= w[1] {
                return Err(RingError::InvalidSpec(
                    "dx indices must be strictly ascending".into(),
                ));
            }
        }
        if let Some(&last) = dx_set.last() {
            if last as usize >= ring.n_even() {
                return Err(RingError::GeneratorOutOfRange {
                    kind: "even",
                    index: last as usize,
                    count: ring.n_even(),
                });
            }
        }
        for w in dc_multi.windows(2) {
            if w[0] > w[1] {
                return Err(RingError::InvalidSpec(
                    "dc indices must be non-decreasing".into(),
                ));
            }
        }
        if let Some(&last) = dc_multi.last() {
            if last as usize >= ring.n_odd() {
                return Err(RingError::GeneratorOutOfRange {
                    kind: "odd",
                    index: last as usize,
                    count: ring.n_odd(),
                });
            }
        }
        Ok(FormMonomial { dx_set, dc_multi })
    }

    pub fn dx_set(&self) -> &[u8] {
        &self.dx_set
    }

    pub fn dc_multi(&self) -> &[u8] {
        &self.dc_multi
    }

    /// Form degree: number of one-form factors.
    pub fn degree(&self) -> u32 {
        (self.dx_set.len() + self.dc_multi.len()) as u32
    }

    /// Z2-parity contributed by the form generators (each `dc` is odd).
    pub fn parity(&self) -> bool {
        self.dc_multi.len() % 2 == 1
    }

    /// N-weight of the form factors with the ring's weights
    /// (`weight(dx_i) = weight(x_i)`, `weight(dc_a) = weight(c_a)`).
    pub fn weight(&self, ring: &RingSpec) -> u32 {
        let e: u32 = self
            .dx_set
            .iter()
            .map(|&i| ring.even_weight(i as usize))
            .sum();
        let o: u32 = self
            .dc_multi
            .iter()
            .map(|&a| ring.odd_weight(a as usize))
            .sum();
        e + o
    }

    pub fn is_unit(&self) -> bool {
        self.dx_set.is_empty() && self.dc_multi.is_empty()
    }
}

/// Merges two ascending sequences, returning the transposition parity, or
/// `None` on a repeated entry.
fn merge_parity(a: &[u8], b: &[u8]) -> Option<(bool, Vec<u8>)> {
    let mut inversions = 0usize;
    let mut merged = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0usize, 0usize);
    while i < a.len() || j < b.len() {
        match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) if x == y => return None,
            (Some(&x), Some(&y)) if x < y => {
                merged.push(x);
                i += 1;
            }
            (Some(_), Some(&y)) => {
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
    Some((inversions % 2 == 1, merged))
}

/// Graded exterior form: a finite map from canonical form monomials to ring
/// elements, with the coefficient on the left.
#[derive(Debug, Clone)]
pub struct Form {
    ring: RingSpec,
    terms: BTreeMap<FormMonomial, Element>,
    truncated: bool,
}

impl PartialEq for Form {
    fn eq(&self, other: &Self) -> bool {
        self.ring == other.ring && self.terms == other.terms
    }
}

impl Eq for Form {}

impl Form {
    pub fn zero(ring: &RingSpec) -> Self {
        Form {
            ring: ring.clone(),
            terms: BTreeMap::new(),
            truncated: false,
        }
    }

    pub fn one(ring: &RingSpec) -> Self {
        Form::from_element(&Element::one(ring))
    }

    /// Degree-zero form holding a ring element.
    pub fn from_element(e: &Element) -> Self {
        let mut f = Form::zero(e.ring());
        f.truncated = e.truncated();
        if !e.is_zero() {
            f.terms.insert(FormMonomial::unit(), e.clone());
        }
        f
    }

    /// The basis one-form `dx_i`.
    pub fn dx(ring: &RingSpec, i: usize) -> Result<Self, RingError> {
        if i >= ring.n_even() {
            return Err(RingError::GeneratorOutOfRange {
                kind: "even",
                index: i,
                count: ring.n_even(),
            });
        }
        let mut f = Form::zero(ring);
        f.terms.insert(
            FormMonomial {
                dx_set: vec![i as u8],
                dc_multi: Vec::new(),
            },
            Element::one(ring),
        );
        Ok(f)
    }

    /// The basis one-form `dc_a`.
    pub fn dc(ring: &RingSpec, a: usize) -> Result<Self, RingError> {
        if a >= ring.n_odd() {
            return Err(RingError::GeneratorOutOfRange {
                kind: "odd",
                index: a,
                count: ring.n_odd(),
            });
        }
        let mut f = Form::zero(ring);
        f.terms.insert(
            FormMonomial {
                dx_set: Vec::new(),
                dc_multi: vec![a as u8],
            },
            Element::one(ring),
        );
        Ok(f)
    }

    pub fn from_terms(
        ring: &RingSpec,
        terms: impl IntoIterator<Item = (FormMonomial, Element)>,
    ) -> Self {
        let mut f = Form::zero(ring);
        for (fm, e) in terms {
            f.add_term(fm, e);
        }
        f
    }

    pub fn ring(&self) -> &RingSpec {
        &self.ring
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FormMonomial, &Element)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn truncated(&self) -> bool {
        self.truncated
    }

    /// The coefficient of a form monomial (zero element when absent).
    pub fn coeff(&self, fm: &FormMonomial) -> Element {
        self.terms
            .get(fm)
            .cloned()
            .unwrap_or_else(|| Element::zero(&self.ring))
    }

    /// Degree-zero part as a ring element; `None` when a positive-degree term
    /// is present.
    pub fn as_element(&self) -> Option<Element> {
        match self.terms.len() {
            0 => Some(Element::zero(&self.ring)),
            1 => self.terms.get(&FormMonomial::unit()).cloned(),
            _ => None,
        }
    }

    fn add_term(&mut self, fm: FormMonomial, e: Element) {
        self.truncated |= e.truncated();
        if e.is_zero() {
            return;
        }
        match self.terms.entry(fm) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(e);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = o.get().add(&e);
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn add(&self, other: &Form) -> Form {
        self.ring
            .check_same(&other.ring)
            .expect("ring mismatch in form add");
        let mut out = self.clone();
        out.truncated |= other.truncated;
        for (fm, e) in &other.terms {
            out.add_term(fm.clone(), e.clone());
        }
        out
    }

    pub fn neg(&self) -> Form {
        let mut out = self.clone();
        for e in out.terms.values_mut() {
            *e = e.neg();
        }
        out
    }

    pub fn sub(&self, other: &Form) -> Form {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &Scalar) -> Form {
        if s.is_zero() {
            let mut z = Form::zero(&self.ring);
            z.truncated = self.truncated;
            return z;
        }
        let mut out = self.clone();
        for e in out.terms.values_mut() {
            *e = e.scale(s);
        }
        out
    }

    /// Multiplies by a ring element on the left.
    pub fn left_mul(&self, a: &Element) -> Result<Form, RingError> {
        Form::from_element(a).wedge(self)
    }

    /// Form degree of a homogeneous form; `None` when mixed or zero.
    pub fn degree(&self) -> Option<u32> {
        let mut deg = None;
        for fm in self.terms.keys() {
            match deg {
                None => deg = Some(fm.degree()),
                Some(d) if d == fm.degree() => {}
                _ => return None,
            }
        }
        deg
    }

    /// Z2-parity of a homogeneous form (coefficient parity plus the number of
    /// `dc` factors); `None` when mixed. Zero counts as even.
    pub fn z2_degree(&self) -> Option<bool> {
        let mut parity = None;
        for (fm, e) in &self.terms {
            let ep = e.z2_degree()?;
            let p = ep ^ fm.parity();
            match parity {
                None => parity = Some(p),
                Some(q) if q == p => {}
                _ => return None,
            }
        }
        Some(parity.unwrap_or(false))
    }

    /// Total N-weight of a homogeneous form; `None` when mixed or zero.
    pub fn weight(&self) -> Option<u32> {
        let mut weight = None;
        for (fm, e) in &self.terms {
            let base = fm.weight(&self.ring);
            for (m, _) in e.terms() {
                let w = base + m.weight(&self.ring);
                match weight {
                    None => weight = Some(w),
                    Some(v) if v == w => {}
                    _ => return None,
                }
            }
        }
        weight
    }

    /// Splits the form into `(form degree, total weight)` blocks.
    pub fn bigraded_parts(&self) -> BTreeMap<(u32, u32), Form> {
        let mut out: BTreeMap<(u32, u32), Form> = BTreeMap::new();
        for (fm, e) in &self.terms {
            let p = fm.degree();
            let base = fm.weight(&self.ring);
            for (m, c) in e.terms() {
                let w = base + m.weight(&self.ring);
                out.entry((p, w))
                    .or_insert_with(|| Form::zero(&self.ring))
                    .add_term(
                        fm.clone(),
                        Element::from_monomial(&self.ring, m.clone(), c.clone()),
                    );
            }
        }
        out
    }

    /// Graded exterior product. The sign is assembled factor-by-factor from
    /// the bidegree table; the coefficients meet through the ring product.
    pub fn wedge(&self, other: &Form) -> Result<Form, RingError> {
        self.ring.check_same(&other.ring)?;
        let mut out = Form::zero(&self.ring);
        out.truncated = self.truncated || other.truncated;
        for (f1, e1) in &self.terms {
            for (f2, e2) in &other.terms {
                // the dx factors of f2 move left past the dc factors of f1
                let cross = (f2.dx_set.len() * f1.dc_multi.len()) % 2 == 1;
                let Some((dx_parity, dx_set)) = merge_parity(&f1.dx_set, &f2.dx_set) else {
                    continue; // repeated dx kills the term
                };
                let mut dc_multi = Vec::with_capacity(f1.dc_multi.len() + f2.dc_multi.len());
                dc_multi.extend_from_slice(&f1.dc_multi);
                dc_multi.extend_from_slice(&f2.dc_multi);
                dc_multi.sort_unstable();
                let fm = FormMonomial { dx_set, dc_multi };

                for (m1, c1) in e1.terms() {
                    for (m2, c2) in e2.terms() {
                        // the coefficient of the right factor moves left past
                        // the form part of the left factor
                        let move_parity = m2.parity() && f1.parity();
                        match koszul_sign(m1, m2) {
                            KoszulProduct::Zero => {}
                            KoszulProduct::Term { sign, monomial } => {
                                if monomial.even_degree() > self.ring.trunc() {
                                    out.truncated = true;
                                    continue;
                                }
                                let mut c = c1 * c2;
                                if sign ^ move_parity ^ dx_parity ^ cross {
                                    c = -c;
                                }
                                out.add_term(
                                    fm.clone(),
                                    Element::from_monomial(&self.ring, monomial, c),
                                );
                            }
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn wedge_pow(&self, k: u32) -> Result<Form, RingError> {
        let mut out = Form::one(&self.ring);
        for _ in 0..k {
            out = out.wedge(self)?;
        }
        Ok(out)
    }

    /// Graded exterior differential
    /// `d(phi) = sum_i dx_i /\ d/dx_i(phi) + sum_a dc_a /\ d/dc_a(phi)`.
    /// Satisfies `d(d(phi)) = 0` and the graded Leibniz rule; never truncates
    /// because the partials lower the polynomial degree.
    pub fn exterior_d(&self) -> Form {
        let ring = self.ring.clone();
        let mut out = Form::zero(&ring);
        out.truncated = self.truncated;
        for (fm, e) in &self.terms {
            for i in 0..ring.n_even() {
                let de = e.even_partial(i);
                if de.is_zero() {
                    continue;
                }
                // dx_i enters from the left of the dx block
                let Some((parity, dx_set)) =
                    merge_parity(std::slice::from_ref(&(i as u8)), &fm.dx_set)
                else {
                    continue;
                };
                out.add_term(
                    FormMonomial {
                        dx_set,
                        dc_multi: fm.dc_multi.clone(),
                    },
                    if parity { de.neg() } else { de },
                );
            }
            for a in 0..ring.n_odd() {
                let de = e.odd_partial(a);
                if de.is_zero() {
                    continue;
                }
                // dc_a /\ (de * fm): the coefficient de moves left past dc_a
                // (sign per term parity), then dc_a crosses the dx block
                let (de_even, de_odd) = de.z2_grade();
                let mut coeff = de_even.sub(&de_odd);
                if fm.dx_set.len() % 2 == 1 {
                    coeff = coeff.neg();
                }
                let mut dc_multi = Vec::with_capacity(fm.dc_multi.len() + 1);
                let pos = fm.dc_multi.partition_point(|&b| b <= a as u8);
                dc_multi.extend_from_slice(&fm.dc_multi[..pos]);
                dc_multi.push(a as u8);
                dc_multi.extend_from_slice(&fm.dc_multi[pos..]);
                out.add_term(
                    FormMonomial {
                        dx_set: fm.dx_set.clone(),
                        dc_multi,
                    },
                    coeff,
                );
            }
        }
        out
    }

    /// Graded interior product: the unique bigraded derivation of bidegree
    /// `(-1, [u])` extending the pairing of basis derivations with the
    /// matching one-form generators. Mixed-parity derivations are decomposed
    /// first.
    pub fn interior(&self, u: &GradedDerivation) -> Result<Form, RingError> {
        self.ring.check_same(u.ring())?;
        match u.z2_degree() {
            Some(pu) => self.interior_homogeneous(u, pu),
            None => {
                let (u0, u1) = u.parity_parts();
                Ok(self
                    .interior_homogeneous(&u0, false)?
                    .add(&self.interior_homogeneous(&u1, true)?))
            }
        }
    }

    fn interior_homogeneous(&self, u: &GradedDerivation, pu: bool) -> Result<Form, RingError> {
        let ring = self.ring.clone();
        let mut out = Form::zero(&ring);
        out.truncated = self.truncated;
        for (fm, e) in &self.terms {
            // the derivation first moves past the coefficient: (-1)^{[e][u]}
            let coeff_base = if pu {
                let (e_even, e_odd) = e.z2_grade();
                e_even.sub(&e_odd)
            } else {
                e.clone()
            };
            let total = fm.dx_set.len() + fm.dc_multi.len();
            for k in 0..total {
                let (is_dx, gen) = if k < fm.dx_set.len() {
                    (true, fm.dx_set[k])
                } else {
                    (false, fm.dc_multi[k - fm.dx_set.len()])
                };
                let val = if is_dx {
                    u.even_coeff(gen as usize)
                } else {
                    u.odd_coeff(gen as usize)
                };
                if val.is_zero() {
                    continue;
                }
                // walking to factor k and carrying the pairing value back to
                // the coefficient slot costs (-1)^{k + [gen_k] * #dc before k}
                let dc_before = k.saturating_sub(fm.dx_set.len());
                let parity = (k + if is_dx { 0 } else { dc_before }) % 2 == 1;
                let mut dx_set = fm.dx_set.clone();
                let mut dc_multi = fm.dc_multi.clone();
                if is_dx {
                    dx_set.remove(k);
                } else {
                    dc_multi.remove(k - fm.dx_set.len());
                }
                let mut coeff = coeff_base.gmul(val)?;
                if parity {
                    coeff = coeff.neg();
                }
                out.add_term(FormMonomial { dx_set, dc_multi }, coeff);
            }
        }
        Ok(out)
    }

    /// Graded Lie derivative `L_u(phi) = u _| d(phi) + d(u _| phi)`.
    pub fn lie_derivative(&self, u: &GradedDerivation) -> Result<Form, RingError> {
        let a = self.exterior_d().interior(u)?;
        let b = self.interior(u)?.exterior_d();
        Ok(a.add(&b))
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (fm, e) in &self.terms {
            let mut gen_factors: Vec<String> = fm
                .dx_set
                .iter()
                .map(|&i| format!("dx{}", i + 1))
                .collect();
            let mut i = 0;
            while i < fm.dc_multi.len() {
                let a = fm.dc_multi[i];
                let mut mult = 1;
                while i + mult < fm.dc_multi.len() && fm.dc_multi[i + mult] == a {
                    mult += 1;
                }
                if mult == 1 {
                    gen_factors.push(format!("dc{}", a + 1));
                } else {
                    gen_factors.push(format!("dc{}^{}", a + 1, mult));
                }
                i += mult;
            }
            if e.num_terms() == 1 {
                let (m, c) = e.terms().next().expect("nonempty element");
                let mut factors = monomial_factors(m);
                factors.extend(gen_factors);
                write_signed_term(f, first, c, &factors)?;
            } else if gen_factors.is_empty() && first {
                // the unit form monomial sorts first: inline its coefficient
                write!(f, "{}", e)?;
            } else {
                if !first {
                    write!(f, " + ")?;
                }
                if gen_factors.is_empty() {
                    write!(f, "({})", e)?;
                } else {
                    write!(f, "({})*{}", e, gen_factors.join("*"))?;
                }
            }
            first = false;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::int;

    fn x(ring: &RingSpec, i: usize) -> Element {
        Element::even_gen(ring, i).unwrap()
    }

    fn c(ring: &RingSpec, a: usize) -> Element {
        Element::odd_gen(ring, a).unwrap()
    }

    #[test]
    fn wedge_sign_table() {
        let ring = RingSpec::new(1, 1, 8);
        let dx1 = Form::dx(&ring, 0).unwrap();
        let dc1 = Form::dc(&ring, 0).unwrap();
        // dx /\ dc = -(dc /\ dx)
        assert_eq!(dx1.wedge(&dc1).unwrap(), dc1.wedge(&dx1).unwrap().neg());
        // dc /\ dc is a nonzero square
        let sq = dc1.wedge(&dc1).unwrap();
        assert!(!sq.is_zero());
        assert_eq!(sq.degree(), Some(2));
        // dx /\ dx = 0
        assert!(dx1.wedge(&dx1).unwrap().is_zero());
    }

    #[test]
    fn odd_coefficient_crossing() {
        // c1 anticommutes with dc1 and commutes with dx1
        let ring = RingSpec::new(1, 1, 8);
        let dx1 = Form::dx(&ring, 0).unwrap();
        let dc1 = Form::dc(&ring, 0).unwrap();
        let c1 = Form::from_element(&c(&ring, 0));
        assert_eq!(dc1.wedge(&c1).unwrap(), c1.wedge(&dc1).unwrap().neg());
        assert_eq!(dx1.wedge(&c1).unwrap(), c1.wedge(&dx1).unwrap());
    }

    #[test]
    fn exterior_d_examples() {
        let ring = RingSpec::new(1, 1, 8);
        // d(x^2) = 2 x dx
        let x2 = Form::from_element(&x(&ring, 0).pow(2).unwrap());
        let expect = Form::from_element(&x(&ring, 0).scale(&int(2)))
            .wedge(&Form::dx(&ring, 0).unwrap())
            .unwrap();
        assert_eq!(x2.exterior_d(), expect);

        // d(c1) = dc1
        let c1 = Form::from_element(&c(&ring, 0));
        assert_eq!(c1.exterior_d(), Form::dc(&ring, 0).unwrap());

        // d(x1 c1) = c1 dx1 + x1 dc1, and d of that vanishes
        let xc = Form::from_element(&x(&ring, 0).gmul(&c(&ring, 0)).unwrap());
        let d = xc.exterior_d();
        let c1dx1 = Form::from_element(&c(&ring, 0))
            .wedge(&Form::dx(&ring, 0).unwrap())
            .unwrap();
        let x1dc1 = Form::from_element(&x(&ring, 0))
            .wedge(&Form::dc(&ring, 0).unwrap())
            .unwrap();
        assert_eq!(d, c1dx1.add(&x1dc1));
        assert!(d.exterior_d().is_zero());
    }

    #[test]
    fn dx_enters_with_merge_sign() {
        // d(x2 dx1) = dx2 /\ dx1 = -dx1 /\ dx2
        let ring = RingSpec::new(2, 0, 8);
        let f = Form::from_element(&x(&ring, 1))
            .wedge(&Form::dx(&ring, 0).unwrap())
            .unwrap();
        let d = f.exterior_d();
        let expect = Form::dx(&ring, 0)
            .unwrap()
            .wedge(&Form::dx(&ring, 1).unwrap())
            .unwrap()
            .neg();
        assert_eq!(d, expect);
    }

    #[test]
    fn minimality_every_generator_one_form_is_exact() {
        let ring = RingSpec::new(2, 2, 8);
        for i in 0..2 {
            assert_eq!(
                Form::from_element(&x(&ring, i)).exterior_d(),
                Form::dx(&ring, i).unwrap()
            );
        }
        for a in 0..2 {
            assert_eq!(
                Form::from_element(&c(&ring, a)).exterior_d(),
                Form::dc(&ring, a).unwrap()
            );
        }
    }

    #[test]
    fn interior_product_examples() {
        let ring = RingSpec::new(1, 1, 8);
        let dc1 = Form::dc(&ring, 0).unwrap();
        let dx1 = Form::dx(&ring, 0).unwrap();
        let ddc1 = GradedDerivation::odd_partial(&ring, 0).unwrap();
        let d1 = GradedDerivation::even_partial(&ring, 0).unwrap();

        assert_eq!(dc1.interior(&ddc1).unwrap(), Form::one(&ring));
        assert_eq!(dx1.wedge(&dc1).unwrap().interior(&ddc1).unwrap(), dx1.neg());
        assert!(dc1.interior(&d1).unwrap().is_zero());
    }

    #[test]
    fn interior_is_bigraded_derivation() {
        // u _| (phi /\ psi) = (u _| phi) /\ psi
        //                     + (-1)^{|phi| + [phi][u]} phi /\ (u _| psi)
        let ring = RingSpec::new(2, 2, 8);
        let phis = [
            Form::dx(&ring, 0).unwrap(),
            Form::dc(&ring, 1).unwrap(),
            Form::from_element(&c(&ring, 0))
                .wedge(&Form::dx(&ring, 1).unwrap())
                .unwrap(),
        ];
        let psis = [
            Form::dc(&ring, 0).unwrap(),
            Form::dx(&ring, 1)
                .unwrap()
                .wedge(&Form::dc(&ring, 1).unwrap())
                .unwrap(),
        ];
        let us = [
            GradedDerivation::even_partial(&ring, 0).unwrap(),
            GradedDerivation::odd_partial(&ring, 0).unwrap(),
            GradedDerivation::odd_partial(&ring, 1)
                .unwrap()
                .left_mul(&c(&ring, 0))
                .unwrap(),
        ];
        for u in &us {
            let pu = u.z2_degree().unwrap();
            for phi in &phis {
                for psi in &psis {
                    let lhs = phi.wedge(psi).unwrap().interior(u).unwrap();
                    let d_phi = phi.degree().unwrap();
                    let p_phi = phi.z2_degree().unwrap();
                    let sign_parity = (d_phi % 2 == 1) ^ (p_phi && pu);
                    let second = phi.wedge(&psi.interior(u).unwrap()).unwrap();
                    let rhs = phi
                        .interior(u)
                        .unwrap()
                        .wedge(psi)
                        .unwrap()
                        .add(&if sign_parity { second.neg() } else { second });
                    assert_eq!(lhs, rhs, "interior product rule failed");
                }
            }
        }
    }

    #[test]
    fn lie_derivative_examples() {
        let ring = RingSpec::new(1, 1, 8);
        let d1 = GradedDerivation::even_partial(&ring, 0).unwrap();
        let ddc1 = GradedDerivation::odd_partial(&ring, 0).unwrap();

        // L_{d1}(x dx) = dx
        let xdx = Form::from_element(&x(&ring, 0))
            .wedge(&Form::dx(&ring, 0).unwrap())
            .unwrap();
        assert_eq!(xdx.lie_derivative(&d1).unwrap(), Form::dx(&ring, 0).unwrap());

        // L_u(1) = 0
        assert!(Form::one(&ring).lie_derivative(&d1).unwrap().is_zero());

        // L_{d/dc1}(c1 dc1) = dc1
        let cdc = Form::from_element(&c(&ring, 0))
            .wedge(&Form::dc(&ring, 0).unwrap())
            .unwrap();
        assert_eq!(cdc.lie_derivative(&ddc1).unwrap(), Form::dc(&ring, 0).unwrap());
    }

    #[test]
    fn display_is_parseable_shape() {
        let ring = RingSpec::new(1, 1, 8);
        let f = Form::from_element(&x(&ring, 0))
            .wedge(&Form::dc(&ring, 0).unwrap().wedge_pow(2).unwrap())
            .unwrap();
        assert_eq!(f.to_string(), "x1*dc1^2");
    }
}
