//! Graded derivations of the model ring and their Lie superalgebra.
//!
//! A derivation is stored by its coefficients against the standard basis:
//! `u = sum_i u^i d/dx_i + sum_a u^a d/dc_a`. Application strips a generator
//! and multiplies by the coefficient from the left, so every sign is produced
//! by the partial-derivative reordering in [`Element::odd_partial`].

use crate::ring::{Element, RingError, RingSpec};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GradedDerivation {
    ring: RingSpec,
    even_coeffs: Vec<Element>,
    odd_coeffs: Vec<Element>,
}

impl GradedDerivation {
    pub fn new(
        ring: &RingSpec,
        even_coeffs: Vec<Element>,
        odd_coeffs: Vec<Element>,
    ) -> Result<Self, RingError> {
        if even_coeffs.len() != ring.n_even() || odd_coeffs.len() != ring.n_odd() {
            return Err(RingError::InvalidSpec(
                "coefficient count does not match generator count".into(),
            ));
        }
        for c in even_coeffs.iter().chain(&odd_coeffs) {
            ring.check_same(c.ring())?;
        }
        Ok(GradedDerivation {
            ring: ring.clone(),
            even_coeffs,
            odd_coeffs,
        })
    }

    pub fn zero(ring: &RingSpec) -> Self {
        GradedDerivation {
            ring: ring.clone(),
            even_coeffs: vec![Element::zero(ring); ring.n_even()],
            odd_coeffs: vec![Element::zero(ring); ring.n_odd()],
        }
    }

    /// The coordinate derivation `d/dx_i`.
    pub fn even_partial(ring: &RingSpec, i: usize) -> Result<Self, RingError> {
        if i >= ring.n_even() {
            return Err(RingError::GeneratorOutOfRange {
                kind: "even",
                index: i,
                count: ring.n_even(),
            });
        }
        let mut d = Self::zero(ring);
        d.even_coeffs[i] = Element::one(ring);
        Ok(d)
    }

    /// The coordinate derivation `d/dc_a`.
    pub fn odd_partial(ring: &RingSpec, a: usize) -> Result<Self, RingError> {
        if a >= ring.n_odd() {
            return Err(RingError::GeneratorOutOfRange {
                kind: "odd",
                index: a,
                count: ring.n_odd(),
            });
        }
        let mut d = Self::zero(ring);
        d.odd_coeffs[a] = Element::one(ring);
        Ok(d)
    }

    pub fn ring(&self) -> &RingSpec {
        &self.ring
    }

    pub fn even_coeff(&self, i: usize) -> &Element {
        &self.even_coeffs[i]
    }

    pub fn odd_coeff(&self, a: usize) -> &Element {
        &self.odd_coeffs[a]
    }

    pub fn is_zero(&self) -> bool {
        self.even_coeffs.iter().all(Element::is_zero)
            && self.odd_coeffs.iter().all(Element::is_zero)
    }

    pub fn add(&self, other: &GradedDerivation) -> GradedDerivation {
        let even = self
            .even_coeffs
            .iter()
            .zip(&other.even_coeffs)
            .map(|(a, b)| a.add(b))
            .collect();
        let odd = self
            .odd_coeffs
            .iter()
            .zip(&other.odd_coeffs)
            .map(|(a, b)| a.add(b))
            .collect();
        GradedDerivation {
            ring: self.ring.clone(),
            even_coeffs: even,
            odd_coeffs: odd,
        }
    }

    pub fn neg(&self) -> GradedDerivation {
        GradedDerivation {
            ring: self.ring.clone(),
            even_coeffs: self.even_coeffs.iter().map(Element::neg).collect(),
            odd_coeffs: self.odd_coeffs.iter().map(Element::neg).collect(),
        }
    }

    pub fn sub(&self, other: &GradedDerivation) -> GradedDerivation {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &Scalar) -> GradedDerivation {
        GradedDerivation {
            ring: self.ring.clone(),
            even_coeffs: self.even_coeffs.iter().map(|c| c.scale(s)).collect(),
            odd_coeffs: self.odd_coeffs.iter().map(|c| c.scale(s)).collect(),
        }
    }

    /// Left multiplication by a ring element: `(a u)(f) = a * u(f)`.
    pub fn left_mul(&self, a: &Element) -> Result<GradedDerivation, RingError> {
        let even = self
            .even_coeffs
            .iter()
            .map(|c| a.gmul(c))
            .collect::<Result<_, _>>()?;
        let odd = self
            .odd_coeffs
            .iter()
            .map(|c| a.gmul(c))
            .collect::<Result<_, _>>()?;
        Ok(GradedDerivation {
            ring: self.ring.clone(),
            even_coeffs: even,
            odd_coeffs: odd,
        })
    }

    /// Applies the derivation to a ring element.
    pub fn apply(&self, f: &Element) -> Result<Element, RingError> {
        self.ring.check_same(f.ring())?;
        let mut out = Element::zero(&self.ring);
        for (i, coeff) in self.even_coeffs.iter().enumerate() {
            if coeff.is_zero() {
                continue;
            }
            out = out.add(&coeff.gmul(&f.even_partial(i))?);
        }
        for (a, coeff) in self.odd_coeffs.iter().enumerate() {
            if coeff.is_zero() {
                continue;
            }
            out = out.add(&coeff.gmul(&f.odd_partial(a))?);
        }
        Ok(out)
    }

    /// Z2-parity of a homogeneous derivation; `None` when mixed. The term
    /// `u^i d/dx_i` has the parity of `u^i`; the term `u^a d/dc_a` has the
    /// opposite parity of `u^a`.
    pub fn z2_degree(&self) -> Option<bool> {
        let mut parity: Option<bool> = None;
        let mut merge = |p: bool| -> bool {
            match parity {
                None => {
                    parity = Some(p);
                    true
                }
                Some(q) => q == p,
            }
        };
        for c in &self.even_coeffs {
            match c.z2_degree() {
                Some(p) if !c.is_zero() => {
                    if !merge(p) {
                        return None;
                    }
                }
                Some(_) => {}
                None => return None,
            }
        }
        for c in &self.odd_coeffs {
            match c.z2_degree() {
                Some(p) if !c.is_zero() => {
                    if !merge(!p) {
                        return None;
                    }
                }
                Some(_) => {}
                None => return None,
            }
        }
        Some(parity.unwrap_or(false))
    }

    /// Splits into the even and odd parts of the derivation.
    pub fn parity_parts(&self) -> (GradedDerivation, GradedDerivation) {
        let mut even = Self::zero(&self.ring);
        let mut odd = Self::zero(&self.ring);
        for (i, c) in self.even_coeffs.iter().enumerate() {
            let (ce, co) = c.z2_grade();
            even.even_coeffs[i] = ce;
            odd.even_coeffs[i] = co;
        }
        for (a, c) in self.odd_coeffs.iter().enumerate() {
            let (ce, co) = c.z2_grade();
            // an even coefficient on d/dc_a makes an odd derivation
            odd.odd_coeffs[a] = ce;
            even.odd_coeffs[a] = co;
        }
        (even, odd)
    }

    /// N-degree shift of a homogeneous derivation (`deg u(f) = deg f + shift`
    /// for homogeneous input); `None` when mixed or zero.
    pub fn n_shift(&self) -> Option<i64> {
        let mut shift: Option<i64> = None;
        let mut merge = |s: i64| -> bool {
            match shift {
                None => {
                    shift = Some(s);
                    true
                }
                Some(t) => t == s,
            }
        };
        for (i, c) in self.even_coeffs.iter().enumerate() {
            for (m, _) in c.terms() {
                let s = m.weight(&self.ring) as i64 - self.ring.even_weight(i) as i64;
                if !merge(s) {
                    return None;
                }
            }
        }
        for (a, c) in self.odd_coeffs.iter().enumerate() {
            for (m, _) in c.terms() {
                let s = m.weight(&self.ring) as i64 - self.ring.odd_weight(a) as i64;
                if !merge(s) {
                    return None;
                }
            }
        }
        shift
    }

    /// Lie superbracket `[u, v] = u v - (-1)^{[u][v]} v u`. Mixed-parity
    /// inputs are decomposed and the bracket extended bilinearly. The result
    /// is read off by applying the bracket to every generator.
    pub fn superbracket(&self, other: &GradedDerivation) -> Result<GradedDerivation, RingError> {
        self.ring.check_same(&other.ring)?;
        let (u0, u1) = self.parity_parts();
        let (v0, v1) = other.parity_parts();
        let mut out = Self::zero(&self.ring);
        for (u, pu) in [(&u0, false), (&u1, true)] {
            if u.is_zero() {
                continue;
            }
            for (v, pv) in [(&v0, false), (&v1, true)] {
                if v.is_zero() {
                    continue;
                }
                out = out.add(&homogeneous_bracket(u, v, pu && pv)?);
            }
        }
        Ok(out)
    }
}

fn homogeneous_bracket(
    u: &GradedDerivation,
    v: &GradedDerivation,
    both_odd: bool,
) -> Result<GradedDerivation, RingError> {
    let ring = u.ring().clone();
    let gen_bracket = |g: &Element| -> Result<Element, RingError> {
        let a = u.apply(&v.apply(g)?)?;
        let b = v.apply(&u.apply(g)?)?;
        Ok(if both_odd { a.add(&b) } else { a.sub(&b) })
    };
    let mut even = Vec::with_capacity(ring.n_even());
    for i in 0..ring.n_even() {
        even.push(gen_bracket(&Element::even_gen(&ring, i)?)?);
    }
    let mut odd = Vec::with_capacity(ring.n_odd());
    for a in 0..ring.n_odd() {
        odd.push(gen_bracket(&Element::odd_gen(&ring, a)?)?);
    }
    GradedDerivation::new(&ring, even, odd)
}

/// Checks the graded Leibniz rule
/// `u(ab) = u(a) b + (-1)^{[a][u]} a u(b)` for a homogeneous derivation,
/// decomposing `a` into parities when it is mixed.
pub fn check_leibniz(
    u: &GradedDerivation,
    a: &Element,
    b: &Element,
) -> Result<bool, RingError> {
    let Some(pu) = u.z2_degree() else {
        return Err(RingError::InvalidSpec(
            "check_leibniz needs a homogeneous derivation".into(),
        ));
    };
    let lhs = u.apply(&a.gmul(b)?)?;
    let ub = u.apply(b)?;
    let (a_even, a_odd) = a.z2_grade();
    let mut rhs = u.apply(a)?.gmul(b)?;
    rhs = rhs.add(&a_even.gmul(&ub)?);
    let odd_term = a_odd.gmul(&ub)?;
    rhs = rhs.add(&if pu { odd_term.neg() } else { odd_term });
    Ok(lhs == rhs)
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
    fn apply_on_generators() {
        let ring = RingSpec::new(1, 2, 8);
        let dc1 = GradedDerivation::odd_partial(&ring, 0).unwrap();
        let d1 = GradedDerivation::even_partial(&ring, 0).unwrap();

        let c1c2 = c(&ring, 0).gmul(&c(&ring, 1)).unwrap();
        assert_eq!(dc1.apply(&c1c2).unwrap(), c(&ring, 1));

        // c2*c1 = -c1*c2, then stripping c1 gives -c2
        let c2c1 = c(&ring, 1).gmul(&c(&ring, 0)).unwrap();
        assert_eq!(dc1.apply(&c2c1).unwrap(), c(&ring, 1).neg());

        let x3 = x(&ring, 0).pow(3).unwrap();
        let expect = x(&ring, 0).pow(2).unwrap().scale(&int(3));
        assert_eq!(d1.apply(&x3).unwrap(), expect);
    }

    #[test]
    fn coefficients_recovered_from_generators() {
        // dA is free: applying to generators returns the coefficients
        let ring = RingSpec::new(2, 2, 8);
        let u = GradedDerivation::new(
            &ring,
            vec![c(&ring, 0), x(&ring, 1)],
            vec![x(&ring, 0), Element::one(&ring)],
        )
        .unwrap();
        assert_eq!(u.apply(&x(&ring, 0)).unwrap(), *u.even_coeff(0));
        assert_eq!(u.apply(&x(&ring, 1)).unwrap(), *u.even_coeff(1));
        assert_eq!(u.apply(&c(&ring, 0)).unwrap(), *u.odd_coeff(0));
        assert_eq!(u.apply(&c(&ring, 1)).unwrap(), *u.odd_coeff(1));
    }

    #[test]
    fn superbracket_examples() {
        let ring = RingSpec::new(1, 2, 8);
        let dc1 = GradedDerivation::odd_partial(&ring, 0).unwrap();
        let dc2 = GradedDerivation::odd_partial(&ring, 1).unwrap();
        let d1 = GradedDerivation::even_partial(&ring, 0).unwrap();

        // [d/dc1, d/dc1] = 2 d/dc1 ∘ d/dc1 = 0
        assert!(dc1.superbracket(&dc1).unwrap().is_zero());

        // [d1, x1 d1] = d1
        let xd1 = d1.left_mul(&x(&ring, 0)).unwrap();
        assert_eq!(d1.superbracket(&xd1).unwrap(), d1);

        // [d/dc1, c1 d/dc2] = d/dc2 (odd-odd bracket is an anticommutator)
        let c1dc2 = dc2.left_mul(&c(&ring, 0)).unwrap();
        assert_eq!(dc1.superbracket(&c1dc2).unwrap(), dc2);
    }

    #[test]
    fn leibniz_spot_checks() {
        let ring = RingSpec::new(1, 2, 8);
        let dc1 = GradedDerivation::odd_partial(&ring, 0).unwrap();
        let d1 = GradedDerivation::even_partial(&ring, 0).unwrap();
        assert!(check_leibniz(&dc1, &c(&ring, 0), &c(&ring, 1)).unwrap());
        assert!(check_leibniz(&d1, &x(&ring, 0), &x(&ring, 0)).unwrap());
        // both sides vanish on c1, c1
        assert!(check_leibniz(&dc1, &c(&ring, 0), &c(&ring, 0)).unwrap());
    }

    #[test]
    fn parity_and_shift() {
        let ring = RingSpec::new(1, 1, 8);
        let dc1 = GradedDerivation::odd_partial(&ring, 0).unwrap();
        assert_eq!(dc1.z2_degree(), Some(true));
        assert_eq!(dc1.n_shift(), Some(-1));
        let d1 = GradedDerivation::even_partial(&ring, 0).unwrap();
        assert_eq!(d1.z2_degree(), Some(false));
        assert_eq!(d1.n_shift(), Some(-2));
        let mixed = dc1.add(&d1);
        assert_eq!(mixed.z2_degree(), None);
        assert_eq!(mixed.n_shift(), None);
        let (even, odd) = mixed.parity_parts();
        assert_eq!(even, d1);
        assert_eq!(odd, dc1);
    }
}
