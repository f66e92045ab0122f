//! Property tests for the algebraic laws: graded commutativity and
//! associativity, grading additivity, body/soul, superbracket identities,
//! form calculus laws, and operator-order consistency.

use gradecalc_core::derivation::{check_leibniz, GradedDerivation};
use gradecalc_core::diffop::OpAlgebra;
use gradecalc_core::form::Form;
use gradecalc_core::ring::{Element, Monomial, RingSpec};
use gradecalc_core::scalar::{int, Scalar};

use num_traits::Zero;
use proptest::prelude::*;

const N_EVEN: usize = 2;
const N_ODD: usize = 2;

fn ring() -> RingSpec {
    // truncation bound high enough that degree-bounded random inputs never
    // overflow in the products below
    RingSpec::new(N_EVEN, N_ODD, 24)
}

fn arb_scalar() -> impl Strategy<Value = Scalar> {
    (-6i64..=6, 1i64..=4).prop_map(|(n, d)| Scalar::new(n.into(), d.into()))
}

fn arb_monomial() -> impl Strategy<Value = Monomial> {
    (
        proptest::collection::vec(0u32..=2, N_EVEN),
        proptest::collection::vec(any::<bool>(), N_ODD),
    )
        .prop_map(|(exps, odd_flags)| {
            let odd: Vec<u8> = odd_flags
                .iter()
                .enumerate()
                .filter(|(_, &f)| f)
                .map(|(i, _)| i as u8)
                .collect();
            Monomial::new(&ring(), exps, odd).expect("valid monomial")
        })
}

fn arb_element() -> impl Strategy<Value = Element> {
    proptest::collection::vec((arb_monomial(), arb_scalar()), 0..4)
        .prop_map(|terms| Element::from_terms(&ring(), terms))
}

fn arb_derivation() -> impl Strategy<Value = GradedDerivation> {
    (
        proptest::collection::vec(arb_element(), N_EVEN),
        proptest::collection::vec(arb_element(), N_ODD),
    )
        .prop_map(|(even, odd)| GradedDerivation::new(&ring(), even, odd).expect("valid"))
}

/// Homogeneous derivation of the requested parity.
fn arb_homogeneous_derivation(parity: bool) -> impl Strategy<Value = GradedDerivation> {
    arb_derivation().prop_map(move |u| {
        let (even, odd) = u.parity_parts();
        if parity {
            odd
        } else {
            even
        }
    })
}

fn arb_form() -> impl Strategy<Value = Form> {
    let one_form = prop_oneof![
        (0..N_EVEN).prop_map(|i| Form::dx(&ring(), i).unwrap()),
        (0..N_ODD).prop_map(|a| Form::dc(&ring(), a).unwrap()),
    ];
    (
        arb_element(),
        proptest::collection::vec(one_form, 0..3),
    )
        .prop_map(|(coeff, gens)| {
            let mut f = Form::from_element(&coeff);
            for g in gens {
                f = f.wedge(&g).expect("same ring");
            }
            f
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn gmul_is_associative(a in arb_element(), b in arb_element(), c in arb_element()) {
        let ab_c = a.gmul(&b).unwrap().gmul(&c).unwrap();
        let a_bc = a.gmul(&b.gmul(&c).unwrap()).unwrap();
        prop_assert!(!ab_c.truncated() && !a_bc.truncated(), "inputs must stay in bound");
        prop_assert_eq!(ab_c, a_bc);
    }

    #[test]
    fn gmul_is_distributive(a in arb_element(), b in arb_element(), c in arb_element()) {
        let lhs = a.gmul(&b.add(&c)).unwrap();
        let rhs = a.gmul(&b).unwrap().add(&a.gmul(&c).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn graded_commutativity(pa in any::<bool>(), pb in any::<bool>(),
                            a in arb_element(), b in arb_element()) {
        let (ae, ao) = a.z2_grade();
        let (be, bo) = b.z2_grade();
        let a = if pa { ao } else { ae };
        let b = if pb { bo } else { be };
        let ab = a.gmul(&b).unwrap();
        let ba = b.gmul(&a).unwrap();
        let expect = if pa && pb { ba.neg() } else { ba };
        prop_assert_eq!(ab, expect);
    }

    #[test]
    fn grade_parts_multiply_additively(a in arb_element(), b in arb_element()) {
        let ab = a.gmul(&b).unwrap();
        let ga = a.grade();
        let gb = b.grade();
        for (k, part) in ab.grade() {
            let mut acc = Element::zero(&ring());
            for (i, pa) in &ga {
                for (j, pb) in &gb {
                    if i + j == k {
                        acc = acc.add(&pa.gmul(pb).unwrap());
                    }
                }
            }
            prop_assert_eq!(part, acc);
        }
    }

    #[test]
    fn body_is_ring_homomorphism(a in arb_element(), b in arb_element()) {
        let ab = a.gmul(&b).unwrap();
        prop_assert_eq!(ab.body(), a.body() * b.body());
        prop_assert_eq!(a.add(&b).body(), a.body() + b.body());
        // a = body + soul
        prop_assert_eq!(Element::scalar(&ring(), a.body()).add(&a.soul()), a);
    }

    #[test]
    fn superbracket_is_antisymmetric(pu in any::<bool>(), pv in any::<bool>(),
                                     u in arb_derivation(), v in arb_derivation()) {
        let (u0, u1) = u.parity_parts();
        let (v0, v1) = v.parity_parts();
        let u = if pu { u1 } else { u0 };
        let v = if pv { v1 } else { v0 };
        let uv = u.superbracket(&v).unwrap();
        let vu = v.superbracket(&u).unwrap();
        let expect = if pu && pv { vu } else { vu.neg() };
        prop_assert_eq!(uv, expect);
    }

    #[test]
    fn superbracket_result_is_a_derivation(u in arb_homogeneous_derivation(true),
                                           v in arb_homogeneous_derivation(false),
                                           a in arb_element(), b in arb_element()) {
        let w = u.superbracket(&v).unwrap();
        if w.z2_degree().is_some() {
            prop_assert!(check_leibniz(&w, &a, &b).unwrap());
        }
    }

    #[test]
    fn leibniz_holds_for_homogeneous_derivations(p in any::<bool>(),
                                                 u in arb_derivation(),
                                                 a in arb_element(),
                                                 b in arb_element()) {
        let (u0, u1) = u.parity_parts();
        let u = if p { u1 } else { u0 };
        prop_assert!(check_leibniz(&u, &a, &b).unwrap());
    }

    #[test]
    fn d_squares_to_zero(f in arb_form()) {
        let ddf = f.exterior_d().exterior_d();
        prop_assert!(ddf.is_zero(), "d^2 != 0 on {}", f);
    }

    #[test]
    fn wedge_is_associative(f in arb_form(), g in arb_form(), h in arb_form()) {
        let fg_h = f.wedge(&g).unwrap().wedge(&h).unwrap();
        let f_gh = f.wedge(&g.wedge(&h).unwrap()).unwrap();
        prop_assert!(!fg_h.truncated() && !f_gh.truncated());
        prop_assert_eq!(fg_h, f_gh);
    }

    #[test]
    fn wedge_bigraded_commutativity(f in arb_form(), g in arb_form()) {
        // phi /\ psi = (-1)^{|phi||psi| + [phi][psi]} psi /\ phi for
        // bihomogeneous parts
        for ((df, wf), fp) in f.bigraded_parts() {
            let _ = wf;
            for ((dg, wg), gp) in g.bigraded_parts() {
                let _ = wg;
                let (Some(zf), Some(zg)) = (fp.z2_degree(), gp.z2_degree()) else {
                    continue;
                };
                let fg = fp.wedge(&gp).unwrap();
                let gf = gp.wedge(&fp).unwrap();
                let parity = (df * dg) % 2 == 1;
                let sign = parity ^ (zf && zg);
                prop_assert_eq!(fg, if sign { gf.neg() } else { gf });
            }
        }
    }

    #[test]
    fn d_satisfies_graded_leibniz(f in arb_form(), g in arb_form()) {
        // d(phi /\ psi) = d(phi) /\ psi + (-1)^{|phi|} phi /\ d(psi) per
        // form-degree part of phi
        let fg = f.wedge(&g).unwrap();
        let lhs = fg.exterior_d();
        let mut rhs = Form::zero(&ring());
        for ((deg, _), part) in f.bigraded_parts() {
            let t1 = part.exterior_d().wedge(&g).unwrap();
            let t2 = part.wedge(&g.exterior_d()).unwrap();
            rhs = rhs.add(&t1).add(&if deg % 2 == 1 { t2.neg() } else { t2 });
        }
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn interior_rule_and_lie_derivative(p in any::<bool>(),
                                        u in arb_derivation(),
                                        f in arb_form(), g in arb_form()) {
        let (u0, u1) = u.parity_parts();
        let u = if p { u1 } else { u0 };
        let pu = u.z2_degree().unwrap();
        // interior product rule on bihomogeneous left factors
        for ((deg, _), part) in f.bigraded_parts() {
            let Some(zf) = part.z2_degree() else { continue };
            let lhs = part.wedge(&g).unwrap().interior(&u).unwrap();
            let t1 = part.interior(&u).unwrap().wedge(&g).unwrap();
            let t2 = part.wedge(&g.interior(&u).unwrap()).unwrap();
            let sign = (deg % 2 == 1) ^ (zf && pu);
            let rhs = t1.add(&if sign { t2.neg() } else { t2 });
            prop_assert_eq!(lhs, rhs);
        }
        // Lie derivative is a derivation:
        // L_u(phi /\ psi) = L_u(phi) /\ psi + (-1)^{[u][phi]} phi /\ L_u(psi)
        for ((_, _), part) in f.bigraded_parts() {
            let Some(zf) = part.z2_degree() else { continue };
            let lhs = part.wedge(&g).unwrap().lie_derivative(&u).unwrap();
            let t1 = part.lie_derivative(&u).unwrap().wedge(&g).unwrap();
            let t2 = part.wedge(&g.lie_derivative(&u).unwrap()).unwrap();
            let rhs = t1.add(&if pu && zf { t2.neg() } else { t2 });
            prop_assert_eq!(lhs, rhs);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn apply_agrees_with_matrix_composition(u in arb_derivation(), v in arb_derivation()) {
        // operator matrices compose like the symbolic applications
        let r = RingSpec::new(N_EVEN, N_ODD, 6);
        let alg = OpAlgebra::new(&r);
        let rebase = |w: &GradedDerivation| {
            GradedDerivation::new(
                &r,
                (0..N_EVEN).map(|i| rebase_element(&r, w.even_coeff(i))).collect(),
                (0..N_ODD).map(|a| rebase_element(&r, w.odd_coeff(a))).collect(),
            )
            .unwrap()
        };
        let (u, v) = (rebase(&u), rebase(&v));
        let ou = alg.derivation(&u).unwrap();
        let ov = alg.derivation(&v).unwrap();
        let composed = ou.compose(&ov);
        for m in alg.monomials() {
            if m.even_degree() > composed.certified_degree() {
                continue;
            }
            let e = Element::from_monomial(&r, m.clone(), int(1));
            let direct = u.apply(&v.apply(&e).unwrap()).unwrap();
            let via_matrix = alg.from_vector(&composed.matrix().apply(&alg.to_vector(&e)));
            prop_assert_eq!(direct, via_matrix);
        }
    }
}

fn rebase_element(r: &RingSpec, e: &Element) -> Element {
    Element::from_terms(
        r,
        e.terms().map(|(m, c)| {
            (
                Monomial::new(r, m.even_exp().to_vec(), m.odd_set().to_vec()).unwrap(),
                c.clone(),
            )
        }),
    )
}

#[test]
fn soul_is_nilpotent_in_the_grassmann_factor() {
    // with no even generators the soul is nilpotent of index <= n_odd + 1
    let r = RingSpec::new(0, 3, 4);
    let c = |a: usize| Element::odd_gen(&r, a).unwrap();
    let a = Element::scalar(&r, int(5))
        .add(&c(0))
        .add(&c(1).gmul(&c(2)).unwrap());
    let soul = a.soul();
    let mut power = Element::one(&r);
    for _ in 0..=r.n_odd() {
        power = power.gmul(&soul).unwrap();
    }
    assert!(power.is_zero());
    assert!(!soul.gmul(&soul).unwrap().is_zero());
}

#[test]
fn jacobi_identity_on_sample_triples() {
    // (-1)^{[u][w]} [u,[v,w]] + (-1)^{[v][u]} [v,[w,u]] + (-1)^{[w][v]} [w,[u,v]] = 0
    let r = ring();
    let x1 = Element::even_gen(&r, 0).unwrap();
    let c1 = Element::odd_gen(&r, 0).unwrap();
    let c2 = Element::odd_gen(&r, 1).unwrap();
    let d1 = GradedDerivation::even_partial(&r, 0).unwrap();
    let dc1 = GradedDerivation::odd_partial(&r, 0).unwrap();
    let dc2 = GradedDerivation::odd_partial(&r, 1).unwrap();
    let us = [
        d1.left_mul(&x1).unwrap(),
        dc1.left_mul(&c2).unwrap(),
        dc2.clone(),
        d1.left_mul(&c1.gmul(&c2).unwrap()).unwrap(),
        dc1.clone(),
    ];
    for u in &us {
        for v in &us {
            for w in &us {
                let (Some(pu), Some(pv), Some(pw)) =
                    (u.z2_degree(), v.z2_degree(), w.z2_degree())
                else {
                    continue;
                };
                let t1 = u.superbracket(&v.superbracket(w).unwrap()).unwrap();
                let t2 = v.superbracket(&w.superbracket(u).unwrap()).unwrap();
                let t3 = w.superbracket(&u.superbracket(v).unwrap()).unwrap();
                let s1 = pu && pw;
                let s2 = pv && pu;
                let s3 = pw && pv;
                let total = apply_sign(&t1, s1)
                    .add(&apply_sign(&t2, s2))
                    .add(&apply_sign(&t3, s3));
                assert!(total.is_zero(), "graded Jacobi identity failed");
            }
        }
    }
}

fn apply_sign(u: &GradedDerivation, negate: bool) -> GradedDerivation {
    if negate {
        u.neg()
    } else {
        u.clone()
    }
}

#[test]
fn values_are_send_and_sync() {
    fn check<T: Send + Sync>() {}
    check::<RingSpec>();
    check::<Element>();
    check::<GradedDerivation>();
    check::<Form>();
    check::<gradecalc_core::complex::CochainComplex>();
    check::<gradecalc_core::diffop::LinearOperator>();
}

#[test]
fn zero_element_edge_cases() {
    let r = ring();
    let zero = Element::zero(&r);
    assert!(zero.grade().is_empty());
    assert_eq!(zero.body(), Scalar::zero());
    assert!(zero.soul().is_zero());
    assert_eq!(zero.z2_degree(), Some(false));
    assert_eq!(zero.n_degree(), None);
}
