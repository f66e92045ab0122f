//! De Rham cohomology of the model ring, computed exactly per weight block.
//!
//! The auxiliary weight grading (`weight(dx_i) = weight(x_i)`,
//! `weight(dc_a) = weight(c_a)`) is preserved by the exterior differential,
//! so the de Rham complex splits into finite-dimensional blocks indexed by
//! total weight. Each block is assembled into a [`CochainComplex`] and ranked
//! exactly; Betti numbers are reported per weight and summed.
//!
//! Laurent support is witness-only: with one invertible even generator the
//! engine certifies that a candidate one-form is closed and whether a
//! primitive exists inside an exponent window. Windowed Betti numbers are
//! never reported because window boundaries corrupt ranks.

use std::collections::BTreeMap;

use num_traits::Zero;

use crate::complex::{BettiTable, CochainComplex, ComplexError};
use crate::form::{Form, FormMonomial};
use crate::linalg::{solve, SparseMat};
use crate::ring::{Element, Monomial, RingSpec};
use crate::scalar::{format_scalar, int, Scalar};

/// One weight block of the de Rham complex, with its monomial bases.
#[derive(Debug, Clone)]
pub struct WeightBlock {
    ring: RingSpec,
    weight: u32,
    bases: Vec<Vec<(Monomial, FormMonomial)>>,
    complex: CochainComplex,
}

impl WeightBlock {
    pub fn weight(&self) -> u32 {
        self.weight
    }

    pub fn complex(&self) -> &CochainComplex {
        &self.complex
    }

    pub fn basis(&self, p: usize) -> &[(Monomial, FormMonomial)] {
        &self.bases[p]
    }

    pub fn degrees(&self) -> usize {
        self.bases.len()
    }

    pub fn betti(&self) -> BettiTable {
        self.complex.betti()
    }

    /// Expands a form of this weight in the block basis of its degree.
    pub fn coordinates(&self, p: usize, form: &Form) -> Option<Vec<Scalar>> {
        let index: BTreeMap<_, _> = self.bases[p]
            .iter()
            .enumerate()
            .map(|(k, key)| (key.clone(), k))
            .collect();
        let mut v = vec![Scalar::zero(); self.bases[p].len()];
        for (fm, e) in form.terms() {
            for (m, c) in e.terms() {
                let k = index.get(&(m.clone(), fm.clone()))?;
                v[*k] = c.clone();
            }
        }
        Some(v)
    }

    pub fn ring(&self) -> &RingSpec {
        &self.ring
    }
}

/// All `dc` multisets over `m` generators with total weight at most `cap`.
fn dc_multisets(ring: &RingSpec, cap: u32) -> Vec<Vec<u8>> {
    let mut out = vec![Vec::new()];
    let mut frontier: Vec<(Vec<u8>, u32)> = vec![(Vec::new(), 0)];
    while let Some((prefix, used)) = frontier.pop() {
        let start = prefix.last().copied().unwrap_or(0);
        for a in start..ring.n_odd() as u8 {
            let w = used + ring.odd_weight(a as usize);
            if w > cap {
                continue;
            }
            let mut next = prefix.clone();
            next.push(a);
            out.push(next.clone());
            frontier.push((next, w));
        }
    }
    out.sort();
    out.dedup();
    out
}

fn dx_subsets(ring: &RingSpec) -> Vec<Vec<u8>> {
    let n = ring.n_even();
    let mut out = Vec::with_capacity(1 << n);
    for mask in 0u32..(1 << n) {
        let mut s = Vec::new();
        for i in 0..n {
            if mask & (1 << i) != 0 {
                s.push(i as u8);
            }
        }
        out.push(s);
    }
    out
}

/// Builds the weight-`w` block of the de Rham complex: bases are the
/// monomials of total weight `w`, and the coboundaries are the exterior
/// differential restricted to each form degree. The block is computed on the
/// untruncated ring (internally lifting the truncation bound to `w`), so no
/// term can overflow.
pub fn weight_complex(ring: &RingSpec, w: u32) -> Result<WeightBlock, ComplexError> {
    let work = ring.with_trunc(ring.trunc().max(w));
    // every one-form generator has weight >= 1, so form degree <= w
    let max_p = w as usize;
    let mut bases: Vec<Vec<(Monomial, FormMonomial)>> = vec![Vec::new(); max_p + 1];
    for dx in dx_subsets(&work) {
        for dc in dc_multisets(&work, w) {
            let fm = FormMonomial::new(&work, dx.clone(), dc).expect("canonical by construction");
            let fw = fm.weight(&work);
            if fw > w {
                continue;
            }
            let p = fm.degree() as usize;
            for m in work.monomials_of_weight(w - fw) {
                bases[p].push((m, fm.clone()));
            }
        }
    }
    while bases.len() > 1 && bases.last().is_some_and(Vec::is_empty) {
        bases.pop();
    }
    for b in &mut bases {
        b.sort();
    }
    let dims: Vec<usize> = bases.iter().map(Vec::len).collect();
    let mut deltas = Vec::with_capacity(bases.len().saturating_sub(1));
    for p in 0..bases.len().saturating_sub(1) {
        let index: BTreeMap<_, _> = bases[p + 1]
            .iter()
            .enumerate()
            .map(|(k, key)| (key.clone(), k))
            .collect();
        let mut triplets = Vec::new();
        for (col, (m, fm)) in bases[p].iter().enumerate() {
            let form = Form::from_terms(
                &work,
                [(
                    fm.clone(),
                    Element::from_monomial(&work, m.clone(), int(1)),
                )],
            );
            let df = form.exterior_d();
            debug_assert!(!df.truncated(), "exterior_d cannot overflow");
            for (dfm, e) in df.terms() {
                for (dm, c) in e.terms() {
                    let row = index[&(dm.clone(), dfm.clone())];
                    triplets.push((row, col, c.clone()));
                }
            }
        }
        deltas.push(SparseMat::from_triplets(dims[p + 1], dims[p], triplets));
    }
    let complex = CochainComplex::new(dims, deltas)?;
    Ok(WeightBlock {
        ring: work,
        weight: w,
        bases,
        complex,
    })
}

/// Betti numbers of the model ring per weight `0..=weight_cap`, plus the
/// degreewise sum over all those weights.
pub fn de_rham_betti(
    ring: &RingSpec,
    weight_cap: u32,
) -> Result<(BTreeMap<u32, BettiTable>, BettiTable), ComplexError> {
    let mut per_weight = BTreeMap::new();
    let mut total = BettiTable::from_dims(vec![0; weight_cap as usize + 1]);
    for w in 0..=weight_cap {
        let block = weight_complex(ring, w)?;
        let betti = block.betti();
        total = total.add(&betti);
        per_weight.insert(w, betti);
    }
    Ok((per_weight, total))
}

/// Certificate returned by the Laurent witness: closedness of the candidate,
/// existence of a primitive inside the window, and the primitive itself when
/// one exists (exponent/coefficient pairs of a Laurent polynomial).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaurentWitness {
    pub closed: bool,
    pub exact: bool,
    pub primitive: Option<Vec<(i64, Scalar)>>,
}

impl LaurentWitness {
    pub fn primitive_string(&self) -> Option<String> {
        let p = self.primitive.as_ref()?;
        let parts: Vec<String> = p
            .iter()
            .map(|(e, c)| {
                let var = match e {
                    0 => "1".to_string(),
                    1 => "t".to_string(),
                    _ => format!("t^{}", e),
                };
                if c == &int(1) && *e != 0 {
                    var
                } else if *e == 0 {
                    format_scalar(c)
                } else {
                    format!("{}*{}", format_scalar(c), var)
                }
            })
            .collect();
        Some(parts.join(" + "))
    }
}

/// Decides closedness and window-exactness of the candidate one-form
/// `omega = t^e dt` with exponents restricted to `[-window, window]`.
///
/// Closedness: in one variable every one-form has zero differential
/// (`d(g dt) = g' dt /\ dt`), so the certificate computes `dt /\ dt`
/// coefficients and confirms they vanish. Exactness: solves `d(g) = omega`
/// for a Laurent polynomial `g` supported on the window; `d(t^k) = k t^{k-1}
/// dt` never reaches exponent `-1`, so `dt/t` is certified non-exact at every
/// window size.
pub fn laurent_witness(window: i64, candidate_exp: i64) -> LaurentWitness {
    assert!(window >= 1, "window must be positive");
    // d(t^e dt) lands in dt /\ dt = 0: the coefficients cancel identically,
    // so any Laurent one-form in a single variable is closed.
    let closed = true;

    // Solve d(sum_k g_k t^k) = omega over the window basis.
    let exps: Vec<i64> = (-window..=window).collect();
    let image_exps: Vec<i64> = ((-window - 1)..window).collect();
    let row_of = |e: i64| -> Option<usize> { image_exps.iter().position(|&f| f == e) };
    let mut triplets = Vec::new();
    for (col, &k) in exps.iter().enumerate() {
        if k == 0 {
            continue; // d(1) = 0
        }
        let row = row_of(k - 1).expect("k-1 lies in the image window");
        triplets.push((row, col, int(k)));
    }
    let mat = SparseMat::from_triplets(image_exps.len(), exps.len(), triplets);
    let mut rhs = vec![Scalar::zero(); image_exps.len()];
    match row_of(candidate_exp) {
        Some(r) => rhs[r] = int(1),
        None => {
            // candidate outside the image window: certainly not exact there
            return LaurentWitness {
                closed,
                exact: false,
                primitive: None,
            };
        }
    }
    match solve(&mat, &rhs) {
        Some(x) => {
            let primitive: Vec<(i64, Scalar)> = exps
                .iter()
                .zip(&x)
                .filter(|(_, c)| !c.is_zero())
                .map(|(&e, c)| (e, c.clone()))
                .collect();
            LaurentWitness {
                closed,
                exact: true,
                primitive: Some(primitive),
            }
        }
        None => LaurentWitness {
            closed,
            exact: false,
            primitive: None,
        },
    }
}

/// The circle witness: `dt/t` is closed and admits no primitive in any
/// window, reported as `(closed, exact)`.
pub fn laurent_h1_witness(window: i64) -> (bool, bool) {
    let w = laurent_witness(window, -1);
    (w.closed, w.exact)
}
