//! PBW normal forms in U(g) and U(l_ℏ), and the coalgebra structure of U(g).
//!
//! Monomials are exponent vectors `x₁^{a₁}···x_M^{a_M}` in basis order.
//! Products are computed in the plain enveloping algebra and memoized per
//! generator; the ℏ-flavored algebra U(l_ℏ) differs only by one factor of ℏ
//! per bracket rewrite, which equals the drop in PBW degree, so its products
//! are read off from the plain ones.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::LieAlgebraPair;
use crate::poly::MultiIndex;
use crate::rational::{format_rational, parse_rational, Rational};
use crate::series::HbarSeries;

/// PBW monomial exponents.
pub type Pbw = MultiIndex;

/// Element of U(g) (no ℏ) in PBW normal form.
pub type PbwPoly = BTreeMap<Pbw, Rational>;

fn add_to(target: &mut PbwPoly, m: Pbw, c: Rational) {
    if c.is_zero() {
        return;
    }
    match target.entry(m) {
        std::collections::btree_map::Entry::Vacant(e) => {
            e.insert(c);
        }
        std::collections::btree_map::Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

/// `target += c · p`
pub fn pbw_axpy(target: &mut PbwPoly, c: &Rational, p: &PbwPoly) {
    for (m, v) in p {
        add_to(target, m.clone(), v * c);
    }
}

/// Which enveloping algebra an element lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Flavor {
    /// U(g): brackets as given.
    PlainU,
    /// U(l_ℏ): every bracket carries one factor of ℏ.
    HbarU,
}

/// Memoizing multiplier for the enveloping algebra of the span of the first
/// `dim` basis vectors (all of g, or l).
#[derive(Debug)]
pub struct UeaAlgebra {
    pair: Arc<LieAlgebraPair>,
    dim: usize,
    gen_cache: Mutex<HashMap<(usize, Pbw), Arc<PbwPoly>>>,
    mono_cache: Mutex<HashMap<(Pbw, Pbw), Arc<PbwPoly>>>,
}

impl UeaAlgebra {
    pub fn new(pair: Arc<LieAlgebraPair>, dim: usize) -> Self {
        assert!(dim <= pair.dim_g());
        UeaAlgebra {
            pair,
            dim,
            gen_cache: Mutex::default(),
            mono_cache: Mutex::default(),
        }
    }

    /// U(g).
    pub fn full(pair: Arc<LieAlgebraPair>) -> Self {
        let m = pair.dim_g();
        Self::new(pair, m)
    }

    /// U(l).
    pub fn sub(pair: Arc<LieAlgebraPair>) -> Self {
        let n = pair.dim_l();
        Self::new(pair, n)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pair(&self) -> &LieAlgebraPair {
        &self.pair
    }

    pub fn one(&self) -> Pbw {
        MultiIndex::zero(self.dim)
    }

    pub fn generator(&self, i: usize) -> Pbw {
        MultiIndex::unit(self.dim, i)
    }

    /// `xᵢ · x^m` in normal form.
    pub fn gen_mul(&self, i: usize, m: &Pbw) -> Arc<PbwPoly> {
        let key = (i, m.clone());
        if let Some(hit) = self.gen_cache.lock().unwrap().get(&key) {
            return hit.clone();
        }
        let first = m.as_slice().iter().position(|&e| e > 0);
        let result = match first {
            Some(j) if j < i => {
                // xᵢ·(xⱼ m') = xⱼ·(xᵢ m') + [xᵢ, xⱼ]·m'
                let mut rest = m.clone();
                rest = rest.checked_sub(&MultiIndex::unit(self.dim, j)).unwrap();
                let mut out = PbwPoly::new();
                let inner = self.gen_mul(i, &rest);
                for (mm, c) in inner.iter() {
                    pbw_axpy(&mut out, c, &self.gen_mul(j, mm));
                }
                for (k, c) in self.pair.bracket(i, j) {
                    pbw_axpy(&mut out, c, &self.gen_mul(*k, &rest));
                }
                out
            }
            _ => PbwPoly::from([(m.add_unit(i), Rational::one())]),
        };
        let result = Arc::new(result);
        self.gen_cache.lock().unwrap().insert(key, result.clone());
        result
    }

    /// Applies the generator word (left to right) to `p` from the left.
    fn apply_word(&self, word: &[usize], mut p: PbwPoly) -> PbwPoly {
        for &i in word.iter().rev() {
            let mut next = PbwPoly::new();
            for (m, c) in &p {
                pbw_axpy(&mut next, c, &self.gen_mul(i, m));
            }
            p = next;
        }
        p
    }

    /// The sorted generator word of a monomial.
    pub fn word_of(m: &Pbw) -> Vec<usize> {
        m.as_slice()
            .iter()
            .enumerate()
            .flat_map(|(i, &e)| std::iter::repeat_n(i, e as usize))
            .collect()
    }

    /// `x^a · x^b` in normal form.
    pub fn mono_mul(&self, a: &Pbw, b: &Pbw) -> Arc<PbwPoly> {
        if a.is_zero() || b.is_zero() {
            return Arc::new(PbwPoly::from([(a.add(b), Rational::one())]));
        }
        let key = (a.clone(), b.clone());
        if let Some(hit) = self.mono_cache.lock().unwrap().get(&key) {
            return hit.clone();
        }
        let result = Arc::new(self.apply_word(&Self::word_of(a), PbwPoly::from([(b.clone(), Rational::one())])));
        self.mono_cache.lock().unwrap().insert(key, result.clone());
        result
    }

    pub fn mul(&self, a: &PbwPoly, b: &PbwPoly) -> PbwPoly {
        let mut out = PbwPoly::new();
        for (ma, ca) in a {
            for (mb, cb) in b {
                pbw_axpy(&mut out, &(ca * cb), &self.mono_mul(ma, mb));
            }
        }
        out
    }

    /// Normal form of the product of the generators in `word` (plain).
    pub fn normalize_word_plain(&self, word: &[usize]) -> Result<PbwPoly> {
        if let Some(&bad) = word.iter().find(|&&i| i >= self.dim) {
            return Err(Error::IndexOutOfRange {
                index: bad,
                limit: self.dim,
                context: "PBW word".into(),
            });
        }
        Ok(self.apply_word(word, PbwPoly::from([(self.one(), Rational::one())])))
    }

    /// Normal form of a word in the requested flavor.
    pub fn normalize_word(&self, word: &[usize], flavor: Flavor, order: u32) -> Result<UeaElement> {
        if flavor == Flavor::HbarU && self.dim > self.pair.dim_l() {
            if let Some(&bad) = word.iter().find(|&&i| i >= self.pair.dim_l()) {
                return Err(Error::IndexOutOfRange {
                    index: bad,
                    limit: self.pair.dim_l(),
                    context: "U(l_ℏ) word".into(),
                });
            }
        }
        let plain = self.normalize_word_plain(word)?;
        Ok(UeaElement::from_plain(&plain, word.len() as u32, flavor, order))
    }

    /// `[xᵢ, u]`
    pub fn commutator_with_generator(&self, i: usize, u: &PbwPoly) -> PbwPoly {
        let g = PbwPoly::from([(self.generator(i), Rational::one())]);
        let mut out = self.mul(&g, u);
        let right = self.mul(u, &g);
        pbw_axpy(&mut out, &-Rational::one(), &right);
        out
    }

    /// Δ(x^a) = Σ_{b≤a} C(a,b) x^b ⊗ x^{a−b}; both legs are already sorted.
    pub fn coproduct(m: &Pbw) -> Vec<(Pbw, Pbw, Rational)> {
        m.divisors()
            .into_iter()
            .map(|b| {
                let rest = m.checked_sub(&b).unwrap();
                let c = m.binomial(&b);
                (b, rest, c)
            })
            .collect()
    }

    pub fn coproduct_poly(p: &PbwPoly) -> BTreeMap<(Pbw, Pbw), Rational> {
        let mut out = BTreeMap::new();
        for (m, c) in p {
            for (a, b, k) in Self::coproduct(m) {
                let e = out.entry((a, b)).or_insert_with(Rational::zero);
                *e += c * k;
            }
        }
        out.retain(|_, c: &mut Rational| !c.is_zero());
        out
    }

    pub fn counit(m: &Pbw) -> Rational {
        if m.is_zero() {
            Rational::one()
        } else {
            Rational::zero()
        }
    }
}

/// UEA element with ℏ-series coefficients, tagged with its flavor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UeaElement {
    pub flavor: Flavor,
    pub order: u32,
    pub terms: BTreeMap<Pbw, HbarSeries<Rational>>,
}

impl UeaElement {
    pub fn zero(flavor: Flavor, order: u32) -> Self {
        UeaElement {
            flavor,
            order,
            terms: BTreeMap::new(),
        }
    }

    /// Lifts a plain normal form whose inputs had total degree `degree`:
    /// in the ℏ flavor each monomial picks up ℏ^{degree − |m|}.
    pub fn from_plain(p: &PbwPoly, degree: u32, flavor: Flavor, order: u32) -> Self {
        let mut out = Self::zero(flavor, order);
        for (m, c) in p {
            let power = match flavor {
                Flavor::PlainU => 0,
                Flavor::HbarU => degree - m.degree(),
            };
            if power <= order {
                out.add_term(m.clone(), &HbarSeries::monomial(order, power, c.clone()));
            }
        }
        out
    }

    pub fn add_term(&mut self, m: Pbw, c: &HbarSeries<Rational>) {
        let entry = self
            .terms
            .entry(m.clone())
            .or_insert_with(|| HbarSeries::zero(self.order, &Rational::zero()));
        entry.add_assign_ref(c);
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn coeff(&self, m: &Pbw) -> HbarSeries<Rational> {
        self.terms
            .get(m)
            .cloned()
            .unwrap_or_else(|| HbarSeries::zero(self.order, &Rational::zero()))
    }

    /// ε: the coefficient of the empty monomial.
    pub fn counit(&self) -> HbarSeries<Rational> {
        self.terms
            .iter()
            .find(|(m, _)| m.is_zero())
            .map(|(_, c)| c.clone())
            .unwrap_or_else(|| HbarSeries::zero(self.order, &Rational::zero()))
    }

    /// Δ on a plain element: terms keyed by both legs.
    pub fn coproduct(&self) -> Result<BTreeMap<(Pbw, Pbw), HbarSeries<Rational>>> {
        if self.flavor != Flavor::PlainU {
            return Err(Error::Format(
                "coproduct is defined on the plain enveloping algebra".into(),
            ));
        }
        let mut out: BTreeMap<(Pbw, Pbw), HbarSeries<Rational>> = BTreeMap::new();
        for (m, c) in &self.terms {
            for (a, b, k) in UeaAlgebra::coproduct(m) {
                let e = out
                    .entry((a, b))
                    .or_insert_with(|| HbarSeries::zero(self.order, &Rational::zero()));
                e.add_assign_ref(&c.scale(&k));
            }
        }
        out.retain(|_, c| !c.is_zero());
        Ok(out)
    }

    pub fn display_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|(m, c)| format!("[{c}]·{}", pbw_display(m, names)))
            .collect::<Vec<_>>()
            .join(" + ")
    }

    pub fn to_file(&self) -> Vec<UeaTermFile> {
        self.terms
            .iter()
            .map(|(m, c)| UeaTermFile {
                exponents: m.as_slice().to_vec(),
                coeff: c.coeffs().iter().map(format_rational).collect(),
            })
            .collect()
    }

    pub fn from_file(terms: &[UeaTermFile], flavor: Flavor, order: u32) -> Result<Self> {
        let mut out = Self::zero(flavor, order);
        for t in terms {
            let mut coeffs = vec![Rational::zero(); order as usize + 1];
            for (p, s) in t.coeff.iter().enumerate() {
                let v = parse_rational(s)?;
                if p <= order as usize {
                    coeffs[p] = v;
                }
            }
            out.add_term(MultiIndex::from_slice(&t.exponents), &HbarSeries::from_coeffs(coeffs));
        }
        Ok(out)
    }
}

/// Serialized UEA term: exponents and the ℏ-series of its coefficient.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct UeaTermFile {
    pub exponents: Vec<u32>,
    pub coeff: Vec<String>,
}

/// `e^2·f`-style rendering; `1` for the empty monomial.
pub fn pbw_display(m: &Pbw, names: &[String]) -> String {
    let parts: Vec<String> = m
        .as_slice()
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(i, &e)| {
            let n = names.get(i).cloned().unwrap_or_else(|| format!("x{}", i + 1));
            if e == 1 {
                n
            } else {
                format!("{n}^{e}")
            }
        })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("·")
    }
}
