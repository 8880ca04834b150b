//! Differential operators on l* with polynomial or jet coefficients, and
//! bidifferential operators representing star products.
//!
//! A [`DiffOp`] is stored normal-ordered, `Σ_α p_α ∂^α` with coefficients to
//! the left. A [`BiDiffOp`] is `Σ c_{αβ} ∂^α ⊗ ∂^β`, acting on a pair of
//! functions by `(f, g) ↦ Σ c_{αβ} (∂^α f)(∂^β g)`.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::context::Context;
use crate::error::{Error, Result};
use crate::io::{poly_from_terms, poly_to_terms, PolyTerm};
use crate::poly::{CoeffRing, MultiIndex, Poly};
use crate::rational::Rational;
use crate::series::HbarSeries;

fn series_derivative(s: &HbarSeries<Poly>, alpha: &MultiIndex) -> HbarSeries<Poly> {
    if alpha.is_zero() {
        return s.clone();
    }
    s.map(|c| c.derivative(alpha))
}

fn add_into<K: Ord + Clone>(map: &mut BTreeMap<K, HbarSeries<Poly>>, key: K, value: &HbarSeries<Poly>) {
    if value.is_zero() {
        return;
    }
    match map.get_mut(&key) {
        Some(existing) => {
            existing.add_assign_ref(value);
            if existing.is_zero() {
                map.remove(&key);
            }
        }
        None => {
            map.insert(key, value.clone());
        }
    }
}

/// `Σ_α p_α(λ) ∂^α`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiffOp {
    ring: CoeffRing,
    order: u32,
    terms: BTreeMap<MultiIndex, HbarSeries<Poly>>,
}

impl DiffOp {
    pub fn zero(ring: &CoeffRing, order: u32) -> Self {
        DiffOp {
            ring: ring.clone(),
            order,
            terms: BTreeMap::new(),
        }
    }

    pub fn identity(ring: &CoeffRing, order: u32) -> Self {
        Self::multiplication(ring, &HbarSeries::constant(order, ring.one()))
    }

    /// Multiplication by `p`.
    pub fn multiplication(ring: &CoeffRing, p: &HbarSeries<Poly>) -> Self {
        let mut out = Self::zero(ring, p.order());
        out.add_term(MultiIndex::zero(ring.nvars), p);
        out
    }

    /// `∂^α`
    pub fn derivative(ring: &CoeffRing, order: u32, alpha: MultiIndex) -> Self {
        let mut out = Self::zero(ring, order);
        out.add_term(alpha, &HbarSeries::constant(order, ring.one()));
        out
    }

    pub fn ring(&self) -> &CoeffRing {
        &self.ring
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn terms(&self) -> &BTreeMap<MultiIndex, HbarSeries<Poly>> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `p ∂^α`.
    pub fn add_term(&mut self, alpha: MultiIndex, p: &HbarSeries<Poly>) {
        add_into(&mut self.terms, alpha, p);
    }

    pub fn add(&self, other: &DiffOp) -> DiffOp {
        let mut out = self.clone();
        for (a, p) in &other.terms {
            out.add_term(a.clone(), p);
        }
        out
    }

    pub fn sub(&self, other: &DiffOp) -> DiffOp {
        self.add(&other.scale(&-Rational::from_integer(1.into())))
    }

    pub fn scale(&self, c: &Rational) -> DiffOp {
        let mut out = Self::zero(&self.ring, self.order);
        for (a, p) in &self.terms {
            out.add_term(a.clone(), &p.scale(c));
        }
        out
    }

    /// `Σ p_α ∂^α f`
    pub fn apply(&self, f: &HbarSeries<Poly>) -> HbarSeries<Poly> {
        let mut out = HbarSeries::zero(self.order, &self.ring.zero());
        for (alpha, p) in &self.terms {
            let df = series_derivative(f, alpha);
            if !df.is_zero() {
                out.add_assign_ref(&p.mul(&df));
            }
        }
        out
    }

    /// `self ∘ other`, normal-ordered by Leibniz:
    /// `(p∂^α)∘(q∂^β) = Σ_{γ≤α} C(α,γ) p(∂^γ q) ∂^{α−γ+β}`.
    pub fn compose(&self, other: &DiffOp) -> DiffOp {
        let mut out = Self::zero(&self.ring, self.order);
        for (alpha, p) in &self.terms {
            for gamma in alpha.divisors() {
                let rest = alpha.checked_sub(&gamma).unwrap();
                let binom = alpha.binomial(&gamma);
                for (beta, q) in &other.terms {
                    let dq = series_derivative(q, &gamma);
                    if dq.is_zero() {
                        continue;
                    }
                    out.add_term(rest.add(beta), &p.mul(&dq).scale(&binom));
                }
            }
        }
        out
    }

    /// Coefficients evaluated in another coefficient ring.
    pub fn embed(&self, ring: &CoeffRing) -> Result<DiffOp> {
        let mut out = Self::zero(ring, self.order);
        for (a, p) in &self.terms {
            let coeffs = p.coeffs().iter().map(|c| ring.embed(c)).collect::<Result<Vec<_>>>()?;
            out.add_term(a.clone(), &HbarSeries::from_coeffs(coeffs));
        }
        Ok(out)
    }
}

/// `Σ c_{αβ}(λ) ∂^α ⊗ ∂^β`
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiDiffOp {
    ring: CoeffRing,
    order: u32,
    terms: BTreeMap<(MultiIndex, MultiIndex), HbarSeries<Poly>>,
}

impl BiDiffOp {
    pub fn zero(ring: &CoeffRing, order: u32) -> Self {
        BiDiffOp {
            ring: ring.clone(),
            order,
            terms: BTreeMap::new(),
        }
    }

    pub fn ring(&self) -> &CoeffRing {
        &self.ring
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn terms(&self) -> &BTreeMap<(MultiIndex, MultiIndex), HbarSeries<Poly>> {
        &self.terms
    }

    pub fn add_term(&mut self, alpha: MultiIndex, beta: MultiIndex, c: &HbarSeries<Poly>) {
        add_into(&mut self.terms, (alpha, beta), c);
    }

    pub fn coeff(&self, alpha: &MultiIndex, beta: &MultiIndex) -> Option<&HbarSeries<Poly>> {
        self.terms.get(&(alpha.clone(), beta.clone()))
    }

    /// `(f, g) ↦ Σ c_{αβ} (∂^α f)(∂^β g)`
    pub fn apply(&self, f: &HbarSeries<Poly>, g: &HbarSeries<Poly>) -> Result<HbarSeries<Poly>> {
        let mut out = HbarSeries::zero(self.order, &self.ring.zero());
        let mut df_cache: BTreeMap<&MultiIndex, HbarSeries<Poly>> = BTreeMap::new();
        let mut dg_cache: BTreeMap<&MultiIndex, HbarSeries<Poly>> = BTreeMap::new();
        for ((alpha, beta), c) in &self.terms {
            let df = df_cache.entry(alpha).or_insert_with(|| series_derivative(f, alpha));
            if df.is_zero() {
                continue;
            }
            let dg = dg_cache.entry(beta).or_insert_with(|| series_derivative(g, beta));
            if dg.is_zero() {
                continue;
            }
            out.add_assign_ref(&c.mul(df).mul(dg));
        }
        Ok(out)
    }

    /// The left multiplication operator `g ↦ T(f, g)`.
    pub fn left_operator(&self, f: &HbarSeries<Poly>) -> DiffOp {
        let mut out = DiffOp::zero(&self.ring, self.order);
        for ((alpha, beta), c) in &self.terms {
            let df = series_derivative(f, alpha);
            if !df.is_zero() {
                out.add_term(beta.clone(), &c.mul(&df));
            }
        }
        out
    }

    pub fn embed(&self, ring: &CoeffRing) -> Result<BiDiffOp> {
        let mut out = Self::zero(ring, self.order);
        for ((a, b), c) in &self.terms {
            let coeffs = c.coeffs().iter().map(|x| ring.embed(x)).collect::<Result<Vec<_>>>()?;
            out.add_term(a.clone(), b.clone(), &HbarSeries::from_coeffs(coeffs));
        }
        Ok(out)
    }

    pub fn to_file(&self) -> Vec<BiDiffTermFile> {
        self.terms
            .iter()
            .map(|((a, b), c)| BiDiffTermFile {
                alpha: a.as_slice().to_vec(),
                beta: b.as_slice().to_vec(),
                coeff: series_to_file(c),
            })
            .collect()
    }
}

/// Serialized ℏ-series of polynomials: ℏ-power → polyTerms, zero slots
/// omitted.
pub type SeriesFile = BTreeMap<u32, Vec<PolyTerm>>;

pub fn series_to_file(s: &HbarSeries<Poly>) -> SeriesFile {
    s.coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(p, c)| (p as u32, poly_to_terms(c)))
        .collect()
}

pub fn series_from_file(f: &SeriesFile, ring: &CoeffRing, order: u32) -> Result<HbarSeries<Poly>> {
    let mut out = HbarSeries::zero(order, &ring.zero());
    for (p, terms) in f {
        if *p > order {
            continue;
        }
        let exact = poly_from_terms(terms, ring.nvars)?;
        *out.coeff_mut(*p) = ring.embed(&exact)?;
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct BiDiffTermFile {
    pub alpha: Vec<u32>,
    pub beta: Vec<u32>,
    pub coeff: SeriesFile,
}

/// Recovers the bidifferential operator of a star product given on
/// monomial pairs, by triangular peeling over pairs with `|α|, |β| ≤ K`,
/// then checks it on every monomial pair with `|α|, |β| ≤ verify_degree`.
pub fn extract_bidiffop(
    nvars: usize,
    order: u32,
    verify_degree: u32,
    star: impl Fn(&MultiIndex, &MultiIndex) -> Result<HbarSeries<Poly>>,
) -> Result<BiDiffOp> {
    let ring = CoeffRing::exact(nvars);
    let mut op = BiDiffOp::zero(&ring, order);
    let monos = MultiIndex::all_up_to_degree(nvars, order);
    let mut pairs: Vec<(&MultiIndex, &MultiIndex)> =
        monos.iter().flat_map(|a| monos.iter().map(move |b| (a, b))).collect();
    pairs.sort_by_key(|(a, b)| a.degree() + b.degree());
    for (alpha, beta) in pairs {
        let lam_a = ring.monomial(alpha, Rational::from_integer(1.into()));
        let lam_b = ring.monomial(beta, Rational::from_integer(1.into()));
        let mut residual = star(alpha, beta)?;
        for sigma in alpha.divisors() {
            let da = lam_a.derivative(&sigma);
            for tau in beta.divisors() {
                if &sigma == alpha && &tau == beta {
                    continue;
                }
                if let Some(c) = op.coeff(&sigma, &tau) {
                    let prod = &da * &lam_b.derivative(&tau);
                    residual.sub_assign_ref(&c.mul_coeff(&prod));
                }
            }
        }
        if residual.is_zero() {
            continue;
        }
        let bound = alpha.degree().max(beta.degree());
        if let Some(v) = residual.valuation() {
            if v < bound {
                return Err(Error::Extraction(format!(
                    "coefficient of ∂^{:?}⊗∂^{:?} appears at ℏ^{v}, below its derivative order {bound}",
                    alpha.as_slice(),
                    beta.as_slice()
                )));
            }
        }
        let norm = (alpha.factorial() * beta.factorial()).recip();
        op.add_term(alpha.clone(), beta.clone(), &residual.scale(&norm));
    }
    let grid = MultiIndex::all_up_to_degree(nvars, verify_degree);
    for alpha in &grid {
        for beta in &grid {
            if alpha.degree() <= order && beta.degree() <= order {
                continue;
            }
            let k = order;
            let f = HbarSeries::constant(k, ring.monomial(alpha, Rational::from_integer(1.into())));
            let g = HbarSeries::constant(k, ring.monomial(beta, Rational::from_integer(1.into())));
            let diff = op.apply(&f, &g)?.sub(&star(alpha, beta)?);
            if !diff.is_zero() {
                return Err(Error::Extraction(format!(
                    "extracted operator misses the star product on λ^{:?} ⊗ λ^{:?}",
                    alpha.as_slice(),
                    beta.as_slice()
                )));
            }
        }
    }
    Ok(op)
}

impl Context {
    /// Θ_PBW, the bidifferential operator of ∗PBW, in the context's ring.
    pub fn theta_pbw(&self) -> Result<Arc<BiDiffOp>> {
        if let Some(hit) = self.theta_pbw.lock().unwrap().as_ref() {
            return Ok(hit.clone());
        }
        let exact = self.extract_theta_pbw(self.order() + 2)?;
        let op = if self.is_exact() {
            exact
        } else {
            exact.embed(self.ring())?
        };
        let op = Arc::new(op);
        *self.theta_pbw.lock().unwrap() = Some(op.clone());
        Ok(op)
    }

    /// Θ_PBW with exact coefficients, verified up to `verify_degree`.
    pub fn extract_theta_pbw(&self, verify_degree: u32) -> Result<BiDiffOp> {
        let ring = CoeffRing::exact(self.n());
        let k = self.order();
        extract_bidiffop(self.n(), k, verify_degree, |a, b| {
            let mut slots = vec![ring.zero(); k as usize + 1];
            for (p, gamma, c) in self.star_monomials(a, b).iter() {
                slots[*p as usize].add_term(gamma.clone(), c.clone());
            }
            Ok(HbarSeries::from_coeffs(slots))
        })
    }

    /// The operator `g ↦ f ∗PBW g`.
    pub fn star_mult_op(&self, f: &HbarSeries<Poly>) -> Result<DiffOp> {
        Ok(self.theta_pbw()?.left_operator(f))
    }

    pub fn star_mult_op_poly(&self, f: &Poly) -> Result<DiffOp> {
        self.star_mult_op(&HbarSeries::constant(self.order(), f.clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn mono(e: &[u32]) -> Poly {
        CoeffRing::exact(e.len()).monomial(&MultiIndex::from_slice(e), int(1))
    }

    #[test]
    fn apply_examples() {
        let r = CoeffRing::exact(2);
        let k = 2;
        let l1d1 = {
            let mut d = DiffOp::zero(&r, k);
            d.add_term(MultiIndex::from_slice(&[1, 0]), &HbarSeries::constant(k, mono(&[1, 0])));
            d
        };
        let f = HbarSeries::constant(k, mono(&[2, 0]));
        assert_eq!(l1d1.apply(&f), HbarSeries::constant(k, mono(&[2, 0]).scale(&int(2))));
        let d12 = DiffOp::derivative(&r, k, MultiIndex::from_slice(&[1, 1]));
        assert_eq!(
            d12.apply(&HbarSeries::constant(k, mono(&[1, 1]))),
            HbarSeries::constant(k, r.one())
        );
        assert_eq!(DiffOp::identity(&r, k).apply(&f), f);
    }

    #[test]
    fn compose_examples() {
        let r = CoeffRing::exact(2);
        let k = 2;
        let d1 = DiffOp::derivative(&r, k, MultiIndex::from_slice(&[1, 0]));
        let d2 = DiffOp::derivative(&r, k, MultiIndex::from_slice(&[0, 1]));
        let l1 = DiffOp::multiplication(&r, &HbarSeries::constant(k, mono(&[1, 0])));
        let mut expected = DiffOp::identity(&r, k);
        expected.add_term(MultiIndex::from_slice(&[1, 0]), &HbarSeries::constant(k, mono(&[1, 0])));
        assert_eq!(d1.compose(&l1), expected);
        let mut l1d1 = DiffOp::zero(&r, k);
        l1d1.add_term(MultiIndex::from_slice(&[1, 0]), &HbarSeries::constant(k, mono(&[1, 0])));
        assert_eq!(l1.compose(&d1), l1d1);
        assert_eq!(
            d1.compose(&d2),
            DiffOp::derivative(&r, k, MultiIndex::from_slice(&[1, 1]))
        );
    }

    #[test]
    fn commutative_star_extracts_to_identity() {
        let ring = CoeffRing::exact(2);
        let op = extract_bidiffop(2, 2, 4, |a, b| {
            Ok(HbarSeries::constant(2, ring.monomial(&a.add(b), int(1))))
        })
        .unwrap();
        assert_eq!(op.terms().len(), 1);
        assert!(op.coeff(&MultiIndex::zero(2), &MultiIndex::zero(2)).is_some());
    }

    #[test]
    fn order_bound_violation_is_reported() {
        // f·g + ℏ ∂²f ∂²g breaks the "order ≤ k at ℏ^k" bound.
        let ring = CoeffRing::exact(1);
        let star = |a: &MultiIndex, b: &MultiIndex| {
            let fa = ring.monomial(a, int(1));
            let fb = ring.monomial(b, int(1));
            let d2 = MultiIndex::from_slice(&[2]);
            let mut s = HbarSeries::constant(3, &fa * &fb);
            *s.coeff_mut(1) = &fa.derivative(&d2) * &fb.derivative(&d2);
            Ok(s)
        };
        assert!(matches!(extract_bidiffop(1, 3, 5, star), Err(Error::Extraction(_))));
    }
}
