//! Multivariate polynomials in the coordinates λ₁…λ_N of l*, in two modes.
//!
//! *Exact* polynomials are finite sums with rational coefficients.
//!
//! *Jet* polynomials are truncated Taylor expansions at a base point λ₀ in
//! the shifted variables μ = λ − λ₀, capped at total degree `L`. A jet also
//! records the highest degree up to which it is known exactly (`valid`);
//! differentiation lowers it by one and products take the minimum that the
//! orders of the factors allow, so a residual that vanishes "as a jet" is
//! only ever claimed to vanish up to that degree.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::rational::{binomial, factorial, format_rational, Rational};

/// Exponent vector of a monomial, one slot per λ-variable. Also used for
/// derivative multi-indices ∂^α.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct MultiIndex(SmallVec<[u32; 4]>);

impl MultiIndex {
    pub fn zero(n: usize) -> Self {
        MultiIndex(SmallVec::from_elem(0, n))
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut m = Self::zero(n);
        m.0[i] = 1;
        m
    }

    pub fn from_slice(e: &[u32]) -> Self {
        MultiIndex(SmallVec::from_slice(e))
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0[i]
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.len(), other.len());
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn add_unit(&self, i: usize) -> Self {
        let mut m = self.clone();
        m.0[i] += 1;
        m
    }

    /// `self − other` when `other ≤ self` componentwise.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        let mut out = SmallVec::with_capacity(self.len());
        for (a, b) in self.0.iter().zip(&other.0) {
            out.push(a.checked_sub(*b)?);
        }
        Some(MultiIndex(out))
    }

    pub fn divides(&self, other: &Self) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    /// α! = Π αᵢ!
    pub fn factorial(&self) -> Rational {
        self.0.iter().map(|&e| factorial(e)).product()
    }

    /// Π C(αᵢ, γᵢ)
    pub fn binomial(&self, gamma: &Self) -> Rational {
        self.0.iter().zip(&gamma.0).map(|(&a, &g)| binomial(a, g)).product()
    }

    /// All γ with γ ≤ self componentwise, in lexicographic order.
    pub fn divisors(&self) -> Vec<MultiIndex> {
        let mut out = vec![MultiIndex::zero(0)];
        for &e in &self.0 {
            let mut next = Vec::with_capacity(out.len() * (e as usize + 1));
            for prefix in &out {
                for k in 0..=e {
                    let mut m = prefix.clone();
                    m.0.push(k);
                    next.push(m);
                }
            }
            out = next;
        }
        out
    }

    /// All multi-indices of length `n` with total degree exactly `d`.
    pub fn all_of_degree(n: usize, d: u32) -> Vec<MultiIndex> {
        fn rec(n: usize, d: u32, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            if prefix.len() + 1 == n {
                prefix.push(d);
                out.push(MultiIndex::from_slice(prefix));
                prefix.pop();
                return;
            }
            for k in (0..=d).rev() {
                prefix.push(k);
                rec(n, d - k, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        if n == 0 {
            if d == 0 {
                out.push(MultiIndex::zero(0));
            }
            return out;
        }
        rec(n, d, &mut Vec::with_capacity(n), &mut out);
        out
    }

    /// All multi-indices of length `n` with total degree at most `d`,
    /// ordered by degree.
    pub fn all_up_to_degree(n: usize, d: u32) -> Vec<MultiIndex> {
        (0..=d).flat_map(|k| Self::all_of_degree(n, k)).collect()
    }
}

/// Base point and degree cap of a jet coefficient ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetSpec {
    pub base_point: Vec<Rational>,
    pub degree: u32,
}

/// Coefficient mode of a polynomial ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoeffMode {
    Exact,
    Jet(Arc<JetSpec>),
}

impl CoeffMode {
    pub fn jet(base_point: Vec<Rational>, degree: u32) -> Self {
        CoeffMode::Jet(Arc::new(JetSpec { base_point, degree }))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, CoeffMode::Exact)
    }
}

/// The coefficient ring: polynomials (or jets) in `nvars` variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoeffRing {
    pub nvars: usize,
    pub mode: CoeffMode,
}

impl CoeffRing {
    pub fn exact(nvars: usize) -> Self {
        CoeffRing {
            nvars,
            mode: CoeffMode::Exact,
        }
    }

    pub fn new(nvars: usize, mode: CoeffMode) -> Result<Self> {
        if let CoeffMode::Jet(spec) = &mode {
            if spec.base_point.len() != nvars {
                return Err(Error::DimensionMismatch {
                    expected: nvars,
                    found: spec.base_point.len(),
                    context: "jet base point".into(),
                });
            }
        }
        Ok(CoeffRing { nvars, mode })
    }

    fn full_valid(&self) -> i64 {
        match &self.mode {
            CoeffMode::Exact => i64::MAX,
            CoeffMode::Jet(spec) => spec.degree as i64,
        }
    }

    pub fn zero(&self) -> Poly {
        Poly {
            nvars: self.nvars,
            mode: self.mode.clone(),
            valid: self.full_valid(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(&self, c: Rational) -> Poly {
        let mut p = self.zero();
        if !c.is_zero() {
            p.terms.insert(MultiIndex::zero(self.nvars), c);
        }
        p
    }

    pub fn one(&self) -> Poly {
        self.constant(Rational::one())
    }

    /// The coordinate function λᵢ (0-based).
    pub fn var(&self, i: usize) -> Result<Poly> {
        if i >= self.nvars {
            return Err(Error::IndexOutOfRange {
                index: i,
                limit: self.nvars,
                context: "coordinate variable".into(),
            });
        }
        Ok(self.monomial(&MultiIndex::unit(self.nvars, i), Rational::one()))
    }

    /// `c · λ^α`, expanded at the base point in jet mode.
    pub fn monomial(&self, alpha: &MultiIndex, c: Rational) -> Poly {
        let mut exact = CoeffRing::exact(self.nvars).zero();
        if !c.is_zero() {
            exact.terms.insert(alpha.clone(), c);
        }
        self.embed(&exact).expect("exact monomial embeds")
    }

    /// Bring an exact polynomial into this ring (Taylor expansion at the base
    /// point in jet mode).
    pub fn embed(&self, p: &Poly) -> Result<Poly> {
        if p.nvars != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                found: p.nvars,
                context: "embedding polynomial".into(),
            });
        }
        match (&p.mode, &self.mode) {
            (a, b) if a == b => Ok(p.clone()),
            (CoeffMode::Exact, CoeffMode::Jet(spec)) => {
                let mut out = self.zero();
                for (alpha, c) in &p.terms {
                    // Π (μᵢ + bᵢ)^{αᵢ} = Σ_{γ≤α} C(α,γ) b^{α−γ} μ^γ
                    for gamma in alpha.divisors() {
                        if gamma.degree() > spec.degree {
                            continue;
                        }
                        let rest = alpha.checked_sub(&gamma).unwrap();
                        let mut coeff = c * alpha.binomial(&gamma);
                        for (i, &e) in rest.as_slice().iter().enumerate() {
                            coeff *= pow(&spec.base_point[i], e);
                        }
                        out.add_term(gamma, coeff);
                    }
                }
                Ok(out)
            }
            _ => Err(Error::ModeMismatch(
                "cannot convert a jet back into another mode".into(),
            )),
        }
    }
}

fn pow(r: &Rational, e: u32) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..e {
        acc *= r;
    }
    acc
}

/// A polynomial (exact mode) or truncated jet (jet mode) in λ₁…λ_N.
#[derive(Clone, Debug)]
pub struct Poly {
    nvars: usize,
    mode: CoeffMode,
    /// Highest total degree known exactly; `i64::MAX` in exact mode.
    valid: i64,
    terms: BTreeMap<MultiIndex, Rational>,
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        self.nvars == other.nvars && self.mode == other.mode && self.terms == other.terms
    }
}

impl Eq for Poly {}

impl Poly {
    pub fn ring(&self) -> CoeffRing {
        CoeffRing {
            nvars: self.nvars,
            mode: self.mode.clone(),
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn mode(&self) -> &CoeffMode {
        &self.mode
    }

    /// Highest degree known exactly (`None` in exact mode).
    pub fn valid_degree(&self) -> Option<i64> {
        match self.mode {
            CoeffMode::Exact => None,
            CoeffMode::Jet(_) => Some(self.valid),
        }
    }

    pub fn terms(&self) -> &BTreeMap<MultiIndex, Rational> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, alpha: &MultiIndex) -> Rational {
        self.terms.get(alpha).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coeff(&MultiIndex::zero(self.nvars))
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(MultiIndex::degree).max()
    }

    /// Lowest total degree that may be nonzero.
    fn order(&self) -> i64 {
        let known = self.terms.keys().map(|m| m.degree() as i64).min();
        match (known, self.valid) {
            (Some(d), _) => d,
            (None, i64::MAX) => i64::MAX,
            (None, v) => v.saturating_add(1),
        }
    }

    /// Adds `c·μ^α`, dropping it if beyond the known degree.
    pub fn add_term(&mut self, alpha: MultiIndex, c: Rational) {
        if c.is_zero() || alpha.degree() as i64 > self.valid {
            return;
        }
        match self.terms.entry(alpha) {
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

    fn check_compatible(&self, other: &Poly, op: &str) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                found: other.nvars,
                context: op.to_string(),
            });
        }
        if self.mode != other.mode {
            return Err(Error::ModeMismatch(op.to_string()));
        }
        Ok(())
    }

    fn set_valid(&mut self, valid: i64) {
        if valid < self.valid {
            self.valid = valid;
            self.terms.retain(|m, _| m.degree() as i64 <= valid);
        }
    }

    pub fn checked_add(&self, other: &Poly) -> Result<Poly> {
        self.check_compatible(other, "add")?;
        let mut out = self.clone();
        out.set_valid(other.valid);
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Poly) -> Result<Poly> {
        self.checked_add(&other.neg())
    }

    pub fn add_assign_ref(&mut self, other: &Poly) {
        self.check_compatible(other, "add")
            .expect("compatible coefficient rings");
        self.set_valid(other.valid);
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    /// `self += c·other`
    pub fn add_scaled(&mut self, other: &Poly, c: &Rational) {
        self.check_compatible(other, "add")
            .expect("compatible coefficient rings");
        self.set_valid(other.valid);
        if c.is_zero() {
            return;
        }
        for (m, v) in &other.terms {
            self.add_term(m.clone(), v * c);
        }
    }

    pub fn neg(&self) -> Poly {
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v = -v.clone();
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        let mut out = self.clone();
        if c.is_zero() {
            out.terms.clear();
            return out;
        }
        for v in out.terms.values_mut() {
            *v *= c;
        }
        out
    }

    /// Product; truncated at the jet degree in jet mode.
    pub fn checked_mul(&self, other: &Poly) -> Result<Poly> {
        self.check_compatible(other, "mul")?;
        let valid = match &self.mode {
            CoeffMode::Exact => i64::MAX,
            CoeffMode::Jet(spec) => (spec.degree as i64)
                .min(self.valid.saturating_add(other.order()))
                .min(other.valid.saturating_add(self.order())),
        };
        let mut out = Poly {
            nvars: self.nvars,
            mode: self.mode.clone(),
            valid,
            terms: BTreeMap::new(),
        };
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                let m = ma.add(mb);
                if m.degree() as i64 <= valid {
                    out.add_term(m, ca * cb);
                }
            }
        }
        Ok(out)
    }

    /// ∂/∂λᵢ (0-based index).
    pub fn partial(&self, i: usize) -> Result<Poly> {
        if i >= self.nvars {
            return Err(Error::IndexOutOfRange {
                index: i,
                limit: self.nvars,
                context: "partial derivative".into(),
            });
        }
        let mut out = self.clone();
        out.terms.clear();
        if self.valid != i64::MAX {
            out.valid = self.valid - 1;
        }
        for (m, c) in &self.terms {
            let e = m.get(i);
            if e > 0 {
                let mut d = m.clone();
                d.0[i] -= 1;
                out.add_term(d, c * Rational::from_integer(e.into()));
            }
        }
        Ok(out)
    }

    /// ∂^α
    pub fn derivative(&self, alpha: &MultiIndex) -> Poly {
        let mut out = self.clone();
        for (i, &e) in alpha.as_slice().iter().enumerate() {
            for _ in 0..e {
                out = out.partial(i).expect("derivative index within range");
            }
        }
        out
    }

    /// Value at a point (in the ring's own variables: λ in exact mode,
    /// μ = λ − λ₀ in jet mode).
    pub fn eval(&self, point: &[Rational]) -> Result<Rational> {
        if point.len() != self.nvars {
            return Err(Error::DimensionMismatch {
                expected: self.nvars,
                found: point.len(),
                context: "evaluation point".into(),
            });
        }
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(m.as_slice()) {
                t *= pow(x, e);
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Multiplicative inverse of a jet with nonzero constant term, valid to
    /// the same degree as `self`.
    pub fn jet_inverse(&self) -> Result<Poly> {
        let spec = match &self.mode {
            CoeffMode::Exact => return Err(Error::Jet("inverse of an exact polynomial requires jet mode".into())),
            CoeffMode::Jet(spec) => spec.clone(),
        };
        let c0 = self.constant_term();
        if c0.is_zero() {
            return Err(Error::Jet("constant term vanishes at the base point".into()));
        }
        // u = c0(1 − t) with t of positive order: u⁻¹ = c0⁻¹ Σ tᵏ
        let ring = self.ring();
        let inv_c0 = c0.recip();
        let t = ring.one().checked_sub(&self.scale(&inv_c0))?;
        let mut acc = ring.one();
        let mut power = ring.one();
        for _ in 0..spec.degree {
            power = power.checked_mul(&t)?;
            acc = acc.checked_add(&power)?;
        }
        let mut out = acc.scale(&inv_c0);
        out.set_valid(self.valid);
        Ok(out)
    }

    /// Human-readable form using the given variable names.
    pub fn display_with(&self, names: &[String]) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (idx, (m, c)) in self.terms.iter().enumerate() {
            let mono: Vec<String> = m
                .as_slice()
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| {
                    let name = names.get(i).cloned().unwrap_or_else(|| format!("x{}", i + 1));
                    if e == 1 {
                        name
                    } else {
                        format!("{name}^{e}")
                    }
                })
                .collect();
            let neg = c.is_negative();
            let abs = c.abs();
            if idx == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            if mono.is_empty() {
                s.push_str(&format_rational(&abs));
            } else {
                if !abs.is_one() {
                    s.push_str(&format_rational(&abs));
                    s.push('*');
                }
                s.push_str(&mono.join("*"));
            }
        }
        s
    }

    pub fn default_names(&self) -> Vec<String> {
        let prefix = if self.mode.is_exact() { "λ" } else { "μ" };
        (1..=self.nvars).map(|i| format!("{prefix}{i}")).collect()
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display_with(&self.default_names()))
    }
}

impl std::ops::Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.checked_add(rhs).expect("compatible coefficient rings")
    }
}

impl std::ops::Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.checked_sub(rhs).expect("compatible coefficient rings")
    }
}

impl std::ops::Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        self.checked_mul(rhs).expect("compatible coefficient rings")
    }
}

impl std::ops::Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::neg(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    fn ring2() -> CoeffRing {
        CoeffRing::exact(2)
    }

    #[test]
    fn monomial_product() {
        let r = ring2();
        let l1 = r.var(0).unwrap();
        let l2 = r.var(1).unwrap();
        assert_eq!(&l1 * &l1, r.monomial(&MultiIndex::from_slice(&[2, 0]), int(1)));
        let sum = &l1 + &l2;
        let diff = &l1 - &l2;
        let expected = &(&l1 * &l1) - &(&l2 * &l2);
        assert_eq!(&sum * &diff, expected);
    }

    #[test]
    fn jet_truncates_products() {
        let r = CoeffRing::new(2, CoeffMode::jet(vec![int(0), int(0)], 1)).unwrap();
        let l1 = r.var(0).unwrap();
        let l2 = r.var(1).unwrap();
        assert!((&l1 * &l2).is_zero());
    }

    #[test]
    fn partials() {
        let r = ring2();
        let p = r.monomial(&MultiIndex::from_slice(&[2, 1]), int(1));
        assert_eq!(
            p.partial(0).unwrap(),
            r.monomial(&MultiIndex::from_slice(&[1, 1]), int(2))
        );
        assert!(r.var(0).unwrap().partial(1).unwrap().is_zero());
        let q = r.var(0).unwrap().scale(&frac(3, 2));
        assert_eq!(q.partial(0).unwrap(), r.constant(frac(3, 2)));
        assert!(p.partial(2).is_err());
    }

    #[test]
    fn mode_mismatch_is_an_error() {
        let exact = ring2().one();
        let jet = CoeffRing::new(2, CoeffMode::jet(vec![int(1), int(0)], 3))
            .unwrap()
            .one();
        assert!(matches!(exact.checked_mul(&jet), Err(Error::ModeMismatch(_))));
        let other = CoeffRing::exact(3).one();
        assert!(matches!(
            exact.checked_add(&other),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn jet_embedding_shifts_base_point() {
        // λ1² at λ₀ = (2, 0): (μ1 + 2)² = μ1² + 4μ1 + 4
        let r = CoeffRing::new(2, CoeffMode::jet(vec![int(2), int(0)], 4)).unwrap();
        let p = r.monomial(&MultiIndex::from_slice(&[2, 0]), int(1));
        assert_eq!(p.constant_term(), int(4));
        assert_eq!(p.coeff(&MultiIndex::from_slice(&[1, 0])), int(4));
        assert_eq!(p.coeff(&MultiIndex::from_slice(&[2, 0])), int(1));
    }

    #[test]
    fn jet_inverse_of_shifted_variable() {
        // 1/λ at λ₀ = 1: Σ (−μ)^k
        let r = CoeffRing::new(1, CoeffMode::jet(vec![int(1)], 5)).unwrap();
        let lam = r.var(0).unwrap();
        let inv = lam.jet_inverse().unwrap();
        for k in 0..=5u32 {
            let sign = if k % 2 == 0 { 1 } else { -1 };
            assert_eq!(inv.coeff(&MultiIndex::from_slice(&[k])), int(sign));
        }
        assert_eq!(&lam * &inv, r.one());
    }

    #[test]
    fn derivative_lowers_jet_precision() {
        let r = CoeffRing::new(1, CoeffMode::jet(vec![int(0)], 3)).unwrap();
        let p = r.monomial(&MultiIndex::from_slice(&[3]), int(1));
        let d = p.partial(0).unwrap();
        assert_eq!(d.valid_degree(), Some(2));
        assert_eq!(d.coeff(&MultiIndex::from_slice(&[2])), int(3));
    }

    #[test]
    fn enumerations() {
        assert_eq!(MultiIndex::all_of_degree(3, 2).len(), 6);
        assert_eq!(MultiIndex::all_up_to_degree(2, 3).len(), 10);
        assert_eq!(MultiIndex::all_up_to_degree(0, 3).len(), 1);
        assert_eq!(MultiIndex::from_slice(&[2, 1]).divisors().len(), 6);
    }
}
