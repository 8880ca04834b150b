//! Formal power series in ℏ truncated at a global order `K`.

use std::fmt;

use num_traits::Zero;

use crate::poly::Poly;
use crate::rational::{format_rational, Rational};

/// Ring operations needed for ℏ-series coefficients.
pub trait Coefficient: Clone + PartialEq {
    fn is_zero_coeff(&self) -> bool;
    fn zero_like(&self) -> Self;
    fn add_assign_ref(&mut self, other: &Self);
    fn sub_assign_ref(&mut self, other: &Self);
    fn mul_ref(&self, other: &Self) -> Self;
    fn scale(&self, c: &Rational) -> Self;
}

impl Coefficient for Rational {
    fn is_zero_coeff(&self) -> bool {
        self.is_zero()
    }
    fn zero_like(&self) -> Self {
        Rational::zero()
    }
    fn add_assign_ref(&mut self, other: &Self) {
        *self += other;
    }
    fn sub_assign_ref(&mut self, other: &Self) {
        *self -= other;
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn scale(&self, c: &Rational) -> Self {
        self * c
    }
}

impl Coefficient for Poly {
    fn is_zero_coeff(&self) -> bool {
        self.is_zero()
    }
    fn zero_like(&self) -> Self {
        self.ring().zero()
    }
    fn add_assign_ref(&mut self, other: &Self) {
        Poly::add_assign_ref(self, other);
    }
    fn sub_assign_ref(&mut self, other: &Self) {
        self.add_scaled(other, &Rational::from_integer((-1).into()));
    }
    fn mul_ref(&self, other: &Self) -> Self {
        self * other
    }
    fn scale(&self, c: &Rational) -> Self {
        Poly::scale(self, c)
    }
}

/// `Σ_{k≤K} ℏ^k c_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HbarSeries<T> {
    coeffs: Vec<T>,
}

impl<T: Coefficient> HbarSeries<T> {
    /// The zero series of order `k`, using `zero` as the template coefficient.
    pub fn zero(order: u32, zero: &T) -> Self {
        HbarSeries {
            coeffs: vec![zero.zero_like(); order as usize + 1],
        }
    }

    /// `ℏ^p c`; zero when `p > K`.
    pub fn monomial(order: u32, p: u32, c: T) -> Self {
        let mut s = Self::zero(order, &c);
        if p <= order {
            s.coeffs[p as usize] = c;
        }
        s
    }

    pub fn constant(order: u32, c: T) -> Self {
        Self::monomial(order, 0, c)
    }

    pub fn from_coeffs(coeffs: Vec<T>) -> Self {
        assert!(!coeffs.is_empty(), "series needs at least the ℏ⁰ slot");
        HbarSeries { coeffs }
    }

    pub fn order(&self) -> u32 {
        (self.coeffs.len() - 1) as u32
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, p: u32) -> &T {
        &self.coeffs[p as usize]
    }

    pub fn coeff_mut(&mut self, p: u32) -> &mut T {
        &mut self.coeffs[p as usize]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(T::is_zero_coeff)
    }

    /// Lowest ℏ-power with a nonzero coefficient.
    pub fn valuation(&self) -> Option<u32> {
        self.coeffs.iter().position(|c| !c.is_zero_coeff()).map(|p| p as u32)
    }

    pub fn add_assign_ref(&mut self, other: &Self) {
        debug_assert_eq!(self.order(), other.order());
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            a.add_assign_ref(b);
        }
    }

    pub fn sub_assign_ref(&mut self, other: &Self) {
        debug_assert_eq!(self.order(), other.order());
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            a.sub_assign_ref(b);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign_ref(other);
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.sub_assign_ref(other);
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(&Rational::from_integer((-1).into()))
    }

    pub fn scale(&self, c: &Rational) -> Self {
        HbarSeries {
            coeffs: self.coeffs.iter().map(|x| x.scale(c)).collect(),
        }
    }

    /// Cauchy product truncated at `K`.
    pub fn mul(&self, other: &Self) -> Self {
        debug_assert_eq!(self.order(), other.order());
        let k = self.coeffs.len();
        let mut out = Self::zero(self.order(), &self.coeffs[0]);
        for i in 0..k {
            if self.coeffs[i].is_zero_coeff() {
                continue;
            }
            for j in 0..k - i {
                if other.coeffs[j].is_zero_coeff() {
                    continue;
                }
                let prod = self.coeffs[i].mul_ref(&other.coeffs[j]);
                out.coeffs[i + j].add_assign_ref(&prod);
            }
        }
        out
    }

    /// Multiplies by ℏ^p, dropping what falls past `K`.
    pub fn shift(&self, p: u32) -> Self {
        let mut out = Self::zero(self.order(), &self.coeffs[0]);
        for (i, c) in self.coeffs.iter().enumerate() {
            let j = i + p as usize;
            if j < out.coeffs.len() {
                out.coeffs[j] = c.clone();
            }
        }
        out
    }

    pub fn map<U: Coefficient>(&self, f: impl FnMut(&T) -> U) -> HbarSeries<U> {
        HbarSeries {
            coeffs: self.coeffs.iter().map(f).collect(),
        }
    }

    /// Applies `f` slot-wise, passing the ℏ-power.
    pub fn map_indexed<U: Coefficient>(&self, mut f: impl FnMut(u32, &T) -> U) -> HbarSeries<U> {
        HbarSeries {
            coeffs: self.coeffs.iter().enumerate().map(|(i, c)| f(i as u32, c)).collect(),
        }
    }

    /// Multiplies every slot by a fixed coefficient.
    pub fn mul_coeff(&self, c: &T) -> Self {
        HbarSeries {
            coeffs: self.coeffs.iter().map(|x| x.mul_ref(c)).collect(),
        }
    }
}

impl HbarSeries<Poly> {
    /// Series with every slot a rational multiple of the constant 1.
    pub fn from_rational_series(s: &HbarSeries<Rational>, template: &Poly) -> Self {
        let ring = template.ring();
        s.map(|c| ring.constant(c.clone()))
    }
}

impl fmt::Display for HbarSeries<Rational> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(p, c)| match p {
                0 => format_rational(c),
                1 => format!("({})ℏ", format_rational(c)),
                _ => format!("({})ℏ^{p}", format_rational(c)),
            })
            .collect();
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

impl fmt::Display for HbarSeries<Poly> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(p, c)| match p {
                0 => format!("({c})"),
                1 => format!("ℏ({c})"),
                _ => format!("ℏ^{p}({c})"),
            })
            .collect();
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join(" + "))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{CoeffRing, MultiIndex};
    use crate::rational::int;

    #[test]
    fn cauchy_product() {
        let r = CoeffRing::exact(1);
        let l = r.var(0).unwrap();
        let one = r.one();
        let a = HbarSeries::constant(3, one.clone()).add(&HbarSeries::monomial(3, 1, l.clone()));
        let b = HbarSeries::constant(3, one.clone()).sub(&HbarSeries::monomial(3, 1, l.clone()));
        let expected = HbarSeries::constant(3, one.clone()).sub(&HbarSeries::monomial(
            3,
            2,
            r.monomial(&MultiIndex::from_slice(&[2]), int(1)),
        ));
        assert_eq!(a.mul(&b), expected);
    }

    #[test]
    fn truncation() {
        let k = 3;
        let h = HbarSeries::monomial(k, 1, int(1));
        let hk = HbarSeries::monomial(k, k, int(1));
        assert!(h.mul(&hk).is_zero());
        let one_plus_h = HbarSeries::constant(k, int(1)).add(&h);
        assert_eq!(
            one_plus_h.mul(&one_plus_h),
            HbarSeries::from_coeffs(vec![int(1), int(2), int(1), int(0)])
        );
    }

    #[test]
    fn shift_and_valuation() {
        let s = HbarSeries::from_coeffs(vec![int(1), int(2), int(3)]);
        let t = s.shift(1);
        assert_eq!(t, HbarSeries::from_coeffs(vec![int(0), int(1), int(2)]));
        assert_eq!(t.valuation(), Some(1));
        assert_eq!(HbarSeries::zero(2, &int(0)).valuation(), None);
    }
}
