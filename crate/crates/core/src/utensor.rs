//! Elements of R ⊗ U(g)^{⊗m}: one coefficient slot multiplied with the star
//! product of the context, and m enveloping-algebra legs multiplied
//! factorwise in PBW normal form.

use std::collections::BTreeMap;

use num_traits::One;
use rayon::prelude::*;

use crate::context::Context;
use crate::error::{Error, Result};
use crate::poly::{CoeffRing, Poly};
use crate::rational::Rational;
use crate::series::HbarSeries;
use crate::uea::{pbw_display, Pbw, PbwPoly, UeaAlgebra};

type Terms = BTreeMap<Vec<Pbw>, HbarSeries<Poly>>;

fn merge(into: &mut Terms, legs: Vec<Pbw>, c: HbarSeries<Poly>) {
    if c.is_zero() {
        return;
    }
    match into.get_mut(&legs) {
        Some(existing) => {
            existing.add_assign_ref(&c);
            if existing.is_zero() {
                into.remove(&legs);
            }
        }
        None => {
            into.insert(legs, c);
        }
    }
}

fn merge_maps(mut a: Terms, b: Terms) -> Terms {
    if a.len() < b.len() {
        return merge_maps(b, a);
    }
    for (k, v) in b {
        merge(&mut a, k, v);
    }
    a
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UTensor {
    legs: usize,
    order: u32,
    ring: CoeffRing,
    terms: Terms,
}

impl UTensor {
    pub fn zero(ctx: &Context, legs: usize) -> Self {
        UTensor {
            legs,
            order: ctx.order(),
            ring: ctx.ring().clone(),
            terms: BTreeMap::new(),
        }
    }

    fn zero_like(&self, legs: usize) -> Self {
        UTensor {
            legs,
            order: self.order,
            ring: self.ring.clone(),
            terms: BTreeMap::new(),
        }
    }

    /// 1 ⊗ 1 ⊗ … ⊗ 1
    pub fn unit(ctx: &Context, legs: usize) -> Self {
        let mut out = Self::zero(ctx, legs);
        out.add_term(vec![ctx.ug().one(); legs], &ctx.one_series());
        out
    }

    pub fn legs(&self) -> usize {
        self.legs
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn ring(&self) -> &CoeffRing {
        &self.ring
    }

    pub fn terms(&self) -> &BTreeMap<Vec<Pbw>, HbarSeries<Poly>> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, legs: Vec<Pbw>, c: &HbarSeries<Poly>) {
        debug_assert_eq!(legs.len(), self.legs);
        merge(&mut self.terms, legs, c.clone());
    }

    pub fn coeff(&self, legs: &[Pbw]) -> Option<&HbarSeries<Poly>> {
        self.terms.get(legs)
    }

    pub fn add(&self, other: &UTensor) -> UTensor {
        let mut out = self.clone();
        for (l, c) in &other.terms {
            out.add_term(l.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &UTensor) -> UTensor {
        let mut out = self.clone();
        for (l, c) in &other.terms {
            out.add_term(l.clone(), &c.neg());
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> UTensor {
        let mut out = self.zero_like(self.legs);
        for (l, v) in &self.terms {
            out.add_term(l.clone(), &v.scale(c));
        }
        out
    }

    /// Multiplies by ℏ^p.
    pub fn shift(&self, p: u32) -> UTensor {
        let mut out = self.zero_like(self.legs);
        for (l, v) in &self.terms {
            out.add_term(l.clone(), &v.shift(p));
        }
        out
    }

    pub fn hbar_part(&self, p: u32) -> UTensor {
        let mut out = self.zero_like(self.legs);
        for (l, v) in &self.terms {
            if !v.coeff(p).is_zero() {
                out.add_term(l.clone(), &HbarSeries::monomial(self.order, p, v.coeff(p).clone()));
            }
        }
        out
    }

    /// Coefficients multiplied with the star product, legs factorwise.
    pub fn mul(&self, ctx: &Context, other: &UTensor) -> Result<UTensor> {
        if self.legs != other.legs {
            return Err(Error::DimensionMismatch {
                expected: self.legs,
                found: other.legs,
                context: "U-tensor product".into(),
            });
        }
        let ug = ctx.ug();
        let order = self.order;
        let xs: Vec<(&Vec<Pbw>, &HbarSeries<Poly>, u32)> = self
            .terms
            .iter()
            .filter_map(|(l, c)| c.valuation().map(|v| (l, c, v)))
            .collect();
        let mut ys: Vec<(&Vec<Pbw>, &HbarSeries<Poly>, u32)> = other
            .terms
            .iter()
            .filter_map(|(l, c)| c.valuation().map(|v| (l, c, v)))
            .collect();
        ys.sort_by_key(|(_, _, v)| *v);
        let terms = xs
            .par_iter()
            .map(|(lx, cx, vx)| -> Result<Terms> {
                let mut acc = Terms::new();
                for (ly, cy, _) in ys.iter().take_while(|(_, _, vy)| vx + vy <= order) {
                    let c = ctx.star(cx, cy)?;
                    if c.is_zero() {
                        continue;
                    }
                    let mut combos: Vec<(Vec<Pbw>, Rational)> = vec![(Vec::new(), Rational::one())];
                    for k in 0..self.legs {
                        let prod = ug.mono_mul(&lx[k], &ly[k]);
                        let mut next = Vec::with_capacity(combos.len() * prod.len());
                        for (prefix, w) in &combos {
                            for (u, v) in prod.iter() {
                                let mut p = prefix.clone();
                                p.push(u.clone());
                                next.push((p, w * v));
                            }
                        }
                        combos = next;
                    }
                    for (legs, w) in combos {
                        merge(&mut acc, legs, c.scale(&w));
                    }
                }
                Ok(acc)
            })
            .try_reduce(Terms::new, |a, b| Ok(merge_maps(a, b)))?;
        Ok(UTensor {
            terms,
            ..self.zero_like(self.legs)
        })
    }

    /// Δ on leg `k`, raising the number of legs by one.
    pub fn coproduct_at(&self, k: usize) -> UTensor {
        let mut out = self.zero_like(self.legs + 1);
        for (legs, c) in &self.terms {
            for (a, b, w) in UeaAlgebra::coproduct(&legs[k]) {
                let mut l = Vec::with_capacity(self.legs + 1);
                l.extend_from_slice(&legs[..k]);
                l.push(a);
                l.push(b);
                l.extend_from_slice(&legs[k + 1..]);
                out.add_term(l, &c.scale(&w));
            }
        }
        out
    }

    /// ε on leg `k`, lowering the number of legs by one.
    pub fn counit_at(&self, k: usize) -> UTensor {
        let mut out = self.zero_like(self.legs - 1);
        for (legs, c) in &self.terms {
            if legs[k].is_zero() {
                let mut l = legs.clone();
                l.remove(k);
                out.add_term(l, c);
            }
        }
        out
    }

    /// Inserts a unit leg at position `k`.
    pub fn insert_unit(&self, ctx: &Context, k: usize) -> UTensor {
        let mut out = self.zero_like(self.legs + 1);
        for (legs, c) in &self.terms {
            let mut l = legs.clone();
            l.insert(k, ctx.ug().one());
            out.add_term(l, c);
        }
        out
    }

    /// Exchanges legs `i` and `j`.
    pub fn swap(&self, i: usize, j: usize) -> UTensor {
        let mut out = self.zero_like(self.legs);
        for (legs, c) in &self.terms {
            let mut l = legs.clone();
            l.swap(i, j);
            out.add_term(l, c);
        }
        out
    }

    /// Replaces leg `k` by a linear combination, `legs[k] ↦ f(legs[k])`.
    pub fn map_leg(&self, k: usize, f: impl Fn(&Pbw) -> PbwPoly) -> UTensor {
        let mut out = self.zero_like(self.legs);
        for (legs, c) in &self.terms {
            for (u, w) in f(&legs[k]) {
                let mut l = legs.clone();
                l[k] = u;
                out.add_term(l, &c.scale(&w));
            }
        }
        out
    }

    /// Applies `f` to every coefficient series.
    pub fn map_coeffs(&self, f: impl Fn(&HbarSeries<Poly>) -> Result<HbarSeries<Poly>>) -> Result<UTensor> {
        let mut out = self.zero_like(self.legs);
        for (legs, c) in &self.terms {
            out.add_term(legs.clone(), &f(c)?);
        }
        Ok(out)
    }

    /// Inverse in the star-and-factorwise algebra, for ℏ⁰ part 1⊗…⊗1.
    pub fn inverse(&self, ctx: &Context) -> Result<UTensor> {
        let one = UTensor::unit(ctx, self.legs);
        if self.hbar_part(0) != one {
            return Err(Error::NonUnital("inverse needs ℏ⁰ part 1⊗…⊗1".into()));
        }
        let g = one.sub(self);
        let mut acc = one.clone();
        let mut power = one;
        for _ in 0..ctx.order() {
            power = power.mul(ctx, &g)?;
            if power.is_zero() {
                break;
            }
            acc = acc.add(&power);
        }
        Ok(acc)
    }

    pub fn counts_by_order(&self) -> Vec<usize> {
        let mut counts = vec![0; self.order as usize + 1];
        for c in self.terms.values() {
            for (p, slot) in c.coeffs().iter().enumerate() {
                if !slot.is_zero() {
                    counts[p] += 1;
                }
            }
        }
        counts
    }

    pub fn first_term(&self, names: &[String], coords: &[String]) -> Option<String> {
        let mut best: Option<(u32, &Vec<Pbw>, &Poly)> = None;
        for (legs, c) in &self.terms {
            if let Some(p) = c.valuation() {
                if best.map(|(bp, _, _)| p < bp).unwrap_or(true) {
                    best = Some((p, legs, c.coeff(p)));
                }
            }
        }
        best.map(|(p, legs, c)| {
            let legs: Vec<String> = legs.iter().map(|u| pbw_display(u, names)).collect();
            format!("ℏ^{p} · ({}) ⊗ {}", c.display_with(coords), legs.join(" ⊗ "))
        })
    }

    pub fn display(&self, ctx: &Context) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let names = ctx.pair().basis().to_vec();
        let coords = ctx.pair().coordinate_names();
        let mut lines = Vec::new();
        for (legs, c) in &self.terms {
            for (p, slot) in c.coeffs().iter().enumerate() {
                if slot.is_zero() {
                    continue;
                }
                let legs: Vec<String> = legs.iter().map(|u| pbw_display(u, &names)).collect();
                lines.push(format!(
                    "ℏ^{p} · ({}) ⊗ {}",
                    slot.display_with(&coords),
                    legs.join(" ⊗ ")
                ));
            }
        }
        lines.join("\n")
    }
}
