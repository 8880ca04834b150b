//! The quantum groupoid H = D⊗U(g)⟦ℏ⟧ over R = Pol(l*)⟦ℏ⟧ and its tensor
//! powers over R.
//!
//! An [`HTensor`] of rank n is a sum of terms `c · (∂^{α₁}⊗u₁) ⊗ … ⊗ (∂^{αₙ}⊗uₙ)`
//! whose only coefficient `c` sits on the first factor. Source and target
//! both act by multiplication, so any coefficient may be slid onto factor 1;
//! this makes the representative unique.
//!
//! Factorwise products are only meaningful when the right operand is read
//! with its coefficient on a chosen factor: [`HTensor::mul_anchored`] takes
//! that factor explicitly and expands the left operand's derivatives there
//! by Leibniz. [`HTensor::mul`] anchors at factor 1.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::One;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::context::Context;
use crate::error::{Error, Result};
use crate::poly::{CoeffRing, MultiIndex, Poly};
use crate::rational::Rational;
use crate::series::HbarSeries;
use crate::uea::{pbw_display, Pbw, UeaAlgebra};
use crate::weyl::{series_from_file, series_to_file, SeriesFile};

/// One tensor factor: a pure derivative and a PBW monomial.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Leg {
    pub d: MultiIndex,
    pub u: Pbw,
}

impl Leg {
    pub fn new(d: MultiIndex, u: Pbw) -> Self {
        Leg { d, u }
    }

    pub fn unit(n: usize, m: usize) -> Self {
        Leg {
            d: MultiIndex::zero(n),
            u: MultiIndex::zero(m),
        }
    }

    pub fn is_unit(&self) -> bool {
        self.d.is_zero() && self.u.is_zero()
    }
}

pub type Legs = Vec<Leg>;

/// A term of a raw tensor before sliding: one coefficient per factor.
#[derive(Clone, Debug)]
pub struct RawFactor {
    pub coeff: HbarSeries<Poly>,
    pub leg: Leg,
}

/// Canonical representative of an element of H^{⊗_R n}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HTensor {
    rank: usize,
    order: u32,
    ring: CoeffRing,
    dim_g: usize,
    terms: BTreeMap<Legs, HbarSeries<Poly>>,
}

fn merge(into: &mut BTreeMap<Legs, HbarSeries<Poly>>, legs: Legs, c: HbarSeries<Poly>) {
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

fn merge_maps(
    mut a: BTreeMap<Legs, HbarSeries<Poly>>,
    b: BTreeMap<Legs, HbarSeries<Poly>>,
) -> BTreeMap<Legs, HbarSeries<Poly>> {
    if a.len() < b.len() {
        return merge_maps(b, a);
    }
    for (k, v) in b {
        merge(&mut a, k, v);
    }
    a
}

/// All combinations of one entry per slot, with the product of the weights.
fn cartesian(options: &[Vec<(Pbw, Rational)>]) -> Vec<(Vec<Pbw>, Rational)> {
    let mut acc: Vec<(Vec<Pbw>, Rational)> = vec![(Vec::with_capacity(options.len()), Rational::one())];
    for slot in options {
        let mut next = Vec::with_capacity(acc.len() * slot.len());
        for (prefix, w) in &acc {
            for (u, c) in slot {
                let mut p = prefix.clone();
                p.push(u.clone());
                next.push((p, w * c));
            }
        }
        acc = next;
    }
    acc
}

impl HTensor {
    pub fn zero(ctx: &Context, rank: usize) -> Self {
        HTensor {
            rank,
            order: ctx.order(),
            ring: ctx.ring().clone(),
            dim_g: ctx.m(),
            terms: BTreeMap::new(),
        }
    }

    fn zero_like(&self, rank: usize) -> Self {
        HTensor {
            rank,
            order: self.order,
            ring: self.ring.clone(),
            dim_g: self.dim_g,
            terms: BTreeMap::new(),
        }
    }

    /// 1 ⊗ … ⊗ 1
    pub fn unit(ctx: &Context, rank: usize) -> Self {
        let mut out = Self::zero(ctx, rank);
        out.add_term(vec![Leg::unit(ctx.n(), ctx.m()); rank], &ctx.one_series());
        out
    }

    /// A single term `c · legs`.
    pub fn term(ctx: &Context, legs: Legs, c: HbarSeries<Poly>) -> Self {
        let mut out = Self::zero(ctx, legs.len());
        out.add_term(legs, &c);
        out
    }

    /// Slides every factor's coefficient onto factor 1.
    pub fn normalize(ctx: &Context, raw: &[Vec<RawFactor>]) -> Result<Self> {
        let rank = raw.first().map(Vec::len).unwrap_or(0);
        let mut out = Self::zero(ctx, rank);
        for factors in raw {
            if factors.len() != rank {
                return Err(Error::DimensionMismatch {
                    expected: rank,
                    found: factors.len(),
                    context: "tensor rank".into(),
                });
            }
            let mut c = ctx.one_series();
            for f in factors {
                c = f.coeff.mul(&c);
            }
            out.add_term(factors.iter().map(|f| f.leg.clone()).collect(), &c);
        }
        Ok(out)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn ring(&self) -> &CoeffRing {
        &self.ring
    }

    pub fn terms(&self) -> &BTreeMap<Legs, HbarSeries<Poly>> {
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

    pub fn add_term(&mut self, legs: Legs, c: &HbarSeries<Poly>) {
        debug_assert_eq!(legs.len(), self.rank);
        merge(&mut self.terms, legs, c.clone());
    }

    pub fn coeff(&self, legs: &[Leg]) -> Option<&HbarSeries<Poly>> {
        self.terms.get(legs)
    }

    pub fn add(&self, other: &HTensor) -> HTensor {
        let mut out = self.clone();
        for (l, c) in &other.terms {
            out.add_term(l.clone(), c);
        }
        out
    }

    pub fn sub(&self, other: &HTensor) -> HTensor {
        let mut out = self.clone();
        for (l, c) in &other.terms {
            out.add_term(l.clone(), &c.neg());
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> HTensor {
        let mut out = self.zero_like(self.rank);
        for (l, v) in &self.terms {
            out.add_term(l.clone(), &v.scale(c));
        }
        out
    }

    /// Multiplies every coefficient on the left by `a` (the module action).
    pub fn left_coefficient(&self, a: &HbarSeries<Poly>) -> HTensor {
        let mut out = self.zero_like(self.rank);
        for (l, v) in &self.terms {
            out.add_term(l.clone(), &a.mul(v));
        }
        out
    }

    /// Terms at a single ℏ-power.
    pub fn hbar_part(&self, p: u32) -> HTensor {
        let mut out = self.zero_like(self.rank);
        for (l, v) in &self.terms {
            let c = v.coeff(p);
            if !c.is_zero() {
                out.add_term(l.clone(), &HbarSeries::monomial(self.order, p, c.clone()));
            }
        }
        out
    }

    /// Factorwise product with the right operand's coefficient read on
    /// factor `anchor`.
    pub fn mul_anchored(&self, ctx: &Context, other: &HTensor, anchor: usize) -> Result<HTensor> {
        if self.rank != other.rank {
            return Err(Error::DimensionMismatch {
                expected: self.rank,
                found: other.rank,
                context: "tensor product".into(),
            });
        }
        if anchor >= self.rank.max(1) {
            return Err(Error::IndexOutOfRange {
                index: anchor,
                limit: self.rank,
                context: "product anchor".into(),
            });
        }
        let ug = ctx.ug();
        let rank = self.rank;
        let order = self.order;
        let xs: Vec<(&Legs, &HbarSeries<Poly>, u32)> = self
            .terms
            .iter()
            .filter_map(|(l, c)| c.valuation().map(|v| (l, c, v)))
            .collect();
        let mut ys: Vec<(&Legs, &HbarSeries<Poly>, u32)> = other
            .terms
            .iter()
            .filter_map(|(l, c)| c.valuation().map(|v| (l, c, v)))
            .collect();
        ys.sort_by_key(|(_, _, v)| *v);
        let terms = xs
            .par_iter()
            .map(|(lx, cx, vx)| {
                let mut acc = BTreeMap::new();
                let alpha = &lx[anchor].d;
                let divisors = alpha.divisors();
                for (ly, cy, _) in ys.iter().take_while(|(_, _, vy)| vx + vy <= order) {
                    let mut pieces = Vec::new();
                    for gamma in &divisors {
                        let dcy = if gamma.is_zero() {
                            (*cy).clone()
                        } else {
                            cy.map(|c| c.derivative(gamma))
                        };
                        if dcy.is_zero() {
                            continue;
                        }
                        let coeff = cx.mul(&dcy).scale(&alpha.binomial(gamma));
                        if coeff.is_zero() {
                            continue;
                        }
                        let ds: Vec<MultiIndex> = (0..rank)
                            .map(|k| {
                                if k == anchor {
                                    alpha.checked_sub(gamma).unwrap().add(&ly[k].d)
                                } else {
                                    lx[k].d.add(&ly[k].d)
                                }
                            })
                            .collect();
                        pieces.push((ds, coeff));
                    }
                    if pieces.is_empty() {
                        continue;
                    }
                    let options: Vec<Vec<(Pbw, Rational)>> = (0..rank)
                        .map(|k| {
                            ug.mono_mul(&lx[k].u, &ly[k].u)
                                .iter()
                                .map(|(u, c)| (u.clone(), c.clone()))
                                .collect()
                        })
                        .collect();
                    let combos = cartesian(&options);
                    for (ds, coeff) in pieces {
                        for (us, w) in &combos {
                            let legs: Legs = ds.iter().zip(us).map(|(d, u)| Leg::new(d.clone(), u.clone())).collect();
                            merge(&mut acc, legs, coeff.scale(w));
                        }
                    }
                }
                acc
            })
            .reduce(BTreeMap::new, merge_maps);
        Ok(HTensor {
            terms,
            ..self.zero_like(rank)
        })
    }

    /// Factorwise product anchored at factor 1.
    pub fn mul(&self, ctx: &Context, other: &HTensor) -> Result<HTensor> {
        self.mul_anchored(ctx, other, 0)
    }

    /// Δ applied to factor `leg` (0-based), raising the rank by one.
    pub fn coproduct_at(&self, leg: usize) -> HTensor {
        let mut out = self.zero_like(self.rank + 1);
        for (legs, c) in &self.terms {
            let Leg { d, u } = &legs[leg];
            for gamma in d.divisors() {
                let dc = d.binomial(&gamma);
                let drest = d.checked_sub(&gamma).unwrap();
                for (b, rest, uc) in UeaAlgebra::coproduct(u) {
                    let mut new_legs = Vec::with_capacity(self.rank + 1);
                    new_legs.extend_from_slice(&legs[..leg]);
                    new_legs.push(Leg::new(gamma.clone(), b));
                    new_legs.push(Leg::new(drest.clone(), rest));
                    new_legs.extend_from_slice(&legs[leg + 1..]);
                    out.add_term(new_legs, &c.scale(&(&dc * &uc)));
                }
            }
        }
        out
    }

    /// Δ on an element of H.
    pub fn coproduct(&self) -> Result<HTensor> {
        if self.rank != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: self.rank,
                context: "coproduct".into(),
            });
        }
        Ok(self.coproduct_at(0))
    }

    /// ε applied to factor `leg`, lowering the rank by one.
    pub fn counit_at(&self, leg: usize) -> HTensor {
        let mut out = self.zero_like(self.rank - 1);
        for (legs, c) in &self.terms {
            if legs[leg].is_unit() {
                let mut rest = legs.clone();
                rest.remove(leg);
                out.add_term(rest, c);
            }
        }
        out
    }

    /// ε on an element of H: apply the D-part to 1 and the counit of U(g).
    pub fn counit(&self) -> HbarSeries<Poly> {
        let mut out = HbarSeries::zero(self.order, &self.ring.zero());
        for (legs, c) in &self.terms {
            if legs.iter().all(Leg::is_unit) {
                out.add_assign_ref(c);
            }
        }
        out
    }

    /// `x ▷ a = ε(x·a)` for x in H.
    pub fn anchor_act(&self, a: &HbarSeries<Poly>) -> Result<HbarSeries<Poly>> {
        if self.rank != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: self.rank,
                context: "anchor action".into(),
            });
        }
        let mut out = HbarSeries::zero(self.order, &self.ring.zero());
        for (legs, c) in &self.terms {
            if !legs[0].u.is_zero() {
                continue;
            }
            let da = a.map(|p| p.derivative(&legs[0].d));
            if !da.is_zero() {
                out.add_assign_ref(&c.mul(&da));
            }
        }
        Ok(out)
    }

    /// `self ⊗ 1`
    pub fn tensor_unit_right(&self, ctx: &Context) -> HTensor {
        let mut out = self.zero_like(self.rank + 1);
        for (legs, c) in &self.terms {
            let mut l = legs.clone();
            l.push(Leg::unit(ctx.n(), ctx.m()));
            out.add_term(l, c);
        }
        out
    }

    /// `1 ⊗ self`
    pub fn tensor_unit_left(&self, ctx: &Context) -> HTensor {
        let mut out = self.zero_like(self.rank + 1);
        for (legs, c) in &self.terms {
            let mut l = vec![Leg::unit(ctx.n(), ctx.m())];
            l.extend(legs.iter().cloned());
            out.add_term(l, c);
        }
        out
    }

    /// Term count per ℏ-power.
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

    /// The lowest-order nonzero term, rendered.
    pub fn first_term(&self, pair_names: &[String], coord_names: &[String]) -> Option<String> {
        let mut best: Option<(u32, &Legs, &Poly)> = None;
        for (legs, c) in &self.terms {
            if let Some(p) = c.valuation() {
                if best.map(|(bp, _, _)| p < bp).unwrap_or(true) {
                    best = Some((p, legs, c.coeff(p)));
                }
            }
        }
        best.map(|(p, legs, c)| {
            format!(
                "ℏ^{p} · ({}) · {}",
                c.display_with(coord_names),
                legs_display(legs, pair_names, coord_names)
            )
        })
    }

    pub fn to_file(&self) -> Vec<HTensorTermFile> {
        self.terms
            .iter()
            .map(|(legs, c)| HTensorTermFile {
                alphas: legs.iter().map(|l| l.d.as_slice().to_vec()).collect(),
                monomials: legs.iter().map(|l| l.u.as_slice().to_vec()).collect(),
                coeff: series_to_file(c),
            })
            .collect()
    }

    pub fn from_file(ctx: &Context, terms: &[HTensorTermFile]) -> Result<Self> {
        let rank = terms.first().map(|t| t.alphas.len()).unwrap_or(2);
        let mut out = Self::zero(ctx, rank);
        for t in terms {
            if t.alphas.len() != rank || t.monomials.len() != rank {
                return Err(Error::Format(
                    "every term needs one alpha and one monomial per factor".into(),
                ));
            }
            let mut legs = Vec::with_capacity(rank);
            for (a, u) in t.alphas.iter().zip(&t.monomials) {
                if a.len() != ctx.n() {
                    return Err(Error::DimensionMismatch {
                        expected: ctx.n(),
                        found: a.len(),
                        context: "derivative multi-index".into(),
                    });
                }
                if u.len() != ctx.m() {
                    return Err(Error::DimensionMismatch {
                        expected: ctx.m(),
                        found: u.len(),
                        context: "PBW monomial".into(),
                    });
                }
                legs.push(Leg::new(MultiIndex::from_slice(a), MultiIndex::from_slice(u)));
            }
            out.add_term(legs, &series_from_file(&t.coeff, ctx.ring(), ctx.order())?);
        }
        Ok(out)
    }

    pub fn display(&self, ctx: &Context) -> String {
        let names = ctx.pair().basis().to_vec();
        let coords = ctx.pair().coordinate_names();
        if self.terms.is_empty() {
            return "0".into();
        }
        self.terms
            .iter()
            .map(|(legs, c)| {
                format!(
                    "[{}] {}",
                    series_display(c, &coords),
                    legs_display(legs, &names, &coords)
                )
            })
            .collect::<Vec<_>>()
            .join("\n")
    }
}

fn series_display(c: &HbarSeries<Poly>, coords: &[String]) -> String {
    let parts: Vec<String> = c
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, p)| !p.is_zero())
        .map(|(k, p)| format!("ℏ^{k}({})", p.display_with(coords)))
        .collect();
    parts.join(" + ")
}

fn derivative_display(d: &MultiIndex, coords: &[String]) -> String {
    let parts: Vec<String> = d
        .as_slice()
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(i, &e)| {
            let name = format!("∂{}", coords.get(i).cloned().unwrap_or_else(|| (i + 1).to_string()));
            if e == 1 {
                name
            } else {
                format!("{name}^{e}")
            }
        })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join("")
    }
}

pub fn legs_display(legs: &[Leg], names: &[String], coords: &[String]) -> String {
    legs.iter()
        .map(|l| format!("({}⊗{})", derivative_display(&l.d, coords), pbw_display(&l.u, names)))
        .collect::<Vec<_>>()
        .join(" | ")
}

impl fmt::Display for Leg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(∂^{:?}⊗x^{:?})", self.d.as_slice(), self.u.as_slice())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct HTensorTermFile {
    pub alphas: Vec<Vec<u32>>,
    pub monomials: Vec<Vec<u32>>,
    pub coeff: SeriesFile,
}

/// Outcome of the twistor equations for `F ∈ H ⊗_R H`.
#[derive(Clone, Debug)]
pub struct TwistorReport {
    /// (Δ⊗id)F·(F⊗1) − (id⊗Δ)F·(1⊗F)
    pub cocycle_residual: HTensor,
    /// (ε⊗id)F − 1
    pub left_counit_residual: HTensor,
    /// (id⊗ε)F − 1
    pub right_counit_residual: HTensor,
    /// ℏ⁰ part equals 1⊗1, which makes F♯ invertible order by order.
    pub sharp_invertible: bool,
}

impl TwistorReport {
    pub fn passed(&self) -> bool {
        self.cocycle_residual.is_zero() && self.left_counit_residual.is_zero() && self.right_counit_residual.is_zero()
    }
}

/// Whether the ℏ⁰ part of a rank-2 tensor is exactly 1⊗1.
pub fn is_unital(ctx: &Context, f: &HTensor) -> bool {
    f.hbar_part(0).sub(&HTensor::unit(ctx, f.rank())).is_zero()
}

/// Checks the twistor cocycle and counit equations.
pub fn check_twistor(ctx: &Context, f: &HTensor) -> Result<TwistorReport> {
    if f.rank() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: f.rank(),
            context: "twistor".into(),
        });
    }
    let (lhs, rhs) = rayon::join(
        || f.coproduct_at(0).mul_anchored(ctx, &f.tensor_unit_right(ctx), 0),
        || f.coproduct_at(1).mul_anchored(ctx, &f.tensor_unit_left(ctx), 1),
    );
    let cocycle_residual = lhs?.sub(&rhs?);
    let one = HTensor::unit(ctx, 1);
    Ok(TwistorReport {
        cocycle_residual,
        left_counit_residual: f.counit_at(0).sub(&one),
        right_counit_residual: f.counit_at(1).sub(&one),
        sharp_invertible: is_unital(ctx, f),
    })
}

/// `a ∗_F b = Σ (F₁ ▷ a)(F₂ ▷ b)`
pub fn twisted_product(f: &HTensor, a: &HbarSeries<Poly>, b: &HbarSeries<Poly>) -> Result<HbarSeries<Poly>> {
    let mut out = HbarSeries::zero(f.order, &f.ring.zero());
    for (legs, c) in &f.terms {
        if !legs[0].u.is_zero() || !legs[1].u.is_zero() {
            continue;
        }
        let da = a.map(|p| p.derivative(&legs[0].d));
        if da.is_zero() {
            continue;
        }
        let db = b.map(|p| p.derivative(&legs[1].d));
        if db.is_zero() {
            continue;
        }
        out.add_assign_ref(&c.mul(&da).mul(&db));
    }
    Ok(out)
}

/// `α_F(a) = Σ (F₁ ▷ a)·F₂`
pub fn twisted_source(ctx: &Context, f: &HTensor, a: &HbarSeries<Poly>) -> HTensor {
    let mut out = HTensor::zero(ctx, 1);
    for (legs, c) in &f.terms {
        if !legs[0].u.is_zero() {
            continue;
        }
        let da = a.map(|p| p.derivative(&legs[0].d));
        if !da.is_zero() {
            out.add_term(vec![legs[1].clone()], &c.mul(&da));
        }
    }
    out
}

/// `β_F(a) = Σ (F₂ ▷ a)·F₁`
pub fn twisted_target(ctx: &Context, f: &HTensor, a: &HbarSeries<Poly>) -> HTensor {
    let mut out = HTensor::zero(ctx, 1);
    for (legs, c) in &f.terms {
        if !legs[1].u.is_zero() {
            continue;
        }
        let da = a.map(|p| p.derivative(&legs[1].d));
        if !da.is_zero() {
            out.add_term(vec![legs[0].clone()], &c.mul(&da));
        }
    }
    out
}

/// `F♯(y) = F·y` with y read as a plain representative.
pub fn f_sharp(ctx: &Context, f: &HTensor, y: &HTensor) -> Result<HTensor> {
    f.mul(ctx, y)
}

/// Δ_F(x): solves `F♯(y) = Δ(x)·F` order by order.
pub fn twisted_coproduct(ctx: &Context, f: &HTensor, x: &HTensor) -> Result<HTensor> {
    if !is_unital(ctx, f) {
        return Err(Error::NonUnital("the ℏ⁰ part of F must be 1⊗1".into()));
    }
    let target = x.coproduct()?.mul(ctx, f)?;
    let correction = f.sub(&HTensor::unit(ctx, 2));
    let mut y = target.clone();
    for _ in 0..ctx.order() {
        y = target.sub(&correction.mul(ctx, &y)?);
    }
    Ok(y)
}

/// Residuals of the twisted-structure identities for one twistor.
#[derive(Clone, Debug)]
pub struct TwistedStructureReport {
    pub associativity: Vec<HbarSeries<Poly>>,
    pub unit: Vec<HbarSeries<Poly>>,
    pub source_hom: Vec<HTensor>,
    pub target_antihom: Vec<HTensor>,
    pub commuting: Vec<HTensor>,
    pub module_identity: Vec<HTensor>,
    pub coproduct_round_trip: Vec<HTensor>,
    pub coproduct_unit: HTensor,
}

impl TwistedStructureReport {
    pub fn passed(&self) -> bool {
        self.associativity.iter().all(HbarSeries::is_zero)
            && self.unit.iter().all(HbarSeries::is_zero)
            && self.source_hom.iter().all(HTensor::is_zero)
            && self.target_antihom.iter().all(HTensor::is_zero)
            && self.commuting.iter().all(HTensor::is_zero)
            && self.module_identity.iter().all(HTensor::is_zero)
            && self.coproduct_round_trip.iter().all(HTensor::is_zero)
            && self.coproduct_unit.is_zero()
    }
}

/// Runs every identity of the twisted algebroid on coefficient monomials of
/// degree ≤ `degree` and on the generators of H.
pub fn check_twisted_structures(ctx: &Context, f: &HTensor, degree: u32) -> Result<TwistedStructureReport> {
    let n = ctx.n();
    let k = ctx.order();
    let monos: Vec<HbarSeries<Poly>> = MultiIndex::all_up_to_degree(n, degree)
        .into_iter()
        .map(|m| HbarSeries::constant(k, ctx.ring().monomial(&m, Rational::one())))
        .collect();
    let star = |a: &HbarSeries<Poly>, b: &HbarSeries<Poly>| twisted_product(f, a, b);
    let mut report = TwistedStructureReport {
        associativity: Vec::new(),
        unit: Vec::new(),
        source_hom: Vec::new(),
        target_antihom: Vec::new(),
        commuting: Vec::new(),
        module_identity: Vec::new(),
        coproduct_round_trip: Vec::new(),
        coproduct_unit: HTensor::zero(ctx, 2),
    };
    let one = ctx.one_series();
    for a in &monos {
        report.unit.push(star(&one, a)?.sub(a));
        report.unit.push(star(a, &one)?.sub(a));
        for b in &monos {
            let ab = star(a, b)?;
            for c in &monos {
                report.associativity.push(star(&ab, c)?.sub(&star(a, &star(b, c)?)?));
            }
            let (sa, sb) = (twisted_source(ctx, f, a), twisted_source(ctx, f, b));
            let (ta, tb) = (twisted_target(ctx, f, a), twisted_target(ctx, f, b));
            report
                .source_hom
                .push(twisted_source(ctx, f, &ab).sub(&sa.mul(ctx, &sb)?));
            report
                .target_antihom
                .push(twisted_target(ctx, f, &ab).sub(&tb.mul(ctx, &ta)?));
            report.commuting.push(sa.mul(ctx, &tb)?.sub(&tb.mul(ctx, &sa)?));
        }
        let left = f.mul_anchored(ctx, &twisted_target(ctx, f, a).tensor_unit_right(ctx), 0)?;
        let right = f.mul_anchored(ctx, &twisted_source(ctx, f, a).tensor_unit_left(ctx), 1)?;
        report.module_identity.push(left.sub(&right));
    }
    for x in generators_of_h(ctx) {
        let y = twisted_coproduct(ctx, f, &x)?;
        let round_trip = f_sharp(ctx, f, &y)?.sub(&x.coproduct()?.mul(ctx, f)?);
        report.coproduct_round_trip.push(round_trip);
    }
    report.coproduct_unit = twisted_coproduct(ctx, f, &HTensor::unit(ctx, 1))?.sub(&HTensor::unit(ctx, 2));
    Ok(report)
}

/// ∂ᵢ⊗1, λᵢ·⊗1 and 1⊗x_a: a generating set of H.
pub fn generators_of_h(ctx: &Context) -> Vec<HTensor> {
    let (n, m, k) = (ctx.n(), ctx.m(), ctx.order());
    let mut out = Vec::new();
    for i in 0..n {
        out.push(HTensor::term(
            ctx,
            vec![Leg::new(MultiIndex::unit(n, i), MultiIndex::zero(m))],
            ctx.one_series(),
        ));
        let lam = HbarSeries::constant(k, ctx.ring().var(i).unwrap());
        out.push(HTensor::term(ctx, vec![Leg::unit(n, m)], lam));
    }
    for a in 0..m {
        out.push(HTensor::term(
            ctx,
            vec![Leg::new(MultiIndex::zero(n), MultiIndex::unit(m, a))],
            ctx.one_series(),
        ));
    }
    out
}

/// `Σ (coefficient) · (∂^α ⊗ u)` from a differential operator and a U(g)
/// monomial.
pub fn h_element_from_diffop(ctx: &Context, op: &crate::weyl::DiffOp, u: &Pbw) -> HTensor {
    let mut out = HTensor::zero(ctx, 1);
    for (alpha, c) in op.terms() {
        out.add_term(vec![Leg::new(alpha.clone(), u.clone())], c);
    }
    out
}
