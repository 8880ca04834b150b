//! Dynamical twists `F ∈ R ⊗ U(g) ⊗ U(g)`, their verifiers, the Gutt
//! twistor, and the passage from F to an element of H ⊗_R H.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::One;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::context::Context;
use crate::error::{Error, Result};
use crate::groupoid::{check_twistor, HTensor, Leg, TwistorReport};
use crate::io::{poly_from_terms, poly_to_terms, PolyTerm};
use crate::linalg::{Rref, SparseRow};
use crate::poly::{CoeffRing, MultiIndex, Poly};
use crate::rational::{factorial, int, Rational};
use crate::series::HbarSeries;
use crate::uea::{Pbw, PbwPoly, UeaAlgebra};
use crate::utensor::UTensor;

/// `F = Σ ℏ^p b_{p,rs} ⊗ U_r ⊗ U_s` with ℏ⁰ part 1⊗1⊗1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DynTwist {
    inner: UTensor,
}

/// Serialized term of a dynamical twist.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct DynTermFile {
    pub hbar: u32,
    pub coeff: Vec<PolyTerm>,
    pub left: Vec<u32>,
    pub right: Vec<u32>,
}

impl DynTwist {
    /// 1⊗1⊗1
    pub fn unit(ctx: &Context) -> Self {
        DynTwist {
            inner: UTensor::unit(ctx, 2),
        }
    }

    /// Wraps a two-leg tensor after checking the ℏ⁰ part.
    pub fn from_utensor(ctx: &Context, inner: UTensor) -> Result<Self> {
        if inner.legs() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: inner.legs(),
                context: "dynamical twist legs".into(),
            });
        }
        if inner.hbar_part(0) != UTensor::unit(ctx, 2) {
            return Err(Error::NonUnital(
                "the ℏ⁰ part of a dynamical twist must be 1⊗1⊗1".into(),
            ));
        }
        Ok(DynTwist { inner })
    }

    /// `1⊗1⊗1 + Σ ℏ^p b ⊗ U_r ⊗ U_s` from exact coefficients; terms with
    /// `p = 0` are added as given.
    pub fn from_terms(ctx: &Context, terms: &[(u32, Poly, Pbw, Pbw)]) -> Result<Self> {
        let mut inner = UTensor::zero(ctx, 2);
        for (p, b, r, s) in terms {
            for u in [r, s] {
                if u.len() != ctx.m() {
                    return Err(Error::DimensionMismatch {
                        expected: ctx.m(),
                        found: u.len(),
                        context: "PBW monomial".into(),
                    });
                }
            }
            if *p > ctx.order() {
                continue;
            }
            inner.add_term(vec![r.clone(), s.clone()], &ctx.hbar_monomial(*p, ctx.embed(b)?));
        }
        Self::from_utensor(ctx, inner)
    }

    /// `1⊗1⊗1 + ℏ^p F₁` for a correction with no ℏ⁰ part of its own.
    pub fn unit_plus(ctx: &Context, terms: &[(u32, Poly, Pbw, Pbw)]) -> Result<Self> {
        let mut all = vec![(0, CoeffRing::exact(ctx.n()).one(), ctx.ug().one(), ctx.ug().one())];
        all.extend_from_slice(terms);
        Self::from_terms(ctx, &all)
    }

    pub fn from_file(ctx: &Context, terms: &[DynTermFile]) -> Result<Self> {
        let parsed = terms
            .iter()
            .map(|t| {
                Ok((
                    t.hbar,
                    poly_from_terms(&t.coeff, ctx.n())?,
                    MultiIndex::from_slice(&t.left),
                    MultiIndex::from_slice(&t.right),
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_terms(ctx, &parsed)
    }

    pub fn to_file(&self) -> Vec<DynTermFile> {
        let mut out = Vec::new();
        for (legs, c) in self.inner.terms() {
            for (p, slot) in c.coeffs().iter().enumerate() {
                if slot.is_zero() {
                    continue;
                }
                out.push(DynTermFile {
                    hbar: p as u32,
                    coeff: poly_to_terms(slot),
                    left: legs[0].as_slice().to_vec(),
                    right: legs[1].as_slice().to_vec(),
                });
            }
        }
        out.sort_by(|a, b| (a.hbar, &a.left, &a.right).cmp(&(b.hbar, &b.left, &b.right)));
        out
    }

    pub fn as_utensor(&self) -> &UTensor {
        &self.inner
    }

    pub fn display(&self, ctx: &Context) -> String {
        self.inner.display(ctx)
    }
}

/// Residuals of `(id⊗ε⊗id)F = (id⊗id⊗ε)F = 1⊗1`.
#[derive(Clone, Debug)]
pub struct DynCounitReport {
    pub left: UTensor,
    pub right: UTensor,
}

impl DynCounitReport {
    pub fn passed(&self) -> bool {
        self.left.is_zero() && self.right.is_zero()
    }
}

pub fn dyn_check_counit(ctx: &Context, f: &DynTwist) -> DynCounitReport {
    let one = UTensor::unit(ctx, 1);
    DynCounitReport {
        left: f.inner.counit_at(0).sub(&one),
        right: f.inner.counit_at(1).sub(&one),
    }
}

/// `F₁₂^{(3)} = Σ ℏ^{k+p}/k! ∂_{i₁…i_k} b ⊗ U_r ⊗ U_s ⊗ l_{i₁}···l_{i_k}`,
/// summed over ordered tuples.
pub fn dyn_shift12(ctx: &Context, f: &DynTwist) -> Result<UTensor> {
    let n = ctx.n();
    let mut out = UTensor::zero(ctx, 3);
    let mut tuples: Vec<Vec<usize>> = vec![Vec::new()];
    for k in 0..=ctx.order() {
        let weight = factorial(k).recip();
        for tuple in &tuples {
            let word = ctx.ug().normalize_word_plain(tuple)?;
            let mut alpha = MultiIndex::zero(n);
            for &i in tuple {
                alpha = alpha.add_unit(i);
            }
            for (legs, c) in f.inner.terms() {
                let dc = c.map(|p| p.derivative(&alpha)).shift(k).scale(&weight);
                if dc.is_zero() {
                    continue;
                }
                for (u, w) in &word {
                    out.add_term(vec![legs[0].clone(), legs[1].clone(), u.clone()], &dc.scale(w));
                }
            }
        }
        tuples = tuples
            .iter()
            .flat_map(|t| {
                (0..n).map(move |i| {
                    let mut t = t.clone();
                    t.push(i);
                    t
                })
            })
            .collect();
    }
    Ok(out)
}

/// Same element as [`dyn_shift12`], summed over multi-indices with the
/// symmetrized fourth leg: `Σ_γ ℏ^{|γ|+p}/γ! ∂^γ b ⊗ U_r ⊗ U_s ⊗ Sym(γ)`.
pub fn dyn_shift12_symmetric(ctx: &Context, f: &DynTwist) -> UTensor {
    let mut out = UTensor::zero(ctx, 3);
    for gamma in MultiIndex::all_up_to_degree(ctx.n(), ctx.order()) {
        let weight = gamma.factorial().recip();
        let sym = ctx.sym(&gamma);
        for (legs, c) in f.inner.terms() {
            let dc = c.map(|p| p.derivative(&gamma)).shift(gamma.degree()).scale(&weight);
            if dc.is_zero() {
                continue;
            }
            for (u, w) in sym.iter() {
                out.add_term(vec![legs[0].clone(), legs[1].clone(), ctx.l_to_g(u)], &dc.scale(w));
            }
        }
    }
    out
}

/// `F₂₃ = Σ ℏ^p b ⊗ 1 ⊗ U_r ⊗ U_s`
pub fn dyn_shift23(ctx: &Context, f: &DynTwist) -> UTensor {
    f.inner.insert_unit(ctx, 0)
}

/// `(id⊗Δ⊗id)F ∗ F₁₂^{(3)} − (id⊗id⊗Δ)F ∗ F₂₃`
pub fn dyn_cocycle_residual(ctx: &Context, f: &DynTwist) -> Result<UTensor> {
    let f12 = dyn_shift12(ctx, f)?;
    let f23 = dyn_shift23(ctx, f);
    let (lhs, rhs) = rayon::join(
        || f.inner.coproduct_at(0).mul(ctx, &f12),
        || f.inner.coproduct_at(1).mul(ctx, &f23),
    );
    Ok(lhs?.sub(&rhs?))
}

/// `ad*_{lᵢ}⊗1⊗1(F) + [1⊗lᵢ⊗1 + 1⊗1⊗lᵢ, F]` for every basis element of l.
pub fn dyn_invariance_residuals(ctx: &Context, f: &DynTwist) -> Result<Vec<UTensor>> {
    let pair = ctx.pair();
    (0..ctx.n())
        .map(|i| {
            let coad = f.inner.map_coeffs(|c| {
                let slots = c
                    .coeffs()
                    .iter()
                    .map(|p| pair.coadjoint_act(i, p))
                    .collect::<Result<Vec<_>>>()?;
                Ok(HbarSeries::from_coeffs(slots))
            })?;
            let bracket = |u: &Pbw| {
                ctx.ug()
                    .commutator_with_generator(i, &PbwPoly::from([(u.clone(), Rational::one())]))
            };
            Ok(coad.add(&f.inner.map_leg(0, bracket)).add(&f.inner.map_leg(1, bracket)))
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct InvarianceReport {
    pub residuals: Vec<UTensor>,
}

impl InvarianceReport {
    pub fn passed(&self) -> bool {
        self.residuals.iter().all(UTensor::is_zero)
    }
}

pub fn dyn_check_invariance(ctx: &Context, f: &DynTwist) -> Result<InvarianceReport> {
    Ok(InvarianceReport {
        residuals: dyn_invariance_residuals(ctx, f)?,
    })
}

#[derive(Clone, Debug)]
pub struct DynTwistReport {
    pub counit: DynCounitReport,
    pub cocycle_residual: UTensor,
}

impl DynTwistReport {
    pub fn passed(&self) -> bool {
        self.counit.passed() && self.cocycle_residual.is_zero()
    }
}

pub fn dyn_check(ctx: &Context, f: &DynTwist) -> Result<DynTwistReport> {
    Ok(DynTwistReport {
        counit: dyn_check_counit(ctx, f),
        cocycle_residual: dyn_cocycle_residual(ctx, f)?,
    })
}

/// Θ_Gutt = Σ c_{αβ} Σ_γ ℏ^{|γ|}/γ! (∂^{α+γ}⊗1) ⊗ (∂^β ⊗ Sym(γ)), with
/// `Θ_PBW = Σ c_{αβ} ∂^α⊗∂^β`. Memoized per context.
pub fn build_gutt_twistor(ctx: &Context) -> Result<Arc<HTensor>> {
    if let Some(hit) = ctx.gutt.lock().unwrap().as_ref() {
        return Ok(hit.clone());
    }
    let theta = ctx.theta_pbw()?;
    let (n, m, k) = (ctx.n(), ctx.m(), ctx.order());
    let mut out = HTensor::zero(ctx, 2);
    for gamma in MultiIndex::all_up_to_degree(n, k) {
        let weight = gamma.factorial().recip();
        let sym = ctx.sym(&gamma);
        for ((alpha, beta), c) in theta.terms() {
            let c = c.shift(gamma.degree()).scale(&weight);
            if c.is_zero() {
                continue;
            }
            for (u, w) in sym.iter() {
                let legs = vec![
                    Leg::new(alpha.add(&gamma), MultiIndex::zero(m)),
                    Leg::new(beta.clone(), ctx.l_to_g(u)),
                ];
                out.add_term(legs, &c.scale(w));
            }
        }
    }
    let out = Arc::new(out);
    *ctx.gutt.lock().unwrap() = Some(out.clone());
    Ok(out)
}

/// The Gutt left-multiplication operator of a function on l*, as an
/// element of H: `Σ_γ ℏ^{|γ|}/γ! (∂^γ g ∗PBW) ⊗ Sym(γ)`.
pub fn gutt_mult_op(ctx: &Context, g: &HbarSeries<Poly>) -> Result<HTensor> {
    let theta = ctx.theta_pbw()?;
    let mut out = HTensor::zero(ctx, 1);
    for gamma in MultiIndex::all_up_to_degree(ctx.n(), ctx.order()) {
        let dg = g
            .map(|p| p.derivative(&gamma))
            .shift(gamma.degree())
            .scale(&gamma.factorial().recip());
        if dg.is_zero() {
            continue;
        }
        let op = theta.left_operator(&dg);
        for (u, w) in ctx.sym(&gamma).iter() {
            for (beta, c) in op.terms() {
                out.add_term(vec![Leg::new(beta.clone(), ctx.l_to_g(u))], &c.scale(w));
            }
        }
    }
    Ok(out)
}

/// `Σ ℏ^p Δ(b ∗PBW)·(U_r ⊗ U_s)`
pub fn lift_fbar(ctx: &Context, f: &DynTwist) -> Result<HTensor> {
    let theta = ctx.theta_pbw()?;
    let mut out = HTensor::zero(ctx, 2);
    for (legs, b) in f.inner.terms() {
        let op = theta.left_operator(b);
        for (beta, c) in op.terms() {
            for gamma in beta.divisors() {
                let w = beta.binomial(&gamma);
                let rest = beta.checked_sub(&gamma).unwrap();
                out.add_term(
                    vec![Leg::new(gamma, legs[0].clone()), Leg::new(rest, legs[1].clone())],
                    &c.scale(&w),
                );
            }
        }
    }
    Ok(out)
}

/// `𝓕 = lift_fbar(F)·Θ_Gutt`
pub fn bridge(ctx: &Context, f: &DynTwist) -> Result<HTensor> {
    let gutt = build_gutt_twistor(ctx)?;
    lift_fbar(ctx, f)?.mul(ctx, &gutt)
}

/// `Δ(g ∗Gutt)·F̄ − F̄·Δ(g ∗Gutt)`
pub fn gutt_commutation_residual(ctx: &Context, f: &DynTwist, g: &Poly) -> Result<HTensor> {
    let op = gutt_mult_op(ctx, &HbarSeries::constant(ctx.order(), ctx.embed(g)?))?.coproduct()?;
    let fbar = lift_fbar(ctx, f)?;
    Ok(op.mul(ctx, &fbar)?.sub(&fbar.mul(ctx, &op)?))
}

#[derive(Clone, Debug)]
pub struct EquivalenceReport {
    pub dynamical: DynTwistReport,
    pub twistor: TwistorReport,
    pub dyn_pass: bool,
    pub twistor_pass: bool,
    pub agree: bool,
}

/// Runs the dynamical-twist checks on F and the twistor checks on its
/// bridge. Fails with [`Error::Hypothesis`] unless F is l-invariant.
pub fn check_equivalence(ctx: &Context, f: &DynTwist) -> Result<EquivalenceReport> {
    let inv = dyn_check_invariance(ctx, f)?;
    if !inv.passed() {
        let names = ctx.pair().basis();
        let i = inv.residuals.iter().position(|r| !r.is_zero()).unwrap();
        return Err(Error::Hypothesis(format!(
            "F is not l-invariant (fails for {})",
            names[i]
        )));
    }
    let (dynamical, twistor) = rayon::join(
        || dyn_check(ctx, f),
        || bridge(ctx, f).and_then(|b| check_twistor(ctx, &b)),
    );
    let (dynamical, twistor) = (dynamical?, twistor?);
    let dyn_pass = dynamical.passed();
    let twistor_pass = twistor.passed();
    Ok(EquivalenceReport {
        dynamical,
        twistor,
        dyn_pass,
        twistor_pass,
        agree: dyn_pass == twistor_pass,
    })
}

#[derive(Clone, Debug)]
pub struct ExchangeReport {
    pub r: UTensor,
    /// `F₂₁ ∗ R − F`
    pub round_trip_residual: UTensor,
}

/// `R = F₂₁⁻¹ ∗ F`
pub fn exchange_r(ctx: &Context, f: &DynTwist) -> Result<ExchangeReport> {
    let f21 = f.inner.swap(0, 1);
    let r = f21.inverse(ctx)?.mul(ctx, &f.inner)?;
    let round_trip_residual = f21.mul(ctx, &r)?.sub(&f.inner);
    Ok(ExchangeReport { r, round_trip_residual })
}

/// Settings for random l-invariant corrections `F₁`.
#[derive(Clone, Copy, Debug)]
pub struct RandomTwistSpec {
    pub coeff_degree: u32,
    pub leg_degree: u32,
    /// Restrict both legs to positive PBW degree, which makes the counit
    /// condition hold.
    pub positive_legs: bool,
    /// Also impose the ℏ¹ part of the cocycle condition,
    /// `(Δ⊗id)F₁ + F₁⊗1 = (id⊗Δ)F₁ + 1⊗F₁`.
    pub linear_cocycle: bool,
}

impl Default for RandomTwistSpec {
    fn default() -> Self {
        RandomTwistSpec {
            coeff_degree: 2,
            leg_degree: 2,
            positive_legs: false,
            linear_cocycle: false,
        }
    }
}

/// Basis `λ^a ⊗ u ⊗ v` of the search space and a basis of the l-invariant
/// subspace, as coordinate vectors.
pub struct InvariantSpace {
    pub basis: Vec<(MultiIndex, Pbw, Pbw)>,
    pub kernel: Vec<SparseRow>,
}

pub fn invariant_space(ctx: &Context, spec: RandomTwistSpec) -> Result<InvariantSpace> {
    let (n, m) = (ctx.n(), ctx.m());
    let pair = ctx.pair();
    let exact = CoeffRing::exact(n);
    let min_leg = if spec.positive_legs { 1 } else { 0 };
    let legs: Vec<Pbw> = MultiIndex::all_up_to_degree(m, spec.leg_degree)
        .into_iter()
        .filter(|u| u.degree() >= min_leg)
        .collect();
    let coeffs = MultiIndex::all_up_to_degree(n, spec.coeff_degree);
    let mut basis = Vec::new();
    for a in &coeffs {
        for u in &legs {
            for v in &legs {
                basis.push((a.clone(), u.clone(), v.clone()));
            }
        }
    }
    // rows keyed by (generator, output monomial, output legs)
    let mut rows: BTreeMap<(usize, MultiIndex, Pbw, Pbw), SparseRow> = BTreeMap::new();
    let mut push = |key: (usize, MultiIndex, Pbw, Pbw), col: usize, c: Rational| {
        let row = rows.entry(key).or_default();
        let e = row.entry(col).or_insert_with(|| Rational::from_integer(0.into()));
        *e += c;
    };
    for (col, (a, u, v)) in basis.iter().enumerate() {
        let lam = exact.monomial(a, Rational::one());
        for i in 0..n {
            for (mono, c) in pair.coadjoint_act(i, &lam)?.terms() {
                push((i, mono.clone(), u.clone(), v.clone()), col, c.clone());
            }
            let gen = |w: &Pbw| {
                ctx.ug()
                    .commutator_with_generator(i, &PbwPoly::from([(w.clone(), Rational::one())]))
            };
            for (uu, c) in gen(u) {
                push((i, a.clone(), uu, v.clone()), col, c);
            }
            for (vv, c) in gen(v) {
                push((i, a.clone(), u.clone(), vv), col, c);
            }
        }
    }
    let mut rref = Rref::new(basis.len());
    for (_, row) in rows {
        rref.insert(row);
    }
    if spec.linear_cocycle {
        let one = MultiIndex::zero(m);
        let mut rows: BTreeMap<(MultiIndex, [Pbw; 3]), SparseRow> = BTreeMap::new();
        for (col, (a, u, v)) in basis.iter().enumerate() {
            let mut push = |legs: [Pbw; 3], c: Rational| {
                *rows
                    .entry((a.clone(), legs))
                    .or_default()
                    .entry(col)
                    .or_insert_with(|| int(0)) += c;
            };
            for (u1, u2, c) in UeaAlgebra::coproduct(u) {
                push([u1, u2, v.clone()], c);
            }
            push([u.clone(), v.clone(), one.clone()], int(1));
            for (v1, v2, c) in UeaAlgebra::coproduct(v) {
                push([u.clone(), v1, v2], -c);
            }
            push([one.clone(), u.clone(), v.clone()], int(-1));
        }
        for (_, row) in rows {
            rref.insert(row);
        }
    }
    Ok(InvariantSpace {
        basis,
        kernel: rref.nullspace(),
    })
}

/// Draws `count` twists `1 + ℏF₁` with F₁ a random small-integer combination
/// of one to three invariant basis vectors. Cycles through the full space,
/// the positive-leg subspace, and the solutions of the ℏ¹ cocycle condition.
pub fn random_invariant_twists(
    ctx: &Context,
    seed: u64,
    count: usize,
    coeff_degree: u32,
    leg_degree: u32,
) -> Result<Vec<DynTwist>> {
    let space = |positive_legs, linear_cocycle| {
        invariant_space(
            ctx,
            RandomTwistSpec {
                coeff_degree,
                leg_degree,
                positive_legs,
                linear_cocycle,
            },
        )
    };
    let spaces = [space(false, false)?, space(true, false)?, space(true, true)?];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let exact = CoeffRing::exact(ctx.n());
    let mut out = Vec::with_capacity(count);
    for draw in 0..count {
        let space = &spaces[draw % spaces.len()];
        if space.kernel.is_empty() {
            out.push(DynTwist::unit(ctx));
            continue;
        }
        let picks = rng.gen_range(1..=3.min(space.kernel.len()));
        let chosen: Vec<&SparseRow> = space.kernel.choose_multiple(&mut rng, picks).collect();
        let mut combo: BTreeMap<usize, Rational> = BTreeMap::new();
        for v in chosen {
            let mut w: i64 = 0;
            while w == 0 {
                w = rng.gen_range(-3..=3);
            }
            for (col, c) in v {
                *combo.entry(*col).or_insert_with(|| int(0)) += c * int(w);
            }
        }
        let terms: Vec<(u32, Poly, Pbw, Pbw)> = combo
            .into_iter()
            .filter(|(_, c)| *c != int(0))
            .map(|(col, c)| {
                let (a, u, v) = &space.basis[col];
                (1, exact.monomial(a, c), u.clone(), v.clone())
            })
            .collect();
        out.push(DynTwist::unit_plus(ctx, &terms)?);
    }
    Ok(out)
}
