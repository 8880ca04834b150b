//! Classical limit of a twist: the bivector on l* × G built from the linear
//! Poisson structure, the canonical mixing term and θ, and its Jacobi test.
//!
//! Generators are `dᵢ = ∂/∂λᵢ` and abstract left-invariant fields `X_a`.
//! The `dᵢ` act on coefficients by differentiation and commute with
//! everything; the `X_a` act as zero on coefficients and bracket through the
//! structure constants. The wedge is `v∧w = v⊗w − w⊗v`.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::context::Context;
use crate::dynamical::DynTwist;
use crate::error::{Error, Result};
use crate::io::{poly_from_terms, poly_to_terms, PolyTerm};
use crate::lie::LieAlgebraPair;
use crate::poly::{CoeffRing, MultiIndex, Poly};
use crate::rational::{frac, int, Rational};

/// A frame generator: `D(i) = ∂/∂λᵢ` or `X(a)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Gen {
    D(usize),
    X(usize),
}

impl Gen {
    pub fn name(&self, pair: &LieAlgebraPair) -> String {
        match self {
            Gen::D(i) => format!("d{}", i + 1),
            Gen::X(a) => pair.basis_name(*a).to_string(),
        }
    }

    pub fn parse(pair: &LieAlgebraPair, s: &str) -> Result<Gen> {
        if let Some(i) = s.strip_prefix('d').and_then(|r| r.parse::<usize>().ok()) {
            if (1..=pair.dim_l()).contains(&i) && pair.index_of(s).is_none() {
                return Ok(Gen::D(i - 1));
            }
        }
        pair.index_of(s)
            .map(Gen::X)
            .ok_or_else(|| Error::Format(format!("unknown generator {s}")))
    }
}

/// `Σ c_S e_{S₁}∧…∧e_{S_p}` over strictly increasing generator lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Multivector {
    ring: CoeffRing,
    terms: BTreeMap<Vec<Gen>, Poly>,
}

/// A degree-2 multivector.
pub type Bivector = Multivector;

/// Vector field `Σ Vᵃ e_a`.
type VectorField = BTreeMap<Gen, Poly>;

/// Sorts a generator list, returning the permutation sign, or `None` on a
/// repeated generator.
fn sort_sign(mut gens: Vec<Gen>) -> Option<(Vec<Gen>, i64)> {
    let mut sign = 1;
    for i in 1..gens.len() {
        let mut j = i;
        while j > 0 && gens[j - 1] > gens[j] {
            gens.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
        if j > 0 && gens[j - 1] == gens[j] {
            return None;
        }
    }
    Some((gens, sign))
}

impl Multivector {
    pub fn zero(ring: &CoeffRing) -> Self {
        Multivector {
            ring: ring.clone(),
            terms: BTreeMap::new(),
        }
    }

    pub fn ring(&self) -> &CoeffRing {
        &self.ring
    }

    pub fn terms(&self) -> &BTreeMap<Vec<Gen>, Poly> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Adds `c · g₁∧…∧g_p` in any order.
    pub fn add_wedge(&mut self, gens: &[Gen], c: &Poly) {
        if c.is_zero() {
            return;
        }
        let Some((sorted, sign)) = sort_sign(gens.to_vec()) else {
            return;
        };
        let entry = self.terms.entry(sorted.clone()).or_insert_with(|| self.ring.zero());
        entry.add_scaled(c, &int(sign));
        if entry.is_zero() {
            self.terms.remove(&sorted);
        }
    }

    /// Coefficient of `g₁∧…∧g_p` in the given order.
    pub fn component(&self, gens: &[Gen]) -> Poly {
        match sort_sign(gens.to_vec()) {
            Some((sorted, sign)) => self
                .terms
                .get(&sorted)
                .map(|c| c.scale(&int(sign)))
                .unwrap_or_else(|| self.ring.zero()),
            None => self.ring.zero(),
        }
    }

    pub fn add(&self, other: &Multivector) -> Multivector {
        let mut out = self.clone();
        for (g, c) in &other.terms {
            out.add_wedge(g, c);
        }
        out
    }

    pub fn sub(&self, other: &Multivector) -> Multivector {
        let mut out = self.clone();
        for (g, c) in &other.terms {
            out.add_wedge(g, &c.neg());
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Multivector {
        let mut out = Multivector::zero(&self.ring);
        for (g, v) in &self.terms {
            out.add_wedge(g, &v.scale(c));
        }
        out
    }

    /// Exterior product.
    pub fn wedge(&self, other: &Multivector) -> Multivector {
        let mut out = Multivector::zero(&self.ring);
        for (ga, ca) in &self.terms {
            for (gb, cb) in &other.terms {
                let mut g = ga.clone();
                g.extend_from_slice(gb);
                out.add_wedge(&g, &(ca * cb));
            }
        }
        out
    }

    /// Whether every term has `p` generators.
    pub fn is_homogeneous(&self, p: usize) -> bool {
        self.terms.keys().all(|g| g.len() == p)
    }

    pub fn display(&self, pair: &LieAlgebraPair) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let coords = pair.coordinate_names();
        self.terms
            .iter()
            .map(|(g, c)| {
                let gens: Vec<String> = g.iter().map(|x| x.name(pair)).collect();
                format!("({}) {}", c.display_with(&coords), gens.join("∧"))
            })
            .collect::<Vec<_>>()
            .join(" + ")
    }

    pub fn to_file(&self, pair: &LieAlgebraPair) -> BivectorFile {
        BivectorFile {
            pairs: self
                .terms
                .iter()
                .filter(|(g, _)| g.len() == 2)
                .map(|(g, c)| BivectorTermFile {
                    gen1: g[0].name(pair),
                    gen2: g[1].name(pair),
                    coeff: poly_to_terms(c),
                })
                .collect(),
        }
    }

    pub fn from_file(pair: &LieAlgebraPair, file: &BivectorFile) -> Result<Bivector> {
        let mut out = Multivector::zero(&CoeffRing::exact(pair.dim_l()));
        for t in &file.pairs {
            let g = [Gen::parse(pair, &t.gen1)?, Gen::parse(pair, &t.gen2)?];
            out.add_wedge(&g, &poly_from_terms(&t.coeff, pair.dim_l())?);
        }
        Ok(out)
    }
}

/// On-disk bivector.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct BivectorFile {
    pub pairs: Vec<BivectorTermFile>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct BivectorTermFile {
    pub gen1: String,
    pub gen2: String,
    pub coeff: Vec<PolyTerm>,
}

/// Action of a generator on a coefficient.
fn act(g: Gen, p: &Poly) -> Poly {
    match g {
        Gen::D(i) => p.derivative(&MultiIndex::unit(p.nvars(), i)),
        Gen::X(_) => p.ring().zero(),
    }
}

fn vf_add(v: &mut VectorField, g: Gen, c: &Poly) {
    if c.is_zero() {
        return;
    }
    let e = v.entry(g).or_insert_with(|| c.ring().zero());
    e.add_assign_ref(c);
    if e.is_zero() {
        v.remove(&g);
    }
}

/// Lie bracket of vector fields in the frame.
fn vf_bracket(pair: &LieAlgebraPair, v: &VectorField, w: &VectorField) -> VectorField {
    let mut out = VectorField::new();
    for (a, va) in v {
        for (b, wb) in w {
            vf_add(&mut out, *b, &(va * &act(*a, wb)));
            vf_add(&mut out, *a, &(wb * &act(*b, va)).neg());
            if let (Gen::X(i), Gen::X(j)) = (a, b) {
                let vw = va * wb;
                for (k, c) in pair.bracket(*i, *j) {
                    vf_add(&mut out, Gen::X(*k), &vw.scale(c));
                }
            }
        }
    }
    out
}

/// Expands `v₁∧…∧v_p` for vector fields into the multivector basis.
fn wedge_fields(ring: &CoeffRing, fields: &[VectorField]) -> Multivector {
    let mut acc: Vec<(Vec<Gen>, Poly)> = vec![(Vec::new(), ring.one())];
    for v in fields {
        let mut next = Vec::new();
        for (gens, c) in &acc {
            for (g, vg) in v {
                if gens.contains(g) {
                    continue;
                }
                let mut gs = gens.clone();
                gs.push(*g);
                next.push((gs, c * vg));
            }
        }
        acc = next;
    }
    let mut out = Multivector::zero(ring);
    for (g, c) in acc {
        out.add_wedge(&g, &c);
    }
    out
}

/// A basis multivector `c e_{S₁}∧…` as a list of vector fields with the
/// coefficient absorbed into the first.
fn as_fields(gens: &[Gen], c: &Poly) -> Vec<VectorField> {
    gens.iter()
        .enumerate()
        .map(|(i, g)| {
            let coeff = if i == 0 { c.clone() } else { c.ring().one() };
            VectorField::from([(*g, coeff)])
        })
        .collect()
}

/// Schouten–Nijenhuis bracket of multivectors of positive degree,
/// `[X₁∧…∧X_p, Y₁∧…∧Y_q] = Σ (−1)^{i+j} [Xᵢ,Yⱼ]∧X₁…X̂ᵢ…X_p∧Y₁…Ŷⱼ…Y_q`.
pub fn schouten(pair: &LieAlgebraPair, a: &Multivector, b: &Multivector) -> Result<Multivector> {
    if a.terms.keys().chain(b.terms.keys()).any(Vec::is_empty) {
        return Err(Error::Format(
            "Schouten bracket is implemented for positive-degree multivectors".into(),
        ));
    }
    let xs: Vec<(&Vec<Gen>, &Poly)> = a.terms.iter().collect();
    let parts: Vec<Multivector> = xs
        .par_iter()
        .map(|(ga, ca)| {
            let mut acc = Multivector::zero(&a.ring);
            let xf = as_fields(ga, ca);
            for (gb, cb) in &b.terms {
                let yf = as_fields(gb, cb);
                for i in 0..xf.len() {
                    for j in 0..yf.len() {
                        let mut fields = vec![vf_bracket(pair, &xf[i], &yf[j])];
                        fields.extend(xf.iter().enumerate().filter(|(k, _)| *k != i).map(|(_, v)| v.clone()));
                        fields.extend(yf.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, v)| v.clone()));
                        let term = wedge_fields(&a.ring, &fields);
                        acc = if (i + j) % 2 == 0 {
                            acc.add(&term)
                        } else {
                            acc.sub(&term)
                        };
                    }
                }
            }
            acc
        })
        .collect();
    Ok(parts.iter().fold(Multivector::zero(&a.ring), |acc, p| acc.add(p)))
}

/// `θ = Σ b (U₁⊗U₂ − U₂⊗U₁)` over the ℏ¹ terms of F, which must land in g∧g.
pub fn classical_theta(ctx: &Context, f: &DynTwist) -> Result<Bivector> {
    if !ctx.is_exact() {
        return Err(Error::ExactModeRequired("classical limit".into()));
    }
    let mut anti: BTreeMap<(MultiIndex, MultiIndex), Poly> = BTreeMap::new();
    for (legs, c) in f.as_utensor().terms() {
        let b = c.coeff(1);
        if b.is_zero() {
            continue;
        }
        for (key, sign) in [
            ((legs[0].clone(), legs[1].clone()), 1),
            ((legs[1].clone(), legs[0].clone()), -1),
        ] {
            let e = anti.entry(key).or_insert_with(|| ctx.ring().zero());
            e.add_scaled(b, &int(sign));
        }
    }
    let mut theta = Multivector::zero(ctx.ring());
    for ((u, v), b) in anti {
        if b.is_zero() {
            continue;
        }
        if u.degree() != 1 || v.degree() != 1 {
            return Err(Error::NotBivector(format!(
                "ℏ¹ part has an antisymmetric component on PBW degrees ({}, {})",
                u.degree(),
                v.degree()
            )));
        }
        let a = u.as_slice().iter().position(|&e| e == 1).unwrap();
        let c = v.as_slice().iter().position(|&e| e == 1).unwrap();
        // each unordered pair is visited twice
        theta.add_wedge(&[Gen::X(a), Gen::X(c)], &b.scale(&frac(1, 2)));
    }
    Ok(theta)
}

/// `π = Σ_{i<j} c_{ij}^k λ_k dᵢ∧dⱼ + Σᵢ dᵢ∧Xᵢ + θ`
pub fn assemble_pi(pair: &LieAlgebraPair, theta: &Bivector) -> Result<Bivector> {
    let ring = CoeffRing::exact(pair.dim_l());
    if theta.ring() != &ring {
        return Err(Error::ExactModeRequired("assembling the classical bivector".into()));
    }
    let mut pi = theta.clone();
    for i in 0..pair.dim_l() {
        for j in i + 1..pair.dim_l() {
            let mut c = ring.zero();
            for (k, v) in pair.bracket(i, j) {
                c.add_scaled(&ring.var(*k)?, v);
            }
            pi.add_wedge(&[Gen::D(i), Gen::D(j)], &c);
        }
        pi.add_wedge(&[Gen::D(i), Gen::X(i)], &ring.one());
    }
    Ok(pi)
}

/// Jacobiator of the bracket `{f,g} = Σ P^{ab} e_a(f) e_b(g)`:
/// `T^{xyz} = Σ_cyc ( Σ_b P^{xb} e_b(P^{yz}) + Σ_{u,v} P^{xu} P^{yv} C_{uv}^z )`.
#[derive(Clone, Debug)]
pub struct SchoutenReport {
    pub trivector: Multivector,
}

impl SchoutenReport {
    pub fn passed(&self) -> bool {
        self.trivector.is_zero()
    }
}

fn all_gens(pair: &LieAlgebraPair) -> Vec<Gen> {
    (0..pair.dim_l())
        .map(Gen::D)
        .chain((0..pair.dim_g()).map(Gen::X))
        .collect()
}

pub fn schouten_jacobi(pair: &LieAlgebraPair, pi: &Bivector) -> Result<SchoutenReport> {
    if !pi.is_homogeneous(2) {
        return Err(Error::NotBivector("Jacobi test needs a bivector".into()));
    }
    let gens = all_gens(pair);
    let ring = pi.ring().clone();
    let p = |a: Gen, b: Gen| pi.component(&[a, b]);
    // nonzero partners of each generator
    let partners: BTreeMap<Gen, Vec<(Gen, Poly)>> = gens
        .iter()
        .map(|&a| {
            (
                a,
                gens.iter()
                    .filter_map(|&b| Some((b, p(a, b))).filter(|(_, c)| !c.is_zero()))
                    .collect(),
            )
        })
        .collect();
    let jac = |x: Gen, y: Gen, z: Gen| -> Poly {
        let mut out = ring.zero();
        for &(b, ref pxb) in &partners[&x] {
            out.add_assign_ref(&(pxb * &act(b, &p(y, z))));
        }
        if let Gen::X(zi) = z {
            for &(u, ref pxu) in &partners[&x] {
                for &(v, ref pyv) in &partners[&y] {
                    if let (Gen::X(ui), Gen::X(vi)) = (u, v) {
                        let c = pair.structure_constant(ui, vi, zi);
                        if c != int(0) {
                            out.add_scaled(&(pxu * pyv), &c);
                        }
                    }
                }
            }
        }
        out
    };
    let mut triples = Vec::new();
    for a in 0..gens.len() {
        for b in a + 1..gens.len() {
            for c in b + 1..gens.len() {
                triples.push([gens[a], gens[b], gens[c]]);
            }
        }
    }
    let comps: Vec<([Gen; 3], Poly)> = triples
        .par_iter()
        .map(|&[x, y, z]| {
            let mut t = jac(x, y, z);
            t.add_assign_ref(&jac(y, z, x));
            t.add_assign_ref(&jac(z, x, y));
            ([x, y, z], t)
        })
        .collect();
    let mut trivector = Multivector::zero(&ring);
    for (g, c) in comps {
        trivector.add_wedge(&g, &c);
    }
    Ok(SchoutenReport { trivector })
}

impl fmt::Display for Gen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Gen::D(i) => write!(f, "d{}", i + 1),
            Gen::X(a) => write!(f, "X{}", a + 1),
        }
    }
}
