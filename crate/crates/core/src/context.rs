//! Run-level configuration shared by every computation: the Lie algebra
//! pair, the global ℏ-truncation order `K`, and the coefficient mode.
//!
//! The context also owns the memo tables for enveloping-algebra products,
//! symmetrizations and monomial star products. They are behind mutexes so a
//! context can be shared across rayon workers; cached values are immutable.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use crate::error::{Error, Result};
use crate::groupoid::HTensor;
use crate::lie::LieAlgebraPair;
use crate::poly::{CoeffMode, CoeffRing, MultiIndex, Poly};
use crate::rational::Rational;
use crate::series::HbarSeries;
use crate::uea::{PbwPoly, UeaAlgebra};
use crate::weyl::BiDiffOp;

/// Monomial star product `λ^α ∗ λ^β` as `(ℏ-power, γ, coefficient)` terms.
pub(crate) type StarTerms = Vec<(u32, MultiIndex, Rational)>;

#[derive(Debug)]
pub struct Context {
    pair: Arc<LieAlgebraPair>,
    order: u32,
    ring: CoeffRing,
    ug: UeaAlgebra,
    ul: UeaAlgebra,
    pub(crate) sym_cache: Mutex<HashMap<MultiIndex, Arc<PbwPoly>>>,
    pub(crate) star_cache: Mutex<HashMap<(MultiIndex, MultiIndex), Arc<StarTerms>>>,
    pub(crate) theta_pbw: Mutex<Option<Arc<BiDiffOp>>>,
    pub(crate) gutt: Mutex<Option<Arc<HTensor>>>,
}

impl Context {
    pub fn new(pair: Arc<LieAlgebraPair>, order: u32, mode: CoeffMode) -> Result<Self> {
        if order == 0 {
            return Err(Error::Format("truncation order K must be at least 1".into()));
        }
        let ring = CoeffRing::new(pair.dim_l(), mode)?;
        Ok(Context {
            ug: UeaAlgebra::full(pair.clone()),
            ul: UeaAlgebra::sub(pair.clone()),
            pair,
            order,
            ring,
            sym_cache: Mutex::default(),
            star_cache: Mutex::default(),
            theta_pbw: Mutex::default(),
            gutt: Mutex::default(),
        })
    }

    pub fn exact(pair: Arc<LieAlgebraPair>, order: u32) -> Result<Self> {
        Self::new(pair, order, CoeffMode::Exact)
    }

    pub fn pair(&self) -> &LieAlgebraPair {
        &self.pair
    }

    pub fn pair_arc(&self) -> Arc<LieAlgebraPair> {
        self.pair.clone()
    }

    /// Global truncation order `K`.
    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn ring(&self) -> &CoeffRing {
        &self.ring
    }

    pub fn is_exact(&self) -> bool {
        self.ring.mode.is_exact()
    }

    /// N = dim l
    pub fn n(&self) -> usize {
        self.pair.dim_l()
    }

    /// M = dim g
    pub fn m(&self) -> usize {
        self.pair.dim_g()
    }

    pub fn ug(&self) -> &UeaAlgebra {
        &self.ug
    }

    pub fn ul(&self) -> &UeaAlgebra {
        &self.ul
    }

    /// An exact-mode context over the same pair and order.
    pub fn exact_twin(&self) -> Result<Context> {
        Context::exact(self.pair.clone(), self.order)
    }

    pub fn zero_series(&self) -> HbarSeries<Poly> {
        HbarSeries::zero(self.order, &self.ring.zero())
    }

    pub fn one_series(&self) -> HbarSeries<Poly> {
        HbarSeries::constant(self.order, self.ring.one())
    }

    /// `ℏ^p c` in this context.
    pub fn hbar_monomial(&self, p: u32, c: Poly) -> HbarSeries<Poly> {
        HbarSeries::monomial(self.order, p, c)
    }

    /// `c ℏ^p` with a rational `c`.
    pub fn scalar_series(&self, p: u32, c: Rational) -> HbarSeries<Poly> {
        HbarSeries::monomial(self.order, p, self.ring.constant(c))
    }

    /// Brings an exact polynomial into the context's coefficient ring.
    pub fn embed(&self, p: &Poly) -> Result<Poly> {
        self.ring.embed(p)
    }

    pub fn embed_series(&self, s: &HbarSeries<Poly>) -> Result<HbarSeries<Poly>> {
        let coeffs = s.coeffs().iter().map(|c| self.embed(c)).collect::<Result<Vec<_>>>()?;
        Ok(HbarSeries::from_coeffs(coeffs))
    }

    /// Pads a U(l) monomial to a U(g) monomial.
    pub fn l_to_g(&self, m: &MultiIndex) -> MultiIndex {
        let mut e = m.as_slice().to_vec();
        e.resize(self.m(), 0);
        MultiIndex::from_slice(&e)
    }

    pub fn check_mode(&self, p: &Poly) -> Result<()> {
        if p.nvars() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                found: p.nvars(),
                context: "coefficient".into(),
            });
        }
        if p.mode() != &self.ring.mode {
            return Err(Error::ModeMismatch(
                "coefficient does not match the context mode".into(),
            ));
        }
        Ok(())
    }
}
