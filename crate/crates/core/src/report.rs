//! Serializable summaries of residuals: per-order term counts, the first
//! offending term, and the residual itself.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::classical::Multivector;
use crate::context::Context;
use crate::groupoid::{HTensor, HTensorTermFile};
use crate::io::{poly_to_terms, PolyTerm};
use crate::lie::LieAlgebraPair;
use crate::utensor::UTensor;
use crate::weyl::{series_to_file, SeriesFile};

/// Text printed for a vanishing residual.
pub const PASS_TEXT: &str = "PASS (exact zero at all orders ≤ K)";

/// Term of a coefficient ⊗ U(g)^{⊗m} element.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct UTensorTermFile {
    pub legs: Vec<Vec<u32>>,
    pub coeff: SeriesFile,
}

pub fn utensor_to_file(t: &UTensor) -> Vec<UTensorTermFile> {
    t.terms()
        .iter()
        .map(|(legs, c)| UTensorTermFile {
            legs: legs.iter().map(|u| u.as_slice().to_vec()).collect(),
            coeff: series_to_file(c),
        })
        .collect()
}

/// A serialized residual of any supported shape.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
#[serde(untagged)]
pub enum ResidualTerms {
    H(Vec<HTensorTermFile>),
    U(Vec<UTensorTermFile>),
    Multivector(Vec<MultivectorTermFile>),
}

#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
pub struct MultivectorTermFile {
    pub gens: Vec<String>,
    pub coeff: Vec<PolyTerm>,
}

/// Summary of one residual.
#[derive(Clone, Debug, Serialize, PartialEq, Eq)]
#[serde(rename_all = "camelCase")]
pub struct Residual {
    pub zero: bool,
    /// Nonzero terms by ℏ-power; empty for ℏ-free residuals.
    pub counts_by_order: Vec<usize>,
    pub first_term: Option<String>,
    pub terms: ResidualTerms,
}

impl Residual {
    pub fn from_h(ctx: &Context, t: &HTensor) -> Self {
        let names = ctx.pair().basis().to_vec();
        let coords = ctx.pair().coordinate_names();
        Residual {
            zero: t.is_zero(),
            counts_by_order: t.counts_by_order(),
            first_term: t.first_term(&names, &coords),
            terms: ResidualTerms::H(t.to_file()),
        }
    }

    pub fn from_u(ctx: &Context, t: &UTensor) -> Self {
        let names = ctx.pair().basis().to_vec();
        let coords = ctx.pair().coordinate_names();
        Residual {
            zero: t.is_zero(),
            counts_by_order: t.counts_by_order(),
            first_term: t.first_term(&names, &coords),
            terms: ResidualTerms::U(utensor_to_file(t)),
        }
    }

    pub fn from_multivector(pair: &LieAlgebraPair, t: &Multivector) -> Self {
        let coords = pair.coordinate_names();
        let terms: Vec<MultivectorTermFile> = t
            .terms()
            .iter()
            .map(|(g, c)| MultivectorTermFile {
                gens: g.iter().map(|x| x.name(pair)).collect(),
                coeff: poly_to_terms(c),
            })
            .collect();
        let first_term = t.terms().iter().next().map(|(g, c)| {
            let gens: Vec<String> = g.iter().map(|x| x.name(pair)).collect();
            format!("({}) {}", c.display_with(&coords), gens.join("∧"))
        });
        Residual {
            zero: t.is_zero(),
            counts_by_order: Vec::new(),
            first_term,
            terms: ResidualTerms::Multivector(terms),
        }
    }

    /// One-line verdict followed by the first offending term.
    pub fn render_text(&self) -> String {
        if self.zero {
            return PASS_TEXT.to_string();
        }
        let total: usize = self.counts_by_order.iter().sum();
        let counts = if self.counts_by_order.is_empty() {
            String::new()
        } else {
            let per: Vec<String> = self
                .counts_by_order
                .iter()
                .enumerate()
                .filter(|(_, c)| **c > 0)
                .map(|(p, c)| format!("ℏ^{p}: {c}"))
                .collect();
            format!(
                " [{total} term{}; {}]",
                if total == 1 { "" } else { "s" },
                per.join(", ")
            )
        };
        format!(
            "FAIL{counts}\n    first term: {}",
            self.first_term.clone().unwrap_or_default()
        )
    }
}

/// Named residuals of one check, in a stable order.
pub type ResidualMap = BTreeMap<String, Residual>;

pub fn all_zero(map: &ResidualMap) -> bool {
    map.values().all(|r| r.zero)
}
