//! Bundled Lie algebra pairs and twists.

use std::sync::Arc;

use crate::context::Context;
use crate::dynamical::{DynTermFile, DynTwist};
use crate::error::{Error, Result};
use crate::lie::LieAlgebraPair;

/// Algebra fixtures by name, as JSON text.
pub const ALGEBRAS: &[(&str, &str)] = &[
    ("abelian1", include_str!("../fixtures/abelian1.json")),
    ("axb", include_str!("../fixtures/axb.json")),
    ("heisenberg", include_str!("../fixtures/heisenberg.json")),
    ("sl2", include_str!("../fixtures/sl2.json")),
    ("sl2-cartan", include_str!("../fixtures/sl2-cartan.json")),
    ("sl2-borel", include_str!("../fixtures/sl2-borel.json")),
    ("oscillator", include_str!("../fixtures/oscillator.json")),
    ("sl2-corrupted", include_str!("../fixtures/sl2-corrupted.json")),
];

/// Twist fixtures as `(name, algebra, JSON text)`.
pub const TWISTS: &[(&str, &str, &str)] = &[
    (
        "abelian1-exp-xx",
        "abelian1",
        include_str!("../fixtures/twists/abelian1-exp-xx.json"),
    ),
    (
        "heisenberg-exp-central",
        "heisenberg",
        include_str!("../fixtures/twists/heisenberg-exp-central.json"),
    ),
    (
        "oscillator-exp-hz",
        "oscillator",
        include_str!("../fixtures/twists/oscillator-exp-hz.json"),
    ),
    (
        "sl2-cartan-trivial",
        "sl2-cartan",
        include_str!("../fixtures/twists/sl2-cartan-trivial.json"),
    ),
    (
        "sl2-cartan-ef",
        "sl2-cartan",
        include_str!("../fixtures/twists/sl2-cartan-ef.json"),
    ),
    (
        "sl2-cartan-noninvariant",
        "sl2-cartan",
        include_str!("../fixtures/twists/sl2-cartan-noninvariant.json"),
    ),
];

/// Every well-formed bundled algebra (the corrupted one is excluded).
pub fn valid_algebra_names() -> Vec<&'static str> {
    ALGEBRAS
        .iter()
        .map(|(n, _)| *n)
        .filter(|n| *n != "sl2-corrupted")
        .collect()
}

pub fn algebra_json(name: &str) -> Result<&'static str> {
    ALGEBRAS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| *t)
        .ok_or_else(|| Error::Format(format!("no bundled algebra named {name}")))
}

pub fn algebra(name: &str) -> Result<Arc<LieAlgebraPair>> {
    Ok(Arc::new(LieAlgebraPair::from_json(algebra_json(name)?)?))
}

pub fn twist_json(name: &str) -> Result<(&'static str, &'static str)> {
    TWISTS
        .iter()
        .find(|(n, _, _)| *n == name)
        .map(|(_, a, t)| (*a, *t))
        .ok_or_else(|| Error::Format(format!("no bundled twist named {name}")))
}

/// Loads a bundled twist into a context over its algebra.
pub fn twist(ctx: &Context, name: &str) -> Result<DynTwist> {
    let (alg, text) = twist_json(name)?;
    if ctx.pair().name() != alg {
        return Err(Error::Format(format!(
            "twist {name} belongs to {alg}, not {}",
            ctx.pair().name()
        )));
    }
    let terms: Vec<DynTermFile> = serde_json::from_str(text)?;
    DynTwist::from_file(ctx, &terms)
}
