//! JSON forms shared by the file formats.
//!
//! Polynomials are written as `polyTerms`: a list of
//! `{"exponents": [...], "coeff": "p/q"}` in exponent order.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::{CoeffRing, MultiIndex, Poly};
use crate::rational::{format_rational, parse_rational};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct PolyTerm {
    pub exponents: Vec<u32>,
    pub coeff: String,
}

pub fn poly_to_terms(p: &Poly) -> Vec<PolyTerm> {
    p.terms()
        .iter()
        .map(|(m, c)| PolyTerm {
            exponents: m.as_slice().to_vec(),
            coeff: format_rational(c),
        })
        .collect()
}

/// Reads an exact polynomial in `nvars` variables.
pub fn poly_from_terms(terms: &[PolyTerm], nvars: usize) -> Result<Poly> {
    let ring = CoeffRing::exact(nvars);
    let mut p = ring.zero();
    for t in terms {
        if t.exponents.len() != nvars {
            return Err(Error::DimensionMismatch {
                expected: nvars,
                found: t.exponents.len(),
                context: "polynomial exponents".into(),
            });
        }
        p.add_term(MultiIndex::from_slice(&t.exponents), parse_rational(&t.coeff)?);
    }
    Ok(p)
}

/// Serializes with sorted object keys and two-space indentation, so equal
/// values always give identical bytes.
pub fn to_canonical_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value)?;
    Ok(serde_json::to_string_pretty(&sort_keys(v))?)
}

fn sort_keys(v: serde_json::Value) -> serde_json::Value {
    use serde_json::Value;
    match v {
        Value::Object(map) => {
            let mut entries: Vec<(String, Value)> = map.into_iter().collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            Value::Object(entries.into_iter().map(|(k, v)| (k, sort_keys(v))).collect())
        }
        Value::Array(items) => Value::Array(items.into_iter().map(sort_keys).collect()),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::frac;

    #[test]
    fn poly_round_trip() {
        let r = CoeffRing::exact(2);
        let p = &r.monomial(&MultiIndex::from_slice(&[1, 2]), frac(-3, 4)) + &r.one();
        let terms = poly_to_terms(&p);
        assert_eq!(terms[1].coeff, "-3/4");
        assert_eq!(poly_from_terms(&terms, 2).unwrap(), p);
        assert!(poly_from_terms(&terms, 3).is_err());
    }

    #[test]
    fn canonical_json_sorts_keys() {
        let v = serde_json::json!({"b": 1, "a": {"d": 2, "c": 3}});
        let s = to_canonical_json(&v).unwrap();
        assert!(s.find("\"a\"").unwrap() < s.find("\"b\"").unwrap());
        assert!(s.find("\"c\"").unwrap() < s.find("\"d\"").unwrap());
    }
}
