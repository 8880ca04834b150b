//! The symmetrization map Pol(l*) → U(l_ℏ) and the PBW star product.
//!
//! `Sym(λ^α)` is the average of all orderings of the word with exponents α,
//! computed through `Sym(α) = Σᵢ (αᵢ/|α|) lᵢ·Sym(α − eᵢ)`. It is the identity
//! on top-degree parts, so its inverse is computed by repeatedly peeling the
//! highest-degree monomial.

use std::sync::Arc;

use crate::context::{Context, StarTerms};
use crate::error::{Error, Result};
use crate::poly::{CoeffRing, MultiIndex, Poly};
use crate::rational::Rational;
use crate::series::HbarSeries;
use crate::uea::{pbw_axpy, Flavor, PbwPoly, UeaElement};

impl Context {
    /// Sym(λ^α) in plain U(l).
    pub fn sym(&self, alpha: &MultiIndex) -> Arc<PbwPoly> {
        if let Some(hit) = self.sym_cache.lock().unwrap().get(alpha) {
            return hit.clone();
        }
        let k = alpha.degree();
        let result = if k <= 1 {
            PbwPoly::from([(alpha.clone(), Rational::from_integer(1.into()))])
        } else {
            let mut out = PbwPoly::new();
            for i in 0..alpha.len() {
                let e = alpha.get(i);
                if e == 0 {
                    continue;
                }
                let rest = alpha.checked_sub(&MultiIndex::unit(alpha.len(), i)).unwrap();
                let inner = self.sym(&rest);
                let weight = Rational::new(e.into(), k.into());
                for (m, c) in inner.iter() {
                    pbw_axpy(&mut out, &(c * &weight), &self.ul().gen_mul(i, m));
                }
            }
            out
        };
        let result = Arc::new(result);
        self.sym_cache.lock().unwrap().insert(alpha.clone(), result.clone());
        result
    }

    /// The PBW map on an exact polynomial, landing in U(l_ℏ).
    pub fn pbw_map(&self, f: &Poly) -> Result<UeaElement> {
        if !f.mode().is_exact() {
            return Err(Error::ExactModeRequired(
                "the PBW map symmetrizes genuine polynomials".into(),
            ));
        }
        let mut out = UeaElement::zero(Flavor::HbarU, self.order());
        for (alpha, c) in f.terms() {
            let sym = self.sym(alpha);
            let mut scaled = PbwPoly::new();
            pbw_axpy(&mut scaled, c, &sym);
            let lifted = UeaElement::from_plain(&scaled, alpha.degree(), Flavor::HbarU, self.order());
            for (m, s) in lifted.terms {
                out.add_term(m, &s);
            }
        }
        Ok(out)
    }

    /// Inverse of the PBW map on a plain U(l) element whose factors had
    /// total degree `degree`; terms past ℏ^K are dropped.
    pub fn pbw_inverse(&self, p: &PbwPoly, degree: u32) -> StarTerms {
        let mut rest = p.clone();
        let mut out = Vec::new();
        while let Some((top, c)) = rest
            .iter()
            .max_by_key(|(m, _)| m.degree())
            .map(|(m, c)| (m.clone(), c.clone()))
        {
            let power = degree - top.degree();
            if power > self.order() {
                break;
            }
            pbw_axpy(&mut rest, &-c.clone(), &self.sym(&top));
            out.push((power, top, c));
        }
        out.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
        out
    }

    /// `λ^α ∗PBW λ^β`, memoized.
    pub fn star_monomials(&self, alpha: &MultiIndex, beta: &MultiIndex) -> Arc<StarTerms> {
        let key = (alpha.clone(), beta.clone());
        if let Some(hit) = self.star_cache.lock().unwrap().get(&key) {
            return hit.clone();
        }
        let result = if alpha.is_zero() || beta.is_zero() {
            vec![(0, alpha.add(beta), Rational::from_integer(1.into()))]
        } else {
            let product = self.ul().mul(&self.sym(alpha), &self.sym(beta));
            self.pbw_inverse(&product, alpha.degree() + beta.degree())
        };
        let result = Arc::new(result);
        self.star_cache.lock().unwrap().insert(key, result.clone());
        result
    }

    /// `f ∗PBW g` for exact polynomials.
    pub fn pbw_star(&self, f: &Poly, g: &Poly) -> Result<HbarSeries<Poly>> {
        if !f.mode().is_exact() || !g.mode().is_exact() {
            return Err(Error::ExactModeRequired(
                "pbw_star works on polynomials; use star for jets".into(),
            ));
        }
        for p in [f, g] {
            if p.nvars() != self.n() {
                return Err(Error::DimensionMismatch {
                    expected: self.n(),
                    found: p.nvars(),
                    context: "pbw_star".into(),
                });
            }
        }
        let ring = CoeffRing::exact(self.n());
        let mut slots: Vec<Poly> = vec![ring.zero(); self.order() as usize + 1];
        for (a, ca) in f.terms() {
            for (b, cb) in g.terms() {
                let c = ca * cb;
                for (p, gamma, v) in self.star_monomials(a, b).iter() {
                    slots[*p as usize].add_term(gamma.clone(), &c * v);
                }
            }
        }
        Ok(HbarSeries::from_coeffs(slots))
    }

    /// The star product of two coefficient series in the context's mode:
    /// directly for polynomials, through the extracted bidifferential
    /// operator for jets.
    pub fn star(&self, f: &HbarSeries<Poly>, g: &HbarSeries<Poly>) -> Result<HbarSeries<Poly>> {
        if self.is_exact() {
            let mut out = self.zero_series();
            for (i, fi) in f.coeffs().iter().enumerate() {
                if fi.is_zero() {
                    continue;
                }
                for (j, gj) in g.coeffs().iter().enumerate() {
                    if i + j > self.order() as usize || gj.is_zero() {
                        continue;
                    }
                    out.add_assign_ref(&self.pbw_star(fi, gj)?.shift((i + j) as u32));
                }
            }
            Ok(out)
        } else {
            let theta = self.theta_pbw()?;
            theta.apply(f, g)
        }
    }

    /// Convenience: star of two plain coefficients.
    pub fn star_poly(&self, f: &Poly, g: &Poly) -> Result<HbarSeries<Poly>> {
        let k = self.order();
        self.star(&HbarSeries::constant(k, f.clone()), &HbarSeries::constant(k, g.clone()))
    }

    /// `Σ_k c_{ij}^k λ_k` in the context's ring.
    pub fn bracket_coordinate(&self, i: usize, j: usize) -> Poly {
        let mut out = self.ring().zero();
        for (k, c) in self.pair().bracket(i, j) {
            out.add_scaled(&self.ring().var(*k).unwrap(), c);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::{int_brackets, LieAlgebraPair};
    use crate::rational::{frac, int};

    fn axb() -> Context {
        let p = LieAlgebraPair::new(
            "axb",
            vec!["l1".into(), "l2".into()],
            2,
            &int_brackets(&[(0, 1, &[(1, 1)])]),
        )
        .unwrap();
        Context::exact(Arc::new(p), 4).unwrap()
    }

    fn mono(e: &[u32]) -> Poly {
        CoeffRing::exact(e.len()).monomial(&MultiIndex::from_slice(e), int(1))
    }

    #[test]
    fn axb_closed_forms() {
        let ctx = axb();
        let s = ctx.pbw_star(&mono(&[1, 0]), &mono(&[0, 1])).unwrap();
        assert_eq!(s.coeff(0), &mono(&[1, 1]));
        assert_eq!(s.coeff(1), &mono(&[0, 1]).scale(&frac(1, 2)));
        assert!(s.coeff(2).is_zero());
        let s = ctx.pbw_star(&mono(&[1, 0]), &mono(&[0, 2])).unwrap();
        assert_eq!(s.coeff(0), &mono(&[1, 2]));
        assert_eq!(s.coeff(1), &mono(&[0, 2]));
        assert!(s.coeffs()[2..].iter().all(Poly::is_zero));
    }

    #[test]
    fn pbw_map_of_sl2_pair() {
        let p = LieAlgebraPair::new(
            "sl2",
            vec!["h".into(), "e".into(), "f".into()],
            3,
            &int_brackets(&[(0, 1, &[(1, 2)]), (0, 2, &[(2, -2)]), (1, 2, &[(0, 1)])]),
        )
        .unwrap();
        let ctx = Context::exact(Arc::new(p), 2).unwrap();
        let u = ctx.pbw_map(&mono(&[0, 1, 1])).unwrap();
        assert_eq!(
            u.coeff(&MultiIndex::from_slice(&[0, 1, 1])),
            HbarSeries::constant(2, int(1))
        );
        assert_eq!(
            u.coeff(&MultiIndex::from_slice(&[1, 0, 0])),
            HbarSeries::monomial(2, 1, frac(-1, 2))
        );
        assert_eq!(u.terms.len(), 2);
    }

    #[test]
    fn unit_is_neutral() {
        let ctx = axb();
        let f = mono(&[2, 1]);
        let s = ctx.pbw_star(&mono(&[0, 0]), &f).unwrap();
        assert_eq!(s, HbarSeries::constant(4, f.clone()));
    }
}
