//! Lie algebras by structure constants, the pair (g, l), the coadjoint action
//! on coefficient functions, and polarization data.
//!
//! The subalgebra l is spanned by the first `dim_l` basis vectors, and the
//! coordinates λ₁…λ_N on l* are dual to them. The coadjoint action is the
//! derivation fixed by `ad*_{lᵢ}(λⱼ) = Σ_k c_{ij}^k λ_k`.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, SparseRow};
use crate::poly::{CoeffRing, MultiIndex, Poly};
use crate::rational::{format_rational, int, parse_rational, Rational};

/// Sparse vector in g: basis index → coefficient.
pub type LieVector = BTreeMap<usize, Rational>;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct TermFile {
    pub k: usize,
    pub coeff: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct BracketFile {
    pub i: usize,
    pub j: usize,
    pub terms: Vec<TermFile>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "camelCase")]
pub struct PolarizationFile {
    pub u_plus: Vec<usize>,
    pub u_minus: Vec<usize>,
}

/// On-disk form of a Lie algebra pair.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "camelCase")]
pub struct LieAlgebraFile {
    pub name: String,
    pub dim_g: usize,
    pub dim_l: usize,
    pub basis: Vec<String>,
    pub brackets: Vec<BracketFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polarization: Option<PolarizationFile>,
}

/// `[xᵢ, xⱼ] = Σ c xₖ` as `(i, j, [(k, c)])`.
pub type Bracket = (usize, usize, Vec<(usize, Rational)>);

/// A Lie algebra g with the subalgebra l spanned by its first `dim_l` basis
/// vectors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieAlgebraPair {
    name: String,
    dim_l: usize,
    basis: Vec<String>,
    /// Full antisymmetric table: `table[i][j] = [xᵢ, xⱼ]`.
    table: Vec<Vec<Vec<(usize, Rational)>>>,
    polarization: Option<PolarizationFile>,
}

impl LieAlgebraPair {
    /// Builds a pair from brackets `[xᵢ, xⱼ]` given for `i < j`.
    pub fn new(name: impl Into<String>, basis: Vec<String>, dim_l: usize, brackets: &[Bracket]) -> Result<Self> {
        let m = basis.len();
        if dim_l > m {
            return Err(Error::InvalidAlgebra(format!("dimL = {dim_l} exceeds dimG = {m}")));
        }
        let names: BTreeSet<&String> = basis.iter().collect();
        if names.len() != m {
            return Err(Error::InvalidAlgebra("basis names must be distinct".into()));
        }
        let mut table = vec![vec![Vec::new(); m]; m];
        let mut seen = BTreeSet::new();
        for (i, j, terms) in brackets {
            let (i, j) = (*i, *j);
            if i >= j {
                return Err(Error::InvalidAlgebra(format!("bracket ({i},{j}) must have i < j")));
            }
            if j >= m {
                return Err(Error::InvalidAlgebra(format!("bracket index {j} out of range")));
            }
            if !seen.insert((i, j)) {
                return Err(Error::InvalidAlgebra(format!("bracket ({i},{j}) given twice")));
            }
            let mut v = LieVector::new();
            for (k, c) in terms {
                if *k >= m {
                    return Err(Error::InvalidAlgebra(format!("bracket term index {k} out of range")));
                }
                *v.entry(*k).or_insert_with(Rational::zero) += c;
            }
            v.retain(|_, c| !c.is_zero());
            table[i][j] = v.iter().map(|(k, c)| (*k, c.clone())).collect();
            table[j][i] = v.iter().map(|(k, c)| (*k, -c.clone())).collect();
        }
        let pair = LieAlgebraPair {
            name: name.into(),
            dim_l,
            basis,
            table,
            polarization: None,
        };
        for i in 0..dim_l {
            for j in 0..dim_l {
                if let Some((k, _)) = pair.table[i][j].iter().find(|(k, _)| *k >= dim_l) {
                    return Err(Error::InvalidAlgebra(format!(
                        "l is not a subalgebra: [{}, {}] has a {} component",
                        pair.basis[i], pair.basis[j], pair.basis[*k]
                    )));
                }
            }
        }
        Ok(pair)
    }

    pub fn from_file(file: &LieAlgebraFile) -> Result<Self> {
        if file.basis.len() != file.dim_g {
            return Err(Error::DimensionMismatch {
                expected: file.dim_g,
                found: file.basis.len(),
                context: "basis names".into(),
            });
        }
        let mut brackets = Vec::new();
        for b in &file.brackets {
            let terms = b
                .terms
                .iter()
                .map(|t| Ok((t.k, parse_rational(&t.coeff)?)))
                .collect::<Result<Vec<_>>>()?;
            brackets.push((b.i, b.j, terms));
        }
        let mut pair = Self::new(file.name.clone(), file.basis.clone(), file.dim_l, &brackets)?;
        if let Some(p) = &file.polarization {
            pair.polarization = Some(p.clone());
            pair.polarization()?;
        }
        Ok(pair)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: LieAlgebraFile = serde_json::from_str(text)?;
        Self::from_file(&file)
    }

    pub fn to_file(&self) -> LieAlgebraFile {
        let mut brackets = Vec::new();
        for i in 0..self.dim_g() {
            for j in i + 1..self.dim_g() {
                if !self.table[i][j].is_empty() {
                    brackets.push(BracketFile {
                        i,
                        j,
                        terms: self.table[i][j]
                            .iter()
                            .map(|(k, c)| TermFile {
                                k: *k,
                                coeff: format_rational(c),
                            })
                            .collect(),
                    });
                }
            }
        }
        LieAlgebraFile {
            name: self.name.clone(),
            dim_g: self.dim_g(),
            dim_l: self.dim_l,
            basis: self.basis.clone(),
            brackets,
            polarization: self.polarization.clone(),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim_g(&self) -> usize {
        self.basis.len()
    }

    pub fn dim_l(&self) -> usize {
        self.dim_l
    }

    pub fn basis(&self) -> &[String] {
        &self.basis
    }

    pub fn basis_name(&self, i: usize) -> &str {
        &self.basis[i]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.basis.iter().position(|b| b == name)
    }

    /// Names of the coordinate functions λᵢ on l*.
    pub fn coordinate_names(&self) -> Vec<String> {
        self.basis[..self.dim_l].iter().map(|b| format!("λ_{b}")).collect()
    }

    /// `[xᵢ, xⱼ]` as a sparse list of `(k, c_{ij}^k)`.
    pub fn bracket(&self, i: usize, j: usize) -> &[(usize, Rational)] {
        &self.table[i][j]
    }

    /// `c_{ij}^k`
    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> Rational {
        self.table[i][j]
            .iter()
            .find(|(kk, _)| *kk == k)
            .map(|(_, c)| c.clone())
            .unwrap_or_else(Rational::zero)
    }

    pub fn is_abelian(&self) -> bool {
        self.table.iter().all(|row| row.iter().all(Vec::is_empty))
    }

    /// Bilinear extension of the bracket to sparse vectors.
    pub fn bracket_vectors(&self, a: &LieVector, b: &LieVector) -> LieVector {
        let mut out = LieVector::new();
        for (i, ca) in a {
            for (j, cb) in b {
                for (k, c) in &self.table[*i][*j] {
                    *out.entry(*k).or_insert_with(Rational::zero) += ca * cb * c;
                }
            }
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    fn unit_vector(i: usize) -> LieVector {
        LieVector::from([(i, Rational::one())])
    }

    /// The Jacobiator `Σ_cyc [xᵢ,[xⱼ,x_k]]`.
    pub fn jacobiator(&self, i: usize, j: usize, k: usize) -> LieVector {
        let (xi, xj, xk) = (Self::unit_vector(i), Self::unit_vector(j), Self::unit_vector(k));
        let mut out = self.bracket_vectors(&xi, &self.bracket_vectors(&xj, &xk));
        for (key, c) in self.bracket_vectors(&xj, &self.bracket_vectors(&xk, &xi)) {
            *out.entry(key).or_insert_with(Rational::zero) += c;
        }
        for (key, c) in self.bracket_vectors(&xk, &self.bracket_vectors(&xi, &xj)) {
            *out.entry(key).or_insert_with(Rational::zero) += c;
        }
        out.retain(|_, c| !c.is_zero());
        out
    }

    /// All triples `i < j < k` whose Jacobiator does not vanish.
    pub fn check_jacobi(&self) -> JacobiReport {
        let m = self.dim_g();
        let mut violations = Vec::new();
        for i in 0..m {
            for j in i + 1..m {
                for k in j + 1..m {
                    let r = self.jacobiator(i, j, k);
                    if !r.is_empty() {
                        violations.push(JacobiViolation {
                            triple: [i, j, k],
                            names: [self.basis[i].clone(), self.basis[j].clone(), self.basis[k].clone()],
                            residual: r,
                        });
                    }
                }
            }
        }
        JacobiReport { violations }
    }

    /// `ad*_{lᵢ}(λⱼ) = Σ_k c_{ij}^k λ_k` as a polynomial.
    pub fn coadjoint_of_coordinate(&self, ring: &CoeffRing, i: usize, j: usize) -> Poly {
        let mut out = ring.zero();
        for (k, c) in &self.table[i][j] {
            out.add_scaled(&ring.var(*k).expect("l is closed"), c);
        }
        out
    }

    /// The derivation `ad*_{lᵢ}` applied to `f`.
    pub fn coadjoint_act(&self, i: usize, f: &Poly) -> Result<Poly> {
        let n = self.dim_l;
        if i >= n {
            return Err(Error::IndexOutOfRange {
                index: i,
                limit: n,
                context: "coadjoint action".into(),
            });
        }
        if f.nvars() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: f.nvars(),
                context: "coadjoint action".into(),
            });
        }
        let ring = f.ring();
        let mut out = ring.zero();
        for j in 0..n {
            if self.table[i][j].is_empty() {
                continue;
            }
            let df = f.partial(j)?;
            if df.is_zero() {
                continue;
            }
            let coeff = self.coadjoint_of_coordinate(&ring, i, j);
            out.add_assign_ref(&coeff.checked_mul(&df)?);
        }
        Ok(out)
    }

    /// Basis of `{λ ∈ l* : λ([l, l]) = 0}`.
    pub fn character_locus(&self) -> Vec<Vec<Rational>> {
        let n = self.dim_l;
        let mut rows = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let row: SparseRow = self.table[i][j].iter().cloned().collect();
                if !row.is_empty() {
                    rows.push(row);
                }
            }
        }
        linalg::nullspace(n, rows)
            .into_iter()
            .map(|v| {
                (0..n)
                    .map(|k| v.get(&k).cloned().unwrap_or_else(Rational::zero))
                    .collect()
            })
            .collect()
    }

    /// The polarization recorded with the algebra, validated.
    pub fn polarization(&self) -> Result<Polarization<'_>> {
        let file = self
            .polarization
            .as_ref()
            .ok_or_else(|| Error::InvalidPolarization(format!("{} carries no polarization", self.name)))?;
        Polarization::new(self, file.u_plus.clone(), file.u_minus.clone())
    }

    pub fn has_polarization(&self) -> bool {
        self.polarization.is_some()
    }

    pub fn with_polarization(mut self, u_plus: Vec<usize>, u_minus: Vec<usize>) -> Result<Self> {
        self.polarization = Some(PolarizationFile { u_plus, u_minus });
        self.polarization()?;
        Ok(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JacobiViolation {
    pub triple: [usize; 3],
    pub names: [String; 3],
    pub residual: LieVector,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JacobiReport {
    pub violations: Vec<JacobiViolation>,
}

impl JacobiReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// A decomposition g = l ⊕ u₊ ⊕ u₋ with l-stable u±.
#[derive(Clone, Debug)]
pub struct Polarization<'a> {
    pair: &'a LieAlgebraPair,
    u_plus: Vec<usize>,
    u_minus: Vec<usize>,
}

impl<'a> Polarization<'a> {
    pub fn new(pair: &'a LieAlgebraPair, u_plus: Vec<usize>, u_minus: Vec<usize>) -> Result<Self> {
        let n = pair.dim_l();
        let m = pair.dim_g();
        let mut seen = BTreeSet::new();
        for &a in u_plus.iter().chain(&u_minus) {
            if a < n || a >= m {
                return Err(Error::InvalidPolarization(format!(
                    "index {a} is not in the complement of l"
                )));
            }
            if !seen.insert(a) {
                return Err(Error::InvalidPolarization(format!("index {a} listed twice")));
            }
        }
        if seen.len() != m - n {
            return Err(Error::InvalidPolarization(
                "u₊ and u₋ must cover the complement of l".into(),
            ));
        }
        for (part, label) in [(&u_plus, "u₊"), (&u_minus, "u₋")] {
            let set: BTreeSet<usize> = part.iter().copied().collect();
            for i in 0..n {
                for &a in part {
                    if let Some((k, _)) = pair.bracket(i, a).iter().find(|(k, _)| !set.contains(k)) {
                        return Err(Error::InvalidPolarization(format!(
                            "[{}, {}] leaves {label} (component {})",
                            pair.basis_name(i),
                            pair.basis_name(a),
                            pair.basis_name(*k)
                        )));
                    }
                }
            }
        }
        Ok(Polarization { pair, u_plus, u_minus })
    }

    /// u₊ then u₋.
    pub fn u_indices(&self) -> Vec<usize> {
        self.u_plus.iter().chain(&self.u_minus).copied().collect()
    }

    pub fn u_plus(&self) -> &[usize] {
        &self.u_plus
    }

    pub fn u_minus(&self) -> &[usize] {
        &self.u_minus
    }

    /// ω(λ)(u_a, u_b) = λ([u_a, u_b]).
    pub fn omega_matrix(&self) -> Vec<Vec<Poly>> {
        let ring = CoeffRing::exact(self.pair.dim_l());
        let u = self.u_indices();
        u.iter()
            .map(|&a| {
                u.iter()
                    .map(|&b| {
                        let mut p = ring.zero();
                        for (k, c) in self.pair.bracket(a, b) {
                            if *k < self.pair.dim_l() {
                                p.add_scaled(&ring.var(*k).unwrap(), c);
                            }
                        }
                        p
                    })
                    .collect()
            })
            .collect()
    }

    /// D(λ) = det ω(λ).
    pub fn det_omega(&self) -> Poly {
        determinant(&self.omega_matrix(), &CoeffRing::exact(self.pair.dim_l()))
    }

    pub fn nondegeneracy(&self) -> Nondegeneracy {
        let det = self.det_omega();
        let witness = if det.is_zero() { None } else { find_witness(&det) };
        Nondegeneracy { det, witness }
    }
}

#[derive(Clone, Debug)]
pub struct Nondegeneracy {
    pub det: Poly,
    pub witness: Option<Vec<Rational>>,
}

impl Nondegeneracy {
    pub fn nondegenerate(&self) -> bool {
        !self.det.is_zero()
    }
}

/// Laplace expansion along the first row.
pub fn determinant(m: &[Vec<Poly>], ring: &CoeffRing) -> Poly {
    let n = m.len();
    if n == 0 {
        return ring.one();
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let mut out = ring.zero();
    for col in 0..n {
        if m[0][col].is_zero() {
            continue;
        }
        let minor: Vec<Vec<Poly>> = m[1..]
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(j, _)| *j != col)
                    .map(|(_, p)| p.clone())
                    .collect()
            })
            .collect();
        let term = &m[0][col] * &determinant(&minor, ring);
        let sign = if col % 2 == 0 { int(1) } else { int(-1) };
        out.add_scaled(&term, &sign);
    }
    out
}

/// Integer points of `[−3, 3]^N`, by L1 norm and then coordinate-wise in
/// the order 0, 1, −1, 2, −2, 3, −3.
pub fn witness_points(n: usize) -> Vec<Vec<i64>> {
    const ORDER: [i64; 7] = [0, 1, -1, 2, -2, 3, -3];
    let mut pts: Vec<Vec<usize>> = vec![vec![]];
    for _ in 0..n {
        pts = pts
            .into_iter()
            .flat_map(|p| {
                (0..ORDER.len()).map(move |r| {
                    let mut q = p.clone();
                    q.push(r);
                    q
                })
            })
            .collect();
    }
    pts.sort_by_key(|p| (p.iter().map(|&r| ORDER[r].abs()).sum::<i64>(), p.clone()));
    pts.into_iter()
        .map(|p| p.into_iter().map(|r| ORDER[r]).collect())
        .collect()
}

/// First point of [`witness_points`] where `p` does not vanish.
pub fn find_witness(p: &Poly) -> Option<Vec<Rational>> {
    witness_points(p.nvars()).into_iter().find_map(|pt| {
        let q: Vec<Rational> = pt.into_iter().map(int).collect();
        match p.eval(&q) {
            Ok(v) if !v.is_zero() => Some(q),
            _ => None,
        }
    })
}

/// Convenience for tests and fixtures: `(i, j, [(k, c)])` with integer `c`.
#[allow(clippy::type_complexity)]
pub fn int_brackets(spec: &[(usize, usize, &[(usize, i64)])]) -> Vec<Bracket> {
    spec.iter()
        .map(|(i, j, terms)| (*i, *j, terms.iter().map(|(k, c)| (*k, int(*c))).collect()))
        .collect()
}

/// `λ^α` for a coordinate multi-index, exact mode.
pub fn coordinate_monomial(n: usize, alpha: &[u32]) -> Poly {
    CoeffRing::exact(n).monomial(&MultiIndex::from_slice(alpha), Rational::one())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn sl2(dim_l: usize, ef: (usize, i64)) -> LieAlgebraPair {
        LieAlgebraPair::new(
            "sl2",
            names(&["h", "e", "f"]),
            dim_l,
            &int_brackets(&[(0, 1, &[(1, 2)]), (0, 2, &[(2, -2)]), (1, 2, &[ef])]),
        )
        .unwrap()
    }

    fn axb() -> LieAlgebraPair {
        LieAlgebraPair::new("axb", names(&["l1", "l2"]), 2, &int_brackets(&[(0, 1, &[(1, 1)])])).unwrap()
    }

    #[test]
    fn jacobi() {
        assert!(sl2(3, (0, 1)).check_jacobi().passed());
        assert!(axb().check_jacobi().passed());
        let bad = sl2(1, (1, 1)).check_jacobi();
        assert_eq!(bad.violations.len(), 1);
        assert_eq!(bad.violations[0].names.to_vec(), names(&["h", "e", "f"]));
    }

    #[test]
    fn coadjoint_sign() {
        let p = axb();
        let r = CoeffRing::exact(2);
        let l1 = r.var(0).unwrap();
        let l2 = r.var(1).unwrap();
        assert_eq!(p.coadjoint_act(0, &l2).unwrap(), l2);
        assert_eq!(p.coadjoint_act(1, &l1).unwrap(), -&l2);
        assert!(p.coadjoint_act(0, &r.one()).unwrap().is_zero());
        assert!(p.coadjoint_act(2, &l1).is_err());
    }

    #[test]
    fn subalgebra_is_validated() {
        let err = LieAlgebraPair::new("bad", names(&["e", "f", "h"]), 2, &int_brackets(&[(0, 1, &[(2, 1)])]));
        assert!(matches!(err, Err(Error::InvalidAlgebra(_))));
        let err = LieAlgebraPair::new("bad", names(&["a", "b"]), 2, &int_brackets(&[(1, 0, &[(0, 1)])]));
        assert!(matches!(err, Err(Error::InvalidAlgebra(_))));
    }

    #[test]
    fn polarization_of_sl2() {
        let p = sl2(1, (0, 1)).with_polarization(vec![1], vec![2]).unwrap();
        let pol = p.polarization().unwrap();
        let r = CoeffRing::exact(1);
        let lh = r.var(0).unwrap();
        let om = pol.omega_matrix();
        assert!(om[0][0].is_zero() && om[1][1].is_zero());
        assert_eq!(om[0][1], lh);
        assert_eq!(om[1][0], -&lh);
        let nd = pol.nondegeneracy();
        assert_eq!(nd.det, &lh * &lh);
        assert_eq!(nd.witness, Some(vec![int(1)]));
    }

    #[test]
    fn unstable_polarization_rejected() {
        // [h, e] = 2e leaves span(f)
        let p = sl2(1, (0, 1));
        assert!(Polarization::new(&p, vec![2, 1], vec![]).is_ok());
        assert!(p.clone().with_polarization(vec![2], vec![1]).is_ok());
        let borel_like =
            LieAlgebraPair::new("x", names(&["a", "b", "c"]), 1, &int_brackets(&[(0, 1, &[(2, 1)])])).unwrap();
        assert!(Polarization::new(&borel_like, vec![1], vec![2]).is_err());
    }

    #[test]
    fn character_loci() {
        assert_eq!(axb().character_locus(), vec![vec![int(1), int(0)]]);
        let borel = sl2(2, (0, 1));
        assert_eq!(borel.character_locus(), vec![vec![int(1), int(0)]]);
        let ab = LieAlgebraPair::new("ab", names(&["x", "y"]), 2, &[]).unwrap();
        assert_eq!(ab.character_locus().len(), 2);
    }

    #[test]
    fn witness_order() {
        let pts = witness_points(2);
        assert_eq!(pts.len(), 49);
        assert_eq!(pts[0], vec![0, 0]);
        assert_eq!(pts[1], vec![0, 1]);
        assert_eq!(pts[2], vec![0, -1]);
        assert_eq!(pts[3], vec![1, 0]);
    }
}
