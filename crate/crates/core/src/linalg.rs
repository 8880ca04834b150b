//! Sparse exact linear algebra: reduced row echelon form and nullspaces.

use std::collections::BTreeMap;

use num_traits::{One, Zero};

use crate::rational::Rational;

pub type SparseRow = BTreeMap<usize, Rational>;

/// Rows in reduced row echelon form, keyed by pivot column.
#[derive(Clone, Debug, Default)]
pub struct Rref {
    ncols: usize,
    rows: BTreeMap<usize, SparseRow>,
}

fn axpy(target: &mut SparseRow, c: &Rational, row: &SparseRow) {
    for (j, v) in row {
        let entry = target.entry(*j).or_insert_with(Rational::zero);
        *entry += c * v;
        if entry.is_zero() {
            target.remove(j);
        }
    }
}

impl Rref {
    pub fn new(ncols: usize) -> Self {
        Rref {
            ncols,
            rows: BTreeMap::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn pivots(&self) -> impl Iterator<Item = &usize> {
        self.rows.keys()
    }

    /// Adds a row, keeping the form fully reduced. Returns whether the rank grew.
    pub fn insert(&mut self, mut row: SparseRow) -> bool {
        row.retain(|_, v| !v.is_zero());
        let cols: Vec<usize> = row.keys().copied().collect();
        for j in cols {
            if let Some(pivot_row) = self.rows.get(&j) {
                if let Some(c) = row.get(&j).cloned() {
                    axpy(&mut row, &-c, pivot_row);
                }
            }
        }
        let Some((&p, lead)) = row.iter().next() else {
            return false;
        };
        let inv = lead.recip();
        for v in row.values_mut() {
            *v *= &inv;
        }
        for other in self.rows.values_mut() {
            if let Some(c) = other.get(&p).cloned() {
                axpy(other, &-c, &row);
            }
        }
        self.rows.insert(p, row);
        true
    }

    /// Basis of `{x : A x = 0}`, one vector per free column, each with a 1 in
    /// its free column.
    pub fn nullspace(&self) -> Vec<SparseRow> {
        let mut out = Vec::new();
        for f in 0..self.ncols {
            if self.rows.contains_key(&f) {
                continue;
            }
            let mut v = SparseRow::new();
            v.insert(f, Rational::one());
            for (&p, row) in &self.rows {
                if let Some(c) = row.get(&f) {
                    v.insert(p, -c.clone());
                }
            }
            out.push(v);
        }
        out
    }
}

/// Nullspace of the matrix with the given sparse rows.
pub fn nullspace(ncols: usize, rows: impl IntoIterator<Item = SparseRow>) -> Vec<SparseRow> {
    let mut r = Rref::new(ncols);
    for row in rows {
        r.insert(row);
    }
    r.nullspace()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    fn row(entries: &[(usize, i64)]) -> SparseRow {
        entries.iter().map(|&(j, v)| (j, int(v))).collect()
    }

    #[test]
    fn rank_and_kernel() {
        // x + y + z = 0, 2x + 2y + 2z = 0, y − z = 0
        let rows = vec![
            row(&[(0, 1), (1, 1), (2, 1)]),
            row(&[(0, 2), (1, 2), (2, 2)]),
            row(&[(1, 1), (2, -1)]),
        ];
        let mut r = Rref::new(3);
        let grew: Vec<bool> = rows.iter().cloned().map(|x| r.insert(x)).collect();
        assert_eq!(grew, vec![true, false, true]);
        let ns = r.nullspace();
        assert_eq!(ns.len(), 1);
        let v = &ns[0];
        for original in &rows {
            let dot: Rational = original
                .iter()
                .map(|(j, a)| a * v.get(j).cloned().unwrap_or_default())
                .sum();
            assert!(dot.is_zero());
        }
        assert_eq!(v.get(&2), Some(&int(1)));
        assert_eq!(v.get(&0), Some(&int(-2)));
    }

    #[test]
    fn empty_system_is_everything() {
        assert_eq!(nullspace(2, Vec::new()).len(), 2);
    }
}
