use std::collections::BTreeMap;

use num_traits::{One, Zero};

use super::{zero_vec, Rational, Vector};

/// Sparse rational matrix. Only nonzero entries are stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixQ {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), Rational>,
}

impl MatrixQ {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        MatrixQ { rows, cols, entries: BTreeMap::new() }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, Rational::one());
        }
        m
    }

    pub fn from_rows(cols: usize, rows: &[Vector]) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "row {i} has wrong length");
            for (j, x) in r.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn from_columns(rows: usize, cols: &[Vector]) -> Self {
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            assert_eq!(c.len(), rows, "column {j} has wrong length");
            for (i, x) in c.iter().enumerate() {
                m.set(i, j, x.clone());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> Rational {
        self.entries.get(&(i, j)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn set(&mut self, i: usize, j: usize, x: Rational) {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of range");
        if x.is_zero() {
            self.entries.remove(&(i, j));
        } else {
            self.entries.insert((i, j), x);
        }
    }

    pub fn add_at(&mut self, i: usize, j: usize, x: &Rational) {
        if x.is_zero() {
            return;
        }
        let v = self.get(i, j) + x;
        self.set(i, j, v);
    }

    pub fn nonzeros(&self) -> impl Iterator<Item = (&(usize, usize), &Rational)> {
        self.entries.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn to_dense_rows(&self) -> Vec<Vector> {
        let mut out = vec![zero_vec(self.cols); self.rows];
        for (&(i, j), x) in &self.entries {
            out[i][j] = x.clone();
        }
        out
    }

    pub fn column(&self, j: usize) -> Vector {
        let mut c = zero_vec(self.rows);
        for i in 0..self.rows {
            if let Some(x) = self.entries.get(&(i, j)) {
                c[i] = x.clone();
            }
        }
        c
    }

    pub fn columns(&self) -> Vec<Vector> {
        let mut out = vec![zero_vec(self.rows); self.cols];
        for (&(i, j), x) in &self.entries {
            out[j][i] = x.clone();
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for (&(i, j), x) in &self.entries {
            t.entries.insert((j, i), x.clone());
        }
        t
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vector {
        assert_eq!(v.len(), self.cols, "vector length does not match columns");
        let mut out = zero_vec(self.rows);
        for (&(i, j), x) in &self.entries {
            if !v[j].is_zero() {
                out[i] += x * &v[j];
            }
        }
        out
    }

    pub fn mul(&self, other: &MatrixQ) -> MatrixQ {
        assert_eq!(self.cols, other.rows, "inner dimensions differ");
        let mut by_row: Vec<Vec<(usize, &Rational)>> = vec![Vec::new(); other.rows];
        for (&(k, j), y) in &other.entries {
            by_row[k].push((j, y));
        }
        let mut out = MatrixQ::zeros(self.rows, other.cols);
        for (&(i, k), x) in &self.entries {
            for &(j, y) in &by_row[k] {
                out.add_at(i, j, &(x * y));
            }
        }
        out
    }

    pub fn add(&self, other: &MatrixQ) -> MatrixQ {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut out = self.clone();
        for (&(i, j), y) in &other.entries {
            out.add_at(i, j, y);
        }
        out
    }

    pub fn sub(&self, other: &MatrixQ) -> MatrixQ {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn scale(&self, c: &Rational) -> MatrixQ {
        let mut out = MatrixQ::zeros(self.rows, self.cols);
        if c.is_zero() {
            return out;
        }
        for (&k, x) in &self.entries {
            out.entries.insert(k, x * c);
        }
        out
    }

    /// Commutator `self * other - other * self`.
    pub fn commutator(&self, other: &MatrixQ) -> MatrixQ {
        self.mul(other).sub(&other.mul(self))
    }

    /// Places `block` with its top-left corner at `(r0, c0)`, adding to existing entries.
    pub fn add_block(&mut self, r0: usize, c0: usize, block: &MatrixQ) {
        for (&(i, j), x) in &block.entries {
            self.add_at(r0 + i, c0 + j, x);
        }
    }

    pub fn block(&self, r0: usize, c0: usize, rows: usize, cols: usize) -> MatrixQ {
        let mut out = MatrixQ::zeros(rows, cols);
        for (&(i, j), x) in self.entries.range((r0, 0)..(r0 + rows, 0)) {
            if j >= c0 && j < c0 + cols {
                out.entries.insert((i - r0, j - c0), x.clone());
            }
        }
        out
    }

    /// Flattens row-major into a vector of length `rows * cols`.
    pub fn flatten(&self) -> Vector {
        let mut out = zero_vec(self.rows * self.cols);
        for (&(i, j), x) in &self.entries {
            out[i * self.cols + j] = x.clone();
        }
        out
    }

    pub fn unflatten(rows: usize, cols: usize, v: &[Rational]) -> MatrixQ {
        assert_eq!(v.len(), rows * cols);
        let mut m = MatrixQ::zeros(rows, cols);
        for (k, x) in v.iter().enumerate() {
            if !x.is_zero() {
                m.entries.insert((k / cols, k % cols), x.clone());
            }
        }
        m
    }
}


/// Dense rows of `"p/q"` strings.
impl serde::Serialize for MatrixQ {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> =
            self.to_dense_rows().iter().map(|r| r.iter().map(super::format_rational).collect()).collect();
        rows.serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::q;

    #[test]
    fn product_matches_hand_computation() {
        let a = MatrixQ::from_rows(2, &[vec![q(1), q(2)], vec![q(0), q(1)]]);
        let b = MatrixQ::from_rows(2, &[vec![q(3), q(0)], vec![q(1), q(1)]]);
        let c = a.mul(&b);
        assert_eq!(c.to_dense_rows(), vec![vec![q(5), q(2)], vec![q(1), q(1)]]);
    }

    #[test]
    fn block_extraction_and_flatten() {
        let mut m = MatrixQ::zeros(3, 3);
        m.set(1, 2, q(4));
        m.set(2, 1, q(-1));
        let b = m.block(1, 1, 2, 2);
        assert_eq!(b.get(0, 1), q(4));
        assert_eq!(b.get(1, 0), q(-1));
        assert_eq!(MatrixQ::unflatten(3, 3, &m.flatten()), m);
    }
}
