//! Exact rational linear algebra: sparse matrices, kernels, images,
//! particular solutions and subquotients with chosen representatives.
//!
//! Elimination is always done on dense rows with a deterministic pivot rule
//! (first nonzero entry, scanning rows top to bottom), so every basis handed
//! out by this module is reproducible bit for bit.

mod complex;
mod matrix;

pub use complex::CochainComplex;
pub use matrix::MatrixQ;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;

/// Exact rational number; always kept in lowest terms with a positive denominator.
pub type Rational = num_rational::BigRational;

/// Dense column vector over the rationals.
pub type Vector = Vec<Rational>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LinalgError {
    #[error("boundary vector {index} is not in the span of the cycles")]
    BoundaryNotInCycles { index: usize },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
}

/// Integer rational.
pub fn q(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Rational `n/d`. Panics on `d == 0`.
pub fn qf(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero_vec(n: usize) -> Vector {
    vec![Rational::zero(); n]
}

pub fn unit_vec(n: usize, i: usize) -> Vector {
    let mut v = zero_vec(n);
    v[i] = Rational::one();
    v
}

pub fn is_zero_vec(v: &[Rational]) -> bool {
    v.iter().all(Zero::is_zero)
}

pub fn add_scaled(acc: &mut [Rational], c: &Rational, v: &[Rational]) {
    if c.is_zero() {
        return;
    }
    for (a, x) in acc.iter_mut().zip(v) {
        if !x.is_zero() {
            *a += c * x;
        }
    }
}

pub fn vec_add(a: &[Rational], b: &[Rational]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vec_sub(a: &[Rational], b: &[Rational]) -> Vector {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vec_scale(c: &Rational, v: &[Rational]) -> Vector {
    v.iter().map(|x| c * x).collect()
}

/// Parses `"p/q"`, `"p"` or `"-p/q"`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    s.trim().parse::<Rational>().ok()
}

/// Formats as `"p/q"` (or `"p"` for integers).
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

/// `serialize_with` helpers writing rationals as `"p/q"` strings.
pub mod as_strings {
    use serde::Serializer;

    use super::{format_rational, Rational};

    pub fn rational<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn vector<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(v.iter().map(format_rational))
    }
}

/// Reduces `rows` to reduced row echelon form in place and returns the pivot
/// columns. Zero rows are dropped.
pub fn rref(rows: &mut Vec<Vector>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(found) = (r..rows.len()).find(|&i| !rows[i][col].is_zero()) else {
            continue;
        };
        rows.swap(r, found);
        let inv = rows[r][col].recip();
        if !inv.is_one() {
            for x in rows[r].iter_mut() {
                if !x.is_zero() {
                    *x *= &inv;
                }
            }
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[col].is_zero() {
                continue;
            }
            let c = -row[col].clone();
            add_scaled(row, &c, &pivot_row);
        }
        pivots.push(col);
        r += 1;
    }
    rows.truncate(r);
    pivots
}

/// Echelonized basis (RREF rows) of the span of `vectors`.
pub fn span_basis(vectors: &[Vector], dim: usize) -> Vec<Vector> {
    let mut rows: Vec<Vector> = vectors.to_vec();
    rref(&mut rows, dim);
    rows
}

pub fn rank_of_vectors(vectors: &[Vector], dim: usize) -> usize {
    span_basis(vectors, dim).len()
}

/// Basis of `{v : m v = 0}`, returned in reduced echelon form.
pub fn kernel_basis(m: &MatrixQ) -> Vec<Vector> {
    let mut rows = m.to_dense_rows();
    let pivots = rref(&mut rows, m.cols());
    let mut is_pivot = vec![false; m.cols()];
    for &p in &pivots {
        is_pivot[p] = true;
    }
    let mut basis = Vec::new();
    for free in (0..m.cols()).filter(|&c| !is_pivot[c]) {
        let mut v = unit_vec(m.cols(), free);
        for (row, &p) in rows.iter().zip(&pivots) {
            if !row[free].is_zero() {
                v[p] = -row[free].clone();
            }
        }
        basis.push(v);
    }
    span_basis(&basis, m.cols())
}

pub fn rank(m: &MatrixQ) -> usize {
    let mut rows = m.to_dense_rows();
    rref(&mut rows, m.cols()).len()
}

/// Echelonized basis of the column space of `m`.
pub fn image_basis(m: &MatrixQ) -> Vec<Vector> {
    span_basis(&m.columns(), m.rows())
}

/// Some `x` with `m x = b`, or `None` when the system is inconsistent.
/// Free variables are set to zero, so the answer is deterministic.
pub fn solve_linear(m: &MatrixQ, b: &[Rational]) -> Option<Vector> {
    assert_eq!(b.len(), m.rows(), "right-hand side has wrong length");
    let n = m.cols();
    let mut rows = m.to_dense_rows();
    for (row, bi) in rows.iter_mut().zip(b) {
        row.push(bi.clone());
    }
    let pivots = rref(&mut rows, n + 1);
    if pivots.last() == Some(&n) {
        return None;
    }
    let mut x = zero_vec(n);
    for (row, &p) in rows.iter().zip(&pivots) {
        x[p] = row[n].clone();
    }
    Some(x)
}

/// Coordinates of `v` in the (independent) family `basis`, if `v` lies in its span.
pub fn coordinates_in(basis: &[Vector], v: &[Rational]) -> Option<Vector> {
    if basis.is_empty() {
        return is_zero_vec(v).then(Vec::new);
    }
    let m = MatrixQ::from_columns(v.len(), basis);
    solve_linear(&m, v)
}

pub fn in_span(basis: &[Vector], v: &[Rational]) -> bool {
    if is_zero_vec(v) {
        return true;
    }
    let r = rank_of_vectors(basis, v.len());
    let mut ext = basis.to_vec();
    ext.push(v.to_vec());
    rank_of_vectors(&ext, v.len()) == r
}

/// Echelonized basis of `U ∩ W`.
pub fn intersect(u: &[Vector], w: &[Vector], dim: usize) -> Vec<Vector> {
    if u.is_empty() || w.is_empty() {
        return Vec::new();
    }
    // [U | -W] (a, b) = 0  <=>  U a = W b
    let mut cols: Vec<Vector> = u.to_vec();
    cols.extend(w.iter().map(|x| x.iter().map(|y| -y).collect::<Vector>()));
    let m = MatrixQ::from_columns(dim, &cols);
    let ker = kernel_basis(&m);
    let vecs: Vec<Vector> = ker
        .iter()
        .map(|k| {
            let mut acc = zero_vec(dim);
            for (c, ui) in k.iter().zip(u) {
                add_scaled(&mut acc, c, ui);
            }
            acc
        })
        .collect();
    span_basis(&vecs, dim)
}

/// Rows of a matrix whose common kernel is exactly `span(basis)`.
pub fn annihilator(basis: &[Vector], dim: usize) -> MatrixQ {
    let b = MatrixQ::from_rows(dim, basis);
    let ker = kernel_basis(&b);
    MatrixQ::from_rows(dim, &ker)
}

/// Image of a subspace under a linear map, echelonized.
pub fn map_span(m: &MatrixQ, basis: &[Vector]) -> Vec<Vector> {
    let imgs: Vec<Vector> = basis.iter().map(|v| m.mul_vec(v)).collect();
    span_basis(&imgs, m.rows())
}

/// Preimage `{x ∈ span(domain) : m x ∈ span(target)}`, echelonized.
pub fn restricted_preimage(m: &MatrixQ, domain: &[Vector], target: &[Vector]) -> Vec<Vector> {
    let ann = annihilator(target, m.rows());
    let dom = MatrixQ::from_columns(m.cols(), domain);
    let cond = ann.mul(&m.mul(&dom));
    let ker = kernel_basis(&cond);
    let vecs: Vec<Vector> = ker.iter().map(|k| dom.mul_vec(k)).collect();
    span_basis(&vecs, m.cols())
}

/// A subquotient `Z / B` of a finite-dimensional rational space, together
/// with representatives projecting to a basis of the quotient.
#[derive(Debug, Clone, PartialEq)]
pub struct Subquotient {
    pub ambient_dim: usize,
    pub cycle_basis: Vec<Vector>,
    pub boundary_basis: Vec<Vector>,
    pub representative_basis: Vec<Vector>,
}

/// Builds `span(cycles) / span(boundaries)`.
///
/// Representatives are the echelonized cycle vectors reduced against the
/// boundary pivots, kept in order whenever they are new modulo what was
/// already chosen.
pub fn subquotient(ambient_dim: usize, cycles: &[Vector], boundaries: &[Vector]) -> Result<Subquotient, LinalgError> {
    let cycle_basis = span_basis(cycles, ambient_dim);
    let boundary_basis = span_basis(boundaries, ambient_dim);
    for (index, b) in boundaries.iter().enumerate() {
        if !in_span(&cycle_basis, b) {
            return Err(LinalgError::BoundaryNotInCycles { index });
        }
    }
    let mut echelon: Vec<Vector> = boundary_basis.clone();
    let mut pivots = pivot_columns(&echelon);
    let mut reps = Vec::new();
    for z in &cycle_basis {
        let mut v = z.clone();
        for (row, &p) in echelon.iter().zip(&pivots) {
            if !v[p].is_zero() {
                let c = -v[p].clone();
                add_scaled(&mut v, &c, row);
            }
        }
        if let Some(lead) = v.iter().position(|x| !x.is_zero()) {
            let inv = v[lead].recip();
            v = vec_scale(&inv, &v);
            // keep echelon reduced at the new pivot column
            for row in echelon.iter_mut() {
                if !row[lead].is_zero() {
                    let c = -row[lead].clone();
                    add_scaled(row, &c, &v);
                }
            }
            echelon.push(v.clone());
            pivots.push(lead);
            reps.push(v);
        }
    }
    Ok(Subquotient { ambient_dim, cycle_basis, boundary_basis, representative_basis: reps })
}

fn pivot_columns(rows: &[Vector]) -> Vec<usize> {
    rows.iter().map(|r| r.iter().position(|x| !x.is_zero()).expect("zero row in echelon basis")).collect()
}

impl Subquotient {
    pub fn dim(&self) -> usize {
        self.representative_basis.len()
    }

    pub fn contains_cycle(&self, v: &[Rational]) -> bool {
        in_span(&self.cycle_basis, v)
    }

    pub fn is_boundary(&self, v: &[Rational]) -> bool {
        in_span(&self.boundary_basis, v)
    }

    /// Coordinates of the class of `v` in the representative basis, or
    /// `None` if `v` is not a cycle.
    pub fn class_of(&self, v: &[Rational]) -> Option<Vector> {
        if self.dim() == 0 {
            return self.contains_cycle(v).then(Vec::new);
        }
        let mut cols = self.representative_basis.clone();
        cols.extend(self.boundary_basis.iter().cloned());
        let x = coordinates_in(&cols, v)?;
        Some(x[..self.dim()].to_vec())
    }

    /// Vector representing the class with the given coordinates.
    pub fn lift(&self, coords: &[Rational]) -> Vector {
        let mut acc = zero_vec(self.ambient_dim);
        for (c, r) in coords.iter().zip(&self.representative_basis) {
            add_scaled(&mut acc, c, r);
        }
        acc
    }

    /// A boundary-space preimage: `Some(coeffs)` with
    /// `v = Σ coeffs[i] boundary_basis[i]` when `v` is a boundary.
    pub fn boundary_coordinates(&self, v: &[Rational]) -> Option<Vector> {
        coordinates_in(&self.boundary_basis, v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(xs: &[i64]) -> Vector {
        xs.iter().map(|&x| q(x)).collect()
    }

    #[test]
    fn kernel_of_identity_is_empty() {
        assert!(kernel_basis(&MatrixQ::identity(2)).is_empty());
    }

    #[test]
    fn kernel_of_row_of_ones() {
        let m = MatrixQ::from_rows(2, &[v(&[1, 1])]);
        assert_eq!(kernel_basis(&m), vec![v(&[1, -1])]);
    }

    #[test]
    fn subquotient_of_equal_spaces_is_zero() {
        let z = vec![v(&[1, 2, 0]), v(&[0, 1, 1])];
        let sq = subquotient(3, &z, &z).unwrap();
        assert_eq!(sq.dim(), 0);
    }

    #[test]
    fn subquotient_without_boundaries_is_whole_space() {
        let z = vec![v(&[1, 0]), v(&[0, 1])];
        assert_eq!(subquotient(2, &z, &[]).unwrap().dim(), 2);
    }

    #[test]
    fn subquotient_rejects_foreign_boundary() {
        let z = vec![v(&[1, 0, 0])];
        let err = subquotient(3, &z, &[v(&[0, 1, 0])]).unwrap_err();
        assert_eq!(err, LinalgError::BoundaryNotInCycles { index: 0 });
    }

    #[test]
    fn subquotient_three_over_one() {
        let z = vec![v(&[1, 0, 0, 0]), v(&[0, 1, 0, 0]), v(&[0, 0, 1, 0])];
        let b = vec![v(&[1, 1, 0, 0])];
        let sq = subquotient(4, &z, &b).unwrap();
        assert_eq!(sq.dim(), 2);
        // representatives are reduced against the boundary pivot column
        for r in &sq.representative_basis {
            assert!(r[0].is_zero());
        }
        // independent modulo boundaries
        let mut all = sq.representative_basis.clone();
        all.extend(sq.boundary_basis.clone());
        assert_eq!(rank_of_vectors(&all, 4), 3);
    }

    #[test]
    fn solve_identity_and_zero() {
        let b = v(&[3, -1, 2]);
        assert_eq!(solve_linear(&MatrixQ::identity(3), &b), Some(b.clone()));
        assert_eq!(solve_linear(&MatrixQ::zeros(3, 3), &b), None);
    }

    #[test]
    fn class_of_roundtrips_through_lift() {
        let z = vec![v(&[1, 0, 0]), v(&[0, 1, 0]), v(&[0, 0, 1])];
        let b = vec![v(&[1, 1, 1])];
        let sq = subquotient(3, &z, &b).unwrap();
        let coords = v(&[2, -5]);
        let x = vec_add(&sq.lift(&coords), &v(&[7, 7, 7]));
        assert_eq!(sq.class_of(&x).unwrap(), coords);
    }

    #[test]
    fn intersection_of_planes() {
        let u = vec![v(&[1, 0, 0]), v(&[0, 1, 0])];
        let w = vec![v(&[0, 1, 0]), v(&[0, 0, 1])];
        assert_eq!(intersect(&u, &w, 3), vec![v(&[0, 1, 0])]);
    }

    #[test]
    fn rational_text_roundtrip() {
        let r = parse_rational("-6/4").unwrap();
        assert_eq!(format_rational(&r), "-3/2");
        assert_eq!(parse_rational("5").unwrap(), q(5));
    }
}
