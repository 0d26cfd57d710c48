//! Čech machinery over a finite nerve: cochains of a presheaf of finite
//! dimensional spaces, double complexes and their (truncated) total
//! complexes, and the global extension theory built on top of them.

mod double;
mod glue;
mod triple;

pub use double::{DoubleComplex, TotalBlock, TotalComplex};
pub use glue::{glue_extension, glued_equivalent, torsor_action_global, GluedExtension, Trivialization};
pub use triple::{
    build_lifting_triple, global_obstruction_class, obstruction_triple, verify_cocycle, CocycleReport,
    GlobalObstruction, LiftingTriple, NerveCoupling, ObstructionTriple,
};

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::extension::ExtensionError;
use crate::linalg::{q, CochainComplex, MatrixQ};
use crate::lr::subsets;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CechError {
    #[error("restriction from {face:?} to {simplex:?} is missing")]
    MissingRestriction { face: Vec<usize>, simplex: Vec<usize> },
    #[error("no transition form solves α_j - α_i = ad φ on edge ({0},{1})")]
    NoPhiSolution(usize, usize),
    #[error("local couplings disagree modulo inner derivations on edge ({0},{1})")]
    IncompatibleCouplings(usize, usize),
    #[error("trivialization fails equation {equation}")]
    TrivializationInvalid { equation: usize },
    #[error("cochain is not closed")]
    NotClosed,
    #[error("value is not central")]
    CenterEscape,
    #[error(transparent)]
    Extension(#[from] ExtensionError),
}

/// A finite simplicial complex on vertices `0..vertex_count`, closed under faces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nerve {
    pub vertex_count: usize,
    simplices: Vec<Vec<Vec<usize>>>,
}

impl Nerve {
    /// The face closure of the given simplices (plus all vertices).
    pub fn from_maximal(vertex_count: usize, maximal: &[Vec<usize>]) -> Self {
        let mut all: BTreeSet<Vec<usize>> = (0..vertex_count).map(|v| vec![v]).collect();
        for s in maximal {
            let mut s = s.clone();
            s.sort_unstable();
            s.dedup();
            assert!(s.iter().all(|&v| v < vertex_count), "vertex out of range");
            for k in 1..=s.len() {
                for idx in subsets(s.len(), k) {
                    all.insert(idx.iter().map(|&i| s[i]).collect());
                }
            }
        }
        let top = all.iter().map(Vec::len).max().unwrap_or(0);
        let mut simplices = vec![Vec::new(); top];
        for s in all {
            simplices[s.len() - 1].push(s);
        }
        Nerve { vertex_count, simplices }
    }

    pub fn point() -> Self {
        Nerve::from_maximal(1, &[])
    }

    /// Dimension of the top simplices.
    pub fn dim(&self) -> usize {
        self.simplices.len().saturating_sub(1)
    }

    /// The `p`-simplices as sorted vertex lists (`p + 1` vertices each).
    pub fn simplices(&self, p: usize) -> &[Vec<usize>] {
        self.simplices.get(p).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn count(&self, p: usize) -> usize {
        self.simplices(p).len()
    }

    pub fn index_of(&self, s: &[usize]) -> Option<usize> {
        let p = s.len().checked_sub(1)?;
        self.simplices(p).binary_search_by(|x| x.as_slice().cmp(s)).ok()
    }

    pub fn is_connected(&self) -> bool {
        if self.vertex_count == 0 {
            return true;
        }
        let mut seen = vec![false; self.vertex_count];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for e in self.simplices(1) {
                for (a, b) in [(e[0], e[1]), (e[1], e[0])] {
                    if a == v && !seen[b] {
                        seen[b] = true;
                        stack.push(b);
                    }
                }
            }
        }
        seen.into_iter().all(|x| x)
    }

    /// Coboundary of Čech cochains with constant coefficients `Q`:
    /// `(δc)_{i_0..i_{p+1}} = Σ_ν (-1)^ν c_{i_0..î_ν..i_{p+1}}`.
    pub fn coboundary(&self, p: usize) -> MatrixQ {
        let mut m = MatrixQ::zeros(self.count(p + 1), self.count(p));
        for (r, s) in self.simplices(p + 1).iter().enumerate() {
            for nu in 0..s.len() {
                let face: Vec<usize> = s.iter().enumerate().filter(|&(k, _)| k != nu).map(|(_, &v)| v).collect();
                let c = self.index_of(&face).expect("nerve is face closed");
                m.add_at(r, c, &q(if nu % 2 == 0 { 1 } else { -1 }));
            }
        }
        m
    }
}

/// Face of `s` omitting position `nu`.
pub fn face(s: &[usize], nu: usize) -> Vec<usize> {
    s.iter().enumerate().filter(|&(k, _)| k != nu).map(|(_, &v)| v).collect()
}

/// A presheaf of finite-dimensional spaces on a nerve: one space per simplex
/// and restriction maps from each codimension-one face.
#[derive(Debug, Clone)]
pub struct SheafData {
    pub nerve: Nerve,
    pub dims: BTreeMap<Vec<usize>, usize>,
    /// `(face, simplex)` to the matrix of restriction from the face to the simplex.
    pub restrictions: BTreeMap<(Vec<usize>, Vec<usize>), MatrixQ>,
}

impl SheafData {
    /// The constant presheaf with fiber `Q^dim` and identity restrictions.
    pub fn constant(nerve: &Nerve, dim: usize) -> Self {
        let mut dims = BTreeMap::new();
        let mut restrictions = BTreeMap::new();
        for p in 0..=nerve.dim() {
            for s in nerve.simplices(p) {
                dims.insert(s.clone(), dim);
                if p > 0 {
                    for nu in 0..s.len() {
                        restrictions.insert((face(s, nu), s.clone()), MatrixQ::identity(dim));
                    }
                }
            }
        }
        SheafData { nerve: nerve.clone(), dims, restrictions }
    }

    pub fn cochain_dim(&self, p: usize) -> usize {
        self.nerve.simplices(p).iter().map(|s| self.dims[s]).sum()
    }

    pub fn offset(&self, s: &[usize]) -> usize {
        let p = s.len() - 1;
        self.nerve.simplices(p).iter().take_while(|x| x.as_slice() != s).map(|x| self.dims[x]).sum()
    }

    pub fn restriction(&self, face: &[usize], simplex: &[usize]) -> Result<&MatrixQ, CechError> {
        self.restrictions
            .get(&(face.to_vec(), simplex.to_vec()))
            .ok_or_else(|| CechError::MissingRestriction { face: face.to_vec(), simplex: simplex.to_vec() })
    }

    /// Simplices `s` and positions where restricting through two different
    /// intermediate faces disagrees.
    pub fn functoriality_defects(&self) -> Vec<(Vec<usize>, usize, usize)> {
        let mut out = Vec::new();
        for p in 2..=self.nerve.dim() {
            for s in self.nerve.simplices(p) {
                for a in 0..s.len() {
                    for b in a + 1..s.len() {
                        let fa = face(s, a);
                        let fb = face(s, b);
                        let fab = face(&fa, b - 1);
                        let via_a = self.restriction(&fa, s).and_then(|r| Ok(r.mul(self.restriction(&fab, &fa)?)));
                        let via_b = self.restriction(&fb, s).and_then(|r| Ok(r.mul(self.restriction(&fab, &fb)?)));
                        match (via_a, via_b) {
                            (Ok(x), Ok(y)) if x == y => {}
                            _ => out.push((s.clone(), a, b)),
                        }
                    }
                }
            }
        }
        out
    }

    /// `(δc)_{i_0..i_{p+1}} = Σ_ν (-1)^ν res(c_{i_0..î_ν..i_{p+1}})`.
    pub fn cech_differential(&self, p: usize) -> Result<MatrixQ, CechError> {
        let mut m = MatrixQ::zeros(self.cochain_dim(p + 1), self.cochain_dim(p));
        for s in self.nerve.simplices(p + 1) {
            let row = self.offset(s);
            for nu in 0..s.len() {
                let f = face(s, nu);
                let r = self.restriction(&f, s)?;
                let sign = q(if nu % 2 == 0 { 1 } else { -1 });
                m.add_block(row, self.offset(&f), &r.scale(&sign));
            }
        }
        Ok(m)
    }

    pub fn cech_complex(&self) -> Result<CochainComplex, CechError> {
        let top = self.nerve.dim();
        let dims = (0..=top).map(|p| self.cochain_dim(p)).collect();
        let diffs = (0..top).map(|p| self.cech_differential(p)).collect::<Result<Vec<_>, _>>()?;
        Ok(CochainComplex::new(dims, diffs).expect("sizes agree"))
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &MatrixQ, b: &MatrixQ) -> MatrixQ {
    let mut m = MatrixQ::zeros(a.rows() * b.rows(), a.cols() * b.cols());
    for (&(i, j), x) in a.nonzeros() {
        for (&(k, l), y) in b.nonzeros() {
            m.set(i * b.rows() + k, j * b.cols() + l, x * y);
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn face_closure() {
        let n = Nerve::from_maximal(3, &[vec![0, 1, 2]]);
        assert_eq!(n.count(0), 3);
        assert_eq!(n.count(1), 3);
        assert_eq!(n.count(2), 1);
        assert!(n.is_connected());
        assert!(n.coboundary(1).mul(&n.coboundary(0)).is_zero());
    }

    #[test]
    fn kronecker() {
        let a = MatrixQ::identity(2);
        let b = MatrixQ::from_rows(1, &[vec![q(3)]]);
        assert_eq!(kron(&a, &b), MatrixQ::identity(2).scale(&q(3)));
    }
}
