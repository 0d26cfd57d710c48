use super::{image_basis, kernel_basis, subquotient, LinalgError, MatrixQ, Subquotient};

/// A bounded cochain complex of finite-dimensional rational spaces.
/// `diffs[k]` maps degree `k` to degree `k + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct CochainComplex {
    pub dims: Vec<usize>,
    pub diffs: Vec<MatrixQ>,
}

impl CochainComplex {
    pub fn new(dims: Vec<usize>, diffs: Vec<MatrixQ>) -> Result<Self, LinalgError> {
        for (k, d) in diffs.iter().enumerate() {
            let target = dims.get(k + 1).copied().unwrap_or(0);
            if d.cols() != dims[k] {
                return Err(LinalgError::DimensionMismatch { expected: dims[k], found: d.cols() });
            }
            if d.rows() != target {
                return Err(LinalgError::DimensionMismatch { expected: target, found: d.rows() });
            }
        }
        Ok(CochainComplex { dims, diffs })
    }

    pub fn top_degree(&self) -> usize {
        self.dims.len().saturating_sub(1)
    }

    pub fn dim(&self, k: usize) -> usize {
        self.dims.get(k).copied().unwrap_or(0)
    }

    /// Differential out of degree `k` (zero map past the stored range).
    pub fn diff(&self, k: usize) -> MatrixQ {
        self.diffs.get(k).cloned().unwrap_or_else(|| MatrixQ::zeros(self.dim(k + 1), self.dim(k)))
    }

    /// Degrees `k` where `d_{k+1} d_k` is nonzero.
    pub fn square_defects(&self) -> Vec<usize> {
        (0..self.dims.len()).filter(|&k| !self.diff(k + 1).mul(&self.diff(k)).is_zero()).collect()
    }

    pub fn is_complex(&self) -> bool {
        self.square_defects().is_empty()
    }

    pub fn cohomology(&self, k: usize) -> Subquotient {
        let cycles = kernel_basis(&self.diff(k));
        let boundaries = if k == 0 { Vec::new() } else { image_basis(&self.diff(k - 1)) };
        subquotient(self.dim(k), &cycles, &boundaries).expect("boundaries lie in cycles for a complex")
    }

    pub fn betti(&self) -> Vec<usize> {
        (0..self.dims.len()).map(|k| self.cohomology(k).dim()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::q;

    #[test]
    fn circle_complex_cohomology() {
        // two vertices, two edges, both edges from v0 to v1
        let d0 = MatrixQ::from_rows(2, &[vec![q(-1), q(1)], vec![q(-1), q(1)]]);
        let c = CochainComplex::new(vec![2, 2], vec![d0]).unwrap();
        assert!(c.is_complex());
        assert_eq!(c.betti(), vec![1, 1]);
    }
}
