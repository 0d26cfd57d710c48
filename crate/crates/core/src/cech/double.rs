use crate::linalg::{q, zero_vec, CochainComplex, MatrixQ, Vector};

/// A first-quadrant double complex `K^q_p` with commuting differentials
/// `δ: K^q_p -> K^q_{p+1}` and `d: K^q_p -> K^{q+1}_p`.
#[derive(Debug, Clone)]
pub struct DoubleComplex {
    /// `dims[q][p]`
    pub dims: Vec<Vec<usize>>,
    /// `delta[q][p]: K^q_p -> K^q_{p+1}`
    pub delta: Vec<Vec<MatrixQ>>,
    /// `d[q][p]: K^q_p -> K^{q+1}_p`
    pub d: Vec<Vec<MatrixQ>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TotalBlock {
    pub p: usize,
    pub q: usize,
    pub offset: usize,
    pub dim: usize,
}

/// The total complex `T^k = ⊕_{p+q=k, q>=a} K^q_p` with `d_T = d + (-1)^k δ`.
#[derive(Debug, Clone)]
pub struct TotalComplex {
    pub complex: CochainComplex,
    pub layout: Vec<Vec<TotalBlock>>,
}

impl DoubleComplex {
    pub fn rows(&self) -> usize {
        self.dims.len()
    }

    pub fn cols(&self) -> usize {
        self.dims.first().map(Vec::len).unwrap_or(0)
    }

    pub fn dim(&self, q: usize, p: usize) -> usize {
        self.dims.get(q).and_then(|r| r.get(p)).copied().unwrap_or(0)
    }

    pub fn delta(&self, q: usize, p: usize) -> MatrixQ {
        match self.delta.get(q).and_then(|r| r.get(p)) {
            Some(m) => m.clone(),
            None => MatrixQ::zeros(self.dim(q, p + 1), self.dim(q, p)),
        }
    }

    pub fn d(&self, q: usize, p: usize) -> MatrixQ {
        match self.d.get(q).and_then(|r| r.get(p)) {
            Some(m) => m.clone(),
            None => MatrixQ::zeros(self.dim(q + 1, p), self.dim(q, p)),
        }
    }

    /// Positions `(q, p)` where `δδ`, `dd` or `dδ - δd` fails to vanish.
    pub fn defects(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for qq in 0..self.rows() {
            for p in 0..self.cols() {
                let dd = self.d(qq + 1, p).mul(&self.d(qq, p));
                let ss = self.delta(qq, p + 1).mul(&self.delta(qq, p));
                let comm = self.d(qq, p + 1).mul(&self.delta(qq, p)).sub(&self.delta(qq + 1, p).mul(&self.d(qq, p)));
                if !dd.is_zero() || !ss.is_zero() || !comm.is_zero() {
                    out.push((qq, p));
                }
            }
        }
        out
    }

    /// Total complex of the rows `q >= truncation`.
    pub fn total(&self, truncation: usize) -> TotalComplex {
        let top = self.rows() + self.cols();
        let mut layout = Vec::with_capacity(top);
        for k in 0..top {
            let mut blocks = Vec::new();
            let mut offset = 0;
            for p in 0..=k {
                let qq = k - p;
                if qq < truncation || qq >= self.rows() || p >= self.cols() {
                    continue;
                }
                let dim = self.dim(qq, p);
                blocks.push(TotalBlock { p, q: qq, offset, dim });
                offset += dim;
            }
            layout.push(blocks);
        }
        let dims: Vec<usize> = layout.iter().map(|b| b.iter().map(|x| x.dim).sum()).collect();
        let mut diffs = Vec::with_capacity(top.saturating_sub(1));
        for k in 0..top.saturating_sub(1) {
            let mut m = MatrixQ::zeros(dims[k + 1], dims[k]);
            let sign = q(if k % 2 == 0 { 1 } else { -1 });
            for src in &layout[k] {
                for dst in &layout[k + 1] {
                    if dst.p == src.p && dst.q == src.q + 1 {
                        m.add_block(dst.offset, src.offset, &self.d(src.q, src.p));
                    } else if dst.q == src.q && dst.p == src.p + 1 {
                        m.add_block(dst.offset, src.offset, &self.delta(src.q, src.p).scale(&sign));
                    }
                }
            }
            diffs.push(m);
        }
        TotalComplex { complex: CochainComplex::new(dims, diffs).expect("sizes agree"), layout }
    }
}

impl TotalComplex {
    pub fn block(&self, k: usize, p: usize) -> Option<TotalBlock> {
        self.layout.get(k)?.iter().copied().find(|b| b.p == p)
    }

    /// Assembles a degree-`k` vector from its `(p, part)` components; missing
    /// components are zero.
    pub fn assemble(&self, k: usize, parts: &[(usize, Vector)]) -> Vector {
        let mut v = zero_vec(self.complex.dim(k));
        for (p, part) in parts {
            let b = self.block(k, *p).expect("block exists");
            assert_eq!(part.len(), b.dim, "block size");
            v[b.offset..b.offset + b.dim].clone_from_slice(part);
        }
        v
    }

    pub fn extract(&self, k: usize, v: &[crate::linalg::Rational], p: usize) -> Vector {
        match self.block(k, p) {
            Some(b) => v[b.offset..b.offset + b.dim].to_vec(),
            None => Vec::new(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cech::{kron, Nerve};

    #[test]
    fn tensor_double_complex_total_is_complex() {
        let n = Nerve::from_maximal(3, &[vec![0, 1, 2]]);
        let dv = MatrixQ::from_rows(1, &[vec![q(2)]]);
        let cols = n.dim() + 1;
        let vdims = [1usize, 1];
        let dims = (0..2).map(|qq| (0..cols).map(|p| n.count(p) * vdims[qq]).collect()).collect();
        let delta = (0..2).map(|_| (0..cols - 1).map(|p| n.coboundary(p)).collect()).collect();
        let d = vec![(0..cols).map(|p| kron(&MatrixQ::identity(n.count(p)), &dv)).collect()];
        let dc = DoubleComplex { dims, delta, d };
        assert!(dc.defects().is_empty());
        let t = dc.total(0);
        assert!(t.complex.is_complex());
        // d is an isomorphism, so the total complex is acyclic.
        assert!(t.complex.betti().iter().all(|&b| b == 0));
    }
}
