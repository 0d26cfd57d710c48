use std::cell::RefCell;
use std::collections::BTreeMap;

use serde::Serialize;

use super::{
    bigraded_dim, cup_rho, d_a, d_alpha_split, d_l, d_l_sign, filtration_subspace, kron_identity, rho_of, rho_sign,
    split_matrix, split_offsets, wedge_phi, FilteredComplex, SpectralError, SpectralPage, Splitting,
};
use crate::cech::{kron, DoubleComplex, Nerve, TotalComplex};
use crate::extension::ExtensionStructure;
use crate::linalg::{
    is_zero_vec, kernel_basis, q, span_basis, subquotient, unit_vec, CochainComplex, MatrixQ, Subquotient, Vector,
};
use crate::lr::FormSpace;

/// A filtered total complex together with a splitting isomorphism
/// `Δ = (Δ^0, .., Δ^W): T^k -> ⊕_m X_m^k` and operators
/// `D^a: X_{m-a}^k -> X_m^{k+1}` with `Δ^m d_T = Σ_a D^a Δ^{m-a}`.
pub trait SplitModel {
    fn filtered(&self) -> &FilteredComplex;
    /// Largest weight `m`.
    fn weights(&self) -> usize;
    fn x_dim(&self, m: usize, k: usize) -> usize;
    /// Rows stacked by `m = 0..=weights()`.
    fn split(&self, k: usize) -> MatrixQ;
    fn d_op(&self, a: usize, m: usize, k: usize) -> MatrixQ;

    fn top_degree(&self) -> usize {
        self.filtered().top_degree()
    }

    fn x_offsets(&self, k: usize) -> Vec<usize> {
        let mut offs = vec![0];
        for m in 0..=self.weights() {
            let last = *offs.last().expect("nonempty");
            offs.push(last + self.x_dim(m, k));
        }
        offs
    }

    /// `Δ^m_k`.
    fn split_component(&self, m: usize, k: usize) -> MatrixQ {
        let offs = self.x_offsets(k);
        let s = self.split(k);
        s.block(offs[m], 0, offs[m + 1] - offs[m], s.cols())
    }
}

/// Pairs `(k, m)` where `Δ^m d_T ≠ Σ_a D^a Δ^{m-a}` on `T^k`.
pub fn split_identity_defects<M: SplitModel + ?Sized>(model: &M) -> Vec<(usize, usize)> {
    let fc = model.filtered();
    let mut out = Vec::new();
    for k in 0..fc.top_degree() {
        let d = fc.complex.diff(k);
        for m in 0..=model.weights() {
            let lhs = model.split_component(m, k + 1).mul(&d);
            let mut rhs = MatrixQ::zeros(lhs.rows(), lhs.cols());
            for a in 0..=m {
                rhs = rhs.add(&model.d_op(a, m, k).mul(&model.split_component(m - a, k)));
            }
            if lhs != rhs {
                out.push((k, m));
            }
        }
    }
    out
}

/// The filtration defined by `Δ^m h = 0` for `m < p`.
pub fn split_filtered<M: SplitModel + ?Sized>(model: &M) -> FilteredComplex {
    let fc = model.filtered();
    let filtration = (0..=fc.top_degree())
        .map(|k| {
            let n = fc.complex.dim(k);
            (0..=model.weights() + 1)
                .map(|p| {
                    if p == 0 {
                        return (0..n).map(|i| unit_vec(n, i)).collect();
                    }
                    let offs = model.x_offsets(k);
                    let s = model.split(k);
                    kernel_basis(&s.block(0, 0, offs[p.min(offs.len() - 1)], n))
                })
                .collect()
        })
        .collect();
    FilteredComplex { complex: fc.complex.clone(), filtration }
}

/// Pairs `(k, p)` where the model filtration differs from the split one.
pub fn membership_defects<M: SplitModel + ?Sized>(model: &M) -> Vec<(usize, usize)> {
    let fc = model.filtered();
    let sf = split_filtered(model);
    let mut out = Vec::new();
    for k in 0..=fc.top_degree() {
        let n = fc.complex.dim(k);
        for p in 0..=model.weights() + 1 {
            let a = span_basis(&fc.f(k, p as isize), n);
            let b = span_basis(&sf.f(k, p as isize), n);
            if a != b {
                out.push((k, p));
            }
        }
    }
    out
}

/// `(X_m^•, D^0)`.
pub fn d0_complex<M: SplitModel + ?Sized>(model: &M, m: usize) -> CochainComplex {
    let top = model.top_degree();
    let dims = (0..=top).map(|k| model.x_dim(m, k)).collect();
    let diffs = (0..top).map(|k| model.d_op(0, m, k)).collect();
    CochainComplex::new(dims, diffs).expect("sizes agree")
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CellCheck {
    pub p: usize,
    pub q: usize,
    pub page: usize,
    pub expected: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct E1Report {
    pub cells: Vec<CellCheck>,
    pub matches: bool,
}

/// Compares `E_1^{p,q}` with `H^{p+q}(X_p, D^0)`.
pub fn e1_check<M: SplitModel + ?Sized>(model: &M, page1: &SpectralPage) -> E1Report {
    let mut cells = Vec::new();
    for p in 0..=model.weights() {
        let betti = d0_complex(model, p).betti();
        for k in p..=model.top_degree() {
            cells.push(CellCheck { p, q: k - p, page: page1.dim(p, k - p), expected: betti[k] });
        }
    }
    let page_total: usize = page1.cells.values().map(Subquotient::dim).sum();
    let checked_total: usize = cells.iter().map(|c| c.page).sum();
    let matches = page_total == checked_total && cells.iter().all(|c| c.page == c.expected);
    E1Report { cells, matches }
}

fn h<M: SplitModel + ?Sized>(model: &M, m: usize, k: usize) -> Subquotient {
    d0_complex(model, m).cohomology(k)
}

/// `[D^1]: H^k(X_m) -> H^{k+1}(X_{m+1})` in representative coordinates.
pub fn d1_map<M: SplitModel + ?Sized>(model: &M, m: usize, k: usize) -> MatrixQ {
    let src = h(model, m, k);
    if m + 1 > model.weights() || k >= model.top_degree() {
        return MatrixQ::zeros(0, src.dim());
    }
    let tgt = h(model, m + 1, k + 1);
    let d1 = model.d_op(1, m + 1, k);
    let cols: Vec<Vector> = src
        .representative_basis
        .iter()
        .map(|x| tgt.class_of(&d1.mul_vec(x)).expect("D^1 maps D^0-cocycles to D^0-cocycles"))
        .collect();
    MatrixQ::from_columns(tgt.dim(), &cols)
}

/// Class of `D^1 x` in `H^{k+1}(X_{m+1})` for a `D^0`-cocycle `x ∈ X_m^k`.
pub fn d1_evaluate<M: SplitModel + ?Sized>(
    model: &M,
    m: usize,
    k: usize,
    x: &[crate::Rational],
) -> Result<Vector, SpectralError> {
    if !is_zero_vec(&model.d_op(0, m, k).mul_vec(x)) {
        return Err(SpectralError::NotACocycle);
    }
    let tgt = h(model, m + 1, k + 1);
    Ok(tgt.class_of(&model.d_op(1, m + 1, k).mul_vec(x)).expect("D^1 x is D^0-closed"))
}

/// `E_2` cell dimensions from `ker [D^1] / im [D^1]`.
pub fn e2_dims_from_operators<M: SplitModel + ?Sized>(model: &M) -> BTreeMap<(usize, usize), usize> {
    let mut out = BTreeMap::new();
    for m in 0..=model.weights() {
        for k in m..=model.top_degree() {
            out.insert((m, k - m), e2_cell(model, m, k).dim());
        }
    }
    out
}

/// `E_2` at `(m, k - m)` as a subquotient of `H^k(X_m)` coordinates.
fn e2_cell<M: SplitModel + ?Sized>(model: &M, m: usize, k: usize) -> Subquotient {
    let hdim = h(model, m, k).dim();
    let out_map = d1_map(model, m, k);
    let cycles =
        if out_map.rows() == 0 { (0..hdim).map(|i| unit_vec(hdim, i)).collect() } else { kernel_basis(&out_map) };
    let boundaries = if m >= 1 && k >= 1 { d1_map(model, m - 1, k - 1).columns() } else { Vec::new() };
    subquotient(hdim, &cycles, &boundaries).expect("[D^1] squares to zero")
}

/// Given `h ∈ T^k` in `Z_2^{p,k-p}`, the representative `D^1 Δ^{p+1} h + D^2 Δ^p h`
/// of `d_2[h]` and its coordinates in the operator-level `E_2^{p+2,k-p-1}`.
pub fn d2_evaluate<M: SplitModel + ?Sized>(
    model: &M,
    p: usize,
    k: usize,
    hv: &[crate::Rational],
) -> Result<(Vector, Vector), SpectralError> {
    for m in 0..p.min(model.weights() + 1) {
        if !is_zero_vec(&model.split_component(m, k).mul_vec(hv)) {
            return Err(SpectralError::NotInZ2);
        }
    }
    let comp = |m: usize| -> Vector {
        if m <= model.weights() {
            model.split_component(m, k).mul_vec(hv)
        } else {
            Vec::new()
        }
    };
    let x0 = comp(p);
    if !is_zero_vec(&model.d_op(0, p, k).mul_vec(&x0)) {
        return Err(SpectralError::NotInZ2);
    }
    if p < model.weights() {
        let x1 = comp(p + 1);
        let r = model.d_op(0, p + 1, k).mul_vec(&x1);
        let r2 = model.d_op(1, p + 1, k).mul_vec(&x0);
        if !is_zero_vec(&crate::linalg::vec_add(&r, &r2)) {
            return Err(SpectralError::NotInZ2);
        }
    }
    if p + 2 > model.weights() || k >= model.top_degree() {
        return Ok((Vec::new(), Vec::new()));
    }
    let x1 = comp(p + 1);
    let mut y = model.d_op(1, p + 2, k).mul_vec(&x1);
    crate::linalg::add_scaled(&mut y, &q(1), &model.d_op(2, p + 2, k).mul_vec(&x0));
    let hc = h(model, p + 2, k + 1).class_of(&y).expect("representative is D^0-closed");
    let cell = e2_cell(model, p + 2, k + 1);
    let coords = cell.class_of(&hc).expect("representative is a [D^1]-cycle");
    Ok((y, coords))
}

/// `D^1_{s'} ξ - D^1_s ξ - D^0(ψ ⌣ ξ)`-type residual, computed through the
/// induced maps: the two splittings give the same `[D^1]` on `D^0`-cohomology.
pub fn d1_well_defined_residual<M: SplitModel + ?Sized, N: SplitModel + ?Sized>(a: &M, b: &N) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    for m in 0..a.weights() {
        for k in m..a.top_degree() {
            let ha = h(a, m, k);
            let ta = h(a, m + 1, k + 1);
            for x in &ha.representative_basis {
                let ya = a.d_op(1, m + 1, k).mul_vec(x);
                let yb = b.d_op(1, m + 1, k).mul_vec(x);
                if !ta.is_boundary(&crate::linalg::vec_sub(&ya, &yb)) {
                    out.push((m, k));
                }
            }
        }
    }
    out
}

/// The de Rham complex of an extension over a nerve (constant fibers,
/// identity restrictions), with one splitting per vertex; each simplex uses
/// the splitting of its first vertex.
#[derive(Debug, Clone)]
pub struct NerveSplitModel {
    pub ext: ExtensionStructure,
    pub nerve: Nerve,
    pub splittings: Vec<Splitting>,
    total: TotalComplex,
    filtered: FilteredComplex,
    split_cache: RefCell<BTreeMap<usize, MatrixQ>>,
    op_cache: RefCell<BTreeMap<(usize, usize, usize), MatrixQ>>,
}

impl NerveSplitModel {
    pub fn new(ext: ExtensionStructure, nerve: Nerve, splittings: Vec<Splitting>) -> Self {
        assert_eq!(splittings.len(), nerve.vertex_count, "one splitting per vertex");
        let top_a = ext.total.rank;
        let cols = nerve.dim() + 1;
        let fdim: Vec<usize> = (0..=top_a).map(|k| FormSpace::new(top_a, k, ext.b.base_dim()).dim()).collect();
        let dims = (0..=top_a).map(|k| (0..cols).map(|c| nerve.count(c) * fdim[k]).collect()).collect();
        let delta = (0..=top_a)
            .map(|k| (0..cols - 1).map(|c| kron(&nerve.coboundary(c), &MatrixQ::identity(fdim[k]))).collect())
            .collect();
        let d = (0..top_a).map(|k| (0..cols).map(|c| kron_identity(nerve.count(c), &d_a(&ext, k))).collect()).collect();
        let total = DoubleComplex { dims, delta, d }.total(0);
        let top = total.complex.top_degree();
        let filtration = (0..=top)
            .map(|k| {
                (0..=k + 1)
                    .map(|p| {
                        let n = total.complex.dim(k);
                        let mut basis = Vec::new();
                        for blk in &total.layout[k] {
                            let fq = filtration_subspace(&ext, p, blk.q);
                            let fd = fdim[blk.q];
                            for s in 0..nerve.count(blk.p) {
                                for v in &fq {
                                    let mut w = vec![q(0); n];
                                    w[blk.offset + s * fd..blk.offset + (s + 1) * fd].clone_from_slice(v);
                                    basis.push(w);
                                }
                            }
                        }
                        basis
                    })
                    .collect()
            })
            .collect();
        let filtered = FilteredComplex { complex: total.complex.clone(), filtration };
        NerveSplitModel {
            ext,
            nerve,
            splittings,
            total,
            filtered,
            split_cache: RefCell::default(),
            op_cache: RefCell::default(),
        }
    }

    /// Canonical splitting on every vertex.
    pub fn canonical(ext: ExtensionStructure, nerve: Nerve) -> Self {
        let s = Splitting::canonical(&ext);
        let n = nerve.vertex_count;
        NerveSplitModel::new(ext, nerve, vec![s; n])
    }

    pub fn total_complex(&self) -> &TotalComplex {
        &self.total
    }

    fn r_of(&self, m: usize, k: usize, c: usize) -> Option<usize> {
        let r = k.checked_sub(c + m)?;
        (r <= self.ext.l.rank && m <= self.ext.b.rank).then_some(r)
    }

    /// Offset of the block `(c, simplex)` inside `X_m^k`.
    fn x_block(&self, m: usize, k: usize, c: usize, s: usize) -> Option<(usize, usize)> {
        let r = self.r_of(m, k, c)?;
        let mut off = 0;
        for c2 in 0..c {
            if let Some(r2) = self.r_of(m, k, c2) {
                off += self.nerve.count(c2) * bigraded_dim(&self.ext, m, r2);
            }
        }
        let bd = bigraded_dim(&self.ext, m, r);
        Some((off + s * bd, bd))
    }
}

impl SplitModel for NerveSplitModel {
    fn filtered(&self) -> &FilteredComplex {
        &self.filtered
    }

    fn weights(&self) -> usize {
        self.ext.b.rank
    }

    fn x_dim(&self, m: usize, k: usize) -> usize {
        (0..=self.nerve.dim())
            .filter_map(|c| self.r_of(m, k, c).map(|r| self.nerve.count(c) * bigraded_dim(&self.ext, m, r)))
            .sum()
    }

    fn split(&self, k: usize) -> MatrixQ {
        if let Some(m) = self.split_cache.borrow().get(&k) {
            return m.clone();
        }
        let m = self.compute_split(k);
        self.split_cache.borrow_mut().insert(k, m.clone());
        m
    }

    fn d_op(&self, a: usize, m: usize, k: usize) -> MatrixQ {
        if let Some(x) = self.op_cache.borrow().get(&(a, m, k)) {
            return x.clone();
        }
        let x = self.compute_d_op(a, m, k);
        self.op_cache.borrow_mut().insert((a, m, k), x.clone());
        x
    }
}

impl NerveSplitModel {
    fn compute_split(&self, k: usize) -> MatrixQ {
        let xoffs = self.x_offsets(k);
        let n = self.total.complex.dim(k);
        let mut out = MatrixQ::zeros(*xoffs.last().expect("nonempty"), n);
        let fd = |qq: usize| FormSpace::new(self.ext.total.rank, qq, self.ext.b.base_dim()).dim();
        let mut per_vertex: BTreeMap<(usize, usize), MatrixQ> = BTreeMap::new();
        for blk in &self.total.layout[k] {
            let c = blk.p;
            let qq = blk.q;
            let soffs = split_offsets(&self.ext, qq);
            for (si, simplex) in self.nerve.simplices(c).iter().enumerate() {
                let sm = per_vertex
                    .entry((simplex[0], qq))
                    .or_insert_with(|| split_matrix(&self.ext, &self.splittings[simplex[0]], qq));
                for m in 0..=qq.min(self.weights()) {
                    let Some((xo, bd)) = self.x_block(m, k, c, si) else { continue };
                    let piece = sm.block(soffs[m], 0, bd, fd(qq));
                    out.add_block(xoffs[m] + xo, blk.offset + si * fd(qq), &piece);
                }
            }
        }
        out
    }

    fn compute_d_op(&self, a: usize, m: usize, k: usize) -> MatrixQ {
        let e = &self.ext;
        let rows = self.x_dim(m, k + 1);
        let Some(src_m) = m.checked_sub(a) else {
            return MatrixQ::zeros(rows, 0);
        };
        let mut out = MatrixQ::zeros(rows, self.x_dim(src_m, k));
        let delta_sign = q(if k % 2 == 0 { 1 } else { -1 });
        for c in 0..=self.nerve.dim() {
            for (si, simplex) in self.nerve.simplices(c).iter().enumerate() {
                let Some((so, _)) = self.x_block(src_m, k, c, si) else { continue };
                let s = &self.splittings[simplex[0]];
                let r_src = k - c - src_m;
                // vertical part on the same simplex
                if let Some((to, _)) = self.x_block(m, k + 1, c, si) {
                    let block = match a {
                        0 => Some(d_l(e, m, r_src).scale(&q(d_l_sign(m)))),
                        1 => Some(d_alpha_split(e, s, src_m, r_src)),
                        2 => Some(cup_rho(e, &rho_of(e, s), src_m, r_src).scale(&q(rho_sign(m)))),
                        _ => None,
                    };
                    if let Some(b) = block {
                        out.add_block(to, so, &b);
                    }
                }
            }
            // Čech part into simplices of dimension c + 1
            for (ti, tau) in self.nerve.simplices(c + 1).iter().enumerate() {
                let Some((to, _)) = self.x_block(m, k + 1, c + 1, ti) else { continue };
                for nu in 0..tau.len() {
                    let face = crate::cech::face(tau, nu);
                    let fi = self.nerve.index_of(&face).expect("face closed");
                    let Some((so, _)) = self.x_block(src_m, k, c, fi) else { continue };
                    let sign = if nu % 2 == 0 { delta_sign.clone() } else { -delta_sign.clone() };
                    let r_src = k - c - src_m;
                    if nu == 0 {
                        let psi = self.splittings[tau[0]].sigma.add(&self.splittings[tau[1]].sigma.scale(&q(-1)));
                        let b = wedge_phi(e, &psi, a, src_m, r_src);
                        out.add_block(to, so, &b.scale(&sign));
                    } else if a == 0 {
                        out.add_block(to, so, &MatrixQ::identity(bigraded_dim(e, m, r_src)).scale(&sign));
                    }
                }
            }
        }
        out
    }
}

/// A split model given directly by invertible split matrices: the operators
/// `D^a` are the blocks of `Δ_{k+1} d_T Δ_k^{-1}`.
#[derive(Debug, Clone)]
pub struct BlockSplitModel {
    filtered: FilteredComplex,
    /// `x_dims[k][m]`
    x_dims: Vec<Vec<usize>>,
    split: Vec<MatrixQ>,
    conjugated: Vec<MatrixQ>,
}

impl BlockSplitModel {
    /// `split[k]` and `unsplit[k]` must be mutually inverse.
    pub fn new(filtered: FilteredComplex, x_dims: Vec<Vec<usize>>, split: Vec<MatrixQ>, unsplit: Vec<MatrixQ>) -> Self {
        let top = filtered.top_degree();
        for k in 0..=top {
            assert_eq!(split[k].mul(&unsplit[k]), MatrixQ::identity(filtered.complex.dim(k)), "split is invertible");
        }
        let conjugated = (0..top).map(|k| split[k + 1].mul(&filtered.complex.diff(k)).mul(&unsplit[k])).collect();
        BlockSplitModel { filtered, x_dims, split, conjugated }
    }
}

impl SplitModel for BlockSplitModel {
    fn filtered(&self) -> &FilteredComplex {
        &self.filtered
    }

    fn weights(&self) -> usize {
        self.x_dims.iter().map(Vec::len).max().unwrap_or(1) - 1
    }

    fn x_dim(&self, m: usize, k: usize) -> usize {
        self.x_dims.get(k).and_then(|r| r.get(m)).copied().unwrap_or(0)
    }

    fn split(&self, k: usize) -> MatrixQ {
        self.split[k].clone()
    }

    fn d_op(&self, a: usize, m: usize, k: usize) -> MatrixQ {
        let (src, tgt) = (self.x_offsets(k), self.x_offsets(k + 1));
        let rows = tgt[m + 1] - tgt[m];
        let cols = src[m - a + 1] - src[m - a];
        self.conjugated[k].block(tgt[m], src[m - a], rows, cols)
    }
}
