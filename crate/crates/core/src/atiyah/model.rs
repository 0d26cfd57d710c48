use crate::cech::{DoubleComplex, Nerve, SheafData, TotalComplex};
use crate::linalg::{q, MatrixQ, Rational, Vector};
use crate::spectral::{BlockSplitModel, FilteredComplex};

/// A line bundle `O(t)` on the two-chart cover of the projective line,
/// truncated at degree `D`. Chart 0 has coordinate `z` and frame `e0`,
/// chart 1 has coordinate `w = 1/z` and frame `e1 = sign * z^t e0`.
/// Sections over the overlap are Laurent polynomials in `z` times `e0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LaurentSheaf {
    pub twist: i64,
    pub sign: i64,
    pub truncation: usize,
}

impl LaurentSheaf {
    pub fn line_bundle(n: i64, truncation: usize) -> Self {
        LaurentSheaf { twist: n, sign: 1, truncation }
    }

    /// Holomorphic 1-forms: `dw = -z^{-2} dz`.
    pub fn one_forms(truncation: usize) -> Self {
        LaurentSheaf { twist: -2, sign: -1, truncation }
    }

    pub fn chart_dim(&self) -> usize {
        self.truncation + 1
    }

    /// Exponent window `[lo, hi]` on the overlap.
    pub fn window(&self) -> (i64, i64) {
        let d = self.truncation as i64;
        ((self.twist - d).min(0), d.max(self.twist))
    }

    pub fn overlap_dim(&self) -> usize {
        let (lo, hi) = self.window();
        (hi - lo + 1) as usize
    }

    /// Overlap coordinate of `z^j e0`.
    pub fn index(&self, j: i64) -> usize {
        let (lo, hi) = self.window();
        assert!((lo..=hi).contains(&j), "exponent {j} outside the window");
        (j - lo) as usize
    }

    /// Restriction from chart `i` to the overlap.
    pub fn restriction(&self, chart: usize) -> MatrixQ {
        let mut m = MatrixQ::zeros(self.overlap_dim(), self.chart_dim());
        for k in 0..self.chart_dim() {
            let k = k as i64;
            if chart == 0 {
                m.set(self.index(k), k as usize, q(1));
            } else {
                m.set(self.index(self.twist - k), k as usize, q(self.sign));
            }
        }
        m
    }

    pub fn sheaf_data(&self) -> SheafData {
        let nerve = Nerve::from_maximal(2, &[vec![0, 1]]);
        let mut s = SheafData::constant(&nerve, 0);
        s.dims.insert(vec![0], self.chart_dim());
        s.dims.insert(vec![1], self.chart_dim());
        s.dims.insert(vec![0, 1], self.overlap_dim());
        s.restrictions.insert((vec![0], vec![0, 1]), self.restriction(0));
        s.restrictions.insert((vec![1], vec![0, 1]), self.restriction(1));
        s
    }

    /// `dim H^0, dim H^1` of the truncated Čech complex.
    pub fn cohomology_dims(&self) -> Vec<usize> {
        self.sheaf_data().cech_complex().expect("restrictions present").betti()
    }
}

/// Where a local coordinate lives: `O`, `Ω^1`, `O ε` or `Ω^1 ∧ ε`, with `ε`
/// the dual of the unit section of the kernel `O`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Piece {
    Functions,
    OneForms,
    FunctionsEps,
    OneFormsEps,
}

impl Piece {
    /// Number of base (tangent) arguments.
    pub fn weight(self) -> usize {
        match self {
            Piece::Functions | Piece::FunctionsEps => 0,
            Piece::OneForms | Piece::OneFormsEps => 1,
        }
    }

    pub fn has_eps(self) -> bool {
        matches!(self, Piece::FunctionsEps | Piece::OneFormsEps)
    }

    fn pieces(form_degree: usize) -> &'static [Piece] {
        match form_degree {
            0 => &[Piece::Functions],
            1 => &[Piece::OneForms, Piece::FunctionsEps],
            2 => &[Piece::OneFormsEps],
            _ => &[],
        }
    }
}

/// Location of one coordinate of the total complex.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Coord {
    /// 0 and 1 for the charts, 2 for the overlap.
    pub open: usize,
    pub form_degree: usize,
    pub piece: Piece,
    /// Exponent of `z` (overlap, chart 0) or `w` (chart 1).
    pub exponent: i64,
}

/// The truncated two-chart model of the Atiyah algebroid of `O(n)` on the
/// projective line. Locally `D_M = O ⊕ Θ` through the flat connection of
/// each chart frame, so the local forms are `Ω_X ⊗ Λ(ε)` with `dε = 0`.
/// On the overlap the chart-1 form `ε_1` reads `ε_0 - φ01`.
#[derive(Debug, Clone)]
pub struct P1Model {
    pub degree: i64,
    pub truncation: usize,
    pub functions: LaurentSheaf,
    pub one_forms: LaurentSheaf,
    pub line_bundle: LaurentSheaf,
    /// `φ01` in overlap `Ω^1` coordinates.
    pub phi01: Vector,
    pub double: DoubleComplex,
    pub total: TotalComplex,
    /// `coords[k]` describes each coordinate of `T^k`.
    pub coords: Vec<Vec<Coord>>,
}

impl P1Model {
    pub(crate) fn assemble(n: i64, truncation: usize) -> Self {
        let functions = LaurentSheaf::line_bundle(0, truncation);
        let one_forms = LaurentSheaf::one_forms(truncation);
        let line_bundle = LaurentSheaf::line_bundle(n, truncation);
        let mut phi01 = vec![q(0); one_forms.overlap_dim()];
        phi01[one_forms.index(-1)] = q(-n);
        let mut model = P1Model {
            degree: n,
            truncation,
            functions,
            one_forms,
            line_bundle,
            phi01,
            double: DoubleComplex { dims: vec![], delta: vec![], d: vec![] },
            total: DoubleComplex { dims: vec![], delta: vec![], d: vec![] }.total(0),
            coords: vec![],
        };
        model.double = model.build_double();
        model.total = model.double.total(0);
        model.coords = model.build_coords();
        model
    }

    fn sheaf(&self, piece: Piece) -> &LaurentSheaf {
        match piece {
            Piece::Functions | Piece::FunctionsEps => &self.functions,
            Piece::OneForms | Piece::OneFormsEps => &self.one_forms,
        }
    }

    fn piece_dim(&self, open: usize, piece: Piece) -> usize {
        let s = self.sheaf(piece);
        if open == 2 {
            s.overlap_dim()
        } else {
            s.chart_dim()
        }
    }

    fn piece_exponents(&self, open: usize, piece: Piece) -> Vec<i64> {
        let s = self.sheaf(piece);
        if open == 2 {
            let (lo, hi) = s.window();
            (lo..=hi).collect()
        } else {
            (0..=s.truncation as i64).collect()
        }
    }

    fn local_dim(&self, open: usize, form_degree: usize) -> usize {
        Piece::pieces(form_degree).iter().map(|&p| self.piece_dim(open, p)).sum()
    }

    /// Local coordinates of `(open, form_degree)` in storage order.
    fn local_coords(&self, open: usize, form_degree: usize) -> Vec<Coord> {
        Piece::pieces(form_degree)
            .iter()
            .flat_map(|&piece| {
                self.piece_exponents(open, piece).into_iter().map(move |exponent| Coord {
                    open,
                    form_degree,
                    piece,
                    exponent,
                })
            })
            .collect()
    }

    fn piece_offset(&self, open: usize, form_degree: usize, piece: Piece) -> usize {
        Piece::pieces(form_degree).iter().take_while(|&&p| p != piece).map(|&p| self.piece_dim(open, p)).sum()
    }

    /// `z^k -> k z^{k-1} dz`, on a chart or on the overlap.
    fn de_rham(&self, open: usize) -> MatrixQ {
        let tgt = &self.one_forms;
        let srcs = self.piece_exponents(open, Piece::Functions);
        let mut m = MatrixQ::zeros(self.piece_dim(open, Piece::OneForms), srcs.len());
        for (c, &k) in srcs.iter().enumerate() {
            if k != 0 {
                let row = if open == 2 { tgt.index(k - 1) } else { (k - 1) as usize };
                m.set(row, c, q(k));
            }
        }
        m
    }

    /// `d` on `(open, form_degree)`: `f -> df`, `f ε -> df ∧ ε`.
    fn local_d(&self, open: usize, form_degree: usize) -> MatrixQ {
        let mut m = MatrixQ::zeros(self.local_dim(open, form_degree + 1), self.local_dim(open, form_degree));
        let dr = self.de_rham(open);
        match form_degree {
            0 => m.add_block(self.piece_offset(open, 1, Piece::OneForms), 0, &dr),
            1 => m.add_block(
                self.piece_offset(open, 2, Piece::OneFormsEps),
                self.piece_offset(open, 1, Piece::FunctionsEps),
                &dr,
            ),
            _ => {}
        }
        m
    }

    /// Multiplication by `φ01` from overlap functions to overlap 1-forms.
    pub fn phi_multiplication(&self) -> MatrixQ {
        let (lo, hi) = self.functions.window();
        let mut m = MatrixQ::zeros(self.one_forms.overlap_dim(), self.functions.overlap_dim());
        for j in lo..=hi {
            let c = self.functions.index(j);
            for (i, x) in self.phi01.iter().enumerate() {
                if *x != q(0) {
                    let e = i as i64 + self.one_forms.window().0;
                    m.set(self.one_forms.index(j + e), c, x.clone());
                }
            }
        }
        m
    }

    /// Restriction of chart-`i` forms of a given degree to the overlap,
    /// written in the chart-0 splitting.
    fn local_restriction(&self, chart: usize, form_degree: usize) -> MatrixQ {
        let mut m = MatrixQ::zeros(self.local_dim(2, form_degree), self.local_dim(chart, form_degree));
        for &piece in Piece::pieces(form_degree) {
            let r = self.sheaf(piece).restriction(chart);
            let off_t = self.piece_offset(2, form_degree, piece);
            let off_s = self.piece_offset(chart, form_degree, piece);
            m.add_block(off_t, off_s, &r);
        }
        if chart == 1 && form_degree == 1 {
            let shift = self.phi_multiplication().mul(&self.functions.restriction(1)).scale(&q(-1));
            m.add_block(self.piece_offset(2, 1, Piece::OneForms), self.piece_offset(1, 1, Piece::FunctionsEps), &shift);
        }
        m
    }

    fn build_double(&self) -> DoubleComplex {
        let dims = (0..3).map(|f| vec![self.local_dim(0, f) + self.local_dim(1, f), self.local_dim(2, f)]).collect();
        let delta = (0..3)
            .map(|f| {
                let mut m = MatrixQ::zeros(self.local_dim(2, f), self.local_dim(0, f) + self.local_dim(1, f));
                m.add_block(0, 0, &self.local_restriction(0, f).scale(&q(-1)));
                m.add_block(0, self.local_dim(0, f), &self.local_restriction(1, f));
                vec![m]
            })
            .collect();
        let d = (0..2)
            .map(|f| {
                let mut charts = MatrixQ::zeros(
                    self.local_dim(0, f + 1) + self.local_dim(1, f + 1),
                    self.local_dim(0, f) + self.local_dim(1, f),
                );
                charts.add_block(0, 0, &self.local_d(0, f));
                charts.add_block(self.local_dim(0, f + 1), self.local_dim(0, f), &self.local_d(1, f));
                vec![charts, self.local_d(2, f)]
            })
            .collect();
        DoubleComplex { dims, delta, d }
    }

    fn build_coords(&self) -> Vec<Vec<Coord>> {
        self.total
            .layout
            .iter()
            .map(|blocks| {
                blocks
                    .iter()
                    .flat_map(|b| {
                        let opens: Vec<usize> = if b.p == 0 { vec![0, 1] } else { vec![2] };
                        opens.into_iter().flat_map(move |o| self.local_coords(o, b.q))
                    })
                    .collect()
            })
            .collect()
    }

    pub fn top_degree(&self) -> usize {
        self.total.complex.top_degree()
    }

    /// Position of a coordinate in `T^k`.
    pub fn position(&self, k: usize, c: &Coord) -> Option<usize> {
        self.coords.get(k)?.iter().position(|x| x == c)
    }

    /// `F^p T^k`: coordinates with at least `p` base arguments.
    pub fn filtered(&self) -> FilteredComplex {
        let filtration = self
            .coords
            .iter()
            .map(|cs| {
                (0..=2)
                    .map(|p| {
                        let n = cs.len();
                        cs.iter()
                            .enumerate()
                            .filter(|(_, c)| c.piece.weight() >= p)
                            .map(|(i, _)| crate::linalg::unit_vec(n, i))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        FilteredComplex { complex: self.total.complex.clone(), filtration }
    }

    /// The split model for the local connections `∇_i + c_i dz_i`, where
    /// `dz_0 = dz` and `dz_1 = dw`. Every simplex uses the splitting of its
    /// first vertex.
    pub fn split_model(&self, shifts: [Rational; 2]) -> BlockSplitModel {
        let mut x_dims = Vec::new();
        let mut split = Vec::new();
        let mut unsplit = Vec::new();
        for (k, cs) in self.coords.iter().enumerate() {
            let n = cs.len();
            let mut shear = MatrixQ::zeros(n, n);
            for (i, c) in cs.iter().enumerate() {
                if c.piece != Piece::FunctionsEps {
                    continue;
                }
                let c_i = &shifts[if c.open == 1 { 1 } else { 0 }];
                if *c_i == q(0) {
                    continue;
                }
                let target = Coord { piece: Piece::OneForms, ..*c };
                let j = self.position(k, &target).expect("1-form window contains function window");
                shear.set(j, i, c_i.clone());
            }
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by_key(|&i| cs[i].piece.weight());
            let mut perm = MatrixQ::zeros(n, n);
            for (row, &i) in order.iter().enumerate() {
                perm.set(row, i, q(1));
            }
            let id = MatrixQ::identity(n);
            split.push(perm.mul(&id.add(&shear)));
            unsplit.push(id.sub(&shear).mul(&perm.transpose()));
            let w0 = cs.iter().filter(|c| c.piece.weight() == 0).count();
            x_dims.push(vec![w0, n - w0]);
        }
        BlockSplitModel::new(self.filtered(), x_dims, split, unsplit)
    }
}
