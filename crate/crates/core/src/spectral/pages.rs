use std::collections::BTreeMap;

use serde::Serialize;

use crate::linalg::{
    in_span, map_span, rank, restricted_preimage, span_basis, subquotient, unit_vec, CochainComplex, MatrixQ,
    Subquotient, Vector,
};

/// A cochain complex with a descending filtration `F^p T^k` given by bases.
#[derive(Debug, Clone)]
pub struct FilteredComplex {
    pub complex: CochainComplex,
    /// `filtration[k][p]` spans `F^p T^k`; missing entries are zero.
    pub filtration: Vec<Vec<Vec<Vector>>>,
}

impl FilteredComplex {
    pub fn top_degree(&self) -> usize {
        self.complex.top_degree()
    }

    /// `F^p T^k`, with `F^p = T` for `p <= 0`.
    pub fn f(&self, k: usize, p: isize) -> Vec<Vector> {
        let n = self.complex.dim(k);
        if p <= 0 {
            return (0..n).map(|i| unit_vec(n, i)).collect();
        }
        self.filtration.get(k).and_then(|f| f.get(p as usize)).cloned().unwrap_or_default()
    }

    /// Largest `p` with `F^p T^k` nonzero, over all `k`.
    pub fn length(&self) -> usize {
        self.filtration.iter().map(|f| f.iter().rposition(|b| !b.is_empty()).unwrap_or(0)).max().unwrap_or(0)
    }

    /// Failed filtration axioms, one message each.
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.complex.is_complex() {
            out.push("d_T does not square to zero".into());
        }
        for k in 0..=self.top_degree() {
            let n = self.complex.dim(k);
            if span_basis(&self.f(k, 0), n).len() != n {
                out.push(format!("F^0 T^{k} is not everything"));
            }
            if !self.f(k, k as isize + 1).is_empty() {
                out.push(format!("F^{} T^{k} is nonzero", k + 1));
            }
            for p in 0..=k + 1 {
                let (big, small) = (self.f(k, p as isize), self.f(k, p as isize + 1));
                if !small.iter().all(|v| in_span(&big, v)) {
                    out.push(format!("F^{} T^{k} is not inside F^{p}", p + 1));
                }
                if k < self.top_degree() {
                    let img = map_span(&self.complex.diff(k), &big);
                    let tgt = self.f(k + 1, p as isize);
                    if !img.iter().all(|v| in_span(&tgt, v)) {
                        out.push(format!("d_T does not preserve F^{p} in degree {k}"));
                    }
                }
            }
        }
        out
    }

    /// `Z_r^{p,k-p} = F^p T^k ∩ d^{-1} F^{p+r} T^{k+1}`.
    pub fn z(&self, r: isize, p: isize, k: usize) -> Vec<Vector> {
        let fp = self.f(k, p);
        if r <= 0 || fp.is_empty() {
            return span_basis(&fp, self.complex.dim(k));
        }
        let target = self.f(k + 1, p + r);
        restricted_preimage(&self.complex.diff(k), &fp, &target)
    }

    /// `B_r^{p,k-p} = Z_{r-1}^{p+1,k-p-1} + d Z_{r-1}^{p-r+1,k-p+r-2}`.
    pub fn b(&self, r: isize, p: isize, k: usize) -> Vec<Vector> {
        let mut gens = self.z(r - 1, p + 1, k);
        if k > 0 {
            gens.extend(map_span(&self.complex.diff(k - 1), &self.z(r - 1, p - r + 1, k - 1)));
        }
        span_basis(&gens, self.complex.dim(k))
    }
}

/// Page `E_r`: cells `E_r^{p,q}` keyed by `(p, q)` and differentials
/// `d_r: E_r^{p,q} -> E_r^{p+r,q-r+1}` as matrices in representative
/// coordinates.
#[derive(Debug, Clone)]
pub struct SpectralPage {
    pub r: usize,
    pub cells: BTreeMap<(usize, usize), Subquotient>,
    pub differentials: BTreeMap<(usize, usize), MatrixQ>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PageSummary {
    pub r: usize,
    /// `dims[(p, q)]`, keyed as `"p,q"`.
    pub dims: BTreeMap<String, usize>,
    pub nonzero_differentials: Vec<String>,
}

impl SpectralPage {
    pub fn dim(&self, p: usize, q: usize) -> usize {
        self.cells.get(&(p, q)).map(Subquotient::dim).unwrap_or(0)
    }

    /// `Σ_{p+q=k} dim E_r^{p,q}` for each `k`.
    pub fn totals(&self) -> Vec<usize> {
        let top = self.cells.keys().map(|(p, q)| p + q).max().unwrap_or(0);
        let mut t = vec![0; top + 1];
        for ((p, q), c) in &self.cells {
            t[p + q] += c.dim();
        }
        t
    }

    pub fn differential(&self, p: usize, q: usize) -> Option<&MatrixQ> {
        self.differentials.get(&(p, q))
    }

    pub fn all_differentials_zero(&self) -> bool {
        self.differentials.values().all(MatrixQ::is_zero)
    }

    /// Target cell of `d_r` from `(p, q)`, if it lies in the first quadrant.
    pub fn target(&self, p: usize, q: usize) -> Option<(usize, usize)> {
        let q2 = (q + 1).checked_sub(self.r)?;
        Some((p + self.r, q2))
    }

    /// Cells where `d_r ∘ d_r` is nonzero.
    pub fn square_defects(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (&(p, q), m) in &self.differentials {
            let Some(t) = self.target(p, q) else { continue };
            if let Some(m2) = self.differentials.get(&t) {
                if !m2.mul(m).is_zero() {
                    out.push((p, q));
                }
            }
        }
        out
    }

    /// Cell dimensions of the homology of `(E_r, d_r)`.
    pub fn homology_dims(&self) -> BTreeMap<(usize, usize), usize> {
        let mut dims: BTreeMap<(usize, usize), usize> = self.cells.iter().map(|(&k, c)| (k, c.dim())).collect();
        for (&(p, q), m) in &self.differentials {
            let rk = rank(m);
            if rk == 0 {
                continue;
            }
            *dims.get_mut(&(p, q)).expect("source cell") -= rk;
            if let Some(t) = self.target(p, q) {
                *dims.get_mut(&t).expect("target cell") -= rk;
            }
        }
        dims
    }

    pub fn summary(&self) -> PageSummary {
        PageSummary {
            r: self.r,
            dims: self.cells.iter().map(|((p, q), c)| (format!("{p},{q}"), c.dim())).collect(),
            nonzero_differentials: self
                .differentials
                .iter()
                .filter(|(_, m)| !m.is_zero())
                .map(|((p, q), _)| format!("{p},{q}"))
                .collect(),
        }
    }
}

/// `E_r` computed from the `Z_r / B_r` definition.
pub fn spectral_page(fc: &FilteredComplex, r: usize) -> SpectralPage {
    let ri = r as isize;
    let mut cells = BTreeMap::new();
    for k in 0..=fc.top_degree() {
        for p in 0..=k {
            let z = fc.z(ri, p as isize, k);
            let b = fc.b(ri, p as isize, k);
            let sq = subquotient(fc.complex.dim(k), &z, &b).expect("B_r lies in Z_r");
            cells.insert((p, k - p), sq);
        }
    }
    let mut differentials = BTreeMap::new();
    for (&(p, q), src) in &cells {
        let k = p + q;
        let rows = match (q + 1).checked_sub(r).and_then(|q2| cells.get(&(p + r, q2))) {
            Some(tgt) => tgt.dim(),
            None => 0,
        };
        let mut m = MatrixQ::zeros(rows, src.dim());
        if rows > 0 && k < fc.top_degree() {
            let tgt = &cells[&(p + r, q + 1 - r)];
            let d = fc.complex.diff(k);
            for (j, rep) in src.representative_basis.iter().enumerate() {
                let coords = tgt.class_of(&d.mul_vec(rep)).expect("d_T maps Z_r into Z_r");
                for (i, c) in coords.into_iter().enumerate() {
                    m.set(i, j, c);
                }
            }
        }
        differentials.insert((p, q), m);
    }
    SpectralPage { r, cells, differentials }
}

/// Whether `d_r` is well defined: boundaries of the source map to
/// boundaries of the target.
pub fn differential_well_defined(fc: &FilteredComplex, page: &SpectralPage) -> bool {
    page.cells.iter().all(|(&(p, q), src)| {
        let k = p + q;
        let Some(t) = page.target(p, q) else { return true };
        let Some(tgt) = page.cells.get(&t) else { return true };
        if k >= fc.top_degree() {
            return true;
        }
        let d = fc.complex.diff(k);
        src.boundary_basis.iter().all(|b| tgt.is_boundary(&d.mul_vec(b)))
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConvergenceReport {
    /// Pages `E_0, ..., E_n`; `E_n` has every later differential zero.
    pub pages_computed: usize,
    /// First `r` from which every differential vanishes.
    pub stable_from: usize,
    pub e_infinity_totals: Vec<usize>,
    pub cohomology_totals: Vec<usize>,
    /// Homology of each page matched the next page cellwise.
    pub pages_consistent: bool,
    pub converges: bool,
}

/// All pages up to the point where the bounded filtration forces every
/// later differential to vanish.
pub fn spectral_sequence(fc: &FilteredComplex) -> Vec<SpectralPage> {
    let last = fc.length() + 1;
    (0..=last.max(1)).map(|r| spectral_page(fc, r)).collect()
}

pub fn convergence_check(fc: &FilteredComplex) -> ConvergenceReport {
    let pages = spectral_sequence(fc);
    let pages_consistent = pages.windows(2).all(|w| {
        let h = w[0].homology_dims();
        w[1].cells.iter().all(|(k, c)| h.get(k).copied().unwrap_or(0) == c.dim())
    });
    let stable_from = pages.iter().rposition(|p| !p.all_differentials_zero()).map(|i| i + 1).unwrap_or(0);
    let last = pages.last().expect("at least one page");
    let e_infinity_totals = last.totals();
    let cohomology_totals = fc.complex.betti();
    let converges = pages_consistent
        && (0..cohomology_totals.len().max(e_infinity_totals.len()))
            .all(|k| e_infinity_totals.get(k).copied().unwrap_or(0) == cohomology_totals.get(k).copied().unwrap_or(0));
    ConvergenceReport {
        pages_computed: pages.len(),
        stable_from,
        e_infinity_totals,
        cohomology_totals,
        pages_consistent,
        converges,
    }
}
