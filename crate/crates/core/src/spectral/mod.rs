//! The spectral sequence of an extension `0 -> L -> A -> B -> 0`: the
//! filtration of `Ω_A` by the number of `L` arguments, pages computed from
//! `Z_r / B_r`, and the splitting-dependent description of the total
//! differential used as an independent cross-check.

mod model;
mod pages;
mod split;

pub use model::{
    d0_complex, d1_evaluate, d1_map, d1_well_defined_residual, d2_evaluate, e1_check, e2_dims_from_operators,
    membership_defects, split_filtered, split_identity_defects, BlockSplitModel, CellCheck, E1Report, NerveSplitModel,
    SplitModel,
};
pub use pages::{
    convergence_check, differential_well_defined, spectral_page, spectral_sequence, ConvergenceReport, FilteredComplex,
    PageSummary, SpectralPage,
};
pub use split::{
    alpha_connection, bigraded_dim, coefficients, cup_rho, d_alpha_split, d_l, n_module, reassemble, rho_of,
    split_form, split_matrix, split_offsets, wedge_phi, Splitting,
};

use thiserror::Error;

use crate::cech::kron;
use crate::extension::ExtensionStructure;
use crate::linalg::{rank, span_basis, subquotient, unit_vec, MatrixQ, Vector};
use crate::lr::{ce_differential, subsets, Cochain, Connection, FormSpace};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpectralError {
    #[error("map is not a section of the projection")]
    NotASection,
    #[error("representative is not a D0-cocycle")]
    NotACocycle,
    #[error("representative does not lie in Z_2")]
    NotInZ2,
}

pub(crate) fn kron_identity(n: usize, a: &MatrixQ) -> MatrixQ {
    kron(&MatrixQ::identity(n), a)
}

/// Sign of `d_L` in the decomposition of `s(d_A ξ)^{m,*}`.
pub fn d_l_sign(m: usize) -> i64 {
    if m % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Sign of `ρ_s ⌣` in the decomposition of `s(d_A ξ)^{m,*}`.
pub fn rho_sign(m: usize) -> i64 {
    if m % 2 == 0 {
        -1
    } else {
        1
    }
}

/// Basis of `F^p Ω^q_A`: forms vanishing whenever `q - p + 1` arguments lie
/// in `L`. In the `B ⊕ L` layout these are the coordinates on generator
/// tuples with at most `q - p` generators of `L`.
pub fn filtration_subspace(e: &ExtensionStructure, p: usize, q: usize) -> Vec<Vector> {
    let d = e.b.base_dim();
    let sp = FormSpace::new(e.total.rank, q, d);
    let n = sp.dim();
    if p > q + 1 {
        return Vec::new();
    }
    let nb = e.b.rank;
    let mut out = Vec::new();
    for t in subsets(e.total.rank, q) {
        let l_count = t.iter().filter(|&&g| g >= nb).count();
        if l_count + p <= q {
            let off = sp.offset(&t);
            out.extend((0..d).map(|c| unit_vec(n, off + c)));
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct GradedIso {
    /// `gr_p Ω^{p+q}_A -> Ω^p_B ⊗ Ω^q_L`, in representative coordinates.
    pub matrix: MatrixQ,
    pub well_defined: bool,
    pub bijective: bool,
    pub independent_of_preimages: bool,
}

/// `j(ω)(b_1..b_p; l_1..l_q) = ω(b̄_1, .., b̄_p, l_1, .., l_q)`.
pub fn graded_iso(e: &ExtensionStructure, p: usize, q: usize) -> GradedIso {
    let k = p + q;
    let n = FormSpace::new(e.total.rank, k, e.b.base_dim()).dim();
    let fp = filtration_subspace(e, p, k);
    let fp1 = filtration_subspace(e, p + 1, k);
    let gr = subquotient(n, &fp, &fp1).expect("filtration is decreasing");
    let comp = |s: &Splitting, v: &Vector| -> Vector {
        let xi = Cochain::from_values(e.total.rank, k, e.b.base_dim(), v.clone());
        split_form(e, s, &xi).swap_remove(p).values
    };
    let s0 = Splitting::canonical(e);
    let cols: Vec<Vector> = gr.representative_basis.iter().map(|v| comp(&s0, v)).collect();
    let rows = bigraded_dim(e, p, q);
    let matrix = MatrixQ::from_columns(rows, &cols);
    let well_defined = fp1.iter().all(|v| crate::linalg::is_zero_vec(&comp(&s0, v)));
    let bijective = matrix.rows() == matrix.cols() && rank(&matrix) == matrix.cols();
    let s1 = Splitting { sigma: perturbation(e) };
    let independent_of_preimages = fp.iter().all(|v| comp(&s0, v) == comp(&s1, v));
    GradedIso { matrix, well_defined, bijective, independent_of_preimages }
}

/// A fixed nonzero `L`-valued 1-form on `B` (when `L` is nonzero).
pub fn perturbation(e: &ExtensionStructure) -> Cochain {
    let mut phi = Cochain::zero(e.b.rank, 1, e.l.dim());
    if e.l.rank > 0 {
        for g in 0..e.b.rank {
            phi.set_on_generators(&[g], &e.l.generator(g % e.l.rank));
        }
    }
    phi
}

/// `d_A` on `Ω^k_A(R)` with the anchor action.
pub fn d_a(e: &ExtensionStructure, k: usize) -> MatrixQ {
    ce_differential(&e.total, &Connection::anchor_action(&e.total), &coefficients(e), k).expect("shapes agree")
}

/// Residuals, one per `m`, of
/// `s(d_A ξ)^{m,r} = ±d_L s(ξ)^{m,r-1} + d_{α_s} s(ξ)^{m-1,r} ± ρ_s ⌣ s(ξ)^{m-2,r+1}`.
pub fn decompose_differential(e: &ExtensionStructure, s: &Splitting, xi: &Cochain) -> Vec<Cochain> {
    let k = xi.degree;
    let dxi = Cochain::from_values(e.total.rank, k + 1, e.b.base_dim(), d_a(e, k).mul_vec(&xi.values));
    let lhs = split_form(e, s, &dxi);
    let parts = split_form(e, s, xi);
    let rho = rho_of(e, s);
    (0..=k + 1)
        .map(|m| {
            let r = k + 1 - m;
            let mut v = lhs[m].values.clone();
            let mut sub = |mat: MatrixQ, src: &Cochain, sign: i64| {
                let w = mat.mul_vec(&src.values);
                crate::linalg::add_scaled(&mut v, &crate::linalg::q(-sign), &w);
            };
            if r >= 1 && m <= k {
                sub(d_l(e, m, r - 1), &parts[m], d_l_sign(m));
            }
            if m >= 1 {
                sub(d_alpha_split(e, s, m - 1, r), &parts[m - 1], 1);
            }
            if m >= 2 {
                sub(cup_rho(e, &rho, m - 2, r + 1), &parts[m - 2], rho_sign(m));
            }
            Cochain::from_values(e.b.rank, m, lhs[m].fiber_dim, v)
        })
        .collect()
}

/// Residuals, one per `m`, of `s'(ξ)^{m,k-m} = Σ_a ∧^a φ ⌣ s(ξ)^{m-a,k-m+a}`
/// with `s' = s + φ`.
pub fn splitting_change(e: &ExtensionStructure, s: &Splitting, phi: &Cochain, xi: &Cochain) -> Vec<Cochain> {
    let k = xi.degree;
    let lhs = split_form(e, &s.shifted(phi), xi);
    let parts = split_form(e, s, xi);
    (0..=k)
        .map(|m| {
            let mut v = lhs[m].values.clone();
            for a in 0..=m {
                let w = wedge_phi(e, phi, a, m - a, k - m + a).mul_vec(&parts[m - a].values);
                crate::linalg::add_scaled(&mut v, &crate::linalg::q(-1), &w);
            }
            Cochain::from_values(e.b.rank, m, lhs[m].fiber_dim, v)
        })
        .collect()
}

/// The extension as a filtered complex on a single vertex.
pub fn filtered_de_rham(e: &ExtensionStructure) -> FilteredComplex {
    let top = e.total.rank;
    let complex = crate::lr::ce_complex(&e.total, &Connection::anchor_action(&e.total), &coefficients(e))
        .expect("anchor action is flat");
    let filtration = (0..=top)
        .map(|k| (0..=k + 1).map(|p| span_basis(&filtration_subspace(e, p, k), complex.dim(k))).collect())
        .collect();
    FilteredComplex { complex, filtration }
}
