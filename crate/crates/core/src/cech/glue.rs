use std::collections::BTreeMap;

use super::triple::SimplexForms;
use super::{obstruction_triple, CechError, LiftingTriple, Nerve, NerveCoupling};
use crate::extension::{build_extension, half, is_bracket_morphism, shear_map, ExtensionStructure};
use crate::linalg::{is_zero_vec, q, solve_linear, MatrixQ};
use crate::lr::{graded_bracket, Cochain};

/// Center-valued `a_i` (2-forms on vertices) and `m_ij` (1-forms on edges)
/// with `λ = d a`, `t = δa + d m`, `q = δm`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trivialization {
    pub a: SimplexForms,
    pub m: SimplexForms,
}

/// Local extensions on the vertices with gluing isomorphisms
/// `g_ij: E_j -> E_i`, `(b, l) ↦ (b, l + φ_ij(b))`.
#[derive(Debug, Clone)]
pub struct GluedExtension {
    /// The lifting triple after absorbing the trivialization.
    pub triple: LiftingTriple,
    pub local: Vec<ExtensionStructure>,
    pub gluing: BTreeMap<Vec<usize>, MatrixQ>,
    pub nerve: Nerve,
}

impl GluedExtension {
    /// Failed gluing conditions, one message each.
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (i, e) in self.local.iter().enumerate() {
            for msg in e.validate() {
                out.push(format!("vertex {i}: {msg}"));
            }
        }
        for (e, g) in &self.gluing {
            if !is_bracket_morphism(g, &self.local[e[1]].total, &self.local[e[0]].total) {
                out.push(format!("gluing on {e:?} is not a bracket morphism"));
            }
        }
        for t in self.nerve.simplices(2) {
            let (i, j, k) = (t[0], t[1], t[2]);
            if self.gluing[&vec![i, j]].mul(&self.gluing[&vec![j, k]]) != self.gluing[&vec![i, k]] {
                out.push(format!("cocycle condition fails on {t:?}"));
            }
        }
        out
    }
}

pub fn glue_extension(
    nc: &NerveCoupling,
    lt: &LiftingTriple,
    triv: &Trivialization,
) -> Result<GluedExtension, CechError> {
    let ot = obstruction_triple(nc, lt)?;
    let tc = nc.truncated_total();
    let x = ot.to_total(nc, &tc);
    let y = nc.assemble(&tc, 2, &[(0, &triv.a), (1, &triv.m)]);
    let dy = tc.complex.diff(2).mul_vec(&y);
    for p in 0..3 {
        if tc.extract(3, &x, p) != tc.extract(3, &dy, p) {
            return Err(CechError::TrivializationInvalid { equation: p + 1 });
        }
    }
    let mut triple = lt.clone();
    for (i, pair) in triple.pairs.iter_mut().enumerate() {
        if let Some(a) = triv.a.get(&vec![i]) {
            pair.rho = pair.rho.add(&nc.local[i].embed_center(a).scale(&q(-1)));
        }
    }
    for (e, f) in triple.phi.iter_mut() {
        if let Some(m) = triv.m.get(e) {
            *f = f.add(&nc.local[e[0]].embed_center(m));
        }
    }
    assemble_glued(nc, triple)
}

fn assemble_glued(nc: &NerveCoupling, triple: LiftingTriple) -> Result<GluedExtension, CechError> {
    let local = triple
        .pairs
        .iter()
        .enumerate()
        .map(|(i, p)| build_extension(&nc.local[i], p).map_err(|_| CechError::TrivializationInvalid { equation: 1 }))
        .collect::<Result<Vec<_>, _>>()?;
    let gluing = triple.phi.iter().map(|(e, f)| (e.clone(), shear_map(&local[e[1]], f))).collect();
    Ok(GluedExtension { triple, local, gluing, nerve: nc.nerve.clone() })
}

/// Acts by a `d_T`-closed `(γ, ψ) ∈ K^2_0 ⊕ K^1_1`:
/// `(α_i, ρ_i + γ_i, φ_ij - ψ_ij)`.
pub fn torsor_action_global(
    nc: &NerveCoupling,
    g: &GluedExtension,
    gamma: &SimplexForms,
    psi: &SimplexForms,
) -> Result<GluedExtension, CechError> {
    let tc = nc.truncated_total();
    let y = nc.assemble(&tc, 2, &[(0, gamma), (1, psi)]);
    if !is_zero_vec(&tc.complex.diff(2).mul_vec(&y)) {
        return Err(CechError::NotClosed);
    }
    let mut triple = g.triple.clone();
    for (i, pair) in triple.pairs.iter_mut().enumerate() {
        if let Some(c) = gamma.get(&vec![i]) {
            pair.rho = pair.rho.add(&nc.local[i].embed_center(c));
        }
    }
    for (e, f) in triple.phi.iter_mut() {
        if let Some(c) = psi.get(e) {
            *f = f.add(&nc.local[e[0]].embed_center(c).scale(&q(-1)));
        }
    }
    assemble_glued(nc, triple)
}

/// Local 1-forms `η_i` such that `(b, l) ↦ (b, l + η_i(b))` are isomorphisms
/// `E'_i -> E_i` compatible with the gluings, if they exist.
///
/// With `η_i = η0_i + ζ_i` and `ζ_i` central this is the linear system
/// `d ζ_i = γ0_i`, `ζ_j - ζ_i = φ'_ij - φ_ij - (η0_j - η0_i)`.
pub fn glued_equivalent(
    nc: &NerveCoupling,
    g: &GluedExtension,
    g2: &GluedExtension,
) -> Result<Option<Vec<Cochain>>, CechError> {
    let mut eta0 = Vec::new();
    let mut gamma0 = BTreeMap::new();
    for (i, (p, p2)) in g.triple.pairs.iter().zip(&g2.triple.pairs).enumerate() {
        let c = &nc.local[i];
        let Some(e0) = c.solve_ad_difference(&p2.alpha, &p.alpha) else {
            return Ok(None);
        };
        let v = p2
            .rho
            .add(&p.rho.scale(&q(-1)))
            .add(&c.d_alpha(&p.alpha, &e0).scale(&q(-1)))
            .add(&graded_bracket(&c.l, &e0, &e0).scale(&-half()));
        gamma0.insert(vec![i], c.to_center(&v)?);
        eta0.push(e0);
    }
    let mut eps = BTreeMap::new();
    for (e, f) in &g.triple.phi {
        let c = &nc.local[e[0]];
        let v = g2.triple.phi[e].add(&f.scale(&q(-1))).add(&eta0[e[1]].scale(&q(-1))).add(&eta0[e[0]]);
        eps.insert(e.clone(), c.to_center(&v)?.scale(&q(-1)));
    }
    let tc = nc.truncated_total();
    let rhs = nc.assemble(&tc, 2, &[(0, &gamma0), (1, &eps)]);
    let Some(zeta) = solve_linear(&tc.complex.diff(1), &rhs) else {
        return Ok(None);
    };
    let zeta = nc.unpack(0, 1, &tc.extract(1, &zeta, 0));
    Ok(Some(eta0.into_iter().enumerate().map(|(i, e0)| e0.add(&nc.local[i].embed_center(&zeta[&vec![i]]))).collect()))
}
