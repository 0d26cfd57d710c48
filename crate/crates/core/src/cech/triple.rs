use std::collections::BTreeMap;

use super::{kron, CechError, DoubleComplex, Nerve, TotalComplex};
use crate::extension::{change_lifting_pair, half, obstruction_cochain, solve_rho, Coupling, LiftingPair};
use crate::linalg::{is_zero_vec, q, solve_linear, unit_vec, zero_vec, MatrixQ, Subquotient, Vector};
use crate::lr::{ce_differential, graded_bracket, Cochain, Connection};

/// Center-valued forms indexed by simplices of the nerve.
pub type SimplexForms = BTreeMap<Vec<usize>, Cochain>;

/// Local couplings on the vertices of a nerve, all between the same `B` and
/// `L`, which agree modulo inner derivations on every edge.
#[derive(Debug, Clone)]
pub struct NerveCoupling {
    pub nerve: Nerve,
    pub local: Vec<Coupling>,
}

impl NerveCoupling {
    pub fn new(nerve: Nerve, local: Vec<Coupling>) -> Result<Self, CechError> {
        assert_eq!(local.len(), nerve.vertex_count, "one coupling per vertex");
        for c in &local[1..] {
            if c.b != local[0].b || c.l != local[0].l {
                return Err(crate::extension::ExtensionError::CouplingMismatch.into());
            }
        }
        for e in nerve.simplices(1) {
            let (i, j) = (e[0], e[1]);
            let ci = &local[i];
            if ci.solve_ad_difference(&local[j].outer_connection(), &ci.outer_connection()).is_none() {
                return Err(CechError::IncompatibleCouplings(i, j));
            }
        }
        Ok(NerveCoupling { nerve, local })
    }

    /// The same coupling on every vertex.
    pub fn constant(nerve: Nerve, c: Coupling) -> Self {
        let local = vec![c; nerve.vertex_count];
        NerveCoupling { nerve, local }
    }

    pub fn base_rank(&self) -> usize {
        self.local[0].b.rank
    }

    pub fn center_dim(&self) -> usize {
        self.local[0].subobjects.center.dim()
    }

    fn center_connection(&self) -> Connection {
        self.local[0].center_connection(&self.local[0].outer_connection())
    }

    /// `K^q_p = Č^p(Ω^q_B(Z(L)))` with `d = d_ᾱ` and the Čech coboundary.
    pub fn double_complex(&self) -> DoubleComplex {
        let c = &self.local[0];
        let zc = self.center_connection();
        let rank = self.base_rank();
        let cols = self.nerve.dim() + 1;
        let local_d: Vec<MatrixQ> =
            (0..=rank).map(|k| ce_differential(&c.b, &zc, c.center_module(), k).expect("shapes agree")).collect();
        let fdim: Vec<usize> = local_d.iter().map(MatrixQ::cols).collect();
        let dims = (0..=rank).map(|k| (0..cols).map(|p| self.nerve.count(p) * fdim[k]).collect()).collect();
        let delta = (0..=rank)
            .map(|k| {
                (0..cols.saturating_sub(1))
                    .map(|p| kron(&self.nerve.coboundary(p), &MatrixQ::identity(fdim[k])))
                    .collect()
            })
            .collect();
        let d = (0..rank)
            .map(|k| (0..cols).map(|p| kron(&MatrixQ::identity(self.nerve.count(p)), &local_d[k])).collect())
            .collect();
        DoubleComplex { dims, delta, d }
    }

    /// The total complex of `τ^{≥1}`.
    pub fn truncated_total(&self) -> TotalComplex {
        self.double_complex().total(1)
    }

    /// Concatenates center-valued `deg`-forms on the `p`-simplices.
    pub(crate) fn pack(&self, p: usize, deg: usize, forms: &SimplexForms) -> Vector {
        let fdim = crate::lr::FormSpace::new(self.base_rank(), deg, self.center_dim()).dim();
        let mut out = Vec::with_capacity(self.nerve.count(p) * fdim);
        for s in self.nerve.simplices(p) {
            match forms.get(s) {
                Some(c) => out.extend(c.values.iter().cloned()),
                None => out.extend(zero_vec(fdim)),
            }
        }
        out
    }

    pub(crate) fn unpack(&self, p: usize, deg: usize, v: &[crate::linalg::Rational]) -> SimplexForms {
        let fdim = crate::lr::FormSpace::new(self.base_rank(), deg, self.center_dim()).dim();
        self.nerve
            .simplices(p)
            .iter()
            .enumerate()
            .map(|(k, s)| {
                let vals = if v.is_empty() { zero_vec(fdim) } else { v[k * fdim..(k + 1) * fdim].to_vec() };
                (s.clone(), Cochain::from_values(self.base_rank(), deg, self.center_dim(), vals))
            })
            .collect()
    }

    /// A vector in `T^k` of `τ^{≥1}` from forms placed on `(p, q = k - p)`.
    pub(crate) fn assemble(&self, t: &TotalComplex, k: usize, parts: &[(usize, &SimplexForms)]) -> Vector {
        let parts: Vec<(usize, Vector)> = parts
            .iter()
            .filter(|(p, _)| t.block(k, *p).is_some())
            .map(|(p, f)| (*p, self.pack(*p, k - p, f)))
            .collect();
        t.assemble(k, &parts)
    }
}

/// Local lifting pairs on vertices and transition 1-forms `φ_ij = s_j - s_i`
/// on edges, with `α_j - α_i = ad_{φ_ij}`.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftingTriple {
    pub pairs: Vec<LiftingPair>,
    /// `L`-valued 1-forms keyed by edges `[i, j]`, `i < j`.
    pub phi: SimplexForms,
}

pub fn build_lifting_triple(nc: &NerveCoupling) -> Result<LiftingTriple, CechError> {
    let pairs = nc
        .local
        .iter()
        .map(|c| {
            let alpha = c.outer_connection();
            let rho = solve_rho(c, &alpha)?;
            Ok(LiftingPair { alpha, rho })
        })
        .collect::<Result<Vec<_>, crate::extension::ExtensionError>>()?;
    let mut phi = BTreeMap::new();
    for e in nc.nerve.simplices(1) {
        let (i, j) = (e[0], e[1]);
        let f =
            nc.local[i].solve_ad_difference(&pairs[j].alpha, &pairs[i].alpha).ok_or(CechError::NoPhiSolution(i, j))?;
        phi.insert(e.clone(), f);
    }
    Ok(LiftingTriple { pairs, phi })
}

impl LiftingTriple {
    /// Changes the local sections by `η_i`, adds central 2-forms `z_i` to `ρ_i`
    /// and central 1-forms `m_ij` to the transitions.
    pub fn perturb(&self, nc: &NerveCoupling, eta: &[Cochain], z: &SimplexForms, m: &SimplexForms) -> LiftingTriple {
        let pairs = self
            .pairs
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let c = &nc.local[i];
                let mut p = change_lifting_pair(c, p, &eta[i]);
                if let Some(zi) = z.get(&vec![i]) {
                    p.rho = p.rho.add(&c.embed_center(zi));
                }
                p
            })
            .collect();
        let phi = self
            .phi
            .iter()
            .map(|(e, f)| {
                let c = &nc.local[e[0]];
                let mut f = f.add(&eta[e[1]]).add(&eta[e[0]].scale(&q(-1)));
                if let Some(me) = m.get(e) {
                    f = f.add(&c.embed_center(me));
                }
                (e.clone(), f)
            })
            .collect();
        LiftingTriple { pairs, phi }
    }

    /// Failed conditions, one message each.
    pub fn check(&self, nc: &NerveCoupling) -> Vec<String> {
        let mut out = Vec::new();
        for (i, p) in self.pairs.iter().enumerate() {
            for msg in nc.local[i].check_pair(p) {
                out.push(format!("vertex {i}: {msg}"));
            }
        }
        for (e, f) in &self.phi {
            let shifted = crate::lr::shift_connection(&nc.local[e[0]].l, &self.pairs[e[0]].alpha, f);
            if shifted != self.pairs[e[1]].alpha {
                out.push(format!("edge {e:?}: alpha_j - alpha_i is not ad(phi_ij)"));
            }
        }
        out
    }
}

/// `λ_i = d_{α_i} ρ_i`,
/// `t_ij = ρ_j - ρ_i - d_{α_i} φ_ij - ½[φ_ij, φ_ij]`,
/// `q_ijk = -(φ_jk - φ_ik + φ_ij)`, all in center coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct ObstructionTriple {
    pub lambda: SimplexForms,
    pub t: SimplexForms,
    pub q: SimplexForms,
}

pub fn obstruction_triple(nc: &NerveCoupling, lt: &LiftingTriple) -> Result<ObstructionTriple, CechError> {
    let mut lambda = BTreeMap::new();
    for (i, p) in lt.pairs.iter().enumerate() {
        lambda.insert(vec![i], obstruction_cochain(&nc.local[i], p)?);
    }
    let mut t = BTreeMap::new();
    for (e, f) in &lt.phi {
        let c = &nc.local[e[0]];
        let (pi, pj) = (&lt.pairs[e[0]], &lt.pairs[e[1]]);
        let v = pj
            .rho
            .add(&pi.rho.scale(&q(-1)))
            .add(&c.d_alpha(&pi.alpha, f).scale(&q(-1)))
            .add(&graded_bracket(&c.l, f, f).scale(&-half()));
        t.insert(e.clone(), c.to_center(&v)?);
    }
    let mut qq = BTreeMap::new();
    for s in nc.nerve.simplices(2) {
        let (i, j, k) = (s[0], s[1], s[2]);
        let v = lt.phi[&vec![j, k]].add(&lt.phi[&vec![i, k]].scale(&q(-1))).add(&lt.phi[&vec![i, j]]).scale(&q(-1));
        qq.insert(s.clone(), nc.local[i].to_center(&v)?);
    }
    Ok(ObstructionTriple { lambda, t, q: qq })
}

impl ObstructionTriple {
    /// The element `(λ, t, q)` of `T^3 = K^3_0 ⊕ K^2_1 ⊕ K^1_2`.
    pub fn to_total(&self, nc: &NerveCoupling, tc: &TotalComplex) -> Vector {
        nc.assemble(tc, 3, &[(0, &self.lambda), (1, &self.t), (2, &self.q)])
    }
}

/// Simplices where each component of `d_T(λ, t, q)` fails to vanish:
/// `d λ`, `d t - δλ`, `d q - δt` and `δq`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CocycleReport {
    pub residuals: [Vec<Vec<usize>>; 4],
}

impl CocycleReport {
    pub fn is_cocycle(&self) -> bool {
        self.residuals.iter().all(Vec::is_empty)
    }
}

pub fn verify_cocycle(nc: &NerveCoupling, ot: &ObstructionTriple) -> CocycleReport {
    let tc = nc.truncated_total();
    let x = ot.to_total(nc, &tc);
    let dx = tc.complex.diff(3).mul_vec(&x);
    let mut report = CocycleReport::default();
    for p in 0..4 {
        let Some(b) = tc.block(4, p) else { continue };
        let forms = nc.unpack(p, 4 - p, &tc.extract(4, &dx, p));
        debug_assert_eq!(forms.values().map(|c| c.values.len()).sum::<usize>(), b.dim);
        report.residuals[p] = forms.into_iter().filter(|(_, c)| !c.is_zero()).map(|(s, _)| s).collect();
    }
    report
}

#[derive(Debug, Clone)]
pub struct GlobalObstruction {
    pub lifting: LiftingTriple,
    pub triple: ObstructionTriple,
    /// `H^3` of the total complex of `τ^{≥1}`.
    pub h3: Subquotient,
    pub coords: Vector,
    /// A solution of `λ = d a`, `t = δa + d m`, `q = δm` when the class vanishes.
    pub trivialization: Option<super::Trivialization>,
    /// Whether a perturbed lifting triple gave the same class.
    pub independent_of_triple: bool,
}

impl GlobalObstruction {
    pub fn is_zero(&self) -> bool {
        is_zero_vec(&self.coords)
    }
}

pub fn global_obstruction_class(nc: &NerveCoupling) -> Result<GlobalObstruction, CechError> {
    let lifting = build_lifting_triple(nc)?;
    let triple = obstruction_triple(nc, &lifting)?;
    let tc = nc.truncated_total();
    let h3 = tc.complex.cohomology(3);
    let x = triple.to_total(nc, &tc);
    let coords = h3.class_of(&x).ok_or(CechError::NotClosed)?;
    let trivialization = if is_zero_vec(&coords) {
        solve_linear(&tc.complex.diff(2), &x).map(|y| super::Trivialization {
            a: nc.unpack(0, 2, &tc.extract(2, &y, 0)),
            m: nc.unpack(1, 1, &tc.extract(2, &y, 1)),
        })
    } else {
        None
    };
    let perturbed = default_perturbation(nc, &lifting);
    let x2 = obstruction_triple(nc, &perturbed)?.to_total(nc, &tc);
    let independent_of_triple = h3.class_of(&x2).as_ref() == Some(&coords);
    Ok(GlobalObstruction { lifting, triple, h3, coords, trivialization, independent_of_triple })
}

fn default_perturbation(nc: &NerveCoupling, lt: &LiftingTriple) -> LiftingTriple {
    let rank = nc.base_rank();
    let nl = nc.local[0].l.dim();
    let zdim = nc.center_dim();
    let eta: Vec<Cochain> = (0..nc.nerve.vertex_count)
        .map(|i| {
            let mut e = Cochain::zero(rank, 1, nl);
            for g in 0..rank {
                if nl > 0 {
                    e.set_on_generators(&[g], &unit_vec(nl, (g + i + 1) % nl));
                }
            }
            e
        })
        .collect();
    let mut z = BTreeMap::new();
    let mut m = BTreeMap::new();
    if zdim > 0 {
        for (i, s) in nc.nerve.simplices(0).iter().enumerate() {
            let mut c = Cochain::zero(rank, 2, zdim);
            let len = c.values.len().max(1);
            if let Some(v) = c.values.get_mut(i % len) {
                *v = q(1);
            }
            z.insert(s.clone(), c);
        }
        for s in nc.nerve.simplices(1) {
            let mut c = Cochain::zero(rank, 1, zdim);
            if let Some(v) = c.values.first_mut() {
                *v = q(2);
            }
            m.insert(s.clone(), c);
        }
    }
    lt.perturb(nc, &eta, &z, &m)
}
