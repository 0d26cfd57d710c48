use std::collections::BTreeMap;

use num_traits::Zero;

use super::{half, Coupling, ExtensionError, LiftingPair};
use crate::linalg::{add_scaled, is_zero_vec, q, solve_linear, unit_vec, zero_vec, MatrixQ, Subquotient, Vector};
use crate::lr::{
    ce_differential, cohomology, graded_bracket, subsets, Cochain, Connection, FailureKind, FirstOrderOp, LieRinehart,
};

/// An extension `0 -> L -> A -> B -> 0` with `A` free on the generators of
/// `B` followed by the generators of `L`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtensionStructure {
    pub b: LieRinehart,
    pub l: LieRinehart,
    pub total: LieRinehart,
}

/// The bracket on `B ⊕ L` fails Jacobi; `triple` lists generators of `B`
/// on which the obstruction cochain is nonzero.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiFailure {
    pub lambda: Cochain,
    pub triple: [usize; 3],
    /// Cyclic sum `[x,[y,z]] + [y,[z,x]] + [z,[x,y]]` on that triple.
    pub jacobiator: Vector,
}

impl ExtensionStructure {
    fn d(&self) -> usize {
        self.b.base_dim()
    }

    pub fn b_block(&self) -> usize {
        self.b.dim()
    }

    /// Inclusion of `L` into the total space.
    pub fn injection(&self) -> MatrixQ {
        let mut m = MatrixQ::zeros(self.total.dim(), self.l.dim());
        for k in 0..self.l.dim() {
            m.set(self.b_block() + k, k, q(1));
        }
        m
    }

    pub fn projection(&self) -> MatrixQ {
        let mut m = MatrixQ::zeros(self.b.dim(), self.total.dim());
        for k in 0..self.b.dim() {
            m.set(k, k, q(1));
        }
        m
    }

    /// The section sending each generator of `B` to the matching generator of `A`.
    pub fn canonical_section(&self) -> Vec<Vector> {
        (0..self.b.rank).map(|i| self.total.generator(i)).collect()
    }

    /// Failed extension axioms, one message each.
    pub fn validate(&self) -> Vec<String> {
        let mut out: Vec<String> =
            self.total.validate().failures.iter().map(|f| format!("{:?} fails on {:?}", f.kind, f.indices)).collect();
        let inj = self.injection();
        let proj = self.projection();
        let nl = self.l.dim();
        for x in 0..nl {
            for y in 0..nl {
                let got = self.total.bracket_of(&inj.column(x), &inj.column(y));
                if got != inj.mul_vec(&self.l.bracket[x][y]) {
                    out.push(format!("bracket of L not preserved on ({x},{y})"));
                }
            }
        }
        let n = self.total.dim();
        for x in 0..n {
            let ex = unit_vec(n, x);
            for y in 0..n {
                let ey = unit_vec(n, y);
                let lhs = proj.mul_vec(&self.total.bracket_of(&ex, &ey));
                let rhs = self.b.bracket_of(&proj.mul_vec(&ex), &proj.mul_vec(&ey));
                if lhs != rhs {
                    out.push(format!("projection not a bracket map on ({x},{y})"));
                }
            }
            if self.total.anchor[x] != self.b.anchor_of(&proj.mul_vec(&ex)) {
                out.push(format!("anchor does not factor through B at {x}"));
            }
        }
        out
    }

    /// The coupling induced by the canonical section.
    pub fn coupling(&self) -> Result<Coupling, ExtensionError> {
        let p = splitting_to_pair(self, &self.canonical_section())?;
        Coupling::new(self.b.clone(), self.l.clone(), p.alpha.ops)
    }

    fn l_part(&self, v: &[crate::linalg::Rational]) -> Option<Vector> {
        let nb = self.b_block();
        is_zero_vec(&v[..nb]).then(|| v[nb..].to_vec())
    }
}

/// The bracket `[(b,l),(b',l')] = ([b,b'], [l,l'] + α(b)l' - α(b')l + ρ(b,b'))`
/// on `B ⊕ L`, or the Jacobi failure when `λ = d_α ρ` is nonzero.
pub fn build_extension(c: &Coupling, pair: &LiftingPair) -> Result<ExtensionStructure, JacobiFailure> {
    let (b, l) = (&c.b, &c.l);
    let (nb, nl, d) = (b.rank, l.rank, b.base_dim());
    let len = (nb + nl) * d;
    let place = |bpart: Option<&Vector>, lpart: Option<&Vector>| -> Vector {
        let mut v = zero_vec(len);
        if let Some(x) = bpart {
            v[..nb * d].clone_from_slice(x);
        }
        if let Some(x) = lpart {
            v[nb * d..].clone_from_slice(x);
        }
        v
    };
    let mut brackets = BTreeMap::new();
    for i in 0..nb {
        for j in i + 1..nb {
            let rho = pair.rho.on_generators(&[i, j]);
            brackets.insert((i, j), place(Some(&b.generator_bracket(i, j)), Some(&rho)));
        }
        for k in 0..nl {
            let v = pair.alpha.ops[i].matrix.mul_vec(&l.generator(k));
            brackets.insert((i, nb + k), place(None, Some(&v)));
        }
    }
    for k in 0..nl {
        for m in k + 1..nl {
            brackets.insert((nb + k, nb + m), place(None, Some(&l.generator_bracket(k, m))));
        }
    }
    let mut anchors: Vec<_> = (0..nb).map(|i| b.anchor_of(&b.generator(i))).collect();
    anchors.extend((0..nl).map(|_| crate::lr::Derivation::zero(d)));
    let total = LieRinehart::from_basis_brackets(&b.base, nb + nl, &brackets, &anchors);

    let report = total.validate();
    if report.of_kind(FailureKind::Jacobi).next().is_none() {
        return Ok(ExtensionStructure { b: b.clone(), l: l.clone(), total });
    }
    let lambda = c.d_alpha(&pair.alpha, &pair.rho);
    let triple = subsets(nb, 3)
        .into_iter()
        .find(|t| !is_zero_vec(&lambda.on_generators(t)))
        .map(|t| [t[0], t[1], t[2]])
        .unwrap_or([0, 0, 0]);
    let g = |i: usize| total.generator(i);
    let jac = |x: usize, y: usize, z: usize| total.bracket_of(&g(x), &total.bracket_of(&g(y), &g(z)));
    let [x, y, z] = triple;
    let mut jacobiator = jac(x, y, z);
    add_scaled(&mut jacobiator, &q(1), &jac(y, z, x));
    add_scaled(&mut jacobiator, &q(1), &jac(z, x, y));
    Err(JacobiFailure { lambda, triple, jacobiator })
}

/// `α_s(b) l = [s(b), l]` and `ρ_s(b1,b2) = [s b1, s b2] - s([b1,b2])`.
///
/// `s` gives the images of the generators of `B`; it is extended `R`-linearly.
pub fn splitting_to_pair(e: &ExtensionStructure, s: &[Vector]) -> Result<LiftingPair, ExtensionError> {
    let (nb, d) = (e.b.rank, e.d());
    let proj = e.projection();
    if s.len() != nb || s.iter().enumerate().any(|(i, v)| proj.mul_vec(v) != e.b.generator(i)) {
        return Err(ExtensionError::NotASection);
    }
    let inj = e.injection();
    let tm = e.total.module();
    let extend = |x: &[crate::linalg::Rational]| -> Vector {
        let mut out = zero_vec(e.total.dim());
        for (k, xk) in x.iter().enumerate() {
            if !xk.is_zero() {
                add_scaled(&mut out, xk, &tm.action[k % d].mul_vec(&s[k / d]));
            }
        }
        out
    };
    let ops = (0..nb)
        .map(|i| {
            let cols: Vec<Vector> = (0..e.l.dim())
                .map(|k| {
                    let v = e.total.bracket_of(&s[i], &inj.column(k));
                    e.l_part(&v).expect("L is an ideal")
                })
                .collect();
            FirstOrderOp { matrix: MatrixQ::from_columns(e.l.dim(), &cols), symbol: e.b.anchor_of(&e.b.generator(i)) }
        })
        .collect();
    let mut rho = Cochain::zero(nb, 2, e.l.dim());
    for t in subsets(nb, 2) {
        let mut v = e.total.bracket_of(&s[t[0]], &s[t[1]]);
        add_scaled(&mut v, &q(-1), &extend(&e.b.generator_bracket(t[0], t[1])));
        rho.set_on_generators(&t, &e.l_part(&v).expect("projection is a bracket map"));
    }
    Ok(LiftingPair { alpha: Connection { ops }, rho })
}

/// Data showing two extensions equivalent: `α' - α = ad_{η0}` and
/// `ρ' - ρ - d_α η0 - ½[η0, η0] = d_ᾱ β`; then `η = η0 + β` gives the
/// isomorphism `(b, l) ↦ (b, l + η(b))` from `E'` to `E`.
#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceWitness {
    pub eta0: Cochain,
    /// Center-valued 1-form.
    pub beta: Cochain,
    pub eta: Cochain,
}

impl EquivalenceWitness {
    /// Matrix of `(b, l) ↦ (b, l + η(b))` on the total space.
    pub fn isomorphism(&self, e: &ExtensionStructure) -> MatrixQ {
        shear_map(e, &self.eta)
    }
}

/// Matrix of `(b, l) ↦ (b, l + η(b))` for an `L`-valued 1-form `η`.
pub fn shear_map(e: &ExtensionStructure, eta: &Cochain) -> MatrixQ {
    let n = e.total.dim();
    let d = e.d();
    let lm = e.l.module();
    let nb = e.b_block();
    let mut m = MatrixQ::identity(n);
    for k in 0..nb {
        let v = lm.action[k % d].mul_vec(&eta.on_generators(&[k / d]));
        for (j, x) in v.iter().enumerate() {
            m.add_at(nb + j, k, x);
        }
    }
    m
}

/// Whether `f` is a bracket morphism from `src` to `tgt`.
pub fn is_bracket_morphism(f: &MatrixQ, src: &LieRinehart, tgt: &LieRinehart) -> bool {
    let n = src.dim();
    (0..n).all(|x| {
        (0..n).all(|y| {
            let (ex, ey) = (unit_vec(n, x), unit_vec(n, y));
            f.mul_vec(&src.bracket_of(&ex, &ey)) == tgt.bracket_of(&f.mul_vec(&ex), &f.mul_vec(&ey))
        })
    })
}

fn pairs_for(
    c: &Coupling,
    e: &ExtensionStructure,
    e2: &ExtensionStructure,
) -> Result<(LiftingPair, LiftingPair), ExtensionError> {
    let p = splitting_to_pair(e, &e.canonical_section())?;
    let p2 = splitting_to_pair(e2, &e2.canonical_section())?;
    if !c.check_pair(&p).is_empty() || !c.check_pair(&p2).is_empty() {
        return Err(ExtensionError::CouplingMismatch);
    }
    Ok((p, p2))
}

/// `γ0 = ρ' - ρ - d_α η0 - ½[η0, η0]` in center coordinates.
fn gamma0(c: &Coupling, p: &LiftingPair, p2: &LiftingPair) -> Result<(Cochain, Cochain), ExtensionError> {
    let eta0 = c.solve_ad_difference(&p2.alpha, &p.alpha).ok_or(ExtensionError::CouplingMismatch)?;
    let g = p2
        .rho
        .add(&p.rho.scale(&q(-1)))
        .add(&c.d_alpha(&p.alpha, &eta0).scale(&q(-1)))
        .add(&graded_bracket(&c.l, &eta0, &eta0).scale(&-half()));
    let gz = c.to_center(&g).map_err(|_| ExtensionError::CouplingMismatch)?;
    Ok((eta0, gz))
}

/// Decides equivalence by linear algebra. Writing `η = η0 + ζ` with `ζ`
/// central, `[η, η] = [η0, η0]`, so the condition is that `γ0` is a
/// coboundary.
pub fn extensions_equivalent(
    c: &Coupling,
    e: &ExtensionStructure,
    e2: &ExtensionStructure,
) -> Result<Option<EquivalenceWitness>, ExtensionError> {
    let (p, p2) = pairs_for(c, e, e2)?;
    let (eta0, gz) = gamma0(c, &p, &p2)?;
    let zc = c.center_connection(&p.alpha);
    let d1 = ce_differential(&c.b, &zc, c.center_module(), 1)?;
    let Some(beta) = solve_linear(&d1, &gz.values) else {
        return Ok(None);
    };
    let beta = Cochain::from_values(c.b.rank, 1, c.center_module().dim, beta);
    let eta = eta0.add(&c.embed_center(&beta));
    Ok(Some(EquivalenceWitness { eta0, beta, eta }))
}

#[derive(Debug, Clone)]
pub struct DifferenceClass {
    /// Center-valued closed 2-form.
    pub gamma: Cochain,
    pub h2: Subquotient,
    pub coords: Vector,
}

pub fn difference_class(
    c: &Coupling,
    e: &ExtensionStructure,
    e2: &ExtensionStructure,
) -> Result<DifferenceClass, ExtensionError> {
    let (p, p2) = pairs_for(c, e, e2)?;
    let (_, gamma) = gamma0(c, &p, &p2)?;
    let zc = c.center_connection(&p.alpha);
    let h2 = cohomology(&c.b, &zc, c.center_module(), 2)?;
    let coords = h2.class_of(&gamma.values).ok_or(ExtensionError::NotClosed)?;
    Ok(DifferenceClass { gamma, h2, coords })
}

/// The extension built from `(α_s, ρ_s + γ)` for the canonical section `s`.
pub fn torsor_action(
    c: &Coupling,
    e: &ExtensionStructure,
    gamma: &Cochain,
) -> Result<ExtensionStructure, ExtensionError> {
    let mut p = splitting_to_pair(e, &e.canonical_section())?;
    if !c.d_center(&p.alpha, gamma).is_zero() {
        return Err(ExtensionError::NotClosed);
    }
    p.rho = p.rho.add(&c.embed_center(gamma));
    Ok(build_extension(c, &p).expect("adding a closed central form keeps the obstruction zero"))
}
