use num_traits::{One, Zero};

use super::algebroid::LieRinehart;
use super::base::{left_composition, right_composition, Derivation, RModule};
use super::forms::{subsets, Cochain, FormSpace};
use super::LrError;
use crate::linalg::{q, subquotient, zero_vec, CochainComplex, MatrixQ, Rational, Subquotient};

/// A first-order differential operator on a module: its rational matrix and
/// its symbol, a derivation of the base.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FirstOrderOp {
    pub matrix: MatrixQ,
    pub symbol: Derivation,
}

impl FirstOrderOp {
    /// Residual `φ∘f - f∘φ - σ(f)` for each basis element `f` of the base.
    pub fn first_order_defects(&self, m: &RModule) -> Vec<usize> {
        (0..m.base.dim())
            .filter(|&c| {
                let lhs = self.matrix.commutator(&m.action[c]);
                let rhs = m.act(&self.symbol.apply(&m.base.basis_vec(c)));
                lhs != rhs
            })
            .collect()
    }
}

/// A `B`-connection on a module `M`: one first-order operator per generator
/// of `B`, extended `R`-linearly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Connection {
    pub ops: Vec<FirstOrderOp>,
}

impl Connection {
    pub fn zero(rank: usize, module_dim: usize, base_dim: usize) -> Self {
        let op = FirstOrderOp { matrix: MatrixQ::zeros(module_dim, module_dim), symbol: Derivation::zero(base_dim) };
        Connection { ops: vec![op; rank] }
    }

    /// Connection on a module over the rationals given by plain matrices.
    pub fn from_matrices(mats: Vec<MatrixQ>) -> Self {
        Connection {
            ops: mats.into_iter().map(|matrix| FirstOrderOp { matrix, symbol: Derivation::zero(1) }).collect(),
        }
    }

    /// The anchor action of `B` on the base algebra, seen as a rank-one module.
    pub fn anchor_action(b: &LieRinehart) -> Self {
        Connection {
            ops: (0..b.rank)
                .map(|i| {
                    let s = b.anchor_of(&b.generator(i));
                    FirstOrderOp { matrix: s.matrix.clone(), symbol: s }
                })
                .collect(),
        }
    }

    pub fn rank(&self) -> usize {
        self.ops.len()
    }

    /// Rational matrix of `α(x)` for an arbitrary element `x` of `B`.
    pub fn operator_of(&self, b: &LieRinehart, m: &RModule, x: &[crate::linalg::Rational]) -> MatrixQ {
        let d = b.base_dim();
        let mut out = MatrixQ::zeros(m.dim, m.dim);
        for (k, xk) in x.iter().enumerate() {
            if xk.is_zero() {
                continue;
            }
            let term = m.action[k % d].mul(&self.ops[k / d].matrix);
            out = out.add(&term.scale(xk));
        }
        out
    }

    /// Induced connection on endomorphisms, acting by commutator.
    pub fn on_endomorphisms(&self, m: &RModule) -> Connection {
        Connection {
            ops: self
                .ops
                .iter()
                .map(|op| FirstOrderOp {
                    matrix: left_composition(&op.matrix, m.dim).sub(&right_composition(&op.matrix, m.dim)),
                    symbol: op.symbol.clone(),
                })
                .collect(),
        }
    }

    /// Failures of the connection axioms, one message each.
    pub fn validate(&self, b: &LieRinehart, m: &RModule) -> Vec<String> {
        let mut out = Vec::new();
        if self.ops.len() != b.rank {
            out.push(format!("{} operators for rank {}", self.ops.len(), b.rank));
            return out;
        }
        for (i, op) in self.ops.iter().enumerate() {
            if op.matrix.rows() != m.dim || op.matrix.cols() != m.dim {
                out.push(format!("operator {i} has wrong size"));
                continue;
            }
            for c in op.first_order_defects(m) {
                out.push(format!("operator {i} is not first order on base element {c}"));
            }
            if op.symbol != b.anchor_of(&b.generator(i)) {
                out.push(format!("symbol of operator {i} differs from the anchor"));
            }
        }
        out
    }

    fn check_shape(&self, b: &LieRinehart, m: &RModule) -> Result<(), LrError> {
        let ok =
            self.ops.len() == b.rank && self.ops.iter().all(|o| o.matrix.rows() == m.dim && o.matrix.cols() == m.dim);
        if ok {
            Ok(())
        } else {
            Err(LrError::ConnectionMismatch)
        }
    }
}

/// Matrix of the twisted differential `Ω^p_B(M) -> Ω^{p+1}_B(M)`:
/// `Σ (-1)^i α(s_i) ξ(.. ŝ_i ..) + Σ_{i<j} (-1)^{i+j} ξ([s_i,s_j], .. ŝ_i .. ŝ_j ..)`.
pub fn ce_differential(b: &LieRinehart, alpha: &Connection, m: &RModule, p: usize) -> Result<MatrixQ, LrError> {
    alpha.check_shape(b, m)?;
    let n = b.rank;
    let src = FormSpace::new(n, p, m.dim);
    let tgt = FormSpace::new(n, p + 1, m.dim);
    let mut out = MatrixQ::zeros(tgt.dim(), src.dim());
    if p + 1 > n {
        return Ok(out);
    }
    let structure: Vec<Vec<Vec<(usize, usize, Rational)>>> =
        (0..n).map(|i| (0..n).map(|j| if i < j { b.structure_terms(i, j) } else { Vec::new() }).collect()).collect();
    for s in tgt.tuples() {
        let row0 = tgt.offset(s);
        for i in 0..s.len() {
            let rest: Vec<usize> = s.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, &x)| x).collect();
            let sign = if i % 2 == 0 { q(1) } else { q(-1) };
            out.add_block(row0, src.offset(&rest), &alpha.ops[s[i]].matrix.scale(&sign));
        }
        for i in 0..s.len() {
            for j in i + 1..s.len() {
                let rest: Vec<usize> =
                    s.iter().enumerate().filter(|&(k, _)| k != i && k != j).map(|(_, &x)| x).collect();
                let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
                for (t, c, coeff) in &structure[s[i]][s[j]] {
                    let mut tup = vec![*t];
                    tup.extend(&rest);
                    let Some((sg, off)) = src.signed_offset(&tup) else { continue };
                    let f = coeff * q((sign * sg) as i64);
                    out.add_block(row0, off, &m.action[*c].scale(&f));
                }
            }
        }
    }
    Ok(out)
}

/// All twisted differentials assembled into a complex (a genuine complex
/// only when `α` is flat).
pub fn ce_complex(b: &LieRinehart, alpha: &Connection, m: &RModule) -> Result<CochainComplex, LrError> {
    let dims: Vec<usize> = (0..=b.rank).map(|p| FormSpace::new(b.rank, p, m.dim).dim()).collect();
    let diffs = (0..b.rank).map(|p| ce_differential(b, alpha, m, p)).collect::<Result<Vec<_>, _>>()?;
    Ok(CochainComplex::new(dims, diffs).expect("form spaces have matching sizes"))
}

/// `F(e_i, e_j) = [α(e_i), α(e_j)] - α([e_i, e_j])`, stored as an
/// endomorphism-valued 2-form (endomorphisms flattened row-major).
pub fn curvature(b: &LieRinehart, alpha: &Connection, m: &RModule) -> Cochain {
    let n = b.rank;
    let mut f = Cochain::zero(n, 2, m.dim * m.dim);
    for t in subsets(n, 2) {
        let (i, j) = (t[0], t[1]);
        let val = alpha.ops[i].matrix.commutator(&alpha.ops[j].matrix).sub(&alpha.operator_of(
            b,
            m,
            &b.generator_bracket(i, j),
        ));
        f.set_on_generators(&[i, j], &val.flatten());
    }
    f
}

/// Curvature evaluated on arbitrary elements, directly from the definition.
pub fn curvature_on(b: &LieRinehart, alpha: &Connection, m: &RModule, x: &[Rational], y: &[Rational]) -> MatrixQ {
    let ax = alpha.operator_of(b, m, x);
    let ay = alpha.operator_of(b, m, y);
    ax.commutator(&ay).sub(&alpha.operator_of(b, m, &b.bracket_of(x, y)))
}

/// Checks `F(r x, y) = r F(x, y)` on generators and base elements.
pub fn curvature_is_bilinear(b: &LieRinehart, alpha: &Connection, m: &RModule) -> bool {
    let d = b.base_dim();
    let module = b.module();
    for i in 0..b.rank {
        for j in 0..b.rank {
            let base_val = curvature_on(b, alpha, m, &b.generator(i), &b.generator(j));
            for c in 0..d {
                let rx = module.act(&b.base.basis_vec(c)).mul_vec(&b.generator(i));
                let lhs = curvature_on(b, alpha, m, &rx, &b.generator(j));
                if lhs != m.action[c].mul(&base_val) {
                    return false;
                }
            }
        }
    }
    true
}

/// `d_α F` for the commutator action on endomorphisms; zero by Bianchi.
pub fn bianchi_residual(b: &LieRinehart, alpha: &Connection, m: &RModule) -> Cochain {
    let f = curvature(b, alpha, m);
    let end = m.endomorphisms();
    let d = ce_differential(b, &alpha.on_endomorphisms(m), &end, 2).expect("shapes agree");
    Cochain::from_values(b.rank, 3, end.dim, d.mul_vec(&f.values))
}

/// `(F ⌣ ξ)(s_0..s_{p+1}) = Σ_{i<j} (-1)^{i+j+1} F(s_i,s_j) ξ(.. ŝ_i .. ŝ_j ..)`,
/// normalized so that `d_α d_α ξ = F ⌣ ξ`.
pub fn cup_curvature(f: &Cochain, xi: &Cochain) -> Cochain {
    let n = xi.rank;
    let md = xi.fiber_dim;
    assert_eq!(f.fiber_dim, md * md);
    let mut out = Cochain::zero(n, xi.degree + 2, md);
    for s in subsets(n, xi.degree + 2) {
        let mut acc = zero_vec(md);
        for i in 0..s.len() {
            for j in i + 1..s.len() {
                let rest: Vec<usize> =
                    s.iter().enumerate().filter(|&(k, _)| k != i && k != j).map(|(_, &x)| x).collect();
                let fm = MatrixQ::unflatten(md, md, &f.on_generators(&[s[i], s[j]]));
                let v = fm.mul_vec(&xi.on_generators(&rest));
                let sign = if (i + j + 1) % 2 == 0 { Rational::one() } else { -Rational::one() };
                crate::linalg::add_scaled(&mut acc, &sign, &v);
            }
        }
        out.set_on_generators(&s, &acc);
    }
    out
}

/// `H^p(B; M)` for a flat connection.
pub fn cohomology(b: &LieRinehart, alpha: &Connection, m: &RModule, p: usize) -> Result<Subquotient, LrError> {
    alpha.check_shape(b, m)?;
    let f = curvature(b, alpha, m);
    if let Some(t) = subsets(b.rank, 2).into_iter().find(|t| !crate::linalg::is_zero_vec(&f.on_generators(t))) {
        return Err(LrError::NotFlat { i: t[0], j: t[1] });
    }
    let dp = ce_differential(b, alpha, m, p)?;
    let cycles = crate::linalg::kernel_basis(&dp);
    let boundaries =
        if p == 0 { Vec::new() } else { crate::linalg::image_basis(&ce_differential(b, alpha, m, p - 1)?) };
    Ok(subquotient(dp.cols(), &cycles, &boundaries)?)
}
