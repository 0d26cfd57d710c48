use std::collections::BTreeMap;

use num_traits::Zero;
use serde::Serialize;

use super::base::{BaseAlgebra, Derivation, RModule};
use crate::linalg::{add_scaled, vec_scale, zero_vec, MatrixQ, Rational, Vector};

/// A Lie–Rinehart algebra over `base` which is free of rank `rank`.
///
/// The underlying rational space has dimension `rank * dim(base)`; the
/// coordinate `i * dim(base) + c` stands for `r_c e_i`. The bracket is stored
/// as the full rational bilinear tensor and the anchor per rational basis
/// element, so deliberately broken structures can be represented.
#[derive(Debug, Clone, PartialEq)]
pub struct LieRinehart {
    pub base: BaseAlgebra,
    pub rank: usize,
    pub bracket: Vec<Vec<Vector>>,
    pub anchor: Vec<Derivation>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind {
    Alternating,
    Jacobi,
    Leibniz,
    AnchorHomomorphism,
    AnchorLinearity,
    AnchorNotDerivation,
}

/// One failed identity, located by the rational basis indices involved.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct ValidationFailure {
    pub kind: FailureKind,
    pub indices: Vec<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub failures: Vec<ValidationFailure>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn of_kind(&self, kind: FailureKind) -> impl Iterator<Item = &ValidationFailure> {
        self.failures.iter().filter(move |f| f.kind == kind)
    }
}

impl LieRinehart {
    /// Builds the algebra from brackets and anchors of the free generators,
    /// extending to all of `R e_i` by the Leibniz rule
    /// `[g e_i, h e_j] = gh [e_i,e_j] + g a(e_i)(h) e_j - h a(e_j)(g) e_i`.
    ///
    /// `brackets` maps `(i, j)` with `i < j` to `[e_i, e_j]` as a rational
    /// vector of length `rank * dim(base)`; missing pairs are zero.
    pub fn from_basis_brackets(
        base: &BaseAlgebra,
        rank: usize,
        brackets: &BTreeMap<(usize, usize), Vector>,
        anchors: &[Derivation],
    ) -> Self {
        let d = base.dim();
        let n = rank * d;
        assert_eq!(anchors.len(), rank, "one anchor per generator");
        let gen = |i: usize, j: usize| -> Vector {
            if i == j {
                return zero_vec(n);
            }
            let (a, b, s) = if i < j { (i, j, 1) } else { (j, i, -1) };
            let v = brackets.get(&(a, b)).cloned().unwrap_or_else(|| zero_vec(n));
            if s < 0 {
                vec_scale(&-Rational::from_integer(1.into()), &v)
            } else {
                v
            }
        };
        let module = RModule::free(base, rank);
        let mut bracket = vec![vec![zero_vec(n); n]; n];
        for i in 0..rank {
            for a in 0..d {
                let g = base.basis_vec(a);
                for j in 0..rank {
                    for b in 0..d {
                        let h = base.basis_vec(b);
                        let gh = base.mul(&g, &h);
                        let mut v = module.act(&gh).mul_vec(&gen(i, j));
                        let ah = base.mul(&g, &anchors[i].apply(&h));
                        add_scaled(&mut v, &Rational::from_integer(1.into()), &embed(&ah, j, rank, d));
                        let ag = base.mul(&h, &anchors[j].apply(&g));
                        add_scaled(&mut v, &-Rational::from_integer(1.into()), &embed(&ag, i, rank, d));
                        bracket[i * d + a][j * d + b] = v;
                    }
                }
            }
        }
        let anchor = (0..n).map(|k| anchors[k / d].scaled_by(base, &base.basis_vec(k % d))).collect();
        LieRinehart { base: base.clone(), rank, bracket, anchor }
    }

    /// A Lie algebra over the rationals from its structure constants
    /// `[e_i, e_j] = sum_k c[(i,j)][k] e_k`.
    pub fn lie_algebra(rank: usize, brackets: &BTreeMap<(usize, usize), Vector>) -> Self {
        let base = BaseAlgebra::rationals();
        LieRinehart::from_basis_brackets(&base, rank, brackets, &vec![Derivation::zero(1); rank])
    }

    pub fn abelian(base: &BaseAlgebra, rank: usize) -> Self {
        LieRinehart::from_basis_brackets(base, rank, &BTreeMap::new(), &vec![Derivation::zero(base.dim()); rank])
    }

    pub fn base_dim(&self) -> usize {
        self.base.dim()
    }

    /// Dimension of the underlying rational space.
    pub fn dim(&self) -> usize {
        self.rank * self.base.dim()
    }

    /// The underlying module `R^rank`.
    pub fn module(&self) -> RModule {
        RModule::free(&self.base, self.rank)
    }

    /// The generator `e_i` as a rational vector.
    pub fn generator(&self, i: usize) -> Vector {
        embed(&self.base.unit, i, self.rank, self.base.dim())
    }

    pub fn bracket_of(&self, x: &[Rational], y: &[Rational]) -> Vector {
        let n = self.dim();
        let mut out = zero_vec(n);
        for (a, xa) in x.iter().enumerate() {
            if xa.is_zero() {
                continue;
            }
            for (b, yb) in y.iter().enumerate() {
                if !yb.is_zero() {
                    add_scaled(&mut out, &(xa * yb), &self.bracket[a][b]);
                }
            }
        }
        out
    }

    /// `[e_i, e_j]` of generators.
    pub fn generator_bracket(&self, i: usize, j: usize) -> Vector {
        self.bracket_of(&self.generator(i), &self.generator(j))
    }

    pub fn anchor_of(&self, x: &[Rational]) -> Derivation {
        let d = self.base.dim();
        let mut m = MatrixQ::zeros(d, d);
        for (k, xk) in x.iter().enumerate() {
            if !xk.is_zero() {
                m = m.add(&self.anchor[k].matrix.scale(xk));
            }
        }
        Derivation { matrix: m }
    }

    pub fn has_zero_anchor(&self) -> bool {
        self.anchor.iter().all(Derivation::is_zero)
    }

    /// Matrix of `ad_x = [x, -]` on the underlying rational space.
    pub fn ad_matrix(&self, x: &[Rational]) -> MatrixQ {
        let n = self.dim();
        let cols: Vec<Vector> = (0..n)
            .map(|b| {
                let mut e = zero_vec(n);
                e[b] = Rational::from_integer(1.into());
                self.bracket_of(x, &e)
            })
            .collect();
        MatrixQ::from_columns(n, &cols)
    }

    /// Coefficients of `[e_i, e_j]` as `(t, c, coefficient)`: the term
    /// `coefficient * r_c e_t`.
    pub fn structure_terms(&self, i: usize, j: usize) -> Vec<(usize, usize, Rational)> {
        let d = self.base.dim();
        self.generator_bracket(i, j)
            .into_iter()
            .enumerate()
            .filter(|(_, x)| !x.is_zero())
            .map(|(k, x)| (k / d, k % d, x))
            .collect()
    }

    /// Checks every identity on rational basis elements and reports failures.
    pub fn validate(&self) -> ValidationReport {
        let n = self.dim();
        let d = self.base.dim();
        let r = &self.base;
        let module = self.module();
        let mut failures = Vec::new();
        let e = |k: usize| {
            let mut v = zero_vec(n);
            v[k] = Rational::from_integer(1.into());
            v
        };
        for (k, a) in self.anchor.iter().enumerate() {
            if !a.satisfies_leibniz(r) {
                failures.push(ValidationFailure { kind: FailureKind::AnchorNotDerivation, indices: vec![k] });
            }
        }
        for x in 0..n {
            for y in x..n {
                let s: Vector = self.bracket[x][y].iter().zip(&self.bracket[y][x]).map(|(a, b)| a + b).collect();
                if s.iter().any(|v| !v.is_zero()) || (x == y && self.bracket[x][x].iter().any(|v| !v.is_zero())) {
                    failures.push(ValidationFailure { kind: FailureKind::Alternating, indices: vec![x, y] });
                }
            }
        }
        for x in 0..n {
            for y in x + 1..n {
                for z in y + 1..n {
                    let (ex, ey, ez) = (e(x), e(y), e(z));
                    let mut j = self.bracket_of(&ex, &self.bracket[y][z]);
                    add_scaled(&mut j, &one(), &self.bracket_of(&ey, &self.bracket[z][x]));
                    add_scaled(&mut j, &one(), &self.bracket_of(&ez, &self.bracket[x][y]));
                    if j.iter().any(|v| !v.is_zero()) {
                        failures.push(ValidationFailure { kind: FailureKind::Jacobi, indices: vec![x, y, z] });
                    }
                }
            }
        }
        for x in 0..n {
            for y in 0..n {
                for c in 0..d {
                    let rc = r.basis_vec(c);
                    let ry = module.act(&rc).mul_vec(&e(y));
                    let lhs = self.bracket_of(&e(x), &ry);
                    let mut rhs = module.act(&rc).mul_vec(&self.bracket[x][y]);
                    let ar = self.anchor[x].apply(&rc);
                    add_scaled(&mut rhs, &one(), &module.act(&ar).mul_vec(&e(y)));
                    if lhs != rhs {
                        failures.push(ValidationFailure { kind: FailureKind::Leibniz, indices: vec![x, c, y] });
                    }
                }
            }
        }
        for x in 0..n {
            for y in x + 1..n {
                let lhs = self.anchor_of(&self.bracket[x][y]);
                let rhs = self.anchor[x].commutator(&self.anchor[y]);
                if lhs != rhs {
                    failures.push(ValidationFailure { kind: FailureKind::AnchorHomomorphism, indices: vec![x, y] });
                }
            }
        }
        for x in 0..n {
            for c in 0..d {
                let rc = r.basis_vec(c);
                let lhs = self.anchor_of(&module.act(&rc).mul_vec(&e(x)));
                let rhs = self.anchor[x].scaled_by(r, &rc);
                if lhs != rhs {
                    failures.push(ValidationFailure { kind: FailureKind::AnchorLinearity, indices: vec![x, c] });
                }
            }
        }
        failures.sort();
        ValidationReport { failures }
    }
}

fn one() -> Rational {
    Rational::from_integer(1.into())
}

/// The element `f e_i` of `R^rank` for `f` in the base.
pub fn embed(f: &[Rational], i: usize, rank: usize, d: usize) -> Vector {
    let mut v = zero_vec(rank * d);
    v[i * d..(i + 1) * d].clone_from_slice(f);
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::q;

    fn heis3() -> LieRinehart {
        let mut br = BTreeMap::new();
        br.insert((0, 1), vec![q(0), q(0), q(1)]);
        LieRinehart::lie_algebra(3, &br)
    }

    #[test]
    fn abelian_and_heisenberg_are_valid() {
        assert!(LieRinehart::abelian(&BaseAlgebra::rationals(), 2).validate().is_valid());
        assert!(heis3().validate().is_valid());
    }

    #[test]
    fn broken_jacobi_is_reported() {
        let mut br = BTreeMap::new();
        br.insert((0, 1), vec![q(0), q(0), q(1)]);
        br.insert((1, 2), vec![q(1), q(0), q(0)]);
        br.insert((0, 2), vec![q(0), q(0), q(1)]);
        let l = LieRinehart::lie_algebra(3, &br);
        let rep = l.validate();
        assert_eq!(rep.of_kind(FailureKind::Jacobi).count(), 1);
    }

    #[test]
    fn commuting_anchors_with_nonabelian_bracket_fail_homomorphism() {
        // over dual numbers, both generators anchored to x d/dx, [e1,e2] = e1
        let r = BaseAlgebra::dual_numbers();
        let mut dm = MatrixQ::zeros(2, 2);
        dm.set(1, 1, q(1));
        let dx = Derivation { matrix: dm };
        let mut br = BTreeMap::new();
        br.insert((0, 1), embed(&r.unit, 0, 2, 2));
        let l = LieRinehart::from_basis_brackets(&r, 2, &br, &[dx.clone(), dx]);
        let rep = l.validate();
        assert!(rep.of_kind(FailureKind::AnchorHomomorphism).any(|f| f.indices == vec![0, 2]));
    }

    #[test]
    fn dual_numbers_with_euler_anchor_is_valid() {
        let r = BaseAlgebra::dual_numbers();
        let mut dm = MatrixQ::zeros(2, 2);
        dm.set(1, 1, q(1));
        let l = LieRinehart::from_basis_brackets(&r, 1, &BTreeMap::new(), &[Derivation { matrix: dm }]);
        assert!(l.validate().is_valid());
        // [e, x e] = a(e)(x) e = x e
        let xe = embed(&r.basis_vec(1), 0, 1, 2);
        assert_eq!(l.bracket_of(&l.generator(0), &xe), xe);
    }
}
