use num_traits::{One, Zero};

use crate::linalg::{add_scaled, q, unit_vec, zero_vec, MatrixQ, Rational, Vector};

/// A finite-dimensional commutative unital algebra over the rationals,
/// given by structure constants: `mult[a][b]` is the product of basis
/// elements `a` and `b` expressed in the basis.
#[derive(Debug, Clone, PartialEq)]
pub struct BaseAlgebra {
    pub basis_labels: Vec<String>,
    pub mult: Vec<Vec<Vector>>,
    pub unit: Vector,
}

impl BaseAlgebra {
    pub fn new(basis_labels: Vec<String>, mult: Vec<Vec<Vector>>, unit: Vector) -> Self {
        BaseAlgebra { basis_labels, mult, unit }
    }

    /// The rationals themselves.
    pub fn rationals() -> Self {
        BaseAlgebra::new(vec!["1".into()], vec![vec![vec![q(1)]]], vec![q(1)])
    }

    /// Dual numbers `Q[x]/(x^2)` with basis `(1, x)`.
    pub fn dual_numbers() -> Self {
        let one = vec![q(1), q(0)];
        let x = vec![q(0), q(1)];
        let zero = vec![q(0), q(0)];
        BaseAlgebra::new(vec!["1".into(), "x".into()], vec![vec![one.clone(), x.clone()], vec![x, zero]], one)
    }

    pub fn dim(&self) -> usize {
        self.basis_labels.len()
    }

    pub fn mul(&self, x: &[Rational], y: &[Rational]) -> Vector {
        let mut out = zero_vec(self.dim());
        for (a, xa) in x.iter().enumerate() {
            if xa.is_zero() {
                continue;
            }
            for (b, yb) in y.iter().enumerate() {
                if !yb.is_zero() {
                    add_scaled(&mut out, &(xa * yb), &self.mult[a][b]);
                }
            }
        }
        out
    }

    /// Matrix of multiplication by `x`.
    pub fn mult_matrix(&self, x: &[Rational]) -> MatrixQ {
        let d = self.dim();
        let cols: Vec<Vector> = (0..d).map(|b| self.mul(x, &unit_vec(d, b))).collect();
        MatrixQ::from_columns(d, &cols)
    }

    pub fn basis_vec(&self, a: usize) -> Vector {
        unit_vec(self.dim(), a)
    }

    /// Failed axioms, one message each. Empty means the structure constants
    /// define a commutative associative unital algebra.
    pub fn validate(&self) -> Vec<String> {
        let d = self.dim();
        let mut out = Vec::new();
        for a in 0..d {
            let ea = self.basis_vec(a);
            if self.mul(&self.unit, &ea) != ea {
                out.push(format!("unit fails on basis element {a}"));
            }
            for b in 0..d {
                if self.mult[a][b] != self.mult[b][a] {
                    out.push(format!("not commutative on ({a},{b})"));
                }
                for c in 0..d {
                    let left = self.mul(&self.mult[a][b], &self.basis_vec(c));
                    let right = self.mul(&ea, &self.mult[b][c]);
                    if left != right {
                        out.push(format!("not associative on ({a},{b},{c})"));
                    }
                }
            }
        }
        out
    }

    /// Linear conditions (rows) on a flattened `d x d` matrix expressing the
    /// Leibniz rule on basis pairs.
    pub fn derivation_conditions(&self) -> Vec<Vector> {
        let d = self.dim();
        let mut rows = Vec::new();
        for a in 0..d {
            for b in a..d {
                // D(e_a e_b) - D(e_a) e_b - e_a D(e_b) = 0, component k
                for k in 0..d {
                    let mut row = zero_vec(d * d);
                    for (c, coeff) in self.mult[a][b].iter().enumerate() {
                        if !coeff.is_zero() {
                            row[k * d + c] += coeff;
                        }
                    }
                    for c in 0..d {
                        // D(e_a) = sum_c D[c][a] e_c, times e_b
                        let m = &self.mult[c][b][k];
                        if !m.is_zero() {
                            row[c * d + a] -= m;
                        }
                        let m = &self.mult[a][c][k];
                        if !m.is_zero() {
                            row[c * d + b] -= m;
                        }
                    }
                    if row.iter().any(|x| !x.is_zero()) {
                        rows.push(row);
                    }
                }
            }
        }
        rows
    }
}

/// A derivation of the base algebra, stored as its matrix in the basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    pub matrix: MatrixQ,
}

impl Derivation {
    pub fn zero(d: usize) -> Self {
        Derivation { matrix: MatrixQ::zeros(d, d) }
    }

    pub fn apply(&self, x: &[Rational]) -> Vector {
        self.matrix.mul_vec(x)
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.is_zero()
    }

    pub fn satisfies_leibniz(&self, r: &BaseAlgebra) -> bool {
        let d = r.dim();
        (0..d).all(|a| {
            (0..d).all(|b| {
                let ea = r.basis_vec(a);
                let eb = r.basis_vec(b);
                let lhs = self.apply(&r.mult[a][b]);
                let mut rhs = r.mul(&self.apply(&ea), &eb);
                add_scaled(&mut rhs, &Rational::one(), &r.mul(&ea, &self.apply(&eb)));
                lhs == rhs
            })
        })
    }

    /// `x * D`, the derivation `f -> x D(f)`.
    pub fn scaled_by(&self, r: &BaseAlgebra, x: &[Rational]) -> Derivation {
        Derivation { matrix: r.mult_matrix(x).mul(&self.matrix) }
    }

    pub fn add(&self, other: &Derivation) -> Derivation {
        Derivation { matrix: self.matrix.add(&other.matrix) }
    }

    pub fn commutator(&self, other: &Derivation) -> Derivation {
        Derivation { matrix: self.matrix.commutator(&other.matrix) }
    }
}

/// A module over a base algebra: a finite-dimensional rational space with
/// one action matrix per basis element of the base.
#[derive(Debug, Clone, PartialEq)]
pub struct RModule {
    pub base: BaseAlgebra,
    pub dim: usize,
    pub action: Vec<MatrixQ>,
}

impl RModule {
    /// The free module `R^n`; coordinate `i * dim(R) + c` is `r_c e_i`.
    pub fn free(base: &BaseAlgebra, n: usize) -> Self {
        let d = base.dim();
        let action = (0..d)
            .map(|a| {
                let ma = base.mult_matrix(&base.basis_vec(a));
                let mut m = MatrixQ::zeros(n * d, n * d);
                for i in 0..n {
                    m.add_block(i * d, i * d, &ma);
                }
                m
            })
            .collect();
        RModule { base: base.clone(), dim: n * d, action }
    }

    /// Module over `R = Q` of the given dimension.
    pub fn trivial(dim: usize) -> Self {
        RModule { base: BaseAlgebra::rationals(), dim, action: vec![MatrixQ::identity(dim)] }
    }

    /// Matrix of the action of an arbitrary algebra element.
    pub fn act(&self, x: &[Rational]) -> MatrixQ {
        let mut m = MatrixQ::zeros(self.dim, self.dim);
        for (a, xa) in x.iter().enumerate() {
            if !xa.is_zero() {
                m = m.add(&self.action[a].scale(xa));
            }
        }
        m
    }

    /// Endomorphisms of the underlying rational space, flattened row-major,
    /// with the algebra acting by post-composition.
    pub fn endomorphisms(&self) -> RModule {
        let n = self.dim;
        let action = self.action.iter().map(|a| left_composition(a, n)).collect();
        RModule { base: self.base.clone(), dim: n * n, action }
    }

    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.act(&self.base.unit) != MatrixQ::identity(self.dim) {
            out.push("unit does not act as the identity".to_string());
        }
        let d = self.base.dim();
        for a in 0..d {
            for b in 0..d {
                let lhs = self.act(&self.base.mult[a][b]);
                let rhs = self.action[a].mul(&self.action[b]);
                if lhs != rhs {
                    out.push(format!("action not multiplicative on ({a},{b})"));
                }
            }
        }
        out
    }
}

/// Matrix of `X -> A X` on row-major flattened `n x n` matrices.
pub fn left_composition(a: &MatrixQ, n: usize) -> MatrixQ {
    let mut m = MatrixQ::zeros(n * n, n * n);
    for (&(i, k), x) in a.nonzeros() {
        for j in 0..n {
            m.add_at(i * n + j, k * n + j, x);
        }
    }
    m
}

/// Matrix of `X -> X A` on row-major flattened `n x n` matrices.
pub fn right_composition(a: &MatrixQ, n: usize) -> MatrixQ {
    let mut m = MatrixQ::zeros(n * n, n * n);
    for (&(k, j), x) in a.nonzeros() {
        for i in 0..n {
            m.add_at(i * n + j, i * n + k, x);
        }
    }
    m
}
