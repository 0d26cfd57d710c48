//! Extensions `0 -> L -> A -> B -> 0` of Lie–Rinehart algebras with
//! totally intransitive kernel: couplings, lifting pairs, the obstruction
//! class, construction of the bracket on `B ⊕ L`, equivalence and the
//! action of `H^2(B; Z(L))`.

mod build;
mod pair;

pub use build::{
    build_extension, difference_class, extensions_equivalent, is_bracket_morphism, shear_map, splitting_to_pair,
    torsor_action, DifferenceClass, EquivalenceWitness, ExtensionStructure, JacobiFailure,
};
pub use pair::{
    change_lifting_pair, differential_shift_check, lift_coupling, obstruction_class, obstruction_class_of,
    obstruction_cochain, solve_rho, ObstructionClass,
};

use thiserror::Error;

use crate::linalg::{coordinates_in, is_zero_vec, MatrixQ, Rational, Vector};
use crate::lr::{
    canonical_subobjects, ce_differential, curvature, CanonicalSubobjects, Cochain, Connection, FirstOrderOp,
    LieRinehart, LrError, RModule,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExtensionError {
    #[error("invalid coupling: {0:?}")]
    InvalidCoupling(Vec<String>),
    #[error("no 2-form rho with ad_rho equal to the curvature")]
    NoRhoSolution,
    #[error("value on generators {tuple:?} is not central")]
    CenterEscape { tuple: Vec<usize> },
    #[error("extensions do not induce the same coupling")]
    CouplingMismatch,
    #[error("cochain is not closed")]
    NotClosed,
    #[error("map is not a section of the projection")]
    NotASection,
    #[error(transparent)]
    Lr(#[from] LrError),
}

/// An outer action of `B` on a totally intransitive `L`, given by one
/// representative in `Der_D(L)` per generator of `B`.
#[derive(Debug, Clone)]
pub struct Coupling {
    pub b: LieRinehart,
    pub l: LieRinehart,
    pub outer: Vec<FirstOrderOp>,
    pub subobjects: CanonicalSubobjects,
}

/// A lift of a coupling to `Der_D(L)` with a 2-form absorbing its curvature.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftingPair {
    pub alpha: Connection,
    pub rho: Cochain,
}

impl Coupling {
    pub fn new(b: LieRinehart, l: LieRinehart, outer: Vec<FirstOrderOp>) -> Result<Self, ExtensionError> {
        let subobjects = canonical_subobjects(&l)?;
        let c = Coupling { b, l, outer, subobjects };
        let problems = c.validate();
        if problems.is_empty() {
            Ok(c)
        } else {
            Err(ExtensionError::InvalidCoupling(problems))
        }
    }

    pub fn l_module(&self) -> RModule {
        self.l.module()
    }

    pub fn center_module(&self) -> &RModule {
        &self.subobjects.center.module
    }

    pub fn outer_connection(&self) -> Connection {
        Connection { ops: self.outer.clone() }
    }

    fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.b.base != self.l.base {
            out.push("B and L have different base algebras".into());
            return out;
        }
        if self.outer.len() != self.b.rank {
            out.push("one outer representative per generator required".into());
            return out;
        }
        for (i, op) in self.outer.iter().enumerate() {
            if !self.subobjects.is_der_d(op) {
                out.push(format!("representative {i} is not in Der_D(L)"));
            }
        }
        out.extend(self.outer_connection().validate(&self.b, &self.l_module()));
        if !out.is_empty() {
            return out;
        }
        let f = curvature(&self.b, &self.outer_connection(), &self.l_module());
        for t in crate::lr::subsets(self.b.rank, 2) {
            let mut v = f.on_generators(&t);
            v.extend(crate::linalg::zero_vec(self.l.base_dim() * self.l.base_dim()));
            if !crate::linalg::in_span(&self.subobjects.ad, &v) {
                out.push(format!("bracket not preserved modulo inner derivations on {t:?}"));
            }
        }
        out
    }

    /// The connection induced on the center by any lift.
    pub fn center_connection(&self, alpha: &Connection) -> Connection {
        let inc = &self.subobjects.center.inclusion;
        let basis = inc.columns();
        let ops = alpha
            .ops
            .iter()
            .map(|op| {
                let cols: Vec<Vector> = basis
                    .iter()
                    .map(|z| coordinates_in(&basis, &op.matrix.mul_vec(z)).expect("derivations preserve the center"))
                    .collect();
                FirstOrderOp { matrix: MatrixQ::from_columns(basis.len(), &cols), symbol: op.symbol.clone() }
            })
            .collect();
        Connection { ops }
    }

    /// Includes a center-valued form into `L`-valued forms.
    pub fn embed_center(&self, z: &Cochain) -> Cochain {
        let inc = &self.subobjects.center.inclusion;
        let mut out = Cochain::zero(z.rank, z.degree, self.l.dim());
        for t in crate::lr::subsets(z.rank, z.degree) {
            out.set_on_generators(&t, &inc.mul_vec(&z.on_generators(&t)));
        }
        out
    }

    /// Rewrites an `L`-valued form with central values in center coordinates.
    pub fn to_center(&self, x: &Cochain) -> Result<Cochain, ExtensionError> {
        let zdim = self.subobjects.center.dim();
        let mut out = Cochain::zero(x.rank, x.degree, zdim);
        for t in crate::lr::subsets(x.rank, x.degree) {
            let v = x.on_generators(&t);
            if is_zero_vec(&v) {
                continue;
            }
            let c = self.subobjects.center.coordinates(&v).ok_or(ExtensionError::CenterEscape { tuple: t.clone() })?;
            out.set_on_generators(&t, &c);
        }
        Ok(out)
    }

    /// `d_α` on `L`-valued forms.
    pub fn d_alpha(&self, alpha: &Connection, x: &Cochain) -> Cochain {
        let m = ce_differential(&self.b, alpha, &self.l_module(), x.degree).expect("shapes agree");
        Cochain::from_values(x.rank, x.degree + 1, x.fiber_dim, m.mul_vec(&x.values))
    }

    /// `d_ᾱ` on center-valued forms.
    pub fn d_center(&self, alpha: &Connection, z: &Cochain) -> Cochain {
        let m = ce_differential(&self.b, &self.center_connection(alpha), self.center_module(), z.degree)
            .expect("shapes agree");
        Cochain::from_values(z.rank, z.degree + 1, z.fiber_dim, m.mul_vec(&z.values))
    }

    /// An `L`-valued 1-form `η` with `α1 - α0 = ad_η`, if one exists
    /// (free coordinates set to zero).
    pub fn solve_ad_difference(&self, a1: &Connection, a0: &Connection) -> Option<Cochain> {
        let n = self.l.dim();
        let ad_cols: Vec<Vector> = (0..n).map(|k| self.l.ad_matrix(&crate::linalg::unit_vec(n, k)).flatten()).collect();
        let ad = MatrixQ::from_columns(n * n, &ad_cols);
        let mut eta = Cochain::zero(self.b.rank, 1, n);
        for i in 0..self.b.rank {
            if a1.ops[i].symbol != a0.ops[i].symbol {
                return None;
            }
            let diff = a1.ops[i].matrix.sub(&a0.ops[i].matrix).flatten();
            let x = crate::linalg::solve_linear(&ad, &diff)?;
            eta.set_on_generators(&[i], &x);
        }
        Some(eta)
    }

    /// Failed lifting-pair conditions, one message each.
    pub fn check_pair(&self, pair: &LiftingPair) -> Vec<String> {
        let mut out = Vec::new();
        for (i, op) in pair.alpha.ops.iter().enumerate() {
            if !self.subobjects.is_der_d(op) {
                out.push(format!("alpha({i}) is not in Der_D(L)"));
                continue;
            }
            let diff = FirstOrderOp {
                matrix: op.matrix.sub(&self.outer[i].matrix),
                symbol: crate::lr::Derivation { matrix: op.symbol.matrix.sub(&self.outer[i].symbol.matrix) },
            };
            if !self.subobjects.is_inner(&diff) {
                out.push(format!("alpha({i}) does not reduce to the coupling"));
            }
        }
        let f = curvature(&self.b, &pair.alpha, &self.l_module());
        let ad = crate::lr::ad_form(&self.l, &pair.rho);
        if f != ad {
            out.push("ad_rho differs from the curvature".into());
        }
        out
    }
}

pub(crate) fn half() -> Rational {
    crate::linalg::qf(1, 2)
}
