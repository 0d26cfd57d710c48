use num_traits::Zero;

use super::algebroid::LieRinehart;
use super::base::{Derivation, RModule};
use super::connection::FirstOrderOp;
use super::LrError;
use crate::linalg::{
    coordinates_in, in_span, kernel_basis, span_basis, subquotient, zero_vec, MatrixQ, Rational, Subquotient, Vector,
};

/// The center of `L` as a module, with its inclusion into `L`.
#[derive(Debug, Clone, PartialEq)]
pub struct Center {
    pub module: RModule,
    /// `dim L x dim Z` matrix whose columns are the chosen basis of the center.
    pub inclusion: MatrixQ,
}

impl Center {
    pub fn dim(&self) -> usize {
        self.module.dim
    }

    /// Coordinates of an element of `L` lying in the center.
    pub fn coordinates(&self, v: &[Rational]) -> Option<Vector> {
        coordinates_in(&self.inclusion.columns(), v)
    }
}

/// Center, derivations, inner derivations and outer derivations of a
/// totally intransitive `L`.
///
/// Derivations are stored flattened: the `dim L x dim L` matrix row-major,
/// followed by the `dim R x dim R` symbol row-major.
#[derive(Debug, Clone)]
pub struct CanonicalSubobjects {
    pub l_dim: usize,
    pub base_dim: usize,
    pub center: Center,
    pub der_o: Vec<Vector>,
    pub der_d: Vec<Vector>,
    pub ad: Vec<Vector>,
    pub out_o: Subquotient,
    pub out_d: Subquotient,
    pub ad_is_ideal: bool,
    pub closed_under_bracket: bool,
}

impl CanonicalSubobjects {
    pub fn flat_dim(&self) -> usize {
        self.l_dim * self.l_dim + self.base_dim * self.base_dim
    }

    pub fn to_op(&self, v: &[Rational]) -> FirstOrderOp {
        let n2 = self.l_dim * self.l_dim;
        FirstOrderOp {
            matrix: MatrixQ::unflatten(self.l_dim, self.l_dim, &v[..n2]),
            symbol: Derivation { matrix: MatrixQ::unflatten(self.base_dim, self.base_dim, &v[n2..]) },
        }
    }

    pub fn flatten_op(&self, op: &FirstOrderOp) -> Vector {
        let mut v = op.matrix.flatten();
        v.extend(op.symbol.matrix.flatten());
        v
    }

    pub fn is_der_d(&self, op: &FirstOrderOp) -> bool {
        in_span(&self.der_d, &self.flatten_op(op))
    }

    pub fn is_inner(&self, op: &FirstOrderOp) -> bool {
        in_span(&self.ad, &self.flatten_op(op))
    }
}

pub fn center(l: &LieRinehart) -> Center {
    let n = l.dim();
    let cols: Vec<Vector> = (0..n).map(|k| l.ad_matrix(&crate::linalg::unit_vec(n, k)).flatten()).collect();
    let ad = MatrixQ::from_columns(n * n, &cols);
    let basis = kernel_basis(&ad);
    let module = l.module();
    let action = module
        .action
        .iter()
        .map(|a| {
            let cols: Vec<Vector> =
                basis.iter().map(|z| coordinates_in(&basis, &a.mul_vec(z)).expect("center is a submodule")).collect();
            MatrixQ::from_columns(basis.len(), &cols)
        })
        .collect();
    Center {
        module: RModule { base: l.base.clone(), dim: basis.len(), action },
        inclusion: MatrixQ::from_columns(n, &basis),
    }
}

pub fn canonical_subobjects(l: &LieRinehart) -> Result<CanonicalSubobjects, LrError> {
    if !l.has_zero_anchor() {
        return Err(LrError::NotTotallyIntransitive);
    }
    let n = l.dim();
    let d = l.base_dim();
    let n2 = n * n;
    let total = n2 + d * d;
    let module = l.module();
    let mut rows: Vec<Vector> = Vec::new();

    for r in l.base.derivation_conditions() {
        let mut row = zero_vec(total);
        row[n2..].clone_from_slice(&r);
        rows.push(row);
    }
    // M A_c - A_c M - Σ_k σ[k][c] A_k = 0
    for c in 0..d {
        let ac = &module.action[c];
        for u in 0..n {
            for v in 0..n {
                let mut row = zero_vec(total);
                for w in 0..n {
                    let x = ac.get(w, v);
                    if !x.is_zero() {
                        row[u * n + w] += x;
                    }
                    let x = ac.get(u, w);
                    if !x.is_zero() {
                        row[w * n + v] -= x;
                    }
                }
                for k in 0..d {
                    let x = module.action[k].get(u, v);
                    if !x.is_zero() {
                        row[n2 + k * d + c] -= x;
                    }
                }
                rows.push(row);
            }
        }
    }
    // M[x,y] - [Mx,y] - [x,My] = 0
    for x in 0..n {
        for y in x + 1..n {
            for u in 0..n {
                let mut row = zero_vec(total);
                for w in 0..n {
                    let a = &l.bracket[x][y][w];
                    if !a.is_zero() {
                        row[u * n + w] += a;
                    }
                    let a = &l.bracket[w][y][u];
                    if !a.is_zero() {
                        row[w * n + x] -= a;
                    }
                    let a = &l.bracket[x][w][u];
                    if !a.is_zero() {
                        row[w * n + y] -= a;
                    }
                }
                rows.push(row);
            }
        }
    }
    let der_d = kernel_basis(&MatrixQ::from_rows(total, &rows));
    let mut rows_o = rows;
    for k in n2..total {
        rows_o.push(crate::linalg::unit_vec(total, k));
    }
    let der_o = kernel_basis(&MatrixQ::from_rows(total, &rows_o));

    let ad_gens: Vec<Vector> = (0..n)
        .map(|k| {
            let mut v = l.ad_matrix(&crate::linalg::unit_vec(n, k)).flatten();
            v.extend(zero_vec(d * d));
            v
        })
        .collect();
    let ad = span_basis(&ad_gens, total);

    let out_o = subquotient(total, &der_o, &ad)?;
    let out_d = subquotient(total, &der_d, &ad)?;

    let unflat =
        |v: &Vector| -> (MatrixQ, MatrixQ) { (MatrixQ::unflatten(n, n, &v[..n2]), MatrixQ::unflatten(d, d, &v[n2..])) };
    let bracket_flat = |a: &Vector, b: &Vector| -> Vector {
        let (ma, sa) = unflat(a);
        let (mb, sb) = unflat(b);
        let mut v = ma.commutator(&mb).flatten();
        v.extend(sa.commutator(&sb).flatten());
        v
    };
    let ad_is_ideal = der_d.iter().all(|x| ad.iter().all(|y| in_span(&ad, &bracket_flat(x, y))));
    let closed_under_bracket = [&der_d, &der_o, &ad]
        .iter()
        .all(|space| space.iter().all(|x| space.iter().all(|y| in_span(space, &bracket_flat(x, y)))));

    Ok(CanonicalSubobjects {
        l_dim: n,
        base_dim: d,
        center: center(l),
        der_o,
        der_d,
        ad,
        out_o,
        out_d,
        ad_is_ideal,
        closed_under_bracket,
    })
}
