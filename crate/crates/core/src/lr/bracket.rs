use super::algebroid::LieRinehart;
use super::base::Derivation;
use super::connection::{Connection, FirstOrderOp};
use super::forms::{sort_with_sign, subsets, Cochain};
use crate::linalg::{add_scaled, q, zero_vec, MatrixQ};

/// Graded bracket of `L`-valued forms on a rank-`n` algebra:
/// `[ξ,η](b_1..b_{p+q}) = Σ_σ sgn(σ) [ξ(b_σ(1..p)), η(b_σ(p+1..p+q))]`
/// over `(p,q)`-shuffles.
pub fn graded_bracket(l: &LieRinehart, xi: &Cochain, eta: &Cochain) -> Cochain {
    let n = xi.rank;
    assert_eq!(eta.rank, n);
    let (p, qd) = (xi.degree, eta.degree);
    let mut out = Cochain::zero(n, p + qd, l.dim());
    if p + qd > n {
        return out;
    }
    for s in subsets(n, p + qd) {
        let mut acc = zero_vec(l.dim());
        for pos in subsets(p + qd, p) {
            let rest: Vec<usize> = (0..p + qd).filter(|k| !pos.contains(k)).collect();
            let mut perm = pos.clone();
            perm.extend(&rest);
            let (_, sign) = sort_with_sign(&perm).expect("positions are distinct");
            let a: Vec<usize> = pos.iter().map(|&k| s[k]).collect();
            let b: Vec<usize> = rest.iter().map(|&k| s[k]).collect();
            let v = l.bracket_of(&xi.on_generators(&a), &eta.on_generators(&b));
            add_scaled(&mut acc, &q(sign as i64), &v);
        }
        out.set_on_generators(&s, &acc);
    }
    out
}

/// `ad_φ`: the endomorphism-valued form `b ↦ [φ(b), -]`.
pub fn ad_form(l: &LieRinehart, phi: &Cochain) -> Cochain {
    let nl = l.dim();
    let mut out = Cochain::zero(phi.rank, phi.degree, nl * nl);
    for t in subsets(phi.rank, phi.degree) {
        out.set_on_generators(&t, &l.ad_matrix(&phi.on_generators(&t)).flatten());
    }
    out
}

/// `α + ad_φ` for an `L`-valued 1-form `φ`.
pub fn shift_connection(l: &LieRinehart, alpha: &Connection, phi: &Cochain) -> Connection {
    assert_eq!(phi.degree, 1);
    Connection {
        ops: alpha
            .ops
            .iter()
            .enumerate()
            .map(|(i, op)| FirstOrderOp {
                matrix: op.matrix.add(&l.ad_matrix(&phi.on_generators(&[i]))),
                symbol: op.symbol.clone(),
            })
            .collect(),
    }
}

/// The connection `b ↦ ad_{φ(b)}` with zero symbols.
pub fn ad_connection(l: &LieRinehart, phi: &Cochain) -> Connection {
    let d = l.base_dim();
    Connection {
        ops: (0..phi.rank)
            .map(|i| FirstOrderOp { matrix: l.ad_matrix(&phi.on_generators(&[i])), symbol: Derivation::zero(d) })
            .collect(),
    }
}

/// Difference `α' - α` as plain matrices, one per generator.
pub fn connection_difference(a1: &Connection, a0: &Connection) -> Vec<MatrixQ> {
    a1.ops.iter().zip(&a0.ops).map(|(x, y)| x.matrix.sub(&y.matrix)).collect()
}
