//! Small named algebras used by tests, benches and the command line.

use std::collections::BTreeMap;

use crate::linalg::{q, Vector};
use crate::lr::{BaseAlgebra, LieRinehart};

fn brackets(n: usize, table: &[((usize, usize), Vec<(usize, i64)>)]) -> BTreeMap<(usize, usize), Vector> {
    table
        .iter()
        .map(|(k, terms)| {
            let mut v = vec![q(0); n];
            for &(i, c) in terms {
                v[i] = q(c);
            }
            (*k, v)
        })
        .collect()
}

/// Heisenberg algebra: `[e1, e2] = e3`.
pub fn heis3() -> LieRinehart {
    LieRinehart::lie_algebra(3, &brackets(3, &[((0, 1), vec![(2, 1)])]))
}

/// `sl2` in the basis `(e, f, h)`.
pub fn sl2() -> LieRinehart {
    LieRinehart::lie_algebra(
        3,
        &brackets(3, &[((0, 1), vec![(2, 1)]), ((0, 2), vec![(0, -2)]), ((1, 2), vec![(1, 2)])]),
    )
}

/// `sl2 ⊕ Q`, the extra generator central.
pub fn sl2_plus_line() -> LieRinehart {
    LieRinehart::lie_algebra(
        4,
        &brackets(4, &[((0, 1), vec![(2, 1)]), ((0, 2), vec![(0, -2)]), ((1, 2), vec![(1, 2)])]),
    )
}

pub fn abelian(rank: usize) -> LieRinehart {
    LieRinehart::abelian(&BaseAlgebra::rationals(), rank)
}

/// A Lie algebra over the rationals from integer structure constants.
pub fn lie_algebra_from_table(n: usize, table: &[((usize, usize), Vec<(usize, i64)>)]) -> LieRinehart {
    LieRinehart::lie_algebra(n, &brackets(n, table))
}

/// Seeded random data for property checks.
pub mod random {
    use rand::Rng;
    use rand_chacha::ChaCha8Rng;

    use crate::linalg::{q, MatrixQ, Rational, Vector};
    use crate::lr::Cochain;

    pub use rand::SeedableRng;
    pub type TestRng = ChaCha8Rng;

    pub fn rng(seed: u64) -> TestRng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    pub fn small(rng: &mut TestRng, bound: i64) -> Rational {
        q(rng.gen_range(-bound..=bound))
    }

    pub fn vector(rng: &mut TestRng, n: usize, bound: i64) -> Vector {
        (0..n).map(|_| small(rng, bound)).collect()
    }

    pub fn matrix(rng: &mut TestRng, rows: usize, cols: usize, bound: i64) -> MatrixQ {
        let mut m = MatrixQ::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.set(i, j, small(rng, bound));
            }
        }
        m
    }

    pub fn cochain(rng: &mut TestRng, rank: usize, degree: usize, fiber: usize, bound: i64) -> Cochain {
        let z = Cochain::zero(rank, degree, fiber);
        let n = z.values.len();
        Cochain::from_values(rank, degree, fiber, vector(rng, n, bound))
    }

    /// Random combination of the given vectors with small integer coefficients.
    pub fn combination(rng: &mut TestRng, basis: &[Vector], dim: usize, bound: i64) -> Vector {
        let mut v = vec![q(0); dim];
        for b in basis {
            let c = small(rng, bound);
            crate::linalg::add_scaled(&mut v, &c, b);
        }
        v
    }
}

/// Couplings and extensions used throughout the tests.
pub mod extensions {
    use crate::extension::{build_extension, Coupling, ExtensionStructure, LiftingPair};
    use crate::linalg::{q, MatrixQ, Rational};
    use crate::lr::{Cochain, Connection, Derivation, FirstOrderOp, LieRinehart};

    /// The zero outer action.
    pub fn trivial_coupling(b: &LieRinehart, l: &LieRinehart) -> Coupling {
        let ops = Connection::zero(b.rank, l.dim(), b.base_dim()).ops;
        Coupling::new(b.clone(), l.clone(), ops).expect("zero coupling is valid")
    }

    /// `B = Q^2`, `L = Q`, trivial coupling, `ρ = c e1*∧e2*`.
    pub fn plane_line(c: Rational) -> (Coupling, ExtensionStructure) {
        let cp = trivial_coupling(&super::abelian(2), &super::abelian(1));
        let mut rho = Cochain::zero(2, 2, 1);
        rho.set_on_generators(&[0, 1], &[c]);
        let pair = LiftingPair { alpha: Connection::zero(2, 1, 1), rho };
        let e = build_extension(&cp, &pair).expect("no 3-forms on Q^2");
        (cp, e)
    }

    /// `heis3` seen as the extension of `Q^2` by its center.
    pub fn heis3_over_plane() -> ExtensionStructure {
        ExtensionStructure { b: super::abelian(2), l: super::abelian(1), total: super::heis3() }
    }

    /// `B = heis3`, `L = Q`, `α = e1*`, `ρ = e2*∧e3*`: the obstruction
    /// cochain is `e1*∧e2*∧e3*`.
    pub fn heis3_base_pair() -> (Coupling, LiftingPair) {
        let b = super::heis3();
        let l = super::abelian(1);
        let ops = [1, 0, 0]
            .iter()
            .map(|&x| FirstOrderOp { matrix: MatrixQ::from_rows(1, &[vec![q(x)]]), symbol: Derivation::zero(1) })
            .collect::<Vec<_>>();
        let c = Coupling::new(b, l, ops.clone()).expect("e1* is a character of heis3");
        let mut rho = Cochain::zero(3, 2, 1);
        rho.set_on_generators(&[1, 2], &[q(1)]);
        (c, LiftingPair { alpha: Connection { ops }, rho })
    }

    /// The derivation of `heis3` acting by the 2x2 matrix `a` on `(e1, e2)`,
    /// by `tr a` on `e3`, plus `e1 ↦ x e3`, `e2 ↦ y e3`.
    pub fn heis3_derivation(a: [[i64; 2]; 2], x: i64, y: i64) -> FirstOrderOp {
        let mut m = MatrixQ::zeros(3, 3);
        for i in 0..2 {
            for j in 0..2 {
                m.set(i, j, q(a[i][j]));
            }
        }
        m.set(2, 2, q(a[0][0] + a[1][1]));
        m.set(2, 0, q(x));
        m.set(2, 1, q(y));
        FirstOrderOp { matrix: m, symbol: Derivation::zero(1) }
    }
}

/// Nerves and nerve couplings for the Čech layer.
pub mod nerves {
    use std::collections::BTreeMap;

    use rand::Rng;

    use super::extensions::{heis3_derivation, trivial_coupling};
    use super::random::{cochain, vector, TestRng};
    use crate::cech::{build_lifting_triple, LiftingTriple, Nerve, NerveCoupling};
    use crate::extension::Coupling;
    use crate::lr::{Derivation, FirstOrderOp};

    pub fn edge() -> Nerve {
        Nerve::from_maximal(2, &[vec![0, 1]])
    }

    pub fn triangle() -> Nerve {
        Nerve::from_maximal(3, &[vec![0, 1, 2]])
    }

    /// Three edges with no 2-simplex.
    pub fn circle() -> Nerve {
        Nerve::from_maximal(3, &[vec![0, 1], vec![1, 2], vec![0, 2]])
    }

    /// Two triangles sharing the edge `[1, 2]`.
    pub fn two_triangles() -> Nerve {
        Nerve::from_maximal(4, &[vec![0, 1, 2], vec![1, 2, 3]])
    }

    pub fn tetrahedron() -> Nerve {
        Nerve::from_maximal(4, &[vec![0, 1, 2, 3]])
    }

    pub fn all() -> Vec<Nerve> {
        vec![Nerve::point(), edge(), triangle(), circle(), two_triangles(), tetrahedron()]
    }

    /// An outer action of `heis3` on `heis3`.
    pub fn heis_on_heis() -> Coupling {
        let ops = vec![
            heis3_derivation([[0, 1], [0, 0]], 2, -1),
            heis3_derivation([[1, 0], [0, 1]], 0, 3),
            heis3_derivation([[0, 0], [0, 0]], 1, 1),
        ];
        Coupling::new(super::heis3(), super::heis3(), ops).expect("valid coupling")
    }

    /// The coupling with each representative shifted by `ad` of a random element.
    pub fn inner_shift(rng: &mut TestRng, c: &Coupling) -> Coupling {
        let n = c.l.dim();
        let outer = c
            .outer
            .iter()
            .map(|op| FirstOrderOp {
                matrix: op.matrix.add(&c.l.ad_matrix(&vector(rng, n, 2))),
                symbol: Derivation { matrix: op.symbol.matrix.clone() },
            })
            .collect();
        Coupling::new(c.b.clone(), c.l.clone(), outer).expect("inner shifts preserve validity")
    }

    /// A random nerve with at most four vertices and vertex couplings that
    /// differ from a base coupling by inner derivations.
    pub fn random_nerve_coupling(rng: &mut TestRng) -> NerveCoupling {
        let nerves = all();
        let nerve = nerves[rng.gen_range(0..nerves.len())].clone();
        let base = match rng.gen_range(0..5) {
            0 => heis_on_heis(),
            1 => trivial_coupling(&super::abelian(2), &super::abelian(rng.gen_range(1..=3))),
            2 => trivial_coupling(&super::heis3(), &super::abelian(rng.gen_range(1..=2))),
            3 => trivial_coupling(&super::abelian(3), &super::heis3()),
            _ => super::extensions::heis3_base_pair().0,
        };
        let local = (0..nerve.vertex_count).map(|_| inner_shift(rng, &base)).collect();
        NerveCoupling::new(nerve, local).expect("inner shifts agree modulo ad")
    }

    /// Random local section changes `η_i`, central `z_i` and `m_ij`.
    pub fn random_perturbation(rng: &mut TestRng, nc: &NerveCoupling, lt: &LiftingTriple) -> LiftingTriple {
        let rank = nc.base_rank();
        let nl = nc.local[0].l.dim();
        let zdim = nc.center_dim();
        let eta: Vec<_> = (0..nc.nerve.vertex_count).map(|_| cochain(rng, rank, 1, nl, 2)).collect();
        let z: BTreeMap<_, _> =
            nc.nerve.simplices(0).iter().map(|s| (s.clone(), cochain(rng, rank, 2, zdim, 2))).collect();
        let m: BTreeMap<_, _> =
            nc.nerve.simplices(1).iter().map(|s| (s.clone(), cochain(rng, rank, 1, zdim, 2))).collect();
        lt.perturb(nc, &eta, &z, &m)
    }

    /// A random nerve coupling with a randomly perturbed lifting triple.
    pub fn random_lifting_triple(rng: &mut TestRng) -> (NerveCoupling, LiftingTriple) {
        let nc = random_nerve_coupling(rng);
        let lt = build_lifting_triple(&nc).expect("compatible couplings lift");
        let lt = random_perturbation(rng, &nc, &lt);
        (nc, lt)
    }
}
