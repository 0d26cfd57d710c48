use algebroid_core::extension::*;
use algebroid_core::fixtures::extensions::{
    heis3_base_pair, heis3_derivation, heis3_over_plane, plane_line, trivial_coupling,
};
use algebroid_core::fixtures::{self, random};
use algebroid_core::linalg::{q, MatrixQ, Rational};
use algebroid_core::lr::*;

/// `B = heis3`, `L = heis3`, `ᾱ(e1) = E`, `ᾱ(e2) = I`, `ᾱ(e3) = 0` in `gl2 = Out(heis3)`,
/// with inner parts added to the representatives.
fn heis_on_heis() -> Coupling {
    let ops = vec![
        heis3_derivation([[0, 1], [0, 0]], 2, -1),
        heis3_derivation([[1, 0], [0, 1]], 0, 3),
        heis3_derivation([[0, 0], [0, 0]], 1, 1),
    ];
    Coupling::new(fixtures::heis3(), fixtures::heis3(), ops).unwrap()
}

fn lambda_l(c: &Coupling, p: &LiftingPair) -> Cochain {
    c.d_alpha(&p.alpha, &p.rho)
}

#[test]
fn lift_for_abelian_kernel_is_flat() {
    let mut x = MatrixQ::zeros(2, 2);
    x.set(0, 1, q(1));
    let ops = vec![x.clone(), x.scale(&q(2))]
        .into_iter()
        .map(|m| FirstOrderOp { matrix: m, symbol: Derivation::zero(1) })
        .collect();
    let c = Coupling::new(fixtures::abelian(2), fixtures::abelian(2), ops).unwrap();
    let p = lift_coupling(&c).unwrap();
    assert!(p.rho.is_zero());
    assert!(curvature(&c.b, &p.alpha, &c.l_module()).is_zero());
    assert!(c.check_pair(&p).is_empty());
}

#[test]
fn lift_of_zero_coupling_is_zero() {
    let c = trivial_coupling(&fixtures::abelian(2), &fixtures::heis3());
    let p = lift_coupling(&c).unwrap();
    assert!(p.rho.is_zero());
    assert!(p.alpha.ops.iter().all(|o| o.matrix.is_zero()));
}

#[test]
fn lift_of_outer_class_on_line() {
    let op = heis3_derivation([[1, 0], [0, 0]], 0, 0);
    let c = Coupling::new(fixtures::abelian(1), fixtures::heis3(), vec![op]).unwrap();
    let p = lift_coupling(&c).unwrap();
    assert!(c.check_pair(&p).is_empty());
    assert!(!c.subobjects.is_inner(&p.alpha.ops[0]));
}

#[test]
fn invalid_coupling_is_rejected() {
    // ᾱ(e1) = H, ᾱ(e2) = E on abelian B does not preserve brackets modulo ad
    let ops = vec![heis3_derivation([[1, 0], [0, -1]], 0, 0), heis3_derivation([[0, 1], [0, 0]], 0, 0)];
    let err = Coupling::new(fixtures::abelian(2), fixtures::heis3(), ops).unwrap_err();
    assert!(matches!(err, ExtensionError::InvalidCoupling(_)));
}

#[test]
fn obstruction_cochain_examples() {
    let (c, p) = heis3_base_pair();
    assert!(c.check_pair(&p).is_empty());
    let lambda = obstruction_cochain(&c, &p).unwrap();
    assert_eq!(lambda.on_generators(&[0, 1, 2]), vec![q(1)]);

    let zero_rho = LiftingPair { alpha: p.alpha.clone(), rho: Cochain::zero(3, 2, 1) };
    assert!(obstruction_cochain(&c, &zero_rho).unwrap().is_zero());

    let closed = LiftingPair {
        alpha: Connection::zero(3, 1, 1),
        rho: {
            let mut r = Cochain::zero(3, 2, 1);
            r.set_on_generators(&[0, 2], &[q(1)]);
            r
        },
    };
    let c0 = trivial_coupling(&fixtures::heis3(), &fixtures::abelian(1));
    assert!(c0.d_alpha(&closed.alpha, &closed.rho).is_zero());
    assert!(obstruction_cochain(&c0, &closed).unwrap().is_zero());
}

#[test]
fn heis3_base_obstruction_class_vanishes() {
    let (c, p) = heis3_base_pair();
    let zc = c.center_connection(&p.alpha);
    let h3 = cohomology(&c.b, &zc, c.center_module(), 3).unwrap();
    let lambda = obstruction_cochain(&c, &p).unwrap();
    assert_eq!(h3.class_of(&lambda.values).unwrap(), vec![Rational::from_integer(0.into()); h3.dim()]);
    // ρ itself is central, so ρ' = ρ - ρ = 0 also lifts
    assert_eq!(c.d_center(&p.alpha, &c.to_center(&p.rho).unwrap()), lambda);
    let ob = obstruction_class(&c).unwrap();
    assert!(ob.is_zero());
    assert!(ob.independent_of_pair);
}

#[test]
fn obstruction_class_of_abelian_flat_coupling_is_zero() {
    let c = trivial_coupling(&fixtures::abelian(3), &fixtures::abelian(2));
    let ob = obstruction_class(&c).unwrap();
    assert!(ob.is_zero());
    assert!(ob.witness.is_some());
}

#[test]
fn change_of_pair_keeps_obstruction() {
    let c = heis_on_heis();
    let base = lift_coupling(&c).unwrap();
    let mut rng = random::rng(11);
    for _ in 0..20 {
        let z = random::cochain(&mut rng, 3, 2, 1, 3);
        let p = LiftingPair { alpha: base.alpha.clone(), rho: base.rho.add(&c.embed_center(&z)) };
        let phi = random::cochain(&mut rng, 3, 1, 3, 3);
        let p2 = change_lifting_pair(&c, &p, &phi);
        assert!(c.check_pair(&p2).is_empty());
        assert_eq!(lambda_l(&c, &p2), lambda_l(&c, &p));
    }
    let zero = Cochain::zero(3, 1, 3);
    assert_eq!(change_lifting_pair(&c, &base, &zero), base);
}

#[test]
fn change_of_pair_for_abelian_kernel_shifts_by_differential() {
    let (c, p) = heis3_base_pair();
    let phi = Cochain::from_values(3, 1, 1, vec![q(2), q(-1), q(5)]);
    let p2 = change_lifting_pair(&c, &p, &phi);
    assert_eq!(p2.rho, p.rho.add(&c.d_alpha(&p.alpha, &phi)));
    assert_eq!(lambda_l(&c, &p2), lambda_l(&c, &p));
}

#[test]
fn differential_shift_residual_vanishes() {
    let c = heis_on_heis();
    let p = lift_coupling(&c).unwrap();
    let mut rng = random::rng(5);
    for degree in [0, 1, 2] {
        let phi = random::cochain(&mut rng, 3, 1, 3, 3);
        let eta = random::cochain(&mut rng, 3, degree, 3, 3);
        let shifted = shift_connection(&c.l, &p.alpha, &phi);
        assert!(differential_shift_check(&c, &p.alpha, &shifted, &phi, &eta).is_zero());
        let zero = Cochain::zero(3, 1, 3);
        assert!(differential_shift_check(&c, &p.alpha, &p.alpha, &zero, &eta).is_zero());
    }
}

#[test]
fn build_abelian_direct_sum() {
    let c = trivial_coupling(&fixtures::abelian(2), &fixtures::abelian(1));
    let p = lift_coupling(&c).unwrap();
    let e = build_extension(&c, &p).unwrap();
    assert!(e.validate().is_empty());
    assert!(e.total.bracket.iter().flatten().flatten().all(|x| *x == q(0)));
}

#[test]
fn plane_by_line_with_unit_cocycle_is_heisenberg() {
    let (_, e) = plane_line(q(1));
    assert!(e.validate().is_empty());
    assert_eq!(e.total, fixtures::heis3());
}

#[test]
fn nonzero_obstruction_gives_jacobi_failure() {
    let (c, p) = heis3_base_pair();
    let f = build_extension(&c, &p).unwrap_err();
    assert_eq!(f.triple, [0, 1, 2]);
    assert_eq!(f.lambda.on_generators(&[0, 1, 2]), vec![q(1)]);
    assert!(f.jacobiator.iter().any(|x| *x != q(0)));
}

#[test]
fn equivalence_decisions() {
    let (c, e1) = plane_line(q(1));
    let (_, e2) = plane_line(q(2));
    let w = extensions_equivalent(&c, &e1, &e1).unwrap().unwrap();
    assert!(w.eta.is_zero() && w.beta.is_zero());
    assert!(extensions_equivalent(&c, &e1, &e2).unwrap().is_none());

    // over heis3 with L = Q, ρ and ρ + dβ agree
    let c = trivial_coupling(&fixtures::heis3(), &fixtures::abelian(1));
    let p0 = lift_coupling(&c).unwrap();
    let beta = Cochain::from_values(3, 1, 1, vec![q(0), q(0), q(4)]);
    let p1 = LiftingPair { alpha: p0.alpha.clone(), rho: p0.rho.add(&c.d_alpha(&p0.alpha, &beta)) };
    let (a, b) = (build_extension(&c, &p0).unwrap(), build_extension(&c, &p1).unwrap());
    let w = extensions_equivalent(&c, &a, &b).unwrap().unwrap();
    assert!(w.eta0.is_zero());
    assert_eq!(c.d_center(&p0.alpha, &w.beta), c.d_center(&p0.alpha, &beta));
    assert!(is_bracket_morphism(&w.isomorphism(&a), &b.total, &a.total));
}

#[test]
fn equivalence_for_nonabelian_kernel() {
    let c = heis_on_heis();
    let p = lift_coupling(&c).unwrap();
    let e = build_extension(&c, &p).unwrap();
    let mut rng = random::rng(21);
    for _ in 0..5 {
        let phi = random::cochain(&mut rng, 3, 1, 3, 2);
        let e2 = build_extension(&c, &change_lifting_pair(&c, &p, &phi)).unwrap();
        let w = extensions_equivalent(&c, &e, &e2).unwrap().expect("section change gives an equivalent extension");
        assert!(is_bracket_morphism(&w.isomorphism(&e), &e2.total, &e.total));
    }
}

#[test]
fn torsor_action_and_difference() {
    let (c, e0) = plane_line(q(0));
    let zero = Cochain::zero(2, 2, 1);
    let same = torsor_action(&c, &e0, &zero).unwrap();
    assert!(extensions_equivalent(&c, &e0, &same).unwrap().is_some());

    let gamma = Cochain::from_values(2, 2, 1, vec![q(1)]);
    let acted = torsor_action(&c, &e0, &gamma).unwrap();
    assert!(extensions_equivalent(&c, &acted, &heis3_over_plane()).unwrap().is_some());

    let (_, e1) = plane_line(q(1));
    let (_, e2) = plane_line(q(2));
    let d = difference_class(&c, &e1, &e2).unwrap();
    assert_eq!(d.coords, d.h2.class_of(&[q(1)]).unwrap());
    let back = difference_class(&c, &e2, &e1).unwrap();
    assert_eq!(back.coords, vec![-d.coords[0].clone()]);
    assert!(difference_class(&c, &e1, &e1).unwrap().coords.iter().all(|x| *x == q(0)));

    let round = torsor_action(&c, &e1, &d.gamma).unwrap();
    assert!(extensions_equivalent(&c, &round, &e2).unwrap().is_some());
}

#[test]
fn torsor_action_requires_closed_form() {
    // with the character e1* on heis3, d(e2*∧e3*) = e1*∧e2*∧e3*
    let (c, p) = heis3_base_pair();
    let flat = LiftingPair { alpha: p.alpha.clone(), rho: Cochain::zero(3, 2, 1) };
    let e = build_extension(&c, &flat).unwrap();
    assert_eq!(torsor_action(&c, &e, &p.rho).unwrap_err(), ExtensionError::NotClosed);
    let mut closed = Cochain::zero(3, 2, 1);
    closed.set_on_generators(&[0, 2], &[q(1)]);
    assert!(c.d_center(&p.alpha, &closed).is_zero());
    assert!(torsor_action(&c, &e, &closed).is_ok());
}

#[test]
fn splittings() {
    let (_, split) = plane_line(q(0));
    let p = splitting_to_pair(&split, &split.canonical_section()).unwrap();
    assert!(p.rho.is_zero());

    let h = heis3_over_plane();
    let p = splitting_to_pair(&h, &h.canonical_section()).unwrap();
    assert_eq!(p.rho.on_generators(&[0, 1]), vec![q(1)]);

    let bad = vec![h.total.generator(1), h.total.generator(0)];
    assert_eq!(splitting_to_pair(&h, &bad).unwrap_err(), ExtensionError::NotASection);
}

#[test]
fn section_shift_matches_change_of_pair() {
    let c = heis_on_heis();
    let p = lift_coupling(&c).unwrap();
    let e = build_extension(&c, &p).unwrap();
    let mut rng = random::rng(3);
    let phi = random::cochain(&mut rng, 3, 1, 3, 3);
    let inj = e.injection();
    let s2: Vec<_> = e
        .canonical_section()
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let mut w = v.clone();
            algebroid_core::linalg::add_scaled(&mut w, &q(1), &inj.mul_vec(&phi.on_generators(&[i])));
            w
        })
        .collect();
    let from_section = splitting_to_pair(&e, &s2).unwrap();
    assert_eq!(from_section, change_lifting_pair(&c, &p, &phi));
    // round trip through the canonical section
    assert_eq!(splitting_to_pair(&e, &e.canonical_section()).unwrap(), p);
}

/// Brute force: an extension exists iff some central correction of ρ makes
/// the bracket satisfy Jacobi.
fn brute_force_exists(c: &Coupling, p: &LiftingPair, bound: i64) -> bool {
    let zdim = c.subobjects.center.dim();
    let n = Cochain::zero(c.b.rank, 2, zdim).values.len();
    let mut coeffs = vec![-bound; n];
    loop {
        let z = Cochain::from_values(c.b.rank, 2, zdim, coeffs.iter().map(|&x| q(x)).collect());
        let cand = LiftingPair { alpha: p.alpha.clone(), rho: p.rho.add(&c.embed_center(&z)) };
        if build_extension(c, &cand).is_ok() {
            return true;
        }
        let mut k = 0;
        loop {
            if k == n {
                return false;
            }
            coeffs[k] += 1;
            if coeffs[k] <= bound {
                break;
            }
            coeffs[k] = -bound;
            k += 1;
        }
    }
}

#[test]
fn obstruction_scan_matches_brute_force() {
    let gl2 =
        [[[0, 0], [0, 0]], [[1, 0], [0, 1]], [[1, 0], [0, 0]], [[0, 1], [0, 0]], [[0, 0], [1, 0]], [[1, 0], [0, -1]]];
    let bases = [fixtures::abelian(2), fixtures::abelian(3), fixtures::heis3()];
    let mut checked = 0;
    for b in &bases {
        for (k, _) in gl2.iter().enumerate().take(if b.rank == 2 { 6 } else { 4 }) {
            for j in 0..gl2.len() {
                let mut ops = vec![heis3_derivation(gl2[k], 0, 0), heis3_derivation(gl2[j], 1, 0)];
                if b.rank == 3 {
                    ops.push(heis3_derivation(gl2[(k + j) % 2], 0, 1));
                }
                let Ok(c) = Coupling::new(b.clone(), fixtures::heis3(), ops) else { continue };
                let ob = obstruction_class(&c).unwrap();
                assert!(ob.independent_of_pair);
                let p = lift_coupling(&c).unwrap();
                let p = LiftingPair {
                    alpha: p.alpha.clone(),
                    rho: p.rho.add(&c.embed_center(&random::cochain(&mut random::rng(checked), b.rank, 2, 1, 1))),
                };
                assert_eq!(ob.is_zero(), brute_force_exists(&c, &p, 2), "coupling {k},{j} on rank {}", b.rank);
                checked += 1;
            }
        }
    }
    assert!(checked >= 10, "only {checked} couplings were valid");
}
