use std::collections::BTreeMap;

use algebroid_core::cech::{
    build_lifting_triple, global_obstruction_class, glue_extension, glued_equivalent, obstruction_triple,
    torsor_action_global, verify_cocycle, CechError, Nerve, NerveCoupling, SheafData, Trivialization,
};
use algebroid_core::extension::{is_bracket_morphism, obstruction_class, shear_map};
use algebroid_core::fixtures::extensions::trivial_coupling;
use algebroid_core::fixtures::nerves::{self, heis_on_heis, inner_shift, random_lifting_triple};
use algebroid_core::fixtures::{self, random};
use algebroid_core::linalg::{q, MatrixQ};
use algebroid_core::Cochain;

#[test]
fn constant_sheaf_cohomology() {
    let circle = SheafData::constant(&nerves::circle(), 1).cech_complex().unwrap();
    assert_eq!(circle.betti(), vec![1, 1]);
    let triangle = SheafData::constant(&nerves::triangle(), 2).cech_complex().unwrap();
    assert_eq!(triangle.betti(), vec![2, 0, 0]);
    let two = SheafData::constant(&Nerve::from_maximal(2, &[]), 1).cech_complex().unwrap();
    assert_eq!(two.betti(), vec![2]);
}

#[test]
fn twisted_restriction_kills_loop_cohomology() {
    // A Möbius-type local system on the circle: restriction by -1 on one edge.
    let mut s = SheafData::constant(&nerves::circle(), 1);
    s.restrictions.insert((vec![2], vec![0, 2]), MatrixQ::identity(1).scale(&q(-1)));
    assert_eq!(s.cech_complex().unwrap().betti(), vec![0, 0]);
}

#[test]
fn missing_restriction_is_reported() {
    let mut s = SheafData::constant(&nerves::edge(), 1);
    s.restrictions.remove(&(vec![0], vec![0, 1]));
    assert_eq!(
        s.cech_differential(0).unwrap_err(),
        CechError::MissingRestriction { face: vec![0], simplex: vec![0, 1] }
    );
}

#[test]
fn functoriality_defect_detected() {
    let mut s = SheafData::constant(&nerves::triangle(), 1);
    assert!(s.functoriality_defects().is_empty());
    s.restrictions.insert((vec![1], vec![1, 2]), MatrixQ::identity(1).scale(&q(3)));
    assert!(!s.functoriality_defects().is_empty());
}

#[test]
fn double_complex_commutes() {
    let nc = NerveCoupling::constant(nerves::two_triangles(), heis_on_heis());
    let dc = nc.double_complex();
    assert!(dc.defects().is_empty());
    assert!(nc.truncated_total().complex.is_complex());
}

#[test]
fn point_nerve_matches_local_obstruction() {
    for c in [heis_on_heis(), fixtures::extensions::heis3_base_pair().0] {
        let local = obstruction_class(&c).unwrap();
        let nc = NerveCoupling::constant(Nerve::point(), c);
        let global = global_obstruction_class(&nc).unwrap();
        assert_eq!(global.h3.dim(), local.h3.dim());
        assert_eq!(global.is_zero(), local.is_zero());
    }
}

#[test]
fn contractible_nerve_does_not_change_hypercohomology() {
    let c = heis_on_heis();
    let h_point = NerveCoupling::constant(Nerve::point(), c.clone()).truncated_total().complex.betti();
    for n in [nerves::edge(), nerves::triangle(), nerves::tetrahedron()] {
        let h = NerveCoupling::constant(n, c.clone()).truncated_total().complex.betti();
        assert_eq!(h[..4], h_point[..4]);
    }
}

#[test]
fn circle_adds_loop_classes() {
    // B = Q^2 acting trivially on L = Q: H^*(B) = (1, 2, 1), so the truncated
    // hypercohomology over a circle is H^{≥1}(B) ⊕ H^{≥1}(B)[-1].
    let c = trivial_coupling(&fixtures::abelian(2), &fixtures::abelian(1));
    let h = NerveCoupling::constant(nerves::circle(), c).truncated_total().complex.betti();
    assert_eq!(h[..4], [0, 2, 3, 1]);
}

#[test]
fn random_lifting_triples_give_cocycles() {
    let mut rng = random::rng(11);
    for _ in 0..30 {
        let (nc, lt) = random_lifting_triple(&mut rng);
        assert!(lt.check(&nc).is_empty());
        let ot = obstruction_triple(&nc, &lt).unwrap();
        assert!(verify_cocycle(&nc, &ot).is_cocycle());
    }
}

#[test]
fn corrupted_triple_fails_cocycle_check() {
    let nc = NerveCoupling::constant(nerves::triangle(), heis_on_heis());
    let lt = build_lifting_triple(&nc).unwrap();
    let mut ot = obstruction_triple(&nc, &lt).unwrap();
    let t01 = ot.t.get_mut(&vec![0, 1]).unwrap();
    t01.values[0] += q(1);
    let report = verify_cocycle(&nc, &ot);
    assert!(!report.is_cocycle());
    assert_eq!(report.residuals[2], vec![vec![0, 1, 2]]);
}

#[test]
fn glued_extension_from_trivialization() {
    let mut rng = random::rng(5);
    let base = heis_on_heis();
    let local = (0..4).map(|_| inner_shift(&mut rng, &base)).collect();
    let nc = NerveCoupling::new(nerves::two_triangles(), local).unwrap();
    let ob = global_obstruction_class(&nc).unwrap();
    assert!(ob.is_zero());
    assert!(ob.independent_of_triple);
    let g = glue_extension(&nc, &ob.lifting, ob.trivialization.as_ref().unwrap()).unwrap();
    assert!(g.validate().is_empty(), "{:?}", g.validate());
    let ot = obstruction_triple(&nc, &g.triple).unwrap();
    assert!(ot.lambda.values().chain(ot.t.values()).chain(ot.q.values()).all(Cochain::is_zero));
}

#[test]
fn wrong_trivialization_rejected() {
    let (c, pair) = fixtures::extensions::heis3_base_pair();
    let nc = NerveCoupling::constant(nerves::edge(), c);
    let mut lt = build_lifting_triple(&nc).unwrap();
    lt.pairs[0] = pair;
    let err = glue_extension(&nc, &lt, &Trivialization::default()).unwrap_err();
    assert_eq!(err, CechError::TrivializationInvalid { equation: 1 });
}

#[test]
fn incompatible_couplings_rejected() {
    let a = trivial_coupling(&fixtures::abelian(1), &fixtures::abelian(1));
    let op = algebroid_core::lr::FirstOrderOp {
        matrix: MatrixQ::identity(1),
        symbol: algebroid_core::lr::Derivation::zero(1),
    };
    let b = algebroid_core::extension::Coupling::new(fixtures::abelian(1), fixtures::abelian(1), vec![op]).unwrap();
    assert_eq!(NerveCoupling::new(nerves::edge(), vec![a, b]).unwrap_err(), CechError::IncompatibleCouplings(0, 1));
}

fn glued_plane_line_circle() -> (NerveCoupling, algebroid_core::cech::GluedExtension) {
    let c = trivial_coupling(&fixtures::abelian(2), &fixtures::abelian(1));
    let nc = NerveCoupling::constant(nerves::circle(), c);
    let ob = global_obstruction_class(&nc).unwrap();
    let g = glue_extension(&nc, &ob.lifting, ob.trivialization.as_ref().unwrap()).unwrap();
    (nc, g)
}

fn forms(nc: &NerveCoupling, p: usize, deg: usize, v: &[algebroid_core::Rational]) -> BTreeMap<Vec<usize>, Cochain> {
    let fdim = Cochain::zero(nc.base_rank(), deg, nc.center_dim()).values.len();
    nc.nerve
        .simplices(p)
        .iter()
        .enumerate()
        .map(|(k, s)| {
            (
                s.clone(),
                Cochain::from_values(nc.base_rank(), deg, nc.center_dim(), v[k * fdim..(k + 1) * fdim].to_vec()),
            )
        })
        .collect()
}

#[test]
fn global_torsor_action_by_exact_element_is_equivalent() {
    let (nc, g) = glued_plane_line_circle();
    let tc = nc.truncated_total();
    let mut rng = random::rng(3);
    let zeta = random::vector(&mut rng, tc.complex.dim(1), 3);
    let y = tc.complex.diff(1).mul_vec(&zeta);
    let gamma = forms(&nc, 0, 2, &tc.extract(2, &y, 0));
    let psi = forms(&nc, 1, 1, &tc.extract(2, &y, 1));
    let g2 = torsor_action_global(&nc, &g, &gamma, &psi).unwrap();
    assert!(g2.validate().is_empty());
    let etas = glued_equivalent(&nc, &g, &g2).unwrap().expect("exact action is trivial");
    let isos: Vec<MatrixQ> = etas.iter().enumerate().map(|(i, e)| shear_map(&g.local[i], e)).collect();
    for (i, f) in isos.iter().enumerate() {
        assert!(is_bracket_morphism(f, &g2.local[i].total, &g.local[i].total));
    }
    for (e, g_ij) in &g.gluing {
        assert_eq!(g_ij.mul(&isos[e[1]]), isos[e[0]].mul(&g2.gluing[e]));
    }
}

#[test]
fn global_torsor_action_by_nonzero_class_is_inequivalent() {
    let (nc, g) = glued_plane_line_circle();
    let tc = nc.truncated_total();
    let h2 = tc.complex.cohomology(2);
    assert_eq!(h2.dim(), 3);
    for k in 0..3 {
        let mut coords = vec![q(0); 3];
        coords[k] = q(1);
        let y = h2.lift(&coords);
        let gamma = forms(&nc, 0, 2, &tc.extract(2, &y, 0));
        let psi = forms(&nc, 1, 1, &tc.extract(2, &y, 1));
        let g2 = torsor_action_global(&nc, &g, &gamma, &psi).unwrap();
        assert!(g2.validate().is_empty());
        assert!(glued_equivalent(&nc, &g, &g2).unwrap().is_none());
    }
}

#[test]
fn global_torsor_action_requires_closed_element() {
    let (nc, g) = glued_plane_line_circle();
    let mut gamma = BTreeMap::new();
    let mut c = Cochain::zero(2, 2, 1);
    c.values[0] = q(1);
    gamma.insert(vec![0], c);
    assert_eq!(torsor_action_global(&nc, &g, &gamma, &BTreeMap::new()).unwrap_err(), CechError::NotClosed);
}
