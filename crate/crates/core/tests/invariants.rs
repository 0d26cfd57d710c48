use algebroid_core::atiyah::build_p1_model;
use algebroid_core::cech::{obstruction_triple, verify_cocycle};
use algebroid_core::extension::{build_extension, difference_class, lift_coupling};
use algebroid_core::fixtures::extensions::{heis3_over_plane, plane_line};
use algebroid_core::fixtures::nerves::{heis_on_heis, random_lifting_triple, random_nerve_coupling};
use algebroid_core::fixtures::random;
use algebroid_core::io::{parse_document, to_json, Document, NerveCouplingFile};
use algebroid_core::linalg::{format_rational, parse_rational, Rational};
use algebroid_core::spectral::{decompose_differential, reassemble, split_form, splitting_change, Splitting};
use algebroid_core::Cochain;
use num_bigint::BigInt;
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (-1000i64..1000, 1i64..60).prop_map(|(n, d)| Rational::new(BigInt::from(n), BigInt::from(d)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rational_strings_round_trip(x in rational()) {
        prop_assert_eq!(parse_rational(&format_rational(&x)), Some(x));
    }

    #[test]
    fn nerve_coupling_documents_round_trip(seed in 0u64..5_000) {
        let nc = random_nerve_coupling(&mut random::rng(seed));
        let doc = Document::NerveCoupling(NerveCouplingFile::from_nerve_coupling(&nc));
        let text = to_json(&doc);
        let parsed = parse_document(&text).unwrap();
        prop_assert_eq!(&parsed, &doc);
        let Document::NerveCoupling(file) = parsed else { unreachable!() };
        let again = NerveCouplingFile::from_nerve_coupling(&file.to_nerve_coupling().unwrap());
        prop_assert_eq!(to_json(&Document::NerveCoupling(again)), text);
    }

    #[test]
    fn obstruction_triples_are_cocycles(seed in 0u64..5_000) {
        let (nc, lt) = random_lifting_triple(&mut random::rng(seed));
        let ot = obstruction_triple(&nc, &lt).unwrap();
        prop_assert!(verify_cocycle(&nc, &ot).is_cocycle());
    }

    #[test]
    fn differential_decomposes_along_any_splitting(seed in 0u64..5_000, k in 0usize..4) {
        let e = heis3_over_plane();
        let mut rng = random::rng(seed);
        let s = Splitting { sigma: random::cochain(&mut rng, 2, 1, 1, 4) };
        let xi = random::cochain(&mut rng, 3, k, 1, 4);
        prop_assert!(decompose_differential(&e, &s, &xi).iter().all(Cochain::is_zero));
        let parts = split_form(&e, &s, &xi);
        prop_assert_eq!(reassemble(&e, &s, k, &parts).unwrap(), xi.clone());
        let phi = random::cochain(&mut rng, 2, 1, 1, 4);
        prop_assert!(splitting_change(&e, &s, &phi, &xi).iter().all(Cochain::is_zero));
    }

    #[test]
    fn difference_classes_add(a in rational(), b in rational(), c in rational()) {
        let (cp, ea) = plane_line(a);
        let (_, eb) = plane_line(b);
        let (_, ec) = plane_line(c);
        let ab = difference_class(&cp, &ea, &eb).unwrap().coords;
        let bc = difference_class(&cp, &eb, &ec).unwrap().coords;
        let ac = difference_class(&cp, &ea, &ec).unwrap().coords;
        prop_assert_eq!(&ab[0] + &bc[0], ac[0].clone());
    }

    #[test]
    fn p1_total_differential_squares_to_zero(n in -3i64..=3, extra in 0usize..2) {
        let d = algebroid_core::atiyah::required_truncation(n) + extra;
        let (m, data) = build_p1_model(n, d).unwrap();
        prop_assert!(m.total.complex.is_complex());
        prop_assert_eq!(data.chern_coordinate, Rational::from_integer(BigInt::from(n)));
    }
}

#[test]
fn nonabelian_extension_survives_document_round_trip() {
    use algebroid_core::io::ExtensionFile;
    let c = heis_on_heis();
    let e = build_extension(&c, &lift_coupling(&c).unwrap()).unwrap();
    let doc = Document::Extension(ExtensionFile::from_extension(&e));
    let Document::Extension(file) = parse_document(&to_json(&doc)).unwrap() else { panic!("wrong kind") };
    assert_eq!(file.to_extension().unwrap().total, e.total);
}
