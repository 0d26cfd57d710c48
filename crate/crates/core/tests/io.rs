use algebroid_core::cech::NerveCoupling;
use algebroid_core::fixtures::extensions::{heis3_base_pair, heis3_over_plane};
use algebroid_core::fixtures::nerves::{heis_on_heis, triangle};
use algebroid_core::fixtures::{abelian, heis3, sl2, sl2_plus_line};
use algebroid_core::io::*;

fn round_trip(doc: &Document) -> Document {
    parse_document(&to_json(doc)).unwrap()
}

#[test]
fn algebras_round_trip() {
    for a in [heis3(), sl2(), sl2_plus_line(), abelian(2)] {
        let doc = Document::Algebra(AlgebraFile::from_algebra(&a));
        let Document::Algebra(f) = round_trip(&doc) else { panic!("kind changed") };
        assert_eq!(f.to_algebra().unwrap(), a);
    }
}

#[test]
fn couplings_and_extensions_round_trip() {
    let (c, _) = heis3_base_pair();
    let Document::Coupling(f) = round_trip(&Document::Coupling(CouplingFile::from_coupling(&c))) else { panic!() };
    let back = f.to_coupling().unwrap();
    assert_eq!((back.b, back.l, back.outer), (c.b.clone(), c.l.clone(), c.outer.clone()));

    let e = heis3_over_plane();
    let Document::Extension(f) = round_trip(&Document::Extension(ExtensionFile::from_extension(&e))) else { panic!() };
    assert_eq!(f.to_extension().unwrap(), e);

    let nc = NerveCoupling::constant(triangle(), heis_on_heis());
    let file = NerveCouplingFile::from_nerve_coupling(&nc);
    assert_eq!(file.maximal, vec![vec![0, 1, 2]]);
    let Document::NerveCoupling(f) = round_trip(&Document::NerveCoupling(file)) else { panic!() };
    assert_eq!(f.to_nerve_coupling().unwrap().nerve, nc.nerve);
}

#[test]
fn numbers_are_exact_strings() {
    let json = to_json(&Document::Algebra(AlgebraFile::from_algebra(&heis3())));
    assert!(json.contains("\"kind\": \"algebra\""));
    assert!(json.contains("\"1\""));
    assert!(!json.contains("1.0"));
}

#[test]
fn malformed_input_is_located() {
    assert!(matches!(parse_document("  \n"), Err(IoError::Empty)));
    match parse_document("{\n  \"kind\": \"algebra\",\n  \"rank\": oops\n}") {
        Err(IoError::Parse { line, .. }) => assert_eq!(line, 3),
        other => panic!("{other:?}"),
    }
    let mut f = AlgebraFile::from_algebra(&heis3());
    f.brackets[0].value[0] = "1/0".into();
    assert!(matches!(f.to_algebra(), Err(IoError::Number(_))));
    let mut f = AlgebraFile::from_algebra(&heis3());
    f.anchors.pop();
    assert!(matches!(f.to_algebra(), Err(IoError::Shape { .. })));
}
