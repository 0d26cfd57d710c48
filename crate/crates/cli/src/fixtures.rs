use algebroid_core::cech::NerveCoupling;
use algebroid_core::extension::{build_extension, lift_coupling, Coupling};
use algebroid_core::fixtures::{self, extensions, nerves, random};
use algebroid_core::io::{AlgebraFile, CouplingFile, Document, ExtensionFile, NerveCouplingFile};
use algebroid_core::linalg::q;
use algebroid_core::LieRinehart;

pub const NAMES: &[&str] = &[
    "heis3",
    "heis3-corrupt",
    "sl2",
    "split",
    "heis3-base",
    "heis-on-heis",
    "plane-line",
    "heis3-over-plane",
    "sl2-plus-line",
    "split-abelian",
    "heis-triangle",
    "random-nerve",
];

fn algebra(a: &LieRinehart) -> Document {
    Document::Algebra(AlgebraFile::from_algebra(a))
}

fn coupling(c: &Coupling) -> Document {
    Document::Coupling(CouplingFile::from_coupling(c))
}

fn extension_of(c: &Coupling) -> Document {
    let e = build_extension(c, &lift_coupling(c).expect("fixture lifts")).expect("fixture is unobstructed");
    Document::Extension(ExtensionFile::from_extension(&e))
}

fn nerve_coupling(nc: &NerveCoupling) -> Document {
    Document::NerveCoupling(NerveCouplingFile::from_nerve_coupling(nc))
}

/// `heis3` with the extra bracket `[e2, e3] = e2`, which breaks Jacobi.
fn heis3_corrupt() -> LieRinehart {
    fixtures::lie_algebra_from_table(3, &[((0, 1), vec![(2, 1)]), ((1, 2), vec![(1, 1)])])
}

pub fn named(name: &str, seed: u64) -> Option<Document> {
    let doc = match name {
        "heis3" => algebra(&fixtures::heis3()),
        "heis3-corrupt" => algebra(&heis3_corrupt()),
        "sl2" => algebra(&fixtures::sl2()),
        "split" => coupling(&extensions::trivial_coupling(&fixtures::abelian(2), &fixtures::abelian(1))),
        "heis3-base" => {
            let (c, pair) = extensions::heis3_base_pair();
            Document::Coupling(CouplingFile::from_pair(&c, &pair))
        }
        "heis-on-heis" => coupling(&nerves::heis_on_heis()),
        "plane-line" => coupling(&extensions::plane_line(q(1)).0),
        "heis3-over-plane" => Document::Extension(ExtensionFile::from_extension(&extensions::heis3_over_plane())),
        "sl2-plus-line" => extension_of(&extensions::trivial_coupling(&fixtures::sl2(), &fixtures::abelian(1))),
        "split-abelian" => extension_of(&extensions::trivial_coupling(&fixtures::abelian(2), &fixtures::abelian(1))),
        "heis-triangle" => nerve_coupling(&NerveCoupling::constant(nerves::triangle(), nerves::heis_on_heis())),
        "random-nerve" => nerve_coupling(&nerves::random_nerve_coupling(&mut random::rng(seed))),
        _ => return None,
    };
    Some(doc)
}
