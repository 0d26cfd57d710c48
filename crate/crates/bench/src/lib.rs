//! Inputs shared by the benchmarks.

use algebroid_core::cech::NerveCoupling;
use algebroid_core::extension::{build_extension, lift_coupling, ExtensionStructure};
use algebroid_core::fixtures::nerves;

pub fn heis_on_heis_extension() -> ExtensionStructure {
    let c = nerves::heis_on_heis();
    build_extension(&c, &lift_coupling(&c).expect("fixture lifts")).expect("fixture is unobstructed")
}

pub fn heis_on_triangle() -> NerveCoupling {
    NerveCoupling::constant(nerves::triangle(), nerves::heis_on_heis())
}
