//! Shared fixtures for the benchmarks.

use tcoarse::{build_layers, FsPrefix, GroupSpec, SequenceSpec, SumsetLayers, Window};

/// `⊕Z/2` with the standard basis.
pub fn boolean_layers(generators: usize, depth: usize) -> SumsetLayers {
    build_layers(&GroupSpec::boolean(), &SequenceSpec::Basis, Window::new(generators, depth).unwrap()).unwrap()
}

/// `Z` with `a_n = ratio^n`.
pub fn geometric_layers(ratio: i64, generators: usize, depth: usize) -> SumsetLayers {
    let g = GroupSpec::integers();
    build_layers(&g, &SequenceSpec::geometric(ratio), Window::new(generators, depth).unwrap()).unwrap()
}

pub fn geometric_prefix(ratio: i64, len: usize) -> FsPrefix {
    FsPrefix::leading(&GroupSpec::integers(), &SequenceSpec::geometric(ratio), len).unwrap()
}
