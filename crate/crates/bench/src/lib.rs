//! Inputs shared by the benchmarks.

use treepin_core::{is_irreducible, random_instance, Instance};

/// First irreducible binary instance with a two-column wiretapper found by
/// scanning seeds.
pub fn irreducible_instance(vertices: usize, max_multiplicity: usize) -> Instance {
    (0u64..)
        .filter_map(|seed| random_instance(seed, vertices, max_multiplicity, 2, 2).ok())
        .find(is_irreducible)
        .expect("irreducible instances are common")
}
