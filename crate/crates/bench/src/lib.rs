//! Fixtures shared by the benchmarks.

use kpzlab_core::percsim::{conditioned_clusters, PercConfig, PerimeterSet};

/// Accessible perimeter of the first conditioned cluster found on fields of
/// the given side.
pub fn first_perimeter(side: usize, seed: u64) -> PerimeterSet {
    let config = PercConfig::new(side, 1, seed);
    (0..config.max_fields)
        .find_map(|field| conditioned_clusters(&config, field).ok()?.into_iter().next())
        .map(|(_, _, ep)| ep)
        .expect("a conditioned cluster within the field budget")
}
