//! Shared fixtures for the criterion benchmarks.

use reskit::deltashell::find_resonances;
use reskit::{ResonancePole, RootFindConfig, SystemParams};

/// Natural units with shell strength `lambda` and its first `n` poles.
pub fn poles(lambda: f64, n: usize) -> (SystemParams, Vec<ResonancePole>) {
    let params = SystemParams::natural(lambda);
    let poles = find_resonances(&params, n, &RootFindConfig::default())
        .expect("benchmark fixture poles must exist");
    (params, poles)
}
