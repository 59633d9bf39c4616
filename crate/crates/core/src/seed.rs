//! Deterministic derivation of independent RNG substream seeds.
//!
//! Every randomized routine in this crate takes one master seed and derives
//! per-worker seeds from it, so runs are reproducible regardless of how the
//! work is split (per annealing candidate, per sweep grid point, ...).

/// SplitMix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from `master` and a stream path.
///
/// Distinct paths give statistically independent streams; the same
/// `(master, path)` pair always yields the same seed.
pub fn derive_seed(master: u64, path: &[u64]) -> u64 {
    let mut h = mix(master ^ 0x6A09_E667_F3BC_C909);
    for &p in path {
        h = mix(h.wrapping_add(0x9E37_79B9_7F4A_7C15).wrapping_add(p));
    }
    h
}
