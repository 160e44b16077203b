//! Stable seed derivation.
//!
//! Replication seeds are pure functions of (base seed, setting fingerprint,
//! replication index), so any subset of the grid can run in any order, on
//! any thread count, and produce identical streams.

/// SplitMix64 finalizer; full-period mixing of a 64-bit state.
pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Combine a seed with a label; order-sensitive and stable across builds.
pub fn mix(seed: u64, label: u64) -> u64 {
    splitmix64(seed ^ splitmix64(label))
}

/// FNV-1a over bytes; used to fold string fingerprints into seeds.
pub fn hash_str(s: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.as_bytes() {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}
