//! Deterministic seed derivation.
//!
//! Every randomized component (instance generator, prior sampler, conditional
//! noise) takes its own seed. When a whole experiment is driven from a single
//! root seed, sub-seeds are derived with [`derive_seed`]: stream `i` of root
//! `r` is `splitmix64(r ^ (i + 1) * GOLDEN)`. The rule is fixed so that runs
//! are reproducible from one number.

/// SplitMix64 finalizer. Bijective on `u64`, good avalanche behavior.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derive the seed for an independent random stream from a root seed.
pub fn derive_seed(root: u64, stream: u64) -> u64 {
    splitmix64(root ^ stream.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// FNV-1a over a list of words; used to key per-edge noise draws.
pub(crate) fn fnv1a64(words: &[u64]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for w in words {
        for byte in w.to_le_bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    h
}
