//! Shared knobs for the exhaustive verifiers.
//!
//! Every exhaustive search in this crate has a hard feasibility budget; past
//! it the caller either gets an `Infeasible` error or must opt in to a
//! randomized fallback, whose results are always flagged non-exhaustive.

/// How a combinatorial verifier should search its space.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    /// Scan the whole space; error out if it exceeds the budget.
    Exhaustive,
    /// Randomized fallback: check `samples` random candidates using the
    /// given seed. A pass under this mode is NOT a proof.
    Sampled { samples: u64, seed: u64 },
}

/// Cap on materialized codeword enumerations (q^k).
pub const CODEWORD_CACHE_CAP: u64 = 1 << 20;

/// Cap on Hamming-ball center scans (q^n).
pub const CENTER_SCAN_CAP: u64 = 1 << 20;

/// Cap on subset scans (binomial(|C|, t)).
pub const SUBSET_SCAN_CAP: u128 = 1 << 24;

/// Cap on scalar-representative weight enumerations ((q^k - 1) / (q - 1)).
pub const WEIGHT_ENUM_CAP: u64 = 1 << 22;

/// Cap on bias scans (q^k * (q-1) * m elementary character evaluations).
pub const BIAS_OPS_CAP: u128 = 1 << 30;

/// Cap on type-class sequence enumeration ((q^b)^n).
pub const SEQUENCE_ENUM_CAP: u128 = 1 << 22;

/// binomial(n, k), saturating at u128::MAX.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}
