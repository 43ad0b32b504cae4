//! Seeded bit source with an exact ledger of every bit drawn.
//!
//! All randomized constructions in this crate draw from [`BitLedgerRng`], so
//! the number of random bits a construction consumes is a measured quantity,
//! not an estimate. Uniform integers over a non-power-of-two range use
//! rejection sampling on fixed-width words; rejected words still count toward
//! `bits_drawn`, while the idealized per-construction ledgers (walks,
//! puncturings, generator sampling) are reported separately by their owners.

/// Odd constant from the splitmix64 generator; also used for per-trial seed
/// derivation so trial seeds are reproducible across implementations.
pub const SEED_STREAM_CONSTANT: u64 = 0x9e37_79b9_7f4a_7c15;

/// One splitmix64 finalizer round.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Per-trial seed: `master XOR (t * odd constant)`, then one mixing round.
#[inline]
pub fn derive_seed(master: u64, trial: u64) -> u64 {
    mix64(master ^ trial.wrapping_mul(SEED_STREAM_CONSTANT))
}

/// Number of bits needed to index `k` outcomes: `ceil(log2 k)`, with
/// `bits_for(1) == 0` (a singleton costs nothing to sample).
#[inline]
pub fn bits_for(k: u64) -> u32 {
    debug_assert!(k >= 1);
    if k <= 1 {
        0
    } else {
        64 - (k - 1).leading_zeros()
    }
}

/// Deterministic bit source (splitmix64 stream) with a draw counter.
#[derive(Debug, Clone)]
pub struct BitLedgerRng {
    seed: u64,
    state: u64,
    bits_drawn: u64,
    buf: u64,
    buf_len: u32,
}

impl BitLedgerRng {
    pub fn new(seed: u64) -> Self {
        BitLedgerRng {
            seed,
            state: seed,
            bits_drawn: 0,
            buf: 0,
            buf_len: 0,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Total bits handed out so far, including bits burned by rejection.
    pub fn bits_drawn(&self) -> u64 {
        self.bits_drawn
    }

    fn refill(&mut self) {
        self.state = self.state.wrapping_add(SEED_STREAM_CONSTANT);
        self.buf = mix64(self.state);
        self.buf_len = 64;
    }

    /// Draw exactly `k` bits (0..=64) as the low bits of the result.
    /// Bits are served low-to-high from each 64-bit block of the stream.
    pub fn next_bits(&mut self, k: u32) -> u64 {
        assert!(k <= 64, "at most 64 bits per draw");
        if k == 0 {
            return 0;
        }
        self.bits_drawn += u64::from(k);
        let mut out = 0u64;
        let mut got = 0u32;
        while got < k {
            if self.buf_len == 0 {
                self.refill();
            }
            let take = (k - got).min(self.buf_len);
            let chunk = self.buf & mask(take);
            self.buf = if take >= 64 { 0 } else { self.buf >> take };
            self.buf_len -= take;
            out |= chunk << got;
            got += take;
        }
        out
    }

    /// Uniform integer in `[0, k)` by rejection sampling on
    /// `bits_for(k)`-bit words.
    pub fn uniform(&mut self, k: u64) -> u64 {
        assert!(k >= 1);
        let w = bits_for(k);
        if w == 0 {
            return 0;
        }
        loop {
            let x = self.next_bits(w);
            if x < k {
                return x;
            }
        }
    }

    /// Uniform f64 in `[0, 1)` from 53 bits.
    pub fn uniform_f64(&mut self) -> f64 {
        self.next_bits(53) as f64 / (1u64 << 53) as f64
    }

    /// Fisher-Yates shuffle driven by this bit source.
    pub fn shuffle<T>(&mut self, xs: &mut [T]) {
        for i in (1..xs.len()).rev() {
            let j = self.uniform(i as u64 + 1) as usize;
            xs.swap(i, j);
        }
    }
}

#[inline]
fn mask(bits: u32) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_seeds_replay() {
        let mut a = BitLedgerRng::new(42);
        let mut b = BitLedgerRng::new(42);
        for k in [1u64, 2, 3, 7, 16, 100, 1 << 40] {
            assert_eq!(a.uniform(k), b.uniform(k));
        }
        assert_eq!(a.bits_drawn(), b.bits_drawn());
    }

    #[test]
    fn ledger_counts_every_bit() {
        let mut rng = BitLedgerRng::new(7);
        rng.next_bits(5);
        rng.next_bits(64);
        rng.next_bits(0);
        assert_eq!(rng.bits_drawn(), 69);
    }

    #[test]
    fn rejection_draws_are_counted() {
        // k = 3 uses 2-bit words; expect some rejections over many draws,
        // so bits_drawn is strictly greater than the idealized 2 per draw.
        let mut rng = BitLedgerRng::new(1);
        let draws = 10_000;
        for _ in 0..draws {
            let x = rng.uniform(3);
            assert!(x < 3);
        }
        assert!(rng.bits_drawn() > 2 * draws);
        // Idealized figure would be exactly 2 per draw.
        assert_eq!(bits_for(3), 2);
    }

    #[test]
    fn bits_for_edge_cases() {
        assert_eq!(bits_for(1), 0);
        assert_eq!(bits_for(2), 1);
        assert_eq!(bits_for(3), 2);
        assert_eq!(bits_for(4), 2);
        assert_eq!(bits_for(5), 3);
        assert_eq!(bits_for(256), 8);
        assert_eq!(bits_for(257), 9);
    }

    #[test]
    fn singleton_costs_nothing() {
        let mut rng = BitLedgerRng::new(3);
        assert_eq!(rng.uniform(1), 0);
        assert_eq!(rng.bits_drawn(), 0);
    }

    #[test]
    fn uniform_is_roughly_uniform() {
        let mut rng = BitLedgerRng::new(99);
        let mut counts = [0u64; 5];
        let trials = 50_000;
        for _ in 0..trials {
            counts[rng.uniform(5) as usize] += 1;
        }
        for &c in &counts {
            let expected = trials as f64 / 5.0;
            assert!((c as f64 - expected).abs() < 5.0 * expected.sqrt());
        }
    }

    #[test]
    fn derive_seed_is_stable() {
        // Frozen values: the derivation must stay bit-compatible so reports
        // can be replayed across versions.
        assert_eq!(derive_seed(0, 0), 0);
        assert_ne!(derive_seed(0, 1), derive_seed(0, 2));
        assert_eq!(derive_seed(0xdead_beef, 5), {
            mix64(0xdead_beef ^ 5u64.wrapping_mul(SEED_STREAM_CONSTANT))
        });
    }
}
