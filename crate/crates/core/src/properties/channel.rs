//! Memoryless additive noise channels and the maximum-likelihood decoder
//! under a uniform codeword prior (MLDU).
//!
//! Likelihoods are accumulated in log space from the histogram of residual
//! symbols, so codewords with identical residual histograms produce
//! bit-identical log-likelihoods and ties are detected exactly. Ties break
//! to the lexicographically smallest codeword and are flagged; success-rate
//! accounting treats them as failures.

use crate::codes::LinearCode;
use crate::error::{Error, Result};
use crate::gf::{Symbol, Word};
use crate::rng::BitLedgerRng;

/// A distribution X over GF(q) describing additive noise z with
/// Pr[z_i = s] = X(s) independently per coordinate.
#[derive(Debug, Clone)]
pub struct NoiseModel {
    probs: Vec<f64>,
    log_probs: Vec<f64>,
}

impl NoiseModel {
    pub fn new(probs: Vec<f64>) -> Result<NoiseModel> {
        if probs.is_empty() {
            return Err(Error::usage("noise distribution over an empty alphabet"));
        }
        if probs.iter().any(|&p| p < 0.0 || !p.is_finite()) {
            return Err(Error::usage("noise probabilities must be nonnegative"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::usage(format!(
                "noise probabilities sum to {total}, expected 1 within 1e-12"
            )));
        }
        let log_probs = probs
            .iter()
            .map(|&p| if p == 0.0 { f64::NEG_INFINITY } else { p.ln() })
            .collect();
        Ok(NoiseModel { probs, log_probs })
    }

    /// Binary symmetric channel: flip probability p over GF(2).
    pub fn bsc(p: f64) -> Result<NoiseModel> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::usage("flip probability must lie in [0,1]"));
        }
        NoiseModel::new(vec![1.0 - p, p])
    }

    pub fn uniform(q: u32) -> Result<NoiseModel> {
        NoiseModel::new(vec![1.0 / f64::from(q); q as usize])
    }

    /// Noiseless channel: all mass on 0.
    pub fn noiseless(q: u32) -> Result<NoiseModel> {
        let mut probs = vec![0.0; q as usize];
        probs[0] = 1.0;
        NoiseModel::new(probs)
    }

    pub fn alphabet_size(&self) -> usize {
        self.probs.len()
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// One noise symbol by inverse CDF on a 53-bit uniform draw.
    pub fn sample(&self, rng: &mut BitLedgerRng) -> Symbol {
        let u = rng.uniform_f64();
        let mut acc = 0.0;
        for (s, &p) in self.probs.iter().enumerate() {
            acc += p;
            if u < acc {
                return s as Symbol;
            }
        }
        (self.probs.len() - 1) as Symbol
    }

    pub fn sample_vector(&self, n: usize, rng: &mut BitLedgerRng) -> Word {
        (0..n).map(|_| self.sample(rng)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MlduOutcome {
    pub codeword: Word,
    pub log_likelihood: f64,
    /// Another codeword achieved exactly the same likelihood.
    pub tie: bool,
}

/// Decode `received` to the codeword maximizing
/// `prod_i X(received_i - c_i)`; ties break lexicographically and are
/// flagged. Errors with `Undecodable` when every codeword has zero
/// likelihood.
pub fn mldu_decode(
    code: &LinearCode,
    received: &[Symbol],
    noise: &NoiseModel,
) -> Result<MlduOutcome> {
    let field = code.field();
    if received.len() != code.len() {
        return Err(Error::usage(format!(
            "received word length {} does not match code length {}",
            received.len(),
            code.len()
        )));
    }
    if noise.alphabet_size() != field.q() as usize {
        return Err(Error::usage(format!(
            "noise alphabet {} does not match field size {}",
            noise.alphabet_size(),
            field.q()
        )));
    }
    if let Some(&bad) = received.iter().find(|&&s| !field.contains(s)) {
        return Err(Error::NotAnElement(u32::from(bad), field.to_string()));
    }
    let words = code.distinct_codewords()?;
    let q = field.q() as usize;
    let mut hist = vec![0u64; q];
    let mut best: Option<(f64, &Word)> = None;
    let mut tie = false;
    for w in &words {
        hist.iter_mut().for_each(|h| *h = 0);
        for (&z, &c) in received.iter().zip(w) {
            hist[field.sub(z, c) as usize] += 1;
        }
        // Histogram-order accumulation: identical residual histograms give
        // bit-identical sums, so exact tie detection is sound.
        let mut ll = 0.0f64;
        for (s, &h) in hist.iter().enumerate() {
            if h > 0 {
                ll += h as f64 * noise.log_probs[s];
            }
        }
        if ll == f64::NEG_INFINITY {
            continue;
        }
        match &best {
            None => best = Some((ll, w)),
            Some((best_ll, _)) if ll > *best_ll => {
                best = Some((ll, w));
                tie = false;
            }
            Some((best_ll, _)) if ll == *best_ll => {
                // Words are scanned in ascending order, so the incumbent is
                // already the lexicographically smallest.
                tie = true;
            }
            _ => {}
        }
    }
    match best {
        Some((ll, w)) => Ok(MlduOutcome {
            codeword: w.clone(),
            log_likelihood: ll,
            tie,
        }),
        None => Err(Error::Undecodable),
    }
}

#[derive(Debug, Clone)]
pub struct CodewordChannelStats {
    /// Index into the code's sorted distinct codewords.
    pub index: usize,
    pub successes: u64,
}

#[derive(Debug, Clone)]
pub struct ChannelStats {
    pub per_codeword: Vec<CodewordChannelStats>,
    pub trials_per_codeword: u64,
    pub overall_rate: f64,
}

/// For each (sampled or all) codeword x, the frequency over `trials` that
/// `mldu_decode(x + z) == x` with z drawn from the noise model. Ties count
/// as failures.
pub fn channel_success_rate(
    code: &LinearCode,
    noise: &NoiseModel,
    trials: u64,
    rng: &mut BitLedgerRng,
    max_codewords: Option<usize>,
) -> Result<ChannelStats> {
    let field = code.field().clone();
    let words = code.distinct_codewords()?;
    let chosen: Vec<usize> = match max_codewords {
        Some(cap) if cap < words.len() => {
            let mut pool: Vec<usize> = (0..words.len()).collect();
            for i in 0..cap {
                let j = i + rng.uniform((pool.len() - i) as u64) as usize;
                pool.swap(i, j);
            }
            let mut picked = pool[..cap].to_vec();
            picked.sort_unstable();
            picked
        }
        _ => (0..words.len()).collect(),
    };
    let mut per_codeword = Vec::with_capacity(chosen.len());
    let mut total_successes = 0u64;
    for &idx in &chosen {
        let x = &words[idx];
        let mut successes = 0u64;
        for _ in 0..trials {
            let z = noise.sample_vector(code.len(), rng);
            let received: Word = x.iter().zip(&z).map(|(&a, &b)| field.add(a, b)).collect();
            match mldu_decode(code, &received, noise) {
                Ok(out) if !out.tie && out.codeword == *x => successes += 1,
                Ok(_) => {}
                Err(Error::Undecodable) => {}
                Err(e) => return Err(e),
            }
        }
        total_successes += successes;
        per_codeword.push(CodewordChannelStats {
            index: idx,
            successes,
        });
    }
    let denom = (chosen.len() as u64 * trials).max(1);
    Ok(ChannelStats {
        per_codeword,
        trials_per_codeword: trials,
        overall_rate: total_successes as f64 / denom as f64,
    })
}
