//! Empirical row distributions, q-ary entropy and KL divergence, and exact
//! type-class mass.
//!
//! Empirical distributions store exact integer counts; the type-class mass
//! is computed both by sequence enumeration (small n) and by the multinomial
//! closed form, in exact rational arithmetic, so the two routes can be
//! compared without tolerance.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::gf::Word;
use crate::search::SEQUENCE_ENUM_CAP;

/// Exact empirical distribution of the rows of an n x b matrix over GF(q):
/// integer counts per row pattern, patterns encoded as base-q integers
/// (column 0 least significant).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmpDistribution {
    q: u32,
    b: usize,
    n: u64,
    counts: BTreeMap<u64, u64>,
}

/// Encode a row over GF(q) as a base-q integer.
pub fn row_code(row: &[crate::gf::Symbol], q: u32) -> u64 {
    row.iter()
        .rev()
        .fold(0u64, |acc, &s| acc * u64::from(q) + u64::from(s))
}

/// Empirical distribution of the rows of a matrix.
pub fn emp(rows: &[Word], q: u32) -> Result<EmpDistribution> {
    if rows.is_empty() {
        return Err(Error::usage(
            "empirical distribution needs at least one row",
        ));
    }
    let b = rows[0].len();
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    for row in rows {
        if row.len() != b {
            return Err(Error::usage("rows must share a length"));
        }
        if row.iter().any(|&s| u32::from(s) >= q) {
            return Err(Error::usage("row symbol out of range for q"));
        }
        *counts.entry(row_code(row, q)).or_default() += 1;
    }
    Ok(EmpDistribution {
        q,
        b,
        n: rows.len() as u64,
        counts,
    })
}

impl EmpDistribution {
    /// Build directly from pattern counts.
    pub fn from_counts(q: u32, b: usize, counts: BTreeMap<u64, u64>) -> Result<EmpDistribution> {
        let size = (q as u128).checked_pow(b as u32).unwrap_or(u128::MAX);
        if counts.keys().any(|&k| u128::from(k) >= size) {
            return Err(Error::usage("pattern code out of range for q^b"));
        }
        let n: u64 = counts.values().sum();
        if n == 0 {
            return Err(Error::usage("empirical distribution needs positive mass"));
        }
        Ok(EmpDistribution { q, b, n, counts })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn b(&self) -> usize {
        self.b
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn counts(&self) -> &BTreeMap<u64, u64> {
        &self.counts
    }

    pub fn count(&self, pattern: u64) -> u64 {
        self.counts.get(&pattern).copied().unwrap_or(0)
    }

    pub fn prob(&self, pattern: u64) -> f64 {
        self.count(pattern) as f64 / self.n as f64
    }

    pub fn prob_exact(&self, pattern: u64) -> BigRational {
        BigRational::new(BigInt::from(self.count(pattern)), BigInt::from(self.n))
    }

    /// Shannon entropy in base q.
    pub fn entropy_q(&self) -> f64 {
        let lnq = f64::from(self.q).ln();
        self.counts
            .values()
            .map(|&c| {
                let p = c as f64 / self.n as f64;
                -p * p.ln() / lnq
            })
            .sum()
    }

    /// Exact point distribution (all mass on one pattern).
    pub fn point_mass(q: u32, b: usize, pattern: u64, n: u64) -> Result<EmpDistribution> {
        let mut counts = BTreeMap::new();
        counts.insert(pattern, n);
        EmpDistribution::from_counts(q, b, counts)
    }
}

/// A distribution over q^b patterns with exact rational entries.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalDist {
    probs: Vec<BigRational>,
}

impl RationalDist {
    pub fn new(probs: Vec<BigRational>) -> Result<RationalDist> {
        if probs.iter().any(|p| p.is_negative()) {
            return Err(Error::usage("probabilities must be nonnegative"));
        }
        let total: BigRational = probs.iter().cloned().sum();
        if !total.is_one() {
            return Err(Error::usage("probabilities must sum to exactly 1"));
        }
        Ok(RationalDist { probs })
    }

    pub fn uniform(size: usize) -> RationalDist {
        let p = BigRational::new(BigInt::one(), BigInt::from(size));
        RationalDist {
            probs: vec![p; size],
        }
    }

    /// Shorthand: build from (numerator, denominator) pairs.
    pub fn from_pairs(pairs: &[(u64, u64)]) -> Result<RationalDist> {
        RationalDist::new(
            pairs
                .iter()
                .map(|&(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))
                .collect(),
        )
    }

    pub fn from_emp(emp: &EmpDistribution) -> RationalDist {
        let size = (emp.q as usize).pow(emp.b as u32);
        let probs = (0..size as u64).map(|s| emp.prob_exact(s)).collect();
        RationalDist { probs }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn prob(&self, pattern: u64) -> &BigRational {
        &self.probs[pattern as usize]
    }

    pub fn prob_f64(&self, pattern: u64) -> f64 {
        self.probs[pattern as usize].to_f64().unwrap_or(f64::NAN)
    }
}

/// q-ary entropy h_q(x) = -x log_q x - (1-x) log_q(1-x) + x log_q(q-1),
/// with the x in {0, 1} limits taken by continuity.
pub fn q_entropy(x: f64, q: u32) -> Result<f64> {
    if q < 2 {
        return Err(Error::usage("entropy base q must be at least 2"));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::usage("entropy argument must lie in [0,1]"));
    }
    let lnq = f64::from(q).ln();
    let term = |t: f64| if t == 0.0 { 0.0 } else { -t * t.ln() / lnq };
    Ok(term(x) + term(1.0 - x) + x * f64::from(q - 1).ln() / lnq)
}

/// KL divergence in base q; `support_violation` marks tau putting mass where
/// sigma has none (value is +infinity there).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KlDivergence {
    pub value: f64,
    pub support_violation: bool,
}

/// D_KL_q(tau || sigma) against a rational reference distribution.
pub fn kl_q(tau: &EmpDistribution, sigma: &RationalDist) -> Result<KlDivergence> {
    let size = (tau.q as u128)
        .checked_pow(tau.b as u32)
        .unwrap_or(u128::MAX);
    if u128::from(sigma.len() as u64) != size {
        return Err(Error::usage(format!(
            "sigma has {} entries, expected q^b = {size}",
            sigma.len()
        )));
    }
    let lnq = f64::from(tau.q).ln();
    let mut value = 0.0f64;
    let mut violation = false;
    for (&pattern, &count) in &tau.counts {
        let t = count as f64 / tau.n as f64;
        let s = sigma.prob_f64(pattern);
        if s == 0.0 {
            violation = true;
        } else {
            value += t * (t / s).ln() / lnq;
        }
    }
    Ok(KlDivergence {
        value: if violation { f64::INFINITY } else { value },
        support_violation: violation,
    })
}

/// D_KL_q between two empirical distributions over the same pattern space.
pub fn kl_q_emp(tau: &EmpDistribution, sigma: &EmpDistribution) -> Result<KlDivergence> {
    if tau.q != sigma.q || tau.b != sigma.b {
        return Err(Error::usage(
            "distributions live on different pattern spaces",
        ));
    }
    kl_q(tau, &RationalDist::from_emp(sigma))
}

/// Both routes to the type-class mass
/// `sum over sequences with empirical distribution tau of prod sigma(P_i)`:
/// exact sequence enumeration (within budget) and the multinomial closed
/// form `n! / prod k_s! * prod sigma(s)^{k_s}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TypeClassMass {
    pub enumerated: Option<BigRational>,
    pub multinomial: BigRational,
    /// Scaled pattern counts k_s at the requested length.
    pub scaled_counts: BTreeMap<u64, u64>,
}

pub fn type_class_mass(
    tau: &EmpDistribution,
    sigma: &RationalDist,
    n: u64,
) -> Result<TypeClassMass> {
    let size = (tau.q as u128)
        .checked_pow(tau.b as u32)
        .unwrap_or(u128::MAX);
    if u128::from(sigma.len() as u64) != size {
        return Err(Error::usage(format!(
            "sigma has {} entries, expected q^b = {size}",
            sigma.len()
        )));
    }
    if n == 0 {
        return Err(Error::usage("type class needs positive length"));
    }
    // Realizability: n * tau must have integer counts.
    let mut scaled: BTreeMap<u64, u64> = BTreeMap::new();
    for (&pattern, &count) in &tau.counts {
        let prod = n as u128 * u128::from(count);
        if !prod.is_multiple_of(u128::from(tau.n)) {
            return Err(Error::usage(format!(
                "tau is not realizable at length {n}: {count}/{} * {n} is not integral",
                tau.n
            )));
        }
        scaled.insert(pattern, (prod / u128::from(tau.n)) as u64);
    }

    // Multinomial route.
    let mut multinomial = factorial(n);
    for &k in scaled.values() {
        multinomial /= factorial(k);
    }
    let mut mass = BigRational::from_integer(multinomial);
    for (&pattern, &k) in &scaled {
        if k > 0 {
            mass *= pow_rational(sigma.prob(pattern), k);
        }
    }

    // Enumeration route within budget.
    let space = size.checked_pow(n.min(u64::from(u32::MAX)) as u32);
    let enumerated = match space {
        Some(sp) if sp <= SEQUENCE_ENUM_CAP => {
            let alphabet = size as u64;
            let mut seq = vec![0u64; n as usize];
            let mut total = BigRational::zero();
            loop {
                let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
                for &s in &seq {
                    *counts.entry(s).or_default() += 1;
                }
                if counts == scaled {
                    let mut prod = BigRational::one();
                    for &s in &seq {
                        prod *= sigma.prob(s);
                    }
                    total += prod;
                }
                // Odometer.
                let mut i = 0;
                loop {
                    if i == seq.len() {
                        return Ok(TypeClassMass {
                            enumerated: Some(total),
                            multinomial: mass,
                            scaled_counts: scaled,
                        });
                    }
                    seq[i] += 1;
                    if seq[i] == alphabet {
                        seq[i] = 0;
                        i += 1;
                    } else {
                        break;
                    }
                }
            }
        }
        _ => None,
    };
    Ok(TypeClassMass {
        enumerated,
        multinomial: mass,
        scaled_counts: scaled,
    })
}

fn factorial(n: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 2..=n {
        acc *= BigInt::from(i);
    }
    acc
}

fn pow_rational(base: &BigRational, mut exp: u64) -> BigRational {
    let mut acc = BigRational::one();
    let mut b = base.clone();
    while exp > 0 {
        if exp & 1 == 1 {
            acc *= &b;
        }
        let sq = &b * &b;
        b = sq;
        exp >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::LinearCode;
    use crate::gf::{Field, Modulus, Symbol};
    use crate::rng::BitLedgerRng;

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn emp_point_mass_and_uniform() {
        let rows = vec![vec![1, 0], vec![1, 0], vec![1, 0]];
        let e = emp(&rows, 2).unwrap();
        assert_eq!(e.count(1), 3);
        assert_eq!(e.entropy_q(), 0.0);

        let e2 = emp(&[vec![0], vec![1]], 2).unwrap();
        assert_eq!(e2.count(0), 1);
        assert_eq!(e2.count(1), 1);
        assert!((e2.entropy_q() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn emp_of_hadamard_columns_is_uniform() {
        // 3 linearly independent binary Hadamard codewords as columns give
        // exactly uniform rows over F_2^3.
        let f = Field::new(2, 1, Modulus::Auto).unwrap();
        let code = LinearCode::hadamard(f, 3).unwrap();
        let cols: Vec<Vec<Symbol>> = vec![
            code.encode(&[1, 0, 0]).unwrap(),
            code.encode(&[0, 1, 0]).unwrap(),
            code.encode(&[0, 0, 1]).unwrap(),
        ];
        let rows: Vec<Word> = (0..code.len())
            .map(|i| cols.iter().map(|c| c[i]).collect())
            .collect();
        let e = emp(&rows, 2).unwrap();
        for pattern in 0..8 {
            assert_eq!(e.count(pattern), 1, "pattern {pattern}");
        }
    }

    #[test]
    fn q_entropy_known_values() {
        assert!((q_entropy(0.5, 2).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(q_entropy(0.0, 3).unwrap(), 0.0);
        assert_eq!(q_entropy(1.0, 2).unwrap(), 0.0);
        assert!((q_entropy(2.0 / 3.0, 3).unwrap() - 1.0).abs() < 1e-12);
        assert!(q_entropy(-0.1, 2).is_err());
        assert!(q_entropy(1.1, 2).is_err());
    }

    #[test]
    fn kl_identity_and_self() {
        let e = emp(&[vec![0], vec![0], vec![1], vec![1]], 2).unwrap();
        let self_kl = kl_q_emp(&e, &e).unwrap();
        assert_eq!(self_kl.value, 0.0);

        // D(tau || uniform over S) = log_q |S| - H_q(tau).
        let skewed = emp(&[vec![0], vec![0], vec![0], vec![1]], 2).unwrap();
        let d = kl_q(&skewed, &RationalDist::uniform(2)).unwrap();
        assert!((d.value - (1.0 - skewed.entropy_q())).abs() < 1e-9);

        // tau = (1, 0) against uniform: exactly 1 bit.
        let point = EmpDistribution::point_mass(2, 1, 0, 4).unwrap();
        let d2 = kl_q(&point, &RationalDist::uniform(2)).unwrap();
        assert!((d2.value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn kl_identity_holds_for_random_matrices() {
        // kl_q(emp(A), uniform) + H_q(emp(A)) = b.
        let mut rng = BitLedgerRng::new(0x12);
        for q in [2u32, 3] {
            for b in 1..=2usize {
                for _ in 0..10 {
                    let n = 1 + rng.uniform(12) as usize;
                    let rows: Vec<Word> = (0..n)
                        .map(|_| {
                            (0..b)
                                .map(|_| rng.uniform(u64::from(q)) as Symbol)
                                .collect()
                        })
                        .collect();
                    let e = emp(&rows, q).unwrap();
                    let d = kl_q(&e, &RationalDist::uniform((q as usize).pow(b as u32))).unwrap();
                    assert!(
                        (d.value + e.entropy_q() - b as f64).abs() < 1e-9,
                        "q={q} b={b}"
                    );
                }
            }
        }
    }

    #[test]
    fn kl_support_violation_flagged() {
        let tau = EmpDistribution::point_mass(2, 1, 1, 2).unwrap();
        let sigma = RationalDist::from_pairs(&[(1, 1), (0, 1)]).unwrap();
        let d = kl_q(&tau, &sigma).unwrap();
        assert!(d.support_violation);
        assert!(d.value.is_infinite());
    }

    #[test]
    fn type_class_mass_binary_uniform() {
        // n=2, b=1, q=2, tau uniform, sigma uniform: sequences (0,1) and
        // (1,0) each carry 1/4; mass = 1/2.
        let tau = emp(&[vec![0], vec![1]], 2).unwrap();
        let got = type_class_mass(&tau, &RationalDist::uniform(2), 2).unwrap();
        assert_eq!(got.multinomial, ratio(1, 2));
        assert_eq!(got.enumerated.unwrap(), ratio(1, 2));
    }

    #[test]
    fn type_class_mass_point_mass() {
        // tau concentrated on pattern s: mass = sigma(s)^n exactly.
        let tau = EmpDistribution::point_mass(2, 1, 1, 1).unwrap();
        let sigma = RationalDist::from_pairs(&[(3, 4), (1, 4)]).unwrap();
        let got = type_class_mass(&tau, &sigma, 5).unwrap();
        assert_eq!(got.multinomial, ratio(1, 1024));
        assert_eq!(got.enumerated.unwrap(), ratio(1, 1024));
    }

    #[test]
    fn type_class_routes_agree_exactly() {
        let mut rng = BitLedgerRng::new(0x77);
        for _ in 0..20 {
            let b = 1 + rng.uniform(2) as usize;
            let n0 = 1 + rng.uniform(6) as usize;
            let rows: Vec<Word> = (0..n0)
                .map(|_| (0..b).map(|_| rng.uniform(2) as Symbol).collect())
                .collect();
            let tau = emp(&rows, 2).unwrap();
            let sigma = if rng.uniform(2) == 0 {
                RationalDist::uniform(1 << b)
            } else if b == 1 {
                RationalDist::from_pairs(&[(1, 3), (2, 3)]).unwrap()
            } else {
                RationalDist::from_pairs(&[(1, 2), (1, 4), (1, 8), (1, 8)]).unwrap()
            };
            // Scale the length by an integer multiple so tau stays
            // realizable, staying inside the enumeration budget.
            let mut n = (n0 * (1 + rng.uniform(2) as usize)) as u64;
            while (1u128 << (b as u64 * n)) > crate::search::SEQUENCE_ENUM_CAP {
                n -= n0 as u64;
            }
            let got = type_class_mass(&tau, &sigma, n).unwrap();
            let enumerated = got.enumerated.expect("within enumeration budget");
            assert_eq!(enumerated, got.multinomial);
        }
    }

    #[test]
    fn type_class_rejects_unrealizable_length() {
        let tau = emp(&[vec![0], vec![0], vec![1]], 2).unwrap(); // (2/3, 1/3)
        assert!(type_class_mass(&tau, &RationalDist::uniform(2), 4).is_err());
        assert!(type_class_mass(&tau, &RationalDist::uniform(2), 6).is_ok());
    }

    #[test]
    fn type_class_sandwich_bound() {
        // (n+1)^{-q^b} q^{-nD} <= mass <= q^{-nD}.
        let tau = emp(&[vec![0], vec![0], vec![0], vec![1]], 2).unwrap();
        let sigma = RationalDist::from_pairs(&[(1, 2), (1, 2)]).unwrap();
        let n = 8u64;
        let d = kl_q(&tau, &sigma).unwrap().value;
        let mass = type_class_mass(&tau, &sigma, n)
            .unwrap()
            .multinomial
            .to_f64()
            .unwrap();
        let upper = 2f64.powf(-(n as f64) * d);
        let lower = (n as f64 + 1.0).powi(-2) * upper;
        assert!(mass <= upper * (1.0 + 1e-9), "mass {mass} > upper {upper}");
        assert!(mass >= lower * (1.0 - 1e-9), "mass {mass} < lower {lower}");
    }
}
