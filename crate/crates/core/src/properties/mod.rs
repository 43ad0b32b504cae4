//! Brute-force verifiers for local code properties: clustered sets,
//! list-decodability, and zero-error list-recoverability, each producing a
//! replayable witness on failure.
//!
//! Every verifier is exact inside a hard budget. Past the budget the caller
//! either gets an `Infeasible` error or opts into randomized sampling, whose
//! verdicts are flagged non-exhaustive. Failure witnesses re-verify under the
//! bare definition, independent of the search that found them.

pub mod channel;
pub mod dist;

use rayon::prelude::*;

use crate::codes::LinearCode;
use crate::error::{Error, Result};
use crate::gf::{Symbol, Word};
use crate::rng::BitLedgerRng;
use crate::search::{binomial, SearchMode, CENTER_SCAN_CAP, SUBSET_SCAN_CAP};

/// Hamming ball radius for normalized radius rho at length n. The 1e-9 nudge
/// keeps exact fractions like 1/3 * 3 from rounding below the integer they
/// denote.
pub fn ball_radius(rho: f64, n: usize) -> usize {
    (rho * n as f64 + 1e-9).floor() as usize
}

pub fn hamming_distance(a: &[Symbol], b: &[Symbol]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

/// A replayable violation certificate.
#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    /// More than `list_size` codewords inside the ball of the given center.
    ClusteredSet {
        rho: f64,
        list_size: usize,
        center: Word,
        words: Vec<Word>,
    },
    /// At least `list_size + 1` codewords whose per-coordinate symbol sets
    /// all have size at most `ell`.
    RecoverySet {
        ell: usize,
        list_size: usize,
        words: Vec<Word>,
    },
    /// A nonzero mother codeword annihilated by a puncturing.
    KilledCodeword { indices: Vec<u32>, word: Word },
}

impl Witness {
    /// Re-verify the defining inequality from scratch.
    pub fn verify(&self) -> bool {
        match self {
            Witness::ClusteredSet {
                rho,
                list_size,
                center,
                words,
            } => {
                let mut distinct = words.clone();
                distinct.sort_unstable();
                distinct.dedup();
                if distinct.len() <= *list_size {
                    return false;
                }
                let radius = ball_radius(*rho, center.len());
                distinct
                    .iter()
                    .all(|w| w.len() == center.len() && hamming_distance(w, center) <= radius)
            }
            Witness::RecoverySet {
                ell,
                list_size,
                words,
            } => {
                let mut distinct = words.clone();
                distinct.sort_unstable();
                distinct.dedup();
                if distinct.len() <= *list_size {
                    return false;
                }
                let n = distinct[0].len();
                if distinct.iter().any(|w| w.len() != n) {
                    return false;
                }
                (0..n).all(|i| {
                    let mut syms: Vec<Symbol> = distinct.iter().map(|w| w[i]).collect();
                    syms.sort_unstable();
                    syms.dedup();
                    syms.len() <= *ell
                })
            }
            Witness::KilledCodeword { indices, word } => {
                word.iter().any(|&s| s != 0)
                    && indices
                        .iter()
                        .all(|&i| (i as usize) < word.len() && word[i as usize] == 0)
            }
        }
    }

    /// Text serialization consumed by the `verify-witness` CLI mode.
    pub fn to_text(&self) -> String {
        use std::fmt::Write as _;
        let mut out = String::new();
        let join = |w: &[Symbol]| {
            w.iter()
                .map(|s| s.to_string())
                .collect::<Vec<_>>()
                .join(" ")
        };
        match self {
            Witness::ClusteredSet {
                rho,
                list_size,
                center,
                words,
            } => {
                let _ = writeln!(out, "kind clustered-set");
                let _ = writeln!(out, "rho {rho}");
                let _ = writeln!(out, "list-size {list_size}");
                let _ = writeln!(out, "center {}", join(center));
                for w in words {
                    let _ = writeln!(out, "word {}", join(w));
                }
            }
            Witness::RecoverySet {
                ell,
                list_size,
                words,
            } => {
                let _ = writeln!(out, "kind recovery-set");
                let _ = writeln!(out, "ell {ell}");
                let _ = writeln!(out, "list-size {list_size}");
                for w in words {
                    let _ = writeln!(out, "word {}", join(w));
                }
            }
            Witness::KilledCodeword { indices, word } => {
                let _ = writeln!(out, "kind killed-codeword");
                let _ = writeln!(
                    out,
                    "indices {}",
                    indices
                        .iter()
                        .map(|i| i.to_string())
                        .collect::<Vec<_>>()
                        .join(" ")
                );
                let _ = writeln!(out, "word {}", join(word));
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Witness> {
        let bad = |msg: &str| Error::Format {
            what: "witness",
            msg: msg.to_string(),
        };
        let mut kind = None;
        let mut rho = None;
        let mut list_size = None;
        let mut ell = None;
        let mut center = None;
        let mut indices = None;
        let mut words: Vec<Word> = Vec::new();
        let parse_word = |rest: &str| -> Result<Word> {
            rest.split_whitespace()
                .map(|t| {
                    t.parse::<Symbol>().map_err(|_| Error::Format {
                        what: "witness",
                        msg: format!("bad symbol {t}"),
                    })
                })
                .collect()
        };
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            let (key, rest) = line.split_once(' ').unwrap_or((line.trim(), ""));
            match key {
                "kind" => kind = Some(rest.trim().to_string()),
                "rho" => rho = Some(rest.trim().parse::<f64>().map_err(|_| bad("bad rho"))?),
                "list-size" => {
                    list_size = Some(
                        rest.trim()
                            .parse::<usize>()
                            .map_err(|_| bad("bad list size"))?,
                    )
                }
                "ell" => ell = Some(rest.trim().parse::<usize>().map_err(|_| bad("bad ell"))?),
                "center" => center = Some(parse_word(rest)?),
                "indices" => {
                    indices = Some(
                        rest.split_whitespace()
                            .map(|t| t.parse::<u32>().map_err(|_| bad("bad index")))
                            .collect::<Result<Vec<u32>>>()?,
                    )
                }
                "word" => words.push(parse_word(rest)?),
                other => return Err(bad(&format!("unknown key {other}"))),
            }
        }
        match kind.as_deref() {
            Some("clustered-set") => Ok(Witness::ClusteredSet {
                rho: rho.ok_or_else(|| bad("missing rho"))?,
                list_size: list_size.ok_or_else(|| bad("missing list-size"))?,
                center: center.ok_or_else(|| bad("missing center"))?,
                words,
            }),
            Some("recovery-set") => Ok(Witness::RecoverySet {
                ell: ell.ok_or_else(|| bad("missing ell"))?,
                list_size: list_size.ok_or_else(|| bad("missing list-size"))?,
                words,
            }),
            Some("killed-codeword") => Ok(Witness::KilledCodeword {
                indices: indices.ok_or_else(|| bad("missing indices"))?,
                word: words
                    .into_iter()
                    .next()
                    .ok_or_else(|| bad("missing word"))?,
            }),
            _ => Err(bad("missing or unknown kind")),
        }
    }
}

/// Outcome of a clustered-set search.
#[derive(Debug, Clone)]
pub struct ClusterSearch {
    pub center: Option<Word>,
    /// When true and `center` is None, no center exists; when false, the
    /// search was sampled and a miss proves nothing.
    pub exhaustive: bool,
    pub centers_checked: u64,
}

/// Search for a z with every word within normalized radius rho of it.
/// Plurality candidates and the words themselves are tried first (a hit is
/// a proof by itself); the full q^n scan runs within the budget, otherwise
/// `mode` selects sampling or an infeasibility error.
pub fn is_clustered(words: &[Word], q: u32, rho: f64, mode: SearchMode) -> Result<ClusterSearch> {
    if words.is_empty() {
        return Err(Error::usage("clustered-set search needs at least one word"));
    }
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::usage("rho must lie in [0,1]"));
    }
    let n = words[0].len();
    if words.iter().any(|w| w.len() != n) {
        return Err(Error::usage("words must share a length"));
    }
    if words.iter().any(|w| w.iter().any(|&s| u32::from(s) >= q)) {
        return Err(Error::usage("word symbol out of range for q"));
    }
    let radius = ball_radius(rho, n);
    let fits = |z: &Word| words.iter().all(|w| hamming_distance(w, z) <= radius);

    let mut checked = 0u64;
    // Coordinate-wise plurality candidate (ties -> smallest symbol).
    let mut plurality: Word = Vec::with_capacity(n);
    for i in 0..n {
        let mut counts = vec![0u32; q as usize];
        for w in words {
            counts[w[i] as usize] += 1;
        }
        let best = (0..q as usize)
            .max_by_key(|&s| (counts[s], std::cmp::Reverse(s)))
            .unwrap();
        plurality.push(best as Symbol);
    }
    checked += 1;
    if fits(&plurality) {
        return Ok(ClusterSearch {
            center: Some(plurality),
            exhaustive: true,
            centers_checked: checked,
        });
    }
    for w in words {
        checked += 1;
        if fits(w) {
            return Ok(ClusterSearch {
                center: Some(w.clone()),
                exhaustive: true,
                centers_checked: checked,
            });
        }
    }

    let space = (q as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if space <= u128::from(CENTER_SCAN_CAP) {
        for code in 0..space as u64 {
            checked += 1;
            let z = decode_center(code, q, n);
            if fits(&z) {
                return Ok(ClusterSearch {
                    center: Some(z),
                    exhaustive: true,
                    centers_checked: checked,
                });
            }
        }
        return Ok(ClusterSearch {
            center: None,
            exhaustive: true,
            centers_checked: checked,
        });
    }
    match mode {
        SearchMode::Exhaustive => Err(Error::Infeasible {
            what: "center scan",
            size: space,
            budget: u128::from(CENTER_SCAN_CAP),
        }),
        SearchMode::Sampled { samples, seed } => {
            let mut rng = BitLedgerRng::new(seed);
            for _ in 0..samples {
                checked += 1;
                let z: Word = (0..n)
                    .map(|_| rng.uniform(u64::from(q)) as Symbol)
                    .collect();
                if fits(&z) {
                    return Ok(ClusterSearch {
                        center: Some(z),
                        exhaustive: false,
                        centers_checked: checked,
                    });
                }
            }
            Ok(ClusterSearch {
                center: None,
                exhaustive: false,
                centers_checked: checked,
            })
        }
    }
}

fn decode_center(mut code: u64, q: u32, n: usize) -> Word {
    let mut z = Vec::with_capacity(n);
    for _ in 0..n {
        z.push((code % u64::from(q)) as Symbol);
        code /= u64::from(q);
    }
    z
}

/// Outcome of the list-decodability check.
#[derive(Debug, Clone)]
pub struct LdCheck {
    pub decodable: bool,
    pub witness: Option<Witness>,
}

/// (rho, L)-list-decodability by exhaustive ball census: no center's ball of
/// normalized radius rho may contain more than L distinct codewords. The
/// witness is the smallest violating center (by integer encoding) with the
/// codewords in its ball.
pub fn list_decodable(code: &LinearCode, rho: f64, list_size: usize) -> Result<LdCheck> {
    if !(0.0..=1.0).contains(&rho) {
        return Err(Error::usage("rho must lie in [0,1]"));
    }
    let q = code.field().q();
    let n = code.len();
    let space = (q as u128).checked_pow(n as u32).unwrap_or(u128::MAX);
    if space > u128::from(CENTER_SCAN_CAP) {
        return Err(Error::Infeasible {
            what: "center scan",
            size: space,
            budget: u128::from(CENTER_SCAN_CAP),
        });
    }
    let words = code.distinct_codewords()?;
    let radius = ball_radius(rho, n);

    const CHUNK: u64 = 1 << 12;
    let space = space as u64;
    let chunks: Vec<u64> = (0..space.div_ceil(CHUNK)).collect();
    let violation = chunks
        .par_iter()
        .filter_map(|&chunk| {
            let lo = chunk * CHUNK;
            let hi = (lo + CHUNK).min(space);
            for center_code in lo..hi {
                let z = decode_center(center_code, q, n);
                let mut count = 0usize;
                for w in &words {
                    if hamming_distance(w, &z) <= radius {
                        count += 1;
                        if count > list_size {
                            break;
                        }
                    }
                }
                if count > list_size {
                    let ball: Vec<Word> = words
                        .iter()
                        .filter(|w| hamming_distance(w, &z) <= radius)
                        .cloned()
                        .collect();
                    return Some((center_code, z, ball));
                }
            }
            None
        })
        .min_by_key(|(center_code, _, _)| *center_code);

    Ok(match violation {
        Some((_, center, ball)) => LdCheck {
            decodable: false,
            witness: Some(Witness::ClusteredSet {
                rho,
                list_size,
                center,
                words: ball,
            }),
        },
        None => LdCheck {
            decodable: true,
            witness: None,
        },
    })
}

/// Outcome of the zero-error list-recoverability check.
#[derive(Debug, Clone)]
pub struct LrCheck {
    pub recoverable: bool,
    pub exhaustive: bool,
    pub subsets_checked: u64,
    pub witness: Option<Witness>,
}

/// Zero-error (ell, L) list recoverability, decided in the codeword-subset
/// form: the code fails iff some L+1 distinct codewords take at most ell
/// distinct symbols at every coordinate. (Equivalent to the for-all-lists
/// definition: such a subset is captured by the lists A_i = its coordinate
/// symbol sets, and conversely any captured set of more than L codewords
/// contains such a subset.)
pub fn zero_error_list_recoverable(
    code: &LinearCode,
    ell: usize,
    list_size: usize,
    mode: SearchMode,
) -> Result<LrCheck> {
    if ell < 1 {
        return Err(Error::usage("ell must be at least 1"));
    }
    let q = code.field().q();
    if q > 64 {
        return Err(Error::Infeasible {
            what: "symbol mask (q > 64) in list-recovery scan",
            size: u128::from(q),
            budget: 64,
        });
    }
    let words = code.distinct_codewords()?;
    let take = list_size + 1;
    if words.len() < take {
        return Ok(LrCheck {
            recoverable: true,
            exhaustive: true,
            subsets_checked: 0,
            witness: None,
        });
    }
    let space = binomial(words.len() as u64, take as u64);
    let within_budget = space <= SUBSET_SCAN_CAP && words.len() <= 4096 && list_size <= 4;

    if within_budget {
        let n = code.len();
        let mut masks = vec![0u64; n];
        let mut chosen: Vec<usize> = Vec::with_capacity(take);
        let mut checked = 0u64;
        let witness = lr_dfs(&words, ell, take, 0, &mut masks, &mut chosen, &mut checked);
        Ok(LrCheck {
            recoverable: witness.is_none(),
            exhaustive: true,
            subsets_checked: checked,
            witness: witness.map(|set| Witness::RecoverySet {
                ell,
                list_size,
                words: set,
            }),
        })
    } else {
        match mode {
            SearchMode::Exhaustive => Err(Error::Infeasible {
                what: "subset scan",
                size: space,
                budget: SUBSET_SCAN_CAP,
            }),
            SearchMode::Sampled { samples, seed } => {
                let mut rng = BitLedgerRng::new(seed);
                let mut pool: Vec<usize> = (0..words.len()).collect();
                for checked in 0..samples {
                    for i in 0..take {
                        let j = i + rng.uniform((pool.len() - i) as u64) as usize;
                        pool.swap(i, j);
                    }
                    let subset: Vec<&Word> = pool[..take].iter().map(|&i| &words[i]).collect();
                    let captured = (0..code.len()).all(|i| {
                        let mut mask = 0u64;
                        for w in &subset {
                            mask |= 1 << w[i];
                        }
                        mask.count_ones() as usize <= ell
                    });
                    if captured {
                        return Ok(LrCheck {
                            recoverable: false,
                            exhaustive: false,
                            subsets_checked: checked + 1,
                            witness: Some(Witness::RecoverySet {
                                ell,
                                list_size,
                                words: subset.into_iter().cloned().collect(),
                            }),
                        });
                    }
                }
                Ok(LrCheck {
                    recoverable: true,
                    exhaustive: false,
                    subsets_checked: samples,
                    witness: None,
                })
            }
        }
    }
}

/// DFS over index-increasing codeword subsets with symbol-set pruning:
/// once a coordinate's symbol set exceeds ell it can never shrink.
fn lr_dfs(
    words: &[Word],
    ell: usize,
    take: usize,
    start: usize,
    masks: &mut [u64],
    chosen: &mut Vec<usize>,
    checked: &mut u64,
) -> Option<Vec<Word>> {
    if chosen.len() == take {
        *checked += 1;
        return Some(chosen.iter().map(|&i| words[i].clone()).collect());
    }
    let remaining = take - chosen.len();
    if words.len() < start + remaining {
        return None;
    }
    for idx in start..=words.len() - remaining {
        let w = &words[idx];
        let mut saved: Vec<(usize, u64)> = Vec::new();
        let mut ok = true;
        for (i, &s) in w.iter().enumerate() {
            let bit = 1u64 << s;
            if masks[i] & bit == 0 {
                let next = masks[i] | bit;
                if next.count_ones() as usize > ell {
                    ok = false;
                    // Restore what this word already flipped.
                    for &(j, old) in &saved {
                        masks[j] = old;
                    }
                    break;
                }
                saved.push((i, masks[i]));
                masks[i] = next;
            }
        }
        if !ok {
            *checked += 1;
            continue;
        }
        chosen.push(idx);
        if let Some(hit) = lr_dfs(words, ell, take, idx + 1, masks, chosen, checked) {
            return Some(hit);
        }
        chosen.pop();
        for &(j, old) in saved.iter().rev() {
            masks[j] = old;
        }
    }
    None
}
