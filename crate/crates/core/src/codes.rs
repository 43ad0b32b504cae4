//! Linear codes as generator matrices over GF(q): Hadamard and Reed-Solomon
//! constructions, exhaustive distance/bias computation, agreement sets, and
//! the bipartite code graph with its unbalanced-expansion checker.
//!
//! Generator matrices are stored message-major (k rows of length m), so a
//! puncturing is a column selection. Named constructors produce full-rank
//! generators; punctured and randomly sampled codes may have rank below k,
//! which is recorded rather than rejected: the rate experiments need the
//! failure events.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};
use crate::gf::{Field, Modulus, Symbol, Word};
use crate::rng::BitLedgerRng;
use crate::search::{
    binomial, SearchMode, BIAS_OPS_CAP, CODEWORD_CACHE_CAP, SUBSET_SCAN_CAP, WEIGHT_ENUM_CAP,
};

/// A linear code given by a k x m generator matrix over GF(q).
#[derive(Debug, Clone)]
pub struct LinearCode {
    field: Arc<Field>,
    k: usize,
    len: usize,
    /// Row-major k x len generator.
    gen: Vec<Symbol>,
    cache: OnceLock<Arc<Vec<Word>>>,
}

/// Exhaustive minimum-distance result: the absolute distance and the
/// smallest eta with every nonzero normalized weight >= (1 - 1/q)(1 - eta).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinDistance {
    pub distance: usize,
    pub eta_opt: f64,
}

impl LinearCode {
    pub fn new(field: Arc<Field>, k: usize, len: usize, gen: Vec<Symbol>) -> Result<LinearCode> {
        if gen.len() != k * len {
            return Err(Error::usage(format!(
                "generator must have {} entries for k={k}, m={len}, got {}",
                k * len,
                gen.len()
            )));
        }
        if len == 0 {
            return Err(Error::usage("code length must be positive"));
        }
        if let Some(&bad) = gen.iter().find(|&&s| !field.contains(s)) {
            return Err(Error::NotAnElement(u32::from(bad), field.to_string()));
        }
        Ok(LinearCode {
            field,
            k,
            len,
            gen,
            cache: OnceLock::new(),
        })
    }

    /// Hadamard code of dimension k: one coordinate per point of GF(q)^k
    /// (in canonical integer order), codewords are the linear functionals.
    pub fn hadamard(field: Arc<Field>, k: usize) -> Result<LinearCode> {
        let q = u64::from(field.q());
        let len = checked_enum_size(q, k, "Hadamard length", CODEWORD_CACHE_CAP)?;
        let mut gen = vec![0 as Symbol; k * len as usize];
        for col in 0..len {
            let mut point = col;
            for row in 0..k {
                gen[row * len as usize + col as usize] = (point % q) as Symbol;
                point /= q;
            }
        }
        LinearCode::new(field, k, len as usize, gen)
    }

    /// Reed-Solomon code: codewords are evaluations of polynomials of degree
    /// < k at the given distinct points. Minimum distance is m - k + 1.
    pub fn reed_solomon(field: Arc<Field>, k: usize, points: &[Symbol]) -> Result<LinearCode> {
        let m = points.len();
        if k < 1 || k > m {
            return Err(Error::usage(format!(
                "need 1 <= k <= number of points, got k={k}, m={m}"
            )));
        }
        for (i, &p) in points.iter().enumerate() {
            if !field.contains(p) {
                return Err(Error::NotAnElement(u32::from(p), field.to_string()));
            }
            if points[..i].contains(&p) {
                return Err(Error::usage(format!("repeated evaluation point {p}")));
            }
        }
        let mut gen = vec![0 as Symbol; k * m];
        for (j, &x) in points.iter().enumerate() {
            let mut pw: Symbol = 1;
            for i in 0..k {
                gen[i * m + j] = pw;
                pw = field.mul(pw, x);
            }
        }
        LinearCode::new(field, k, m, gen)
    }

    /// Reed-Solomon over the first m field elements 0, 1, ..., m-1.
    pub fn reed_solomon_prefix(field: Arc<Field>, k: usize, m: usize) -> Result<LinearCode> {
        if m > field.q() as usize {
            return Err(Error::usage(format!(
                "length {m} exceeds field size {}",
                field.q()
            )));
        }
        let points: Vec<Symbol> = (0..m as u32).map(|x| x as Symbol).collect();
        LinearCode::reed_solomon(field, k, &points)
    }

    /// Length-n repetition code (k = 1, all-ones generator row).
    pub fn repetition(field: Arc<Field>, len: usize) -> Result<LinearCode> {
        LinearCode::new(field, 1, len, vec![1; len])
    }

    /// Generator with i.i.d. uniform entries (rank may be below k).
    pub fn random(
        field: Arc<Field>,
        k: usize,
        len: usize,
        rng: &mut BitLedgerRng,
    ) -> Result<LinearCode> {
        let q = u64::from(field.q());
        let gen: Vec<Symbol> = (0..k * len).map(|_| rng.uniform(q) as Symbol).collect();
        LinearCode::new(field, k, len, gen)
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn dimension(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn generator(&self) -> &[Symbol] {
        &self.gen
    }

    pub fn generator_row(&self, i: usize) -> &[Symbol] {
        &self.gen[i * self.len..(i + 1) * self.len]
    }

    /// Design rate k/m.
    pub fn design_rate(&self) -> f64 {
        self.k as f64 / self.len as f64
    }

    pub fn encode(&self, msg: &[Symbol]) -> Result<Word> {
        if msg.len() != self.k {
            return Err(Error::usage(format!(
                "message length {} does not match dimension {}",
                msg.len(),
                self.k
            )));
        }
        let mut out = vec![0 as Symbol; self.len];
        for (i, &coef) in msg.iter().enumerate() {
            if !self.field.contains(coef) {
                return Err(Error::NotAnElement(u32::from(coef), self.field.to_string()));
            }
            if coef == 0 {
                continue;
            }
            let row = self.generator_row(i);
            for (o, &g) in out.iter_mut().zip(row) {
                *o = self.field.add(*o, self.field.mul(coef, g));
            }
        }
        Ok(out)
    }

    /// All q^k codewords in message order (message index read as a base-q
    /// integer, least significant digit = row 0). Cached after first use;
    /// duplicates appear when rank < k.
    pub fn codewords(&self) -> Result<Arc<Vec<Word>>> {
        let q = u64::from(self.field.q());
        let count = checked_enum_size(q, self.k, "codeword enumeration", CODEWORD_CACHE_CAP)?;
        if let Some(c) = self.cache.get() {
            return Ok(Arc::clone(c));
        }
        // Prefix extension: the block for digit value a of row j is the
        // previous block shifted by a * row_j, which keeps message order.
        let mut words: Vec<Word> = Vec::with_capacity(count as usize);
        words.push(vec![0; self.len]);
        for row_idx in 0..self.k {
            let row = self.generator_row(row_idx).to_vec();
            let base = words.len();
            for a in 1..self.field.q() as Symbol {
                let scaled: Word = row.iter().map(|&g| self.field.mul(a, g)).collect();
                for w_idx in 0..base {
                    let w: Word = words[w_idx]
                        .iter()
                        .zip(&scaled)
                        .map(|(&x, &y)| self.field.add(x, y))
                        .collect();
                    words.push(w);
                }
            }
        }
        debug_assert_eq!(words.len(), count as usize);
        let _ = self.cache.set(Arc::new(words));
        Ok(Arc::clone(self.cache.get().unwrap()))
    }

    /// Sorted, deduplicated codewords.
    pub fn distinct_codewords(&self) -> Result<Vec<Word>> {
        let all = self.codewords()?;
        let mut words: Vec<Word> = all.as_ref().clone();
        words.sort_unstable();
        words.dedup();
        Ok(words)
    }

    /// Rank of the generator over GF(q).
    pub fn rank(&self) -> usize {
        let mut rows: Vec<Word> = (0..self.k)
            .map(|i| self.generator_row(i).to_vec())
            .collect();
        gaussian_rank(&self.field, &mut rows)
    }

    /// A nonzero message v with v . G = 0, if one exists (i.e. rank < k).
    pub fn left_nullspace_vector(&self) -> Option<Word> {
        let f = &self.field;
        let mut rows: Vec<Word> = (0..self.k)
            .map(|i| self.generator_row(i).to_vec())
            .collect();
        let mut combo: Vec<Word> = (0..self.k)
            .map(|i| {
                let mut e = vec![0 as Symbol; self.k];
                e[i] = 1;
                e
            })
            .collect();
        let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, column)
        for r in 0..self.k {
            for &(pr, pc) in &pivots {
                let factor = rows[r][pc];
                if factor != 0 {
                    let prow = rows[pr].clone();
                    for (t, &h) in rows[r].iter_mut().zip(&prow) {
                        *t = f.sub(*t, f.mul(factor, h));
                    }
                    let crow = combo[pr].clone();
                    for (t, &h) in combo[r].iter_mut().zip(&crow) {
                        *t = f.sub(*t, f.mul(factor, h));
                    }
                }
            }
            match rows[r].iter().position(|&x| x != 0) {
                Some(col) => {
                    let inv = f.inv(rows[r][col]).expect("pivot nonzero");
                    for x in rows[r].iter_mut() {
                        *x = f.mul(inv, *x);
                    }
                    for x in combo[r].iter_mut() {
                        *x = f.mul(inv, *x);
                    }
                    pivots.push((r, col));
                }
                None => return Some(combo[r].clone()),
            }
        }
        None
    }

    /// Exhaustive minimum distance over nonzero codewords, streaming one
    /// scalar representative per projective message class (weights are
    /// scaling-invariant).
    pub fn min_distance(&self) -> Result<MinDistance> {
        let q = u64::from(self.field.q());
        let reps = projective_count(q, self.k);
        if reps > u128::from(WEIGHT_ENUM_CAP) {
            return Err(Error::Infeasible {
                what: "weight enumeration",
                size: reps,
                budget: u128::from(WEIGHT_ENUM_CAP),
            });
        }
        let mut min_weight = usize::MAX;
        self.for_each_representative(|word| {
            let w = word.iter().filter(|&&s| s != 0).count();
            if w > 0 && w < min_weight {
                min_weight = w;
            }
        });
        if min_weight == usize::MAX {
            return Err(Error::ZeroCode);
        }
        let q = self.field.q() as f64;
        let normalized = min_weight as f64 / self.len as f64;
        let eta_opt = (1.0 - normalized / (1.0 - 1.0 / q)).max(0.0);
        Ok(MinDistance {
            distance: min_weight,
            eta_opt,
        })
    }

    /// Visit one codeword per scalar class: messages whose first nonzero
    /// digit is 1, walked with an odometer. A digit stepping from a to
    /// (a+1) mod q adds the precomputed delta (a+1)row - (a)row, so every
    /// step is one vector addition even over extension fields, where
    /// repeated addition of a row would only cycle through multiples of p.
    fn for_each_representative<F: FnMut(&[Symbol])>(&self, mut visit: F) {
        let q = self.field.q() as Symbol;
        let scaled: Vec<Vec<Word>> = (0..self.k)
            .map(|j| {
                let row = self.generator_row(j);
                (0..q)
                    .map(|a| row.iter().map(|&g| self.field.mul(a, g)).collect())
                    .collect()
            })
            .collect();
        let deltas: Vec<Vec<Word>> = scaled
            .iter()
            .map(|rows| {
                (0..q as usize)
                    .map(|a| {
                        let next = &rows[(a + 1) % q as usize];
                        rows[a]
                            .iter()
                            .zip(next)
                            .map(|(&old, &new)| self.field.sub(new, old))
                            .collect()
                    })
                    .collect()
            })
            .collect();
        for first in 0..self.k {
            let mut word: Word = self.generator_row(first).to_vec();
            let mut digits = vec![0 as Symbol; self.k];
            visit(&word);
            'odometer: loop {
                let mut j = first + 1;
                loop {
                    if j == self.k {
                        break 'odometer;
                    }
                    let a = digits[j];
                    for (w, &d) in word.iter_mut().zip(&deltas[j][a as usize]) {
                        *w = self.field.add(*w, d);
                    }
                    digits[j] += 1;
                    if digits[j] == q {
                        digits[j] = 0;
                        j += 1;
                    } else {
                        break;
                    }
                }
                visit(&word);
            }
        }
    }

    /// Bias: max over nonzero codewords c and nonzero field elements a of
    /// |sum_i omega^(tr(a c_i))| / m.
    pub fn bias(&self) -> Result<f64> {
        let q = u128::from(self.field.q());
        let mut count: u128 = 1;
        for _ in 0..self.k {
            count = count.saturating_mul(q);
        }
        let ops = count.saturating_mul(q - 1).saturating_mul(self.len as u128);
        if ops > BIAS_OPS_CAP {
            return Err(Error::Infeasible {
                what: "bias scan",
                size: ops,
                budget: BIAS_OPS_CAP,
            });
        }
        let words = self.codewords()?;
        let m = self.len as f64;
        let mut worst = 0.0f64;
        for w in words.iter() {
            if w.iter().all(|&s| s == 0) {
                continue;
            }
            for a in 1..self.field.q() as Symbol {
                let s = self.field.char_sum(w, a)?;
                worst = worst.max(s.norm() / m);
            }
        }
        Ok(worst)
    }

    // ---- generator matrix file format ----

    /// Header "q k m" with q written as p or p^r, then k rows of m integer
    /// symbol codes (polynomial-basis encoding).
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {} {}", self.field.q_label(), self.k, self.len);
        for i in 0..self.k {
            let row: Vec<String> = self
                .generator_row(i)
                .iter()
                .map(|s| s.to_string())
                .collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
        out
    }

    pub fn from_text(text: &str) -> Result<LinearCode> {
        let bad = |msg: String| Error::Format {
            what: "generator matrix",
            msg,
        };
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| bad("missing header".into()))?;
        let mut it = header.split_whitespace();
        let q_label = it.next().ok_or_else(|| bad("missing q".into()))?;
        let k: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| bad("bad k".into()))?;
        let m: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| bad("bad m".into()))?;
        let (p, r) = match q_label.split_once('^') {
            Some((p, r)) => (
                p.parse()
                    .map_err(|_| bad(format!("bad q label {q_label}")))?,
                r.parse()
                    .map_err(|_| bad(format!("bad q label {q_label}")))?,
            ),
            None => (
                q_label
                    .parse()
                    .map_err(|_| bad(format!("bad q label {q_label}")))?,
                1,
            ),
        };
        let field = Field::new(p, r, Modulus::Auto)?;
        let mut gen = Vec::with_capacity(k * m);
        for _ in 0..k {
            let line = lines
                .next()
                .ok_or_else(|| bad("missing generator row".into()))?;
            for tok in line.split_whitespace() {
                gen.push(
                    tok.parse::<Symbol>()
                        .map_err(|_| bad("bad symbol".into()))?,
                );
            }
        }
        LinearCode::new(field, k, m, gen)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<LinearCode> {
        LinearCode::from_text(&fs::read_to_string(path)?)
    }
}

fn checked_enum_size(q: u64, k: usize, what: &'static str, cap: u64) -> Result<u64> {
    let mut n: u128 = 1;
    for _ in 0..k {
        n *= u128::from(q);
        if n > u128::from(cap) {
            return Err(Error::Infeasible {
                what,
                size: n,
                budget: u128::from(cap),
            });
        }
    }
    Ok(n as u64)
}

/// (q^k - 1) / (q - 1): number of scalar classes of nonzero messages.
fn projective_count(q: u64, k: usize) -> u128 {
    let mut acc: u128 = 0;
    let mut pw: u128 = 1;
    for _ in 0..k {
        acc += pw;
        pw = pw.saturating_mul(u128::from(q));
    }
    acc
}

fn gaussian_rank(field: &Field, rows: &mut [Word]) -> usize {
    let mut rank = 0;
    let cols = rows.first().map(|r| r.len()).unwrap_or(0);
    let mut pivot_row = 0;
    for col in 0..cols {
        let Some(r) = (pivot_row..rows.len()).find(|&r| rows[r][col] != 0) else {
            continue;
        };
        rows.swap(pivot_row, r);
        let inv = field.inv(rows[pivot_row][col]).expect("pivot nonzero");
        for x in rows[pivot_row].iter_mut() {
            *x = field.mul(inv, *x);
        }
        for r2 in 0..rows.len() {
            if r2 != pivot_row && rows[r2][col] != 0 {
                let factor = rows[r2][col];
                let pivot = rows[pivot_row].clone();
                for (x, &p) in rows[r2].iter_mut().zip(&pivot) {
                    *x = field.sub(*x, field.mul(factor, p));
                }
            }
        }
        pivot_row += 1;
        rank += 1;
        if pivot_row == rows.len() {
            break;
        }
    }
    rank
}

/// Positions where some pair of distinct words agrees (0-based).
pub fn agreement_set(words: &[Word]) -> Result<Vec<usize>> {
    let mut distinct: Vec<&Word> = Vec::new();
    for w in words {
        if !distinct.contains(&w) {
            distinct.push(w);
        }
    }
    if distinct.len() < 2 {
        return Err(Error::usage(
            "agreement set needs at least 2 distinct words",
        ));
    }
    let n = distinct[0].len();
    if distinct.iter().any(|w| w.len() != n) {
        return Err(Error::usage("words must share a length"));
    }
    let mut out = Vec::new();
    for i in 0..n {
        let mut syms: Vec<Symbol> = distinct.iter().map(|w| w[i]).collect();
        syms.sort_unstable();
        let before = syms.len();
        syms.dedup();
        if syms.len() < before {
            out.push(i);
        }
    }
    Ok(out)
}

/// Bipartite graph of a code: left vertices are the distinct codewords,
/// right vertices are (position, symbol) pairs, and codeword c neighbors
/// {(i, c_i)}. Every left vertex has degree exactly n.
#[derive(Debug, Clone)]
pub struct CodeBipartiteGraph {
    codewords: Vec<Word>,
    len: usize,
    q: u32,
}

/// Worst subset found by the expansion check.
#[derive(Debug, Clone)]
pub struct ExpansionWitness {
    /// Indices into [`CodeBipartiteGraph::left`].
    pub subset: Vec<usize>,
    pub neighborhood_size: usize,
    pub required: f64,
}

#[derive(Debug, Clone)]
pub struct ExpansionCheck {
    pub passed: bool,
    pub exhaustive: bool,
    pub subsets_checked: u64,
    pub worst: ExpansionWitness,
}

pub fn code_graph(code: &LinearCode) -> Result<CodeBipartiteGraph> {
    Ok(CodeBipartiteGraph {
        codewords: code.distinct_codewords()?,
        len: code.len(),
        q: code.field().q(),
    })
}

impl CodeBipartiteGraph {
    pub fn left(&self) -> &[Word] {
        &self.codewords
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.codewords.is_empty()
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    /// |N(S)| for a subset of left-vertex indices: per position, the number
    /// of distinct symbols the subset takes there.
    pub fn neighborhood_size(&self, subset: &[usize]) -> usize {
        let mut total = 0;
        let mut syms: Vec<Symbol> = Vec::with_capacity(subset.len());
        for i in 0..self.len {
            syms.clear();
            syms.extend(subset.iter().map(|&c| self.codewords[c][i]));
            syms.sort_unstable();
            syms.dedup();
            total += syms.len();
        }
        total
    }

    /// Check |N(S)| >= n |S| (1 - eps) for all size-kk subsets S
    /// (exhaustively within budget, or on random subsets when sampled).
    /// The real-valued threshold comparison carries a 1e-9 slack.
    pub fn check_unbalanced_expansion(
        &self,
        kk: usize,
        eps: f64,
        mode: SearchMode,
    ) -> Result<ExpansionCheck> {
        let nleft = self.codewords.len();
        if kk < 1 || kk > nleft {
            return Err(Error::usage(format!(
                "subset size {kk} out of range for {nleft} codewords"
            )));
        }
        if !(0.0..=1.0).contains(&eps) {
            return Err(Error::usage("eps must lie in [0,1]"));
        }
        let required = (self.len * kk) as f64 * (1.0 - eps);
        let mut worst: Option<(usize, Vec<usize>)> = None;
        let mut checked = 0u64;
        let exhaustive = match mode {
            SearchMode::Exhaustive => {
                let space = binomial(nleft as u64, kk as u64);
                if space > SUBSET_SCAN_CAP {
                    return Err(Error::Infeasible {
                        what: "subset scan",
                        size: space,
                        budget: SUBSET_SCAN_CAP,
                    });
                }
                let mut subset: Vec<usize> = (0..kk).collect();
                loop {
                    checked += 1;
                    let nsize = self.neighborhood_size(&subset);
                    if worst.as_ref().map(|(w, _)| nsize < *w).unwrap_or(true) {
                        worst = Some((nsize, subset.clone()));
                    }
                    if !next_combination(&mut subset, nleft) {
                        break;
                    }
                }
                true
            }
            SearchMode::Sampled { samples, seed } => {
                let mut rng = BitLedgerRng::new(seed);
                let mut pool: Vec<usize> = (0..nleft).collect();
                for _ in 0..samples {
                    // Partial Fisher-Yates for a random kk-subset.
                    for i in 0..kk {
                        let j = i + rng.uniform((nleft - i) as u64) as usize;
                        pool.swap(i, j);
                    }
                    let mut subset: Vec<usize> = pool[..kk].to_vec();
                    subset.sort_unstable();
                    checked += 1;
                    let nsize = self.neighborhood_size(&subset);
                    if worst.as_ref().map(|(w, _)| nsize < *w).unwrap_or(true) {
                        worst = Some((nsize, subset));
                    }
                }
                false
            }
        };
        let (nsize, subset) = worst.expect("at least one subset inspected");
        Ok(ExpansionCheck {
            passed: nsize as f64 >= required - 1e-9,
            exhaustive,
            subsets_checked: checked,
            worst: ExpansionWitness {
                subset,
                neighborhood_size: nsize,
                required,
            },
        })
    }
}

/// Advance `subset` to the next k-combination of [0, n) in lexicographic
/// order; false when exhausted.
pub(crate) fn next_combination(subset: &mut [usize], n: usize) -> bool {
    let k = subset.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if subset[i] < n - (k - i) {
            subset[i] += 1;
            for j in i + 1..k {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
