//! d-regular multigraphs with a certified spectral bound, random walks with
//! exact bit accounting, and the hitting-set bound.
//!
//! Graphs come from two constructors: complete graphs (known spectrum, the
//! truly-random baseline) and permutation-model random regular multigraphs
//! (union of d/2 random permutations; self-loops and multi-edges allowed).
//! `certify` upper-bounds max(|lambda_2|, |lambda_m|)/d numerically by
//! deflated power iteration on the shifted operators dI + A and dI - A; the
//! shifts keep the iteration from oscillating when the extreme eigenvalues
//! have equal magnitude (e.g. bipartite graphs).

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::rng::{bits_for, BitLedgerRng};

/// A d-regular multigraph on `m` vertices stored as per-vertex neighbor
/// slots. The slot multiset is symmetric: (u,v) appears in u's slots once
/// per appearance of (v,u) in v's.
#[derive(Debug, Clone)]
pub struct RegularGraph {
    m: usize,
    d: usize,
    /// Row-major m x d neighbor table.
    slots: Vec<u32>,
    lambda: Option<f64>,
    label: String,
}

/// Result of a length-n walk: the vertex sequence and the idealized number
/// of random bits it costs, `ceil(log2 m) + (n-1) * ceil(log2 d)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkTrace {
    pub indices: Vec<u32>,
    pub bits_consumed: u64,
}

/// Outcome of spectral certification.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CertifyOutcome {
    Certified {
        lambda: f64,
        iterations: u64,
    },
    /// Iteration cap hit before the residual criterion; the graph stays
    /// uncertified and `best` is the largest estimate seen.
    Unconverged {
        best: f64,
        iterations: u64,
    },
}

/// The two bounds of the hitting-set lemma: the exact product
/// `prod (sqrt(beta_i beta_{i+1}) + lambda)` and the weaker
/// `(max beta + lambda)^(n-1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HittingBound {
    pub product: f64,
    pub weak: f64,
}

impl RegularGraph {
    /// Complete graph K_m. Known spectrum {d, -1, ..., -1} gives
    /// lambda = 1/(m-1) exactly.
    pub fn complete(m: usize) -> Result<RegularGraph> {
        if m < 2 {
            return Err(Error::usage("complete graph needs at least 2 vertices"));
        }
        let d = m - 1;
        let mut slots = Vec::with_capacity(m * d);
        for u in 0..m {
            for v in 0..m {
                if v != u {
                    slots.push(v as u32);
                }
            }
        }
        Ok(RegularGraph {
            m,
            d,
            slots,
            lambda: Some(1.0 / (m as f64 - 1.0)),
            label: format!("complete-m{m}"),
        })
    }

    /// Permutation-model random d-regular multigraph: the union of d/2
    /// uniform permutations of [m], each contributing an out-slot and an
    /// in-slot per vertex. Requires even d. Uncertified until
    /// [`RegularGraph::certify`] succeeds.
    pub fn random_regular(m: usize, d: usize, rng: &mut BitLedgerRng) -> Result<RegularGraph> {
        if d == 0 || !d.is_multiple_of(2) {
            return Err(Error::usage(
                "permutation-model degree must be even and nonzero",
            ));
        }
        if m < d + 1 {
            return Err(Error::usage(format!(
                "need at least d+1 = {} vertices, got {m}",
                d + 1
            )));
        }
        let seed = rng.seed();
        let mut slot_lists: Vec<Vec<u32>> = vec![Vec::with_capacity(d); m];
        let mut perm: Vec<u32> = (0..m as u32).collect();
        for _ in 0..d / 2 {
            for (i, v) in perm.iter_mut().enumerate() {
                *v = i as u32;
            }
            rng.shuffle(&mut perm);
            for u in 0..m {
                let v = perm[u] as usize;
                slot_lists[u].push(v as u32);
                slot_lists[v].push(u as u32);
            }
        }
        let mut slots = Vec::with_capacity(m * d);
        for list in &slot_lists {
            debug_assert_eq!(list.len(), d);
            slots.extend_from_slice(list);
        }
        Ok(RegularGraph {
            m,
            d,
            slots,
            lambda: None,
            label: format!("random-regular-m{m}-d{d}-seed{seed:#x}"),
        })
    }

    /// Build from an explicit slot table, validating regularity and slot
    /// symmetry.
    pub fn from_slots(m: usize, d: usize, slots: Vec<u32>) -> Result<RegularGraph> {
        if slots.len() != m * d {
            return Err(Error::usage(format!(
                "expected {} slots for m={m}, d={d}, got {}",
                m * d,
                slots.len()
            )));
        }
        if let Some(&bad) = slots.iter().find(|&&v| v as usize >= m) {
            return Err(Error::usage(format!(
                "slot target {bad} out of range [0,{m})"
            )));
        }
        // Symmetry of the slot multiset: count directed pairs both ways.
        let mut counts = std::collections::HashMap::<(u32, u32), i64>::new();
        for u in 0..m {
            for j in 0..d {
                let v = slots[u * d + j];
                *counts.entry((u as u32, v)).or_default() += 1;
                *counts.entry((v, u as u32)).or_default() -= 1;
            }
        }
        if counts.values().any(|&c| c != 0) {
            return Err(Error::usage(
                "slot multiset is not symmetric: some edge (u,v) lacks its (v,u) twin",
            ));
        }
        Ok(RegularGraph {
            m,
            d,
            slots,
            lambda: None,
            label: "explicit".to_string(),
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn degree(&self) -> usize {
        self.d
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn neighbor(&self, v: usize, slot: usize) -> u32 {
        self.slots[v * self.d + slot]
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.slots[v * self.d..(v + 1) * self.d]
    }

    /// Certified upper bound on max(|lambda_2|, |lambda_m|)/d, or None.
    pub fn lambda(&self) -> Option<f64> {
        self.lambda
    }

    /// Apply the adjacency operator: y = A x (multigraph multiplicity).
    fn adjacency_apply(&self, x: &[f64], y: &mut [f64]) {
        for (u, out) in y.iter_mut().enumerate() {
            let mut acc = 0.0;
            for j in 0..self.d {
                acc += x[self.slots[u * self.d + j] as usize];
            }
            *out = acc;
        }
    }

    /// Numerically certify the normalized spectral bound to within `tol`
    /// (tol in (0, 0.1]). Runs deflated power iteration on dI + A and
    /// dI - A with 3 seeded restarts each; on success stores the bound.
    pub fn certify(&mut self, tol: f64) -> Result<CertifyOutcome> {
        if !(tol > 0.0 && tol <= 0.1) {
            return Err(Error::usage("certification tolerance must lie in (0, 0.1]"));
        }
        let m = self.m;
        let d = self.d as f64;
        let cap = (50.0 * (m as f64).ln().max(1.0) / tol).ceil() as u64;
        let target_resid = 0.25 * tol * d;

        let mut rng = BitLedgerRng::new(0x5eed_ce27 ^ ((m as u64) << 20) ^ self.d as u64);
        let mut best: f64 = 0.0;
        let mut iterations = 0u64;
        let mut converged = true;

        // sign = +1: dI + A (top deflated eigenvalue d + lambda_2);
        // sign = -1: dI - A (top deflated eigenvalue d - lambda_m).
        for sign in [1.0f64, -1.0] {
            let mut branch_best = f64::NEG_INFINITY;
            let mut branch_converged = false;
            for _restart in 0..3 {
                let mut v: Vec<f64> = (0..m).map(|_| rng.uniform_f64() - 0.5).collect();
                let mut w = vec![0.0f64; m];
                deflate_and_normalize(&mut v);
                let mut ok = false;
                for _ in 0..cap {
                    iterations += 1;
                    self.adjacency_apply(&v, &mut w);
                    for i in 0..m {
                        w[i] = d * v[i] + sign * w[i];
                    }
                    deflate(&mut w);
                    let rho = dot(&v, &w);
                    let resid = residual(&w, &v, rho);
                    let nrm = norm(&w);
                    if nrm < 1e-300 {
                        // The deflated operator annihilated v (eigenvalue 0
                        // throughout); the estimate is exact.
                        ok = true;
                        break;
                    }
                    for i in 0..m {
                        v[i] = w[i] / nrm;
                    }
                    if resid <= target_resid {
                        ok = true;
                        break;
                    }
                }
                if ok {
                    branch_converged = true;
                }
                // Final Rayleigh quotient plus residual over-approximates the
                // top eigenvalue of the deflated operator once converged.
                self.adjacency_apply(&v, &mut w);
                for i in 0..m {
                    w[i] = d * v[i] + sign * w[i];
                }
                deflate(&mut w);
                let rho = dot(&v, &w);
                let resid = residual(&w, &v, rho);
                branch_best = branch_best.max(rho + resid);
            }
            if !branch_converged {
                converged = false;
            }
            best = best.max((branch_best - d) / d);
        }

        let lambda = best.clamp(0.0, 1.0);
        if converged {
            self.lambda = Some(lambda);
            Ok(CertifyOutcome::Certified { lambda, iterations })
        } else {
            Ok(CertifyOutcome::Unconverged {
                best: lambda,
                iterations,
            })
        }
    }

    /// Length-n stationary random walk: uniform start, then uniform slot
    /// choices. The reported `bits_consumed` is the idealized ledger figure
    /// `ceil(log2 m) + (n-1) * ceil(log2 d)`; `rng.bits_drawn()` additionally
    /// counts rejection overhead.
    pub fn walk(&self, n: usize, rng: &mut BitLedgerRng) -> Result<WalkTrace> {
        if n < 1 {
            return Err(Error::usage("walk length must be at least 1"));
        }
        let mut indices = Vec::with_capacity(n);
        let mut cur = rng.uniform(self.m as u64) as u32;
        indices.push(cur);
        for _ in 1..n {
            let slot = rng.uniform(self.d as u64) as usize;
            cur = self.slots[cur as usize * self.d + slot];
            indices.push(cur);
        }
        let bits_consumed = u64::from(bits_for(self.m as u64))
            + (n as u64 - 1) * u64::from(bits_for(self.d as u64));
        Ok(WalkTrace {
            indices,
            bits_consumed,
        })
    }

    /// Plain-text serialization: "m d", m lines of d neighbor indices,
    /// then "lambda <value>" when certified.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.m, self.d);
        for u in 0..self.m {
            let row: Vec<String> = self.neighbors(u).iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "{}", row.join(" "));
        }
        if let Some(l) = self.lambda {
            let _ = writeln!(out, "lambda {l}");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<RegularGraph> {
        let bad = |msg: &str| Error::Format {
            what: "graph",
            msg: msg.to_string(),
        };
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| bad("missing header"))?;
        let mut it = header.split_whitespace();
        let m: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| bad("bad m in header"))?;
        let d: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| bad("bad d in header"))?;
        let mut slots = Vec::with_capacity(m * d);
        for _ in 0..m {
            let line = lines.next().ok_or_else(|| bad("missing adjacency row"))?;
            for tok in line.split_whitespace() {
                slots.push(tok.parse::<u32>().map_err(|_| bad("bad neighbor index"))?);
            }
        }
        let mut g = RegularGraph::from_slots(m, d, slots)?;
        if let Some(line) = lines.next() {
            let mut it = line.split_whitespace();
            match (it.next(), it.next()) {
                (Some("lambda"), Some(v)) => {
                    g.lambda = Some(v.parse().map_err(|_| bad("bad lambda value"))?);
                }
                _ => return Err(bad("unexpected trailing line")),
            }
        }
        Ok(g)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<RegularGraph> {
        let text = fs::read_to_string(path)?;
        let mut g = RegularGraph::from_text(&text)?;
        g.label = format!("file:{}", path.display());
        Ok(g)
    }
}

/// Hitting-set bound for a walk against per-step vertex sets of the given
/// densities: exact product form and the weaker max form.
pub fn hitting_bound(betas: &[f64], lambda: f64) -> Result<HittingBound> {
    if betas.is_empty() {
        return Err(Error::usage("hitting bound needs at least one density"));
    }
    if betas.iter().any(|&b| !(0.0..=1.0).contains(&b)) {
        return Err(Error::usage("densities must lie in [0,1]"));
    }
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::usage("lambda must lie in [0,1]"));
    }
    let mut product = 1.0;
    for pair in betas.windows(2) {
        product *= (pair[0] * pair[1]).sqrt() + lambda;
    }
    let max_beta = betas.iter().cloned().fold(0.0f64, f64::max);
    let weak = (max_beta + lambda).powi(betas.len() as i32 - 1);
    Ok(HittingBound { product, weak })
}

fn deflate(v: &mut [f64]) {
    let mean = v.iter().sum::<f64>() / v.len() as f64;
    v.iter_mut().for_each(|x| *x -= mean);
}

fn deflate_and_normalize(v: &mut [f64]) {
    deflate(v);
    let n = norm(v);
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    } else {
        // Degenerate restart vector; replace with a fixed deflated one.
        for (i, x) in v.iter_mut().enumerate() {
            *x = if i == 0 { 1.0 } else { 0.0 };
        }
        deflate(v);
        let n = norm(v);
        v.iter_mut().for_each(|x| *x /= n);
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

fn residual(w: &[f64], v: &[f64], rho: f64) -> f64 {
    w.iter()
        .zip(v)
        .map(|(wi, vi)| (wi - rho * vi).powi(2))
        .sum::<f64>()
        .sqrt()
}
