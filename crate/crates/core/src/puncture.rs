//! Puncturing maps: index sequences into a mother code's coordinates, with
//! provenance and an exact random-bit ledger.
//!
//! A pseudorandom puncturing reads its indices off an expander random walk;
//! a uniform puncturing draws them i.i.d. Both sample with replacement.
//! Applying a map selects generator columns; the resulting code keeps its
//! full k x n generator even when the rank collapses, because the rate
//! experiments measure exactly those collapse events.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::codes::LinearCode;
use crate::error::{Error, Result};
use crate::expander::RegularGraph;
use crate::gf::{Symbol, Word};
use crate::rng::{bits_for, BitLedgerRng};

/// Where a map's indices came from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    Pseudorandom { graph: String, seed: u64 },
    Uniform { seed: u64 },
    Explicit,
}

/// An (m -> n) puncturing: n indices into [m], repeats permitted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PuncturingMap {
    source_len: usize,
    indices: Vec<u32>,
    provenance: Provenance,
    bits_consumed: u64,
}

impl PuncturingMap {
    /// Indices from a length-n random walk on a certified graph. Refuses
    /// uncertified graphs unless `allow_uncertified` is set.
    pub fn pseudorandom(
        graph: &RegularGraph,
        n: usize,
        rng: &mut BitLedgerRng,
        allow_uncertified: bool,
    ) -> Result<PuncturingMap> {
        if graph.lambda().is_none() && !allow_uncertified {
            return Err(Error::usage(
                "graph has no certified spectral bound; certify it or pass the override",
            ));
        }
        let seed = rng.seed();
        let walk = graph.walk(n, rng)?;
        Ok(PuncturingMap {
            source_len: graph.m(),
            indices: walk.indices,
            provenance: Provenance::Pseudorandom {
                graph: graph.label().to_string(),
                seed,
            },
            bits_consumed: walk.bits_consumed,
        })
    }

    /// i.i.d. uniform indices; idealized ledger n * ceil(log2 m).
    pub fn uniform(m: usize, n: usize, rng: &mut BitLedgerRng) -> Result<PuncturingMap> {
        if m < 1 || n < 1 {
            return Err(Error::usage("source and target lengths must be positive"));
        }
        let seed = rng.seed();
        let indices: Vec<u32> = (0..n).map(|_| rng.uniform(m as u64) as u32).collect();
        Ok(PuncturingMap {
            source_len: m,
            indices,
            provenance: Provenance::Uniform { seed },
            bits_consumed: n as u64 * u64::from(bits_for(m as u64)),
        })
    }

    /// Explicitly given indices (no randomness, zero bits).
    pub fn explicit(m: usize, indices: Vec<u32>) -> Result<PuncturingMap> {
        if indices.is_empty() {
            return Err(Error::usage("a puncturing needs at least one index"));
        }
        if let Some(&bad) = indices.iter().find(|&&i| i as usize >= m) {
            return Err(Error::usage(format!("index {bad} out of range [0,{m})")));
        }
        Ok(PuncturingMap {
            source_len: m,
            indices,
            provenance: Provenance::Explicit,
            bits_consumed: 0,
        })
    }

    pub fn source_len(&self) -> usize {
        self.source_len
    }

    pub fn target_len(&self) -> usize {
        self.indices.len()
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn bits_consumed(&self) -> u64 {
        self.bits_consumed
    }

    /// phi(u) = (u_{i_1}, ..., u_{i_n}).
    pub fn project(&self, word: &[Symbol]) -> Result<Word> {
        if word.len() != self.source_len {
            return Err(Error::usage(format!(
                "word length {} does not match source length {}",
                word.len(),
                self.source_len
            )));
        }
        Ok(self.indices.iter().map(|&i| word[i as usize]).collect())
    }

    /// Punctured code: generator columns selected by the map. Design rate
    /// k/n and the recomputed rank live on the returned code.
    pub fn apply(&self, code: &LinearCode) -> Result<LinearCode> {
        if code.len() != self.source_len {
            return Err(Error::usage(format!(
                "code length {} does not match map source length {}",
                code.len(),
                self.source_len
            )));
        }
        let k = code.dimension();
        let n = self.indices.len();
        let mut gen = Vec::with_capacity(k * n);
        for row in 0..k {
            let src = code.generator_row(row);
            gen.extend(self.indices.iter().map(|&i| src[i as usize]));
        }
        LinearCode::new(code.field().clone(), k, n, gen)
    }

    /// Composition: `outer` maps [m] -> n1, `inner` selects into [n1];
    /// the result maps [m] -> n2 with indices outer[inner[j]]. Applying it
    /// equals applying outer then inner.
    pub fn compose(outer: &PuncturingMap, inner: &PuncturingMap) -> Result<PuncturingMap> {
        if inner.source_len != outer.target_len() {
            return Err(Error::usage(format!(
                "inner source length {} does not match outer target length {}",
                inner.source_len,
                outer.target_len()
            )));
        }
        let indices = inner
            .indices
            .iter()
            .map(|&j| outer.indices[j as usize])
            .collect();
        Ok(PuncturingMap {
            source_len: outer.source_len,
            indices,
            provenance: Provenance::Explicit,
            bits_consumed: outer.bits_consumed + inner.bits_consumed,
        })
    }

    /// Text form: "m n", the n indices on one line, then a provenance line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.source_len, self.indices.len());
        let row: Vec<String> = self.indices.iter().map(|i| i.to_string()).collect();
        let _ = writeln!(out, "{}", row.join(" "));
        match &self.provenance {
            Provenance::Pseudorandom { graph, seed } => {
                let _ = writeln!(out, "provenance pseudorandom {graph} {seed:#x}");
            }
            Provenance::Uniform { seed } => {
                let _ = writeln!(out, "provenance uniform {seed:#x}");
            }
            Provenance::Explicit => {
                let _ = writeln!(out, "provenance explicit");
            }
        }
        out
    }

    pub fn from_text(text: &str) -> Result<PuncturingMap> {
        let bad = |msg: &str| Error::Format {
            what: "puncturing map",
            msg: msg.to_string(),
        };
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| bad("missing header"))?;
        let mut it = header.split_whitespace();
        let m: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| bad("bad m"))?;
        let n: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| bad("bad n"))?;
        let idx_line = lines.next().ok_or_else(|| bad("missing indices"))?;
        let indices: Vec<u32> = idx_line
            .split_whitespace()
            .map(|t| t.parse::<u32>().map_err(|_| bad("bad index")))
            .collect::<Result<_>>()?;
        if indices.len() != n {
            return Err(bad("index count does not match header"));
        }
        let mut map = PuncturingMap::explicit(m, indices)?;
        if let Some(line) = lines.next() {
            let toks: Vec<&str> = line.split_whitespace().collect();
            map.provenance = match toks.as_slice() {
                ["provenance", "explicit"] => Provenance::Explicit,
                ["provenance", "uniform", seed] => Provenance::Uniform {
                    seed: parse_seed(seed).ok_or_else(|| bad("bad seed"))?,
                },
                ["provenance", "pseudorandom", graph, seed] => Provenance::Pseudorandom {
                    graph: graph.to_string(),
                    seed: parse_seed(seed).ok_or_else(|| bad("bad seed"))?,
                },
                _ => return Err(bad("bad provenance line")),
            };
        }
        Ok(map)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_text())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<PuncturingMap> {
        PuncturingMap::from_text(&fs::read_to_string(path)?)
    }
}

fn parse_seed(tok: &str) -> Option<u64> {
    if let Some(hex) = tok.strip_prefix("0x") {
        u64::from_str_radix(hex, 16).ok()
    } else {
        tok.parse().ok()
    }
}

/// Does the punctured code keep the mother's design rate? True iff no
/// nonzero mother codeword is annihilated, equivalently the punctured
/// generator still has rank k. On failure the witness is a killed codeword.
#[derive(Debug, Clone)]
pub struct RateCheck {
    pub holds: bool,
    pub punctured_rank: usize,
    /// Nonzero mother codeword u with phi(u) = 0, when the rate collapsed.
    pub killed: Option<Word>,
}

pub fn rate_equals_design(map: &PuncturingMap, code: &LinearCode) -> Result<RateCheck> {
    let punctured = map.apply(code)?;
    let rank = punctured.rank();
    if rank == code.dimension() {
        return Ok(RateCheck {
            holds: true,
            punctured_rank: rank,
            killed: None,
        });
    }
    let killed = punctured
        .left_nullspace_vector()
        .map(|v| code.encode(&v))
        .transpose()?
        // A rank-deficient mother can map the null message to zero; only a
        // nonzero annihilated codeword is a meaningful witness.
        .filter(|u| u.iter().any(|&s| s != 0));
    Ok(RateCheck {
        holds: false,
        punctured_rank: rank,
        killed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::{Field, Modulus};
    use std::sync::Arc;

    fn gf2() -> Arc<Field> {
        Field::new(2, 1, Modulus::Auto).unwrap()
    }

    #[test]
    fn project_is_definitional_substitution() {
        // Indices (3,1,3), 0-based: phi(u) = (u_3, u_1, u_3).
        let map = PuncturingMap::explicit(5, vec![3, 1, 3]).unwrap();
        assert_eq!(
            map.project(&[10, 11, 12, 13, 14]).unwrap(),
            vec![13, 11, 13]
        );
        // n = 1: a single coordinate projection.
        let one = PuncturingMap::explicit(5, vec![2]).unwrap();
        assert_eq!(one.project(&[10, 11, 12, 13, 14]).unwrap(), vec![12]);
    }

    #[test]
    fn k2_walk_pairs_are_uniform_over_the_two_orders() {
        // On K_2 a length-2 walk must alternate: (0,1) or (1,0), never a
        // repeat. Both orders occur over many seeds.
        let g = crate::expander::RegularGraph::complete(2).unwrap();
        let mut saw = [0u32; 2];
        for seed in 0..200 {
            let mut rng = BitLedgerRng::new(seed);
            let map = PuncturingMap::pseudorandom(&g, 2, &mut rng, false).unwrap();
            match map.indices() {
                [0, 1] => saw[0] += 1,
                [1, 0] => saw[1] += 1,
                other => panic!("impossible K2 walk {other:?}"),
            }
        }
        assert!(saw[0] > 50 && saw[1] > 50, "{saw:?}");
    }

    #[test]
    fn uncertified_graph_is_refused_without_override() {
        let mut rng = BitLedgerRng::new(4);
        let g = crate::expander::RegularGraph::random_regular(8, 2, &mut rng).unwrap();
        assert!(PuncturingMap::pseudorandom(&g, 3, &mut rng, false).is_err());
        assert!(PuncturingMap::pseudorandom(&g, 3, &mut rng, true).is_ok());
    }

    #[test]
    fn uniform_ledger_and_determinism() {
        let mut rng = BitLedgerRng::new(1);
        let map = PuncturingMap::uniform(16, 10, &mut rng).unwrap();
        assert_eq!(map.bits_consumed(), 40);
        let mut rng2 = BitLedgerRng::new(1);
        let map2 = PuncturingMap::uniform(16, 10, &mut rng2).unwrap();
        assert_eq!(map.indices(), map2.indices());
        // Singleton source: every index is 0 and no bits are consumed.
        let mut rng3 = BitLedgerRng::new(2);
        let tiny = PuncturingMap::uniform(1, 7, &mut rng3).unwrap();
        assert!(tiny.indices().iter().all(|&i| i == 0));
        assert_eq!(tiny.bits_consumed(), 0);
    }

    #[test]
    fn apply_identity_and_repetition() {
        let code = LinearCode::hadamard(gf2(), 2).unwrap();
        let id = PuncturingMap::explicit(4, vec![0, 1, 2, 3]).unwrap();
        let same = id.apply(&code).unwrap();
        assert_eq!(same.generator(), code.generator());

        let rep = LinearCode::repetition(gf2(), 6).unwrap();
        let map = PuncturingMap::explicit(6, vec![0, 3, 3, 5]).unwrap();
        let punct = map.apply(&rep).unwrap();
        assert_eq!(punct.generator(), &[1, 1, 1, 1]);
        assert_eq!(punct.rank(), 1);
    }

    #[test]
    fn apply_hadamard_columns() {
        // Columns 1 and 2 (0-based) of the k=2 binary Hadamard generator are
        // the unit points: rank 2.
        let code = LinearCode::hadamard(gf2(), 2).unwrap();
        let map = PuncturingMap::explicit(4, vec![1, 2]).unwrap();
        let punct = map.apply(&code).unwrap();
        assert_eq!(punct.rank(), 2);
        assert!((punct.design_rate() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rate_check_repetition_always_holds() {
        let rep = LinearCode::repetition(gf2(), 8).unwrap();
        for idx in [vec![0u32], vec![7, 7, 7], vec![1, 2, 3]] {
            let map = PuncturingMap::explicit(8, idx).unwrap();
            let chk = rate_equals_design(&map, &rep).unwrap();
            assert!(chk.holds);
        }
    }

    #[test]
    fn rate_check_zero_column_collapse() {
        // Column 0 of the Hadamard generator is the all-zero evaluation
        // point, so puncturing onto it kills every codeword: rank 0.
        let code = LinearCode::hadamard(gf2(), 2).unwrap();
        let map = PuncturingMap::explicit(4, vec![0, 0, 0]).unwrap();
        let chk = rate_equals_design(&map, &code).unwrap();
        assert!(!chk.holds);
        assert_eq!(chk.punctured_rank, 0);
        let killed = chk.killed.unwrap();
        assert!(killed.iter().any(|&s| s != 0));
        assert_eq!(map.project(&killed).unwrap(), vec![0, 0, 0]);
    }

    #[test]
    fn rate_check_avoided_support() {
        // A codeword supported on S dies under a map avoiding S.
        let f = gf2();
        let code = LinearCode::new(Arc::clone(&f), 2, 4, vec![1, 1, 0, 0, 0, 0, 1, 1]).unwrap();
        let map = PuncturingMap::explicit(4, vec![2, 3]).unwrap();
        let chk = rate_equals_design(&map, &code).unwrap();
        assert!(!chk.holds);
        let killed = chk.killed.unwrap();
        assert_eq!(killed, vec![1, 1, 0, 0]);
    }

    #[test]
    fn projection_is_linear() {
        let f = gf2();
        let code = LinearCode::hadamard(Arc::clone(&f), 3).unwrap();
        let mut rng = BitLedgerRng::new(5);
        let map = PuncturingMap::uniform(8, 5, &mut rng).unwrap();
        let words = code.codewords().unwrap();
        for _ in 0..30 {
            let a = &words[rng.uniform(8) as usize];
            let b = &words[rng.uniform(8) as usize];
            let sum: Word = a.iter().zip(b).map(|(&x, &y)| f.add(x, y)).collect();
            let pa = map.project(a).unwrap();
            let pb = map.project(b).unwrap();
            let psum: Word = pa.iter().zip(&pb).map(|(&x, &y)| f.add(x, y)).collect();
            assert_eq!(map.project(&sum).unwrap(), psum);
        }
    }

    #[test]
    fn composition_matches_sequential_application() {
        let mut rng = BitLedgerRng::new(17);
        let code = LinearCode::hadamard(gf2(), 3).unwrap();
        for _ in 0..20 {
            let m1 = PuncturingMap::uniform(8, 6, &mut rng).unwrap();
            let m2 = PuncturingMap::uniform(6, 4, &mut rng).unwrap();
            let sequential = m2.apply(&m1.apply(&code).unwrap()).unwrap();
            let composed = PuncturingMap::compose(&m1, &m2).unwrap();
            let direct = composed.apply(&code).unwrap();
            assert_eq!(sequential.generator(), direct.generator());
        }
    }

    #[test]
    fn map_file_roundtrip() {
        let g = crate::expander::RegularGraph::complete(8).unwrap();
        let mut rng = BitLedgerRng::new(0xbeef);
        let map = PuncturingMap::pseudorandom(&g, 5, &mut rng, false).unwrap();
        let text = map.to_text();
        let back = PuncturingMap::from_text(&text).unwrap();
        assert_eq!(back.indices(), map.indices());
        assert_eq!(back.source_len(), 8);
        assert_eq!(back.provenance(), map.provenance());
        assert!(PuncturingMap::from_text("4 2\n0 9\n").is_err());
    }
}
