//! Experiment runner: builds the configured mother code and graph, runs
//! seeded Monte Carlo campaigns (in parallel, one derived seed per trial),
//! and aggregates machine-readable reports with Wilson intervals and the
//! applicable closed-form bounds.
//!
//! Every run is fully determined by (config, master seed): per-trial seeds
//! come from counter-mode splitting of the master seed, so any trial can be
//! replayed bit-for-bit from its index alone.

pub mod config;
pub mod report;

use std::sync::Arc;

use rayon::prelude::*;

pub use config::{ExperimentConfig, ExperimentKind, GraphSpec, MotherSpec, NoiseSpec};
pub use report::{CompareReport, GroupSummary, Report, TrialRow};

use crate::codes::{code_graph, LinearCode};
use crate::error::{Error, Result};
use crate::expander::{hitting_bound, RegularGraph};
use crate::gf::Field;
use crate::properties::channel::{mldu_decode, NoiseModel};
use crate::properties::{list_decodable, zero_error_list_recoverable};
use crate::puncture::{rate_equals_design, PuncturingMap};
use crate::rng::{bits_for, derive_seed, BitLedgerRng};
use crate::search::SearchMode;

/// Seed stream tags for non-trial randomness, far above any trial index.
const GRAPH_SEED_TAG: u64 = u64::MAX;
const SETS_SEED_TAG: u64 = u64::MAX - 1;

/// A random linear code sampled entry-wise, with its idealized bit ledger
/// `k * n * ceil(log2 q)`.
#[derive(Debug, Clone)]
pub struct SampledRlc {
    pub code: LinearCode,
    pub dimension: usize,
    pub rank: usize,
    pub bits_consumed: u64,
    /// True when rate * n was not integral and k was rounded down.
    pub rate_rounded: bool,
}

/// Sample an RLC of the given design rate: a floor(rate * n) x n generator
/// with i.i.d. uniform entries.
pub fn rlc_sample(
    field: Arc<Field>,
    n: usize,
    rate: f64,
    rng: &mut BitLedgerRng,
) -> Result<SampledRlc> {
    if !(0.0..=1.0).contains(&rate) {
        return Err(Error::usage("design rate must lie in [0,1]"));
    }
    let exact = rate * n as f64;
    let k = (exact + 1e-9).floor() as usize;
    let rate_rounded = (exact - k as f64).abs() > 1e-9;
    let code = LinearCode::random(Arc::clone(&field), k, n, rng)?;
    let rank = code.rank();
    Ok(SampledRlc {
        rank,
        dimension: k,
        bits_consumed: (k * n) as u64 * u64::from(bits_for(u64::from(field.q()))),
        rate_rounded,
        code,
    })
}

/// Fully built experiment context; `trial` is a pure function of the trial
/// index, which is what makes reports replayable.
pub struct Runner {
    config: ExperimentConfig,
    mother: Option<LinearCode>,
    graph: Option<RegularGraph>,
    noise: Option<NoiseModel>,
    rlc_field: Option<Arc<Field>>,
    /// Hitting-set membership vectors and their realized densities.
    sets: Vec<Vec<bool>>,
    betas: Vec<f64>,
    /// Chernoff membership vector and realized density.
    chernoff_set: Vec<bool>,
    actual_mu: f64,
    /// Group parameters: walk lengths or rates; one zero entry otherwise.
    params: Vec<f64>,
    notes: Vec<String>,
}

impl Runner {
    pub fn new(config: ExperimentConfig) -> Result<Runner> {
        let mut notes = Vec::new();
        let mother = config.mother.as_ref().map(|m| m.build()).transpose()?;
        let graph = config
            .graph
            .as_ref()
            .map(|g| {
                g.build(
                    config.certify_tol,
                    derive_seed(config.master_seed, GRAPH_SEED_TAG),
                )
            })
            .transpose()?;
        if let Some(g) = &graph {
            let lambda = g.lambda().expect("built graphs are certified");
            notes.push(format!("graph {} lambda {lambda}", g.label()));
            if let Some(target) = config.lambda_target {
                if lambda > target {
                    return Err(Error::usage(format!(
                        "certified lambda {lambda} exceeds target {target}"
                    )));
                }
            }
        }
        let noise = match (&config.noise, &mother) {
            (Some(spec), Some(code)) => Some(spec.build(code.field().q())?),
            (Some(spec), None) => {
                let field = config
                    .field
                    .as_deref()
                    .ok_or_else(|| Error::usage("noise needs a mother code or `field`"))?;
                Some(spec.build(config::parse_q_label(field)?.q())?)
            }
            (None, _) => None,
        };
        let rlc_field = match &config.field {
            Some(label) => Some(config::parse_q_label(label)?),
            None => mother.as_ref().map(|m| Arc::clone(m.field())),
        };

        let mut sets = Vec::new();
        let mut betas = Vec::new();
        let mut chernoff_set = Vec::new();
        let mut actual_mu = 0.0;
        let mut params = vec![0.0];
        match config.kind {
            ExperimentKind::HittingSet => {
                let g = graph
                    .as_ref()
                    .ok_or_else(|| Error::usage("hitting-set experiment requires `graph`"))?;
                let densities = config
                    .densities
                    .clone()
                    .ok_or_else(|| Error::usage("hitting-set experiment requires `densities`"))?;
                if densities.is_empty() {
                    return Err(Error::usage("densities must be nonempty"));
                }
                let mut rng = BitLedgerRng::new(derive_seed(config.master_seed, SETS_SEED_TAG));
                for &beta in &densities {
                    if !(0.0..=1.0).contains(&beta) {
                        return Err(Error::usage("densities must lie in [0,1]"));
                    }
                    let size = ((beta * g.m() as f64).round() as usize).min(g.m());
                    let mut verts: Vec<u32> = (0..g.m() as u32).collect();
                    rng.shuffle(&mut verts);
                    let mut mem = vec![false; g.m()];
                    for &v in verts.iter().take(size) {
                        mem[v as usize] = true;
                    }
                    sets.push(mem);
                    // The bound must use the realized densities.
                    betas.push(size as f64 / g.m() as f64);
                }
                notes.push(format!("realized densities {betas:?}"));
            }
            ExperimentKind::Chernoff => {
                let g = graph
                    .as_ref()
                    .ok_or_else(|| Error::usage("chernoff experiment requires `graph`"))?;
                let mu = config.require(config.mu, "mu")?;
                config.require(config.eps, "eps")?;
                let size = ((mu * g.m() as f64).round() as usize).min(g.m());
                chernoff_set = vec![false; g.m()];
                chernoff_set[..size].fill(true);
                actual_mu = size as f64 / g.m() as f64;
                params = config
                    .walk_lengths
                    .clone()
                    .unwrap_or_else(|| vec![50, 100, 200, 400])
                    .into_iter()
                    .map(|n| n as f64)
                    .collect();
                notes.push(format!("realized mu {actual_mu}"));
            }
            ExperimentKind::RlcThreshold => {
                let rates = config
                    .rates
                    .clone()
                    .ok_or_else(|| Error::usage("rlc-threshold experiment requires `rates`"))?;
                if rates.is_empty() {
                    return Err(Error::usage("rates must be nonempty"));
                }
                params = rates;
            }
            _ => {}
        }

        Ok(Runner {
            config,
            mother,
            graph,
            noise,
            rlc_field,
            sets,
            betas,
            chernoff_set,
            actual_mu,
            params,
            notes,
        })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    pub fn graph(&self) -> Option<&RegularGraph> {
        self.graph.as_ref()
    }

    /// Total trial count across parameter groups.
    pub fn total_trials(&self) -> u64 {
        self.params.len() as u64 * self.config.trials
    }

    fn mother(&self) -> Result<&LinearCode> {
        self.mother.as_ref().ok_or_else(|| {
            Error::usage(format!(
                "{} experiment requires `mother`",
                self.config.kind.name()
            ))
        })
    }

    fn graph_ref(&self) -> Result<&RegularGraph> {
        self.graph.as_ref().ok_or_else(|| {
            Error::usage(format!(
                "{} experiment requires `graph`",
                self.config.kind.name()
            ))
        })
    }

    /// Run one trial by global index; pure in (config, index).
    pub fn trial(&self, index: u64) -> Result<TrialRow> {
        let seed = derive_seed(self.config.master_seed, index);
        let mut rng = BitLedgerRng::new(seed);
        let group = (index / self.config.trials.max(1)) as usize;
        let param = self.params[group.min(self.params.len() - 1)];
        let cfg = &self.config;
        let (outcome, stat, bits) = match cfg.kind {
            ExperimentKind::RateLemma => {
                let mother = self.mother()?;
                let n = cfg.require(cfg.n, "n")?;
                let map = PuncturingMap::pseudorandom(self.graph_ref()?, n, &mut rng, false)?;
                let chk = rate_equals_design(&map, mother)?;
                (!chk.holds, chk.punctured_rank as f64, map.bits_consumed())
            }
            ExperimentKind::HittingSet => {
                let g = self.graph_ref()?;
                let walk = g.walk(self.sets.len(), &mut rng)?;
                let inside = walk
                    .indices
                    .iter()
                    .zip(&self.sets)
                    .take_while(|(&v, set)| set[v as usize])
                    .count();
                (inside == self.sets.len(), inside as f64, walk.bits_consumed)
            }
            ExperimentKind::Chernoff => {
                let g = self.graph_ref()?;
                let n = param as usize;
                let eps = cfg.require(cfg.eps, "eps")?;
                let walk = g.walk(n, &mut rng)?;
                let count = walk
                    .indices
                    .iter()
                    .filter(|&&v| self.chernoff_set[v as usize])
                    .count();
                let deviation = (count as f64 - n as f64 * self.actual_mu).abs();
                (deviation > n as f64 * eps, count as f64, walk.bits_consumed)
            }
            ExperimentKind::ListDecode => {
                let mother = self.mother()?;
                let n = cfg.require(cfg.n, "n")?;
                let rho = cfg.require(cfg.rho, "rho")?;
                let list_size = cfg.require(cfg.list_size, "list_size")?;
                let map = PuncturingMap::pseudorandom(self.graph_ref()?, n, &mut rng, false)?;
                let punct = map.apply(mother)?;
                let chk = list_decodable(&punct, rho, list_size)?;
                (!chk.decodable, punct.rank() as f64, map.bits_consumed())
            }
            ExperimentKind::ListRecover => {
                let mother = self.mother()?;
                let n = cfg.require(cfg.n, "n")?;
                let ell = cfg.require(cfg.ell, "ell")?;
                let list_size = cfg.require(cfg.list_size, "list_size")?;
                let map = PuncturingMap::pseudorandom(self.graph_ref()?, n, &mut rng, false)?;
                let punct = map.apply(mother)?;
                let chk =
                    zero_error_list_recoverable(&punct, ell, list_size, SearchMode::Exhaustive)?;
                (!chk.recoverable, punct.rank() as f64, map.bits_consumed())
            }
            ExperimentKind::Channel => {
                let mother = self.mother()?;
                let noise = self
                    .noise
                    .as_ref()
                    .ok_or_else(|| Error::usage("channel experiment requires `noise`"))?;
                let (code, bits) = match (&self.graph, cfg.n) {
                    (Some(g), Some(n)) => {
                        let map = PuncturingMap::pseudorandom(g, n, &mut rng, false)?;
                        (map.apply(mother)?, map.bits_consumed())
                    }
                    _ => (mother.clone(), 0),
                };
                let words = code.distinct_codewords()?;
                let x = &words[rng.uniform(words.len() as u64) as usize];
                let z = noise.sample_vector(code.len(), &mut rng);
                let field = code.field();
                let received: crate::gf::Word =
                    x.iter().zip(&z).map(|(&a, &b)| field.add(a, b)).collect();
                let failed = match mldu_decode(&code, &received, noise) {
                    Ok(out) => out.tie || out.codeword != *x,
                    Err(Error::Undecodable) => true,
                    Err(e) => return Err(e),
                };
                (failed, 0.0, bits)
            }
            ExperimentKind::RlcThreshold => {
                let field = self
                    .rlc_field
                    .clone()
                    .ok_or_else(|| Error::usage("rlc-threshold requires `field` or `mother`"))?;
                let n = cfg.require(cfg.n, "n")?;
                let rho = cfg.require(cfg.rho, "rho")?;
                let list_size = cfg.require(cfg.list_size, "list_size")?;
                let sample = rlc_sample(field, n, param, &mut rng)?;
                let chk = list_decodable(&sample.code, rho, list_size)?;
                (!chk.decodable, sample.rank as f64, sample.bits_consumed)
            }
            ExperimentKind::UnbalancedExpander => {
                let mother = self.mother()?;
                let kk = cfg.require(cfg.subset_size, "subset_size")?;
                let eps = cfg.require(cfg.eps, "eps")?;
                let (code, bits) = match (&self.graph, cfg.n) {
                    (Some(g), Some(n)) => {
                        let map = PuncturingMap::pseudorandom(g, n, &mut rng, false)?;
                        (map.apply(mother)?, map.bits_consumed())
                    }
                    _ => (mother.clone(), 0),
                };
                let bipartite = code_graph(&code)?;
                let chk = bipartite.check_unbalanced_expansion(kk, eps, SearchMode::Exhaustive)?;
                (!chk.passed, chk.worst.neighborhood_size as f64, bits)
            }
        };
        Ok(TrialRow {
            trial: index,
            seed,
            param,
            outcome,
            stat,
            bits,
        })
    }

    /// Closed-form reference bound for a parameter group, when the kind has
    /// one.
    fn bound_for(&self, param: f64) -> Option<f64> {
        match self.config.kind {
            ExperimentKind::RateLemma => self.rate_lemma_bound().ok(),
            ExperimentKind::HittingSet => {
                let lambda = self.graph.as_ref()?.lambda()?;
                hitting_bound(&self.betas, lambda).ok().map(|b| b.product)
            }
            _ => {
                let _ = param;
                None
            }
        }
    }

    /// Failure-probability bound for the design-rate experiment:
    /// q^(-eps n) with eps = 1 - log_q(1 + q eta + q lambda) - R, where R is
    /// the design rate k/n and eta the mother bias. Degenerate slack (eps
    /// <= 0) reports the trivial bound 1.
    fn rate_lemma_bound(&self) -> Result<f64> {
        let mother = self.mother()?;
        let n = self.config.require(self.config.n, "n")?;
        let lambda = self
            .graph_ref()?
            .lambda()
            .ok_or_else(|| Error::usage("graph is not certified"))?;
        let eta = match self.config.mother_eta {
            Some(e) => e,
            None => mother.bias()?,
        };
        let q = f64::from(mother.field().q());
        let rate = mother.dimension() as f64 / n as f64;
        let eps = 1.0 - (1.0 + q * eta + q * lambda).ln() / q.ln() - rate;
        if eps <= 0.0 {
            return Ok(1.0);
        }
        Ok(q.powf(-eps * n as f64).min(1.0))
    }

    /// Run all trials (in parallel, deterministically aggregated by index)
    /// and assemble the report.
    pub fn run(&self) -> Result<Report> {
        let rows: Vec<TrialRow> = (0..self.total_trials())
            .into_par_iter()
            .map(|t| self.trial(t))
            .collect::<Result<Vec<_>>>()?;
        let mut notes = self.notes.clone();
        if let ExperimentKind::RlcThreshold = self.config.kind {
            notes.push(self.threshold_note(&rows));
        }
        Ok(Report::from_rows(
            self.config.clone(),
            rows,
            |p| self.bound_for(p),
            notes,
        ))
    }

    fn threshold_note(&self, rows: &[TrialRow]) -> String {
        // Smallest grid rate at which at least half the sampled RLCs fail
        // the property (the Monte Carlo threshold estimate).
        for &rate in &self.params {
            let members: Vec<&TrialRow> = rows.iter().filter(|r| r.param == rate).collect();
            if members.is_empty() {
                continue;
            }
            let failures = members.iter().filter(|r| r.outcome).count();
            if failures * 2 >= members.len() {
                return format!("rlc-threshold estimate {rate}");
            }
        }
        "rlc-threshold estimate beyond grid".to_string()
    }
}

/// Build and run an experiment in one call.
pub fn run_experiment(config: ExperimentConfig) -> Result<Report> {
    Runner::new(config)?.run()
}

/// Re-run a single trial of a finished report by index; the row must match
/// bit-for-bit.
pub fn replay_trial(config: ExperimentConfig, index: u64) -> Result<TrialRow> {
    Runner::new(config)?.trial(index)
}

/// Idealized bit ledgers for the three sampling arms of
/// [`compare_puncturings`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ArmBits {
    pub pseudorandom: u64,
    pub uniform: u64,
    pub rlc: u64,
}

/// Run the configured property experiment under (a) pseudorandom
/// puncturing, (b) uniform puncturing, (c) fresh random linear codes, with
/// identical per-trial seeds, and report per-arm failure frequencies plus
/// the bit ledgers. The ledgers must be ordered
/// pseudorandom <= uniform <= rlc.
pub fn compare_puncturings(config: ExperimentConfig) -> Result<CompareReport> {
    match config.kind {
        ExperimentKind::ListDecode
        | ExperimentKind::ListRecover
        | ExperimentKind::RateLemma
        | ExperimentKind::Channel => {}
        other => {
            return Err(Error::usage(format!(
                "compare does not support the {} experiment",
                other.name()
            )))
        }
    }
    let runner = Runner::new(config.clone())?;
    let mother = runner.mother()?.clone();
    let graph = runner.graph_ref()?;
    let n = config.require(config.n, "n")?;
    let q = mother.field().q();
    let bits = ArmBits {
        pseudorandom: u64::from(bits_for(graph.m() as u64))
            + (n as u64 - 1) * u64::from(bits_for(graph.degree() as u64)),
        uniform: n as u64 * u64::from(bits_for(mother.len() as u64)),
        rlc: (mother.dimension() * n) as u64 * u64::from(bits_for(u64::from(q))),
    };
    if !(bits.pseudorandom <= bits.uniform && bits.uniform <= bits.rlc) {
        return Err(Error::usage(format!(
            "bit ledger ordering violated: pseudorandom {} / uniform {} / rlc {}",
            bits.pseudorandom, bits.uniform, bits.rlc
        )));
    }

    let design_rate = mother.dimension() as f64 / n as f64;
    let mut arms = Vec::new();
    for arm in ["pseudorandom", "uniform", "rlc"] {
        let rows: Vec<TrialRow> = (0..config.trials)
            .into_par_iter()
            .map(|t| -> Result<TrialRow> {
                let seed = derive_seed(config.master_seed, t);
                let mut rng = BitLedgerRng::new(seed);
                let (code, bits_used) = match arm {
                    "pseudorandom" => {
                        let map = PuncturingMap::pseudorandom(graph, n, &mut rng, false)?;
                        (map.apply(&mother)?, map.bits_consumed())
                    }
                    "uniform" => {
                        let map = PuncturingMap::uniform(mother.len(), n, &mut rng)?;
                        (map.apply(&mother)?, map.bits_consumed())
                    }
                    _ => {
                        let sample =
                            rlc_sample(Arc::clone(mother.field()), n, design_rate, &mut rng)?;
                        (sample.code, sample.bits_consumed)
                    }
                };
                let (outcome, stat) = arm_outcome(&config, &runner, &code, &mut rng)?;
                Ok(TrialRow {
                    trial: t,
                    seed,
                    param: 0.0,
                    outcome,
                    stat,
                    bits: bits_used,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let report = Report::from_rows(config.clone(), rows, |_| None, vec![format!("arm {arm}")]);
        arms.push((arm.to_string(), report));
    }
    Ok(CompareReport {
        arms,
        bits: (bits.pseudorandom, bits.uniform, bits.rlc),
    })
}

fn arm_outcome(
    config: &ExperimentConfig,
    runner: &Runner,
    code: &LinearCode,
    rng: &mut BitLedgerRng,
) -> Result<(bool, f64)> {
    match config.kind {
        ExperimentKind::RateLemma => {
            let rank = code.rank();
            Ok((rank < code.dimension(), rank as f64))
        }
        ExperimentKind::ListDecode => {
            let rho = config.require(config.rho, "rho")?;
            let list_size = config.require(config.list_size, "list_size")?;
            let chk = list_decodable(code, rho, list_size)?;
            Ok((!chk.decodable, code.rank() as f64))
        }
        ExperimentKind::ListRecover => {
            let ell = config.require(config.ell, "ell")?;
            let list_size = config.require(config.list_size, "list_size")?;
            let chk = zero_error_list_recoverable(code, ell, list_size, SearchMode::Exhaustive)?;
            Ok((!chk.recoverable, code.rank() as f64))
        }
        ExperimentKind::Channel => {
            let noise = runner
                .noise
                .as_ref()
                .ok_or_else(|| Error::usage("channel experiment requires `noise`"))?;
            let words = code.distinct_codewords()?;
            let x = &words[rng.uniform(words.len() as u64) as usize];
            let z = noise.sample_vector(code.len(), rng);
            let field = code.field();
            let received: crate::gf::Word =
                x.iter().zip(&z).map(|(&a, &b)| field.add(a, b)).collect();
            let failed = match mldu_decode(code, &received, noise) {
                Ok(out) => out.tie || out.codeword != *x,
                Err(Error::Undecodable) => true,
                Err(e) => return Err(e),
            };
            Ok((failed, 0.0))
        }
        _ => unreachable!("guarded by compare_puncturings"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rate_lemma_config(trials: u64, seed: u64) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::new(ExperimentKind::RateLemma, trials, seed);
        cfg.mother = Some(MotherSpec::Hadamard {
            q: "2".into(),
            k: 4,
        });
        cfg.graph = Some(GraphSpec::Complete { m: 16 });
        cfg.n = Some(10);
        cfg
    }

    #[test]
    fn rlc_sample_basics() {
        let field = config::parse_q_label("2").unwrap();
        let mut rng = BitLedgerRng::new(5);
        let s = rlc_sample(Arc::clone(&field), 8, 0.5, &mut rng).unwrap();
        assert_eq!(s.dimension, 4);
        assert_eq!(s.bits_consumed, 32);
        assert!(!s.rate_rounded);
        // Rate 0 gives the {0} code.
        let z = rlc_sample(Arc::clone(&field), 8, 0.0, &mut rng).unwrap();
        assert_eq!(z.dimension, 0);
        assert_eq!(z.code.distinct_codewords().unwrap().len(), 1);
        // Non-integral R*n is rounded down and flagged.
        let r = rlc_sample(field, 5, 0.5, &mut rng).unwrap();
        assert_eq!(r.dimension, 2);
        assert!(r.rate_rounded);
    }

    #[test]
    fn rlc_sample_is_reproducible() {
        let field = config::parse_q_label("3").unwrap();
        let a = rlc_sample(Arc::clone(&field), 6, 0.5, &mut BitLedgerRng::new(9)).unwrap();
        let b = rlc_sample(field, 6, 0.5, &mut BitLedgerRng::new(9)).unwrap();
        assert_eq!(a.code.generator(), b.code.generator());
    }

    #[test]
    fn rate_lemma_report_shape() {
        let report = run_experiment(rate_lemma_config(300, 11)).unwrap();
        assert_eq!(report.rows.len(), 300);
        let g = report.group().unwrap();
        assert_eq!(g.trials, 300);
        assert!(g.bound.is_some());
        // Walk ledger: ceil(log2 16) + 9 * ceil(log2 15) = 4 + 36.
        assert_eq!(g.bits_min, 40);
        assert_eq!(g.bits_max, 40);
        assert!(report.aggregates_consistent());
    }

    #[test]
    fn reports_are_deterministic_and_replayable() {
        let a = run_experiment(rate_lemma_config(100, 42)).unwrap();
        let b = run_experiment(rate_lemma_config(100, 42)).unwrap();
        assert_eq!(a.rows, b.rows);
        for &idx in &[0u64, 17, 99] {
            let replayed = replay_trial(rate_lemma_config(100, 42), idx).unwrap();
            assert_eq!(replayed, a.rows[idx as usize]);
        }
    }

    #[test]
    fn zero_trials_give_empty_report() {
        let report = run_experiment(rate_lemma_config(0, 1)).unwrap();
        assert!(report.rows.is_empty());
        assert!(report.groups.is_empty());
        assert!(!report.violated);
    }

    #[test]
    fn hitting_set_respects_bound() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::HittingSet, 20_000, 3);
        cfg.graph = Some(GraphSpec::Complete { m: 8 });
        cfg.densities = Some(vec![0.25, 0.5, 0.25, 0.5]);
        let report = run_experiment(cfg).unwrap();
        let g = report.group().unwrap();
        assert!(g.bound.is_some());
        assert!(
            !report.violated,
            "estimate {} bound {:?}",
            g.estimate, g.bound
        );
    }

    #[test]
    fn chernoff_groups_by_walk_length() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::Chernoff, 2_000, 5);
        cfg.graph = Some(GraphSpec::Complete { m: 16 });
        cfg.mu = Some(0.25);
        cfg.eps = Some(0.125);
        cfg.walk_lengths = Some(vec![25, 100]);
        let report = run_experiment(cfg).unwrap();
        assert_eq!(report.groups.len(), 2);
        let short = report.group_at(25.0).unwrap();
        let long = report.group_at(100.0).unwrap();
        assert!(long.estimate <= short.estimate + 3.0 * (short.sigma + long.sigma));
    }

    #[test]
    fn list_decode_experiment_runs() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::ListDecode, 50, 7);
        cfg.mother = Some(MotherSpec::Hadamard {
            q: "2".into(),
            k: 4,
        });
        cfg.graph = Some(GraphSpec::Complete { m: 16 });
        cfg.n = Some(8);
        cfg.rho = Some(0.25);
        cfg.list_size = Some(2);
        let report = run_experiment(cfg).unwrap();
        assert_eq!(report.rows.len(), 50);
    }

    #[test]
    fn channel_experiment_runs() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::Channel, 400, 13);
        cfg.mother = Some(MotherSpec::Repetition {
            q: "2".into(),
            len: 5,
        });
        cfg.noise = Some(NoiseSpec::Bsc { p: 0.1 });
        let report = run_experiment(cfg).unwrap();
        let g = report.group().unwrap();
        // Failure rate should hover near 1 - 0.99144.
        assert!(g.estimate < 0.05, "estimate {}", g.estimate);
    }

    #[test]
    fn rlc_threshold_scans_rates() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::RlcThreshold, 60, 23);
        cfg.field = Some("2".into());
        cfg.n = Some(8);
        cfg.rho = Some(0.25);
        cfg.list_size = Some(2);
        cfg.rates = Some(vec![0.125, 0.5, 0.875]);
        let report = run_experiment(cfg).unwrap();
        assert_eq!(report.groups.len(), 3);
        // Failure probability grows with rate.
        let low = report.group_at(0.125).unwrap().estimate;
        let high = report.group_at(0.875).unwrap().estimate;
        assert!(high >= low);
        assert!(report.notes.iter().any(|n| n.contains("rlc-threshold")));
    }

    #[test]
    fn unbalanced_expander_experiment_runs() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::UnbalancedExpander, 5, 3);
        cfg.mother = Some(MotherSpec::ReedSolomon {
            q: "5".into(),
            k: 2,
            m: 5,
        });
        cfg.graph = Some(GraphSpec::Complete { m: 5 });
        cfg.n = Some(6);
        cfg.subset_size = Some(2);
        cfg.eps = Some(0.5);
        let report = run_experiment(cfg).unwrap();
        assert_eq!(report.rows.len(), 5);
    }

    #[test]
    fn compare_bits_ledger_for_hadamard() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::ListDecode, 5, 17);
        cfg.mother = Some(MotherSpec::Hadamard {
            q: "2".into(),
            k: 8,
        });
        cfg.graph = Some(GraphSpec::RandomRegular {
            m: 256,
            d: 16,
            seed: None,
        });
        cfg.n = Some(16);
        cfg.rho = Some(0.25);
        cfg.list_size = Some(3);
        let cmp = compare_puncturings(cfg).unwrap();
        assert_eq!(cmp.bits, (68, 128, 128));
        assert_eq!(cmp.arms.len(), 3);
    }

    #[test]
    fn compare_is_deterministic() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::RateLemma, 40, 29);
        cfg.mother = Some(MotherSpec::Hadamard {
            q: "2".into(),
            k: 3,
        });
        cfg.graph = Some(GraphSpec::Complete { m: 8 });
        cfg.n = Some(6);
        let a = compare_puncturings(cfg.clone()).unwrap();
        let b = compare_puncturings(cfg).unwrap();
        for ((name_a, rep_a), (name_b, rep_b)) in a.arms.iter().zip(&b.arms) {
            assert_eq!(name_a, name_b);
            assert_eq!(rep_a.rows, rep_b.rows);
        }
    }

    #[test]
    fn lambda_target_refuses_weak_graphs() {
        let mut cfg = rate_lemma_config(1, 1);
        cfg.graph = Some(GraphSpec::RandomRegular {
            m: 32,
            d: 4,
            seed: Some(3),
        });
        cfg.lambda_target = Some(0.05);
        assert!(matches!(run_experiment(cfg), Err(Error::Usage(_))));
    }
}
