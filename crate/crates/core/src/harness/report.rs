//! Machine-readable experiment reports: append-only CSV of per-trial
//! records plus a JSON summary whose aggregates recompute exactly from the
//! rows.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::error::Result;

pub const WILSON_Z: f64 = 1.959_963_984_540_054; // two-sided 95%

/// Wilson score interval for `successes` out of `trials` at confidence z.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Wilson-derived standard error: interval half-width divided by z. Unlike
/// the plain binomial estimate it stays positive at zero counts.
pub fn wilson_sigma(successes: u64, trials: u64) -> f64 {
    let (lo, hi) = wilson_interval(successes, trials, WILSON_Z);
    (hi - lo) / (2.0 * WILSON_Z)
}

/// One Monte Carlo trial.
#[derive(Debug, Clone, Copy, Serialize, Deserialize, PartialEq)]
pub struct TrialRow {
    pub trial: u64,
    pub seed: u64,
    /// Group key (walk length, rate, ...); 0 for single-group experiments.
    pub param: f64,
    /// The per-kind failure/containment event.
    pub outcome: bool,
    /// Kind-specific statistic (rank, in-set count, ...).
    pub stat: f64,
    /// Idealized random bits consumed by the trial's construction.
    pub bits: u64,
}

/// Aggregates for one parameter group, recomputable from the rows.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroupSummary {
    pub param: f64,
    pub trials: u64,
    pub failures: u64,
    pub estimate: f64,
    pub wilson_low: f64,
    pub wilson_high: f64,
    pub sigma: f64,
    /// Closed-form reference bound at the config's parameters, when one
    /// exists for the experiment kind.
    pub bound: Option<f64>,
    /// estimate - 3 sigma exceeds the bound (expected never at correct
    /// parameters).
    pub bound_violated: bool,
    pub bits_min: u64,
    pub bits_max: u64,
    pub bits_mean: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub config: ExperimentConfig,
    pub rows: Vec<TrialRow>,
    pub groups: Vec<GroupSummary>,
    pub notes: Vec<String>,
    pub violated: bool,
}

impl Report {
    /// Group rows by `param` (insertion order) and attach bounds.
    pub fn from_rows(
        config: ExperimentConfig,
        rows: Vec<TrialRow>,
        bound_for: impl Fn(f64) -> Option<f64>,
        notes: Vec<String>,
    ) -> Report {
        let mut order: Vec<f64> = Vec::new();
        for row in &rows {
            if !order.contains(&row.param) {
                order.push(row.param);
            }
        }
        let mut groups = Vec::with_capacity(order.len());
        for &param in &order {
            let members: Vec<&TrialRow> = rows.iter().filter(|r| r.param == param).collect();
            let trials = members.len() as u64;
            let failures = members.iter().filter(|r| r.outcome).count() as u64;
            let estimate = failures as f64 / trials as f64;
            let (wilson_low, wilson_high) = wilson_interval(failures, trials, WILSON_Z);
            let sigma = wilson_sigma(failures, trials);
            let bound = bound_for(param);
            let bound_violated = bound.map(|b| estimate - 3.0 * sigma > b).unwrap_or(false);
            let bits_min = members.iter().map(|r| r.bits).min().unwrap_or(0);
            let bits_max = members.iter().map(|r| r.bits).max().unwrap_or(0);
            let bits_mean =
                members.iter().map(|r| r.bits as f64).sum::<f64>() / trials.max(1) as f64;
            groups.push(GroupSummary {
                param,
                trials,
                failures,
                estimate,
                wilson_low,
                wilson_high,
                sigma,
                bound,
                bound_violated,
                bits_min,
                bits_max,
                bits_mean,
            });
        }
        let violated = groups.iter().any(|g| g.bound_violated);
        Report {
            config,
            rows,
            groups,
            notes,
            violated,
        }
    }

    /// Single-group accessor for the common case.
    pub fn group(&self) -> Option<&GroupSummary> {
        self.groups.first()
    }

    pub fn group_at(&self, param: f64) -> Option<&GroupSummary> {
        self.groups.iter().find(|g| g.param == param)
    }

    pub fn csv_string(&self) -> String {
        let mut out = String::from("trial,seed,param,outcome,stat,bits\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{:#x},{},{},{},{}\n",
                r.trial, r.seed, r.param, r.outcome as u8, r.stat, r.bits
            ));
        }
        out
    }

    pub fn json_string(&self) -> String {
        let summary = serde_json::json!({
            "config": self.config,
            "groups": self.groups,
            "notes": self.notes,
            "violated": self.violated,
            "trials": self.rows.len(),
        });
        serde_json::to_string_pretty(&summary).expect("report serializes")
    }

    /// Write `<stem>.csv` (per-trial) and `<stem>.json` (summary).
    pub fn write(&self, stem: &Path) -> Result<()> {
        let csv_path = stem.with_extension("csv");
        let json_path = stem.with_extension("json");
        fs::write(&csv_path, self.csv_string())?;
        fs::write(&json_path, self.json_string())?;
        Ok(())
    }

    /// Recompute every aggregate from the rows and compare; used by tests
    /// and `verify-witness`-style consumers.
    pub fn aggregates_consistent(&self) -> bool {
        let rebuilt = Report::from_rows(
            self.config.clone(),
            self.rows.clone(),
            |p| self.group_at(p).and_then(|g| g.bound),
            self.notes.clone(),
        );
        if rebuilt.groups.len() != self.groups.len() {
            return false;
        }
        rebuilt.groups.iter().zip(&self.groups).all(|(a, b)| {
            a.param == b.param
                && a.trials == b.trials
                && a.failures == b.failures
                && a.estimate == b.estimate
                && a.bits_min == b.bits_min
                && a.bits_max == b.bits_max
        })
    }
}

/// Paired report from `compare_puncturings`: one arm per sampling scheme.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompareReport {
    pub arms: Vec<(String, Report)>,
    /// Idealized bits per construction: (pseudorandom, uniform, rlc).
    pub bits: (u64, u64, u64),
}

impl CompareReport {
    pub fn arm(&self, name: &str) -> Option<&Report> {
        self.arms.iter().find(|(n, _)| n == name).map(|(_, r)| r)
    }

    pub fn json_string(&self) -> String {
        let arms: Vec<serde_json::Value> = self
            .arms
            .iter()
            .map(|(name, r)| {
                serde_json::json!({
                    "arm": name,
                    "groups": r.groups,
                    "notes": r.notes,
                })
            })
            .collect();
        serde_json::to_string_pretty(&serde_json::json!({
            "bits": {
                "pseudorandom": self.bits.0,
                "uniform": self.bits.1,
                "rlc": self.bits.2,
            },
            "arms": arms,
        }))
        .expect("report serializes")
    }

    pub fn write(&self, stem: &Path) -> Result<()> {
        fs::write(stem.with_extension("json"), self.json_string())?;
        for (name, report) in &self.arms {
            let mut file = stem.as_os_str().to_owned();
            file.push(format!("-{name}"));
            let arm_stem = std::path::PathBuf::from(file);
            fs::write(arm_stem.with_extension("csv"), report.csv_string())?;
        }
        Ok(())
    }
}
