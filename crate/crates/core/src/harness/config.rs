//! Experiment configuration: JSON-serializable description of a run, fully
//! determining it together with the master seed.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::codes::LinearCode;
use crate::error::{Error, Result};
use crate::expander::{CertifyOutcome, RegularGraph};
use crate::gf::{Field, Modulus};
use crate::properties::channel::NoiseModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    RateLemma,
    HittingSet,
    Chernoff,
    ListDecode,
    ListRecover,
    Channel,
    RlcThreshold,
    UnbalancedExpander,
}

impl ExperimentKind {
    pub fn name(&self) -> &'static str {
        match self {
            ExperimentKind::RateLemma => "rate-lemma",
            ExperimentKind::HittingSet => "hitting-set",
            ExperimentKind::Chernoff => "chernoff",
            ExperimentKind::ListDecode => "list-decode",
            ExperimentKind::ListRecover => "list-recover",
            ExperimentKind::Channel => "channel",
            ExperimentKind::RlcThreshold => "rlc-threshold",
            ExperimentKind::UnbalancedExpander => "unbalanced-expander",
        }
    }
}

/// Field size written as "p" or "p^r".
pub fn parse_q_label(label: &str) -> Result<Arc<Field>> {
    let bad = || Error::usage(format!("bad field size {label:?}, expected p or p^r"));
    let (p, r) = match label.split_once('^') {
        Some((p, r)) => (
            p.trim().parse().map_err(|_| bad())?,
            r.trim().parse().map_err(|_| bad())?,
        ),
        None => (label.trim().parse().map_err(|_| bad())?, 1),
    };
    Field::new(p, r, Modulus::Auto)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum MotherSpec {
    /// Hadamard code of dimension k over GF(q).
    Hadamard { q: String, k: usize },
    /// Reed-Solomon of degree bound k over the first m elements of GF(q).
    ReedSolomon { q: String, k: usize, m: usize },
    /// Length-n repetition code over GF(q).
    Repetition { q: String, len: usize },
    /// Generator matrix file.
    File { path: String },
}

impl MotherSpec {
    pub fn build(&self) -> Result<LinearCode> {
        match self {
            MotherSpec::Hadamard { q, k } => LinearCode::hadamard(parse_q_label(q)?, *k),
            MotherSpec::ReedSolomon { q, k, m } => {
                LinearCode::reed_solomon_prefix(parse_q_label(q)?, *k, *m)
            }
            MotherSpec::Repetition { q, len } => LinearCode::repetition(parse_q_label(q)?, *len),
            MotherSpec::File { path } => LinearCode::load(std::path::Path::new(path)),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum GraphSpec {
    Complete {
        m: usize,
    },
    RandomRegular {
        m: usize,
        d: usize,
        /// Graph seed; derived from the master seed when absent.
        seed: Option<u64>,
    },
    File {
        path: String,
    },
}

impl GraphSpec {
    /// Build and certify. `default_seed` is used for random graphs without
    /// an explicit seed.
    pub fn build(&self, certify_tol: f64, default_seed: u64) -> Result<RegularGraph> {
        match self {
            GraphSpec::Complete { m } => RegularGraph::complete(*m),
            GraphSpec::RandomRegular { m, d, seed } => {
                let mut rng = crate::rng::BitLedgerRng::new(seed.unwrap_or(default_seed));
                let mut g = RegularGraph::random_regular(*m, *d, &mut rng)?;
                match g.certify(certify_tol)? {
                    CertifyOutcome::Certified { .. } => Ok(g),
                    CertifyOutcome::Unconverged { best, .. } => Err(Error::usage(format!(
                        "spectral certification did not converge (best estimate {best})"
                    ))),
                }
            }
            GraphSpec::File { path } => {
                let mut g = RegularGraph::load(std::path::Path::new(path))?;
                if g.lambda().is_none() {
                    match g.certify(certify_tol)? {
                        CertifyOutcome::Certified { .. } => {}
                        CertifyOutcome::Unconverged { best, .. } => {
                            return Err(Error::usage(format!(
                                "spectral certification did not converge (best estimate {best})"
                            )))
                        }
                    }
                }
                Ok(g)
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum NoiseSpec {
    Bsc { p: f64 },
    Uniform,
    Probs { probs: Vec<f64> },
}

impl NoiseSpec {
    pub fn build(&self, q: u32) -> Result<NoiseModel> {
        match self {
            NoiseSpec::Bsc { p } => {
                if q != 2 {
                    return Err(Error::usage("bsc noise requires a binary field"));
                }
                NoiseModel::bsc(*p)
            }
            NoiseSpec::Uniform => NoiseModel::uniform(q),
            NoiseSpec::Probs { probs } => {
                if probs.len() != q as usize {
                    return Err(Error::usage(format!(
                        "noise has {} entries, field has {q}",
                        probs.len()
                    )));
                }
                NoiseModel::new(probs.clone())
            }
        }
    }
}

fn default_certify_tol() -> f64 {
    0.01
}

/// Everything a run needs besides code: the experiment kind, the mother
/// code and graph, the puncture length, property parameters, trial count,
/// and the master seed. A run is fully determined by this struct.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mother: Option<MotherSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub graph: Option<GraphSpec>,
    /// Puncture length (target code length).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Refuse graphs whose certified lambda exceeds this.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_target: Option<f64>,
    #[serde(default = "default_certify_tol")]
    pub certify_tol: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub list_size: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ell: Option<usize>,
    /// Deviation parameter (Chernoff) or expansion slack (unbalanced
    /// expander).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    /// Set density for the Chernoff experiment.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    /// Per-step set densities for the hitting-set experiment.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub densities: Option<Vec<f64>>,
    /// Walk-length grid for the Chernoff experiment.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub walk_lengths: Option<Vec<usize>>,
    /// Rate grid for the RLC-threshold experiment.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rates: Option<Vec<f64>>,
    /// Field for RLC sampling, as "p" or "p^r".
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<NoiseSpec>,
    /// Left-subset size for the unbalanced-expander check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subset_size: Option<usize>,
    /// Mother-code bias for the rate-lemma bound; computed when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mother_eta: Option<f64>,
    pub trials: u64,
    #[serde(default)]
    pub master_seed: u64,
}

impl ExperimentConfig {
    pub fn new(kind: ExperimentKind, trials: u64, master_seed: u64) -> ExperimentConfig {
        ExperimentConfig {
            kind,
            mother: None,
            graph: None,
            n: None,
            lambda_target: None,
            certify_tol: default_certify_tol(),
            rho: None,
            list_size: None,
            ell: None,
            eps: None,
            mu: None,
            densities: None,
            walk_lengths: None,
            rates: None,
            field: None,
            noise: None,
            subset_size: None,
            mother_eta: None,
            trials,
            master_seed,
        }
    }

    pub fn from_json(text: &str) -> Result<ExperimentConfig> {
        serde_json::from_str(text).map_err(|e| Error::Format {
            what: "experiment config",
            msg: e.to_string(),
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub(crate) fn require<T: Copy>(&self, v: Option<T>, name: &str) -> Result<T> {
        v.ok_or_else(|| Error::usage(format!("{} experiment requires `{name}`", self.kind.name())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_json_roundtrip() {
        let mut cfg = ExperimentConfig::new(ExperimentKind::RateLemma, 1000, 42);
        cfg.mother = Some(MotherSpec::Hadamard {
            q: "2".into(),
            k: 6,
        });
        cfg.graph = Some(GraphSpec::Complete { m: 64 });
        cfg.n = Some(12);
        let text = cfg.to_json();
        let back = ExperimentConfig::from_json(&text).unwrap();
        assert_eq!(back.trials, 1000);
        assert_eq!(back.master_seed, 42);
        assert!(matches!(back.kind, ExperimentKind::RateLemma));
        assert!(matches!(back.mother, Some(MotherSpec::Hadamard { .. })));
    }

    #[test]
    fn config_rejects_unknown_fields() {
        let text = r#"{"kind":"rate-lemma","trials":1,"master_seed":0,"bogus":3}"#;
        assert!(ExperimentConfig::from_json(text).is_err());
    }

    #[test]
    fn q_labels_parse() {
        assert_eq!(parse_q_label("5").unwrap().q(), 5);
        assert_eq!(parse_q_label("2^4").unwrap().q(), 16);
        assert!(parse_q_label("six").is_err());
    }

    #[test]
    fn mother_specs_build() {
        let h = MotherSpec::Hadamard {
            q: "2".into(),
            k: 3,
        }
        .build()
        .unwrap();
        assert_eq!(h.len(), 8);
        let rs = MotherSpec::ReedSolomon {
            q: "5".into(),
            k: 2,
            m: 5,
        }
        .build()
        .unwrap();
        assert_eq!(rs.len(), 5);
        assert_eq!(rs.min_distance().unwrap().distance, 4);
    }

    #[test]
    fn graph_specs_build_and_certify() {
        let g = GraphSpec::Complete { m: 8 }.build(0.01, 0).unwrap();
        assert_eq!(g.lambda(), Some(1.0 / 7.0));
        let rr = GraphSpec::RandomRegular {
            m: 32,
            d: 4,
            seed: Some(7),
        }
        .build(0.01, 0)
        .unwrap();
        assert!(rr.lambda().is_some());
    }
}
