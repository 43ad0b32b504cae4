//! Command-line driver: expander construction, puncturing, property checks,
//! channel simulation, and the seeded experiment harness.
//!
//! Exit codes: 0 pass/completed, 1 property violated, 2 infeasible budget,
//! 3 usage or input error.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use prlc::codes::LinearCode;
use prlc::error::Error;
use prlc::expander::{CertifyOutcome, RegularGraph};
use prlc::harness::{
    compare_puncturings, run_experiment, ExperimentConfig, ExperimentKind, GraphSpec, MotherSpec,
    NoiseSpec,
};
use prlc::properties::channel::{channel_success_rate, NoiseModel};
use prlc::properties::{list_decodable, zero_error_list_recoverable, Witness};
use prlc::puncture::PuncturingMap;
use prlc::rng::BitLedgerRng;
use prlc::search::SearchMode;

#[derive(Parser)]
#[command(
    name = "prlc",
    about = "Expander-walk puncturings of linear codes with exact randomness accounting",
    version
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Master seed for every randomized construction (default 0).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Monte Carlo trial count where applicable.
    #[arg(long, global = true)]
    trials: Option<u64>,
    /// Output path (file or report stem, depending on the subcommand).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a d-regular graph, certify its spectral bound, and save it.
    BuildExpander(BuildExpanderArgs),
    /// Sample a puncturing map (and optionally the punctured code).
    Puncture(PunctureArgs),
    /// Exhaustively decide (rho, L)-list-decodability of a code file.
    CheckLd(CheckLdArgs),
    /// Decide (ell, L) zero-error list-recoverability of a code file.
    CheckLr(CheckLrArgs),
    /// Estimate MLDU success rates over a noisy channel.
    ChannelSim(ChannelSimArgs),
    /// Run a configured Monte Carlo experiment and write reports.
    Experiment(ExperimentArgs),
    /// Run the same experiment under pseudorandom/uniform/RLC sampling.
    Compare(ExperimentArgs),
    /// Re-verify a serialized property-violation witness.
    VerifyWitness(VerifyWitnessArgs),
}

#[derive(Args)]
struct BuildExpanderArgs {
    /// Vertex count.
    #[arg(long)]
    m: usize,
    /// Degree (even) for the permutation model; omit with --complete.
    #[arg(long)]
    d: Option<usize>,
    /// Build the complete graph K_m instead of a random regular graph.
    #[arg(long)]
    complete: bool,
    /// Certification tolerance.
    #[arg(long, default_value_t = 0.01)]
    tol: f64,
}

#[derive(Args)]
struct PunctureArgs {
    /// Mother code: hadamard:q:k, rs:q:k:m, repetition:q:n, or file:PATH.
    #[arg(long)]
    mother: String,
    /// Walk graph: complete:m, random:m:d[:seed], or file:PATH.
    /// Omit with --uniform.
    #[arg(long)]
    graph: Option<String>,
    /// Draw indices i.i.d. uniformly instead of walking a graph.
    #[arg(long)]
    uniform: bool,
    /// Target length.
    #[arg(long)]
    n: usize,
    /// Accept an uncertified graph.
    #[arg(long)]
    allow_uncertified: bool,
    /// Certification tolerance for graphs built here.
    #[arg(long, default_value_t = 0.01)]
    tol: f64,
    /// Also write the punctured generator matrix.
    #[arg(long)]
    out_code: Option<PathBuf>,
}

#[derive(Args)]
struct CheckLdArgs {
    /// Generator matrix file.
    #[arg(long)]
    code: PathBuf,
    #[arg(long)]
    rho: f64,
    #[arg(long)]
    list_size: usize,
}

#[derive(Args)]
struct CheckLrArgs {
    /// Generator matrix file.
    #[arg(long)]
    code: PathBuf,
    #[arg(long)]
    ell: usize,
    #[arg(long)]
    list_size: usize,
    /// Randomized fallback sample count for over-budget instances
    /// (results are then non-exhaustive).
    #[arg(long)]
    samples: Option<u64>,
}

#[derive(Args)]
struct ChannelSimArgs {
    /// Generator matrix file.
    #[arg(long)]
    code: PathBuf,
    /// Noise: bsc:p, uniform, or probs:p0,p1,...
    #[arg(long)]
    noise: String,
    /// Limit the number of codewords simulated.
    #[arg(long)]
    max_codewords: Option<usize>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// JSON config file; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Experiment kind (rate-lemma, hitting-set, chernoff, list-decode,
    /// list-recover, channel, rlc-threshold, unbalanced-expander).
    #[arg(long)]
    kind: Option<String>,
    /// Mother code: hadamard:q:k, rs:q:k:m, repetition:q:n, or file:PATH.
    #[arg(long)]
    mother: Option<String>,
    /// Graph: complete:m, random:m:d[:seed], or file:PATH.
    #[arg(long)]
    graph: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    rho: Option<f64>,
    #[arg(long)]
    list_size: Option<usize>,
    #[arg(long)]
    ell: Option<usize>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    /// Comma-separated per-step densities (hitting-set).
    #[arg(long)]
    densities: Option<String>,
    /// Comma-separated walk lengths (chernoff).
    #[arg(long)]
    walk_lengths: Option<String>,
    /// Comma-separated rate grid (rlc-threshold).
    #[arg(long)]
    rates: Option<String>,
    /// Field for RLC sampling, as p or p^r.
    #[arg(long)]
    field: Option<String>,
    /// Noise: bsc:p, uniform, or probs:p0,p1,...
    #[arg(long)]
    noise: Option<String>,
    #[arg(long)]
    subset_size: Option<usize>,
    #[arg(long)]
    lambda_target: Option<f64>,
    #[arg(long)]
    certify_tol: Option<f64>,
    #[arg(long)]
    mother_eta: Option<f64>,
}

#[derive(Args)]
struct VerifyWitnessArgs {
    /// Witness file produced by check-ld / check-lr / experiment runs.
    #[arg(long)]
    witness: PathBuf,
    /// Optional generator matrix file; when given, witness words must also
    /// be codewords of it.
    #[arg(long)]
    code: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32, Error> {
    let seed = cli.seed;
    let trials = cli.trials;
    let out = cli.out.clone();
    match cli.cmd {
        Cmd::BuildExpander(args) => build_expander(args, seed.unwrap_or(0), out),
        Cmd::Puncture(args) => puncture(args, seed.unwrap_or(0), out),
        Cmd::CheckLd(args) => check_ld(args, out),
        Cmd::CheckLr(args) => check_lr(args, seed.unwrap_or(0), out),
        Cmd::ChannelSim(args) => channel_sim(args, seed.unwrap_or(0), trials, out),
        Cmd::Experiment(args) => experiment(args, seed, trials, out, false),
        Cmd::Compare(args) => experiment(args, seed, trials, out, true),
        Cmd::VerifyWitness(args) => verify_witness(args),
    }
}

fn build_expander(args: BuildExpanderArgs, seed: u64, out: Option<PathBuf>) -> Result<i32, Error> {
    let mut graph = if args.complete {
        RegularGraph::complete(args.m)?
    } else {
        let d = args
            .d
            .ok_or_else(|| Error::Usage("either --complete or --d is required".into()))?;
        let mut rng = BitLedgerRng::new(seed);
        RegularGraph::random_regular(args.m, d, &mut rng)?
    };
    let outcome = graph.certify(args.tol)?;
    match outcome {
        CertifyOutcome::Certified { lambda, iterations } => {
            println!(
                "graph {} certified lambda {lambda:.6} ({iterations} iterations)",
                graph.label()
            );
        }
        CertifyOutcome::Unconverged { best, iterations } => {
            eprintln!(
                "certification did not converge after {iterations} iterations (best {best:.6})"
            );
            return Ok(2);
        }
    }
    if let Some(path) = out {
        graph.save(&path)?;
        println!("wrote {}", path.display());
    }
    Ok(0)
}

fn parse_mother_spec(spec: &str) -> Result<MotherSpec, Error> {
    let parts: Vec<&str> = spec.split(':').collect();
    let usage = || {
        Error::Usage(format!(
            "bad mother spec {spec:?}; expected hadamard:q:k, rs:q:k:m, repetition:q:n, or file:PATH"
        ))
    };
    match parts.as_slice() {
        ["hadamard", q, k] => Ok(MotherSpec::Hadamard {
            q: q.to_string(),
            k: k.parse().map_err(|_| usage())?,
        }),
        ["rs", q, k, m] => Ok(MotherSpec::ReedSolomon {
            q: q.to_string(),
            k: k.parse().map_err(|_| usage())?,
            m: m.parse().map_err(|_| usage())?,
        }),
        ["repetition", q, n] => Ok(MotherSpec::Repetition {
            q: q.to_string(),
            len: n.parse().map_err(|_| usage())?,
        }),
        ["file", path] => Ok(MotherSpec::File {
            path: path.to_string(),
        }),
        _ => Err(usage()),
    }
}

fn parse_graph_spec(spec: &str) -> Result<GraphSpec, Error> {
    let parts: Vec<&str> = spec.split(':').collect();
    let usage = || {
        Error::Usage(format!(
            "bad graph spec {spec:?}; expected complete:m, random:m:d[:seed], or file:PATH"
        ))
    };
    match parts.as_slice() {
        ["complete", m] => Ok(GraphSpec::Complete {
            m: m.parse().map_err(|_| usage())?,
        }),
        ["random", m, d] => Ok(GraphSpec::RandomRegular {
            m: m.parse().map_err(|_| usage())?,
            d: d.parse().map_err(|_| usage())?,
            seed: None,
        }),
        ["random", m, d, s] => Ok(GraphSpec::RandomRegular {
            m: m.parse().map_err(|_| usage())?,
            d: d.parse().map_err(|_| usage())?,
            seed: Some(s.parse().map_err(|_| usage())?),
        }),
        ["file", path] => Ok(GraphSpec::File {
            path: path.to_string(),
        }),
        _ => Err(usage()),
    }
}

fn parse_noise_spec(spec: &str) -> Result<NoiseSpec, Error> {
    let usage = || {
        Error::Usage(format!(
            "bad noise spec {spec:?}; expected bsc:p, uniform, or probs:p0,p1,..."
        ))
    };
    if spec == "uniform" {
        return Ok(NoiseSpec::Uniform);
    }
    if let Some(p) = spec.strip_prefix("bsc:") {
        return Ok(NoiseSpec::Bsc {
            p: p.parse().map_err(|_| usage())?,
        });
    }
    if let Some(list) = spec.strip_prefix("probs:") {
        let probs: Result<Vec<f64>, _> = list.split(',').map(str::parse).collect();
        return Ok(NoiseSpec::Probs {
            probs: probs.map_err(|_| usage())?,
        });
    }
    Err(usage())
}

fn parse_list<T: std::str::FromStr>(list: &str, what: &str) -> Result<Vec<T>, Error> {
    list.split(',')
        .map(|t| {
            t.trim()
                .parse()
                .map_err(|_| Error::Usage(format!("bad {what} entry {t:?}")))
        })
        .collect()
}

fn load_mother(spec: &str) -> Result<LinearCode, Error> {
    parse_mother_spec(spec)?.build()
}

fn puncture(args: PunctureArgs, seed: u64, out: Option<PathBuf>) -> Result<i32, Error> {
    let mother = load_mother(&args.mother)?;
    let mut rng = BitLedgerRng::new(seed);
    let map = if args.uniform {
        PuncturingMap::uniform(mother.len(), args.n, &mut rng)?
    } else {
        let spec = args
            .graph
            .as_deref()
            .ok_or_else(|| Error::Usage("either --uniform or --graph is required".into()))?;
        let graph = parse_graph_spec(spec)?.build(args.tol, seed)?;
        if graph.m() != mother.len() {
            return Err(Error::Usage(format!(
                "graph has {} vertices but the mother code has length {}",
                graph.m(),
                mother.len()
            )));
        }
        PuncturingMap::pseudorandom(&graph, args.n, &mut rng, args.allow_uncertified)?
    };
    println!(
        "punctured {} -> {} using {} idealized random bits ({} drawn)",
        map.source_len(),
        map.target_len(),
        map.bits_consumed(),
        rng.bits_drawn()
    );
    let punctured = map.apply(&mother)?;
    println!(
        "design rate {:.4}, actual rank {} of {}",
        punctured.design_rate(),
        punctured.rank(),
        punctured.dimension()
    );
    if let Some(path) = out {
        map.save(&path)?;
        println!("wrote {}", path.display());
    }
    if let Some(path) = args.out_code {
        punctured.save(&path)?;
        println!("wrote {}", path.display());
    }
    Ok(0)
}

fn write_witness(witness: &Witness, out: Option<&Path>) -> Result<(), Error> {
    if let Some(path) = out {
        std::fs::write(path, witness.to_text())?;
        println!("witness written to {}", path.display());
    } else {
        print!("{}", witness.to_text());
    }
    Ok(())
}

fn check_ld(args: CheckLdArgs, out: Option<PathBuf>) -> Result<i32, Error> {
    let code = LinearCode::load(&args.code)?;
    let chk = list_decodable(&code, args.rho, args.list_size)?;
    if chk.decodable {
        println!("code is ({}, {})-list-decodable", args.rho, args.list_size);
        Ok(0)
    } else {
        println!(
            "code is NOT ({}, {})-list-decodable",
            args.rho, args.list_size
        );
        if let Some(w) = &chk.witness {
            write_witness(w, out.as_deref())?;
        }
        Ok(1)
    }
}

fn check_lr(args: CheckLrArgs, seed: u64, out: Option<PathBuf>) -> Result<i32, Error> {
    let code = LinearCode::load(&args.code)?;
    let mode = match args.samples {
        Some(samples) => SearchMode::Sampled { samples, seed },
        None => SearchMode::Exhaustive,
    };
    let chk = zero_error_list_recoverable(&code, args.ell, args.list_size, mode)?;
    let qualifier = if chk.exhaustive {
        ""
    } else {
        " (NON-EXHAUSTIVE randomized search)"
    };
    if chk.recoverable {
        println!(
            "code is ({}, {}) zero-error list-recoverable{qualifier} [{} subsets checked]",
            args.ell, args.list_size, chk.subsets_checked
        );
        Ok(0)
    } else {
        println!(
            "code is NOT ({}, {}) zero-error list-recoverable{qualifier}",
            args.ell, args.list_size
        );
        if let Some(w) = &chk.witness {
            write_witness(w, out.as_deref())?;
        }
        Ok(1)
    }
}

fn channel_sim(
    args: ChannelSimArgs,
    seed: u64,
    trials: Option<u64>,
    out: Option<PathBuf>,
) -> Result<i32, Error> {
    let code = LinearCode::load(&args.code)?;
    let noise: NoiseModel = parse_noise_spec(&args.noise)?.build(code.field().q())?;
    let trials = trials.unwrap_or(10_000);
    let mut rng = BitLedgerRng::new(seed);
    let stats = channel_success_rate(&code, &noise, trials, &mut rng, args.max_codewords)?;
    println!(
        "overall MLDU success rate {:.6} over {} codewords x {trials} trials",
        stats.overall_rate,
        stats.per_codeword.len()
    );
    if let Some(path) = out {
        let rows: Vec<serde_json::Value> = stats
            .per_codeword
            .iter()
            .map(|c| {
                serde_json::json!({
                    "codeword_index": c.index,
                    "successes": c.successes,
                    "trials": trials,
                })
            })
            .collect();
        let doc = serde_json::json!({
            "overall_rate": stats.overall_rate,
            "per_codeword": rows,
        });
        std::fs::write(&path, serde_json::to_string_pretty(&doc).unwrap())?;
        println!("wrote {}", path.display());
    }
    Ok(0)
}

fn experiment(
    args: ExperimentArgs,
    seed: Option<u64>,
    trials: Option<u64>,
    out: Option<PathBuf>,
    compare: bool,
) -> Result<i32, Error> {
    let mut config = match &args.config {
        Some(path) => ExperimentConfig::from_json(&std::fs::read_to_string(path)?)?,
        None => {
            let kind = args
                .kind
                .as_deref()
                .ok_or_else(|| Error::Usage("--kind (or --config) is required".into()))?;
            let kind = parse_kind(kind)?;
            ExperimentConfig::new(kind, trials.unwrap_or(1000), seed.unwrap_or(0))
        }
    };
    // Flags override file fields.
    if let Some(kind) = &args.kind {
        config.kind = parse_kind(kind)?;
    }
    if let Some(t) = trials {
        config.trials = t;
    }
    if let Some(s) = seed {
        config.master_seed = s;
    }
    if let Some(m) = &args.mother {
        config.mother = Some(parse_mother_spec(m)?);
    }
    if let Some(g) = &args.graph {
        config.graph = Some(parse_graph_spec(g)?);
    }
    if let Some(n) = args.n {
        config.n = Some(n);
    }
    if let Some(v) = args.rho {
        config.rho = Some(v);
    }
    if let Some(v) = args.list_size {
        config.list_size = Some(v);
    }
    if let Some(v) = args.ell {
        config.ell = Some(v);
    }
    if let Some(v) = args.eps {
        config.eps = Some(v);
    }
    if let Some(v) = args.mu {
        config.mu = Some(v);
    }
    if let Some(v) = &args.densities {
        config.densities = Some(parse_list(v, "density")?);
    }
    if let Some(v) = &args.walk_lengths {
        config.walk_lengths = Some(parse_list(v, "walk length")?);
    }
    if let Some(v) = &args.rates {
        config.rates = Some(parse_list(v, "rate")?);
    }
    if let Some(v) = &args.field {
        config.field = Some(v.clone());
    }
    if let Some(v) = &args.noise {
        config.noise = Some(parse_noise_spec(v)?);
    }
    if let Some(v) = args.subset_size {
        config.subset_size = Some(v);
    }
    if let Some(v) = args.lambda_target {
        config.lambda_target = Some(v);
    }
    if let Some(v) = args.certify_tol {
        config.certify_tol = v;
    }
    if let Some(v) = args.mother_eta {
        config.mother_eta = Some(v);
    }

    if compare {
        let report = compare_puncturings(config)?;
        println!(
            "bits: pseudorandom {} / uniform {} / rlc {}",
            report.bits.0, report.bits.1, report.bits.2
        );
        for (name, arm) in &report.arms {
            if let Some(g) = arm.group() {
                println!(
                    "arm {name}: failure frequency {:.6} in [{:.6}, {:.6}]",
                    g.estimate, g.wilson_low, g.wilson_high
                );
            } else {
                println!("arm {name}: no trials");
            }
        }
        if let Some(stem) = out {
            report.write(&stem)?;
            println!("wrote {}.json and per-arm CSVs", stem.display());
        }
        Ok(0)
    } else {
        let report = run_experiment(config)?;
        for g in &report.groups {
            let bound = g
                .bound
                .map(|b| format!(" bound {b:.6e}"))
                .unwrap_or_default();
            println!(
                "param {}: estimate {:.6} in [{:.6}, {:.6}]{bound} trials {} bits [{}, {}]",
                g.param, g.estimate, g.wilson_low, g.wilson_high, g.trials, g.bits_min, g.bits_max
            );
        }
        for note in &report.notes {
            println!("note: {note}");
        }
        if let Some(stem) = out {
            report.write(&stem)?;
            println!(
                "wrote {} and {}",
                stem.with_extension("csv").display(),
                stem.with_extension("json").display()
            );
        }
        Ok(if report.violated { 1 } else { 0 })
    }
}

fn parse_kind(kind: &str) -> Result<ExperimentKind, Error> {
    match kind {
        "rate-lemma" => Ok(ExperimentKind::RateLemma),
        "hitting-set" => Ok(ExperimentKind::HittingSet),
        "chernoff" => Ok(ExperimentKind::Chernoff),
        "list-decode" => Ok(ExperimentKind::ListDecode),
        "list-recover" => Ok(ExperimentKind::ListRecover),
        "channel" => Ok(ExperimentKind::Channel),
        "rlc-threshold" => Ok(ExperimentKind::RlcThreshold),
        "unbalanced-expander" => Ok(ExperimentKind::UnbalancedExpander),
        other => Err(Error::Usage(format!("unknown experiment kind {other:?}"))),
    }
}

fn verify_witness(args: VerifyWitnessArgs) -> Result<i32, Error> {
    let witness = Witness::from_text(&std::fs::read_to_string(&args.witness)?)?;
    if !witness.verify() {
        println!("witness FAILED to re-verify");
        return Ok(1);
    }
    if let Some(code_path) = &args.code {
        let code = LinearCode::load(code_path)?;
        let words: Vec<prlc::gf::Word> = match &witness {
            Witness::ClusteredSet { words, .. } => words.clone(),
            Witness::RecoverySet { words, .. } => words.clone(),
            Witness::KilledCodeword { word, .. } => vec![word.clone()],
        };
        let codewords = code.distinct_codewords()?;
        for w in &words {
            if codewords.binary_search(w).is_err() {
                println!("witness word {w:?} is not a codeword of the given code");
                return Ok(1);
            }
        }
    }
    println!("witness verified");
    Ok(0)
}
