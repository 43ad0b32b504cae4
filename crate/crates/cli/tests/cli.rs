//! End-to-end checks of the CLI surface: subcommands, file formats, and the
//! documented exit codes (0 pass, 1 violated, 2 infeasible, 3 usage).

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn prlc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_prlc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("prlc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn write_code_file(path: &Path, text: &str) {
    std::fs::write(path, text).unwrap();
}

#[test]
fn build_expander_writes_certified_graph() {
    let out = tmp("graph.txt");
    let res = prlc(&[
        "build-expander",
        "--m",
        "32",
        "--d",
        "4",
        "--seed",
        "7",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(res.status.code(), Some(0), "{res:?}");
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("32 4\n"));
    assert!(text.contains("lambda "));
}

#[test]
fn build_expander_complete_graph() {
    let res = prlc(&["build-expander", "--m", "8", "--complete"]);
    assert_eq!(res.status.code(), Some(0));
    assert!(stdout(&res).contains("lambda 0.142857"));
}

#[test]
fn puncture_writes_map_and_code() {
    let map_path = tmp("map.txt");
    let code_path = tmp("punct.txt");
    let res = prlc(&[
        "puncture",
        "--mother",
        "hadamard:2:4",
        "--graph",
        "complete:16",
        "--n",
        "8",
        "--seed",
        "5",
        "--out",
        map_path.to_str().unwrap(),
        "--out-code",
        code_path.to_str().unwrap(),
    ]);
    assert_eq!(res.status.code(), Some(0), "{res:?}");
    // Walk ledger: ceil(log2 16) + 7 * ceil(log2 15) = 4 + 28.
    assert!(stdout(&res).contains("using 32 idealized random bits"));
    let map_text = std::fs::read_to_string(&map_path).unwrap();
    assert!(map_text.starts_with("16 8\n"));
    assert!(map_text.contains("provenance pseudorandom complete-m16"));
    let code_text = std::fs::read_to_string(&code_path).unwrap();
    assert!(code_text.starts_with("2 4 8\n"));
}

#[test]
fn check_ld_pass_and_violation_exit_codes() {
    // Repetition length 3 is (1/3, 1)-list-decodable.
    let good = tmp("rep3.txt");
    write_code_file(&good, "2 1 3\n1 1 1\n");
    let res = prlc(&[
        "check-ld",
        "--code",
        good.to_str().unwrap(),
        "--rho",
        "0.34",
        "--list-size",
        "1",
    ]);
    assert_eq!(res.status.code(), Some(0), "{res:?}");

    // The even-weight code has three codewords in a radius-1 ball.
    let bad = tmp("even.txt");
    write_code_file(&bad, "2 2 3\n0 1 1\n1 0 1\n");
    let witness = tmp("wit.txt");
    let res = prlc(&[
        "check-ld",
        "--code",
        bad.to_str().unwrap(),
        "--rho",
        "0.34",
        "--list-size",
        "1",
        "--out",
        witness.to_str().unwrap(),
    ]);
    assert_eq!(res.status.code(), Some(1), "{res:?}");

    // The written witness re-verifies, including codeword membership.
    let res = prlc(&[
        "verify-witness",
        "--witness",
        witness.to_str().unwrap(),
        "--code",
        bad.to_str().unwrap(),
    ]);
    assert_eq!(res.status.code(), Some(0), "{res:?}");
}

#[test]
fn check_ld_infeasible_budget_exits_2() {
    // q^n = 2^24 centers exceeds the scan cap.
    let wide = tmp("wide.txt");
    let row: Vec<&str> = std::iter::repeat_n("1", 24).collect();
    write_code_file(&wide, &format!("2 1 24\n{}\n", row.join(" ")));
    let res = prlc(&[
        "check-ld",
        "--code",
        wide.to_str().unwrap(),
        "--rho",
        "0.25",
        "--list-size",
        "1",
    ]);
    assert_eq!(res.status.code(), Some(2), "{res:?}");
}

#[test]
fn check_lr_detects_captured_pair() {
    let rep = tmp("rep4.txt");
    write_code_file(&rep, "2 1 4\n1 1 1 1\n");
    let res = prlc(&[
        "check-lr",
        "--code",
        rep.to_str().unwrap(),
        "--ell",
        "2",
        "--list-size",
        "1",
    ]);
    assert_eq!(res.status.code(), Some(1));
    let res = prlc(&[
        "check-lr",
        "--code",
        rep.to_str().unwrap(),
        "--ell",
        "1",
        "--list-size",
        "1",
    ]);
    assert_eq!(res.status.code(), Some(0));
}

#[test]
fn channel_sim_reports_success_rate() {
    let rep = tmp("rep5.txt");
    write_code_file(&rep, "2 1 5\n1 1 1 1 1\n");
    let json = tmp("channel.json");
    let res = prlc(&[
        "channel-sim",
        "--code",
        rep.to_str().unwrap(),
        "--noise",
        "bsc:0.1",
        "--trials",
        "2000",
        "--seed",
        "3",
        "--out",
        json.to_str().unwrap(),
    ]);
    assert_eq!(res.status.code(), Some(0), "{res:?}");
    assert!(stdout(&res).contains("overall MLDU success rate 0.99"));
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert!(doc["overall_rate"].as_f64().unwrap() > 0.98);
}

#[test]
fn experiment_from_flags_writes_reports() {
    let stem = tmp("rate");
    let res = prlc(&[
        "experiment",
        "--kind",
        "rate-lemma",
        "--mother",
        "hadamard:2:4",
        "--graph",
        "complete:16",
        "--n",
        "10",
        "--trials",
        "500",
        "--seed",
        "9",
        "--out",
        stem.to_str().unwrap(),
    ]);
    assert_eq!(res.status.code(), Some(0), "{res:?}");
    let csv = std::fs::read_to_string(stem.with_extension("csv")).unwrap();
    assert!(csv.starts_with("trial,seed,param,outcome,stat,bits\n"));
    assert_eq!(csv.lines().count(), 501);
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(stem.with_extension("json")).unwrap())
            .unwrap();
    assert_eq!(json["violated"], serde_json::Value::Bool(false));
    assert!(json["groups"][0]["bound"].as_f64().is_some());
}

#[test]
fn experiment_from_config_file_with_flag_override() {
    let cfg_path = tmp("config.json");
    std::fs::write(
        &cfg_path,
        r#"{
            "kind": "hitting-set",
            "graph": {"type": "complete", "m": 8},
            "densities": [0.25, 0.5, 0.25],
            "trials": 100,
            "master_seed": 4
        }"#,
    )
    .unwrap();
    // --trials overrides the file's 100.
    let res = prlc(&[
        "experiment",
        "--config",
        cfg_path.to_str().unwrap(),
        "--trials",
        "250",
    ]);
    assert_eq!(res.status.code(), Some(0), "{res:?}");
    assert!(stdout(&res).contains("trials 250"));
}

#[test]
fn shipped_configs_parse_and_run() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    for name in [
        "rate-lemma.json",
        "chernoff.json",
        "hitting-set.json",
        "rs-list-recover.json",
        "list-decode-compare.json",
    ] {
        let path = root.join(name);
        // Trim the trial counts so the whole set stays fast here.
        let res = if name == "list-decode-compare.json" {
            prlc(&[
                "compare",
                "--config",
                path.to_str().unwrap(),
                "--trials",
                "20",
            ])
        } else {
            prlc(&[
                "experiment",
                "--config",
                path.to_str().unwrap(),
                "--trials",
                "50",
            ])
        };
        assert_eq!(res.status.code(), Some(0), "{name}: {res:?}");
    }
}

#[test]
fn compare_prints_bit_ledgers() {
    let res = prlc(&[
        "compare",
        "--kind",
        "rate-lemma",
        "--mother",
        "hadamard:2:8",
        "--graph",
        "random:256:16:77",
        "--n",
        "16",
        "--trials",
        "5",
        "--seed",
        "2",
    ]);
    assert_eq!(res.status.code(), Some(0), "{res:?}");
    assert!(stdout(&res).contains("bits: pseudorandom 68 / uniform 128 / rlc 128"));
}

#[test]
fn usage_errors_exit_3() {
    // Unknown experiment kind.
    let res = prlc(&["experiment", "--kind", "nonsense", "--trials", "1"]);
    assert_eq!(res.status.code(), Some(3));
    // Reed-Solomon with more points than the field has.
    let res = prlc(&["puncture", "--mother", "rs:5:2:9", "--uniform", "--n", "3"]);
    assert_eq!(res.status.code(), Some(3));
    // Malformed witness file.
    let bad = tmp("badwit.txt");
    std::fs::write(&bad, "kind garbage\n").unwrap();
    let res = prlc(&["verify-witness", "--witness", bad.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(3));
}

#[test]
fn tampered_witness_fails_verification() {
    let wit = tmp("tampered.txt");
    std::fs::write(
        &wit,
        "kind clustered-set\nrho 0.25\nlist-size 2\ncenter 0 0 0 0\nword 1 1 1 1\nword 0 0 0 1\nword 0 0 1 0\n",
    )
    .unwrap();
    // 1111 is at distance 4 > floor(0.25 * 4) from the center.
    let res = prlc(&["verify-witness", "--witness", wit.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(1));
}
