use std::path::PathBuf;
use std::process::{Command, Output};

fn thuetape(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_thuetape"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("thuetape-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn check_dyck() {
    let o = thuetape(&["check", "--system", "DYCK"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "church-rosser: yes");
}

#[test]
fn check_reports_witness_for_non_confluent_file() {
    let path = scratch("bad.thue");
    std::fs::write(
        &path,
        "alphabet a b c\nt3 c\nrule a b -> c\nrule b c -> a\n",
    )
    .unwrap();
    let o = thuetape(&["check", "--system", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).starts_with("church-rosser: no"));
}

#[test]
fn run_midbit_middle_bit() {
    let o = thuetape(&["run", "--system", "MIDBIT", "--input", "1 0 1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).lines().next(), Some("$̄ 0 $"));
    let o = thuetape(&["run", "--system", "MIDBIT", "--input", "0 1 0"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn number_codes() {
    assert_eq!(stdout(&thuetape(&["encode-num", "0"])).trim(), "11");
    let code = stdout(&thuetape(&["encode-num", "37"]));
    let back = thuetape(&["decode-num", code.trim()]);
    assert_eq!(stdout(&back).trim(), "37");
    assert_eq!(thuetape(&["decode-num", "0"]).status.code(), Some(2));
}

#[test]
fn constants_worked_example() {
    let path = scratch("four.thue");
    std::fs::write(&path, "alphabet a b c d\nt3 c d\nrule a b ->\n").unwrap();
    let o = thuetape(&[
        "constants",
        "--system",
        path.to_str().unwrap(),
        "--alpha",
        "1/7",
        "--json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["A"], 4);
    assert_eq!(v["beta"], "1/14");
    assert_eq!(v["H"], 32);
    assert_eq!(v["K"], 15);
    assert_eq!(v["d"], 14);
}

#[test]
fn trace_verify_pump_roundtrip() {
    let trace = scratch("dyck.json");
    let t = trace.to_str().unwrap();
    let o = thuetape(&[
        "trace", "--system", "DYCK", "--input", "b a b a", "--out", t,
    ]);
    assert_eq!(o.status.code(), Some(0));
    let o = thuetape(&["verify", "--system", "DYCK", "--trace", t]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("full: consistent"));

    let o = thuetape(&[
        "trace", "--system", "DYCK", "--input", "b a b a", "--stop", "0", "--out", t,
    ]);
    assert_eq!(o.status.code(), Some(0));
    // at time 0 every sequence is empty, so any input-region pair is equal
    let cut = scratch("cut.json");
    let o = thuetape(&[
        "pump",
        "--system",
        "DYCK",
        "--trace",
        t,
        "--i",
        "3",
        "--j",
        "5",
        "--out",
        cut.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let o = thuetape(&[
        "verify",
        "--system",
        "DYCK",
        "--trace",
        cut.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn tampered_trace_fails_verification() {
    let trace = scratch("tamper.json");
    let t = trace.to_str().unwrap();
    thuetape(&["trace", "--system", "AA", "--input", "a a", "--out", t]);
    let mut v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&trace).unwrap()).unwrap();
    let seqs = v["sequences"].as_array_mut().unwrap();
    seqs[1]["states"].as_array_mut().unwrap().pop();
    std::fs::write(&trace, v.to_string()).unwrap();
    let o = thuetape(&["verify", "--system", "AA", "--trace", t]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("local: incompatible"));
}

#[test]
fn self_splice_keeps_reduct() {
    let o = thuetape(&[
        "splice",
        "--system",
        "DYCK",
        "--input",
        "b a b a",
        "--u",
        "3",
        "--v",
        "2",
        "--time",
        "0",
        "--with-u",
        "3",
        "--with-v",
        "2",
        "--with-time",
        "0",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}

#[test]
fn gen_midbit_roundtrip() {
    let path = scratch("midbit.thue");
    let p = path.to_str().unwrap();
    let o = thuetape(&["gen-midbit", "--out", p, "--counts", "--json"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["bitstring_rules"], 208);
    assert_eq!(v["published_total"], 20720);
    assert_eq!(thuetape(&["check", "--system", p]).status.code(), Some(0));
    let o = thuetape(&["run", "--system", p, "--input", "1 1 0 1 1"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn experiment_report() {
    let path = scratch("report.json");
    let o = thuetape(&[
        "experiment",
        "--system",
        "PAIRS",
        "--family",
        "palpower",
        "--w",
        "011",
        "--i",
        "1",
        "--alpha",
        "1/7",
        "--report",
        path.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["family"], "palpower");
    assert!(!v["depletion"]["snapshots"].as_array().unwrap().is_empty());
}

#[test]
fn dump_dfa_is_tab_separated() {
    let o = thuetape(&["dump-dfa", "--system", "DYCK"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().all(|l| l.contains('\t')));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(thuetape(&["check"]).status.code(), Some(2));
    assert_eq!(
        thuetape(&["check", "--system", "/nonexistent"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(thuetape(&["bogus"]).status.code(), Some(2));
}
