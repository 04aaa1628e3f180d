use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_reflectnet"));
    c.env_remove("REFLECTNET_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn reflectnet")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

struct Work {
    dir: TempDir,
}

impl Work {
    fn new() -> Self {
        Self {
            dir: tempfile::tempdir().unwrap(),
        }
    }

    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn s(&self, name: &str) -> String {
        self.path(name).to_string_lossy().into_owned()
    }

    fn write(&self, name: &str, body: &str) -> String {
        fs::write(self.path(name), body).unwrap();
        self.s(name)
    }
}

fn ok(o: &Output) {
    assert_eq!(code(o), 0, "stdout: {}\nstderr: {}", stdout(o), stderr(o));
}

fn read_jsonl(p: &Path) -> Vec<Value> {
    fs::read_to_string(p)
        .unwrap()
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

fn encode_simulate(w: &Work, frames: &str, snr: &str, seed: &str) -> String {
    let f = w.write("frames.jsonl", frames);
    ok(&run(&["encode", &f, &w.s("tx.sym")]));
    ok(&run(&[
        "simulate",
        &w.s("tx.sym"),
        &w.s("rx.iq"),
        "--snr-db",
        snr,
        "--seed",
        seed,
    ]));
    w.s("rx.iq")
}

#[test]
fn empty_frames_file_gives_pure_idle() {
    let w = Work::new();
    let f = w.write("empty.jsonl", "");
    ok(&run(&["encode", &f, &w.s("idle.sym"), "--idle-prefix", "1000"]));
    let sym = fs::read(w.path("idle.sym")).unwrap();
    assert_eq!(sym.len(), 1000);
    assert!(sym.iter().all(|&b| b <= 1));
    assert!(w.path("idle.sym.json").exists());
}

#[test]
fn noiseless_single_frame_roundtrip() {
    let w = Work::new();
    let iq = encode_simulate(&w, "{\"id\":\"x\",\"hex\":\"deadbeef0102\"}\n", "inf", "4");
    let out = run(&["decode", &iq, &w.s("rx.jsonl"), "--report", &w.s("report.json")]);
    ok(&out);
    let frames = read_jsonl(&w.path("rx.jsonl"));
    assert_eq!(frames.len(), 1);
    assert_eq!(frames[0]["hex"], "deadbeef0102");
    let report: Value = serde_json::from_slice(&fs::read(w.path("report.json")).unwrap()).unwrap();
    assert_eq!(report["stats"]["codes"]["invalid_uncorrectable"], 0);
    assert_eq!(report["lfsr"]["N"], 11);
}

#[test]
fn malformed_hex_reports_line_number() {
    let w = Work::new();
    let f = w.write("bad.jsonl", "{\"id\":\"a\",\"hex\":\"00ff\"}\n{\"id\":\"b\",\"hex\":\"0g\"}\n");
    let out = run(&["encode", &f, &w.s("x.sym")]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));
}

#[test]
fn missing_input_is_an_input_error() {
    let w = Work::new();
    assert_eq!(code(&run(&["encode", &w.s("nope.jsonl"), &w.s("x.sym")])), 2);
    assert_eq!(code(&run(&["decode", &w.s("nope.iq"), &w.s("x.jsonl")])), 2);
    assert_eq!(code(&run(&["budget", "--pt-dbm", "13"])), 2);
}

#[test]
fn simulate_is_deterministic_per_seed() {
    let w = Work::new();
    let f = w.write("f.jsonl", "{\"id\":\"a\",\"hex\":\"a5a5\"}\n");
    ok(&run(&["encode", &f, &w.s("tx.sym")]));
    for (name, seed) in [("a.iq", "9"), ("b.iq", "9"), ("c.iq", "10")] {
        ok(&run(&["simulate", &w.s("tx.sym"), &w.s(name), "--seed", seed]));
    }
    let a = fs::read(w.path("a.iq")).unwrap();
    assert_eq!(a, fs::read(w.path("b.iq")).unwrap());
    assert_ne!(a, fs::read(w.path("c.iq")).unwrap());
}

#[test]
fn infinite_snr_is_two_valued() {
    let w = Work::new();
    let f = w.write("f.jsonl", "{\"id\":\"a\",\"hex\":\"0123456789\"}\n");
    ok(&run(&["encode", &f, &w.s("tx.sym")]));
    ok(&run(&[
        "simulate",
        &w.s("tx.sym"),
        &w.s("rx.iq"),
        "--snr-db",
        "inf",
        "--rise",
        "0",
        "--gamma-on",
        "-0.5,0.25",
    ]));
    let raw = fs::read(w.path("rx.iq")).unwrap();
    let mut points: Vec<[u8; 8]> = raw.chunks_exact(8).map(|c| c.try_into().unwrap()).collect();
    points.sort();
    points.dedup();
    assert_eq!(points.len(), 2);
    let side: Value = serde_json::from_slice(&fs::read(w.path("rx.iq.json")).unwrap()).unwrap();
    assert_eq!(side["sample_rate_hz"], 1.6e9);
}

#[test]
fn trained_model_is_reusable() {
    let w = Work::new();
    let idle = w.write("idle.jsonl", "");
    ok(&run(&["encode", &idle, &w.s("idle.sym"), "--idle-prefix", "40000"]));
    ok(&run(&["simulate", &w.s("idle.sym"), &w.s("idle.iq"), "--snr-db", "0", "--seed", "1"]));
    ok(&run(&["decode", &w.s("idle.iq"), &w.s("idle.jsonl.out"), "--train-idle", &w.s("model.json")]));
    let model: Value = serde_json::from_slice(&fs::read(w.path("model.json")).unwrap()).unwrap();
    assert_eq!(model["weights"].as_array().unwrap().len(), 12);
    assert!(read_jsonl(&w.path("idle.jsonl.out")).is_empty());

    let frames = w.write("f.jsonl", "{\"id\":\"a\",\"hex\":\"cafebabe\"}\n");
    ok(&run(&["encode", &frames, &w.s("tx.sym"), "--seed", "0x155"]));
    ok(&run(&["simulate", &w.s("tx.sym"), &w.s("tx.iq"), "--snr-db", "10", "--seed", "2"]));
    let out = run(&[
        "decode",
        &w.s("tx.iq"),
        &w.s("rx.jsonl"),
        "--discriminator",
        "model",
        "--model",
        &w.s("model.json"),
        "--truth",
        &w.s("tx.sym"),
        "--report",
        &w.s("r.json"),
    ]);
    ok(&out);
    assert_eq!(read_jsonl(&w.path("rx.jsonl"))[0]["hex"], "cafebabe");
    let report: Value = serde_json::from_slice(&fs::read(w.path("r.json")).unwrap()).unwrap();
    assert!(report["stats"]["ser"].as_f64().unwrap() < 0.01);
}

#[test]
fn model_discriminator_needs_a_model() {
    let w = Work::new();
    let iq = encode_simulate(&w, "{\"id\":\"a\",\"hex\":\"01\"}\n", "inf", "1");
    let out = run(&["decode", &iq, &w.s("o.jsonl"), "--discriminator", "model"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn correction_never_adds_invalid_codes() {
    let w = Work::new();
    let payload: String = (0..400).map(|i| format!("{:02x}", (i * 37) % 256)).collect();
    let iq = encode_simulate(&w, &format!("{{\"id\":\"a\",\"hex\":\"{payload}\"}}\n"), "-4", "3");
    let invalid = |extra: &[&str], report: &str| {
        let (out_path, rp) = (w.s("o.jsonl"), w.s(report));
        let mut args = vec!["decode", iq.as_str(), &out_path, "--report", &rp];
        args.extend_from_slice(extra);
        let out = run(&args);
        assert!(matches!(code(&out), 0 | 1), "{}", stderr(&out));
        let r: Value = serde_json::from_slice(&fs::read(w.path(report)).unwrap()).unwrap();
        r["stats"]["codes"]["invalid_uncorrectable"].as_u64().unwrap()
    };
    let with = invalid(&[], "with.json");
    let without = invalid(&["--no-correct"], "without.json");
    assert!(without >= with, "without {without} with {with}");
    assert!(without > 0);
}

#[test]
fn degenerate_capture_is_a_pipeline_failure() {
    let w = Work::new();
    fs::write(w.path("flat.sym"), vec![0u8; 5000]).unwrap();
    ok(&run(&["simulate", &w.s("flat.sym"), &w.s("flat.iq"), "--snr-db", "inf"]));
    let out = run(&["decode", &w.s("flat.iq"), &w.s("o.jsonl")]);
    assert_eq!(code(&out), 3, "{}", stderr(&out));
}

#[test]
fn truncated_frame_is_degraded() {
    let w = Work::new();
    let payload = "77".repeat(300);
    let iq = encode_simulate(&w, &format!("{{\"id\":\"a\",\"hex\":\"{payload}\"}}\n"), "inf", "5");
    // Keep the IDLE prefix and half of the payload.
    let raw = fs::read(&iq).unwrap();
    let symbols = 4096 + 10 + 300 * 10 / 2;
    let keep = (symbols as f64 * 12.8) as usize * 8;
    fs::write(&iq, &raw[..keep]).unwrap();
    let out = run(&["decode", &iq, &w.s("o.jsonl"), "--report", &w.s("r.json")]);
    assert_eq!(code(&out), 1, "{}", stderr(&out));
    let r: Value = serde_json::from_slice(&fs::read(w.path("r.json")).unwrap()).unwrap();
    assert!(r["frames"][0]["byte_error_mask"].is_array());
}

#[test]
fn cer_model_at_zero() {
    let out = run(&["eval", "--cer-model", "--pe", "0"]);
    ok(&out);
    let v: Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["cer"], 0.0);
    let out = run(&["eval", "--cer-model", "--pe", "0.5", "--variant", "exclusion", "--windows", "20000"]);
    ok(&out);
    let v: Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert_eq!(v["cer"], 0.96875);
    assert_eq!(v["check"]["closer"], "exclusion");
    assert_eq!(code(&run(&["eval", "--cer-model"])), 2);
}

#[test]
fn sweep_default_grid_has_21_rows() {
    let w = Work::new();
    ok(&run(&["eval", "--sweep", "--codes", "2000", "--out", &w.s("s.csv")]));
    let mut rd = csv::Reader::from_path(w.path("s.csv")).unwrap();
    let headers = rd.headers().unwrap().clone();
    assert!(headers.iter().any(|h| h == "corrected_correct"));
    assert_eq!(rd.records().count(), 21);
}

#[test]
fn correlation_on_own_idle() {
    let w = Work::new();
    let f = w.write("e.jsonl", "");
    ok(&run(&["encode", &f, &w.s("i.sym"), "--idle-prefix", "8000", "--seed", "1234"]));
    ok(&run(&["simulate", &w.s("i.sym"), &w.s("i.iq"), "--snr-db", "inf"]));
    let out = run(&["eval", "--correlation", &w.s("i.iq"), "--seed", "5"]);
    ok(&out);
    let v: Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert!(v["r"].as_f64().unwrap() >= 0.99, "{v}");
}

fn budget(extra: &[(&str, &str)]) -> f64 {
    let mut args = vec![
        ("--pt-dbm", "13"),
        ("--gain-dbi", "6"),
        ("--freq-mhz", "840"),
        ("--rcs-dbsm", "-30"),
        ("--range-m", "3"),
    ];
    for (k, v) in extra {
        args.iter_mut().find(|(a, _)| a == k).unwrap().1 = v;
    }
    let mut flat = vec!["budget"];
    for (k, v) in &args {
        flat.push(k);
        flat.push(v);
    }
    let out = run(&flat);
    ok(&out);
    stdout(&out).trim().parse().unwrap()
}

#[test]
fn budget_scaling() {
    let base = budget(&[]);
    let far = budget(&[("--range-m", "6")]);
    assert!((base - far - 40.0 * 2f64.log10()).abs() < 1e-3);
    assert!(((base - far) - 12.04).abs() < 0.01);
    let gain = budget(&[("--gain-dbi", "9")]);
    assert!((gain - base - 6.0).abs() < 1e-3);
    let neg = budget(&[("--pt-dbm", "-10")]);
    assert!((base - neg - 23.0).abs() < 1e-3);
}

#[test]
fn thread_cap_variable() {
    let good = bin()
        .env("REFLECTNET_THREADS", "1")
        .args(["eval", "--cer-model", "--pe", "0.1", "--windows", "1000"])
        .output()
        .unwrap();
    ok(&good);
    let bad = bin()
        .env("REFLECTNET_THREADS", "many")
        .args(["eval", "--cer-model", "--pe", "0.1"])
        .output()
        .unwrap();
    assert_eq!(code(&bad), 2);
}
