use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_statedesign")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const SMOKE: &str = "\
model.family = tfim_1d
model.n = 2
model.h = -1.2
ansatz.kind = hea
ansatz.depth = 2
selection.samples = 4
selection.m = 2
run.seeds = 3
run.master_seed = 7
";

#[test]
fn smoke_run_solves_two_qubits() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "smoke.cfg", SMOKE);
    let out = dir.path().join("out");
    let start = std::time::Instant::now();
    let r = bin(&["run", "--config", &cfg, "--out", out.to_str().unwrap()]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    assert!(start.elapsed().as_secs_f64() < 5.0);

    let mut reader = csv::Reader::from_path(out.join("summary.csv")).unwrap();
    let header = reader.headers().unwrap().clone();
    let col = |name: &str| header.iter().position(|h| h == name).unwrap();
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 6);
    for row in &rows {
        let f: f64 = row[col("fidelity")].parse().unwrap();
        let e: f64 = row[col("min_energy")].parse().unwrap();
        let e0: f64 = row[col("exact_energy")].parse().unwrap();
        assert!(f > 0.9999 && f <= 1.0, "fidelity {f}");
        assert!(e >= e0 - 1e-9);
        let n_i: u64 = row[col("N_I")].parse().unwrap();
        let n_para: u64 = row[col("N_para")].parse().unwrap();
        let c_r: u64 = row[col("C_R")].parse().unwrap();
        assert_eq!(c_r, n_i * n_para);
    }
    for seed in 0..3 {
        for arm in ["baseline", "enhanced"] {
            assert!(out.join(format!("trace-{seed}-{arm}.jsonl")).exists());
        }
    }
    let trace = fs::read_to_string(out.join("trace-0-enhanced.jsonl")).unwrap();
    let phases: Vec<String> = trace
        .lines()
        .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap()["phase"].as_str().unwrap().to_string())
        .collect();
    let switch = phases.iter().position(|p| p == "joint").expect("joint phase present");
    assert!(switch > 0 && phases[..switch].iter().all(|p| p == "pretrain"));

    let table = fs::read_to_string(out.join("resources.txt")).unwrap();
    for row in ["Layers", "2-Qubit Gates", "N_I", "C_R"] {
        assert!(table.lines().any(|l| l.starts_with(row)), "missing {row}");
    }
}

#[test]
fn same_seed_gives_identical_bytes_for_any_worker_count() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "smoke.cfg", SMOKE);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(bin(&["run", "--config", &cfg, "--out", a.to_str().unwrap()]).status.success());
    assert!(bin(&["run", "--config", &cfg, "--out", b.to_str().unwrap(), "--workers", "3"]).status.success());
    for f in ["summary.csv", "resources.txt", "trace-2-enhanced.jsonl"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    let c = dir.path().join("c");
    assert!(bin(&["run", "--config", &cfg, "--out", c.to_str().unwrap(), "--master-seed", "8"]).status.success());
    assert_ne!(fs::read(a.join("summary.csv")).unwrap(), fs::read(c.join("summary.csv")).unwrap());
}

#[test]
fn bad_family_exits_2_naming_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "bad.cfg", "# comment\nmodel.family = potts\nansatz.depth = 1\n");
    let r = bin(&["run", "--config", &cfg]);
    assert_eq!(r.status.code(), Some(2));
    let err = String::from_utf8_lossy(&r.stderr);
    assert!(err.contains("line 2") && err.contains("model.family"), "{err}");
}

#[test]
fn unknown_dump_selector_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "smoke.cfg", SMOKE);
    assert_eq!(bin(&["dump", "wavefunction", "--config", &cfg]).status.code(), Some(2));
}

#[test]
fn dump_model_and_circuit() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "t4.cfg", "model.family = tfim_1d\nmodel.n = 4\nansatz.depth = 1\n");
    let r = bin(&["dump", "model", "--config", &cfg]);
    let text = String::from_utf8(r.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 8);
    assert_eq!(lines.iter().filter(|l| l.matches('Z').count() == 2).count(), 4);
    assert_eq!(lines.iter().filter(|l| l.contains('X')).count(), 4);

    let cfg2 = write(dir.path(), "hea2.cfg", "model.family = tfim_1d\nmodel.n = 2\nansatz.depth = 1\n");
    let r = bin(&["dump", "circuit", "--config", &cfg2]);
    assert_eq!(String::from_utf8(r.stdout).unwrap().lines().count(), 5);
}

#[test]
fn dump_encoder_is_stable() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "enc.cfg",
        "model.family = tfim_1d\nmodel.n = 12\nansatz.depth = 1\nencoder.members = 0,30,60,480,960,2049\n",
    );
    let first = bin(&["dump", "encoder", "--config", &cfg]);
    let second = bin(&["dump", "encoder", "--config", &cfg]);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
    let text = String::from_utf8(first.stdout).unwrap();
    assert!(text.starts_with("# encoder n=12 reference=0"));
}

#[test]
fn theorem1_passes_on_three_qubits() {
    let r = bin(&["theorem1", "--qubits", "3", "--trials", "1000", "--seed", "5"]);
    assert!(r.status.success());
    let out = String::from_utf8(r.stdout).unwrap();
    assert!(out.trim_end().ends_with("PASS"), "{out}");
}

#[test]
fn schema_lists_every_summary_column() {
    let r = bin(&["schema"]);
    let text = String::from_utf8(r.stdout).unwrap();
    for col in ["seed", "arm", "depth", "final_energy", "fidelity", "N_I", "C_R", "two_qubit_gates", "median_infidelity"] {
        assert!(text.contains(col), "{col}");
    }
}

#[test]
fn sweep_m_writes_one_row_per_m() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "smoke.cfg", SMOKE);
    let out = dir.path().join("m");
    let r = bin(&["sweep-m", "--config", &cfg, "--m", "1,2", "--seeds", "2", "--out", out.to_str().unwrap()]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    let sweep = fs::read_to_string(out.join("sweep_m.csv")).unwrap();
    let lines: Vec<&str> = sweep.lines().collect();
    assert_eq!(lines[0], "m,depth,seeds,median_infidelity,mean_infidelity");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("1,2,2,"));
}

#[test]
fn sweep_depth_tags_traces() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "smoke.cfg", SMOKE);
    let out = dir.path().join("d");
    let r = bin(&["sweep-depth", "--config", &cfg, "--depths", "1..2", "--seeds", "1", "--out", out.to_str().unwrap()]);
    assert!(r.status.success());
    assert!(out.join("trace-0-baseline-p1-m1.jsonl").exists());
    assert!(out.join("trace-0-enhanced-p2-m2.jsonl").exists());
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 5);
}
