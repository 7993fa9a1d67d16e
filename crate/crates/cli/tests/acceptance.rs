//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails. Runs at full size; expect tens of
//! minutes on a single core.

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use num_complex::Complex64;
use rand::Rng;
use statedesign::ansatz::{build_hea, build_hva_cluster, build_hva_hubbard, build_hva_tfim, Entangler, Lattice};
use statedesign::encoder::{synthesize, verify_support, BasisSet};
use statedesign::ground::shift_invert_ground_energy;
use statedesign::models::{cluster_ising, hubbard_jw, tfim};
use statedesign::rng::{stream_rng, Stream};
use statedesign::vqe::{theorem1_suite, Arm, Objective};
use statedesign::{count_resources, exact_ground, Boundary, ModelSpec, PauliSum, Statevector};
use statedesign_cli::config::ExperimentConfig;
use statedesign_cli::runner::{median, SummaryRow};
use statedesign_cli::{run_and_write, runner::Job};

const SEEDS: u64 = 10;
const MASTER_SEED: u64 = 2024;

struct Criterion {
    name: &'static str,
    passed: bool,
    detail: String,
}

fn report(name: &'static str, passed: bool, detail: String, started: Instant) -> Criterion {
    println!(
        "{} {name}: {detail} [{:.1}s]",
        if passed { "PASS" } else { "FAIL" },
        started.elapsed().as_secs_f64()
    );
    let _ = std::io::stdout().flush();
    Criterion { name, passed, detail }
}

/// Lowest trace energy minus exact ground energy, over every run.
#[derive(Default)]
struct Floor {
    runs: usize,
    worst: f64,
    worst_at: String,
}

impl Floor {
    fn absorb(&mut self, label: &str, rows: &[SummaryRow]) {
        for r in rows {
            self.runs += 1;
            let gap = r.min_energy - r.exact_energy;
            if self.runs == 1 || gap < self.worst {
                self.worst = gap;
                self.worst_at = format!("{label} seed {} {} p={} m={}", r.seed, r.arm, r.depth, r.m);
            }
        }
    }
}

fn select<'a>(rows: &'a [SummaryRow], arm: Arm, depth: usize, m: usize) -> Vec<&'a SummaryRow> {
    rows.iter().filter(|r| r.arm == arm.label() && r.depth == depth && r.m == m).collect()
}

fn median_fidelity(rows: &[&SummaryRow]) -> f64 {
    median(&mut rows.iter().map(|r| r.fidelity).collect::<Vec<_>>())
}

fn clearing(rows: &[&SummaryRow], level: f64) -> usize {
    rows.iter().filter(|r| r.fidelity >= level).count()
}

fn mean_c_r(rows: &[&SummaryRow]) -> f64 {
    let n_i = rows.iter().map(|r| r.n_i as f64).sum::<f64>() / rows.len() as f64;
    n_i * rows[0].n_para as f64
}

fn jobs(list: &[(Arm, usize, usize)]) -> Vec<Job> {
    let mut out = Vec::new();
    for &(arm, depth, m) in list {
        for seed in 0..SEEDS {
            out.push(Job { seed, arm, depth, m });
        }
    }
    out
}

fn run(config: &str, out: &Path, list: &[(Arm, usize, usize)]) -> Vec<SummaryRow> {
    let mut cfg = ExperimentConfig::parse(config).expect("valid acceptance config");
    cfg.out = out.to_path_buf();
    let (_, rows) = run_and_write(&cfg, &jobs(list), 1, true).expect("runs complete");
    rows
}

fn theorem1() -> Criterion {
    let t = Instant::now();
    let rep = theorem1_suite(2..=6, 1000, MASTER_SEED).expect("suite runs");
    let passed = rep.worst_sum_gap < 1e-12
        && rep.worst_bruteforce_gap < 1e-9
        && rep.worst_collinearity_gap < 1e-9
        && t.elapsed().as_secs_f64() < 60.0;
    let detail = format!(
        "{} trials n=2..6, |F*-sum F_j| {:.1e}, |F*-brute| {:.1e}, collinearity {:.1e}",
        rep.trials, rep.worst_sum_gap, rep.worst_bruteforce_gap, rep.worst_collinearity_gap
    );
    report("theorem 1 suite", passed, detail, t)
}

fn gradients() -> Criterion {
    let t = Instant::now();
    let mut rng = stream_rng(MASTER_SEED, 0, Stream::Fixture);
    let mut worst = 0.0f64;
    let mut configs = 0;
    for family in 0..4 {
        for _ in 0..100 {
            let layers = rng.random_range(1..=4);
            let (u, h, input) = match family {
                0 => {
                    let n = rng.random_range(2..=8);
                    let spec = ModelSpec::Tfim1d { n, j: -1.0, h: -1.2, boundary: Boundary::Periodic };
                    (build_hea(n, layers, Entangler::Ring).unwrap(), tfim(&spec).unwrap(), Statevector::zero(n))
                }
                1 => {
                    // odd/even bond layers need an even ring
                    let n = 2 * rng.random_range(2..=4);
                    let spec = ModelSpec::Tfim1d { n, j: rng.random_range(-2.0..2.0), h: rng.random_range(-2.0..2.0), boundary: Boundary::Periodic };
                    (build_hva_tfim(Lattice::Ring(n), layers).unwrap(), tfim(&spec).unwrap(), Statevector::zero(n))
                }
                2 => {
                    let n = rng.random_range(3..=8);
                    let h = cluster_ising(n, 1.0, rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)).unwrap();
                    (build_hva_cluster(n, layers).unwrap(), h, Statevector::zero(n))
                }
                _ => {
                    let sites = rng.random_range(2..=4);
                    let spec = ModelSpec::Hubbard { sites, t: 1.0, u: rng.random_range(0.0..10.0) };
                    let h = spec.hamiltonian().unwrap();
                    let input = Statevector::basis(2 * sites, spec.reference_index()).unwrap();
                    (build_hva_hubbard(sites, layers).unwrap(), h, input)
                }
            };
            let theta: Vec<f64> = (0..u.n_params()).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
            let obj = Objective::new(&u, &input, &h).unwrap();
            let adj = obj.evaluate(&theta).unwrap().gradient;
            let fd = obj.central_differences(&theta, 1e-6).unwrap();
            for (a, f) in adj.iter().zip(&fd) {
                worst = worst.max((a - f).abs() / f.abs().max(1e-2));
            }
            configs += 1;
        }
    }
    let passed = worst < 1e-5 && t.elapsed().as_secs_f64() < 120.0;
    report(
        "gradient correctness",
        passed,
        format!("{configs} configurations over HEA, HVA-TFIM, HVA-cluster, HVA-Hubbard; worst relative error {worst:.1e}"),
        t,
    )
}

fn oracle() -> Criterion {
    let t = Instant::now();
    let cases: Vec<(&str, PauliSum)> = vec![
        ("tfim_1d n=10", tfim(&ModelSpec::Tfim1d { n: 10, j: -1.0, h: -1.2, boundary: Boundary::Periodic }).unwrap()),
        ("tfim_2d 3x3", tfim(&ModelSpec::Tfim2d { rows: 3, cols: 3, j: -1.0, h: -3.0, boundary: Boundary::Periodic }).unwrap()),
        ("cluster_ising n=10", cluster_ising(10, 1.0, 0.1, 0.1).unwrap()),
        ("hubbard 4 sites U=2", hubbard_jw(4, 1.0, 2.0).unwrap()),
        ("hubbard 4 sites U=10", hubbard_jw(4, 1.0, 10.0).unwrap()),
    ];
    let mut worst = 0.0f64;
    for (_, h) in &cases {
        let dense = exact_ground(h, None).unwrap().energy;
        let si = shift_invert_ground_energy(h).unwrap();
        worst = worst.max((dense - si).abs());
    }
    report(
        "oracle cross-check",
        worst < 1e-9,
        format!("dense eigensolver vs shift-invert on {} models, worst |dE0| {worst:.1e}", cases.len()),
        t,
    )
}

fn encoders() -> Criterion {
    let t = Instant::now();
    let mut rng = stream_rng(MASTER_SEED, 1, Stream::Fixture);
    let mut worst_leak = 0.0f64;
    let mut worst_overlap = 1.0f64;
    let mut built = 0;
    for n in [4usize, 8, 12] {
        for m in [2usize, 4, 6, 8, 12] {
            let mut members = vec![0usize];
            while members.len() < m {
                let k = rng.random_range(1..1usize << n);
                if !members.contains(&k) {
                    members.push(k);
                }
            }
            let enc = synthesize(&BasisSet::new(n, members.clone(), 0).unwrap()).unwrap();
            worst_leak = worst_leak.max(verify_support(&enc, 1000, &mut rng).unwrap().worst_leakage);
            for _ in 0..100 {
                let target: Vec<Complex64> =
                    (0..m).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
                let norm = target.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
                let s = enc.prepare(&enc.solve_parameters(&target).unwrap()).unwrap();
                let overlap: Complex64 =
                    members.iter().zip(&target).map(|(&i, a)| (a / norm).conj() * s.amplitudes()[i]).sum();
                worst_overlap = worst_overlap.min(overlap.norm_sqr());
            }
            built += 1;
        }
    }
    let appendix = synthesize(&BasisSet::new(12, vec![0, 30, 60, 480, 960, 2049], 0).unwrap()).unwrap();
    let r = count_resources(appendix.circuit(), true);
    let gates = r.one_qubit_gates + r.two_qubit_gates;
    let mut arng = stream_rng(MASTER_SEED, 2, Stream::Fixture);
    let appendix_leak = verify_support(&appendix, 1000, &mut arng).unwrap().worst_leakage;
    let passed = worst_leak < 1e-10 && worst_overlap > 1.0 - 1e-8 && gates <= 82 && appendix_leak < 1e-10;
    report(
        "encoder properties",
        passed,
        format!(
            "{built} encoders, worst leakage {worst_leak:.1e}, worst overlap 1-{:.1e}; appendix instance {gates} elementary gates",
            1.0 - worst_overlap
        ),
        t,
    )
}

const TFIM_CONFIG: &str = "\
model.family = tfim_1d
model.n = 12
model.j = -1
model.h = -1.2
model.boundary = periodic
ansatz.kind = hea
ansatz.entangler = ring
ansatz.depth = 8
ansatz.encoder_replaces_layer = true
selection.samples = 2000
selection.m = 6
run.master_seed = 2024
";

const TFIM_JOBS: [(Arm, usize, usize); 3] = [(Arm::Baseline, 12, 1), (Arm::Baseline, 8, 1), (Arm::Enhanced, 8, 6)];

fn tfim_headline(out: &Path, floor: &mut Floor) -> Criterion {
    let t = Instant::now();
    let rows = run(TFIM_CONFIG, out, &TFIM_JOBS);
    floor.absorb("tfim", &rows);
    let b12 = select(&rows, Arm::Baseline, 12, 1);
    let b8 = select(&rows, Arm::Baseline, 8, 1);
    let e8 = select(&rows, Arm::Enhanced, 8, 6);
    let gates = b12[0].two_qubit_gates;
    let passed = clearing(&b12, 0.99) >= 7
        && clearing(&e8, 0.99) >= 7
        && median_fidelity(&e8) > median_fidelity(&b8)
        && gates == 144;
    let detail = format!(
        "baseline p=12 median F {:.4} ({}/10 >= 0.99), enhanced p=8 median F {:.4} ({}/10 >= 0.99), baseline p=8 median F {:.4}, baseline p=12 two-qubit gates {gates}",
        median_fidelity(&b12),
        clearing(&b12, 0.99),
        median_fidelity(&e8),
        clearing(&e8, 0.99),
        median_fidelity(&b8)
    );
    report("1D TFIM headline", passed, detail, t)
}

fn cluster(out: &Path, floor: &mut Floor) -> Criterion {
    let t = Instant::now();
    // The open chain has a four-fold edge-mode quasi-degeneracy split by
    // ~2.5e-5 at n=12; fidelity is measured against that whole manifold.
    let config = "\
model.family = cluster_ising
model.n = 12
model.j = 1
model.h1 = 0.1
model.h2 = 0.1
model.degeneracy_tolerance = 1e-4
ansatz.kind = hva
ansatz.depth = 6
selection.samples = 2000
selection.m = 6
run.master_seed = 2024
";
    let rows = run(config, out, &[(Arm::Baseline, 6, 1), (Arm::Enhanced, 6, 6), (Arm::Baseline, 9, 1)]);
    floor.absorb("cluster", &rows);
    let b6 = select(&rows, Arm::Baseline, 6, 1);
    let e6 = select(&rows, Arm::Enhanced, 6, 6);
    let b9 = select(&rows, Arm::Baseline, 9, 1);
    let (fe6, fb6, fb9) = (median_fidelity(&e6), median_fidelity(&b6), median_fidelity(&b9));
    let (cre, crb) = (mean_c_r(&e6), mean_c_r(&b9));
    let passed = fe6 >= 0.99 && fb6 < 0.99 && fb9 >= 0.99 && cre < crb;
    let detail = format!(
        "enhanced p=6 median F {fe6:.4}, baseline p=6 {fb6:.4}, baseline p=9 {fb9:.4}; C_R enhanced p=6 {cre:.0} vs baseline p=9 {crb:.0}"
    );
    report("cluster-Ising", passed, detail, t)
}

fn hubbard(out: &Path, floor: &mut Floor) -> Criterion {
    let t = Instant::now();
    let config = |u: f64| {
        format!(
            "model.family = hubbard\nmodel.sites = 4\nmodel.t = 1\nmodel.u = {u}\nansatz.kind = hva\nansatz.depth = 5\nselection.samples = 70\nselection.m = 6\nrun.master_seed = 2024\n"
        )
    };
    let mut parts = Vec::new();
    let mut passed = true;

    let rows = run(&config(2.0), &out.join("u2"), &[(Arm::Baseline, 9, 1), (Arm::Enhanced, 5, 6)]);
    floor.absorb("hubbard U=2", &rows);
    let (fb9, fe5) = (median_fidelity(&select(&rows, Arm::Baseline, 9, 1)), median_fidelity(&select(&rows, Arm::Enhanced, 5, 6)));
    passed &= fb9 >= 0.99 && fe5 >= 0.99;
    parts.push(format!("U=2 baseline p=9 {fb9:.4}, enhanced p=5 {fe5:.4}"));

    for u in [5.0, 10.0] {
        let rows = run(
            &config(u),
            &out.join(format!("u{u}")),
            &[(Arm::Baseline, 5, 1), (Arm::Enhanced, 5, 6), (Arm::Baseline, 9, 1), (Arm::Enhanced, 9, 6)],
        );
        floor.absorb("hubbard", &rows);
        let mut gap_ok = false;
        let mut best_enhanced = 0.0f64;
        let mut gaps = Vec::new();
        for p in [5, 9] {
            let fb = median_fidelity(&select(&rows, Arm::Baseline, p, 1));
            let fe = median_fidelity(&select(&rows, Arm::Enhanced, p, 6));
            gap_ok |= fe - fb >= 0.2;
            best_enhanced = best_enhanced.max(fe);
            gaps.push(format!("p={p} enhanced {fe:.4} baseline {fb:.4}"));
        }
        passed &= gap_ok && best_enhanced >= 0.95;
        parts.push(format!("U={u} {}", gaps.join(", ")));
    }
    report("Fermi-Hubbard", passed, parts.join("; "), t)
}

fn m_sweep(out: &Path, floor: &mut Floor) -> Criterion {
    let t = Instant::now();
    // depth 6 with the encoder replacing a layer leaves the 5-layer HEA base
    let rows = run(TFIM_CONFIG, out, &[(Arm::Enhanced, 6, 1), (Arm::Enhanced, 6, 6)]);
    floor.absorb("m-sweep", &rows);
    let infidelity = |m| median(&mut select(&rows, Arm::Enhanced, 6, m).iter().map(|r| 1.0 - r.fidelity).collect::<Vec<_>>());
    let (i1, i6) = (infidelity(1), infidelity(6));
    let ratio = i6 / i1;
    report(
        "m-sweep",
        i6 <= i1 && ratio <= 0.5,
        format!("median infidelity m=1 {i1:.4e}, m=6 {i6:.4e}, ratio {ratio:.3}"),
        t,
    )
}

fn determinism(first: &Path, second: &Path, floor: &mut Floor) -> Criterion {
    let t = Instant::now();
    let rows = run(TFIM_CONFIG, second, &TFIM_JOBS);
    floor.absorb("tfim repeat", &rows);
    let a = std::fs::read(first.join("summary.csv")).unwrap();
    let b = std::fs::read(second.join("summary.csv")).unwrap();
    report(
        "determinism",
        a == b && !a.is_empty(),
        format!("repeated 1D TFIM headline summary.csv: {} bytes, identical: {}", a.len(), a == b),
        t,
    )
}

fn main() {
    let dir = tempfile::tempdir().expect("temp dir");
    let mut floor = Floor::default();
    let mut results = vec![theorem1(), gradients(), oracle(), encoders()];
    results.push(tfim_headline(&dir.path().join("tfim"), &mut floor));
    results.push(cluster(&dir.path().join("cluster"), &mut floor));
    results.push(hubbard(&dir.path().join("hubbard"), &mut floor));
    results.push(m_sweep(&dir.path().join("msweep"), &mut floor));
    results.push(determinism(&dir.path().join("tfim"), &dir.path().join("tfim-repeat"), &mut floor));
    let floor_t = Instant::now();
    results.push(report(
        "variational floor",
        floor.runs > 0 && floor.worst >= -1e-9,
        format!("{} runs, lowest (E - E0) {:.3e} at {}", floor.runs, floor.worst, floor.worst_at),
        floor_t,
    ));

    println!("\nacceptance summary");
    for c in &results {
        println!("  {} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    let failed = results.iter().filter(|c| !c.passed).count();
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
