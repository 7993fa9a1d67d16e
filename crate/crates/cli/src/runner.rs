//! Job scheduling and artifact emission.
//!
//! Jobs run on a rayon pool; results come back in job order and a single
//! collector writes every file, so output bytes do not depend on the worker
//! count.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use log::info;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use statedesign::vqe::{run_pipeline, Arm, PipelineConfig, Problem, RunRecord};

use crate::config::ExperimentConfig;
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Job {
    pub seed: u64,
    pub arm: Arm,
    pub depth: usize,
    /// Encoder size; 1 for the baseline arm.
    pub m: usize,
}

#[derive(Clone, Debug)]
pub struct JobResult {
    pub job: Job,
    pub record: RunRecord,
}

/// One row of `summary.csv`. Column order is the schema.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryRow {
    pub seed: u64,
    pub arm: &'static str,
    pub depth: usize,
    pub m: usize,
    pub final_energy: f64,
    pub pretrain_energy: f64,
    pub min_energy: f64,
    pub exact_energy: f64,
    pub fidelity: f64,
    #[serde(rename = "N_I")]
    pub n_i: usize,
    #[serde(rename = "N_para")]
    pub n_para: usize,
    #[serde(rename = "C_R")]
    pub c_r: u64,
    pub layers: usize,
    pub two_qubit_gates: usize,
    pub one_qubit_gates: usize,
    pub joint_start: Option<usize>,
    pub selection_fallback: bool,
}

pub const SUMMARY_COLUMNS: &[(&str, &str)] = &[
    ("seed", "run index; the named random streams are derived from (master seed, seed)"),
    ("arm", "baseline or enhanced"),
    ("depth", "total layer budget p; the enhanced arm counts the encoder as one layer when it replaces an ansatz layer"),
    ("m", "basis states in the encoder input; 1 for the baseline arm"),
    ("final_energy", "energy of the returned parameters"),
    ("pretrain_energy", "best energy of the ansatz-only phase"),
    ("min_energy", "lowest energy recorded anywhere in the trace"),
    ("exact_energy", "exact ground energy E0 (sector-restricted for hubbard)"),
    ("fidelity", "overlap of the final state with the exact ground space, in [0,1]"),
    ("N_I", "optimizer updates over both phases"),
    ("N_para", "trainable parameters in the final circuit, encoder included"),
    ("C_R", "N_I * N_para"),
    ("layers", "layers of the final circuit, encoder counted as one"),
    ("two_qubit_gates", "two-qubit gates after expanding composites into the native set"),
    ("one_qubit_gates", "single-qubit gates after expansion"),
    ("joint_start", "trace index where the joint phase begins; empty for the baseline arm"),
    ("selection_fallback", "true when the threshold pool was too small and the lowest scores filled it"),
];

pub const SWEEP_M_COLUMNS: &[(&str, &str)] = &[
    ("m", "encoder size"),
    ("depth", "total layer budget"),
    ("seeds", "runs aggregated"),
    ("median_infidelity", "median over seeds of 1 - fidelity"),
    ("mean_infidelity", "mean over seeds of 1 - fidelity"),
];

pub const TRACE_FIELDS: &[(&str, &str)] = &[
    ("phase", "pretrain or joint; the first joint line is the encoder-introduction marker"),
    ("iteration", "index within the phase, starting at 0"),
    ("energy", "energy at this iterate"),
    ("grad_norm", "Euclidean norm of the gradient at this iterate"),
    ("param_hash", "FNV-1a hash of the parameter bits, for reproducibility checks"),
];

/// Builds the exact problem for `cfg`.
pub fn problem(cfg: &ExperimentConfig) -> Result<Problem, CliError> {
    Ok(Problem::with_degeneracy_tolerance(cfg.model.clone(), cfg.degeneracy_tolerance)?)
}

pub fn pipeline_config(cfg: &ExperimentConfig, job: &Job) -> PipelineConfig {
    let mut selection = cfg.selection.clone();
    selection.select = job.m;
    PipelineConfig {
        ansatz: cfg.ansatz,
        depth: job.depth,
        arm: job.arm,
        encoder_replaces_layer: cfg.encoder_replaces_layer,
        selection,
        optimizer: cfg.optimizer.clone(),
        shots: cfg.shots,
    }
}

pub fn run_jobs(problem: &Problem, cfg: &ExperimentConfig, jobs: &[Job], workers: usize) -> Result<Vec<JobResult>, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {workers} workers: {e}")))?;
    let results: Vec<Result<JobResult, CliError>> = pool.install(|| {
        jobs.par_iter()
            .map(|job| {
                let record = run_pipeline(problem, &pipeline_config(cfg, job), cfg.master_seed, job.seed)?;
                info!(
                    "seed {} {} p={} m={}: F={:.6} N_I={}",
                    job.seed,
                    job.arm.label(),
                    job.depth,
                    job.m,
                    record.final_fidelity.unwrap_or(f64::NAN),
                    record.iterations
                );
                Ok(JobResult { job: *job, record })
            })
            .collect()
    });
    results.into_iter().collect()
}

pub fn summary_row(problem: &Problem, r: &JobResult) -> SummaryRow {
    let rec = &r.record;
    SummaryRow {
        seed: r.job.seed,
        arm: r.job.arm.label(),
        depth: r.job.depth,
        m: r.job.m,
        final_energy: rec.final_energy,
        pretrain_energy: rec.pretrain_energy,
        min_energy: rec.min_energy(),
        exact_energy: problem.truth.energy,
        fidelity: rec.final_fidelity.unwrap_or(f64::NAN),
        n_i: rec.iterations,
        n_para: rec.n_params,
        c_r: rec.classical_resources(),
        layers: rec.resources.layers,
        two_qubit_gates: rec.resources.two_qubit_gates,
        one_qubit_gates: rec.resources.one_qubit_gates,
        joint_start: rec.joint_start,
        selection_fallback: rec.selection_fallback,
    }
}

pub fn summary_csv(rows: &[SummaryRow]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    if rows.is_empty() {
        w.write_record(SUMMARY_COLUMNS.iter().map(|(c, _)| *c))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn trace_jsonl(r: &JobResult) -> String {
    let mut out = String::new();
    for p in &r.record.trace {
        let line = json!({
            "phase": p.phase.label(),
            "iteration": p.iteration,
            "energy": p.energy,
            "grad_norm": p.grad_norm,
            "param_hash": p.param_hash,
        });
        let _ = writeln!(out, "{line}");
    }
    out
}

pub fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(f64::total_cmp);
    let k = values.len();
    if k % 2 == 1 {
        values[k / 2]
    } else {
        0.5 * (values[k / 2 - 1] + values[k / 2])
    }
}

/// Groups rows by (arm, depth, m) in first-seen order.
fn groups(rows: &[SummaryRow]) -> Vec<((&'static str, usize, usize), Vec<&SummaryRow>)> {
    let mut out: Vec<((&'static str, usize, usize), Vec<&SummaryRow>)> = Vec::new();
    for row in rows {
        let key = (row.arm, row.depth, row.m);
        match out.iter_mut().find(|(k, _)| *k == key) {
            Some((_, v)) => v.push(row),
            None => out.push((key, vec![row])),
        }
    }
    out
}

/// Resource table with the rows Layers, 2-Qubit Gates, N_I and C_R, one
/// column per (arm, depth, m). N_I is the mean over seeds and C_R is that
/// mean times N_para.
pub fn resource_table(rows: &[SummaryRow]) -> String {
    let groups = groups(rows);
    let mut header = vec![String::new()];
    let mut lines: Vec<(&str, Vec<String>)> = vec![
        ("Layers", vec![]),
        ("2-Qubit Gates", vec![]),
        ("N_para", vec![]),
        ("N_I", vec![]),
        ("C_R", vec![]),
        ("median F", vec![]),
    ];
    for ((arm, depth, m), members) in &groups {
        header.push(format!("{arm} p={depth} m={m}"));
        let first = members[0];
        let mean_ni = members.iter().map(|r| r.n_i as f64).sum::<f64>() / members.len() as f64;
        let mut f: Vec<f64> = members.iter().map(|r| r.fidelity).collect();
        lines[0].1.push(first.layers.to_string());
        lines[1].1.push(first.two_qubit_gates.to_string());
        lines[2].1.push(first.n_para.to_string());
        lines[3].1.push(format!("{mean_ni}"));
        lines[4].1.push(format!("{}", mean_ni * first.n_para as f64));
        lines[5].1.push(format!("{:.6}", median(&mut f)));
    }
    let label_width = lines.iter().map(|(l, _)| l.len()).max().unwrap_or(0);
    let widths: Vec<usize> = (1..header.len())
        .map(|c| lines.iter().map(|(_, v)| v[c - 1].len()).chain([header[c].len()]).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    let _ = write!(out, "{:label_width$}", "");
    for (h, w) in header[1..].iter().zip(&widths) {
        let _ = write!(out, "  {h:>w$}");
    }
    out.push('\n');
    for (label, values) in &lines {
        let _ = write!(out, "{label:label_width$}");
        for (v, w) in values.iter().zip(&widths) {
            let _ = write!(out, "  {v:>w$}");
        }
        out.push('\n');
    }
    out
}

/// `m, depth, seeds, median_infidelity, mean_infidelity` per encoder size.
pub fn sweep_m_csv(rows: &[SummaryRow]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(SWEEP_M_COLUMNS.iter().map(|(c, _)| *c))?;
    for ((_, depth, m), members) in groups(rows) {
        let mut inf: Vec<f64> = members.iter().map(|r| 1.0 - r.fidelity).collect();
        let mean = inf.iter().sum::<f64>() / inf.len() as f64;
        let med = median(&mut inf);
        w.write_record([m.to_string(), depth.to_string(), members.len().to_string(), med.to_string(), mean.to_string()])?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn trace_name(job: &Job, tagged: bool) -> String {
    if tagged {
        format!("trace-{}-{}-p{}-m{}.jsonl", job.seed, job.arm.label(), job.depth, job.m)
    } else {
        format!("trace-{}-{}.jsonl", job.seed, job.arm.label())
    }
}

/// Writes `summary.csv`, `resources.txt` and one trace per job into `dir`.
/// Trace names carry depth and m when `tagged` (sweeps).
pub fn write_artifacts(dir: &Path, problem: &Problem, results: &[JobResult], tagged: bool) -> Result<Vec<SummaryRow>, CliError> {
    fs::create_dir_all(dir)?;
    let rows: Vec<SummaryRow> = results.iter().map(|r| summary_row(problem, r)).collect();
    fs::write(dir.join("summary.csv"), summary_csv(&rows)?)?;
    fs::write(dir.join("resources.txt"), resource_table(&rows))?;
    for r in results {
        let mut f = fs::File::create(dir.join(trace_name(&r.job, tagged)))?;
        f.write_all(trace_jsonl(r).as_bytes())?;
    }
    Ok(rows)
}
