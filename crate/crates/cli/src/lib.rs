//! `statedesign` command-line front end.
//!
//! Verbs: `run`, `sweep-depth`, `sweep-m`, `theorem1`, `dump`, `schema`.
//! Exit codes: 0 success, 1 a run or check failed, 2 bad usage or config.

pub mod config;
pub mod runner;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use statedesign::encoder::{synthesize, BasisSet};
use statedesign::vqe::{build_ansatz, theorem1_suite, Arm};

use crate::config::{count_list, ExperimentConfig};
use crate::runner::{Job, JobResult, SummaryRow};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(#[from] config::ConfigError),
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] statedesign::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "statedesign", version, about = "Input-state design workbench for variational eigensolvers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Default)]
pub struct Common {
    #[arg(long)]
    pub config: PathBuf,
    /// Overrides run.seeds.
    #[arg(long)]
    pub seeds: Option<u64>,
    /// Overrides run.master_seed.
    #[arg(long)]
    pub master_seed: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Overrides run.out.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Sampled candidate scoring with this many shots per term.
    #[arg(long)]
    pub shots: Option<u64>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum DumpKind {
    Model,
    Circuit,
    Encoder,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Both arms (or one) at the first configured depth.
    Run(Common),
    /// Every configured depth, or `--depths`.
    SweepDepth {
        #[command(flatten)]
        common: Common,
        /// `4..12` or `4,8,12`.
        #[arg(long)]
        depths: Option<String>,
    },
    /// Enhanced arm at the first depth for each encoder size.
    SweepM {
        #[command(flatten)]
        common: Common,
        /// `1,2,4,6`; defaults to selection.m_values.
        #[arg(long)]
        m: Option<String>,
    },
    /// Randomized checks of the optimal-superposition identity.
    Theorem1 {
        /// Qubit counts, `2..6` or `3`.
        #[arg(long, default_value = "2..6")]
        qubits: String,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Text form of the model Hamiltonian, the ansatz, or an encoder.
    Dump {
        #[arg(value_enum)]
        kind: DumpKind,
        #[arg(long)]
        config: PathBuf,
        /// Ansatz depth; defaults to the first configured depth.
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Columns of every CSV and trace file.
    Schema,
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code. Output goes to `out`, diagnostics to stderr.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn load(common: &Common) -> Result<ExperimentConfig, CliError> {
    let mut cfg = ExperimentConfig::load(&common.config)?;
    if let Some(s) = common.seeds {
        cfg.seeds = s;
    }
    if let Some(s) = common.master_seed {
        cfg.master_seed = s;
    }
    if let Some(o) = &common.out {
        cfg.out = o.clone();
    }
    if common.shots.is_some() {
        cfg.shots = common.shots;
    }
    if common.workers == 0 {
        return Err(CliError::Usage("--workers must be at least 1".into()));
    }
    Ok(cfg)
}

/// Jobs for every seed and arm at each depth, seed-major.
pub fn depth_jobs(cfg: &ExperimentConfig, depths: &[usize]) -> Vec<Job> {
    let mut jobs = Vec::new();
    for &depth in depths {
        for seed in 0..cfg.seeds {
            for arm in cfg.arms() {
                let m = if arm == Arm::Enhanced { cfg.selection.select } else { 1 };
                jobs.push(Job { seed, arm, depth, m });
            }
        }
    }
    jobs
}

pub fn m_jobs(cfg: &ExperimentConfig, depth: usize, ms: &[usize]) -> Vec<Job> {
    ms.iter()
        .flat_map(|&m| (0..cfg.seeds).map(move |seed| Job { seed, arm: Arm::Enhanced, depth, m }))
        .collect()
}

/// Runs `jobs` and writes the artifacts into `cfg.out`.
pub fn run_and_write(cfg: &ExperimentConfig, jobs: &[Job], workers: usize, tagged: bool) -> Result<(Vec<JobResult>, Vec<SummaryRow>), CliError> {
    let problem = runner::problem(cfg)?;
    let results = runner::run_jobs(&problem, cfg, jobs, workers)?;
    let rows = runner::write_artifacts(&cfg.out, &problem, &results, tagged)?;
    Ok((results, rows))
}

fn execute(command: Command, out: &mut dyn Write) -> Result<i32, CliError> {
    match command {
        Command::Run(common) => {
            let cfg = load(&common)?;
            let jobs = depth_jobs(&cfg, &cfg.depths[..1]);
            let (_, rows) = run_and_write(&cfg, &jobs, common.workers, false)?;
            report(out, &cfg.out, &rows)?;
            Ok(0)
        }
        Command::SweepDepth { common, depths } => {
            let cfg = load(&common)?;
            let depths = match depths {
                Some(d) => count_list(&d).map_err(|e| CliError::Usage(format!("--depths: {e}")))?,
                None => cfg.depths.clone(),
            };
            let jobs = depth_jobs(&cfg, &depths);
            let (_, rows) = run_and_write(&cfg, &jobs, common.workers, true)?;
            report(out, &cfg.out, &rows)?;
            Ok(0)
        }
        Command::SweepM { common, m } => {
            let cfg = load(&common)?;
            let ms = match m {
                Some(m) => count_list(&m).map_err(|e| CliError::Usage(format!("--m: {e}")))?,
                None => cfg.m_values.clone(),
            };
            if ms.contains(&0) {
                return Err(CliError::Usage("--m values must be positive".into()));
            }
            let jobs = m_jobs(&cfg, cfg.depths[0], &ms);
            let (_, rows) = run_and_write(&cfg, &jobs, common.workers, true)?;
            let sweep = runner::sweep_m_csv(&rows)?;
            std::fs::write(cfg.out.join("sweep_m.csv"), &sweep)?;
            out.write_all(sweep.as_bytes())?;
            Ok(0)
        }
        Command::Theorem1 { qubits, trials, seed } => {
            let range = count_list(&qubits).map_err(|e| CliError::Usage(format!("--qubits: {e}")))?;
            let (lo, hi) = (range[0], *range.last().unwrap());
            if lo == 0 || hi > 10 {
                return Err(CliError::Usage("--qubits must lie in 1..10".into()));
            }
            let rep = theorem1_suite(lo..=hi, trials, seed)?;
            writeln!(out, "trials {}", rep.trials)?;
            writeln!(out, "max |F* - sum F_j|      {:e}", rep.worst_sum_gap)?;
            writeln!(out, "max |F* - brute force|  {:e}", rep.worst_bruteforce_gap)?;
            writeln!(out, "max collinearity gap    {:e}", rep.worst_collinearity_gap)?;
            writeln!(out, "monotonicity violations {}", rep.monotonicity_violations)?;
            let passed = rep.passed();
            writeln!(out, "{}", if passed { "PASS" } else { "FAIL" })?;
            Ok(if passed { 0 } else { 1 })
        }
        Command::Dump { kind, config, depth } => {
            let cfg = ExperimentConfig::load(&config)?;
            let text = match kind {
                DumpKind::Model => cfg.model.hamiltonian()?.to_text(),
                DumpKind::Circuit => {
                    let p = depth.unwrap_or(cfg.depths[0]);
                    build_ansatz(cfg.ansatz, &cfg.model, p)?.to_text()
                }
                DumpKind::Encoder => {
                    let members = cfg.encoder_members.clone().ok_or_else(|| {
                        CliError::Usage("dump encoder needs encoder.members in the config".into())
                    })?;
                    let basis = BasisSet::new(cfg.model.n_qubits(), members, cfg.encoder_reference)?;
                    synthesize(&basis)?.to_text()
                }
            };
            out.write_all(text.as_bytes())?;
            Ok(0)
        }
        Command::Schema => {
            out.write_all(schema().as_bytes())?;
            Ok(0)
        }
    }
}

fn report(out: &mut dyn Write, dir: &Path, rows: &[SummaryRow]) -> Result<(), CliError> {
    out.write_all(runner::resource_table(rows).as_bytes())?;
    writeln!(out, "wrote {} runs to {}", rows.len(), dir.display())?;
    Ok(())
}

/// Column reference for `summary.csv`, `sweep_m.csv` and the trace files.
/// The plotting scripts read these names.
pub fn schema() -> String {
    let mut s = String::new();
    let mut section = |title: &str, cols: &[(&str, &str)]| {
        s.push_str(title);
        s.push('\n');
        for (name, doc) in cols {
            s.push_str(&format!("  {name:<20} {doc}\n"));
        }
        s.push('\n');
    };
    section("summary.csv", runner::SUMMARY_COLUMNS);
    section("sweep_m.csv", runner::SWEEP_M_COLUMNS);
    section("trace-<seed>-<arm>[-p<depth>-m<m>].jsonl (one JSON object per line)", runner::TRACE_FIELDS);
    s.push_str("resources.txt\n  rows Layers, 2-Qubit Gates, N_para, N_I (mean over seeds), C_R (= N_I * N_para), median F;\n  one column per arm/depth/m group\n");
    s.push_str("\nplots read: summary.csv (arm, depth, m, final_energy, exact_energy, fidelity),\n  sweep_m.csv (m, median_infidelity), traces (phase, iteration, energy)\n");
    s
}
