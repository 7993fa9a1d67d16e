use log::debug;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::gradient::Objective;
use super::optimizer::{Optimizer, OptimizerConfig};
use super::record::{param_hash, Phase, RunRecord, TracePoint};
use super::selection::{sample_basis, score_basis, select_states, SelectionConfig};
use crate::ansatz::{build_hea, build_hva_cluster, build_hva_hubbard, build_hva_tfim, Entangler, Lattice};
use crate::circuit::{count_resources, Circuit};
use crate::encoder::{synthesize, Encoder};
use crate::error::{Error, Result};
use crate::ground::{exact_ground, exact_ground_in_sector, GroundTruth};
use crate::models::{Boundary, ModelSpec};
use crate::pauli::PauliSum;
use crate::rng::{stream_rng, Stream};
use crate::statevector::Statevector;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AnsatzKind {
    Hea { entangler: Entangler },
    /// The Hamiltonian variational ansatz matching the model family.
    Hva,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Arm {
    Baseline,
    Enhanced,
}

impl Arm {
    pub fn label(self) -> &'static str {
        match self {
            Arm::Baseline => "baseline",
            Arm::Enhanced => "enhanced",
        }
    }
}

/// `layers` ansatz layers for `model`; zero layers is the empty circuit.
pub fn build_ansatz(kind: AnsatzKind, model: &ModelSpec, layers: usize) -> Result<Circuit> {
    let n = model.n_qubits();
    if layers == 0 {
        return Ok(Circuit::new(n));
    }
    match (kind, model) {
        (AnsatzKind::Hea { entangler }, _) => build_hea(n, layers, entangler),
        (AnsatzKind::Hva, ModelSpec::Tfim1d { n, boundary: Boundary::Periodic, .. }) => {
            build_hva_tfim(Lattice::Ring(*n), layers)
        }
        (AnsatzKind::Hva, ModelSpec::Tfim2d { rows, cols, boundary: Boundary::Periodic, .. }) => {
            build_hva_tfim(Lattice::Torus { rows: *rows, cols: *cols }, layers)
        }
        (AnsatzKind::Hva, ModelSpec::ClusterIsing { n, .. }) => build_hva_cluster(*n, layers),
        (AnsatzKind::Hva, ModelSpec::Hubbard { sites, .. }) => build_hva_hubbard(*sites, layers),
        (AnsatzKind::Hva, m) => {
            Err(Error::InvalidArgument(format!("no variational ansatz for open-boundary {}", m.family())))
        }
    }
}

/// A model with its Hamiltonian, reference state and exact ground space.
#[derive(Clone, Debug)]
pub struct Problem {
    pub model: ModelSpec,
    pub hamiltonian: PauliSum,
    pub truth: GroundTruth,
    pub reference: usize,
    pub sector: Option<Vec<usize>>,
}

impl Problem {
    pub fn new(model: ModelSpec) -> Result<Self> {
        Self::with_degeneracy_tolerance(model, None)
    }

    /// As [`Problem::new`] with an absolute tolerance for grouping
    /// near-degenerate levels into the ground space.
    pub fn with_degeneracy_tolerance(model: ModelSpec, tolerance: Option<f64>) -> Result<Self> {
        let hamiltonian = model.hamiltonian()?;
        let sector = model.sector();
        let truth = match &sector {
            Some(s) => exact_ground_in_sector(&hamiltonian, s, tolerance)?,
            None => exact_ground(&hamiltonian, tolerance)?,
        };
        Ok(Problem { reference: model.reference_index(), model, hamiltonian, truth, sector })
    }

    pub fn n_qubits(&self) -> usize {
        self.hamiltonian.n_qubits()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub ansatz: AnsatzKind,
    /// Depth budget `p`.
    pub depth: usize,
    pub arm: Arm,
    /// The enhanced arm gives up one ansatz layer for the encoder.
    pub encoder_replaces_layer: bool,
    pub selection: SelectionConfig,
    pub optimizer: OptimizerConfig,
    /// Shot count for candidate scoring; exact expectations when unset.
    pub shots: Option<u64>,
}

impl PipelineConfig {
    pub fn ansatz_layers(&self) -> usize {
        match self.arm {
            Arm::Enhanced if self.encoder_replaces_layer => self.depth.saturating_sub(1),
            _ => self.depth,
        }
    }
}

struct Outcome {
    params: Vec<f64>,
    energy: f64,
    state: Vec<num_complex::Complex64>,
}

fn optimize(
    objective: &Objective,
    start: Vec<f64>,
    cfg: &OptimizerConfig,
    max_iters: usize,
    phase: Phase,
    record: &mut RunRecord,
) -> Result<Outcome> {
    let mut params = start;
    let mut opt = Optimizer::new(cfg, params.len());
    let mut best: Option<Outcome> = None;
    let mut last = None;
    for it in 0..=max_iters {
        let eval = objective.evaluate(&params)?;
        let global = record.iterations;
        if !eval.energy.is_finite() || eval.gradient.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFinite { iteration: global });
        }
        let grad_norm = eval.grad_norm();
        record.trace.push(TracePoint { phase, iteration: global, energy: eval.energy, grad_norm, param_hash: param_hash(&params) });
        if phase == Phase::Joint && best.as_ref().is_none_or(|b| eval.energy < b.energy) {
            best = Some(Outcome { params: params.clone(), energy: eval.energy, state: eval.state.clone() });
        }
        if grad_norm < cfg.pretrain_grad_tol || it == max_iters {
            last = Some(Outcome { params: params.clone(), energy: eval.energy, state: eval.state });
            break;
        }
        opt.step(&mut params, &eval.gradient);
        record.iterations += 1;
    }
    Ok(match phase {
        Phase::Joint => best.unwrap(),
        Phase::Pretrain => last.unwrap(),
    })
}

/// Optimize `u` from `theta0` until the gradient norm drops below the
/// tolerance or the iteration cap is hit.
pub fn pretrain(
    u: &Circuit,
    input: &Statevector,
    h: &PauliSum,
    cfg: &OptimizerConfig,
    theta0: Vec<f64>,
) -> Result<(Vec<f64>, RunRecord)> {
    cfg.validate()?;
    let objective = Objective::new(u, input, h)?.with_mode(cfg.gradient_mode);
    if theta0.len() != objective.n_params() {
        return Err(Error::ParameterCount { expected: objective.n_params(), found: theta0.len() });
    }
    let mut record = RunRecord::empty();
    let out = optimize(&objective, theta0, cfg, cfg.pretrain_max_iters, Phase::Pretrain, &mut record)?;
    record.pretrain_energy = out.energy;
    record.final_energy = out.energy;
    record.n_params = u.n_params();
    record.final_params = out.params.clone();
    record.resources = count_resources(u, true);
    Ok((out.params, record))
}

/// Optimize encoder and ansatz together on `V(gamma)` followed by `U(theta)`
/// acting on `|0...0>`, appending to `record`. Returns the best parameters
/// seen and the state they produce.
#[allow(clippy::too_many_arguments)]
pub fn joint_optimize(
    u: &Circuit,
    enc: &Encoder,
    h: &PauliSum,
    theta_init: &[f64],
    gamma_init: &[f64],
    cfg: &OptimizerConfig,
    mut record: RunRecord,
) -> Result<(Vec<f64>, Vec<f64>, Statevector, RunRecord)> {
    cfg.validate()?;
    let full = Circuit::concat(enc.circuit(), u)?;
    let objective = Objective::new(&full, &Statevector::zero(u.n_qubits()), h)?.with_mode(cfg.gradient_mode);
    if gamma_init.len() != enc.n_params() || theta_init.len() != u.n_params() {
        return Err(Error::ParameterCount {
            expected: enc.n_params() + u.n_params(),
            found: gamma_init.len() + theta_init.len(),
        });
    }
    let start: Vec<f64> = gamma_init.iter().chain(theta_init).copied().collect();
    record.joint_start = Some(record.trace.len());
    let out = optimize(&objective, start, cfg, cfg.joint_iters, Phase::Joint, &mut record)?;
    let (gamma, theta) = out.params.split_at(enc.n_params());
    record.final_energy = out.energy;
    record.final_params = out.params.clone();
    record.n_params = full.n_params();
    let mut resources = count_resources(&full, true);
    resources.layers = u.layers() + 1;
    record.resources = resources;
    Ok((theta.to_vec(), gamma.to_vec(), Statevector::from_amplitudes(u.n_qubits(), out.state)?, record))
}

fn uniform_angles<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect()
}

/// One seeded run of either arm. Every random draw comes from a stream
/// keyed by `(master_seed, run)`, so results do not depend on scheduling.
pub fn run_pipeline(problem: &Problem, cfg: &PipelineConfig, master_seed: u64, run: u64) -> Result<RunRecord> {
    cfg.optimizer.validate()?;
    let n = problem.n_qubits();
    let h = &problem.hamiltonian;
    let u = build_ansatz(cfg.ansatz, &problem.model, cfg.ansatz_layers())?;
    let input = Statevector::basis(n, problem.reference)?;
    let theta0 = uniform_angles(&mut stream_rng(master_seed, run, Stream::ThetaInit), u.n_params());
    let (theta, mut record) = pretrain(&u, &input, h, &cfg.optimizer, theta0)?;
    debug!("run {run}: pretrain energy {} after {} iterations", record.pretrain_energy, record.iterations);

    if cfg.arm == Arm::Baseline {
        let mut state = input;
        state.apply_circuit(&u, &theta)?;
        record.final_fidelity = Some(problem.truth.fidelity(&state)?);
        record.resources.layers = cfg.depth;
        return Ok(record);
    }

    cfg.selection.validate()?;
    let candidates = sample_basis(
        n,
        problem.reference,
        cfg.selection.samples,
        problem.sector.as_deref(),
        &mut stream_rng(master_seed, run, Stream::Sampling),
    )?;
    let scores = score_basis(&u, &theta, h, &candidates, cfg.shots, &mut stream_rng(master_seed, run, Stream::Shots))?;
    let selection = select_states(
        n,
        &candidates,
        &scores,
        problem.reference,
        &cfg.selection,
        &mut stream_rng(master_seed, run, Stream::Selection),
    )?;
    let enc = synthesize(&selection.basis)?;
    let gamma0 = uniform_angles(&mut stream_rng(master_seed, run, Stream::GammaInit), enc.n_params());
    record.basis = Some(selection.basis.members().to_vec());
    record.threshold = Some(selection.threshold);
    record.threshold_rule = Some(cfg.selection.rule.describe());
    record.selection_fallback = selection.fallback;

    let (_, _, state, mut record) = joint_optimize(&u, &enc, h, &theta, &gamma0, &cfg.optimizer, record)?;
    record.final_fidelity = Some(problem.truth.fidelity(&state)?);
    Ok(record)
}
