use serde::{Deserialize, Serialize};

use crate::circuit::Resources;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Phase {
    Pretrain,
    Joint,
}

impl Phase {
    pub fn label(self) -> &'static str {
        match self {
            Phase::Pretrain => "pretrain",
            Phase::Joint => "joint",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub phase: Phase,
    /// Counts across phases, starting at zero.
    pub iteration: usize,
    pub energy: f64,
    pub grad_norm: f64,
    pub param_hash: u64,
}

/// Everything one pipeline run produces.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub trace: Vec<TracePoint>,
    /// Index into `trace` of the first joint-phase point.
    pub joint_start: Option<usize>,
    pub pretrain_energy: f64,
    pub final_energy: f64,
    pub final_fidelity: Option<f64>,
    /// Optimizer iterations over both phases (`N_I`).
    pub iterations: usize,
    /// Parameters in the final circuit, encoder included (`N_para`).
    pub n_params: usize,
    /// Resources of the final circuit with composite gates expanded.
    pub resources: Resources,
    pub basis: Option<Vec<usize>>,
    pub threshold: Option<f64>,
    pub threshold_rule: Option<String>,
    pub selection_fallback: bool,
    pub final_params: Vec<f64>,
}

impl RunRecord {
    pub fn empty() -> Self {
        RunRecord {
            trace: Vec::new(),
            joint_start: None,
            pretrain_energy: f64::NAN,
            final_energy: f64::NAN,
            final_fidelity: None,
            iterations: 0,
            n_params: 0,
            resources: Resources::default(),
            basis: None,
            threshold: None,
            threshold_rule: None,
            selection_fallback: false,
            final_params: Vec::new(),
        }
    }

    /// `C_R = N_I * N_para`.
    pub fn classical_resources(&self) -> u64 {
        self.iterations as u64 * self.n_params as u64
    }

    pub fn min_energy(&self) -> f64 {
        self.trace.iter().map(|t| t.energy).fold(self.final_energy, f64::min)
    }
}

/// FNV-1a over the IEEE bit patterns of the parameters.
pub fn param_hash(params: &[f64]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for p in params {
        for b in p.to_bits().to_le_bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    }
    h
}
