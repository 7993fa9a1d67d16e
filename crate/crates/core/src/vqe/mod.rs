//! Cost and gradient evaluation, the optimizer, basis selection, and the
//! pretrain / select / encode / joint-optimize pipeline.

mod gradient;
mod optimizer;
mod pipeline;
mod record;
mod selection;
mod theorem;

pub use gradient::{cost, finite_difference_gradient, gradient, Evaluation, GradientMode, Objective};
pub use optimizer::{Method, Optimizer, OptimizerConfig};
pub use pipeline::{
    build_ansatz, joint_optimize, pretrain, run_pipeline, AnsatzKind, Arm, PipelineConfig, Problem,
};
pub use record::{param_hash, Phase, RunRecord, TracePoint};
pub use selection::{sample_basis, score_basis, select_states, Selection, SelectionConfig, ThresholdRule};
pub use theorem::{
    optimal_superposition, optimal_superposition_vectors, theorem1_suite, Superposition, Theorem1Report,
};
