//! Experiment configs in a flat `key.path = value` grammar.
//!
//! One assignment per line, `#` starts a comment. Keys are grouped by their
//! first segment: `model`, `ansatz`, `selection`, `optimizer`, `run`,
//! `encoder`. Unknown keys and malformed values are rejected with the line
//! they came from.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use statedesign::ansatz::Entangler;
use statedesign::vqe::{AnsatzKind, GradientMode, Method, OptimizerConfig, SelectionConfig, ThresholdRule};
use statedesign::{Boundary, ModelSpec};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigError {
    /// 1-based source line, absent for missing keys.
    pub line: Option<usize>,
    pub field: String,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(line) => write!(f, "line {line}: {}: {}", self.field, self.message),
            None => write!(f, "{}: {}", self.field, self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArmChoice {
    Baseline,
    Enhanced,
    Both,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub model: ModelSpec,
    pub ansatz: AnsatzKind,
    /// Depth budgets to run; `run` uses the first, `sweep-depth` all of them.
    pub depths: Vec<usize>,
    pub encoder_replaces_layer: bool,
    pub arm: ArmChoice,
    pub selection: SelectionConfig,
    pub optimizer: OptimizerConfig,
    pub seeds: u64,
    pub master_seed: u64,
    pub shots: Option<u64>,
    pub out: PathBuf,
    /// Encoder sizes for `sweep-m`.
    pub m_values: Vec<usize>,
    /// Explicit basis for `dump encoder`.
    pub encoder_members: Option<Vec<usize>>,
    pub encoder_reference: usize,
    /// Absolute degeneracy tolerance override for the exact ground space.
    pub degeneracy_tolerance: Option<f64>,
}

const KNOWN_KEYS: &[&str] = &[
    "model.family",
    "model.n",
    "model.rows",
    "model.cols",
    "model.sites",
    "model.j",
    "model.h",
    "model.h1",
    "model.h2",
    "model.t",
    "model.u",
    "model.boundary",
    "model.degeneracy_tolerance",
    "ansatz.kind",
    "ansatz.entangler",
    "ansatz.depth",
    "ansatz.encoder_replaces_layer",
    "selection.samples",
    "selection.m",
    "selection.rule",
    "selection.greedy",
    "selection.m_values",
    "optimizer.method",
    "optimizer.learning_rate",
    "optimizer.beta1",
    "optimizer.beta2",
    "optimizer.epsilon",
    "optimizer.pretrain_grad_tol",
    "optimizer.pretrain_max_iters",
    "optimizer.joint_iters",
    "optimizer.gradient_mode",
    "run.arm",
    "run.seeds",
    "run.master_seed",
    "run.shots",
    "run.out",
    "encoder.members",
    "encoder.reference",
];

struct Entries {
    values: BTreeMap<String, (usize, String)>,
}

impl Entries {
    fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut values = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let Some((key, value)) = content.split_once('=') else {
                return Err(ConfigError {
                    line: Some(line),
                    field: content.to_string(),
                    message: "expected `key.path = value`".into(),
                });
            };
            let (key, value) = (key.trim().to_string(), value.trim().to_string());
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(ConfigError { line: Some(line), field: key, message: "unknown key".into() });
            }
            if value.is_empty() {
                return Err(ConfigError { line: Some(line), field: key, message: "missing value".into() });
            }
            if let Some((first, _)) = values.insert(key.clone(), (line, value)) {
                return Err(ConfigError {
                    line: Some(line),
                    field: key,
                    message: format!("already set on line {first}"),
                });
            }
        }
        Ok(Entries { values })
    }

    fn raw(&self, key: &str) -> Option<(usize, &str)> {
        self.values.get(key).map(|(l, v)| (*l, v.as_str()))
    }

    fn get<T>(&self, key: &str, parse: impl Fn(&str) -> Result<T, String>) -> Result<Option<T>, ConfigError> {
        match self.raw(key) {
            None => Ok(None),
            Some((line, v)) => parse(v)
                .map(Some)
                .map_err(|message| ConfigError { line: Some(line), field: key.into(), message }),
        }
    }

    fn require<T>(&self, key: &str, parse: impl Fn(&str) -> Result<T, String>) -> Result<T, ConfigError> {
        self.get(key, parse)?
            .ok_or_else(|| ConfigError { line: None, field: key.into(), message: "required".into() })
    }

    fn or<T>(&self, key: &str, default: T, parse: impl Fn(&str) -> Result<T, String>) -> Result<T, ConfigError> {
        Ok(self.get(key, parse)?.unwrap_or(default))
    }

    fn line(&self, key: &str) -> Option<usize> {
        self.values.get(key).map(|(l, _)| *l)
    }
}

fn real(v: &str) -> Result<f64, String> {
    match v.parse::<f64>() {
        Ok(x) if x.is_finite() => Ok(x),
        _ => Err(format!("`{v}` is not a finite number")),
    }
}

fn count(v: &str) -> Result<usize, String> {
    v.parse().map_err(|_| format!("`{v}` is not a non-negative integer"))
}

fn seed(v: &str) -> Result<u64, String> {
    v.parse().map_err(|_| format!("`{v}` is not a non-negative integer"))
}

fn flag(v: &str) -> Result<bool, String> {
    match v {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(format!("`{v}` is not true or false")),
    }
}

/// `4,6,8` or an inclusive range `4..12`.
pub fn count_list(v: &str) -> Result<Vec<usize>, String> {
    if let Some((lo, hi)) = v.split_once("..") {
        let (lo, hi) = (count(lo.trim())?, count(hi.trim())?);
        if lo > hi {
            return Err(format!("empty range `{v}`"));
        }
        return Ok((lo..=hi).collect());
    }
    v.split(',').map(|s| count(s.trim())).collect()
}

fn rule(v: &str) -> Result<ThresholdRule, String> {
    let (name, arg) = v.split_once(':').ok_or_else(|| format!("`{v}` should look like offset:0.2"))?;
    let x = real(arg.trim())?;
    match name.trim() {
        "offset" => Ok(ThresholdRule::Offset(x)),
        "percentile" => Ok(ThresholdRule::Percentile(x)),
        "absolute" => Ok(ThresholdRule::Absolute(x)),
        other => Err(format!("unknown threshold rule `{other}` (offset, percentile, absolute)")),
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError {
            line: None,
            field: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let e = Entries::parse(text)?;
        let model = parse_model(&e)?;

        let kind = e.or("ansatz.kind", "hea".to_string(), |v| Ok(v.to_string()))?;
        let ansatz = match kind.as_str() {
            "hea" => {
                let entangler = e.or("ansatz.entangler", Entangler::Ring, |v| match v {
                    "ring" => Ok(Entangler::Ring),
                    "chain" => Ok(Entangler::Chain),
                    _ => Err(format!("unknown entangler `{v}` (ring, chain)")),
                })?;
                AnsatzKind::Hea { entangler }
            }
            "hva" => AnsatzKind::Hva,
            other => {
                return Err(ConfigError {
                    line: e.line("ansatz.kind"),
                    field: "ansatz.kind".into(),
                    message: format!("unknown ansatz `{other}` (hea, hva)"),
                })
            }
        };
        let depths = e.require("ansatz.depth", count_list)?;
        if depths.is_empty() || depths.contains(&0) {
            return Err(ConfigError {
                line: e.line("ansatz.depth"),
                field: "ansatz.depth".into(),
                message: "depths must be positive".into(),
            });
        }
        let encoder_replaces_layer =
            e.or("ansatz.encoder_replaces_layer", matches!(ansatz, AnsatzKind::Hea { .. }), flag)?;

        let defaults = SelectionConfig::default();
        let selection = SelectionConfig {
            samples: e.or("selection.samples", defaults.samples, count)?,
            select: e.or("selection.m", defaults.select, count)?,
            rule: e.or("selection.rule", defaults.rule, rule)?,
            greedy: e.or("selection.greedy", defaults.greedy, flag)?,
        };
        selection.validate().map_err(|err| ConfigError {
            line: e.line("selection.m"),
            field: "selection.m".into(),
            message: err.to_string(),
        })?;
        let m_values = e.or("selection.m_values", vec![1, 2, 4, 6, 8, 10], count_list)?;

        let d = OptimizerConfig::default();
        let optimizer = OptimizerConfig {
            method: e.or("optimizer.method", d.method, |v| match v {
                "adam" => Ok(Method::Adam),
                "gradient-descent" | "gradient_descent" => Ok(Method::GradientDescent),
                _ => Err(format!("unknown method `{v}` (adam, gradient-descent)")),
            })?,
            learning_rate: e.or("optimizer.learning_rate", d.learning_rate, real)?,
            beta1: e.or("optimizer.beta1", d.beta1, real)?,
            beta2: e.or("optimizer.beta2", d.beta2, real)?,
            epsilon: e.or("optimizer.epsilon", d.epsilon, real)?,
            pretrain_grad_tol: e.or("optimizer.pretrain_grad_tol", d.pretrain_grad_tol, real)?,
            pretrain_max_iters: e.or("optimizer.pretrain_max_iters", d.pretrain_max_iters, count)?,
            joint_iters: e.or("optimizer.joint_iters", d.joint_iters, count)?,
            gradient_mode: e.or("optimizer.gradient_mode", d.gradient_mode, |v| match v {
                "adjoint" => Ok(GradientMode::Adjoint),
                "finite-difference" | "finite_difference" => Ok(GradientMode::FiniteDifference),
                _ => Err(format!("unknown gradient mode `{v}` (adjoint, finite-difference)")),
            })?,
        };
        optimizer.validate().map_err(|err| ConfigError {
            line: None,
            field: "optimizer".into(),
            message: err.to_string(),
        })?;

        let arm = e.or("run.arm", ArmChoice::Both, |v| match v {
            "baseline" => Ok(ArmChoice::Baseline),
            "enhanced" => Ok(ArmChoice::Enhanced),
            "both" => Ok(ArmChoice::Both),
            _ => Err(format!("unknown arm `{v}` (baseline, enhanced, both)")),
        })?;

        let n = model.n_qubits();
        let encoder_members = e.get("encoder.members", count_list)?;
        let encoder_reference = e.or("encoder.reference", 0, count)?;
        if let Some(members) = &encoder_members {
            if let Some(bad) = members.iter().find(|&&m| m >> n != 0) {
                return Err(ConfigError {
                    line: e.line("encoder.members"),
                    field: "encoder.members".into(),
                    message: format!("{bad} does not fit in {n} qubits"),
                });
            }
        }

        Ok(ExperimentConfig {
            model,
            ansatz,
            depths,
            encoder_replaces_layer,
            arm,
            selection,
            optimizer,
            seeds: e.or("run.seeds", 10, seed)?,
            master_seed: e.or("run.master_seed", 0, seed)?,
            shots: e.get("run.shots", seed)?,
            out: e.or("run.out", PathBuf::from("out"), |v| Ok(PathBuf::from(v)))?,
            m_values,
            encoder_members,
            encoder_reference,
            degeneracy_tolerance: e.get("model.degeneracy_tolerance", real)?,
        })
    }

    pub fn arms(&self) -> Vec<statedesign::vqe::Arm> {
        use statedesign::vqe::Arm;
        match self.arm {
            ArmChoice::Baseline => vec![Arm::Baseline],
            ArmChoice::Enhanced => vec![Arm::Enhanced],
            ArmChoice::Both => vec![Arm::Baseline, Arm::Enhanced],
        }
    }
}

fn parse_model(e: &Entries) -> Result<ModelSpec, ConfigError> {
    let family = e.require("model.family", |v| Ok(v.to_string()))?;
    let boundary = |default| {
        e.or("model.boundary", default, |v| match v {
            "open" => Ok(Boundary::Open),
            "periodic" => Ok(Boundary::Periodic),
            _ => Err(format!("unknown boundary `{v}` (open, periodic)")),
        })
    };
    let model = match family.as_str() {
        "tfim_1d" => ModelSpec::Tfim1d {
            n: e.require("model.n", count)?,
            j: e.or("model.j", -1.0, real)?,
            h: e.or("model.h", -1.0, real)?,
            boundary: boundary(Boundary::Periodic)?,
        },
        "tfim_2d" => ModelSpec::Tfim2d {
            rows: e.or("model.rows", 3, count)?,
            cols: e.or("model.cols", 4, count)?,
            j: e.or("model.j", -1.0, real)?,
            h: e.or("model.h", -1.0, real)?,
            boundary: boundary(Boundary::Periodic)?,
        },
        "cluster_ising" => ModelSpec::ClusterIsing {
            n: e.require("model.n", count)?,
            j: e.or("model.j", 1.0, real)?,
            h1: e.or("model.h1", 0.1, real)?,
            h2: e.or("model.h2", 0.1, real)?,
        },
        "hubbard" => ModelSpec::Hubbard {
            sites: e.or("model.sites", 4, count)?,
            t: e.or("model.t", 1.0, real)?,
            u: e.require("model.u", real)?,
        },
        other => {
            return Err(ConfigError {
                line: e.line("model.family"),
                field: "model.family".into(),
                message: format!("unknown family `{other}` (tfim_1d, tfim_2d, cluster_ising, hubbard)"),
            })
        }
    };
    model.validate().map_err(|err| ConfigError {
        line: e.line("model.family"),
        field: "model".into(),
        message: err.to_string(),
    })?;
    Ok(model)
}
