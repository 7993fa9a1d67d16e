//! Parameterized circuits: the gate vocabulary, slot bookkeeping, the text
//! dump and resource accounting.
//!
//! Every rotation-type gate is `exp(-i (phi/2) P)` for a Pauli product `P`
//! (restricted to the all-ones control subspace for controlled kinds), where
//! `phi` is either a fixed angle or `scale * theta[slot]`. Model-specific
//! angle conventions are carried by `scale`; e.g. `R_x(t) = exp(-i t X)` is
//! an `RX` gate with scale 2.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::PauliMask;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GateKind {
    H,
    X,
    Rx,
    Ry,
    Rz,
    Cz,
    Cnot,
    Cry,
    Crz,
    Ccry,
    Ccrz,
    /// Y rotation with three or more controls.
    Mcry,
    /// Z rotation with three or more controls.
    Mcrz,
    Uzz,
    Uxx,
    Uxy,
    Uzxz,
}

impl GateKind {
    pub const ALL: [GateKind; 17] = [
        GateKind::H,
        GateKind::X,
        GateKind::Rx,
        GateKind::Ry,
        GateKind::Rz,
        GateKind::Cz,
        GateKind::Cnot,
        GateKind::Cry,
        GateKind::Crz,
        GateKind::Ccry,
        GateKind::Ccrz,
        GateKind::Mcry,
        GateKind::Mcrz,
        GateKind::Uzz,
        GateKind::Uxx,
        GateKind::Uxy,
        GateKind::Uzxz,
    ];

    pub fn label(self) -> &'static str {
        match self {
            GateKind::H => "H",
            GateKind::X => "X",
            GateKind::Rx => "RX",
            GateKind::Ry => "RY",
            GateKind::Rz => "RZ",
            GateKind::Cz => "CZ",
            GateKind::Cnot => "CNOT",
            GateKind::Cry => "CRY",
            GateKind::Crz => "CRZ",
            GateKind::Ccry => "CCRY",
            GateKind::Ccrz => "CCRZ",
            GateKind::Mcry => "MCRY",
            GateKind::Mcrz => "MCRZ",
            GateKind::Uzz => "UZZ",
            GateKind::Uxx => "UXX",
            GateKind::Uxy => "UXY",
            GateKind::Uzxz => "UZXZ",
        }
    }

    pub fn is_rotation(self) -> bool {
        !matches!(self, GateKind::H | GateKind::X | GateKind::Cz | GateKind::Cnot)
    }

    fn arity_ok(self, n: usize) -> bool {
        match self {
            GateKind::H | GateKind::X | GateKind::Rx | GateKind::Ry | GateKind::Rz => n == 1,
            GateKind::Cz
            | GateKind::Cnot
            | GateKind::Cry
            | GateKind::Crz
            | GateKind::Uzz
            | GateKind::Uxx
            | GateKind::Uxy => n == 2,
            GateKind::Ccry | GateKind::Ccrz | GateKind::Uzxz => n == 3,
            GateKind::Mcry | GateKind::Mcrz => n >= 4,
        }
    }

    /// Controlled Y/Z rotation with the given number of controls.
    pub fn controlled_ry(controls: usize) -> Self {
        match controls {
            0 => GateKind::Ry,
            1 => GateKind::Cry,
            2 => GateKind::Ccry,
            _ => GateKind::Mcry,
        }
    }

    pub fn controlled_rz(controls: usize) -> Self {
        match controls {
            0 => GateKind::Rz,
            1 => GateKind::Crz,
            2 => GateKind::Ccrz,
            _ => GateKind::Mcrz,
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for GateKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        GateKind::ALL
            .iter()
            .copied()
            .find(|k| k.label() == s)
            .ok_or_else(|| Error::InvalidGate(format!("unknown gate kind `{s}`")))
    }
}

/// Where a rotation gate gets its angle from.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Angle {
    /// `phi = scale * theta[index]`.
    Slot { index: usize, scale: f64 },
    Fixed(f64),
}

impl Angle {
    pub fn slot(index: usize) -> Self {
        Angle::Slot { index, scale: 1.0 }
    }

    pub fn scaled(index: usize, scale: f64) -> Self {
        Angle::Slot { index, scale }
    }

    #[inline]
    pub fn resolve(&self, params: &[f64]) -> Result<f64> {
        match *self {
            Angle::Fixed(a) => Ok(a),
            Angle::Slot { index, scale } => params
                .get(index)
                .map(|t| scale * t)
                .ok_or(Error::UnboundSlot { slot: index, len: params.len() }),
        }
    }

    pub fn slot_index(&self) -> Option<usize> {
        match *self {
            Angle::Slot { index, .. } => Some(index),
            Angle::Fixed(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gate {
    pub kind: GateKind,
    /// Controls first, target last.
    pub qubits: Vec<usize>,
    pub angle: Option<Angle>,
}

impl Gate {
    pub fn new(kind: GateKind, qubits: Vec<usize>, angle: Option<Angle>) -> Result<Self> {
        let gate = Self { kind, qubits, angle };
        gate.check()?;
        Ok(gate)
    }

    pub fn fixed(kind: GateKind, qubits: &[usize]) -> Self {
        Self::new(kind, qubits.to_vec(), None).expect("fixed gate arguments")
    }

    pub fn rotation(kind: GateKind, qubits: &[usize], angle: Angle) -> Self {
        Self::new(kind, qubits.to_vec(), Some(angle)).expect("rotation gate arguments")
    }

    fn check(&self) -> Result<()> {
        if !self.kind.arity_ok(self.qubits.len()) {
            return Err(Error::InvalidGate(format!(
                "{} cannot act on {} qubits",
                self.kind,
                self.qubits.len()
            )));
        }
        let distinct: BTreeSet<_> = self.qubits.iter().collect();
        if distinct.len() != self.qubits.len() {
            return Err(Error::InvalidGate(format!("{} has repeated qubits {:?}", self.kind, self.qubits)));
        }
        match (self.kind.is_rotation(), self.angle.is_some()) {
            (true, false) => Err(Error::InvalidGate(format!("{} needs an angle", self.kind))),
            (false, true) => Err(Error::InvalidGate(format!("{} takes no angle", self.kind))),
            _ => Ok(()),
        }
    }

    pub fn slot(&self) -> Option<usize> {
        self.angle.and_then(|a| a.slot_index())
    }

    pub fn is_two_qubit(&self) -> bool {
        self.qubits.len() == 2
    }

    fn control_mask(&self, n_controls: usize) -> usize {
        self.qubits[..n_controls].iter().fold(0, |m, q| m | (1 << q))
    }

    /// Lowers the gate into mask-level operations applied left to right.
    pub(crate) fn ops(&self) -> Vec<Op> {
        let q = &self.qubits;
        let angle = self.angle;
        let rot = |mask: PauliMask, controls: usize| Op::Rotation { mask, controls, angle: angle.unwrap() };
        let target = *q.last().unwrap();
        match self.kind {
            GateKind::H => vec![Op::Hadamard(q[0])],
            GateKind::X => vec![Op::Pauli { mask: PauliMask::x(q[0]), controls: 0 }],
            GateKind::Cz => vec![Op::Pauli { mask: PauliMask::z(q[1]), controls: 1 << q[0] }],
            GateKind::Cnot => vec![Op::Pauli { mask: PauliMask::x(q[1]), controls: 1 << q[0] }],
            GateKind::Rx => vec![rot(PauliMask::x(target), 0)],
            GateKind::Ry | GateKind::Cry | GateKind::Ccry | GateKind::Mcry => {
                vec![rot(PauliMask::y(target), self.control_mask(q.len() - 1))]
            }
            GateKind::Rz | GateKind::Crz | GateKind::Ccrz | GateKind::Mcrz => {
                vec![rot(PauliMask::z(target), self.control_mask(q.len() - 1))]
            }
            GateKind::Uzz => vec![rot(PauliMask::z(q[0]).combine(PauliMask::z(q[1])), 0)],
            GateKind::Uxx => vec![rot(PauliMask::x(q[0]).combine(PauliMask::x(q[1])), 0)],
            GateKind::Uxy => vec![
                rot(PauliMask::x(q[0]).combine(PauliMask::x(q[1])), 0),
                rot(PauliMask::y(q[0]).combine(PauliMask::y(q[1])), 0),
            ],
            GateKind::Uzxz => vec![rot(
                PauliMask::z(q[0]).combine(PauliMask::x(q[1])).combine(PauliMask::z(q[2])),
                0,
            )],
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        for q in &self.qubits {
            write!(f, " {q}")?;
        }
        match self.angle {
            Some(Angle::Slot { index, scale }) if scale == 1.0 => write!(f, " slot={index}"),
            Some(Angle::Slot { index, scale }) => write!(f, " slot={index} scale={scale:?}"),
            Some(Angle::Fixed(a)) => write!(f, " angle={a:?}"),
            None => Ok(()),
        }
    }
}

/// Mask-level operation executed by the statevector engine.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) enum Op {
    Hadamard(usize),
    /// Hermitian Pauli product applied on the subspace where all control bits are set.
    Pauli { mask: PauliMask, controls: usize },
    /// `exp(-i (phi/2) P)` on the subspace where all control bits are set.
    Rotation { mask: PauliMask, controls: usize, angle: Angle },
}

/// An ordered gate list over `n_qubits` with a table of parameter slots.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    n_qubits: usize,
    gates: Vec<Gate>,
    n_params: usize,
    layers: usize,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Self {
        Self { n_qubits, gates: Vec::new(), n_params: 0, layers: 0 }
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.check()?;
        if let Some(&q) = gate.qubits.iter().find(|&&q| q >= self.n_qubits) {
            return Err(Error::IndexOutOfRange { index: q, n_qubits: self.n_qubits });
        }
        if let Some(slot) = gate.slot() {
            self.n_params = self.n_params.max(slot + 1);
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    /// Declares at least `n` slots even if some stay unreferenced.
    pub fn reserve_params(&mut self, n: usize) {
        self.n_params = self.n_params.max(n);
    }

    /// Layer count recorded by the builder, used only for reporting.
    pub fn layers(&self) -> usize {
        self.layers
    }

    pub fn set_layers(&mut self, layers: usize) {
        self.layers = layers;
    }

    /// Checks that every slot below `n_params` is referenced by some gate.
    pub fn validate(&self) -> Result<()> {
        let used: BTreeSet<usize> = self.gates.iter().filter_map(Gate::slot).collect();
        match (0..self.n_params).find(|s| !used.contains(s)) {
            Some(s) => Err(Error::InvalidArgument(format!("parameter slot {s} is never referenced"))),
            None => Ok(()),
        }
    }

    /// `first` followed by `second`; the slots of `second` are shifted past
    /// those of `first`, so the joint parameter vector is `[first.., second..]`.
    pub fn concat(first: &Circuit, second: &Circuit) -> Result<Circuit> {
        if first.n_qubits != second.n_qubits {
            return Err(Error::DimensionMismatch { expected: first.n_qubits, found: second.n_qubits });
        }
        let offset = first.n_params;
        let mut out = first.clone();
        for g in &second.gates {
            let mut g = g.clone();
            if let Some(Angle::Slot { index, scale }) = g.angle {
                g.angle = Some(Angle::Slot { index: index + offset, scale });
            }
            out.push(g)?;
        }
        out.n_params = offset + second.n_params;
        out.layers = first.layers + second.layers;
        Ok(out)
    }

    /// Same circuit with every slot's index moved by `offset`.
    pub fn with_slot_offset(&self, offset: usize) -> Circuit {
        let mut out = Circuit::new(self.n_qubits);
        out.concat_slots(self, offset);
        out
    }

    fn concat_slots(&mut self, other: &Circuit, offset: usize) {
        for g in &other.gates {
            let mut g = g.clone();
            if let Some(Angle::Slot { index, scale }) = g.angle {
                g.angle = Some(Angle::Slot { index: index + offset, scale });
            }
            self.gates.push(g);
        }
        self.n_params = self.n_params.max(other.n_params + offset);
        self.layers = other.layers;
    }

    pub(crate) fn ops(&self) -> Vec<Op> {
        self.gates.iter().flat_map(Gate::ops).collect()
    }

    /// One gate per line: `KIND q.. [slot=k [scale=s] | angle=a]`.
    pub fn to_text(&self) -> String {
        self.gates.iter().map(|g| format!("{g}\n")).collect()
    }

    pub fn from_text(text: &str, n_qubits: usize) -> Result<Circuit> {
        let mut c = Circuit::new(n_qubits);
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| Error::Parse { line: lineno + 1, message };
            let mut tokens = line.split_whitespace();
            let kind: GateKind = tokens.next().unwrap().parse().map_err(|e: Error| err(e.to_string()))?;
            let mut qubits = Vec::new();
            let (mut slot, mut scale, mut fixed) = (None, 1.0, None);
            for tok in tokens {
                if let Some(v) = tok.strip_prefix("slot=") {
                    slot = Some(v.parse::<usize>().map_err(|e| err(format!("bad slot: {e}")))?);
                } else if let Some(v) = tok.strip_prefix("scale=") {
                    scale = v.parse::<f64>().map_err(|e| err(format!("bad scale: {e}")))?;
                } else if let Some(v) = tok.strip_prefix("angle=") {
                    fixed = Some(v.parse::<f64>().map_err(|e| err(format!("bad angle: {e}")))?);
                } else {
                    qubits.push(tok.parse::<usize>().map_err(|e| err(format!("bad qubit `{tok}`: {e}")))?);
                }
            }
            let angle = match (slot, fixed) {
                (Some(index), None) => Some(Angle::Slot { index, scale }),
                (None, Some(a)) => Some(Angle::Fixed(a)),
                (None, None) => None,
                (Some(_), Some(_)) => return Err(err("both slot and angle given".into())),
            };
            let gate = Gate::new(kind, qubits, angle).map_err(|e| err(e.to_string()))?;
            c.push(gate).map_err(|e| err(e.to_string()))?;
        }
        Ok(c)
    }
}

/// Gate tallies for a circuit.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resources {
    pub layers: usize,
    pub one_qubit_gates: usize,
    pub two_qubit_gates: usize,
    /// Gates on three or more qubits left unexpanded.
    pub multi_qubit_gates: usize,
    pub n_params: usize,
}

impl Resources {
    pub fn total_gates(&self) -> usize {
        self.one_qubit_gates + self.two_qubit_gates + self.multi_qubit_gates
    }
}

/// Native `(one-qubit, two-qubit)` cost of a gate after expansion.
///
/// UZZ is a single native two-qubit interaction. XX- and YY-type rotations
/// compile to basis change + CNOT, RZ, CNOT, so UXX costs 2 and UXY 4
/// two-qubit gates. UZXZ follows [`crate::ansatz::decompose_zxz`]. A rotation
/// with two controls costs five two-qubit gates, and every further control
/// wraps the previous construction in another pair of such gates.
pub fn expanded_cost(gate: &Gate) -> (usize, usize) {
    match gate.kind {
        GateKind::H | GateKind::X | GateKind::Rx | GateKind::Ry | GateKind::Rz => (1, 0),
        GateKind::Cz | GateKind::Cnot | GateKind::Cry | GateKind::Crz | GateKind::Uzz => (0, 1),
        GateKind::Uxx => (5, 2),
        GateKind::Uxy => (10, 4),
        GateKind::Uzxz => (1, 4),
        GateKind::Ccry | GateKind::Ccrz => (0, 5),
        GateKind::Mcry | GateKind::Mcrz => {
            let k = gate.qubits.len() - 1;
            (0, 5 * (2 * k - 3))
        }
    }
}

pub fn count_resources(circuit: &Circuit, expand_composites: bool) -> Resources {
    let mut r = Resources { layers: circuit.layers, n_params: circuit.n_params, ..Default::default() };
    for g in &circuit.gates {
        if expand_composites {
            let (one, two) = expanded_cost(g);
            r.one_qubit_gates += one;
            r.two_qubit_gates += two;
        } else {
            match g.qubits.len() {
                1 => r.one_qubit_gates += 1,
                2 => r.two_qubit_gates += 1,
                _ => r.multi_qubit_gates += 1,
            }
        }
    }
    r
}
