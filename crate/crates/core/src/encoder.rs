//! Encoders `V(gamma)` that prepare an arbitrary superposition over a chosen
//! set of computational-basis states.
//!
//! Synthesis runs a sparse-state reduction on the member bitstrings: the two
//! closest strings are brought to Hamming distance one with CNOTs and merged
//! by a rotation controlled on bits that single them out. Repeating until one
//! string is left and flipping it to zero reduces the set to `|0...0>`. The
//! encoder is that sequence reversed, with each merge turned into a
//! parameterized split (an `RY` for the weight and an `RZ` for the relative
//! phase), so any parameter values keep the output inside the member span.

use std::collections::{BTreeMap, BTreeSet};

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::{Angle, Circuit, Gate, GateKind};
use crate::error::{Error, Result};
use crate::statevector::Statevector;

/// Distinct basis indices that the encoder spreads amplitude over.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisSet {
    n_qubits: usize,
    members: Vec<usize>,
    reference: usize,
}

impl BasisSet {
    pub fn new(n_qubits: usize, members: Vec<usize>, reference: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits >= usize::BITS as usize {
            return Err(Error::InvalidArgument(format!("unsupported qubit count {n_qubits}")));
        }
        if members.is_empty() {
            return Err(Error::InvalidArgument("basis set is empty".into()));
        }
        let mut seen = BTreeSet::new();
        for &m in &members {
            if m >> n_qubits != 0 {
                return Err(Error::IndexOutOfRange { index: m, n_qubits });
            }
            if !seen.insert(m) {
                return Err(Error::InvalidArgument(format!("duplicate basis member {m}")));
            }
        }
        if !seen.contains(&reference) {
            return Err(Error::InvalidArgument(format!("reference {reference} is not a member")));
        }
        Ok(BasisSet { n_qubits, members, reference })
    }

    pub fn singleton(n_qubits: usize, reference: usize) -> Result<Self> {
        BasisSet::new(n_qubits, vec![reference], reference)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn reference(&self) -> usize {
        self.reference
    }

    pub fn position(&self, index: usize) -> Option<usize> {
        self.members.iter().position(|&m| m == index)
    }
}

/// One step of the reduction, in reduction order.
#[derive(Clone, Debug, PartialEq)]
enum Step {
    Flip(usize),
    Cnot { control: usize, target: usize },
    Merge { keep: usize, target: usize, controls: Vec<(usize, bool)>, split: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Encoder {
    basis: BasisSet,
    circuit: Circuit,
    reduction: Vec<Step>,
}

fn bits(x: usize) -> impl Iterator<Item = usize> {
    (0..usize::BITS as usize).filter(move |&b| x >> b & 1 == 1)
}

pub fn synthesize(basis: &BasisSet) -> Result<Encoder> {
    let n = basis.n_qubits();
    let mut strings = basis.members().to_vec();
    let mut steps = Vec::new();
    let merges = strings.len() - 1;
    let mut merged = 0;
    while strings.len() > 1 {
        let mut best = None;
        for i in 0..strings.len() {
            for j in i + 1..strings.len() {
                let (a, b) = (strings[i].min(strings[j]), strings[i].max(strings[j]));
                let key = ((a ^ b).count_ones(), a, b, i, j);
                if best.is_none_or(|k| key < k) {
                    best = Some(key);
                }
            }
        }
        let (_, a, b, i, _) = best.unwrap();
        let diff = a ^ b;
        let target = diff.trailing_zeros() as usize;
        for r in bits(diff).skip(1) {
            steps.push(Step::Cnot { control: target, target: r });
            for s in strings.iter_mut() {
                if *s >> target & 1 == 1 {
                    *s ^= 1 << r;
                }
            }
        }
        let keep = strings[i] & !(1 << target);
        let gone = keep | 1 << target;

        let mut others: Vec<usize> = strings.iter().copied().filter(|&s| s != keep && s != gone).collect();
        let mut controls = Vec::new();
        while !others.is_empty() {
            let (bit, _) = (0..n)
                .filter(|&q| q != target && !controls.iter().any(|&(c, _)| c == q))
                .map(|q| (q, others.iter().filter(|&&s| (s ^ keep) >> q & 1 == 1).count()))
                .max_by(|x, y| x.1.cmp(&y.1).then(y.0.cmp(&x.0)))
                .expect("distinct strings always differ off the target bit");
            controls.push((bit, keep >> bit & 1 == 1));
            others.retain(|&s| (s ^ keep) >> bit & 1 == 0);
        }
        controls.sort_unstable();
        steps.push(Step::Merge { keep, target, controls, split: merges - 1 - merged });
        merged += 1;
        strings.retain(|&s| s != gone);
    }
    for b in bits(strings[0]) {
        steps.push(Step::Flip(b));
    }

    let mut circuit = Circuit::new(n);
    for step in steps.iter().rev() {
        match step {
            Step::Flip(b) => circuit.push(Gate::fixed(GateKind::X, &[*b]))?,
            Step::Cnot { control, target } => circuit.push(Gate::fixed(GateKind::Cnot, &[*control, *target]))?,
            Step::Merge { target, controls, split, .. } => {
                let anti: Vec<usize> = controls.iter().filter(|c| !c.1).map(|c| c.0).collect();
                for &q in &anti {
                    circuit.push(Gate::fixed(GateKind::X, &[q]))?;
                }
                let mut qubits: Vec<usize> = controls.iter().map(|c| c.0).collect();
                qubits.push(*target);
                let k = controls.len();
                circuit.push(Gate::new(GateKind::controlled_ry(k), qubits.clone(), Some(Angle::slot(2 * split)))?)?;
                circuit.push(Gate::new(GateKind::controlled_rz(k), qubits, Some(Angle::slot(2 * split + 1)))?)?;
                for &q in &anti {
                    circuit.push(Gate::fixed(GateKind::X, &[q]))?;
                }
            }
        }
    }
    Ok(Encoder { basis: basis.clone(), circuit, reduction: steps })
}

impl Encoder {
    pub fn basis(&self) -> &BasisSet {
        &self.basis
    }

    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    pub fn n_params(&self) -> usize {
        self.circuit.n_params()
    }

    /// `V(gamma)|0...0>`.
    pub fn prepare(&self, gamma: &[f64]) -> Result<Statevector> {
        let mut s = Statevector::zero(self.basis.n_qubits());
        s.apply_circuit(&self.circuit, gamma)?;
        Ok(s)
    }

    /// Appends a fixed gate after the synthesized circuit. Only useful for
    /// building deliberately broken encoders.
    pub fn push_gate(&mut self, gate: Gate) -> Result<()> {
        self.circuit.push(gate)
    }

    /// Parameters that make [`Encoder::prepare`] output `target` (given in
    /// member order) up to a global phase. The target is normalized first.
    pub fn solve_parameters(&self, target: &[Complex64]) -> Result<Vec<f64>> {
        let m = self.basis.len();
        if target.len() != m {
            return Err(Error::InvalidArgument(format!("target has {} amplitudes for {m} members", target.len())));
        }
        let norm = target.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidArgument("target amplitudes have zero norm".into()));
        }
        let mut amps: BTreeMap<usize, Complex64> =
            self.basis.members().iter().zip(target).map(|(&i, &a)| (i, a / norm)).collect();
        let mut params = vec![0.0; 2 * (m - 1)];
        let zero = Complex64::new(0.0, 0.0);
        for step in &self.reduction {
            match *step {
                Step::Flip(b) => amps = amps.into_iter().map(|(i, a)| (i ^ 1 << b, a)).collect(),
                Step::Cnot { control, target } => {
                    amps = amps.into_iter().map(|(i, a)| (if i >> control & 1 == 1 { i ^ 1 << target } else { i }, a)).collect()
                }
                Step::Merge { keep, target, split, .. } => {
                    let a0 = amps.remove(&keep).unwrap_or(zero);
                    let a1 = amps.remove(&(keep | 1 << target)).unwrap_or(zero);
                    let (r0, r1) = (a0.norm(), a1.norm());
                    let (p0, p1) = (if r0 > 0.0 { a0.arg() } else { 0.0 }, if r1 > 0.0 { a1.arg() } else { 0.0 });
                    params[2 * split] = 2.0 * r1.atan2(r0);
                    params[2 * split + 1] = p1 - p0;
                    amps.insert(keep, Complex64::from_polar(r0.hypot(r1), 0.5 * (p0 + p1)));
                }
            }
        }
        Ok(params)
    }

    /// Circuit text form preceded by a header naming the members.
    pub fn to_text(&self) -> String {
        let members: Vec<String> = self.basis.members().iter().map(|m| m.to_string()).collect();
        format!(
            "# encoder n={} reference={} members={}\n{}",
            self.basis.n_qubits(),
            self.basis.reference(),
            members.join(","),
            self.circuit.to_text()
        )
    }
}

pub fn solve_parameters(enc: &Encoder, target: &[Complex64]) -> Result<Vec<f64>> {
    enc.solve_parameters(target)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SupportReport {
    pub passed: bool,
    pub worst_leakage: f64,
}

/// Largest probability found outside the members over `trials` uniform
/// draws of `gamma` in `[0, 2pi)`; passes below `1e-10`.
pub fn verify_support<R: Rng + ?Sized>(enc: &Encoder, trials: usize, rng: &mut R) -> Result<SupportReport> {
    if trials == 0 {
        return Err(Error::InvalidArgument("need at least one trial".into()));
    }
    let n = enc.basis.n_qubits();
    let mut inside = vec![false; 1 << n];
    for &m in enc.basis.members() {
        inside[m] = true;
    }
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let gamma: Vec<f64> = (0..enc.n_params()).map(|_| rng.random_range(0.0..std::f64::consts::TAU)).collect();
        let state = enc.prepare(&gamma)?;
        let leak: f64 = state.amplitudes().iter().zip(&inside).filter(|(_, &ok)| !ok).map(|(a, _)| a.norm_sqr()).sum();
        worst = worst.max(leak);
    }
    Ok(SupportReport { passed: worst < 1e-10, worst_leakage: worst })
}
