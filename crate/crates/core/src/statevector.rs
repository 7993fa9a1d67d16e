//! Dense statevectors and in-place gate kernels.
//!
//! Amplitude `i` belongs to the basis state whose bit `q` is the value of
//! qubit `q`. A bitstring written left to right names qubits `n-1 .. 0`, so
//! `|11000011>` on eight qubits is index 195.

use std::io::{self, Write};

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::circuit::{Circuit, Gate, Op};
use crate::error::{Error, Result};
use crate::pauli::{i_power, PauliMask, PauliSum};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

#[derive(Clone, Debug, PartialEq)]
pub struct Statevector {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl Statevector {
    /// `|0...0>`.
    pub fn zero(n_qubits: usize) -> Self {
        let mut amplitudes = vec![ZERO; 1 << n_qubits];
        amplitudes[0] = ONE;
        Self { n_qubits, amplitudes }
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        if n_qubits == 0 || index >= 1usize << n_qubits {
            return Err(Error::IndexOutOfRange { index, n_qubits });
        }
        let mut amplitudes = vec![ZERO; 1 << n_qubits];
        amplitudes[index] = ONE;
        Ok(Self { n_qubits, amplitudes })
    }

    /// Wraps raw amplitudes; the length must be a power of two matching `n_qubits`.
    pub fn from_amplitudes(n_qubits: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != 1usize << n_qubits {
            return Err(Error::InvalidArgument(format!(
                "{} amplitudes do not describe {n_qubits} qubits",
                amplitudes.len()
            )));
        }
        Ok(Self { n_qubits, amplitudes })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(Complex64::norm_sqr).sum()
    }

    pub fn normalize(&mut self) -> Result<()> {
        let norm = self.norm_sqr().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidArgument("cannot normalize a zero vector".into()));
        }
        self.amplitudes.iter_mut().for_each(|a| *a /= norm);
        Ok(())
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Statevector) -> Result<Complex64> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::DimensionMismatch { expected: self.n_qubits, found: other.n_qubits });
        }
        Ok(inner(&self.amplitudes, &other.amplitudes))
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(Complex64::norm_sqr).collect()
    }

    pub fn apply_gate(&mut self, gate: &Gate, params: &[f64]) -> Result<()> {
        if let Some(&q) = gate.qubits.iter().find(|&&q| q >= self.n_qubits) {
            return Err(Error::IndexOutOfRange { index: q, n_qubits: self.n_qubits });
        }
        for op in gate.ops() {
            apply_op(&mut self.amplitudes, &op, params)?;
        }
        Ok(())
    }

    pub fn apply_circuit(&mut self, circuit: &Circuit, params: &[f64]) -> Result<()> {
        if circuit.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch { expected: circuit.n_qubits(), found: self.n_qubits });
        }
        if params.len() != circuit.n_params() {
            return Err(Error::ParameterCount { expected: circuit.n_params(), found: params.len() });
        }
        for op in circuit.ops() {
            apply_op(&mut self.amplitudes, &op, params)?;
        }
        Ok(())
    }

    /// Bitstring of `index`, qubit `n-1` first.
    pub fn bitstring(&self, index: usize) -> String {
        (0..self.n_qubits).rev().map(|q| if index >> q & 1 == 1 { '1' } else { '0' }).collect()
    }

    /// Debug dump: `index,bitstring,real,imag,probability`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "index,bitstring,real,imag,probability")?;
        for (i, a) in self.amplitudes.iter().enumerate() {
            writeln!(out, "{i},{},{:?},{:?},{:?}", self.bitstring(i), a.re, a.im, a.norm_sqr())?;
        }
        Ok(())
    }
}

/// `|index>` on `n` qubits.
pub fn init_basis_state(n: usize, index: usize) -> Result<Statevector> {
    Statevector::basis(n, index)
}

/// Functional form of [`Statevector::apply_gate`].
pub fn apply_gate(state: &Statevector, gate: &Gate, params: &[f64]) -> Result<Statevector> {
    let mut out = state.clone();
    out.apply_gate(gate, params)?;
    Ok(out)
}

/// Shot-sampled estimate of `<psi|H|psi>`.
///
/// Each non-identity term is measured in its own eigenbasis with `shots`
/// repetitions. A measurement of a Pauli product returns +1 with probability
/// `(1 + <P>)/2`, so the number of +1 outcomes is drawn from the matching
/// binomial distribution.
pub fn expectation_sampled<R: Rng + ?Sized>(
    state: &Statevector,
    h: &PauliSum,
    shots: u64,
    rng: &mut R,
) -> Result<f64> {
    if state.n_qubits() != h.n_qubits() {
        return Err(Error::DimensionMismatch { expected: h.n_qubits(), found: state.n_qubits() });
    }
    if shots == 0 {
        return Err(Error::InvalidArgument("shots must be positive".into()));
    }
    let mut total = 0.0;
    for (c, s) in h.terms() {
        if s.is_identity() {
            total += c;
            continue;
        }
        let exact = s.mask().expectation(state.amplitudes());
        let p_plus = ((1.0 + exact) / 2.0).clamp(0.0, 1.0);
        let plus = Binomial::new(shots, p_plus)
            .map_err(|e| Error::InvalidArgument(e.to_string()))?
            .sample(rng);
        total += c * (2.0 * plus as f64 - shots as f64) / shots as f64;
    }
    Ok(total)
}

#[inline]
pub(crate) fn inner(bra: &[Complex64], ket: &[Complex64]) -> Complex64 {
    bra.iter().zip(ket).map(|(b, k)| b.conj() * k).sum()
}

#[inline]
fn highest_bit(x: usize) -> usize {
    1 << (usize::BITS - 1 - x.leading_zeros())
}

pub(crate) fn apply_op(amps: &mut [Complex64], op: &Op, params: &[f64]) -> Result<()> {
    match *op {
        Op::Hadamard(q) => hadamard(amps, q),
        Op::Pauli { mask, controls } => controlled_pauli(amps, mask, controls),
        Op::Rotation { mask, controls, angle } => {
            let phi = angle.resolve(params)?;
            controlled_rotation(amps, mask, controls, phi)
        }
    }
    Ok(())
}

pub(crate) fn apply_op_inverse(amps: &mut [Complex64], op: &Op, params: &[f64]) -> Result<()> {
    match *op {
        Op::Rotation { mask, controls, angle } => {
            let phi = angle.resolve(params)?;
            controlled_rotation(amps, mask, controls, -phi);
            Ok(())
        }
        _ => apply_op(amps, op, params),
    }
}

fn hadamard(amps: &mut [Complex64], q: usize) {
    let bit = 1 << q;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..amps.len() {
        if i & bit == 0 {
            let (a, b) = (amps[i], amps[i | bit]);
            amps[i] = (a + b) * s;
            amps[i | bit] = (a - b) * s;
        }
    }
}

/// Calls `f(i)` for every index with bit `hb` clear and every control bit set.
#[inline(always)]
fn for_each_lower<F: FnMut(usize)>(len: usize, hb: usize, controls: usize, mut f: F) {
    let mut base = 0;
    while base < len {
        if controls == 0 {
            (base..base + hb).for_each(&mut f);
        } else {
            (base..base + hb).filter(|i| i & controls == controls).for_each(&mut f);
        }
        base += hb << 1;
    }
}

#[inline(always)]
fn parity_sign(v: usize) -> f64 {
    if v.count_ones() & 1 == 1 {
        -1.0
    } else {
        1.0
    }
}

fn controlled_pauli(amps: &mut [Complex64], mask: PauliMask, controls: usize) {
    let ph = i_power(mask.n_y);
    if mask.x == 0 {
        for (i, a) in amps.iter_mut().enumerate() {
            if i & controls == controls {
                *a *= ph * parity_sign(i & mask.z);
            }
        }
        return;
    }
    let hb = highest_bit(mask.x);
    let flip = parity_sign(mask.x & mask.z);
    for_each_lower(amps.len(), hb, controls, |i| {
        let j = i ^ mask.x;
        let si = parity_sign(i & mask.z);
        let (ai, aj) = (amps[i], amps[j]);
        amps[i] = ph * (si * flip) * aj;
        amps[j] = ph * si * ai;
    });
}

/// `exp(-i (phi/2) P)` on the subspace where every control bit is set.
fn controlled_rotation(amps: &mut [Complex64], mask: PauliMask, controls: usize, phi: f64) {
    let (s, c) = (phi / 2.0).sin_cos();
    let minus_i_s = Complex64::new(0.0, -s) * i_power(mask.n_y);
    if mask.x == 0 {
        let plus = Complex64::new(c, 0.0) + minus_i_s;
        let minus = Complex64::new(c, 0.0) - minus_i_s;
        for (i, a) in amps.iter_mut().enumerate() {
            if i & controls == controls {
                *a *= if (i & mask.z).count_ones() & 1 == 0 { plus } else { minus };
            }
        }
        return;
    }
    let hb = highest_bit(mask.x);
    let flip = parity_sign(mask.x & mask.z);
    let z = mask.z & !hb;
    if z == 0 {
        // phase(i) is constant on the lower half: one fused 2x2 update
        let to_i = minus_i_s * flip;
        let to_j = minus_i_s;
        for_each_lower(amps.len(), hb, controls, |i| {
            let j = i ^ mask.x;
            let (ai, aj) = (amps[i], amps[j]);
            amps[i] = ai * c + to_i * aj;
            amps[j] = aj * c + to_j * ai;
        });
        return;
    }
    for_each_lower(amps.len(), hb, controls, |i| {
        let j = i ^ mask.x;
        let si = parity_sign(i & z);
        let (ai, aj) = (amps[i], amps[j]);
        amps[i] = ai * c + minus_i_s * (si * flip) * aj;
        amps[j] = aj * c + minus_i_s * si * ai;
    });
}

/// `<bra| P_c |ket>` where `P_c` is the Pauli product restricted to the
/// control subspace (the generator of a controlled rotation).
pub(crate) fn generator_overlap(bra: &[Complex64], ket: &[Complex64], mask: PauliMask, controls: usize) -> Complex64 {
    let ph = i_power(mask.n_y);
    if mask.x == 0 {
        let mut acc = ZERO;
        for (i, (b, k)) in bra.iter().zip(ket).enumerate() {
            if i & controls == controls {
                acc += b.conj() * k * parity_sign(i & mask.z);
            }
        }
        return acc * ph;
    }
    let hb = highest_bit(mask.x);
    let flip = parity_sign(mask.x & mask.z);
    let z = mask.z & !hb;
    // sum over pairs: b_i* s_j k_j + b_j* s_i k_i, with s_j = s_i * flip
    let mut acc = ZERO;
    for_each_lower(bra.len(), hb, controls, |i| {
        let j = i ^ mask.x;
        let si = parity_sign(i & z);
        acc += (bra[i].conj() * ket[j] * flip + bra[j].conj() * ket[i]) * si;
    });
    acc * ph
}
