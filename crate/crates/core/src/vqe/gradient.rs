use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Op};
use crate::error::{Error, Result};
use crate::pauli::PauliSum;
use crate::statevector::{self, Statevector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GradientMode {
    Adjoint,
    FiniteDifference,
}

/// Energy, gradient and output state at one parameter point.
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub energy: f64,
    pub gradient: Vec<f64>,
    pub state: Vec<Complex64>,
}

impl Evaluation {
    pub fn grad_norm(&self) -> f64 {
        self.gradient.iter().map(|g| g * g).sum::<f64>().sqrt()
    }
}

/// `theta -> <input| U(theta)^dag H U(theta) |input>` with the circuit
/// lowered once.
#[derive(Clone, Debug)]
pub struct Objective<'a> {
    ops: Vec<Op>,
    n_params: usize,
    input: Vec<Complex64>,
    h: &'a PauliSum,
    mode: GradientMode,
}

impl<'a> Objective<'a> {
    pub fn new(u: &Circuit, input: &Statevector, h: &'a PauliSum) -> Result<Self> {
        if u.n_qubits() != h.n_qubits() {
            return Err(Error::DimensionMismatch { expected: h.n_qubits(), found: u.n_qubits() });
        }
        if input.n_qubits() != h.n_qubits() {
            return Err(Error::DimensionMismatch { expected: h.n_qubits(), found: input.n_qubits() });
        }
        Ok(Objective {
            ops: u.ops(),
            n_params: u.n_params(),
            input: input.amplitudes().to_vec(),
            h,
            mode: GradientMode::Adjoint,
        })
    }

    pub fn with_mode(mut self, mode: GradientMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn n_params(&self) -> usize {
        self.n_params
    }

    fn check(&self, theta: &[f64]) -> Result<()> {
        if theta.len() != self.n_params {
            return Err(Error::ParameterCount { expected: self.n_params, found: theta.len() });
        }
        Ok(())
    }

    pub fn state(&self, theta: &[f64]) -> Result<Vec<Complex64>> {
        self.check(theta)?;
        let mut psi = self.input.clone();
        for op in &self.ops {
            statevector::apply_op(&mut psi, op, theta)?;
        }
        Ok(psi)
    }

    pub fn energy(&self, theta: &[f64]) -> Result<f64> {
        Ok(self.h.expectation_amplitudes(&self.state(theta)?))
    }

    pub fn evaluate(&self, theta: &[f64]) -> Result<Evaluation> {
        match self.mode {
            GradientMode::Adjoint => self.adjoint(theta),
            GradientMode::FiniteDifference => {
                let state = self.state(theta)?;
                let energy = self.h.expectation_amplitudes(&state);
                let gradient = self.central_differences(theta, 1e-6)?;
                Ok(Evaluation { energy, gradient, state })
            }
        }
    }

    fn adjoint(&self, theta: &[f64]) -> Result<Evaluation> {
        let state = self.state(theta)?;
        let mut psi = state.clone();
        let mut lambda = self.h.apply_amplitudes(&psi);
        let energy = statevector::inner(&psi, &lambda).re;
        let mut gradient = vec![0.0; self.n_params];
        for op in self.ops.iter().rev() {
            if let Op::Rotation { mask, controls, angle } = *op {
                if let Some(slot) = angle.slot_index() {
                    let scale = match angle {
                        crate::circuit::Angle::Slot { scale, .. } => scale,
                        crate::circuit::Angle::Fixed(_) => 0.0,
                    };
                    gradient[slot] += scale * statevector::generator_overlap(&lambda, &psi, mask, controls).im;
                }
            }
            statevector::apply_op_inverse(&mut psi, op, theta)?;
            statevector::apply_op_inverse(&mut lambda, op, theta)?;
        }
        Ok(Evaluation { energy, gradient, state })
    }

    pub fn central_differences(&self, theta: &[f64], step: f64) -> Result<Vec<f64>> {
        self.check(theta)?;
        let mut probe = theta.to_vec();
        (0..theta.len())
            .map(|k| {
                probe[k] = theta[k] + step;
                let plus = self.energy(&probe)?;
                probe[k] = theta[k] - step;
                let minus = self.energy(&probe)?;
                probe[k] = theta[k];
                Ok((plus - minus) / (2.0 * step))
            })
            .collect()
    }
}

pub fn cost(u: &Circuit, input: &Statevector, h: &PauliSum, theta: &[f64]) -> Result<f64> {
    Objective::new(u, input, h)?.energy(theta)
}

/// Exact gradient by reverse-mode differentiation through the statevector.
pub fn gradient(u: &Circuit, input: &Statevector, h: &PauliSum, theta: &[f64]) -> Result<Vec<f64>> {
    Ok(Objective::new(u, input, h)?.adjoint(theta)?.gradient)
}

pub fn finite_difference_gradient(
    u: &Circuit,
    input: &Statevector,
    h: &PauliSum,
    theta: &[f64],
    step: f64,
) -> Result<Vec<f64>> {
    Objective::new(u, input, h)?.central_differences(theta, step)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::{build_hea, build_hva_tfim, Entangler, Lattice};
    use crate::circuit::{Angle, Gate, GateKind};
    use crate::models::{Boundary, ModelSpec};
    use crate::pauli::{Pauli, PauliString};
    use std::f64::consts::PI;

    fn z0(n: usize, c: f64) -> PauliSum {
        PauliSum::from_terms(n, [(c, PauliString::single(n, 0, Pauli::Z).unwrap())]).unwrap()
    }

    #[test]
    fn empty_circuit_cost() {
        let e = cost(&Circuit::new(1), &Statevector::zero(1), &z0(1, 1.0), &[]).unwrap();
        assert_eq!(e, 1.0);
    }

    #[test]
    fn hea_at_zero_keeps_zz() {
        let u = build_hea(2, 1, Entangler::Chain).unwrap();
        let zz = PauliSum::from_terms(2, [(1.0, PauliString::new(2, [(0, Pauli::Z), (1, Pauli::Z)]).unwrap())]).unwrap();
        assert!((cost(&u, &Statevector::zero(2), &zz, &[0.0; 4]).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn single_ry_derivative() {
        let mut u = Circuit::new(1);
        u.push(Gate::rotation(GateKind::Ry, &[0], Angle::slot(0))).unwrap();
        let g = gradient(&u, &Statevector::zero(1), &z0(1, 1.0), &[PI / 3.0]).unwrap();
        assert!((g[0] + 3f64.sqrt() / 2.0).abs() < 1e-14);
    }

    #[test]
    fn shared_slots_match_finite_differences() {
        let h = ModelSpec::Tfim1d { n: 4, j: -1.0, h: -1.2, boundary: Boundary::Periodic }.hamiltonian().unwrap();
        let u = build_hva_tfim(Lattice::Ring(4), 2).unwrap();
        let theta = [0.3, -0.7, 1.1, 0.2, 0.9, -1.4];
        let input = Statevector::zero(4);
        let adj = gradient(&u, &input, &h, &theta).unwrap();
        let fd = finite_difference_gradient(&u, &input, &h, &theta, 1e-6).unwrap();
        for (a, f) in adj.iter().zip(&fd) {
            assert!((a - f).abs() <= 1e-5 * a.abs().max(1e-3), "{a} vs {f}");
        }
    }

    #[test]
    fn length_mismatch_is_an_error() {
        let u = build_hea(2, 1, Entangler::Chain).unwrap();
        assert!(cost(&u, &Statevector::zero(2), &z0(2, 1.0), &[0.0; 3]).is_err());
        assert!(gradient(&u, &Statevector::zero(2), &z0(2, 1.0), &[0.0; 5]).is_err());
    }
}
