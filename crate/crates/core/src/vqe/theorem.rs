use ndarray::Array2;
use num_complex::Complex64;
use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::encoder::BasisSet;
use crate::error::{Error, Result};
use crate::ground::{hermitian_eigh, GroundTruth};
use crate::statevector::{self, Statevector};

/// Best superposition over a candidate set and the fidelity it attains.
#[derive(Clone, Debug, PartialEq)]
pub struct Superposition {
    /// Unit coefficient vector, `None` when every overlap vanishes.
    pub alpha: Option<Vec<Complex64>>,
    pub fidelity: f64,
    /// Ground-space weight of each candidate on its own.
    pub per_state: Vec<f64>,
}

fn from_overlaps(betas: Vec<Vec<Complex64>>) -> Result<Superposition> {
    let m = betas[0].len();
    let per_state: Vec<f64> = (0..m).map(|j| betas.iter().map(|b| b[j].norm_sqr()).sum()).collect();
    if betas.len() == 1 {
        let beta = &betas[0];
        let f: f64 = beta.iter().map(|b| b.norm_sqr()).sum();
        if f == 0.0 {
            return Ok(Superposition { alpha: None, fidelity: 0.0, per_state });
        }
        let norm = f.sqrt();
        return Ok(Superposition { alpha: Some(beta.iter().map(|b| b / norm).collect()), fidelity: f, per_state });
    }
    // Degenerate ground space: maximize alpha^dag (sum_v beta_v beta_v^dag) alpha.
    let mut gram = Array2::<Complex64>::zeros((m, m));
    for b in &betas {
        for i in 0..m {
            for j in 0..m {
                gram[[i, j]] += b[i] * b[j].conj();
            }
        }
    }
    let (w, v) = hermitian_eigh(&gram)?;
    let top = w[m - 1].max(0.0);
    if top == 0.0 {
        return Ok(Superposition { alpha: None, fidelity: 0.0, per_state });
    }
    Ok(Superposition { alpha: Some(v.column(m - 1).to_vec()), fidelity: top, per_state })
}

/// Optimal coefficients for a superposition of the basis members against
/// the ground space of `truth`. For a single ground vector with overlaps
/// `beta_j`, the optimum is `beta / |beta|` with fidelity `|beta|^2`.
pub fn optimal_superposition(basis: &BasisSet, truth: &GroundTruth) -> Result<Superposition> {
    if truth.subspace.is_empty() {
        return Err(Error::InvalidArgument("ground subspace is empty".into()));
    }
    if basis.n_qubits() != truth.n_qubits() {
        return Err(Error::DimensionMismatch { expected: truth.n_qubits(), found: basis.n_qubits() });
    }
    let betas = truth.subspace.iter().map(|v| basis.members().iter().map(|&j| v.amplitudes()[j]).collect()).collect();
    from_overlaps(betas)
}

/// As [`optimal_superposition`] for arbitrary candidate states, which must
/// be orthonormal to within `1e-9`.
pub fn optimal_superposition_vectors(states: &[Statevector], truth: &GroundTruth) -> Result<Superposition> {
    if states.is_empty() || truth.subspace.is_empty() {
        return Err(Error::InvalidArgument("need at least one candidate and one ground vector".into()));
    }
    for (i, a) in states.iter().enumerate() {
        for (j, b) in states.iter().enumerate().skip(i) {
            let g = a.inner(b)?;
            let expect = if i == j { 1.0 } else { 0.0 };
            if (g - expect).norm() > 1e-9 {
                return Err(Error::InvalidArgument(format!("candidates {i} and {j} are not orthonormal")));
            }
        }
    }
    let betas = truth
        .subspace
        .iter()
        .map(|v| states.iter().map(|s| s.inner(v)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    from_overlaps(betas)
}

/// Worst deviations seen by [`theorem1_suite`].
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Theorem1Report {
    pub trials: usize,
    /// Fidelity attained by the optimal superposition vs the sum of single-state fidelities.
    pub worst_sum_gap: f64,
    /// Closed-form optimum vs the top eigenvalue of the overlap Gram matrix.
    pub worst_bruteforce_gap: f64,
    /// `| |a^dag beta| - |a| |beta| |` for the brute-force maximizer `a`.
    pub worst_collinearity_gap: f64,
    pub monotonicity_violations: usize,
}

impl Theorem1Report {
    pub fn passed(&self) -> bool {
        self.worst_sum_gap <= 1e-12
            && self.worst_bruteforce_gap <= 1e-9
            && self.worst_collinearity_gap <= 1e-9
            && self.monotonicity_violations == 0
    }
}

fn random_state<R: Rng>(rng: &mut R, n: usize) -> Statevector {
    let amps: Vec<Complex64> =
        (0..1usize << n).map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))).collect();
    let mut s = Statevector::from_amplitudes(n, amps).expect("length matches");
    s.normalize().expect("nonzero norm");
    s
}

/// Random instances with `n` drawn from `qubits`: a random unit vector is
/// the unique ground state of the projector Hamiltonian `-|v><v|`, and a
/// random subset of the computational basis forms the candidates.
pub fn theorem1_suite(qubits: std::ops::RangeInclusive<usize>, trials: usize, seed: u64) -> Result<Theorem1Report> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = Theorem1Report { trials, ..Default::default() };
    for _ in 0..trials {
        let n = rng.random_range(qubits.clone());
        let dim = 1usize << n;
        let target = random_state(&mut rng, n);
        let truth = GroundTruth { energy: -1.0, subspace: vec![target.clone()], degeneracy_tolerance: 0.0 };
        let m = rng.random_range(1..=dim);
        let mut members: Vec<usize> = index::sample(&mut rng, dim, m).into_vec();
        let basis = BasisSet::new(n, members.clone(), members[0])?;
        let sup = optimal_superposition(&basis, &truth)?;
        let beta: Vec<Complex64> = members.iter().map(|&j| target.amplitudes()[j]).collect();

        // Fidelity of the state actually built from alpha.
        let attained = match &sup.alpha {
            Some(alpha) => {
                let mut amps = vec![Complex64::new(0.0, 0.0); dim];
                for (&j, a) in members.iter().zip(alpha) {
                    amps[j] = *a;
                }
                statevector::inner(&amps, target.amplitudes()).norm_sqr()
            }
            None => 0.0,
        };
        let sum: f64 = sup.per_state.iter().sum();
        report.worst_sum_gap = report.worst_sum_gap.max((attained - sum).abs());

        let mut gram = Array2::<Complex64>::zeros((m, m));
        for i in 0..m {
            for j in 0..m {
                gram[[i, j]] = beta[i] * beta[j].conj();
            }
        }
        let (w, v) = hermitian_eigh(&gram)?;
        report.worst_bruteforce_gap = report.worst_bruteforce_gap.max((w[m - 1] - sup.fidelity).abs());
        let a = v.column(m - 1);
        let dot: Complex64 = a.iter().zip(&beta).map(|(x, b)| x.conj() * b).sum();
        let a_norm = a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        let b_norm = beta.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        report.worst_collinearity_gap = report.worst_collinearity_gap.max((dot.norm() - a_norm * b_norm).abs());

        if m < dim {
            let extra = (0..dim).filter(|j| !members.contains(j)).nth(rng.random_range(0..dim - m)).unwrap();
            members.push(extra);
            let grown = optimal_superposition(&BasisSet::new(n, members, basis.reference())?, &truth)?;
            if grown.fidelity < sup.fidelity - 1e-15 {
                report.monotonicity_violations += 1;
            }
        }
    }
    Ok(report)
}
