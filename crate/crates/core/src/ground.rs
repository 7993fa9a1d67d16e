//! Exact ground states used as fidelity references, plus an independent
//! shift-invert eigensolver for cross-checking them.

use ndarray::{Array1, Array2, ShapeBuilder};
use ndarray_linalg::{Eigh, UPLO};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::pauli::{PauliSum, MAX_DENSE_QUBITS};
use crate::statevector::{self, Statevector};

/// Above this size the full spectrum is too slow to compute; a deflated
/// Lanczos iteration is used instead.
pub const DENSE_EIGH_MAX_QUBITS: usize = 10;

const C0: Complex64 = Complex64::new(0.0, 0.0);

/// Lowest eigenvalue and an orthonormal basis of its eigenspace.
#[derive(Clone, Debug)]
pub struct GroundTruth {
    pub energy: f64,
    pub subspace: Vec<Statevector>,
    pub degeneracy_tolerance: f64,
}

impl GroundTruth {
    pub fn n_qubits(&self) -> usize {
        self.subspace[0].n_qubits()
    }

    pub fn degeneracy(&self) -> usize {
        self.subspace.len()
    }

    /// Projection weight of `state` on the ground space.
    pub fn fidelity(&self, state: &Statevector) -> Result<f64> {
        if self.subspace.is_empty() {
            return Err(Error::InvalidArgument("ground subspace is empty".into()));
        }
        if state.n_qubits() != self.n_qubits() {
            return Err(Error::DimensionMismatch { expected: self.n_qubits(), found: state.n_qubits() });
        }
        Ok(self.fidelity_amplitudes(state.amplitudes()))
    }

    pub(crate) fn fidelity_amplitudes(&self, amps: &[Complex64]) -> f64 {
        let f: f64 = self.subspace.iter().map(|v| statevector::inner(v.amplitudes(), amps).norm_sqr()).sum();
        f.clamp(0.0, 1.0)
    }
}

pub fn fidelity(state: &Statevector, truth: &GroundTruth) -> Result<f64> {
    truth.fidelity(state)
}

fn check_size(h: &PauliSum) -> Result<()> {
    if h.n_qubits() > MAX_DENSE_QUBITS {
        return Err(Error::TooManyQubits { n: h.n_qubits(), max: MAX_DENSE_QUBITS });
    }
    Ok(())
}

fn eig_err(e: impl std::fmt::Display) -> Error {
    Error::Eigensolver(e.to_string())
}

/// Hermitian eigendecomposition, ascending. The input is copied into
/// column-major order first: for row-major complex input the LAPACK
/// binding returns conjugated eigenvectors.
pub(crate) fn hermitian_eigh(a: &Array2<Complex64>) -> Result<(Array1<f64>, Array2<Complex64>)> {
    let mut f = Array2::<Complex64>::zeros(a.raw_dim().f());
    f.assign(a);
    f.eigh(UPLO::Lower).map_err(eig_err)
}

/// Ground energy and eigenspace of `h`. Eigenvalues within
/// `degeneracy_tolerance` of the lowest are grouped into the ground space;
/// `None` uses `1e-8` times the spectral range.
pub fn exact_ground(h: &PauliSum, degeneracy_tolerance: Option<f64>) -> Result<GroundTruth> {
    check_size(h)?;
    let n = h.n_qubits();
    if n > DENSE_EIGH_MAX_QUBITS {
        return lanczos_ground(h, degeneracy_tolerance);
    }
    let dim = 1usize << n;
    let (values, columns): (Array1<f64>, Vec<Vec<Complex64>>) = match h.to_dense_real()? {
        Some(a) => {
            let (w, v) = a.eigh(UPLO::Lower).map_err(eig_err)?;
            let cols = (0..dim).map(|k| v.column(k).iter().map(|&x| Complex64::new(x, 0.0)).collect()).collect();
            (w, cols)
        }
        None => {
            let (w, v) = hermitian_eigh(&h.to_dense_matrix()?)?;
            let cols = (0..dim).map(|k| v.column(k).to_vec()).collect();
            (w, cols)
        }
    };
    collect_ground(n, values.as_slice().unwrap(), columns, degeneracy_tolerance, |c| c)
}

/// Ground state restricted to the span of the basis indices in `sector`.
/// `h` must be real and must not couple the sector to its complement.
pub fn exact_ground_in_sector(h: &PauliSum, sector: &[usize], degeneracy_tolerance: Option<f64>) -> Result<GroundTruth> {
    check_size(h)?;
    if sector.is_empty() {
        return Err(Error::InvalidArgument("empty sector".into()));
    }
    let n = h.n_qubits();
    let a = h.to_dense_real_restricted(sector)?;
    let (w, v) = a.eigh(UPLO::Lower).map_err(eig_err)?;
    let columns: Vec<Vec<Complex64>> = (0..sector.len())
        .map(|k| v.column(k).iter().map(|&x| Complex64::new(x, 0.0)).collect())
        .collect();
    collect_ground(n, w.as_slice().unwrap(), columns, degeneracy_tolerance, |col| {
        let mut full = vec![C0; 1 << n];
        for (&i, a) in sector.iter().zip(col) {
            full[i] = a;
        }
        full
    })
}

fn collect_ground(
    n: usize,
    values: &[f64],
    columns: Vec<Vec<Complex64>>,
    tol: Option<f64>,
    embed: impl Fn(Vec<Complex64>) -> Vec<Complex64>,
) -> Result<GroundTruth> {
    let e0 = values[0];
    let range = values[values.len() - 1] - e0;
    let tol = tol.unwrap_or(1e-8 * range);
    let subspace = values
        .iter()
        .zip(columns)
        .take_while(|(&e, _)| e - e0 <= tol)
        .map(|(_, c)| Statevector::from_amplitudes(n, embed(c)))
        .collect::<Result<Vec<_>>>()?;
    Ok(GroundTruth { energy: e0, subspace, degeneracy_tolerance: tol })
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

fn project_out(w: &mut [Complex64], basis: &[Vec<Complex64>]) {
    for v in basis {
        let c = statevector::inner(v, w);
        for (x, y) in w.iter_mut().zip(v) {
            *x -= c * y;
        }
    }
}

struct Ritz {
    value: f64,
    vector: Vec<Complex64>,
    top: f64,
}

/// Lowest eigenpair of `h` on the orthogonal complement of `deflate`, by
/// restarted Lanczos with full reorthogonalization.
fn lanczos_lowest(h: &PauliSum, deflate: &[Vec<Complex64>], seed: u64) -> Result<Ritz> {
    let dim = 1usize << h.n_qubits();
    let scale = h.coefficient_l1().max(1.0);
    let free = dim - deflate.len();
    let kmax = free.min(160);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut start: Vec<Complex64> = (0..dim).map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
    let mut top = f64::NEG_INFINITY;
    for _restart in 0..50 {
        project_out(&mut start, deflate);
        project_out(&mut start, deflate);
        let s = norm(&start);
        if s < 1e-300 {
            return Err(Error::Eigensolver("deflated space is empty".into()));
        }
        let mut basis: Vec<Vec<Complex64>> = vec![start.iter().map(|a| a / s).collect()];
        let mut alpha = Vec::new();
        let mut beta: Vec<f64> = Vec::new();
        let mut best = None;
        loop {
            let k = basis.len() - 1;
            let mut w = h.apply_amplitudes(&basis[k]);
            project_out(&mut w, deflate);
            let a = statevector::inner(&basis[k], &w).re;
            alpha.push(a);
            for _ in 0..2 {
                project_out(&mut w, &basis);
                project_out(&mut w, deflate);
            }
            let b = norm(&w);
            let last = basis.len() == kmax || b < 1e-13 * scale;
            if last || alpha.len() % 8 == 0 {
                let m = alpha.len();
                let mut t = Array2::<f64>::zeros((m, m));
                for i in 0..m {
                    t[[i, i]] = alpha[i];
                    if i + 1 < m {
                        t[[i, i + 1]] = beta[i];
                        t[[i + 1, i]] = beta[i];
                    }
                }
                let (vals, vecs) = t.eigh(UPLO::Lower).map_err(eig_err)?;
                top = top.max(vals[m - 1]);
                let residual = b * vecs[[m - 1, 0]].abs();
                let coeffs: Vec<f64> = vecs.column(0).to_vec();
                if residual < 1e-11 * scale || last {
                    best = Some((vals[0], coeffs, residual));
                    if residual < 1e-11 * scale || b < 1e-13 * scale {
                        break;
                    }
                }
                if last {
                    break;
                }
            }
            beta.push(b);
            basis.push(w.iter().map(|x| x / b).collect());
        }
        let (value, coeffs, residual) = best.expect("Lanczos produced no Ritz pair");
        let mut vector = vec![C0; dim];
        for (c, v) in coeffs.iter().zip(&basis) {
            for (x, y) in vector.iter_mut().zip(v) {
                *x += y * *c;
            }
        }
        let s = norm(&vector);
        vector.iter_mut().for_each(|x| *x /= s);
        if residual < 1e-11 * scale || basis.len() >= free {
            return Ok(Ritz { value, vector, top });
        }
        start = vector;
    }
    Err(Error::Eigensolver("Lanczos did not converge".into()))
}

fn lanczos_ground(h: &PauliSum, degeneracy_tolerance: Option<f64>) -> Result<GroundTruth> {
    let n = h.n_qubits();
    let dim = 1usize << n;
    let first = lanczos_lowest(h, &[], 0x9e37)?;
    let e0 = first.value;
    let tol = degeneracy_tolerance.unwrap_or(1e-8 * (first.top - e0));
    let mut vectors = vec![first.vector];
    let mut energy = e0;
    while vectors.len() < dim {
        let next = lanczos_lowest(h, &vectors, 0x9e37 + vectors.len() as u64)?;
        if next.value - energy > tol {
            break;
        }
        energy = energy.min(next.value);
        vectors.push(next.vector);
    }
    let subspace = vectors.into_iter().map(|v| Statevector::from_amplitudes(n, v)).collect::<Result<Vec<_>>>()?;
    Ok(GroundTruth { energy, subspace, degeneracy_tolerance: tol })
}

/// Real symmetric matrix with an in-place LU factorization.
struct Lu {
    n: usize,
    lu: Vec<f64>,
    perm: Vec<usize>,
}

impl Lu {
    fn factor(mut a: Vec<f64>, n: usize) -> Result<Self> {
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| a[i * n + k].abs().total_cmp(&a[j * n + k].abs()))
                .unwrap();
            if a[p * n + k].abs() < 1e-300 {
                return Err(Error::Eigensolver("singular shifted matrix".into()));
            }
            if p != k {
                for c in 0..n {
                    a.swap(k * n + c, p * n + c);
                }
                perm.swap(k, p);
            }
            let pivot = a[k * n + k];
            for i in k + 1..n {
                let f = a[i * n + k] / pivot;
                a[i * n + k] = f;
                if f != 0.0 {
                    for c in k + 1..n {
                        a[i * n + c] -= f * a[k * n + c];
                    }
                }
            }
        }
        Ok(Lu { n, lu: a, perm })
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let row = &self.lu[i * n..i * n + i];
            let s: f64 = row.iter().zip(&y[..i]).map(|(l, v)| l * v).sum();
            y[i] -= s;
        }
        for i in (0..n).rev() {
            let row = &self.lu[i * n + i + 1..(i + 1) * n];
            let s: f64 = row.iter().zip(&y[i + 1..]).map(|(u, v)| u * v).sum();
            y[i] = (y[i] - s) / self.lu[i * n + i];
        }
        y
    }
}

/// Eigenvalues and vectors (columns) of a small symmetric matrix by cyclic Jacobi.
fn jacobi_eigen(mut a: Vec<Vec<f64>>) -> (Vec<f64>, Vec<Vec<f64>>) {
    let k = a.len();
    let mut v: Vec<Vec<f64>> = (0..k).map(|i| (0..k).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect();
    for _sweep in 0..100 {
        let off: f64 = (0..k).flat_map(|i| (0..k).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j] * a[i][j]).sum();
        let total: f64 = a.iter().flatten().map(|x| x * x).sum();
        if off <= 1e-30 * total.max(1e-300) {
            break;
        }
        for p in 0..k {
            for q in p + 1..k {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for r in 0..k {
                    let (arp, arq) = (a[r][p], a[r][q]);
                    a[r][p] = c * arp - s * arq;
                    a[r][q] = s * arp + c * arq;
                }
                for r in 0..k {
                    let (apr, aqr) = (a[p][r], a[q][r]);
                    a[p][r] = c * apr - s * aqr;
                    a[q][r] = s * apr + c * aqr;
                }
                for r in 0..k {
                    let (vrp, vrq) = (v[r][p], v[r][q]);
                    v[r][p] = c * vrp - s * vrq;
                    v[r][q] = s * vrp + c * vrq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| a[i][i].total_cmp(&a[j][j]));
    let values = order.iter().map(|&i| a[i][i]).collect();
    let vectors = order.iter().map(|&i| (0..k).map(|r| v[r][i]).collect()).collect();
    (values, vectors)
}

fn orthonormalize(block: &mut [Vec<f64>]) {
    for i in 0..block.len() {
        for _ in 0..2 {
            for j in 0..i {
                let c: f64 = block[j].iter().zip(&block[i]).map(|(a, b)| a * b).sum();
                let (head, tail) = block.split_at_mut(i);
                for (x, y) in tail[0].iter_mut().zip(&head[j]) {
                    *x -= c * y;
                }
            }
        }
        let s = block[i].iter().map(|x| x * x).sum::<f64>().sqrt();
        block[i].iter_mut().for_each(|x| *x /= s);
    }
}

/// Ground energy by block inverse iteration on `H - sigma` with `sigma`
/// below the Gershgorin bound, using a hand-written LU factorization and
/// Rayleigh-Ritz on the block. Complex Hamiltonians are embedded as real
/// matrices of twice the size. Independent of the LAPACK path.
pub fn shift_invert_ground_energy(h: &PauliSum) -> Result<f64> {
    if h.n_qubits() > DENSE_EIGH_MAX_QUBITS {
        return Err(Error::TooManyQubits { n: h.n_qubits(), max: DENSE_EIGH_MAX_QUBITS });
    }
    let real = match h.to_dense_real()? {
        Some(a) => a,
        None => {
            let c = h.to_dense_matrix()?;
            let d = c.nrows();
            let mut a = Array2::<f64>::zeros((2 * d, 2 * d));
            for i in 0..d {
                for j in 0..d {
                    let z = c[[i, j]];
                    a[[i, j]] = z.re;
                    a[[i + d, j + d]] = z.re;
                    a[[i, j + d]] = -z.im;
                    a[[i + d, j]] = z.im;
                }
            }
            a
        }
    };
    let n = real.nrows();
    let dense: Vec<f64> = real.iter().copied().collect();
    let scale = h.coefficient_l1().max(1.0);
    let sigma = -h.coefficient_l1() - 1.0;
    let mut shifted = dense.clone();
    for i in 0..n {
        shifted[i * n + i] -= sigma;
    }
    let lu = Lu::factor(shifted, n)?;
    let matvec = |x: &[f64]| -> Vec<f64> {
        (0..n).map(|i| dense[i * n..(i + 1) * n].iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    };

    let k = n.min(8);
    let mut rng = ChaCha8Rng::seed_from_u64(0x51f7);
    let mut block: Vec<Vec<f64>> = (0..k).map(|_| (0..n).map(|_| rng.random::<f64>() - 0.5).collect()).collect();
    orthonormalize(&mut block);
    let mut previous = f64::INFINITY;
    for iter in 0..5000 {
        let mut y: Vec<Vec<f64>> = block.iter().map(|x| lu.solve(x)).collect();
        orthonormalize(&mut y);
        let hy: Vec<Vec<f64>> = y.iter().map(|v| matvec(v)).collect();
        let b: Vec<Vec<f64>> = (0..k)
            .map(|i| (0..k).map(|j| 0.5 * (dot(&y[i], &hy[j]) + dot(&y[j], &hy[i]))).collect())
            .collect();
        let (values, vecs) = jacobi_eigen(b);
        block = vecs
            .iter()
            .map(|w| (0..n).map(|r| w.iter().zip(&y).map(|(c, v)| c * v[r]).sum()).collect())
            .collect();
        let hx0: Vec<f64> = (0..n).map(|r| vecs[0].iter().zip(&hy).map(|(c, v)| c * v[r]).sum()).collect();
        let residual = hx0.iter().zip(&block[0]).map(|(a, b)| (a - values[0] * b).powi(2)).sum::<f64>().sqrt();
        if residual < 1e-10 * scale || (iter > 50 && (values[0] - previous).abs() < 1e-15 * scale) {
            return Ok(values[0]);
        }
        previous = values[0];
    }
    Err(Error::Eigensolver("shift-invert iteration did not converge".into()))
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
