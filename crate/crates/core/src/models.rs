//! Benchmark Hamiltonians: transverse-field Ising (1D ring, 2D torus),
//! cluster-Ising and the Jordan-Wigner encoded Fermi-Hubbard chain.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ansatz::{lattice_bonds, Lattice};
use crate::error::{Error, Result};
use crate::pauli::{i_power, Pauli, PauliString, PauliSum};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Boundary {
    Open,
    Periodic,
}

/// A benchmark model with its couplings and geometry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ModelSpec {
    Tfim1d { n: usize, j: f64, h: f64, boundary: Boundary },
    Tfim2d { rows: usize, cols: usize, j: f64, h: f64, boundary: Boundary },
    ClusterIsing { n: usize, j: f64, h1: f64, h2: f64 },
    /// Half-filled chain with open boundaries; `2 * sites` qubits, spin-up first.
    Hubbard { sites: usize, t: f64, u: f64 },
}

impl ModelSpec {
    pub fn family(&self) -> &'static str {
        match self {
            ModelSpec::Tfim1d { .. } => "tfim_1d",
            ModelSpec::Tfim2d { .. } => "tfim_2d",
            ModelSpec::ClusterIsing { .. } => "cluster_ising",
            ModelSpec::Hubbard { .. } => "hubbard",
        }
    }

    pub fn n_qubits(&self) -> usize {
        match *self {
            ModelSpec::Tfim1d { n, .. } | ModelSpec::ClusterIsing { n, .. } => n,
            ModelSpec::Tfim2d { rows, cols, .. } => rows * cols,
            ModelSpec::Hubbard { sites, .. } => 2 * sites,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidArgument(msg));
        let finite = |xs: &[f64]| xs.iter().all(|x| x.is_finite());
        match *self {
            ModelSpec::Tfim1d { n, j, h, .. } if n < 2 || !finite(&[j, h]) => bad(format!("tfim_1d needs n >= 2, got {n}")),
            ModelSpec::Tfim2d { rows, cols, j, h, .. } if rows < 2 || cols < 2 || !finite(&[j, h]) => {
                bad(format!("tfim_2d needs at least 2x2 sites, got {rows}x{cols}"))
            }
            ModelSpec::ClusterIsing { n, j, h1, h2 } if n < 3 || !finite(&[j, h1, h2]) => {
                bad(format!("cluster_ising needs n >= 3, got {n}"))
            }
            ModelSpec::Hubbard { sites, t, u } if sites < 2 || !finite(&[t, u]) => {
                bad(format!("hubbard needs at least 2 sites, got {sites}"))
            }
            _ => Ok(()),
        }
    }

    pub fn hamiltonian(&self) -> Result<PauliSum> {
        self.validate()?;
        match *self {
            ModelSpec::Tfim1d { .. } | ModelSpec::Tfim2d { .. } => tfim(self),
            ModelSpec::ClusterIsing { n, j, h1, h2 } => cluster_ising(n, j, h1, h2),
            ModelSpec::Hubbard { sites, t, u } => hubbard_jw(sites, t, u),
        }
    }

    /// Basis index of the reference input state: `|0...0>`, or for Hubbard
    /// the half-filled bitstring with spin-up on the left half of the chain
    /// and spin-down on the right half (`|11000011>` for four sites).
    pub fn reference_index(&self) -> usize {
        match *self {
            ModelSpec::Hubbard { sites, .. } => hubbard_reference(sites, sites / 2, sites / 2),
            _ => 0,
        }
    }

    /// Symmetry sector the ansatz preserves, if the model declares one.
    pub fn sector(&self) -> Option<Vec<usize>> {
        match *self {
            ModelSpec::Hubbard { sites, .. } => Some(sector_basis(sites, sites / 2, sites / 2).expect("valid sector")),
            _ => None,
        }
    }
}

/// Transverse-field Ising `-J sum_<ij> Z_i Z_j - h sum_i X_i`, each bond once.
pub fn tfim(spec: &ModelSpec) -> Result<PauliSum> {
    let (n, bonds, j, h) = match *spec {
        ModelSpec::Tfim1d { n, j, h, boundary } => {
            let bonds = match boundary {
                Boundary::Periodic => lattice_bonds(Lattice::Ring(n)),
                Boundary::Open => (0..n - 1).map(|i| (i, i + 1)).collect(),
            };
            (n, bonds, j, h)
        }
        ModelSpec::Tfim2d { rows, cols, j, h, boundary } => {
            let bonds = match boundary {
                Boundary::Periodic => lattice_bonds(Lattice::Torus { rows, cols }),
                Boundary::Open => {
                    let mut b = Vec::new();
                    for r in 0..rows {
                        for c in 0..cols {
                            let s = r * cols + c;
                            if c + 1 < cols {
                                b.push((s, s + 1));
                            }
                            if r + 1 < rows {
                                b.push((s, s + cols));
                            }
                        }
                    }
                    b
                }
            };
            (rows * cols, bonds, j, h)
        }
        _ => return Err(Error::InvalidArgument(format!("{} is not a TFIM family", spec.family()))),
    };
    tfim_on_bonds(n, &bonds, j, h)
}

pub fn tfim_on_bonds(n: usize, bonds: &[(usize, usize)], j: f64, h: f64) -> Result<PauliSum> {
    let mut terms = Vec::with_capacity(bonds.len() + n);
    for &(a, b) in bonds {
        terms.push((-j, PauliString::new(n, [(a, Pauli::Z), (b, Pauli::Z)])?));
    }
    for q in 0..n {
        terms.push((-h, PauliString::single(n, q, Pauli::X)?));
    }
    PauliSum::from_terms(n, terms)
}

/// `-J sum Z_i X_{i+1} Z_{i+2} - h1 sum X_i X_{i+1} - h2 sum X_i` on an open chain.
pub fn cluster_ising(n: usize, j: f64, h1: f64, h2: f64) -> Result<PauliSum> {
    if n < 3 {
        return Err(Error::InvalidArgument(format!("cluster_ising needs n >= 3, got {n}")));
    }
    let mut terms = Vec::new();
    for i in 0..n - 2 {
        terms.push((-j, PauliString::new(n, [(i, Pauli::Z), (i + 1, Pauli::X), (i + 2, Pauli::Z)])?));
    }
    for i in 0..n - 1 {
        terms.push((-h1, PauliString::new(n, [(i, Pauli::X), (i + 1, Pauli::X)])?));
    }
    for i in 0..n {
        terms.push((-h2, PauliString::single(n, i, Pauli::X)?));
    }
    PauliSum::from_terms(n, terms)
}

/// Qubit form of the open Hubbard chain:
/// `-t/2 sum (XX + YY)` on neighbouring qubits of each spin register plus
/// `U/4 sum Z_i Z_{i+N}`.
pub fn hubbard_jw(sites: usize, t: f64, u: f64) -> Result<PauliSum> {
    if sites < 2 {
        return Err(Error::InvalidArgument(format!("hubbard needs at least 2 sites, got {sites}")));
    }
    let n = 2 * sites;
    let mut terms = Vec::new();
    for offset in [0, sites] {
        for i in 0..sites - 1 {
            let (a, b) = (offset + i, offset + i + 1);
            terms.push((-t / 2.0, PauliString::new(n, [(a, Pauli::X), (b, Pauli::X)])?));
            terms.push((-t / 2.0, PauliString::new(n, [(a, Pauli::Y), (b, Pauli::Y)])?));
        }
    }
    for i in 0..sites {
        terms.push((u / 4.0, PauliString::new(n, [(i, Pauli::Z), (i + sites, Pauli::Z)])?));
    }
    PauliSum::from_terms(n, terms)
}

/// Creation or annihilation operator on a fermionic mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Ladder {
    Create(usize),
    Annihilate(usize),
}

/// A weighted product of ladder operators, applied right to left as written.
pub type FermionTerm = (Complex64, Vec<Ladder>);

/// Pauli strings in `X^x Z^z` normal form with complex weights.
type XzPoly = BTreeMap<(usize, usize), Complex64>;

fn xz_mul(a: &XzPoly, b: &XzPoly) -> XzPoly {
    let mut out = XzPoly::new();
    for (&(x1, z1), c1) in a {
        for (&(x2, z2), c2) in b {
            // Z^{z1} X^{x2} = (-1)^{|z1 & x2|} X^{x2} Z^{z1}
            let sign = if (z1 & x2).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
            *out.entry((x1 ^ x2, z1 ^ z2)).or_insert(Complex64::new(0.0, 0.0)) += c1 * c2 * sign;
        }
    }
    out
}

fn ladder_poly(op: Ladder) -> XzPoly {
    // c_i^dag = Z_{<i} (X_i - i Y_i)/2 and Y = i X Z, so
    // c_i^dag = (X_i Z_{<i} + X_i Z_{<=i}) / 2 and c_i flips the second sign.
    let (mode, sign) = match op {
        Ladder::Create(m) => (m, 1.0),
        Ladder::Annihilate(m) => (m, -1.0),
    };
    let below = (1usize << mode) - 1;
    let bit = 1usize << mode;
    let mut p = XzPoly::new();
    p.insert((bit, below), Complex64::new(0.5, 0.0));
    p.insert((bit, below | bit), Complex64::new(0.5 * sign, 0.0));
    p
}

/// Jordan-Wigner image of a sum of fermionic monomials. Modes are qubits.
/// The result must be Hermitian; a term whose Pauli weight keeps an
/// imaginary part above `1e-12` is rejected.
pub fn jw_map(terms: &[FermionTerm], n_modes: usize) -> Result<PauliSum> {
    let mut total = XzPoly::new();
    for (coeff, ops) in terms {
        let mut poly = XzPoly::new();
        poly.insert((0, 0), *coeff);
        for &op in ops {
            let (Ladder::Create(m) | Ladder::Annihilate(m)) = op;
            if m >= n_modes {
                return Err(Error::IndexOutOfRange { index: m, n_qubits: n_modes });
            }
            poly = xz_mul(&poly, &ladder_poly(op));
        }
        for (k, c) in poly {
            *total.entry(k).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
    }
    let mut out = Vec::new();
    for ((x, z), c) in total {
        // X^x Z^z = (-i)^{|x & z|} * (Pauli string with Y where both bits are set)
        let weight = c * i_power(3 * (x & z).count_ones());
        if weight.norm() < 1e-15 {
            continue;
        }
        if weight.im.abs() > 1e-12 {
            return Err(Error::InvalidArgument("fermionic operator is not Hermitian".into()));
        }
        let letters = (0..n_modes).filter_map(|q| {
            let (xb, zb) = (x >> q & 1 == 1, z >> q & 1 == 1);
            match (xb, zb) {
                (true, true) => Some((q, Pauli::Y)),
                (true, false) => Some((q, Pauli::X)),
                (false, true) => Some((q, Pauli::Z)),
                (false, false) => None,
            }
        });
        out.push((weight.re, PauliString::new(n_modes, letters)?));
    }
    PauliSum::from_terms(n_modes, out)
}

/// The Hubbard chain in second quantization, mapped through [`jw_map`]:
/// `-t sum (c^dag_i c_{i+1} + h.c.) + U sum (n_up - 1/2)(n_down - 1/2)`.
pub fn hubbard_fermionic(sites: usize, t: f64, u: f64) -> Result<PauliSum> {
    use Ladder::{Annihilate as A, Create as C};
    let c = |x: f64| Complex64::new(x, 0.0);
    let mut terms: Vec<FermionTerm> = Vec::new();
    for offset in [0, sites] {
        for i in 0..sites - 1 {
            let (a, b) = (offset + i, offset + i + 1);
            terms.push((c(-t), vec![C(a), A(b)]));
            terms.push((c(-t), vec![C(b), A(a)]));
        }
    }
    for i in 0..sites {
        let (up, down) = (i, i + sites);
        terms.push((c(u), vec![C(up), A(up), C(down), A(down)]));
        terms.push((c(-u / 2.0), vec![C(up), A(up)]));
        terms.push((c(-u / 2.0), vec![C(down), A(down)]));
        terms.push((c(u / 4.0), vec![]));
    }
    jw_map(&terms, 2 * sites)
}

/// Basis index with `n_up` spin-up fermions on the leftmost sites and
/// `n_down` spin-down fermions on the rightmost sites.
pub fn hubbard_reference(sites: usize, n_up: usize, n_down: usize) -> usize {
    let up = (1usize << n_up) - 1;
    let down = ((1usize << n_down) - 1) << (sites - n_down);
    up | (down << sites)
}

/// All basis indices with `n_up` ones in the spin-up register (qubits
/// `0..sites`) and `n_down` ones in the spin-down register, ascending.
pub fn sector_basis(sites: usize, n_up: usize, n_down: usize) -> Result<Vec<usize>> {
    if n_up > sites || n_down > sites {
        return Err(Error::InvalidArgument(format!(
            "sector ({n_up}, {n_down}) does not fit on {sites} sites"
        )));
    }
    let up_mask = (1usize << sites) - 1;
    Ok((0..1usize << (2 * sites))
        .filter(|&i| (i & up_mask).count_ones() as usize == n_up && (i >> sites).count_ones() as usize == n_down)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn coeff_of(h: &PauliSum, text: &str) -> Option<f64> {
        h.terms().iter().find(|(_, s)| s.to_string() == text).map(|(c, _)| *c)
    }

    #[test]
    fn two_site_ring_is_one_bond() {
        let h = tfim(&ModelSpec::Tfim1d { n: 2, j: 1.0, h: 0.0, boundary: Boundary::Periodic }).unwrap();
        assert_eq!(h.len(), 1);
        assert_eq!(coeff_of(&h, "Z0 Z1"), Some(-1.0));
    }

    #[test]
    fn antiferro_ring_signs() {
        let h = tfim(&ModelSpec::Tfim1d { n: 4, j: -1.0, h: -1.2, boundary: Boundary::Periodic }).unwrap();
        assert_eq!(h.len(), 8);
        let zz: Vec<f64> = h.terms().iter().filter(|(_, s)| s.weight() == 2).map(|(c, _)| *c).collect();
        assert_eq!(zz, vec![1.0; 4]);
        assert_eq!(coeff_of(&h, "X3"), Some(1.2));
        assert_eq!(coeff_of(&h, "Z0 Z3"), Some(1.0));
    }

    #[test]
    fn torus_term_counts() {
        let h = tfim(&ModelSpec::Tfim2d { rows: 3, cols: 4, j: 1.0, h: 1.0, boundary: Boundary::Periodic }).unwrap();
        let zz = h.terms().iter().filter(|(_, s)| s.weight() == 2).count();
        assert_eq!((zz, h.len() - zz), (24, 12));
    }

    #[test]
    fn cluster_term_counts() {
        let h = cluster_ising(12, 1.0, 0.1, 0.1).unwrap();
        assert_eq!(h.len(), 33);
        let single = cluster_ising(3, 1.0, 0.0, 0.0).unwrap();
        assert_eq!(single.len(), 1);
        assert_eq!(coeff_of(&single, "Z0 X1 Z2"), Some(-1.0));
    }

    #[test]
    fn hubbard_term_counts() {
        let h = hubbard_jw(4, 1.0, 2.0).unwrap();
        let hopping = h.terms().iter().filter(|(_, s)| !s.to_string().contains('Z')).count();
        assert_eq!((hopping, h.len() - hopping), (12, 4));
        assert_eq!(coeff_of(&h, "Z1 Z5"), Some(0.5));
        assert_eq!(coeff_of(&h, "Y6 Y7"), Some(-0.5));
        assert!(h.is_real());
    }

    #[test]
    fn number_operator_maps_to_half_identity_minus_z() {
        let n0 = jw_map(&[(Complex64::new(1.0, 0.0), vec![Ladder::Create(0), Ladder::Annihilate(0)])], 2).unwrap();
        assert_eq!(n0.to_text(), "0.5 I\n-0.5 Z0\n");
    }

    #[test]
    fn hopping_maps_to_xx_plus_yy() {
        let one = Complex64::new(1.0, 0.0);
        let hop = jw_map(
            &[
                (one, vec![Ladder::Create(0), Ladder::Annihilate(1)]),
                (one, vec![Ladder::Create(1), Ladder::Annihilate(0)]),
            ],
            2,
        )
        .unwrap();
        assert_eq!(hop.to_text(), "0.5 X0 X1\n0.5 Y0 Y1\n");
    }

    #[test]
    fn non_hermitian_monomial_is_rejected() {
        let one = Complex64::new(1.0, 0.0);
        assert!(jw_map(&[(one, vec![Ladder::Create(0), Ladder::Annihilate(1)])], 2).is_err());
    }

    #[test]
    fn second_quantized_hubbard_matches_qubit_form() {
        for (sites, t, u) in [(2, 1.0, 0.0), (3, 1.0, 5.0), (4, 0.7, 2.0)] {
            assert_eq!(hubbard_fermionic(sites, t, u).unwrap(), hubbard_jw(sites, t, u).unwrap());
        }
    }

    #[test]
    fn sectors() {
        assert_eq!(sector_basis(2, 1, 1).unwrap().len(), 4);
        let s = sector_basis(4, 2, 2).unwrap();
        assert_eq!(s.len(), 36);
        assert!(s.contains(&0b1100_0011));
        assert_eq!(hubbard_reference(4, 2, 2), 195);
        assert!(sector_basis(2, 3, 0).is_err());
    }

    #[test]
    fn model_spec_dispatch() {
        let m = ModelSpec::Hubbard { sites: 4, t: 1.0, u: 2.0 };
        assert_eq!(m.n_qubits(), 8);
        assert_eq!(m.reference_index(), 195);
        assert_eq!(m.sector().unwrap().len(), 36);
        assert!(ModelSpec::ClusterIsing { n: 2, j: 1.0, h1: 0.0, h2: 0.0 }.hamiltonian().is_err());
    }
}
