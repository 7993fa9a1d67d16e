//! Pauli strings and real-weighted sums of them.
//!
//! A basis index is read as a bitstring with qubit 0 as the least-significant
//! bit. A Pauli string acts on basis states through three masks:
//! `P|i> = i^{n_y} (-1)^{popcount(i & z)} |i ^ x>`, where `x` marks X/Y
//! letters, `z` marks Z/Y letters and `n_y` counts Y letters.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::statevector::Statevector;

/// Largest register for which a dense `2^n x 2^n` matrix is built.
pub const MAX_DENSE_QUBITS: usize = 14;

/// Coefficients below this magnitude are dropped when a sum is built.
pub const DROP_TOLERANCE: f64 = 1e-15;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn letter(self) -> char {
        match self {
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_letter(c: char) -> Option<Self> {
        match c {
            'X' | 'x' => Some(Pauli::X),
            'Y' | 'y' => Some(Pauli::Y),
            'Z' | 'z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

/// Bit-mask form of a Pauli string, used by every hot loop in the crate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct PauliMask {
    pub x: usize,
    pub z: usize,
    pub n_y: u32,
}

impl PauliMask {
    pub fn x(qubit: usize) -> Self {
        Self { x: 1 << qubit, z: 0, n_y: 0 }
    }

    pub fn y(qubit: usize) -> Self {
        Self { x: 1 << qubit, z: 1 << qubit, n_y: 1 }
    }

    pub fn z(qubit: usize) -> Self {
        Self { x: 0, z: 1 << qubit, n_y: 0 }
    }

    /// Tensor product of masks acting on disjoint qubits.
    pub fn combine(self, other: Self) -> Self {
        debug_assert_eq!((self.x | self.z) & (other.x | other.z), 0);
        Self { x: self.x | other.x, z: self.z | other.z, n_y: self.n_y + other.n_y }
    }

    /// Phase picked up by basis state `index`: `P|index> = phase * |index ^ x>`.
    #[inline]
    pub fn phase(&self, index: usize) -> Complex64 {
        let sign = if (index & self.z).count_ones() & 1 == 1 { -1.0 } else { 1.0 };
        i_power(self.n_y) * sign
    }

    #[inline]
    pub fn sign(&self, index: usize) -> f64 {
        if (index & self.z).count_ones() & 1 == 1 {
            -1.0
        } else {
            1.0
        }
    }

    pub fn is_diagonal(&self) -> bool {
        self.x == 0
    }

    /// `<psi|P|psi>` over raw amplitudes. The imaginary residue is discarded.
    pub fn expectation(&self, amps: &[Complex64]) -> f64 {
        if self.x == 0 {
            return amps.iter().enumerate().map(|(i, a)| self.sign(i) * a.norm_sqr()).sum();
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, a) in amps.iter().enumerate() {
            acc += amps[i ^ self.x].conj() * a * self.sign(i);
        }
        (acc * i_power(self.n_y)).re
    }
}

#[inline]
pub(crate) fn i_power(k: u32) -> Complex64 {
    match k & 3 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// A tensor product of single-qubit Paulis; absent qubits carry the identity.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PauliString {
    n_qubits: usize,
    letters: BTreeMap<usize, Pauli>,
}

impl PauliString {
    pub fn identity(n_qubits: usize) -> Self {
        Self { n_qubits, letters: BTreeMap::new() }
    }

    pub fn new<I>(n_qubits: usize, letters: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, Pauli)>,
    {
        if n_qubits == 0 {
            return Err(Error::InvalidArgument("a Pauli string needs at least one qubit".into()));
        }
        let mut map = BTreeMap::new();
        for (q, p) in letters {
            if q >= n_qubits {
                return Err(Error::IndexOutOfRange { index: q, n_qubits });
            }
            if map.insert(q, p).is_some() {
                return Err(Error::InvalidArgument(format!("qubit {q} appears twice in a Pauli string")));
            }
        }
        Ok(Self { n_qubits, letters: map })
    }

    pub fn single(n_qubits: usize, qubit: usize, pauli: Pauli) -> Result<Self> {
        Self::new(n_qubits, [(qubit, pauli)])
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn letters(&self) -> impl Iterator<Item = (usize, Pauli)> + '_ {
        self.letters.iter().map(|(&q, &p)| (q, p))
    }

    pub fn weight(&self) -> usize {
        self.letters.len()
    }

    pub fn is_identity(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn mask(&self) -> PauliMask {
        self.letters.iter().fold(PauliMask::default(), |m, (&q, &p)| {
            m.combine(match p {
                Pauli::X => PauliMask::x(q),
                Pauli::Y => PauliMask::y(q),
                Pauli::Z => PauliMask::z(q),
            })
        })
    }

    /// Real iff the string holds an even number of Y letters.
    pub fn is_real(&self) -> bool {
        self.mask().n_y % 2 == 0
    }

    fn key(&self) -> (Vec<usize>, Vec<Pauli>) {
        (self.letters.keys().copied().collect(), self.letters.values().copied().collect())
    }
}

impl Ord for PauliString {
    fn cmp(&self, other: &Self) -> Ordering {
        self.n_qubits.cmp(&other.n_qubits).then_with(|| self.key().cmp(&other.key()))
    }
}

impl PartialOrd for PauliString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "I");
        }
        let mut first = true;
        for (q, p) in self.letters() {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{}{}", p.letter(), q)?;
            first = false;
        }
        Ok(())
    }
}

/// A Hermitian observable `sum_k c_k P_k` with real coefficients, kept in
/// canonical order with duplicate strings merged.
#[derive(Clone, Debug, PartialEq)]
pub struct PauliSum {
    n_qubits: usize,
    terms: Vec<(f64, PauliString)>,
}

impl PauliSum {
    pub fn zero(n_qubits: usize) -> Self {
        Self { n_qubits, terms: Vec::new() }
    }

    pub fn from_terms<I>(n_qubits: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, PauliString)>,
    {
        let mut merged: BTreeMap<PauliString, f64> = BTreeMap::new();
        for (c, s) in terms {
            if s.n_qubits != n_qubits {
                return Err(Error::DimensionMismatch { expected: n_qubits, found: s.n_qubits });
            }
            if !c.is_finite() {
                return Err(Error::InvalidArgument(format!("non-finite coefficient on {s}")));
            }
            *merged.entry(s).or_insert(0.0) += c;
        }
        let terms = merged
            .into_iter()
            .filter(|(_, c)| c.abs() >= DROP_TOLERANCE)
            .map(|(s, c)| (c, s))
            .collect();
        Ok(Self { n_qubits, terms })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn terms(&self) -> &[(f64, PauliString)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `sum |c_k|`, an upper bound on the spectral radius.
    pub fn coefficient_l1(&self) -> f64 {
        self.terms.iter().map(|(c, _)| c.abs()).sum()
    }

    pub fn is_real(&self) -> bool {
        self.terms.iter().all(|(_, s)| s.is_real())
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::from_terms(self.n_qubits, self.terms.iter().map(|(c, s)| (c * factor, s.clone())))
            .expect("scaling keeps the register size")
    }

    pub fn plus(&self, other: &Self) -> Result<Self> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::DimensionMismatch { expected: self.n_qubits, found: other.n_qubits });
        }
        Self::from_terms(self.n_qubits, self.terms.iter().chain(other.terms.iter()).cloned())
    }

    /// Exact `<psi|H|psi>`.
    pub fn expectation(&self, state: &Statevector) -> Result<f64> {
        if state.n_qubits() != self.n_qubits {
            return Err(Error::DimensionMismatch { expected: self.n_qubits, found: state.n_qubits() });
        }
        Ok(self.expectation_amplitudes(state.amplitudes()))
    }

    pub(crate) fn expectation_amplitudes(&self, amps: &[Complex64]) -> f64 {
        self.terms.iter().map(|(c, s)| c * s.mask().expectation(amps)).sum()
    }

    /// `H|psi>` as a fresh amplitude vector.
    pub(crate) fn apply_amplitudes(&self, amps: &[Complex64]) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); amps.len()];
        for (c, s) in &self.terms {
            let m = s.mask();
            let ph = i_power(m.n_y) * *c;
            for (i, a) in amps.iter().enumerate() {
                out[i ^ m.x] += ph * m.sign(i) * a;
            }
        }
        out
    }

    fn check_dense(&self) -> Result<usize> {
        if self.n_qubits > MAX_DENSE_QUBITS {
            return Err(Error::TooManyQubits { n: self.n_qubits, max: MAX_DENSE_QUBITS });
        }
        Ok(1usize << self.n_qubits)
    }

    /// Dense Hermitian matrix `sum_k c_k P_k`.
    pub fn to_dense_matrix(&self) -> Result<Array2<Complex64>> {
        let dim = self.check_dense()?;
        let mut m = Array2::<Complex64>::zeros((dim, dim));
        for (c, s) in &self.terms {
            let mask = s.mask();
            for i in 0..dim {
                m[[i ^ mask.x, i]] += mask.phase(i) * *c;
            }
        }
        Ok(m)
    }

    /// Dense real symmetric matrix, available when every term is real.
    pub fn to_dense_real(&self) -> Result<Option<Array2<f64>>> {
        if !self.is_real() {
            return Ok(None);
        }
        let dim = self.check_dense()?;
        let mut m = Array2::<f64>::zeros((dim, dim));
        for (c, s) in &self.terms {
            let mask = s.mask();
            let sign_y = if mask.n_y % 4 == 2 { -1.0 } else { 1.0 };
            for i in 0..dim {
                m[[i ^ mask.x, i]] += sign_y * mask.sign(i) * c;
            }
        }
        Ok(Some(m))
    }

    /// Dense real matrix restricted to the listed basis indices (rows and
    /// columns in the order given). Terms that leave the subspace are dropped,
    /// so the caller is responsible for passing an invariant subspace.
    pub fn to_dense_real_restricted(&self, indices: &[usize]) -> Result<Array2<f64>> {
        if !self.is_real() {
            return Err(Error::InvalidArgument("restricted dense form needs real terms".into()));
        }
        let position: std::collections::HashMap<usize, usize> =
            indices.iter().enumerate().map(|(k, &i)| (i, k)).collect();
        let d = indices.len();
        let mut m = Array2::<f64>::zeros((d, d));
        for (c, s) in &self.terms {
            let mask = s.mask();
            let sign_y = if mask.n_y % 4 == 2 { -1.0 } else { 1.0 };
            for (col, &i) in indices.iter().enumerate() {
                if let Some(&row) = position.get(&(i ^ mask.x)) {
                    m[[row, col]] += sign_y * mask.sign(i) * c;
                }
            }
        }
        Ok(m)
    }

    /// One term per line: `<coeff> <letter><index> ...`, identity as `<coeff> I`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (c, s) in &self.terms {
            out.push_str(&format!("{c:?} {s}\n"));
        }
        out
    }

    /// Parses the text form produced by [`PauliSum::to_text`]. Blank lines and
    /// lines starting with `#` are skipped.
    pub fn from_text(text: &str, n_qubits: usize) -> Result<Self> {
        let mut terms = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parse_err = |message: String| Error::Parse { line: lineno + 1, message };
            let mut tokens = line.split_whitespace();
            let coeff: f64 = tokens
                .next()
                .unwrap()
                .parse()
                .map_err(|e| parse_err(format!("bad coefficient: {e}")))?;
            let mut letters = Vec::new();
            for tok in tokens {
                if tok == "I" {
                    continue;
                }
                let mut chars = tok.chars();
                let letter = chars.next().and_then(Pauli::from_letter).ok_or_else(|| parse_err(format!("bad letter in `{tok}`")))?;
                let q: usize = chars
                    .as_str()
                    .parse()
                    .map_err(|_| parse_err(format!("bad qubit index in `{tok}`")))?;
                letters.push((q, letter));
            }
            let s = PauliString::new(n_qubits, letters).map_err(|e| parse_err(e.to_string()))?;
            terms.push((coeff, s));
        }
        Self::from_terms(n_qubits, terms)
    }
}

/// `<psi|H|psi>`; errors when the register sizes differ.
pub fn expectation(state: &Statevector, h: &PauliSum) -> Result<f64> {
    h.expectation(state)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zz(n: usize, a: usize, b: usize) -> PauliString {
        PauliString::new(n, [(a, Pauli::Z), (b, Pauli::Z)]).unwrap()
    }

    #[test]
    fn single_qubit_dense_forms() {
        let x = PauliSum::from_terms(1, [(1.0, PauliString::single(1, 0, Pauli::X).unwrap())]).unwrap();
        let m = x.to_dense_matrix().unwrap();
        assert_eq!(m[[0, 1]], Complex64::new(1.0, 0.0));
        assert_eq!(m[[1, 0]], Complex64::new(1.0, 0.0));
        assert_eq!(m[[0, 0]], Complex64::new(0.0, 0.0));

        let y = PauliSum::from_terms(1, [(1.0, PauliString::single(1, 0, Pauli::Y).unwrap())]).unwrap();
        let m = y.to_dense_matrix().unwrap();
        assert_eq!(m[[0, 1]], Complex64::new(0.0, -1.0));
        assert_eq!(m[[1, 0]], Complex64::new(0.0, 1.0));
        assert!(y.to_dense_real().unwrap().is_none());
    }

    #[test]
    fn zz_is_diagonal_plus_minus() {
        let h = PauliSum::from_terms(2, [(1.0, zz(2, 0, 1))]).unwrap();
        let m = h.to_dense_real().unwrap().unwrap();
        let diag: Vec<f64> = (0..4).map(|i| m[[i, i]]).collect();
        assert_eq!(diag, vec![1.0, -1.0, -1.0, 1.0]);
    }

    #[test]
    fn yy_real_form_matches_complex_form() {
        let yy = PauliString::new(2, [(0, Pauli::Y), (1, Pauli::Y)]).unwrap();
        let h = PauliSum::from_terms(2, [(0.7, yy)]).unwrap();
        let c = h.to_dense_matrix().unwrap();
        let r = h.to_dense_real().unwrap().unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert!((c[[i, j]].re - r[[i, j]]).abs() < 1e-15);
                assert!(c[[i, j]].im.abs() < 1e-15);
            }
        }
        // Y⊗Y maps |00> to -|11>
        assert_eq!(r[[3, 0]], -0.7);
    }

    #[test]
    fn duplicates_merge_and_tiny_terms_drop() {
        let h = PauliSum::from_terms(
            2,
            [
                (0.5, zz(2, 0, 1)),
                (0.25, zz(2, 0, 1)),
                (1e-17, PauliString::single(2, 0, Pauli::X).unwrap()),
            ],
        )
        .unwrap();
        assert_eq!(h.len(), 1);
        assert_eq!(h.terms()[0].0, 0.75);
    }

    #[test]
    fn canonical_order_is_by_indices_then_letters() {
        let n = 3;
        let h = PauliSum::from_terms(
            n,
            [
                (1.0, PauliString::single(n, 1, Pauli::X).unwrap()),
                (1.0, zz(n, 0, 1)),
                (1.0, PauliString::single(n, 0, Pauli::Z).unwrap()),
                (1.0, PauliString::single(n, 0, Pauli::X).unwrap()),
                (1.0, PauliString::identity(n)),
            ],
        )
        .unwrap();
        let text = h.to_text();
        assert_eq!(text, "1.0 I\n1.0 X0\n1.0 Z0\n1.0 Z0 Z1\n1.0 X1\n");
    }

    #[test]
    fn text_round_trip() {
        let text = "-1.0 Z0 Z1\n0.5 X2\n2.0 I\n";
        let h = PauliSum::from_text(text, 3).unwrap();
        let again = PauliSum::from_text(&h.to_text(), 3).unwrap();
        assert_eq!(h, again);
    }

    #[test]
    fn text_errors_name_the_line() {
        let err = PauliSum::from_text("1.0 Z0\n1.0 Q1\n", 2).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = PauliSum::from_text("abc Z0\n", 2).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = PauliSum::from_text("1.0 Z5\n", 2).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
    }

    #[test]
    fn dense_guard_refuses_large_registers() {
        let h = PauliSum::from_terms(15, [(1.0, PauliString::single(15, 0, Pauli::Z).unwrap())]).unwrap();
        assert!(matches!(h.to_dense_matrix(), Err(Error::TooManyQubits { n: 15, .. })));
    }

    #[test]
    fn out_of_range_letter_is_rejected() {
        assert!(PauliString::single(2, 2, Pauli::X).is_err());
        assert!(PauliString::new(2, [(0, Pauli::X), (0, Pauli::Z)]).is_err());
    }
}
