//! Hardware-efficient and Hamiltonian-variational ansatz builders.
//!
//! Bond groups follow 1-based labelling: bond `(i, i+1)` is "odd" when `i` is
//! odd, i.e. 0-based bonds `(0,1), (2,3), ...`. HVA layers share one slot per
//! commuting group.

use serde::{Deserialize, Serialize};

use crate::circuit::{Angle, Circuit, Gate, GateKind};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Entangler {
    Ring,
    Chain,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Lattice {
    Ring(usize),
    Torus { rows: usize, cols: usize },
}

impl Lattice {
    pub fn n_qubits(&self) -> usize {
        match *self {
            Lattice::Ring(n) => n,
            Lattice::Torus { rows, cols } => rows * cols,
        }
    }
}

/// Undirected bond list of a periodic lattice, each bond once.
pub fn lattice_bonds(lattice: Lattice) -> Vec<(usize, usize)> {
    let mut bonds = Vec::new();
    let mut add = |a: usize, b: usize| {
        let bond = (a.min(b), a.max(b));
        if a != b && !bonds.contains(&bond) {
            bonds.push(bond);
        }
    };
    match lattice {
        Lattice::Ring(n) => {
            for i in 0..n {
                add(i, (i + 1) % n);
            }
        }
        Lattice::Torus { rows, cols } => {
            for r in 0..rows {
                for c in 0..cols {
                    let site = r * cols + c;
                    add(site, r * cols + (c + 1) % cols);
                    add(site, ((r + 1) % rows) * cols + c);
                }
            }
        }
    }
    bonds
}

/// `p` layers of RY then RZ on every qubit followed by a CZ entangler.
pub fn build_hea(n: usize, p: usize, entangler: Entangler) -> Result<Circuit> {
    if n < 2 || p < 1 {
        return Err(Error::InvalidArgument(format!("HEA needs n >= 2 and p >= 1, got n={n}, p={p}")));
    }
    let pairs: Vec<(usize, usize)> = match entangler {
        Entangler::Chain => (0..n - 1).map(|i| (i, i + 1)).collect(),
        Entangler::Ring if n == 2 => vec![(0, 1)],
        Entangler::Ring => (0..n).map(|i| (i, (i + 1) % n)).collect(),
    };
    let mut c = Circuit::new(n);
    for layer in 0..p {
        let base = layer * 2 * n;
        for q in 0..n {
            c.push(Gate::rotation(GateKind::Ry, &[q], Angle::slot(base + 2 * q)))?;
            c.push(Gate::rotation(GateKind::Rz, &[q], Angle::slot(base + 2 * q + 1)))?;
        }
        for &(a, b) in &pairs {
            c.push(Gate::fixed(GateKind::Cz, &[a, b]))?;
        }
    }
    c.set_layers(p);
    Ok(c)
}

fn hadamard_layer(c: &mut Circuit) -> Result<()> {
    for q in 0..c.n_qubits() {
        c.push(Gate::fixed(GateKind::H, &[q]))?;
    }
    Ok(())
}

/// Splits bonds into the two commuting groups used by the TFIM HVA.
fn tfim_bond_groups(lattice: Lattice) -> (Vec<(usize, usize)>, Vec<(usize, usize)>) {
    match lattice {
        Lattice::Ring(n) => {
            let odd = (0..n).step_by(2).map(|i| (i, (i + 1) % n)).collect();
            let even = (1..n).step_by(2).map(|i| (i, (i + 1) % n)).collect();
            (odd, even)
        }
        Lattice::Torus { rows, cols } => {
            // Parity colouring per direction; same-parity bonds of both
            // directions share a group.
            let mut odd = Vec::new();
            let mut even = Vec::new();
            let mut seen = Vec::new();
            let mut place = |a: usize, b: usize, first: bool| {
                let key = (a.min(b), a.max(b));
                if a == b || seen.contains(&key) {
                    return;
                }
                seen.push(key);
                if first {
                    odd.push((a, b));
                } else {
                    even.push((a, b));
                }
            };
            for r in 0..rows {
                for c in 0..cols {
                    let site = r * cols + c;
                    place(site, r * cols + (c + 1) % cols, c % 2 == 0);
                }
            }
            for r in 0..rows {
                for c in 0..cols {
                    let site = r * cols + c;
                    place(site, ((r + 1) % rows) * cols + c, r % 2 == 0);
                }
            }
            (odd, even)
        }
    }
}

/// TFIM HVA: an initial Hadamard layer, then per layer `UZZ` on the odd
/// bond group, `UZZ` on the even group and `R_x(t) = exp(-i t X)` on every
/// site, each group on its own shared slot.
pub fn build_hva_tfim(lattice: Lattice, p: usize) -> Result<Circuit> {
    if p < 1 {
        return Err(Error::InvalidArgument("HVA needs at least one layer".into()));
    }
    match lattice {
        Lattice::Ring(n) if n % 2 == 1 || n < 4 => {
            return Err(Error::InvalidArgument(format!(
                "a ring of {n} sites has no odd/even bond partition"
            )))
        }
        Lattice::Torus { rows, cols } if rows < 2 || cols < 2 => {
            return Err(Error::InvalidArgument("torus needs at least 2x2 sites".into()))
        }
        _ => {}
    }
    let n = lattice.n_qubits();
    let (odd, even) = tfim_bond_groups(lattice);
    if even.is_empty() || odd.is_empty() {
        return Err(Error::InvalidArgument("lattice leaves a bond group empty".into()));
    }
    let mut c = Circuit::new(n);
    hadamard_layer(&mut c)?;
    for layer in 0..p {
        let base = 3 * layer;
        for &(a, b) in &odd {
            c.push(Gate::rotation(GateKind::Uzz, &[a, b], Angle::slot(base)))?;
        }
        for &(a, b) in &even {
            c.push(Gate::rotation(GateKind::Uzz, &[a, b], Angle::slot(base + 1)))?;
        }
        for q in 0..n {
            c.push(Gate::rotation(GateKind::Rx, &[q], Angle::scaled(base + 2, 2.0)))?;
        }
    }
    c.set_layers(p);
    Ok(c)
}

/// Cluster-Ising HVA (open chain): Hadamard layer, then per layer `UZXZ` on
/// every triple, `UXX` on odd bonds, `UXX` on even bonds and `R_x` on every
/// site, four shared slots per layer.
pub fn build_hva_cluster(n: usize, p: usize) -> Result<Circuit> {
    if n < 3 || p < 1 {
        return Err(Error::InvalidArgument(format!("cluster HVA needs n >= 3 and p >= 1, got n={n}, p={p}")));
    }
    let mut c = Circuit::new(n);
    hadamard_layer(&mut c)?;
    for layer in 0..p {
        let base = 4 * layer;
        for i in 0..n - 2 {
            c.push(Gate::rotation(GateKind::Uzxz, &[i, i + 1, i + 2], Angle::slot(base)))?;
        }
        for i in (0..n - 1).step_by(2) {
            c.push(Gate::rotation(GateKind::Uxx, &[i, i + 1], Angle::slot(base + 1)))?;
        }
        for i in (1..n - 1).step_by(2) {
            c.push(Gate::rotation(GateKind::Uxx, &[i, i + 1], Angle::slot(base + 2)))?;
        }
        for q in 0..n {
            c.push(Gate::rotation(GateKind::Rx, &[q], Angle::scaled(base + 3, 2.0)))?;
        }
    }
    c.set_layers(p);
    Ok(c)
}

/// Fermi-Hubbard HVA on `2 * sites` qubits (spin-up register first). Per
/// layer: on-site `exp(-i (t/4) Z_i Z_{i+N})` on one slot, then `UXY` on odd
/// and on even hopping bonds of both registers. The reference bitstring is
/// supplied as the input state, not prepared here.
pub fn build_hva_hubbard(sites: usize, p: usize) -> Result<Circuit> {
    if sites < 2 || p < 1 {
        return Err(Error::InvalidArgument(format!(
            "Hubbard HVA needs sites >= 2 and p >= 1, got sites={sites}, p={p}"
        )));
    }
    let n = 2 * sites;
    let mut c = Circuit::new(n);
    for layer in 0..p {
        let base = 3 * layer;
        for i in 0..sites {
            c.push(Gate::rotation(GateKind::Uzz, &[i, i + sites], Angle::scaled(base, 0.5)))?;
        }
        for offset in [0, sites] {
            for i in (0..sites - 1).step_by(2) {
                c.push(Gate::rotation(GateKind::Uxy, &[offset + i, offset + i + 1], Angle::slot(base + 1)))?;
            }
        }
        if sites > 2 {
            for offset in [0, sites] {
                for i in (1..sites - 1).step_by(2) {
                    c.push(Gate::rotation(GateKind::Uxy, &[offset + i, offset + i + 1], Angle::slot(base + 2)))?;
                }
            }
        }
    }
    c.set_layers(p);
    if sites == 2 {
        // No even bonds exist on a two-site chain; keep the three-slot layout
        // so parameter vectors are uniform across sizes.
        c.reserve_params(3 * p);
        return Ok(c);
    }
    c.validate()?;
    Ok(c)
}

/// Native expansion of a `UZXZ` gate on `(a, b, c)`:
/// `CZ(a,b) CZ(c,b) RX(b) CZ(a,b) CZ(c,b)` with the composite's angle.
pub fn decompose_zxz(gate: &Gate) -> Result<Vec<Gate>> {
    if gate.kind != GateKind::Uzxz {
        return Err(Error::InvalidGate(format!("{} is not a ZXZ gate", gate.kind)));
    }
    let (a, b, c) = (gate.qubits[0], gate.qubits[1], gate.qubits[2]);
    let angle = gate.angle.expect("rotation gates carry an angle");
    Ok(vec![
        Gate::fixed(GateKind::Cz, &[a, b]),
        Gate::fixed(GateKind::Cz, &[c, b]),
        Gate::rotation(GateKind::Rx, &[b], angle),
        Gate::fixed(GateKind::Cz, &[a, b]),
        Gate::fixed(GateKind::Cz, &[c, b]),
    ])
}

/// `decompose_zxz` for the triple starting at `site`.
pub fn zxz_sequence(site: usize, angle: Angle) -> Vec<Gate> {
    let g = Gate::rotation(GateKind::Uzxz, &[site, site + 1, site + 2], angle);
    decompose_zxz(&g).expect("ZXZ gate")
}

/// Replaces every composite `UZXZ` by its native sequence.
pub fn expand_zxz(circuit: &Circuit) -> Result<Circuit> {
    let mut out = Circuit::new(circuit.n_qubits());
    for g in circuit.gates() {
        if g.kind == GateKind::Uzxz {
            for h in decompose_zxz(g)? {
                out.push(h)?;
            }
        } else {
            out.push(g.clone())?;
        }
    }
    out.set_layers(circuit.layers());
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::count_resources;

    fn kinds(c: &Circuit, kind: GateKind) -> usize {
        c.gates().iter().filter(|g| g.kind == kind).count()
    }

    #[test]
    fn hea_small_chain() {
        let c = build_hea(2, 1, Entangler::Chain).unwrap();
        assert_eq!(c.len(), 5);
        assert_eq!(c.n_params(), 4);
        assert_eq!(kinds(&c, GateKind::Cz), 1);
        c.validate().unwrap();
    }

    #[test]
    fn hea_twelve_qubits() {
        let one = build_hea(12, 1, Entangler::Ring).unwrap();
        assert_eq!(one.len(), 36);
        assert_eq!(one.n_params(), 24);
        let full = build_hea(12, 12, Entangler::Ring).unwrap();
        assert_eq!(count_resources(&full, true).two_qubit_gates, 144);
        assert_eq!(full.n_params(), 2 * 12 * 12);
    }

    #[test]
    fn hea_rejects_degenerate_sizes() {
        assert!(build_hea(1, 1, Entangler::Ring).is_err());
        assert!(build_hea(4, 0, Entangler::Ring).is_err());
    }

    #[test]
    fn hva_tfim_ring_of_four() {
        let c = build_hva_tfim(Lattice::Ring(4), 1).unwrap();
        assert_eq!(kinds(&c, GateKind::H), 4);
        let slot0 = c.gates().iter().filter(|g| g.kind == GateKind::Uzz && g.slot() == Some(0)).count();
        let slot1 = c.gates().iter().filter(|g| g.kind == GateKind::Uzz && g.slot() == Some(1)).count();
        assert_eq!((slot0, slot1), (2, 2));
        assert_eq!(kinds(&c, GateKind::Rx), 4);
        assert_eq!(c.n_params(), 3);
    }

    #[test]
    fn hva_tfim_torus_edges() {
        let c = build_hva_tfim(Lattice::Torus { rows: 3, cols: 4 }, 1).unwrap();
        assert_eq!(kinds(&c, GateKind::Uzz), 24);
        assert_eq!(kinds(&c, GateKind::Rx), 12);
        assert_eq!(c.n_params(), 3);
        let eight = build_hva_tfim(Lattice::Torus { rows: 3, cols: 4 }, 8).unwrap();
        assert_eq!(count_resources(&eight, true).two_qubit_gates, 192);
    }

    #[test]
    fn hva_tfim_rejects_odd_ring() {
        assert!(build_hva_tfim(Lattice::Ring(5), 1).is_err());
    }

    #[test]
    fn hva_cluster_three_sites() {
        let c = build_hva_cluster(3, 1).unwrap();
        assert_eq!(kinds(&c, GateKind::Uzxz), 1);
        let odd = c.gates().iter().filter(|g| g.kind == GateKind::Uxx && g.slot() == Some(1)).count();
        let even = c.gates().iter().filter(|g| g.kind == GateKind::Uxx && g.slot() == Some(2)).count();
        assert_eq!((odd, even), (1, 1));
        assert_eq!(kinds(&c, GateKind::Rx), 3);
        assert_eq!(c.n_params(), 4);
        c.validate().unwrap();
        assert!(build_hva_cluster(2, 1).is_err());
    }

    #[test]
    fn hva_cluster_twelve_sites_counts() {
        let one = build_hva_cluster(12, 1).unwrap();
        assert_eq!(kinds(&one, GateKind::Uzxz), 10);
        assert_eq!(kinds(&one, GateKind::Uxx), 11);
        let r = count_resources(&one, true);
        assert_eq!(r.two_qubit_gates, 62);
        let nine = build_hva_cluster(12, 9).unwrap();
        assert_eq!(count_resources(&nine, true).two_qubit_gates, 558);
    }

    #[test]
    fn hva_hubbard_counts() {
        let c = build_hva_hubbard(4, 1).unwrap();
        assert_eq!(kinds(&c, GateKind::Uzz), 4);
        let odd = c.gates().iter().filter(|g| g.kind == GateKind::Uxy && g.slot() == Some(1)).count();
        let even = c.gates().iter().filter(|g| g.kind == GateKind::Uxy && g.slot() == Some(2)).count();
        assert_eq!((odd, even), (4, 2));
        assert_eq!(c.n_params(), 3);
        let nine = build_hva_hubbard(4, 9).unwrap();
        assert_eq!(count_resources(&nine, true).two_qubit_gates, 252);
    }

    #[test]
    fn builders_are_deterministic() {
        assert_eq!(build_hea(6, 3, Entangler::Ring).unwrap(), build_hea(6, 3, Entangler::Ring).unwrap());
        assert_eq!(build_hva_cluster(7, 2).unwrap(), build_hva_cluster(7, 2).unwrap());
        assert_eq!(build_hva_hubbard(3, 2).unwrap(), build_hva_hubbard(3, 2).unwrap());
    }

    #[test]
    fn zxz_expansion_shape() {
        let seq = zxz_sequence(0, Angle::slot(0));
        assert_eq!(seq.len(), 5);
        assert_eq!(seq.iter().filter(|g| g.kind == GateKind::Cz).count(), 4);
        assert_eq!(seq[2].kind, GateKind::Rx);
        assert_eq!(seq[2].qubits, vec![1]);
    }
}
