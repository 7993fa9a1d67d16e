use log::warn;
use rand::seq::index;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::encoder::BasisSet;
use crate::error::{Error, Result};
use crate::pauli::PauliSum;
use crate::statevector::{expectation_sampled, Statevector};

/// How the energy cutoff `T_e` for candidate basis states is chosen.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum ThresholdRule {
    /// The q-th percentile (0..=100) of all candidate scores.
    Percentile(f64),
    Absolute(f64),
    /// `E_ref + delta * (E_max - E_ref)` where `E_ref` is the reference score.
    Offset(f64),
}

impl ThresholdRule {
    pub fn describe(&self) -> String {
        match self {
            ThresholdRule::Percentile(q) => format!("percentile({q})"),
            ThresholdRule::Absolute(v) => format!("absolute({v})"),
            ThresholdRule::Offset(d) => format!("offset({d})"),
        }
    }

    pub fn threshold(&self, reference_energy: f64, scores: &[f64]) -> f64 {
        match *self {
            ThresholdRule::Absolute(v) => v,
            ThresholdRule::Offset(delta) => {
                let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                reference_energy + delta * (max - reference_energy)
            }
            ThresholdRule::Percentile(q) => {
                let mut sorted = scores.to_vec();
                sorted.sort_by(f64::total_cmp);
                let pos = (q.clamp(0.0, 100.0) / 100.0) * (sorted.len() - 1) as f64;
                let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
                sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelectionConfig {
    /// Candidates sampled (`M`).
    pub samples: usize,
    /// Basis states kept, reference included (`m`).
    pub select: usize,
    pub rule: ThresholdRule,
    /// Take the lowest-energy pool members instead of a random subset.
    pub greedy: bool,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        SelectionConfig { samples: 2000, select: 6, rule: ThresholdRule::Offset(0.2), greedy: false }
    }
}

impl SelectionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.select == 0 || self.select > self.samples {
            return Err(Error::InvalidArgument(format!(
                "need 1 <= m <= M, got m={} M={}",
                self.select, self.samples
            )));
        }
        Ok(())
    }
}

/// `samples` distinct basis indices drawn uniformly from the sector (or the
/// whole space), reference first and the rest ascending. Requests larger
/// than the space are clamped with a warning.
pub fn sample_basis<R: Rng + ?Sized>(
    n_qubits: usize,
    reference: usize,
    samples: usize,
    sector: Option<&[usize]>,
    rng: &mut R,
) -> Result<Vec<usize>> {
    if samples == 0 {
        return Err(Error::InvalidArgument("must sample at least one state".into()));
    }
    let space: Vec<usize> = match sector {
        Some(s) => s.iter().copied().filter(|&i| i != reference).collect(),
        None => (0..1usize << n_qubits).filter(|&i| i != reference).collect(),
    };
    if reference >> n_qubits != 0 || sector.is_some_and(|s| !s.contains(&reference)) {
        return Err(Error::InvalidArgument(format!("reference {reference} lies outside the sampling space")));
    }
    let mut take = samples - 1;
    if take > space.len() {
        warn!("requested {samples} samples but the space holds {}; using all of it", space.len() + 1);
        take = space.len();
    }
    let mut others: Vec<usize> = index::sample(rng, space.len(), take).into_iter().map(|k| space[k]).collect();
    others.sort_unstable();
    let mut out = Vec::with_capacity(take + 1);
    out.push(reference);
    out.extend(others);
    Ok(out)
}

/// `<j| U(theta)^dag H U(theta) |j>` for every candidate `j`, exact unless
/// `shots` is given.
pub fn score_basis<R: Rng + ?Sized>(
    u: &Circuit,
    theta: &[f64],
    h: &PauliSum,
    states: &[usize],
    shots: Option<u64>,
    rng: &mut R,
) -> Result<Vec<f64>> {
    states
        .iter()
        .map(|&j| {
            let mut s = Statevector::basis(u.n_qubits(), j)?;
            s.apply_circuit(u, theta)?;
            match shots {
                Some(n) => expectation_sampled(&s, h, n, rng),
                None => h.expectation(&s),
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Selection {
    pub basis: BasisSet,
    pub threshold: f64,
    pub pool_size: usize,
    pub fallback: bool,
}

/// Keep the reference and choose `m - 1` further candidates from those
/// scoring below the threshold. When the pool is too small the lowest
/// scores fill the gap and `fallback` is set.
pub fn select_states<R: Rng + ?Sized>(
    n_qubits: usize,
    candidates: &[usize],
    scores: &[f64],
    reference: usize,
    cfg: &SelectionConfig,
    rng: &mut R,
) -> Result<Selection> {
    if candidates.len() != scores.len() {
        return Err(Error::InvalidArgument("one score per candidate required".into()));
    }
    let ref_pos = candidates
        .iter()
        .position(|&c| c == reference)
        .ok_or_else(|| Error::InvalidArgument("reference is not among the candidates".into()))?;
    if cfg.select == 0 || cfg.select > candidates.len() {
        return Err(Error::InvalidArgument(format!(
            "cannot select {} states from {} candidates",
            cfg.select,
            candidates.len()
        )));
    }
    let threshold = cfg.rule.threshold(scores[ref_pos], scores);
    let need = cfg.select - 1;
    let others: Vec<usize> = (0..candidates.len()).filter(|&k| k != ref_pos).collect();
    let pool: Vec<usize> = others.iter().copied().filter(|&k| scores[k] < threshold).collect();
    let by_score = |ks: &mut Vec<usize>| ks.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]).then(candidates[a].cmp(&candidates[b])));

    let fallback = pool.len() < need;
    let chosen: Vec<usize> = if !fallback {
        if cfg.greedy {
            let mut p = pool.clone();
            by_score(&mut p);
            p.truncate(need);
            p
        } else {
            index::sample(rng, pool.len(), need).into_iter().map(|i| pool[i]).collect()
        }
    } else {
        warn!(
            "only {} candidates below the threshold {threshold:.6}; filling with the lowest scores",
            pool.len()
        );
        let mut rest: Vec<usize> = others.iter().copied().filter(|k| !pool.contains(k)).collect();
        by_score(&mut rest);
        pool.iter().copied().chain(rest).take(need).collect()
    };
    let mut members: Vec<usize> = chosen.iter().map(|&k| candidates[k]).collect();
    members.sort_unstable();
    members.insert(0, reference);
    Ok(Selection { basis: BasisSet::new(n_qubits, members, reference)?, threshold, pool_size: pool.len(), fallback })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::sector_basis;
    use crate::pauli::{Pauli, PauliString};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn full_space_sampling() {
        assert_eq!(sample_basis(2, 0, 4, None, &mut rng(1)).unwrap(), vec![0, 1, 2, 3]);
        let s = sample_basis(12, 0, 2000, None, &mut rng(1)).unwrap();
        assert_eq!(s.len(), 2000);
        assert_eq!(s[0], 0);
        assert!(s.windows(2).skip(1).all(|w| w[0] < w[1]));
    }

    #[test]
    fn sector_sampling_clamps() {
        let sector = sector_basis(4, 2, 2).unwrap();
        let all = sample_basis(8, 195, 36, Some(&sector), &mut rng(2)).unwrap();
        assert_eq!(all.len(), 36);
        let clamped = sample_basis(8, 195, 70, Some(&sector), &mut rng(2)).unwrap();
        assert_eq!(clamped.len(), 36);
        assert!(sample_basis(8, 0, 5, Some(&sector), &mut rng(2)).is_err());
    }

    #[test]
    fn diagonal_scores() {
        let h = PauliSum::from_terms(2, [(0.5, PauliString::single(2, 0, Pauli::Z).unwrap())]).unwrap();
        let scores = score_basis(&Circuit::new(2), &[], &h, &[0, 1, 2, 3], None, &mut rng(0)).unwrap();
        assert_eq!(scores, vec![0.5, -0.5, 0.5, -0.5]);
    }

    #[test]
    fn fallback_when_pool_empty() {
        let cfg = SelectionConfig { samples: 5, select: 3, rule: ThresholdRule::Absolute(-10.0), greedy: false };
        let sel = select_states(3, &[0, 1, 2, 3, 4], &[0.0, 0.3, 0.1, 0.2, 0.5], 0, &cfg, &mut rng(3)).unwrap();
        assert!(sel.fallback);
        assert_eq!(sel.basis.members(), &[0, 2, 3]);
    }

    #[test]
    fn exact_pool_is_rng_independent() {
        let cfg = SelectionConfig { samples: 5, select: 3, rule: ThresholdRule::Absolute(0.15), greedy: false };
        let scores = [0.0, 0.3, 0.1, 0.12, 0.5];
        let a = select_states(3, &[0, 1, 2, 3, 4], &scores, 0, &cfg, &mut rng(4)).unwrap();
        let b = select_states(3, &[0, 1, 2, 3, 4], &scores, 0, &cfg, &mut rng(5)).unwrap();
        assert!(!a.fallback);
        assert_eq!(a.basis, b.basis);
        assert_eq!(a.basis.members(), &[0, 2, 3]);
    }

    #[test]
    fn random_choice_from_pool() {
        let cfg = SelectionConfig { samples: 10, select: 2, rule: ThresholdRule::Absolute(0.5), greedy: false };
        let cands: Vec<usize> = (0..10).collect();
        let scores: Vec<f64> = (0..10).map(|k| k as f64 * 0.1).collect();
        let picks: std::collections::BTreeSet<usize> = (0..40)
            .map(|s| select_states(4, &cands, &scores, 0, &cfg, &mut rng(s)).unwrap().basis.members()[1])
            .collect();
        assert!(picks.len() > 1);
        assert!(picks.iter().all(|&p| (1..5).contains(&p)));
        let greedy = SelectionConfig { greedy: true, ..cfg };
        assert_eq!(select_states(4, &cands, &scores, 0, &greedy, &mut rng(0)).unwrap().basis.members(), &[0, 1]);
    }

    #[test]
    fn threshold_rules() {
        let s = [0.0, 1.0, 2.0, 3.0, 4.0];
        assert_eq!(ThresholdRule::Offset(0.25).threshold(0.0, &s), 1.0);
        assert_eq!(ThresholdRule::Percentile(50.0).threshold(0.0, &s), 2.0);
        assert_eq!(ThresholdRule::Percentile(10.0).threshold(0.0, &s), 0.4);
        assert_eq!(ThresholdRule::Absolute(-1.0).threshold(0.0, &s), -1.0);
    }
}
