//! Diagnostics of output states and spectra.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonians::DiagonalHamiltonian;
use crate::instances::{BasisIndex, Instance};
use crate::simulator::StateVector;

const NORMALIZATION_TOL: f64 = 1e-10;

/// Summed population on the solution states.
pub fn fidelity(state: &StateVector, inst: &Instance) -> Result<f64> {
    if state.dim() != inst.dim() {
        return Err(Error::DimensionMismatch {
            expected: inst.dim(),
            got: state.dim(),
        });
    }
    let amps = state.amplitudes();
    Ok(inst.solutions().iter().map(|b| amps[b.0].norm_sqr()).sum())
}

/// `1 - H / H_max` with `H = -sum p ln p` and `H_max = ln(len)`.
pub fn confidence(probabilities: &[f64]) -> Result<f64> {
    if probabilities.is_empty() {
        return Err(Error::InvalidArgument("empty distribution".into()));
    }
    if let Some(&p) = probabilities.iter().find(|&&p| p < 0.0 || p.is_nan()) {
        return Err(Error::NegativeProbability(p));
    }
    let total: f64 = probabilities.iter().sum();
    if (total - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::Unnormalized(total));
    }
    if probabilities.len() == 1 {
        return Ok(1.0);
    }
    let entropy: f64 = probabilities
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.ln())
        .sum();
    let max_entropy = (probabilities.len() as f64).ln();
    Ok((1.0 - entropy / max_entropy).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopulationEntry {
    pub index: usize,
    pub bitstring: String,
    pub probability: f64,
    pub is_solution: bool,
}

/// Most populated basis states, the aggregate of the rest, and where the
/// solutions rank.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopulationReport {
    pub entries: Vec<PopulationEntry>,
    pub others: f64,
    /// 1-based rank of the best-placed solution in the full ordering.
    pub solution_rank: usize,
}

impl PopulationReport {
    pub fn solution_first(&self) -> bool {
        self.solution_rank == 1
    }
}

/// Basis indices ordered by descending probability, ties by ascending index.
pub fn ranked_indices(probabilities: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..probabilities.len()).collect();
    order.sort_by(|&a, &b| {
        probabilities[b]
            .total_cmp(&probabilities[a])
            .then(a.cmp(&b))
    });
    order
}

pub fn population_report(
    state: &StateVector,
    inst: &Instance,
    top_k: usize,
) -> Result<PopulationReport> {
    if top_k == 0 {
        return Err(Error::InvalidArgument("top_k must be at least 1".into()));
    }
    if state.dim() != inst.dim() {
        return Err(Error::DimensionMismatch {
            expected: inst.dim(),
            got: state.dim(),
        });
    }
    let probs = state.probabilities();
    let order = ranked_indices(&probs);
    let solution_rank = order
        .iter()
        .position(|&b| inst.is_solution(BasisIndex(b)))
        .map(|r| r + 1)
        .expect("instances always have a solution");
    let entries: Vec<PopulationEntry> = order
        .iter()
        .take(top_k)
        .map(|&b| PopulationEntry {
            index: b,
            bitstring: inst.bitstring(BasisIndex(b)),
            probability: probs[b],
            is_solution: inst.is_solution(BasisIndex(b)),
        })
        .collect();
    let others = order.iter().skip(top_k).map(|&b| probs[b]).sum();
    Ok(PopulationReport {
        entries,
        others,
        solution_rank,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub index: usize,
    pub bitstring: String,
    pub energy: f64,
    /// `|E_b| / E_max`.
    pub abs_normalized: f64,
    /// Position (0-based) in the ordering by `abs_normalized`.
    pub sorted_rank: usize,
    pub is_solution: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    /// One entry per basis state, in index order.
    pub entries: Vec<SpectrumEntry>,
    /// Largest `|E_b|`.
    pub e_max: f64,
    /// Basis indices sorted by ascending `|E|`, ties by index.
    pub sorted: Vec<usize>,
}

pub fn spectrum_report(d: &DiagonalHamiltonian, inst: &Instance) -> Result<SpectrumReport> {
    if d.len() != inst.dim() {
        return Err(Error::DimensionMismatch {
            expected: inst.dim(),
            got: d.len(),
        });
    }
    let e_max = d.max_abs();
    if e_max == 0.0 {
        return Err(Error::ZeroSpectrum);
    }
    let normalized: Vec<f64> = d.energies().iter().map(|e| e.abs() / e_max).collect();
    let mut sorted: Vec<usize> = (0..d.len()).collect();
    sorted.sort_by(|&a, &b| normalized[a].total_cmp(&normalized[b]).then(a.cmp(&b)));
    let mut rank = vec![0; d.len()];
    for (r, &b) in sorted.iter().enumerate() {
        rank[b] = r;
    }
    let entries = d
        .energies()
        .iter()
        .enumerate()
        .map(|(b, &energy)| SpectrumEntry {
            index: b,
            bitstring: inst.bitstring(BasisIndex(b)),
            energy,
            abs_normalized: normalized[b],
            sorted_rank: rank[b],
            is_solution: inst.is_solution(BasisIndex(b)),
        })
        .collect();
    Ok(SpectrumReport {
        entries,
        e_max,
        sorted,
    })
}

/// Fraction of basis states with `|E_b| / E_max < delta`. `delta` above 1 is
/// clamped to 1.
pub fn near_zero_density(d: &DiagonalHamiltonian, delta: f64) -> Result<f64> {
    if delta.is_nan() || delta <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "delta must be in (0, 1], got {delta}"
        )));
    }
    let delta = delta.min(1.0);
    let e_max = d.max_abs();
    if e_max == 0.0 {
        return Err(Error::ZeroSpectrum);
    }
    let count = d
        .energies()
        .iter()
        .filter(|e| e.abs() / e_max < delta)
        .count();
    Ok(count as f64 / d.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonians::Model;
    use crate::simulator::InitPattern;
    use num_complex::Complex64;

    fn inst(n: u64) -> Instance {
        Instance::new(n).unwrap()
    }

    #[test]
    fn fidelity_examples() {
        let i25 = inst(25);
        let s = StateVector::basis(4, 10).unwrap();
        assert!((fidelity(&s, &i25).unwrap() - 1.0).abs() < 1e-15);
        let u = StateVector::initial(4, InitPattern::Plus).unwrap();
        assert!((fidelity(&u, &i25).unwrap() - 1.0 / 16.0).abs() < 1e-15);
        let u5 = StateVector::initial(5, InitPattern::Alternating).unwrap();
        assert!((fidelity(&u5, &inst(35)).unwrap() - 2.0 / 32.0).abs() < 1e-15);
        assert!(fidelity(&u5, &i25).is_err());
    }

    #[test]
    fn confidence_examples() {
        assert!(confidence(&[1.0 / 16.0; 16]).unwrap().abs() < 1e-12);
        let mut delta = vec![0.0; 16];
        delta[3] = 1.0;
        assert_eq!(confidence(&delta).unwrap(), 1.0);
        let mut half = vec![0.0; 16];
        half[0] = 0.5;
        half[1] = 0.5;
        assert!((confidence(&half).unwrap() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn confidence_rejects_bad_input() {
        assert!(matches!(
            confidence(&[0.5, 0.4]),
            Err(Error::Unnormalized(_))
        ));
        assert!(matches!(
            confidence(&[1.5, -0.5]),
            Err(Error::NegativeProbability(_))
        ));
        assert!(confidence(&[]).is_err());
    }

    #[test]
    fn confidence_is_phase_invariant() {
        let s = StateVector::initial(3, InitPattern::Alternating).unwrap();
        let rotated: Vec<Complex64> = s
            .amplitudes()
            .iter()
            .map(|a| a * Complex64::from_polar(1.0, 0.77))
            .collect();
        let r = StateVector::from_amplitudes(rotated).unwrap();
        let (a, b) = (
            confidence(&s.probabilities()).unwrap(),
            confidence(&r.probabilities()).unwrap(),
        );
        assert!((a - b).abs() < 1e-12);
        let i21 = inst(21);
        assert!((fidelity(&s, &i21).unwrap() - fidelity(&r, &i21).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn population_examples() {
        let i25 = inst(25);
        let s = StateVector::basis(4, 10).unwrap();
        let r = population_report(&s, &i25, 1).unwrap();
        assert_eq!(r.entries.len(), 1);
        assert_eq!(r.entries[0].bitstring, "0101");
        assert_eq!(r.entries[0].probability, 1.0);
        assert!(r.entries[0].is_solution);
        assert_eq!(r.others, 0.0);
        assert!(r.solution_first());

        let u = StateVector::initial(4, InitPattern::Plus).unwrap();
        let r = population_report(&u, &i25, 4).unwrap();
        assert_eq!(r.entries.len(), 4);
        for e in &r.entries {
            assert!((e.probability - 1.0 / 16.0).abs() < 1e-15);
        }
        assert!((r.others - 12.0 / 16.0).abs() < 1e-15);
        // Ties break by index, so the solution (index 10) ranks 11th.
        assert_eq!(r.solution_rank, 11);
        assert!(population_report(&u, &i25, 0).is_err());
    }

    #[test]
    fn spectrum_examples() {
        let i25 = inst(25);
        let lp = DiagonalHamiltonian::generator(&i25, Model::Qubo).unwrap();
        let r = spectrum_report(&lp, &i25).unwrap();
        assert_eq!(r.e_max, 24.0);
        assert_eq!(r.entries[0].abs_normalized, 1.0);
        assert_eq!(r.entries[15].abs_normalized, 1.0);
        assert_eq!(r.entries[0].energy, 24.0);
        assert_eq!(r.entries[15].energy, -24.0);
        assert_eq!(r.entries[10].abs_normalized, 0.0);
        assert!(r.entries[10].is_solution);
        assert_eq!(r.sorted[0], 10);
        assert_eq!(r.entries[10].sorted_rank, 0);
        // Extremal ties: b = 0 sorts before b = 15.
        assert_eq!(&r.sorted[14..], &[0, 15]);

        let qp = DiagonalHamiltonian::generator(&i25, Model::Pubo).unwrap();
        assert_eq!(spectrum_report(&qp, &i25).unwrap().e_max, 576.0);

        let zero = DiagonalHamiltonian::new(vec![0.0; 16], Model::Qubo).unwrap();
        assert_eq!(spectrum_report(&zero, &i25), Err(Error::ZeroSpectrum));
    }

    #[test]
    fn density_examples() {
        let i25 = inst(25);
        let lp = DiagonalHamiltonian::generator(&i25, Model::Qubo).unwrap();
        // Only b = 0 and b = 15 reach |E| = E_max.
        assert_eq!(near_zero_density(&lp, 1.0).unwrap(), 14.0 / 16.0);
        assert_eq!(near_zero_density(&lp, 1.5).unwrap(), 14.0 / 16.0);
        assert!(near_zero_density(&lp, 0.0).is_err());
        for n in [119, 143] {
            let i = inst(n);
            let q = DiagonalHamiltonian::generator(&i, Model::Qubo).unwrap();
            let p = DiagonalHamiltonian::generator(&i, Model::Pubo).unwrap();
            assert!(near_zero_density(&p, 0.05).unwrap() > near_zero_density(&q, 0.05).unwrap());
        }
    }
}
