//! Dense statevector engine for QAOA with diagonal problem Hamiltonians.
//!
//! Basis index `b` stores qubit `i` in bit `i - 1`. Per-amplitude loops run
//! through [`crate::exec`] and only fan out for large registers; every
//! reduction is sequential so results are independent of the policy.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::compiler::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::exec::{self, Parallelism};
use crate::hamiltonians::{DiagonalHamiltonian, Model};
use crate::instances::MAX_QUBITS;

/// Product-state preparation used before the first layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitPattern {
    /// `|+>|+>...|+>`
    Plus,
    /// `|+>|->|+>|->...`, qubit 1 in `|+>`.
    Alternating,
}

impl InitPattern {
    pub fn default_for(model: Model) -> Self {
        match model {
            Model::Qubo => InitPattern::Alternating,
            Model::Pubo => InitPattern::Plus,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            InitPattern::Plus => "plus",
            InitPattern::Alternating => "alternating",
        }
    }
}

impl std::str::FromStr for InitPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plus" => Ok(InitPattern::Plus),
            "alternating" => Ok(InitPattern::Alternating),
            other => Err(Error::InvalidArgument(format!(
                "unknown initial pattern {other:?} (expected plus or alternating)"
            ))),
        }
    }
}

/// Transverse-field mixer `H_M = omega * sum_k X_k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MixerSpec {
    omega: f64,
}

impl MixerSpec {
    pub fn new(omega: f64) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "mixer strength must be positive, got {omega}"
            )));
        }
        Ok(MixerSpec { omega })
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }
}

impl Default for MixerSpec {
    fn default() -> Self {
        MixerSpec { omega: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
    par: Parallelism,
}

impl StateVector {
    /// The computational basis state `|b>`.
    pub fn basis(n: usize, b: usize) -> Result<Self> {
        check_width(n)?;
        if b >= 1 << n {
            return Err(Error::IndexOutOfRange {
                index: b as u64,
                qubits: n,
            });
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[b] = Complex64::new(1.0, 0.0);
        Ok(StateVector {
            n,
            amps,
            par: Parallelism::default(),
        })
    }

    pub fn initial(n: usize, pattern: InitPattern) -> Result<Self> {
        check_width(n)?;
        if n == 0 {
            return Err(Error::InvalidArgument(
                "state needs at least one qubit".into(),
            ));
        }
        let a = 1.0 / ((1usize << n) as f64).sqrt();
        // Qubits 2, 4, ... sit at bit offsets 1, 3, ...
        let minus_mask = match pattern {
            InitPattern::Plus => 0,
            InitPattern::Alternating => (0..n).filter(|i| i % 2 == 1).map(|i| 1usize << i).sum(),
        };
        let amps = (0..1usize << n)
            .map(|b| {
                if (b & minus_mask).count_ones() % 2 == 0 {
                    Complex64::new(a, 0.0)
                } else {
                    Complex64::new(-a, 0.0)
                }
            })
            .collect();
        Ok(StateVector {
            n,
            amps,
            par: Parallelism::default(),
        })
    }

    /// Builds a state from raw amplitudes (length must be a power of two).
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        if !amps.len().is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "amplitude count {} is not a power of two",
                amps.len()
            )));
        }
        let n = amps.len().trailing_zeros() as usize;
        check_width(n)?;
        Ok(StateVector {
            n,
            amps,
            par: Parallelism::default(),
        })
    }

    pub fn with_parallelism(mut self, par: Parallelism) -> Self {
        self.par = par;
        self
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    fn check_dim(&self, len: usize) -> Result<()> {
        if len != self.amps.len() {
            return Err(Error::DimensionMismatch {
                expected: self.amps.len(),
                got: len,
            });
        }
        Ok(())
    }

    /// `a_b <- a_b exp(-i gamma d_b)`.
    pub fn apply_phase_separator(&mut self, d: &DiagonalHamiltonian, gamma: f64) -> Result<()> {
        self.check_dim(d.len())?;
        let energies = d.energies();
        exec::for_each_indexed(self.par, &mut self.amps, |b, a| {
            let (s, c) = (gamma * energies[b]).sin_cos();
            *a *= Complex64::new(c, -s);
        });
        Ok(())
    }

    /// `exp(-i beta omega X_k)` on every qubit `k`, in ascending order.
    pub fn apply_mixer(&mut self, beta: f64, mixer: MixerSpec) {
        let order: Vec<usize> = (1..=self.n).collect();
        self.apply_mixer_ordered(beta, mixer, &order);
    }

    /// Same as [`apply_mixer`](Self::apply_mixer) with an explicit qubit order.
    pub fn apply_mixer_ordered(&mut self, beta: f64, mixer: MixerSpec, order: &[usize]) {
        let (s, c) = (beta * mixer.omega).sin_cos();
        for &q in order {
            self.apply_x_rotation(q, c, s);
        }
    }

    /// `cos(t) I - i sin(t) X` on 1-based `qubit`.
    fn apply_x_rotation(&mut self, qubit: usize, c: f64, s: f64) {
        let stride = 1usize << (qubit - 1);
        exec::for_each_chunk(self.par, &mut self.amps, 2 * stride, |_, chunk| {
            let (lo, hi) = chunk.split_at_mut(stride);
            for (a0, a1) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x0, x1) = (*a0, *a1);
                *a0 = Complex64::new(c * x0.re + s * x1.im, c * x0.im - s * x1.re);
                *a1 = Complex64::new(c * x1.re + s * x0.im, c * x1.im - s * x0.re);
            }
        });
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        let in_range = |q: usize| (1..=self.n).contains(&q);
        match *gate {
            Gate::Rz { qubit, angle } => {
                if !in_range(qubit) {
                    return Err(Error::InvalidArgument(format!(
                        "qubit {qubit} out of range"
                    )));
                }
                let bit = 1usize << (qubit - 1);
                let (s, c) = (angle / 2.0).sin_cos();
                let (p0, p1) = (Complex64::new(c, -s), Complex64::new(c, s));
                exec::for_each_indexed(self.par, &mut self.amps, |b, a| {
                    *a *= if b & bit == 0 { p0 } else { p1 };
                });
            }
            Gate::Rx { qubit, angle } => {
                if !in_range(qubit) {
                    return Err(Error::InvalidArgument(format!(
                        "qubit {qubit} out of range"
                    )));
                }
                let (s, c) = (angle / 2.0).sin_cos();
                self.apply_x_rotation(qubit, c, s);
            }
            Gate::Cnot { control, target } => {
                if !in_range(control) || !in_range(target) || control == target {
                    return Err(Error::InvalidArgument(format!(
                        "invalid CNOT({control}, {target})"
                    )));
                }
                let cbit = 1usize << (control - 1);
                let tbit = 1usize << (target - 1);
                for b in 0..self.amps.len() {
                    if b & cbit != 0 && b & tbit == 0 {
                        self.amps.swap(b, b | tbit);
                    }
                }
            }
        }
        Ok(())
    }

    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        if circuit.num_qubits() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: circuit.num_qubits(),
            });
        }
        circuit.gates().iter().try_for_each(|g| self.apply_gate(g))
    }

    /// `sum_b |a_b|^2 d_b`.
    pub fn expectation(&self, d: &DiagonalHamiltonian) -> Result<f64> {
        self.check_dim(d.len())?;
        Ok(self
            .amps
            .iter()
            .zip(d.energies())
            .map(|(a, e)| a.norm_sqr() * e)
            .sum())
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        self.check_dim(other.dim())?;
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Largest amplitude difference after rotating `other` onto this state's
    /// global phase.
    pub fn distance_up_to_phase(&self, other: &StateVector) -> Result<f64> {
        let overlap = self.inner(other)?;
        let phase = if overlap.norm() > 0.0 {
            overlap.conj() / overlap.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b * phase).norm())
            .fold(0.0, f64::max))
    }
}

fn check_width(n: usize) -> Result<()> {
    if n > MAX_QUBITS {
        return Err(Error::TooManyQubits {
            needed: n,
            max: MAX_QUBITS,
        });
    }
    Ok(())
}

/// Prepares `pattern` and applies `gammas.len()` layers of
/// phase separator (generator `d`) followed by the mixer.
pub fn run_ansatz(
    d: &DiagonalHamiltonian,
    gammas: &[f64],
    betas: &[f64],
    pattern: InitPattern,
    mixer: MixerSpec,
) -> Result<StateVector> {
    if gammas.len() != betas.len() {
        return Err(Error::DimensionMismatch {
            expected: gammas.len(),
            got: betas.len(),
        });
    }
    let mut state = StateVector::initial(d.num_qubits(), pattern)?;
    for (&g, &b) in gammas.iter().zip(betas) {
        state.apply_phase_separator(d, g)?;
        state.apply_mixer(b, mixer);
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::Instance;
    use std::f64::consts::{FRAC_PI_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn lp25() -> DiagonalHamiltonian {
        DiagonalHamiltonian::generator(&Instance::new(25).unwrap(), Model::Qubo).unwrap()
    }

    fn mixer_energy(s: &StateVector) -> f64 {
        // <sum_k X_k> = sum_k sum_b conj(a_b) a_{b ^ bit_k}
        let a = s.amplitudes();
        (0..s.num_qubits())
            .map(|k| {
                (0..a.len())
                    .map(|b| (a[b].conj() * a[b ^ (1 << k)]).re)
                    .sum::<f64>()
            })
            .sum()
    }

    #[test]
    fn initial_states() {
        let plus = StateVector::initial(2, InitPattern::Plus).unwrap();
        assert!(plus
            .amplitudes()
            .iter()
            .all(|a| (a - c(0.5, 0.0)).norm() < 1e-15));
        let alt = StateVector::initial(2, InitPattern::Alternating).unwrap();
        let want = [0.5, 0.5, -0.5, -0.5];
        for (a, w) in alt.amplitudes().iter().zip(want) {
            assert!((a - c(w, 0.0)).norm() < 1e-15);
        }
        assert!(mixer_energy(&alt).abs() < 1e-15);
        assert!((mixer_energy(&plus) - 2.0).abs() < 1e-14);
        // Odd n: the last qubit is |+>, so <H_M> = 1.
        let alt3 = StateVector::initial(3, InitPattern::Alternating).unwrap();
        assert!((mixer_energy(&alt3) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn phase_separator_identities() {
        let d = lp25();
        let s0 = StateVector::initial(4, InitPattern::Alternating).unwrap();
        let mut s = s0.clone();
        s.apply_phase_separator(&d, 0.0).unwrap();
        assert_eq!(s, s0);
        s.apply_phase_separator(&d, 2.0 * PI).unwrap();
        assert!(s.distance_up_to_phase(&s0).unwrap() < 1e-12);
        assert!(s
            .amplitudes()
            .iter()
            .zip(s0.amplitudes())
            .all(|(a, b)| (a - b).norm() < 1e-12));

        let mut s = s0.clone();
        s.apply_phase_separator(&d, 0.731).unwrap();
        assert_eq!(s.amplitudes()[10], s0.amplitudes()[10]);
        for (a, b) in s.amplitudes().iter().zip(s0.amplitudes()) {
            assert!((a.norm_sqr() - b.norm_sqr()).abs() < 1e-15);
        }
    }

    #[test]
    fn phase_separator_dimension_mismatch() {
        let mut s = StateVector::initial(3, InitPattern::Plus).unwrap();
        assert!(matches!(
            s.apply_phase_separator(&lp25(), 0.1),
            Err(Error::DimensionMismatch {
                expected: 8,
                got: 16
            })
        ));
        assert!(s.expectation(&lp25()).is_err());
    }

    #[test]
    fn mixer_identities() {
        let m = MixerSpec::default();
        let s0 = StateVector::initial(3, InitPattern::Alternating).unwrap();
        let mut s = s0.clone();
        s.apply_mixer(0.0, m);
        assert_eq!(s, s0);

        let mut s = StateVector::basis(3, 0).unwrap();
        s.apply_mixer(FRAC_PI_2, m);
        // (-i)^3 |111>
        assert!((s.amplitudes()[7] - c(0.0, 1.0)).norm() < 1e-15);
        assert!((s.probabilities()[7] - 1.0).abs() < 1e-15);

        let plus = StateVector::initial(4, InitPattern::Plus).unwrap();
        let mut s = plus.clone();
        s.apply_mixer(0.37, m);
        assert!(s.distance_up_to_phase(&plus).unwrap() < 1e-14);

        let half = MixerSpec::new(0.5).unwrap();
        let mut a = StateVector::basis(2, 1).unwrap();
        let mut b = a.clone();
        a.apply_mixer(0.8, half);
        b.apply_mixer(0.4, m);
        assert!(a.distance_up_to_phase(&b).unwrap() < 1e-15);
        assert!(MixerSpec::new(0.0).is_err());
    }

    #[test]
    fn gates_match_definitions() {
        // RX(pi) = -i X, RZ(pi) = diag(-i, i), CNOT(1, 2) on |01> (qubit 1 set).
        let mut s = StateVector::basis(2, 0).unwrap();
        s.apply_gate(&Gate::Rx {
            qubit: 2,
            angle: PI,
        })
        .unwrap();
        assert!((s.amplitudes()[2] - c(0.0, -1.0)).norm() < 1e-15);
        s.apply_gate(&Gate::Rz {
            qubit: 2,
            angle: PI,
        })
        .unwrap();
        assert!((s.amplitudes()[2] - c(1.0, 0.0)).norm() < 1e-15);
        let mut s = StateVector::basis(2, 1).unwrap();
        s.apply_gate(&Gate::Cnot {
            control: 1,
            target: 2,
        })
        .unwrap();
        assert_eq!(s.probabilities(), vec![0.0, 0.0, 0.0, 1.0]);
        assert!(s
            .apply_gate(&Gate::Cnot {
                control: 2,
                target: 2
            })
            .is_err());
    }

    #[test]
    fn expectation_uniform_n25() {
        let inst = Instance::new(25).unwrap();
        let s = StateVector::initial(4, InitPattern::Plus).unwrap();
        let lp = lp25();
        let qp = DiagonalHamiltonian::generator(&inst, Model::Pubo).unwrap();
        assert!((s.expectation(&lp).unwrap() - 9.0).abs() < 1e-12);
        assert!((s.expectation(&lp.abs()).unwrap() - 14.5).abs() < 1e-12);
        assert!((s.expectation(&qp).unwrap() - 266.0).abs() < 1e-12);
    }

    #[test]
    fn ansatz_trivial_cases() {
        let d = lp25();
        let m = MixerSpec::default();
        let init = StateVector::initial(4, InitPattern::Alternating).unwrap();
        assert_eq!(
            run_ansatz(&d, &[], &[], InitPattern::Alternating, m).unwrap(),
            init
        );
        assert_eq!(
            run_ansatz(&d, &[0.0], &[0.0], InitPattern::Alternating, m).unwrap(),
            init
        );
        let s = run_ansatz(
            &d,
            &[0.3, -1.2, 2.9],
            &[0.5, 0.1, -2.2],
            InitPattern::Plus,
            m,
        )
        .unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        assert!(run_ansatz(&d, &[0.3], &[], InitPattern::Plus, m).is_err());
    }

    #[test]
    fn parallel_and_sequential_agree() {
        let n = 13;
        let energies: Vec<f64> = (0..1usize << n).map(|b| (b % 97) as f64 - 40.0).collect();
        let d = DiagonalHamiltonian::new(energies, Model::Qubo).unwrap();
        let run = |par| {
            let mut s = StateVector::initial(n, InitPattern::Alternating)
                .unwrap()
                .with_parallelism(par);
            for k in 0..3 {
                s.apply_phase_separator(&d, 0.1 + k as f64).unwrap();
                s.apply_mixer(0.7 - k as f64, MixerSpec::default());
            }
            s.amplitudes().to_vec()
        };
        assert_eq!(run(Parallelism::Sequential), run(Parallelism::Parallel));
    }
}
