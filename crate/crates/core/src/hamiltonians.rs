//! Exact construction of the two problem Hamiltonians.
//!
//! `F = N - (1 + sum_l 2^l x_l)(1 + sum_m 2^m y_m)` is kept as an
//! integer-coefficient polynomial over binary variables. The QUBO Hamiltonian
//! is `H_LP = F` (two-body at most); the PUBO Hamiltonian is `H_QP = F^2`
//! (up to four-body). Floating point only enters through the Pauli-Z
//! expansion (dyadic rationals, exact in `f64` at these sizes) and the
//! dense diagonal.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{self, Parallelism};
use crate::instances::{Instance, MAX_QUBITS};

/// Which encoding a Hamiltonian, circuit or run belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    /// Kernel-subspace encoding, `H_LP = F`.
    Qubo,
    /// Ground-state encoding, `H_QP = F^2`.
    Pubo,
}

impl Model {
    pub const ALL: [Model; 2] = [Model::Qubo, Model::Pubo];

    pub fn as_str(self) -> &'static str {
        match self {
            Model::Qubo => "qubo",
            Model::Pubo => "pubo",
        }
    }
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Model {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "qubo" => Ok(Model::Qubo),
            "pubo" => Ok(Model::Pubo),
            other => Err(Error::InvalidArgument(format!(
                "unknown model {other:?} (expected qubo or pubo)"
            ))),
        }
    }
}

fn check_qubits(n: usize) -> Result<()> {
    if n > MAX_QUBITS {
        return Err(Error::TooManyQubits {
            needed: n,
            max: MAX_QUBITS,
        });
    }
    Ok(())
}

/// Polynomial over idempotent binary variables with integer coefficients.
///
/// A term is keyed by the bitmask of the qubits it multiplies (bit `i - 1`
/// for qubit `i`); the empty mask is the constant term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryPolynomial {
    n: usize,
    terms: BTreeMap<u32, i128>,
}

impl BinaryPolynomial {
    pub fn zero(n: usize) -> Self {
        BinaryPolynomial {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: i128) -> Self {
        let mut p = Self::zero(n);
        p.add_term(0, c);
        p
    }

    /// `c * x_qubit` for a 1-based qubit.
    pub fn variable(n: usize, qubit: usize, c: i128) -> Self {
        assert!((1..=n).contains(&qubit), "qubit {qubit} outside 1..={n}");
        let mut p = Self::zero(n);
        p.add_term(1 << (qubit - 1), c);
        p
    }

    /// Adds `c * prod_{i in mask} x_i`, dropping the term if it cancels.
    pub fn add_term(&mut self, mask: u32, c: i128) {
        assert!(
            self.n >= 32 || mask >> self.n == 0,
            "mask {mask:#b} exceeds {} variables",
            self.n
        );
        if c == 0 {
            return;
        }
        let entry = self.terms.entry(mask).or_insert(0);
        *entry += c;
        if *entry == 0 {
            self.terms.remove(&mask);
        }
    }

    /// `F(N, p', q')` for the instance's register layout.
    pub fn factorization(inst: &Instance) -> Self {
        let n = inst.num_qubits();
        let mut p = Self::constant(n, 1);
        for l in 1..=inst.n_p() {
            p = p.add(&Self::variable(n, l, 1 << l));
        }
        let mut q = Self::constant(n, 1);
        for m in 1..=inst.n_q() {
            q = q.add(&Self::variable(n, inst.n_p() + m, 1 << m));
        }
        Self::constant(n, inst.semiprime() as i128).sub(&p.mul(&q))
    }

    /// The Hamiltonian polynomial of `model`: `F` or `F^2`.
    pub fn problem(inst: &Instance, model: Model) -> Self {
        let f = Self::factorization(inst);
        match model {
            Model::Qubo => f,
            Model::Pubo => f.square(),
        }
    }

    pub fn num_vars(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, i128)> + '_ {
        self.terms.iter().map(|(&m, &c)| (m, c))
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, mask: u32) -> i128 {
        self.terms.get(&mask).copied().unwrap_or(0)
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|m| m.count_ones()).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m, c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (m, c) in other.terms() {
            out.add_term(m, -c);
        }
        out
    }

    /// Product with `x * x = x`: monomials multiply by OR-ing their masks.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let mut out = Self::zero(self.n);
        for (ma, ca) in self.terms() {
            for (mb, cb) in other.terms() {
                out.add_term(ma | mb, ca * cb);
            }
        }
        out
    }

    pub fn square(&self) -> Self {
        self.mul(self)
    }

    /// Value at the basis state whose bits are `b`.
    pub fn evaluate(&self, b: usize) -> i128 {
        let b = b as u32;
        self.terms
            .iter()
            .filter(|(&m, _)| m & b == m)
            .map(|(_, &c)| c)
            .sum()
    }

    /// Substitutes `x = (1 - Z) / 2` and collects Pauli-Z strings.
    pub fn to_pauli(&self) -> PauliZExpansion {
        let mut terms: BTreeMap<u32, f64> = BTreeMap::new();
        for (mask, c) in self.terms() {
            let scale = c as f64 / f64::from(1u32 << mask.count_ones());
            // Every submask T of the monomial contributes (-1)^|T| Z_T.
            let mut sub = mask;
            loop {
                let sign = if sub.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
                *terms.entry(sub).or_insert(0.0) += sign * scale;
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & mask;
            }
        }
        terms.retain(|_, c| *c != 0.0);
        PauliZExpansion { n: self.n, terms }
    }

    /// Dense diagonal over all `2^n` basis states.
    pub fn diagonal(&self, model: Model) -> Result<DiagonalHamiltonian> {
        self.diagonal_with(model, Parallelism::default())
    }

    pub fn diagonal_with(&self, model: Model, par: Parallelism) -> Result<DiagonalHamiltonian> {
        check_qubits(self.n)?;
        let terms: Vec<(u32, i128)> = self.terms().collect();
        let energies = exec::map_range(par, 1 << self.n, |b| {
            let b = b as u32;
            terms
                .iter()
                .filter(|(m, _)| m & b == *m)
                .map(|(_, c)| c)
                .sum::<i128>() as f64
        });
        Ok(DiagonalHamiltonian { energies, model })
    }
}

/// Real-coefficient sum of Pauli-Z strings, keyed by qubit bitmask.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliZExpansion {
    n: usize,
    terms: BTreeMap<u32, f64>,
}

impl PauliZExpansion {
    pub fn from_terms(n: usize, terms: impl IntoIterator<Item = (u32, f64)>) -> Self {
        let mut map = BTreeMap::new();
        for (m, c) in terms {
            *map.entry(m).or_insert(0.0) += c;
        }
        map.retain(|_, c: &mut f64| *c != 0.0);
        PauliZExpansion { n, terms: map }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (u32, f64)> + '_ {
        self.terms.iter().map(|(&m, &c)| (m, c))
    }

    pub fn coefficient(&self, mask: u32) -> f64 {
        self.terms.get(&mask).copied().unwrap_or(0.0)
    }

    /// Coefficient of the identity string.
    pub fn constant(&self) -> f64 {
        self.coefficient(0)
    }

    pub fn max_weight(&self) -> u32 {
        self.terms.keys().map(|m| m.count_ones()).max().unwrap_or(0)
    }

    /// Number of strings of each weight; index `k` counts weight-`k` strings.
    pub fn weight_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.max_weight() as usize + 1];
        for m in self.terms.keys() {
            counts[m.count_ones() as usize] += 1;
        }
        counts
    }

    /// Evaluates `sum_T c_T (-1)^{|T & b|}` on every basis state.
    pub fn reconstruct_diagonal(&self) -> Result<Vec<f64>> {
        check_qubits(self.n)?;
        let terms: Vec<(u32, f64)> = self.terms().collect();
        Ok(exec::map_range(Parallelism::default(), 1 << self.n, |b| {
            terms
                .iter()
                .map(|&(m, c)| {
                    if (m & b as u32).count_ones().is_multiple_of(2) {
                        c
                    } else {
                        -c
                    }
                })
                .sum()
        }))
    }
}

/// Energies of a diagonal Hamiltonian indexed by basis state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagonalHamiltonian {
    energies: Vec<f64>,
    model: Model,
}

impl DiagonalHamiltonian {
    pub fn new(energies: Vec<f64>, model: Model) -> Result<Self> {
        if !energies.len().is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "diagonal length {} is not a power of two",
                energies.len()
            )));
        }
        Ok(DiagonalHamiltonian { energies, model })
    }

    /// The diagonal the phase separator of `model` evolves under:
    /// `H_LP` for QUBO, `H_QP` for PUBO.
    pub fn generator(inst: &Instance, model: Model) -> Result<Self> {
        BinaryPolynomial::problem(inst, model).diagonal(model)
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    pub fn num_qubits(&self) -> usize {
        self.energies.len().trailing_zeros() as usize
    }

    /// Elementwise `|E_b|`; the model tag is kept.
    pub fn abs(&self) -> Self {
        DiagonalHamiltonian {
            energies: self.energies.iter().map(|e| e.abs()).collect(),
            model: self.model,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.energies.iter().fold(0.0, |m, e| m.max(e.abs()))
    }

    pub fn mean(&self) -> f64 {
        self.energies.iter().sum::<f64>() / self.energies.len() as f64
    }
}
