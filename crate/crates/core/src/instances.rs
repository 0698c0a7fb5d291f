//! Factorization instances: register sizing, bit layout and decoding.
//!
//! Qubits are numbered from 1. Qubits `1..=n_p` hold the bits `x_1..x_{n_p}`
//! of `p'`, qubits `n_p+1..=n` hold the bits `y_1..y_{n_q}` of `q'`, and in a
//! basis index `b` qubit `i` is bit `i - 1` (least significant first). Each
//! register is little-endian: `x_i` carries weight `2^(i-1)` in `p'`.
//! Bitstrings are rendered with qubit 1 as the leftmost character.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hard cap on register size for dense enumeration and simulation.
pub const MAX_QUBITS: usize = 24;

/// The semiprimes of the reference corpus, in ascending order.
pub const REFERENCE_SEMIPRIMES: [u64; 12] = [15, 21, 25, 35, 39, 51, 77, 87, 95, 115, 119, 143];

/// A computational basis state of an `n`-qubit register.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BasisIndex(pub usize);

impl BasisIndex {
    /// Value of qubit `qubit` (1-based).
    pub fn bit(self, qubit: usize) -> bool {
        (self.0 >> (qubit - 1)) & 1 == 1
    }
}

impl fmt::Display for BasisIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A decoded pair of odd factors together with their register values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Factors {
    pub p: u64,
    pub q: u64,
    pub p_reg: u64,
    pub q_reg: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    semiprime: u64,
    n_p: usize,
    n_q: usize,
    solutions: Vec<BasisIndex>,
}

/// `ceil(log2(x))` for `x >= 1`.
fn ceil_log2(x: u64) -> usize {
    debug_assert!(x >= 1);
    (u64::BITS - (x - 1).leading_zeros()) as usize
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3u64;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

fn validate(semiprime: u64) -> Result<()> {
    if semiprime.is_multiple_of(2) {
        return Err(Error::EvenModulus(semiprime));
    }
    if semiprime < 15 {
        return Err(Error::ModulusTooSmall(semiprime));
    }
    if is_prime(semiprime) {
        return Err(Error::PrimeModulus(semiprime));
    }
    Ok(())
}

/// Register sizes `(n_p, n_q)` for an odd composite `N >= 15`.
///
/// `n_p = ceil(log2(largest odd <= floor(sqrt N))) - 1` and
/// `n_q = ceil(log2(floor(N / 3))) - 1`.
pub fn qubit_sizing(semiprime: u64) -> Result<(usize, usize)> {
    validate(semiprime)?;
    let root = semiprime.isqrt();
    let odd_root = if root.is_multiple_of(2) {
        root - 1
    } else {
        root
    };
    let n_p = ceil_log2(odd_root) - 1;
    let n_q = ceil_log2(semiprime / 3) - 1;
    Ok((n_p, n_q))
}

/// Renders `b` as `n` characters, qubit 1 leftmost.
pub fn bitstring(b: BasisIndex, n: usize) -> String {
    (1..=n).map(|k| if b.bit(k) { '1' } else { '0' }).collect()
}

/// Inverse of [`bitstring`].
pub fn parse_bitstring(s: &str) -> Result<BasisIndex> {
    if s.len() > MAX_QUBITS {
        return Err(Error::TooManyQubits {
            needed: s.len(),
            max: MAX_QUBITS,
        });
    }
    s.chars()
        .enumerate()
        .try_fold(BasisIndex(0), |acc, (k, c)| match c {
            '0' => Ok(acc),
            '1' => Ok(BasisIndex(acc.0 | (1 << k))),
            other => Err(Error::InvalidArgument(format!(
                "bitstring contains {other:?}"
            ))),
        })
}

impl Instance {
    pub fn new(semiprime: u64) -> Result<Self> {
        let (n_p, n_q) = qubit_sizing(semiprime)?;
        let n = n_p + n_q;
        if n > MAX_QUBITS {
            return Err(Error::TooManyQubits {
                needed: n,
                max: MAX_QUBITS,
            });
        }
        let mut inst = Instance {
            semiprime,
            n_p,
            n_q,
            solutions: Vec::new(),
        };
        inst.solutions = inst.enumerate_solutions()?;
        Ok(inst)
    }

    /// Every instance of the reference corpus.
    pub fn reference_set() -> Vec<Instance> {
        REFERENCE_SEMIPRIMES
            .iter()
            .map(|&n| Instance::new(n).expect("reference semiprimes are valid"))
            .collect()
    }

    pub fn semiprime(&self) -> u64 {
        self.semiprime
    }

    pub fn n_p(&self) -> usize {
        self.n_p
    }

    pub fn n_q(&self) -> usize {
        self.n_q
    }

    pub fn num_qubits(&self) -> usize {
        self.n_p + self.n_q
    }

    /// Hilbert space dimension `2^n`.
    pub fn dim(&self) -> usize {
        1 << self.num_qubits()
    }

    /// Basis states with `F = 0`, ordered by ascending `p`.
    pub fn solutions(&self) -> &[BasisIndex] {
        &self.solutions
    }

    pub fn is_solution(&self, b: BasisIndex) -> bool {
        self.solutions.contains(&b)
    }

    /// Register values `(p', q')` stored in `b`, without range checking.
    pub(crate) fn registers(&self, b: usize) -> (u64, u64) {
        let p_mask = (1usize << self.n_p) - 1;
        let q_mask = (1usize << self.n_q) - 1;
        ((b & p_mask) as u64, ((b >> self.n_p) & q_mask) as u64)
    }

    /// Decodes `b` into `p = 2 p' + 1` and `q = 2 q' + 1`.
    pub fn decode_state(&self, b: BasisIndex) -> Result<Factors> {
        if b.0 >= self.dim() {
            return Err(Error::IndexOutOfRange {
                index: b.0 as u64,
                qubits: self.num_qubits(),
            });
        }
        let (p_reg, q_reg) = self.registers(b.0);
        Ok(Factors {
            p: 2 * p_reg + 1,
            q: 2 * q_reg + 1,
            p_reg,
            q_reg,
        })
    }

    /// Brute-force scan of all `2^n` states for `N - p q = 0`.
    pub fn enumerate_solutions(&self) -> Result<Vec<BasisIndex>> {
        let mut found: Vec<(u64, BasisIndex)> = (0..self.dim())
            .filter_map(|b| {
                let (p_reg, q_reg) = self.registers(b);
                let (p, q) = (2 * p_reg + 1, 2 * q_reg + 1);
                (p * q == self.semiprime).then_some((p, BasisIndex(b)))
            })
            .collect();
        if found.is_empty() {
            return Err(Error::NoSolutions(self.semiprime));
        }
        found.sort();
        Ok(found.into_iter().map(|(_, b)| b).collect())
    }

    pub fn bitstring(&self, b: BasisIndex) -> String {
        bitstring(b, self.num_qubits())
    }
}
