//! Digitized adiabatic factorization workbench.
//!
//! Two encodings of `N = p * q` are built side by side:
//!
//! * **PUBO**: the solution is the ground state of `H_QP = F^2`, a polynomial
//!   with up to four-body Pauli-Z interactions.
//! * **QUBO**: the solution lives in the kernel (zero-energy) subspace of
//!   `H_LP = F`, which only needs two-body interactions.
//!
//! Both are compiled to gate-level QAOA layers, simulated exactly on a dense
//! statevector, optimized with a multi-start simplex search and analysed
//! (fidelity, entropy confidence, spectral density near zero).

pub mod analysis;
pub mod cli;

pub mod compiler;
pub mod error;
pub mod exec;
pub mod hamiltonians;
pub mod instances;
pub mod qaoa;
pub mod simulator;

pub use error::{Error, Result};
pub use exec::Parallelism;
pub use hamiltonians::{BinaryPolynomial, DiagonalHamiltonian, Model, PauliZExpansion};
pub use instances::{BasisIndex, Instance, MAX_QUBITS};
pub use qaoa::{OptimizerConfig, Problem, QaoaParams, RunRecord};
pub use simulator::{InitPattern, MixerSpec, StateVector};
