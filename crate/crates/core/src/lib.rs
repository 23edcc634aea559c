//! Construction of exact spin-helix eigenstates of anisotropic spin-s
//! Heisenberg models on d-dimensional periodic hypercubic lattices.
//!
//! The crate is organized bottom-up:
//!
//! - [`elliptic`]: Jacobi theta functions, their shorthand forms at the two
//!   nomes, u-derivatives, zeta ratios, and a catalogued identity suite.
//! - [`spin`]: the spin-s representation (ladder operators, binomial weights).
//! - [`lattice`]: hypercubic geometry, bond enumeration, helix phase.
//! - [`model`]: theta-parameterized couplings, bond operators, matrix-free
//!   Hamiltonian application for all model variants.
//! - [`helix`]: local coherent vectors, spin-helix product states,
//!   commensurability witnesses, closed-form energies, tower states and
//!   entanglement entropies, and the Q/P expansion states.
//!
//! Everything here is pure computation over `alloc`; IO, exact
//! diagonalization and the CLI live in the companion `helix-cli` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod elliptic;
pub mod error;
pub mod helix;
pub mod lattice;
pub mod model;
pub mod spin;

pub use error::Error;

/// Shorthand used across the crate.
pub type Result<T> = core::result::Result<T, Error>;
