//! Bipartite entanglement of q-deformed Dicke states and of the ground states
//! of the q-deformed Lipkin-Meshkov-Glick model.
//!
//! The pieces, bottom up:
//!
//! * [`qmath`]: q-numbers, q-factorials and q-binomials in the log domain.
//! * [`schmidt`]: closed-form Schmidt weights and entropy of `|N,k>_q`.
//! * [`qstate`]: reduced density matrix and entropy of superpositions.
//! * [`qlmg`]: sector Hamiltonian, ground state, field sweeps and cusps.
//! * [`oracle`]: brute-force `2^N` checks for small `N`.
//! * [`cli`]: the `qdicke` command-line front end.

// `!(x <= tol)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod linalg;
pub mod oracle;
pub mod qlmg;
pub mod qmath;
pub mod qstate;
pub mod schmidt;

pub use error::{Error, Result};
pub use qlmg::{LmgModel, SectorHamiltonian, SweepResult};
pub use qmath::QParams;
pub use qstate::{QuasiSymmetricState, ReducedDensityMatrix};
pub use schmidt::{Bipartition, DickeState, SchmidtSpectrum};

/// Version string echoed in JSON output.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
