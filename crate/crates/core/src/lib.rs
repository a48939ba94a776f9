//! Exact diagonalization and certified spectral-gap bounds for the
//! ferromagnetic spin-j XXZ chain with boundary fields and a single-site
//! pinning field.

pub mod analytic;
pub mod closed_forms;
pub mod error;
pub mod gap;
pub mod hamiltonian;
pub mod model;
pub mod operator;
pub mod sector;
pub mod solver;
pub mod spin;
pub mod verify;

pub use error::{Error, Result};
pub use hamiltonian::Hamiltonian;
pub use model::{AssemblyConfig, BoundaryCondition, Field, ModelSpec};
pub use operator::{LinearOperator, OperatorMatrix};
pub use sector::SectorBasis;
pub use spin::{Spin, SpinParams, C64};
