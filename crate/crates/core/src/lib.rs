//! Uncertainties of conserved subsystem observables in quantum many-body
//! ground states, and their relation to entanglement entropies and
//! topological edge modes.
//!
//! The crate is organized bottom-up:
//!
//! - [`basis`]: configuration bases with symmetry sectors and bipartitions.
//! - [`sparse`]: the sparse real operator used for many-body Hamiltonians.
//! - [`models`]: spin-1 AKLT, spin-½ XYZ, the interacting Kitaev chain, and
//!   single-particle lattice models (1D two-band insulator, QWZ, square metal).
//! - [`ed`]: dense and Lanczos ground-state solvers.
//! - [`entanglement`]: reduced density matrices, entanglement spectra, entropies.
//! - [`uncertainty`]: subsystem variances from the entanglement spectrum.
//! - [`freefermion`]: correlation-matrix formulas for number-conserving free fermions.
//! - [`sweeps`]: experiment orchestration, CSV output and scaling fits.

pub mod basis;
pub mod ed;
pub mod entanglement;
mod error;
pub mod freefermion;
pub mod linalg;
pub mod models;
pub mod sparse;
pub mod sweeps;
pub mod uncertainty;

pub use error::{Error, Result};

pub use num_complex::Complex64;
