//! Hamiltonian builders.

pub mod fermion;
pub mod lattice;
pub mod spin;

use serde::{Deserialize, Serialize};

/// Boundary condition of a many-body chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Open,
    Periodic,
}

impl Boundary {
    /// Nearest-neighbour bonds `(j, j+1)` of an `L`-site chain.
    pub fn bonds(self, sites: usize) -> Vec<(usize, usize)> {
        let mut bonds: Vec<_> = (0..sites.saturating_sub(1)).map(|j| (j, j + 1)).collect();
        if self == Boundary::Periodic && sites > 2 {
            bonds.push((sites - 1, 0));
        }
        bonds
    }
}
