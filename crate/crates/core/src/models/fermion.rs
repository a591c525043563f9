//! Spinless fermions on the Jordan–Wigner ordered Fock basis.
//!
//! `c_j` acting on a configuration picks up `(−1)^{n_0 + … + n_{j−1}}`. With
//! up-spin = occupied this is the string `Π_{l<j} (−2 S_l^z)`, under which
//!
//! ```text
//! S_j⁺ S_{j+1}⁻ = c_j† c_{j+1},    S_j⁺ S_{j+1}⁺ = c_j† c_{j+1}†,
//! ```
//!
//! so the XYZ chain maps onto the interacting Kitaev chain with
//! `t = −(Jx + Jy)/2`, `Δ = (Jy − Jx)/2`, `μ = −h`, `V = Jz`, up to the constant
//! `−h L / 2` coming from `Sᶻ = n − ½`.

use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::Boundary;
use crate::basis::{SectorBasis, SiteKind};
use crate::sparse::{SparseBuilder, SparseOperator};
use crate::{Error, Result};

/// `c_j |code⟩ = sign |code'⟩`, or `None` when site `j` is empty.
#[inline]
pub fn annihilate(code: u64, j: usize) -> Option<(u64, f64)> {
    let bit = 1u64 << j;
    if code & bit == 0 {
        return None;
    }
    Some((code ^ bit, jw_sign(code, j)))
}

/// `c_j† |code⟩ = sign |code'⟩`, or `None` when site `j` is occupied.
#[inline]
pub fn create(code: u64, j: usize) -> Option<(u64, f64)> {
    let bit = 1u64 << j;
    if code & bit != 0 {
        return None;
    }
    Some((code | bit, jw_sign(code, j)))
}

#[inline]
fn jw_sign(code: u64, j: usize) -> f64 {
    if (code & ((1u64 << j) - 1)).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Applies `ops` right to left (`ops[last]` first). `true` is a creator.
pub fn apply_string(code: u64, ops: &[(bool, usize)]) -> Option<(u64, f64)> {
    let mut state = code;
    let mut sign = 1.0;
    for &(dagger, j) in ops.iter().rev() {
        let (next, s) = if dagger {
            create(state, j)?
        } else {
            annihilate(state, j)?
        };
        state = next;
        sign *= s;
    }
    Some((state, sign))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KitaevParams {
    pub t: f64,
    pub delta: f64,
    pub mu: f64,
    pub v: f64,
    pub sites: usize,
    pub boundary: Boundary,
}

impl KitaevParams {
    /// Jordan–Wigner image of the XYZ chain `(Jx, Jy, Jz, h)`.
    pub fn from_xyz(jx: f64, jy: f64, jz: f64, h: f64, sites: usize, boundary: Boundary) -> Self {
        Self {
            t: -(jx + jy) / 2.0,
            delta: (jy - jx) / 2.0,
            mu: -h,
            v: jz,
            sites,
            boundary,
        }
    }

    /// Energy offset `E_XYZ − E_Kitaev` of the mapped pair.
    pub fn xyz_offset(h: f64, sites: usize) -> f64 {
        -h * sites as f64 / 2.0
    }

    pub fn validate(&self) -> Result<()> {
        if [self.t, self.delta, self.mu, self.v].iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("Kitaev parameters must be finite".into()));
        }
        if self.sites < 2 || self.sites > 63 {
            return Err(Error::InvalidParams(format!(
                "Kitaev chain length {} outside 2..=63",
                self.sites
            )));
        }
        Ok(())
    }
}

fn check_fermion_basis(basis: &SectorBasis, sites: usize) -> Result<()> {
    if basis.kind() != SiteKind::Fermion || basis.sites() != sites {
        return Err(Error::InvalidParams(format!(
            "expected a {sites}-site fermion basis, found {} {:?} sites",
            basis.sites(),
            basis.kind()
        )));
    }
    Ok(())
}

/// Scatters `coefficient · Π ops` applied to every basis state.
fn scatter(
    builder: &mut SparseBuilder,
    basis: &SectorBasis,
    term: &str,
    ops: &[(bool, usize)],
    coefficient: f64,
) -> Result<()> {
    if coefficient == 0.0 {
        return Ok(());
    }
    for (col, &code) in basis.states().iter().enumerate() {
        if let Some((new, sign)) = apply_string(code, ops) {
            let row = basis.index_of(new).ok_or_else(|| Error::SymmetryViolation {
                term: term.to_string(),
                from: code,
                sector: basis.sector().expect("full basis contains every code"),
                amplitude: coefficient * sign,
            })?;
            builder.add(row, col, coefficient * sign);
        }
    }
    Ok(())
}

/// Interacting Kitaev chain
///
/// ```text
/// H = −½ Σ_j (t c_j† c_{j+1} + Δ c_j† c_{j+1}† + h.c.)
///     + V Σ_j (n_j − ½)(n_{j+1} − ½) − μ Σ_j n_j
/// ```
///
/// Bonds run over `j = 0..L−2`, plus `(L−1, 0)` for periodic chains, where the
/// fermionic wrap-around sign follows from the Jordan–Wigner string.
pub fn build_kitaev(params: &KitaevParams, basis: &Arc<SectorBasis>) -> Result<SparseOperator> {
    params.validate()?;
    check_fermion_basis(basis, params.sites)?;
    let mut builder = SparseBuilder::new(basis.clone());

    for (col, &code) in basis.states().iter().enumerate() {
        let n = |j: usize| ((code >> j) & 1) as f64;
        let mut diag = -params.mu * code.count_ones() as f64;
        for (i, j) in params.boundary.bonds(params.sites) {
            diag += params.v * (n(i) - 0.5) * (n(j) - 0.5);
        }
        builder.add(col, col, diag);
    }

    let half_t = -0.5 * params.t;
    let half_delta = -0.5 * params.delta;
    for (i, j) in params.boundary.bonds(params.sites) {
        scatter(&mut builder, basis, "hopping", &[(true, i), (false, j)], half_t)?;
        scatter(&mut builder, basis, "hopping", &[(true, j), (false, i)], half_t)?;
        scatter(&mut builder, basis, "pairing", &[(true, i), (true, j)], half_delta)?;
        scatter(&mut builder, basis, "pairing", &[(false, j), (false, i)], half_delta)?;
    }
    Ok(builder.build())
}

/// Number-conserving quadratic Hamiltonian `Σ_ij h_ij c_i† c_j` with a real
/// symmetric single-particle matrix (one orbital per basis site).
pub fn build_quadratic(h: &DMatrix<f64>, basis: &Arc<SectorBasis>) -> Result<SparseOperator> {
    let sites = h.nrows();
    if h.ncols() != sites {
        return Err(Error::DimensionMismatch {
            expected: sites,
            found: h.ncols(),
        });
    }
    check_fermion_basis(basis, sites)?;
    let mut builder = SparseBuilder::new(basis.clone());
    for i in 0..sites {
        for j in 0..sites {
            scatter(&mut builder, basis, "quadratic", &[(true, i), (false, j)], h[(i, j)])?;
        }
    }
    Ok(builder.build())
}
