//! Spin-1 AKLT chain with single-ion anisotropy and the spin-½ XYZ chain in a
//! longitudinal field.
//!
//! ```text
//! H = Σ_j Σ_ν J_ν S_j^ν S_{j+1}^ν + α Σ_j (S_j·S_{j+1})² + D Σ_j (S_j^z)² + h Σ_j S_j^z
//! ```
//!
//! Bond terms are assembled as a dense `d² × d²` matrix from the local spin
//! matrices and then scattered over the chain.

use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::Boundary;
use crate::basis::{digit, pow, SectorBasis, SiteKind};
use crate::linalg::{c, CMatrix};
use crate::sparse::{SparseBuilder, SparseOperator};
use crate::{Complex64, Error, Result};

/// Matrix elements below this are treated as exact cancellations.
const CHOP: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Spin {
    One,
    Half,
}

impl Spin {
    pub fn kind(self) -> SiteKind {
        match self {
            Spin::One => SiteKind::Spin1,
            Spin::Half => SiteKind::SpinHalf,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpinModelParams {
    pub jx: f64,
    pub jy: f64,
    pub jz: f64,
    /// Biquadratic coefficient; must be zero for spin-½.
    pub alpha: f64,
    /// Single-ion anisotropy `D (Sᶻ)²`.
    pub d: f64,
    /// Longitudinal field `h Sᶻ`.
    pub h: f64,
    pub sites: usize,
    pub boundary: Boundary,
    pub spin: Spin,
}

impl SpinModelParams {
    /// Isotropic `J = 1`, `α = ⅓` spin-1 chain with anisotropy `d`.
    pub fn aklt(sites: usize, d: f64, boundary: Boundary) -> Self {
        Self {
            jx: 1.0,
            jy: 1.0,
            jz: 1.0,
            alpha: 1.0 / 3.0,
            d,
            h: 0.0,
            sites,
            boundary,
            spin: Spin::One,
        }
    }

    pub fn xyz(jx: f64, jy: f64, jz: f64, h: f64, sites: usize, boundary: Boundary) -> Self {
        Self {
            jx,
            jy,
            jz,
            alpha: 0.0,
            d: 0.0,
            h,
            sites,
            boundary,
            spin: Spin::Half,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [self.jx, self.jy, self.jz, self.alpha, self.d, self.h];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("spin couplings must be finite".into()));
        }
        if self.spin == Spin::Half && self.alpha != 0.0 {
            return Err(Error::InvalidParams(
                "the biquadratic term is only defined for spin 1".into(),
            ));
        }
        if self.sites < 2 {
            return Err(Error::InvalidParams("a chain needs at least two sites".into()));
        }
        Ok(())
    }
}

/// `(Sˣ, Sʸ, Sᶻ)` in the ascending-`m` digit basis.
pub fn spin_matrices(kind: SiteKind) -> [CMatrix; 3] {
    let d = kind.local_dim();
    let s = (d as f64 - 1.0) / 2.0;
    let mut plus = CMatrix::zeros(d, d);
    let mut sz = CMatrix::zeros(d, d);
    for a in 0..d {
        let m = a as f64 - s;
        sz[(a, a)] = c(m);
        if a + 1 < d {
            plus[(a + 1, a)] = c((s * (s + 1.0) - m * (m + 1.0)).sqrt());
        }
    }
    let minus = plus.adjoint();
    let sx = (&plus + &minus).scale(0.5);
    let sy = (&plus - &minus) * Complex64::new(0.0, -0.5);
    [sx, sy, sz]
}

/// Dense two-site bond operator; row/column index is `a + d·b` for digit `a`
/// on the left site and `b` on the right site.
pub fn bond_matrix(params: &SpinModelParams) -> DMatrix<f64> {
    let kind = params.spin.kind();
    let [sx, sy, sz] = spin_matrices(kind);
    // kron(right, left) puts the left-site digit in the fast index.
    let xx = sx.kronecker(&sx);
    let yy = sy.kronecker(&sy);
    let zz = sz.kronecker(&sz);
    let mut bond = xx.scale(params.jx) + yy.scale(params.jy) + zz.scale(params.jz);
    if params.alpha != 0.0 {
        let dot = &xx + &yy + &zz;
        bond += (&dot * &dot).scale(params.alpha);
    }
    bond.map(|z| {
        debug_assert!(z.im.abs() < CHOP);
        if z.re.abs() < CHOP {
            0.0
        } else {
            z.re
        }
    })
}

/// AKLT / bilinear-biquadratic spin-1 chain with anisotropy.
pub fn build_aklt(params: &SpinModelParams, basis: &Arc<SectorBasis>) -> Result<SparseOperator> {
    if params.spin != Spin::One {
        return Err(Error::InvalidParams("build_aklt needs spin 1".into()));
    }
    build_chain(params, basis)
}

/// Spin-½ XYZ chain in a longitudinal field.
pub fn build_xyz(params: &SpinModelParams, basis: &Arc<SectorBasis>) -> Result<SparseOperator> {
    if params.spin != Spin::Half {
        return Err(Error::InvalidParams("build_xyz needs spin ½".into()));
    }
    build_chain(params, basis)
}

fn build_chain(params: &SpinModelParams, basis: &Arc<SectorBasis>) -> Result<SparseOperator> {
    params.validate()?;
    let kind = params.spin.kind();
    if basis.kind() != kind || basis.sites() != params.sites {
        return Err(Error::InvalidParams(format!(
            "basis of {} {:?} sites does not match a {}-site {:?} model",
            basis.sites(),
            basis.kind(),
            params.sites,
            kind
        )));
    }
    let d = kind.local_dim();
    let bond = bond_matrix(params);
    let [_, _, sz] = spin_matrices(kind);
    let onsite: Vec<f64> = (0..d)
        .map(|a| {
            let m = sz[(a, a)].re;
            params.d * m * m + params.h * m
        })
        .collect();
    let bonds = params.boundary.bonds(params.sites);

    let mut builder = SparseBuilder::new(basis.clone());
    for (col, &code) in basis.states().iter().enumerate() {
        let diag: f64 = (0..params.sites).map(|s| onsite[digit(code, d, s) as usize]).sum();
        builder.add(col, col, diag);

        for &(i, j) in &bonds {
            let a = digit(code, d, i);
            let b = digit(code, d, j);
            let from = (a + d as u64 * b) as usize;
            for a2 in 0..d as u64 {
                for b2 in 0..d as u64 {
                    let to = (a2 + d as u64 * b2) as usize;
                    let v = bond[(to, from)];
                    if v == 0.0 {
                        continue;
                    }
                    let new = code + a2 * pow(d, i) + b2 * pow(d, j) - a * pow(d, i) - b * pow(d, j);
                    let row = basis.index_of(new).ok_or_else(|| Error::SymmetryViolation {
                        term: format!("bond ({i}, {j})"),
                        from: code,
                        sector: basis.sector().expect("full basis contains every code"),
                        amplitude: v,
                    })?;
                    builder.add(row, col, v);
                }
            }
        }
    }
    Ok(builder.build())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::Sector;
    use crate::linalg::symmetric_eigen;

    fn spectrum(h: &SparseOperator) -> Vec<f64> {
        symmetric_eigen(&h.to_dense()).0
    }

    fn assert_spectrum(actual: &[f64], expected: &[f64]) {
        assert_eq!(actual.len(), expected.len());
        for (a, e) in actual.iter().zip(expected) {
            assert!((a - e).abs() < 1e-12, "{actual:?} vs {expected:?}");
        }
    }

    #[test]
    fn spin_algebra() {
        for kind in [SiteKind::Spin1, SiteKind::SpinHalf] {
            let [sx, sy, sz] = spin_matrices(kind);
            let i = Complex64::new(0.0, 1.0);
            let comm = &sx * &sy - &sy * &sx - sz.clone() * i;
            assert!(comm.iter().all(|z| z.norm() < 1e-14));
            let s = (kind.local_dim() as f64 - 1.0) / 2.0;
            let casimir = &sx * &sx + &sy * &sy + &sz * &sz;
            for a in 0..kind.local_dim() {
                assert!((casimir[(a, a)].re - s * (s + 1.0)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn two_spin_one_heisenberg_multiplets() {
        let mut p = SpinModelParams::aklt(2, 0.0, Boundary::Open);
        p.alpha = 0.0;
        let basis = Arc::new(SectorBasis::full(2, SiteKind::Spin1).unwrap());
        let h = build_aklt(&p, &basis).unwrap();
        let mut expected = vec![-2.0];
        expected.extend([-1.0; 3]);
        expected.extend([1.0; 5]);
        assert_spectrum(&spectrum(&h), &expected);
    }

    #[test]
    fn aklt_point_energy_per_bond() {
        for sites in 4..=6 {
            let p = SpinModelParams::aklt(sites, 0.0, Boundary::Periodic);
            let basis = Arc::new(SectorBasis::full(sites, SiteKind::Spin1).unwrap());
            let h = build_aklt(&p, &basis).unwrap();
            let e0 = spectrum(&h)[0];
            assert!((e0 / sites as f64 + 2.0 / 3.0).abs() < 1e-10, "L={sites}: {e0}");
        }
    }

    #[test]
    fn large_anisotropy_favours_local_zero() {
        let sites = 4;
        let p = SpinModelParams::aklt(sites, 1e4, Boundary::Periodic);
        let basis = Arc::new(SectorBasis::full(sites, SiteKind::Spin1).unwrap());
        let h = build_aklt(&p, &basis).unwrap();
        let (vals, vecs) = symmetric_eigen(&h.to_dense());
        // First order in J/D: each bond contributes α⟨00|(S·S)²|00⟩ = 2/3.
        assert!((vals[0] - 2.0 / 3.0 * sites as f64).abs() < 1e-2 * sites as f64);
        let all_zero = basis.index_of(pow(3, sites) / 2).unwrap(); // digits 1111
        assert!(vecs[(all_zero, 0)].abs() > 0.999);
    }

    #[test]
    fn two_site_heisenberg() {
        let p = SpinModelParams::xyz(1.0, 1.0, 1.0, 0.0, 2, Boundary::Open);
        let basis = Arc::new(SectorBasis::full(2, SiteKind::SpinHalf).unwrap());
        let h = build_xyz(&p, &basis).unwrap();
        assert_spectrum(&spectrum(&h), &[-0.75, 0.25, 0.25, 0.25]);
    }

    #[test]
    fn xxz_commutes_with_total_sz() {
        let sites = 8;
        let p = SpinModelParams::xyz(1.0, 1.0, 0.7, 0.3, sites, Boundary::Periodic);
        let basis = Arc::new(SectorBasis::full(sites, SiteKind::SpinHalf).unwrap());
        let h = build_xyz(&p, &basis).unwrap().to_dense();
        let sz: Vec<f64> = basis
            .states()
            .iter()
            .map(|&c| (c.count_ones() as f64) - sites as f64 / 2.0)
            .collect();
        let mut worst: f64 = 0.0;
        for i in 0..h.nrows() {
            for j in 0..h.ncols() {
                worst = worst.max((h[(i, j)] * (sz[j] - sz[i])).abs());
            }
        }
        assert!(worst < 1e-12);
        // and the sector-restricted build succeeds
        let sector = Arc::new(SectorBasis::new(sites, SiteKind::SpinHalf, Some(Sector::Magnetization(0))).unwrap());
        assert!(build_xyz(&p, &sector).is_ok());
    }

    #[test]
    fn xyz_flips_spin_pairs() {
        let p = SpinModelParams::xyz(1.0, 0.4, 0.0, 0.0, 2, Boundary::Open);
        let basis = Arc::new(SectorBasis::full(2, SiteKind::SpinHalf).unwrap());
        let h = build_xyz(&p, &basis).unwrap();
        // ↓↓ (code 0) ↔ ↑↑ (code 3) with amplitude (Jx − Jy)/4
        assert!((h.get(3, 0) - 0.15).abs() < 1e-15);
        // ↑↓ ↔ ↓↑ with (Jx + Jy)/4
        assert!((h.get(1, 2) - 0.35).abs() < 1e-15);

        let p4 = SpinModelParams { sites: 4, h: 0.2, ..p };
        let sector = Arc::new(SectorBasis::new(4, SiteKind::SpinHalf, Some(Sector::Magnetization(0))).unwrap());
        assert!(matches!(build_xyz(&p4, &sector), Err(Error::SymmetryViolation { .. })));
        let parity = Arc::new(SectorBasis::new(4, SiteKind::SpinHalf, Some(Sector::Parity(1))).unwrap());
        assert!(build_xyz(&p4, &parity).is_ok());
    }

    #[test]
    fn anisotropic_aklt_rejected_in_sz_sector() {
        let mut p = SpinModelParams::aklt(4, 0.0, Boundary::Open);
        p.jy = 0.5;
        let sector = Arc::new(SectorBasis::new(4, SiteKind::Spin1, Some(Sector::Magnetization(0))).unwrap());
        assert!(matches!(build_aklt(&p, &sector), Err(Error::SymmetryViolation { .. })));
    }

    #[test]
    fn hermitian_and_boundary_consistent() {
        let sites = 5;
        let basis = Arc::new(SectorBasis::full(sites, SiteKind::Spin1).unwrap());
        let mut periodic = SpinModelParams::aklt(sites, 0.4, Boundary::Periodic);
        periodic.jx = 0.8;
        let open = SpinModelParams {
            boundary: Boundary::Open,
            ..periodic.clone()
        };
        let hp = build_aklt(&periodic, &basis).unwrap();
        let ho = build_aklt(&open, &basis).unwrap();
        assert_eq!(hp.hermiticity_defect(), 0.0);
        assert_eq!(ho.hermiticity_defect(), 0.0);

        // periodic − open is exactly the (L−1, 0) bond
        let two = Arc::new(SectorBasis::full(2, SiteKind::Spin1).unwrap());
        let bond_only = build_aklt(
            &SpinModelParams {
                sites: 2,
                d: 0.0,
                boundary: Boundary::Open,
                ..periodic.clone()
            },
            &two,
        )
        .unwrap()
        .to_dense();
        let diff = hp.to_dense() - ho.to_dense();
        let d = 3u64;
        for (ci, &ca) in basis.states().iter().enumerate() {
            for (cj, &cb) in basis.states().iter().enumerate() {
                let same_bulk = (1..sites - 1).all(|s| digit(ca, 3, s) == digit(cb, 3, s));
                let expected = if same_bulk {
                    // bond (L−1, 0): left site L−1, right site 0
                    let row = digit(ca, 3, sites - 1) + d * digit(ca, 3, 0);
                    let col = digit(cb, 3, sites - 1) + d * digit(cb, 3, 0);
                    bond_only[(row as usize, col as usize)]
                } else {
                    0.0
                };
                assert!((diff[(ci, cj)] - expected).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn spin_half_rejects_biquadratic() {
        let mut p = SpinModelParams::xyz(1.0, 1.0, 1.0, 0.0, 4, Boundary::Open);
        p.alpha = 0.1;
        assert!(p.validate().is_err());
        p.alpha = 0.0;
        p.jz = f64::NAN;
        assert!(p.validate().is_err());
    }
}
