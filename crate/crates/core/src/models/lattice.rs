//! Single-particle tight-binding models on chains and square lattices.
//!
//! A model is an on-site orbital matrix plus forward hoppings `T_d`, meaning
//! the terms `c_r† T_d c_{r+d} + h.c.`. The Bloch Hamiltonian is then
//! `H(k) = ε + Σ_d (T_d e^{ik·d} + T_d† e^{−ik·d})`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::linalg::{c, CMatrix};
use crate::{Complex64, Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LatticeBoundary {
    Open,
    Periodic,
    /// Periodic with a `−1` on every bond crossing the seam.
    AntiPeriodic,
}

impl LatticeBoundary {
    fn seam_phase(self) -> Option<f64> {
        match self {
            LatticeBoundary::Open => None,
            LatticeBoundary::Periodic => Some(1.0),
            LatticeBoundary::AntiPeriodic => Some(-1.0),
        }
    }

    /// Allowed crystal momenta along a direction of `n` cells.
    pub fn momenta(self, n: usize) -> Option<Vec<f64>> {
        let shift = match self {
            LatticeBoundary::Open => return None,
            LatticeBoundary::Periodic => 0.0,
            LatticeBoundary::AntiPeriodic => 0.5,
        };
        Some((0..n).map(|j| 2.0 * PI * (j as f64 + shift) / n as f64).collect())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Geometry {
    Chain { length: usize },
    Square { lx: usize, ly: usize },
}

impl Geometry {
    pub fn extent(self) -> [usize; 2] {
        match self {
            Geometry::Chain { length } => [length, 1],
            Geometry::Square { lx, ly } => [lx, ly],
        }
    }

    pub fn cells(self) -> usize {
        let [x, y] = self.extent();
        x * y
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Hopping {
    pub displacement: [i32; 2],
    pub matrix: CMatrix,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SingleParticleModel {
    pub name: String,
    pub geometry: Geometry,
    pub bands: usize,
    pub onsite: CMatrix,
    pub hoppings: Vec<Hopping>,
    pub boundary: [LatticeBoundary; 2],
}

fn pauli() -> [CMatrix; 3] {
    let i = Complex64::new(0.0, 1.0);
    let z = c(0.0);
    [
        CMatrix::from_row_slice(2, 2, &[z, c(1.0), c(1.0), z]),
        CMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        CMatrix::from_row_slice(2, 2, &[c(1.0), z, z, c(-1.0)]),
    ]
}

impl SingleParticleModel {
    /// `H(k) = (m − cos k) σz + sin k σx`.
    pub fn ti1d(m: f64, length: usize, boundary: LatticeBoundary) -> Self {
        let [sx, _, sz] = pauli();
        let i = Complex64::new(0.0, 1.0);
        // T e^{ik} + T† e^{−ik} = −cos k σz + sin k σx
        let t = (sz.scale(-1.0) - sx * i).scale(0.5);
        Self {
            name: "ti1d".into(),
            geometry: Geometry::Chain { length },
            bands: 2,
            onsite: sz.scale(m),
            hoppings: vec![Hopping {
                displacement: [1, 0],
                matrix: t,
            }],
            boundary: [boundary, LatticeBoundary::Open],
        }
    }

    /// Qi–Wu–Zhang Chern insulator,
    /// `H(k) = (m − cos kx − cos ky) σz + sin kx σx + sin ky σy`.
    pub fn qwz(m: f64, lx: usize, ly: usize, boundary: [LatticeBoundary; 2]) -> Self {
        let [sx, sy, sz] = pauli();
        let i = Complex64::new(0.0, 1.0);
        let tx = (sz.scale(-1.0) - sx * i).scale(0.5);
        let ty = (sz.scale(-1.0) - sy * i).scale(0.5);
        Self {
            name: "qwz".into(),
            geometry: Geometry::Square { lx, ly },
            bands: 2,
            onsite: sz.scale(m),
            hoppings: vec![
                Hopping {
                    displacement: [1, 0],
                    matrix: tx,
                },
                Hopping {
                    displacement: [0, 1],
                    matrix: ty,
                },
            ],
            boundary,
        }
    }

    /// Square-lattice metal, `ε_k = −2t (cos kx + cos ky)`.
    pub fn metal(t: f64, lx: usize, ly: usize, boundary: [LatticeBoundary; 2]) -> Self {
        let hop = CMatrix::from_element(1, 1, c(-t));
        Self {
            name: "metal".into(),
            geometry: Geometry::Square { lx, ly },
            bands: 1,
            onsite: CMatrix::zeros(1, 1),
            hoppings: vec![
                Hopping {
                    displacement: [1, 0],
                    matrix: hop.clone(),
                },
                Hopping {
                    displacement: [0, 1],
                    matrix: hop,
                },
            ],
            boundary,
        }
    }

    /// Single-band nearest-neighbour chain, `ε_k = −2t cos k`.
    pub fn chain(t: f64, length: usize, boundary: LatticeBoundary) -> Self {
        Self {
            name: "chain".into(),
            geometry: Geometry::Chain { length },
            bands: 1,
            onsite: CMatrix::zeros(1, 1),
            hoppings: vec![Hopping {
                displacement: [1, 0],
                matrix: CMatrix::from_element(1, 1, c(-t)),
            }],
            boundary: [boundary, LatticeBoundary::Open],
        }
    }

    pub fn cells(&self) -> usize {
        self.geometry.cells()
    }

    pub fn orbitals(&self) -> usize {
        self.cells() * self.bands
    }

    /// Cell index of the cell at `(x, y)`; orbitals are cell-major.
    pub fn cell_index(&self, x: usize, y: usize) -> usize {
        x + self.geometry.extent()[0] * y
    }

    pub fn cell_position(&self, cell: usize) -> [usize; 2] {
        let lx = self.geometry.extent()[0];
        [cell % lx, cell / lx]
    }

    /// Orbital indices of a set of cells, in the given cell order.
    pub fn orbitals_of(&self, cells: &[usize]) -> Vec<usize> {
        cells
            .iter()
            .flat_map(|&cell| (0..self.bands).map(move |a| cell * self.bands + a))
            .collect()
    }

    /// Cells `[start, start + len)` of a chain.
    pub fn chain_block(&self, start: usize, len: usize) -> Vec<usize> {
        (start..start + len).collect()
    }

    /// Cells of the `w × h` rectangle with lower-left corner `(x0, y0)`.
    pub fn square_block(&self, x0: usize, y0: usize, w: usize, h: usize) -> Vec<usize> {
        let mut cells = Vec::with_capacity(w * h);
        for y in y0..y0 + h {
            for x in x0..x0 + w {
                cells.push(self.cell_index(x, y));
            }
        }
        cells
    }

    pub fn validate(&self) -> Result<()> {
        let [lx, ly] = self.geometry.extent();
        if lx == 0 || ly == 0 {
            return Err(Error::InvalidParams("empty lattice".into()));
        }
        if self.onsite.shape() != (self.bands, self.bands)
            || self
                .hoppings
                .iter()
                .any(|h| h.matrix.shape() != (self.bands, self.bands))
        {
            return Err(Error::InvalidParams("orbital matrices must be bands × bands".into()));
        }
        Ok(())
    }

    /// `H(k)` for the bands × bands Bloch Hamiltonian.
    pub fn bloch_hamiltonian(&self, k: [f64; 2]) -> CMatrix {
        let mut h = self.onsite.clone();
        for hop in &self.hoppings {
            let phase = k[0] * hop.displacement[0] as f64 + k[1] * hop.displacement[1] as f64;
            let e = Complex64::from_polar(1.0, phase);
            h += hop.matrix.scale(1.0) * e + hop.matrix.adjoint() * e.conj();
        }
        h
    }

    /// All allowed `k` points, or `None` when some direction is open.
    pub fn momenta(&self) -> Option<Vec<[f64; 2]>> {
        let [lx, ly] = self.geometry.extent();
        let kx = self.boundary[0].momenta(lx)?;
        let ky = if ly == 1 {
            vec![0.0]
        } else {
            self.boundary[1].momenta(ly)?
        };
        Some(ky.iter().flat_map(|&y| kx.iter().map(move |&x| [x, y])).collect())
    }
}

/// Real-space single-particle matrix `H_{(r,α),(r',β)}`.
pub fn build_single_particle(model: &SingleParticleModel) -> Result<CMatrix> {
    model.validate()?;
    let n = model.orbitals();
    let b = model.bands;
    let [lx, ly] = model.geometry.extent();
    let mut h = CMatrix::zeros(n, n);
    for cell in 0..model.cells() {
        for a in 0..b {
            for a2 in 0..b {
                h[(cell * b + a, cell * b + a2)] += model.onsite[(a, a2)];
            }
        }
    }
    for hop in &model.hoppings {
        for cell in 0..model.cells() {
            let [x, y] = model.cell_position(cell);
            let mut phase = 1.0;
            let mut target = [0usize; 2];
            let mut skip = false;
            for (axis, (&pos, &len)) in [x, y].iter().zip([lx, ly].iter()).enumerate() {
                let shifted = pos as i64 + hop.displacement[axis] as i64;
                if (0..len as i64).contains(&shifted) {
                    target[axis] = shifted as usize;
                    continue;
                }
                match model.boundary[axis].seam_phase() {
                    Some(p) => {
                        target[axis] = shifted.rem_euclid(len as i64) as usize;
                        phase *= p;
                    }
                    None => skip = true,
                }
            }
            if skip {
                continue;
            }
            let other = model.cell_index(target[0], target[1]);
            for a in 0..b {
                for a2 in 0..b {
                    let v = hop.matrix[(a, a2)] * phase;
                    h[(cell * b + a, other * b + a2)] += v;
                    h[(other * b + a2, cell * b + a)] += v.conj();
                }
            }
        }
    }
    Ok(h)
}

/// Real part of a single-particle matrix, for models with real hoppings.
pub fn real_part(h: &CMatrix) -> Option<DMatrix<f64>> {
    if h.iter().all(|z| z.im.abs() < 1e-15) {
        Some(h.map(|z| z.re))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermitian_eigen, hermiticity_defect, max_abs};

    fn bloch_consistency(model: &SingleParticleModel) {
        let h = build_single_particle(model).unwrap();
        assert!(hermiticity_defect(&h) < 1e-15);
        let b = model.bands;
        for k in model.momenta().unwrap() {
            let hk = model.bloch_hamiltonian(k);
            for a in 0..b {
                // Bloch wave e^{ik·r} ⊗ e_a
                let psi = crate::linalg::CVector::from_fn(model.orbitals(), |idx, _| {
                    let cell = idx / b;
                    if idx % b != a {
                        return c(0.0);
                    }
                    let [x, y] = model.cell_position(cell);
                    Complex64::from_polar(1.0, k[0] * x as f64 + k[1] * y as f64)
                });
                let hpsi = &h * &psi;
                let expected = crate::linalg::CVector::from_fn(model.orbitals(), |idx, _| {
                    let cell = idx / b;
                    let [x, y] = model.cell_position(cell);
                    hk[(idx % b, a)] * Complex64::from_polar(1.0, k[0] * x as f64 + k[1] * y as f64)
                });
                assert!((hpsi - expected).camax() < 1e-12);
            }
        }
    }

    #[test]
    fn bloch_consistency_all_models() {
        bloch_consistency(&SingleParticleModel::ti1d(0.3, 6, LatticeBoundary::Periodic));
        bloch_consistency(&SingleParticleModel::ti1d(0.3, 5, LatticeBoundary::AntiPeriodic));
        bloch_consistency(&SingleParticleModel::qwz(
            1.0,
            4,
            3,
            [LatticeBoundary::Periodic, LatticeBoundary::AntiPeriodic],
        ));
        bloch_consistency(&SingleParticleModel::metal(
            1.0,
            4,
            4,
            [LatticeBoundary::Periodic, LatticeBoundary::Periodic],
        ));
        bloch_consistency(&SingleParticleModel::chain(0.7, 2, LatticeBoundary::Periodic));
    }

    #[test]
    fn quoted_bloch_forms() {
        let m = 0.4;
        let ti = SingleParticleModel::ti1d(m, 8, LatticeBoundary::Periodic);
        let qwz = SingleParticleModel::qwz(m, 8, 8, [LatticeBoundary::Periodic; 2]);
        let [sx, sy, sz] = pauli();
        for &(kx, ky) in &[(0.0, 0.0), (0.3, 1.2), (PI, -0.7), (2.0, 2.5)] {
            let expected = sz.scale(m - f64::cos(kx)) + sx.scale(f64::sin(kx));
            assert!(max_abs(&(ti.bloch_hamiltonian([kx, 0.0]) - expected)) < 1e-15);
            let expected = sz.scale(m - f64::cos(kx) - f64::cos(ky)) + sx.scale(f64::sin(kx)) + sy.scale(f64::sin(ky));
            assert!(max_abs(&(qwz.bloch_hamiltonian([kx, ky]) - expected)) < 1e-15);
        }
        let metal = SingleParticleModel::metal(0.8, 4, 4, [LatticeBoundary::Periodic; 2]);
        let e = metal.bloch_hamiltonian([0.3, 1.1])[(0, 0)];
        assert!((e.re + 1.6 * (0.3f64.cos() + 1.1f64.cos())).abs() < 1e-15);
    }

    #[test]
    fn two_cell_ti_at_m_zero() {
        let model = SingleParticleModel::ti1d(0.0, 2, LatticeBoundary::Periodic);
        let (vals, _) = hermitian_eigen(&build_single_particle(&model).unwrap());
        for (v, e) in vals.iter().zip([-1.0, -1.0, 1.0, 1.0]) {
            assert!((v - e).abs() < 1e-14);
        }
    }

    #[test]
    fn open_chain_levels() {
        let model = SingleParticleModel::chain(1.0, 6, LatticeBoundary::Open);
        let h = real_part(&build_single_particle(&model).unwrap()).unwrap();
        let levels = crate::linalg::symmetric_eigen(&h).0;
        for (n, e) in levels.iter().enumerate() {
            let expected = -2.0 * (PI * (n + 1) as f64 / 7.0).cos();
            assert!((e - expected).abs() < 1e-12);
        }
    }
}
