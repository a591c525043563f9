//! Number-conserving free fermions: the Fermi-sea correlation matrix on a
//! subsystem and the closed-form variances, entropies and bounds it gives.
//!
//! With `C_ij = ⟨c_i† c_j⟩` restricted to `Ω` and a quadratic observable
//! `A = Σ c_i† a_ij c_j` supported on `Ω`, Wick's theorem gives
//! `δ²A = Tr[aᵀ C aᵀ (1 − C)]`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::entanglement::EntropyReport;
use crate::linalg::{c, commutator_norm, hermitian_eigen, hermiticity_defect, max_abs, trace_re, CMatrix};
use crate::models::lattice::{build_single_particle, SingleParticleModel};
use crate::{Complex64, Error, Result};

/// Single-particle levels closer than this to each other across the Fermi
/// level make the ground state ambiguous.
pub const FERMI_TOL: f64 = 1e-9;

/// Commutator norm below which a single-particle observable counts as
/// conserved by the subsystem state.
pub const FREE_CONSERVATION_TOL: f64 = 1e-8;

/// Which single-particle levels are occupied.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Filling {
    /// The lowest half of all levels; needs an even orbital count.
    HalfFilling,
    /// Every level below `μ_F`.
    FermiEnergy(f64),
    /// The lowest `N_f` levels; ties are broken by level order.
    Count(usize),
}

/// `C` on the subsystem together with its spectrum `ξ`.
#[derive(Clone, Debug)]
pub struct CorrelationMatrix {
    matrix: CMatrix,
    xi: Vec<f64>,
    vectors: CMatrix,
}

impl CorrelationMatrix {
    /// Diagonalizes a Hermitian matrix whose eigenvalues lie in `[0, 1]`.
    pub fn from_matrix(matrix: CMatrix) -> Result<Self> {
        let scale = max_abs(&matrix).max(1.0);
        if matrix.nrows() != matrix.ncols() || hermiticity_defect(&matrix) > 1e-10 * scale {
            return Err(Error::InvalidParams(
                "correlation matrix must be square and Hermitian".into(),
            ));
        }
        let (xi, vectors) = hermitian_eigen(&matrix);
        if xi.iter().any(|&x| !(-1e-10..=1.0 + 1e-10).contains(&x)) {
            return Err(Error::InvalidParams("correlation eigenvalues outside [0, 1]".into()));
        }
        let xi = xi.into_iter().map(|x| x.clamp(0.0, 1.0)).collect();
        Ok(Self { matrix, xi, vectors })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Ascending eigenvalues.
    pub fn xi(&self) -> &[f64] {
        &self.xi
    }

    /// Columns are the eigenvectors `|ξ⟩`.
    pub fn vectors(&self) -> &CMatrix {
        &self.vectors
    }

    pub fn dim(&self) -> usize {
        self.xi.len()
    }

    /// `⟨N_Ω⟩ = Tr C`.
    pub fn mean_number(&self) -> f64 {
        trace_re(&self.matrix)
    }

    /// `min |ξ − ½|`, how close the most entangled mode is to maximal mixing.
    pub fn xi_min_gap(&self) -> f64 {
        self.xi.iter().map(|x| (x - 0.5).abs()).fold(f64::INFINITY, f64::min)
    }
}

/// Indices of the occupied levels among `energies`.
fn occupied(energies: &[f64], filling: Filling) -> Result<Vec<usize>> {
    let mut order: Vec<usize> = (0..energies.len()).collect();
    order.sort_by(|&a, &b| energies[a].total_cmp(&energies[b]));
    let count = match filling {
        Filling::HalfFilling => {
            if !energies.len().is_multiple_of(2) {
                return Err(Error::InvalidParams(format!(
                    "half filling needs an even number of levels, got {}",
                    energies.len()
                )));
            }
            energies.len() / 2
        }
        Filling::Count(n) => {
            if n > energies.len() {
                return Err(Error::InvalidParams(format!(
                    "{n} fermions exceed {} levels",
                    energies.len()
                )));
            }
            return Ok(order[..n].to_vec());
        }
        Filling::FermiEnergy(mu) => {
            if let Some(&i) = order.iter().find(|&&i| (energies[i] - mu).abs() < FERMI_TOL) {
                return Err(Error::DegenerateFermiLevel {
                    below: energies[i],
                    above: energies[i],
                });
            }
            order.iter().take_while(|&&i| energies[i] < mu).count()
        }
    };
    if count > 0 && count < energies.len() {
        let below = energies[order[count - 1]];
        let above = energies[order[count]];
        if above - below < FERMI_TOL {
            return Err(Error::DegenerateFermiLevel { below, above });
        }
    }
    Ok(order[..count].to_vec())
}

/// `C` restricted to the orbitals `omega`, from a dense single-particle
/// Hamiltonian.
pub fn correlation_from_hamiltonian(h: &CMatrix, filling: Filling, omega: &[usize]) -> Result<CorrelationMatrix> {
    check_orbitals(omega, h.nrows())?;
    let (energies, vecs) = hermitian_eigen(h);
    let occ = occupied(&energies, filling)?;
    let n = omega.len();
    let mut m = CMatrix::zeros(n, n);
    for &k in &occ {
        let phi = vecs.column(k);
        for (a, &i) in omega.iter().enumerate() {
            let pi = phi[i].conj();
            for (b, &j) in omega.iter().enumerate() {
                m[(a, b)] += pi * phi[j];
            }
        }
    }
    CorrelationMatrix::from_matrix(m)
}

fn check_orbitals(omega: &[usize], total: usize) -> Result<()> {
    if omega.is_empty() {
        return Err(Error::InvalidParams("subsystem has no orbitals".into()));
    }
    if let Some(&bad) = omega.iter().find(|&&i| i >= total) {
        return Err(Error::InvalidParams(format!(
            "orbital {bad} outside a system of {total}"
        )));
    }
    let mut sorted = omega.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidParams("subsystem lists an orbital twice".into()));
    }
    Ok(())
}

/// Dense route: diagonalize the full real-space Hamiltonian.
pub fn correlation_matrix_dense(
    model: &SingleParticleModel,
    filling: Filling,
    omega: &[usize],
) -> Result<CorrelationMatrix> {
    correlation_from_hamiltonian(&build_single_particle(model)?, filling, omega)
}

/// Momentum route for lattices closed in every direction.
///
/// With Bloch states `φ(r, α) = e^{ik·r} u_α(k)/√N`,
/// `C_{(r,α),(r',β)} = (1/N) Σ_{occupied k,n} e^{ik·(r'−r)} u_α*(k) u_β(k)`,
/// which depends only on the displacement `r' − r` and is evaluated once per
/// displacement present in `omega`.
pub fn correlation_matrix_bloch(
    model: &SingleParticleModel,
    filling: Filling,
    omega: &[usize],
) -> Result<CorrelationMatrix> {
    model.validate()?;
    check_orbitals(omega, model.orbitals())?;
    let momenta = model
        .momenta()
        .ok_or_else(|| Error::InvalidParams("momentum route needs a closed lattice".into()))?;
    let b = model.bands;
    let mut energies = Vec::with_capacity(momenta.len() * b);
    let mut states: Vec<(usize, Vec<Complex64>)> = Vec::with_capacity(momenta.len() * b);
    for (ki, &k) in momenta.iter().enumerate() {
        let (e, u) = hermitian_eigen(&model.bloch_hamiltonian(k));
        for (band, &energy) in e.iter().enumerate().take(b) {
            energies.push(energy);
            states.push((ki, u.column(band).iter().copied().collect()));
        }
    }
    let occ = occupied(&energies, filling)?;
    let norm = momenta.len() as f64;

    let mut cache: HashMap<[i64; 2], CMatrix> = HashMap::new();
    let mut block = |d: [i64; 2]| -> CMatrix {
        cache
            .entry(d)
            .or_insert_with(|| {
                let mut m = CMatrix::zeros(b, b);
                for &s in &occ {
                    let (ki, u) = &states[s];
                    let k = momenta[*ki];
                    let phase = Complex64::from_polar(1.0 / norm, k[0] * d[0] as f64 + k[1] * d[1] as f64);
                    for a in 0..b {
                        let ua = u[a].conj() * phase;
                        for a2 in 0..b {
                            m[(a, a2)] += ua * u[a2];
                        }
                    }
                }
                m
            })
            .clone()
    };

    let n = omega.len();
    let mut m = CMatrix::zeros(n, n);
    let cells: Vec<([i64; 2], usize)> = omega
        .iter()
        .map(|&i| {
            let [x, y] = model.cell_position(i / b);
            ([x as i64, y as i64], i % b)
        })
        .collect();
    for (p, &(r, alpha)) in cells.iter().enumerate() {
        for (q, &(r2, beta)) in cells.iter().enumerate() {
            m[(p, q)] = block([r2[0] - r[0], r2[1] - r[1]])[(alpha, beta)];
        }
    }
    CorrelationMatrix::from_matrix(m)
}

/// Uses the momentum route when the lattice is closed and the dense route
/// otherwise.
pub fn correlation_matrix(model: &SingleParticleModel, filling: Filling, omega: &[usize]) -> Result<CorrelationMatrix> {
    if model.momenta().is_some() {
        correlation_matrix_bloch(model, filling, omega)
    } else {
        correlation_matrix_dense(model, filling, omega)
    }
}

/// A quadratic observable `A = Σ_{ij∈Ω} c_i† a_ij c_j`.
#[derive(Clone, Debug)]
pub struct SingleParticleObservable {
    name: String,
    /// `aᵀ`, the matrix entering the trace formulas.
    transposed: CMatrix,
    eigenvalues: Vec<f64>,
}

impl SingleParticleObservable {
    /// From the first-quantized matrix `a`, which must be Hermitian.
    pub fn new(name: impl Into<String>, a: CMatrix) -> Result<Self> {
        if a.nrows() != a.ncols() || hermiticity_defect(&a) > 1e-12 * max_abs(&a).max(1.0) {
            return Err(Error::InvalidParams("observable must be square and Hermitian".into()));
        }
        let transposed = a.transpose();
        let (eigenvalues, _) = hermitian_eigen(&transposed);
        Ok(Self {
            name: name.into(),
            transposed,
            eigenvalues,
        })
    }

    /// The subsystem particle number.
    pub fn number(dim: usize) -> Self {
        Self {
            name: "N".into(),
            transposed: CMatrix::identity(dim, dim),
            eigenvalues: vec![1.0; dim],
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn transposed(&self) -> &CMatrix {
        &self.transposed
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Ascending eigenvalues `A_j`.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// `max_j A_j²`.
    pub fn a2_max(&self) -> f64 {
        self.eigenvalues.iter().map(|a| a * a).fold(0.0, f64::max)
    }

    /// `min_j A_j²`.
    pub fn a2_min(&self) -> f64 {
        self.eigenvalues.iter().map(|a| a * a).fold(f64::INFINITY, f64::min)
    }
}

fn check_pair(corr: &CorrelationMatrix, a: &SingleParticleObservable) -> Result<()> {
    if corr.dim() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: corr.dim(),
            found: a.dim(),
        });
    }
    Ok(())
}

/// `δ²A = Tr[aᵀ C aᵀ (1 − C)]`.
pub fn variance_free(corr: &CorrelationMatrix, a: &SingleParticleObservable) -> Result<f64> {
    check_pair(corr, a)?;
    let at = a.transposed();
    let one_minus = CMatrix::identity(corr.dim(), corr.dim()) - corr.matrix();
    Ok(trace_re(&(at * corr.matrix() * at * one_minus)))
}

/// The same variance in the eigenbasis of `C`:
/// `Σ_{ξ,ξ'} ξ (1 − ξ') |⟨ξ|aᵀ|ξ'⟩|²`.
pub fn variance_free_eigenbasis(corr: &CorrelationMatrix, a: &SingleParticleObservable) -> Result<f64> {
    check_pair(corr, a)?;
    let v = corr.vectors();
    let rotated = v.adjoint() * a.transposed() * v;
    let xi = corr.xi();
    let mut sum = 0.0;
    for (p, &x) in xi.iter().enumerate() {
        for (q, &x2) in xi.iter().enumerate() {
            sum += x * (1.0 - x2) * rotated[(p, q)].norm_sqr();
        }
    }
    Ok(sum)
}

/// `δ²N_Ω = Σ ξ (1 − ξ)`.
pub fn number_variance(corr: &CorrelationMatrix) -> f64 {
    corr.xi().iter().map(|x| x * (1.0 - x)).sum()
}

/// `Tr(C − C²)`, the number variance without diagonalizing.
pub fn number_variance_trace(corr: &CorrelationMatrix) -> f64 {
    let m = corr.matrix();
    trace_re(m) - trace_re(&(m * m))
}

/// Entropies of the Gaussian state with correlation spectrum `ξ`.
pub fn entropy_from_xi(corr: &CorrelationMatrix) -> EntropyReport {
    let h = |p: f64| if p > 0.0 { -p * p.ln() } else { 0.0 };
    let mut s_vn = 0.0;
    let mut s2 = 0.0;
    for &x in corr.xi() {
        s_vn += h(x) + h(1.0 - x);
        s2 -= (x * x + (1.0 - x) * (1.0 - x)).ln();
    }
    EntropyReport { s_vn, s_renyi2: s2 }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConservedBounds {
    pub variance: f64,
    /// `A²_min δ²N_Ω`.
    pub lower: f64,
    /// `A²_max δ²N_Ω`.
    pub upper: f64,
    pub holds: bool,
}

/// `A²_min δ²N_Ω ≤ δ²A ≤ A²_max δ²N_Ω` for an observable commuting with `C`.
pub fn conserved_bounds(corr: &CorrelationMatrix, a: &SingleParticleObservable) -> Result<ConservedBounds> {
    check_pair(corr, a)?;
    let norm = commutator_norm(a.transposed(), corr.matrix());
    if norm >= FREE_CONSERVATION_TOL {
        return Err(Error::NotConserved { norm });
    }
    let variance = variance_free(corr, a)?;
    let dn = number_variance(corr);
    let lower = a.a2_min() * dn;
    let upper = a.a2_max() * dn;
    let tol = 1e-10 * (1.0 + upper);
    Ok(ConservedBounds {
        variance,
        lower,
        upper,
        holds: lower <= variance + tol && variance <= upper + tol,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VolumeLawBound {
    pub variance: f64,
    /// `Tr[C (aᵀ)²]`.
    pub first_bound: f64,
    /// `A²_max ⌈⟨N_Ω⟩⌉`.
    pub second_bound: f64,
    pub holds: bool,
}

/// `δ²A ≤ Tr[C (aᵀ)²] ≤ A²_max ⌈⟨N_Ω⟩⌉`, valid for any quadratic `A`.
pub fn volume_law_bound(corr: &CorrelationMatrix, a: &SingleParticleObservable) -> Result<VolumeLawBound> {
    check_pair(corr, a)?;
    let variance = variance_free(corr, a)?;
    let at = a.transposed();
    let first_bound = trace_re(&(corr.matrix() * at * at));
    let second_bound = a.a2_max() * (corr.mean_number() - 1e-10).max(0.0).ceil();
    let tol = 1e-10 * (1.0 + second_bound);
    Ok(VolumeLawBound {
        variance,
        first_bound,
        second_bound,
        holds: variance <= first_bound + tol && first_bound <= second_bound + tol,
    })
}

/// The number operator's first-quantized matrix on `dim` orbitals.
pub fn identity(dim: usize) -> CMatrix {
    CMatrix::from_diagonal_element(dim, dim, c(1.0))
}
