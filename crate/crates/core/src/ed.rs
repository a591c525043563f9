//! Ground states of sparse Hamiltonians.
//!
//! Small matrices are diagonalized densely. Larger ones use Lanczos with full
//! reorthogonalization, extracting one eigenpair at a time and deflating the
//! converged vectors so that degenerate levels are resolved. Every returned
//! eigenpair has its residual `‖Hψ − Eψ‖` checked against
//! `residual_tol · ‖H‖`, with `‖H‖` the largest absolute row sum.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::basis::SectorBasis;
use crate::linalg::symmetric_eigen;
use crate::sparse::SparseOperator;
use crate::{Complex64, Error, Result};

#[derive(Clone, Debug)]
pub struct SolverOptions {
    /// Matrices up to this dimension are diagonalized densely.
    pub dense_threshold: usize,
    /// Relative energy splitting below which levels count as degenerate.
    pub degeneracy_tol: f64,
    pub residual_tol: f64,
    /// Krylov dimension per Lanczos cycle.
    pub krylov_dim: usize,
    pub max_restarts: usize,
    pub seed: u64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            dense_threshold: 1024,
            degeneracy_tol: 1e-8,
            residual_tol: 1e-10,
            krylov_dim: 120,
            max_restarts: 60,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ManyBodyState {
    pub basis: Arc<SectorBasis>,
    pub amplitudes: Vec<Complex64>,
    pub energy: f64,
}

impl ManyBodyState {
    pub fn new(basis: Arc<SectorBasis>, amplitudes: Vec<Complex64>, energy: f64) -> Result<Self> {
        if amplitudes.len() != basis.len() {
            return Err(Error::DimensionMismatch {
                expected: basis.len(),
                found: amplitudes.len(),
            });
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::InvalidParams("zero state vector".into()));
        }
        let amplitudes = amplitudes.into_iter().map(|a| a / norm).collect();
        Ok(Self {
            basis,
            amplitudes,
            energy,
        })
    }

    pub fn from_real(basis: Arc<SectorBasis>, amplitudes: &[f64], energy: f64) -> Result<Self> {
        Self::new(
            basis,
            amplitudes.iter().map(|&a| Complex64::new(a, 0.0)).collect(),
            energy,
        )
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }
}

#[derive(Clone, Debug)]
pub struct GroundStateReport {
    /// Lowest levels, energies non-decreasing.
    pub states: Vec<ManyBodyState>,
    /// `E_k − E_{k−1}`: distance from the highest returned level to the first
    /// excluded one; infinite when the space has no further level.
    pub gap: f64,
    /// `E_1 − E_0` when at least two levels are known, else infinite.
    pub ground_splitting: f64,
    /// Whether the ground level is degenerate within `degeneracy_tol · ‖H‖`.
    pub degenerate: bool,
    pub scale: f64,
}

impl GroundStateReport {
    pub fn ground(&self) -> &ManyBodyState {
        &self.states[0]
    }

    pub fn energies(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.energy).collect()
    }
}

/// The `k` lowest eigenpairs of `h`, plus one extra level (when it exists)
/// to measure the gap.
pub fn ground_state(h: &SparseOperator, k: usize, opts: &SolverOptions) -> Result<GroundStateReport> {
    if k == 0 {
        return Err(Error::InvalidParams("at least one level must be requested".into()));
    }
    let dim = h.dim();
    let wanted = (k + 1).min(dim);
    let pairs = lowest_eigenpairs(h, wanted, opts)?;
    let scale = h.scale().max(f64::MIN_POSITIVE);

    let energies: Vec<f64> = pairs.iter().map(|(e, _)| *e).collect();
    let kept = k.min(dim);
    let gap = if energies.len() > kept {
        energies[kept] - energies[kept - 1]
    } else {
        f64::INFINITY
    };
    let ground_splitting = if energies.len() > 1 {
        energies[1] - energies[0]
    } else {
        f64::INFINITY
    };
    let states = pairs
        .into_iter()
        .take(kept)
        .map(|(e, v)| ManyBodyState::from_real(h.basis().clone(), &v, e))
        .collect::<Result<Vec<_>>>()?;
    Ok(GroundStateReport {
        states,
        gap: gap.max(0.0),
        ground_splitting: ground_splitting.max(0.0),
        degenerate: ground_splitting < opts.degeneracy_tol * scale,
        scale,
    })
}

/// The `n` lowest eigenpairs, energies ascending.
pub fn lowest_eigenpairs(h: &SparseOperator, n: usize, opts: &SolverOptions) -> Result<Vec<(f64, Vec<f64>)>> {
    let dim = h.dim();
    let n = n.min(dim);
    let pairs = if dim <= opts.dense_threshold {
        dense_lowest(h, n)
    } else {
        lanczos_lowest(h, n, opts)?
    };
    let scale = h.scale().max(f64::MIN_POSITIVE);
    for (e, v) in &pairs {
        let r = residual(h, *e, v);
        if r > opts.residual_tol * scale {
            return Err(Error::NotConverged {
                iterations: 0,
                residual: r,
            });
        }
    }
    Ok(pairs)
}

fn dense_lowest(h: &SparseOperator, n: usize) -> Vec<(f64, Vec<f64>)> {
    let (vals, vecs) = symmetric_eigen(&h.to_dense());
    (0..n)
        .map(|i| (vals[i], vecs.column(i).iter().copied().collect()))
        .collect()
}

/// `‖H v − e v‖` for unit `v`.
pub fn residual(h: &SparseOperator, e: f64, v: &[f64]) -> f64 {
    let hv = h.apply(v);
    hv.iter().zip(v).map(|(a, b)| (a - e * b).powi(2)).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = dot(v, v).sqrt();
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

/// Removes the components along `basis` twice (classical Gram–Schmidt with
/// reorthogonalization).
fn orthogonalize(v: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        for q in basis {
            let p = dot(q, v);
            axpy(-p, q, v);
        }
    }
}

fn random_unit(dim: usize, rng: &mut ChaCha8Rng, locked: &[Vec<f64>]) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..dim).map(|_| rng.gen::<f64>() - 0.5).collect();
        orthogonalize(&mut v, locked);
        if normalize(&mut v) > 1e-8 {
            return v;
        }
    }
}

fn lanczos_lowest(h: &SparseOperator, n: usize, opts: &SolverOptions) -> Result<Vec<(f64, Vec<f64>)>> {
    let dim = h.dim();
    let scale = h.scale().max(f64::MIN_POSITIVE);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut locked: Vec<Vec<f64>> = Vec::with_capacity(n);
    let mut pairs = Vec::with_capacity(n);
    for _ in 0..n {
        let mut start = random_unit(dim, &mut rng, &locked);
        let mut last_residual = f64::INFINITY;
        let mut converged = None;
        for _ in 0..=opts.max_restarts {
            let (theta, y) = lanczos_cycle(
                h,
                &start,
                &locked,
                2.0 * scale,
                opts.krylov_dim,
                opts.residual_tol * scale,
            );
            let r = residual(h, theta, &y);
            last_residual = r;
            if r <= 0.5 * opts.residual_tol * scale {
                converged = Some((theta, y));
                break;
            }
            start = y;
        }
        let (theta, y) = converged.ok_or(Error::NotConverged {
            iterations: opts.krylov_dim * (opts.max_restarts + 1),
            residual: last_residual,
        })?;
        locked.push(y.clone());
        pairs.push((theta, y));
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(pairs)
}

/// One Lanczos cycle from `start` for `H + σ Σ |v⟩⟨v|` over the `locked`
/// vectors `v`. With `σ` above the spectral width the locked levels move to
/// the top of the spectrum; a plain projection would leave them at zero,
/// below the wanted level whenever the spectrum is positive. Returns the
/// lowest Ritz pair.
fn lanczos_cycle(
    h: &SparseOperator,
    start: &[f64],
    locked: &[Vec<f64>],
    penalty: f64,
    krylov_dim: usize,
    tol: f64,
) -> (f64, Vec<f64>) {
    let dim = h.dim();
    let m_max = krylov_dim.min(dim - locked.len()).max(1);
    let mut q0 = start.to_vec();
    orthogonalize(&mut q0, locked);
    normalize(&mut q0);

    let mut basis: Vec<Vec<f64>> = vec![q0];
    let mut alphas = Vec::with_capacity(m_max);
    let mut betas: Vec<f64> = Vec::with_capacity(m_max);
    let mut w = vec![0.0; dim];
    loop {
        let j = basis.len() - 1;
        h.matvec(&basis[j], &mut w);
        for v in locked {
            let overlap = dot(v, &basis[j]);
            axpy(penalty * overlap, v, &mut w);
        }
        let alpha = dot(&basis[j], &w);
        alphas.push(alpha);
        orthogonalize(&mut w, &basis);
        let beta = dot(&w, &w).sqrt();

        let m = alphas.len();
        let done = m >= m_max || beta < 1e-14 * (alpha.abs() + 1.0);
        // Ritz residual of the lowest pair is β |s_m|.
        let check = done || m % 10 == 0;
        if check {
            let (theta, s) = tridiagonal_lowest(&alphas, &betas);
            if done || beta * s[m - 1].abs() < 0.1 * tol {
                let mut y = vec![0.0; dim];
                for (coef, q) in s.iter().zip(&basis) {
                    axpy(*coef, q, &mut y);
                }
                orthogonalize(&mut y, locked);
                normalize(&mut y);
                return (theta, y);
            }
        }
        betas.push(beta);
        let next: Vec<f64> = w.iter().map(|x| x / beta).collect();
        basis.push(next);
    }
}

fn tridiagonal_lowest(alphas: &[f64], betas: &[f64]) -> (f64, Vec<f64>) {
    let m = alphas.len();
    let t = nalgebra::DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            alphas[i]
        } else if i + 1 == j {
            betas[i]
        } else if j + 1 == i {
            betas[j]
        } else {
            0.0
        }
    });
    let (vals, vecs) = symmetric_eigen(&t);
    (vals[0], vecs.column(0).iter().copied().collect())
}

/// Lowest Ritz value after each of the first `steps` plain Lanczos steps from
/// a seeded start vector.
pub fn ritz_history(h: &SparseOperator, steps: usize, seed: u64) -> Vec<f64> {
    let dim = h.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut q = random_unit(dim, &mut rng, &[]);
    let mut basis = vec![q.clone()];
    let mut alphas = Vec::new();
    let mut betas = Vec::new();
    let mut history = Vec::new();
    let mut w = vec![0.0; dim];
    for _ in 0..steps.min(dim) {
        h.matvec(&q, &mut w);
        let alpha = dot(&q, &w);
        alphas.push(alpha);
        orthogonalize(&mut w, &basis);
        history.push(tridiagonal_lowest(&alphas, &betas).0);
        let beta = normalize(&mut w);
        if beta < 1e-14 {
            break;
        }
        betas.push(beta);
        q = w.clone();
        basis.push(q.clone());
    }
    history
}

/// Index of the canonical ground state among per-sector reports listed in
/// order of preference: the lowest energy wins, and levels within
/// `degeneracy_tol · ‖H‖` of it are resolved in favour of the earlier sector.
pub fn canonical_ground(reports: &[GroundStateReport], opts: &SolverOptions) -> Option<usize> {
    let lowest = reports.iter().map(|r| r.ground().energy).fold(f64::INFINITY, f64::min);
    reports
        .iter()
        .position(|r| r.ground().energy - lowest <= opts.degeneracy_tol * r.scale.max(f64::MIN_POSITIVE))
}
