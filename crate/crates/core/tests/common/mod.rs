//! Independent reference implementations used by the integration tests and
//! the acceptance harness. Nothing here calls into the library's numerics:
//! the oracles build their own operators from the defining formulas.
#![allow(dead_code)]

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type CMatrix = DMatrix<Complex64>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Ascending eigenvalues and eigenvectors of a Hermitian matrix.
pub fn eigh(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let e = m.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..e.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| e.eigenvalues[a].total_cmp(&e.eigenvalues[b]));
    let values = order.iter().map(|&i| e.eigenvalues[i]).collect();
    let vectors = CMatrix::from_fn(m.nrows(), m.ncols(), |r, c| e.eigenvectors[(r, order[c])]);
    (values, vectors)
}

pub fn eigvalsh(m: &CMatrix) -> Vec<f64> {
    eigh(m).0
}

pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().iter().sum()
}

/// Entries uniform in the unit square.
pub fn ginibre(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    CMatrix::from_fn(n, n, |_, _| cx(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

pub fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    let g = ginibre(rng, n);
    (&g + g.adjoint()) * cx(0.5, 0.0)
}

pub fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> CMatrix {
    ginibre(rng, n).qr().q()
}

pub fn diag(values: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        values.len(),
        values.iter().map(|&v| cx(v, 0.0)),
    ))
}

/// `U diag(values) U†`.
pub fn rotate(u: &CMatrix, values: &[f64]) -> CMatrix {
    u * diag(values) * u.adjoint()
}

/// Probability vector of length `n` with random rank and, sometimes,
/// repeated weights.
pub fn random_weights(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let rank = rng.gen_range(1..=n);
    let mut w: Vec<f64> = (0..n)
        .map(|i| if i < rank { rng.gen_range(0.01..1.0) } else { 0.0 })
        .collect();
    if n >= 2 && rng.gen_bool(0.3) {
        w[1] = w[0];
    }
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|x| *x /= total);
    w
}

/// A density matrix and, with `commuting`, an observable sharing its
/// eigenbasis (with repeated eigenvalues so outcomes can be degenerate);
/// otherwise a generic Hermitian observable.
pub fn random_pair(rng: &mut ChaCha8Rng, n: usize, commuting: bool) -> (CMatrix, CMatrix) {
    let u = random_unitary(rng, n);
    let rho = rotate(&u, &random_weights(rng, n));
    let a = if commuting {
        let values: Vec<f64> = (0..n).map(|_| f64::from(rng.gen_range(-2i32..=2))).collect();
        rotate(&u, &values)
    } else {
        random_hermitian(rng, n)
    };
    (rho, a)
}

/// `Tr(ρA²) − Tr(ρA)²`.
pub fn variance(rho: &CMatrix, a: &CMatrix) -> f64 {
    let m1 = trace(&(rho * a)).re;
    let m2 = trace(&(rho * a * a)).re;
    m2 - m1 * m1
}

/// `(S_vN, S₂)` of a probability vector.
pub fn entropies(p: &[f64]) -> (f64, f64) {
    let s = p.iter().filter(|&&x| x > 0.0).map(|x| -x * x.ln()).sum();
    let s2 = -p.iter().map(|x| x * x).sum::<f64>().ln();
    (s, s2)
}

/// Number-conserving fermions on `n` modes, exactly diagonalized in the
/// `particles` sector with Jordan–Wigner signs worked out from scratch.
pub struct FockOracle {
    pub modes: usize,
    pub configs: Vec<u64>,
    pub ground: nalgebra::DVector<Complex64>,
    pub energy: f64,
    pub gap: f64,
}

/// `c_i† c_j |mask⟩ = sign |new⟩`.
pub fn hop(mask: u64, i: usize, j: usize) -> Option<(u64, f64)> {
    if mask >> j & 1 == 0 {
        return None;
    }
    let sign_j = if (mask & ((1 << j) - 1)).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    };
    let m = mask & !(1 << j);
    if m >> i & 1 == 1 {
        return None;
    }
    let sign_i = if (m & ((1 << i) - 1)).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    };
    Some((m | 1 << i, sign_i * sign_j))
}

impl FockOracle {
    pub fn new(h: &CMatrix, particles: usize) -> Self {
        let modes = h.nrows();
        let configs: Vec<u64> = (0..1u64 << modes)
            .filter(|m| m.count_ones() as usize == particles)
            .collect();
        let hmb = Self::quadratic(&configs, modes, h, &(0..modes).collect::<Vec<_>>());
        let (e, v) = eigh(&hmb);
        Self {
            modes,
            ground: v.column(0).into_owned(),
            energy: e[0],
            gap: e.get(1).map_or(f64::INFINITY, |e1| e1 - e[0]),
            configs,
        }
    }

    /// Many-body matrix of `Σ_{ab} a_ab c†_{Ω_a} c_{Ω_b}` on `configs`.
    fn quadratic(configs: &[u64], _modes: usize, a: &CMatrix, omega: &[usize]) -> CMatrix {
        let index = |m: u64| configs.binary_search(&m).expect("particle number is conserved");
        let mut out = CMatrix::zeros(configs.len(), configs.len());
        for (col, &mask) in configs.iter().enumerate() {
            for (p, &i) in omega.iter().enumerate() {
                for (q, &j) in omega.iter().enumerate() {
                    if a[(p, q)] == cx(0.0, 0.0) {
                        continue;
                    }
                    if let Some((new, s)) = hop(mask, i, j) {
                        out[(index(new), col)] += a[(p, q)] * s;
                    }
                }
            }
        }
        out
    }

    /// Ground-state variance of the quadratic observable with matrix `a`
    /// on the modes `omega`.
    pub fn variance(&self, a: &CMatrix, omega: &[usize]) -> f64 {
        let op = Self::quadratic(&self.configs, self.modes, a, omega);
        let av = &op * &self.ground;
        let mean = self.ground.dotc(&av).re;
        av.norm_squared() - mean * mean
    }

    pub fn number_variance(&self, omega: &[usize]) -> f64 {
        let k = omega.len();
        self.variance(&CMatrix::identity(k, k), omega)
    }

    /// Reduced density matrix of the modes `omega`, obtained by moving them
    /// to the front of the mode ordering (with the fermionic reordering
    /// sign) and tracing out the rest.
    pub fn rdm(&self, omega: &[usize]) -> CMatrix {
        let env: Vec<usize> = (0..self.modes).filter(|m| !omega.contains(m)).collect();
        let mut m = CMatrix::zeros(1 << omega.len(), 1 << env.len());
        for (amp, &mask) in self.ground.iter().zip(&self.configs) {
            let order: Vec<usize> = omega.iter().chain(&env).copied().collect();
            let occupied: Vec<usize> = order.iter().copied().filter(|&s| mask >> s & 1 == 1).collect();
            // sign of the permutation sorting the occupied modes back into
            // their original order
            let mut inversions = 0;
            for x in 0..occupied.len() {
                for y in x + 1..occupied.len() {
                    if occupied[x] > occupied[y] {
                        inversions += 1;
                    }
                }
            }
            let sign = if inversions % 2 == 0 { 1.0 } else { -1.0 };
            let row = omega
                .iter()
                .enumerate()
                .fold(0, |acc, (b, &s)| acc | ((mask >> s & 1) << b));
            let col = env
                .iter()
                .enumerate()
                .fold(0, |acc, (b, &s)| acc | ((mask >> s & 1) << b));
            m[(row as usize, col as usize)] += amp * sign;
        }
        &m * m.adjoint()
    }

    pub fn entropies(&self, omega: &[usize]) -> (f64, f64) {
        let p: Vec<f64> = eigvalsh(&self.rdm(omega)).into_iter().map(|x| x.max(0.0)).collect();
        entropies(&p)
    }

    /// `⟨c_i† c_j⟩` restricted to `omega`.
    pub fn correlation(&self, omega: &[usize]) -> CMatrix {
        let index = |m: u64| self.configs.binary_search(&m).unwrap();
        CMatrix::from_fn(omega.len(), omega.len(), |p, q| {
            let mut s = cx(0.0, 0.0);
            for (col, &mask) in self.configs.iter().enumerate() {
                if let Some((new, sign)) = hop(mask, omega[p], omega[q]) {
                    s += self.ground[index(new)].conj() * self.ground[col] * sign;
                }
            }
            s
        })
    }
}

/// Kitaev chain on the full Fock space, built from its defining formula.
pub fn kitaev_fock(t: f64, delta: f64, mu: f64, v: f64, sites: usize, periodic: bool) -> DMatrix<f64> {
    let dim = 1usize << sites;
    let mut h = DMatrix::zeros(dim, dim);
    let mut bonds: Vec<(usize, usize)> = (0..sites - 1).map(|j| (j, j + 1)).collect();
    if periodic && sites > 2 {
        bonds.push((sites - 1, 0));
    }
    let sgn = |mask: u64, j: usize| {
        if (mask & ((1 << j) - 1)).count_ones().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    };
    let create = |mask: u64, j: usize| (mask >> j & 1 == 0).then(|| (mask | 1 << j, sgn(mask, j)));
    let annihilate = |mask: u64, j: usize| (mask >> j & 1 == 1).then(|| (mask & !(1 << j), sgn(mask, j)));
    for mask in 0..dim as u64 {
        let col = mask as usize;
        let n = |j: usize| (mask >> j & 1) as f64;
        h[(col, col)] -= mu * mask.count_ones() as f64;
        for &(i, j) in &bonds {
            h[(col, col)] += v * (n(i) - 0.5) * (n(j) - 0.5);
            // −t/2 (c_i† c_j + c_j† c_i)
            for (a, b) in [(i, j), (j, i)] {
                if let Some((m1, s1)) = annihilate(mask, b) {
                    if let Some((m2, s2)) = create(m1, a) {
                        h[(m2 as usize, col)] -= 0.5 * t * s1 * s2;
                    }
                }
            }
            // −Δ/2 (c_i† c_j† + c_j c_i)
            if let Some((m1, s1)) = create(mask, j) {
                if let Some((m2, s2)) = create(m1, i) {
                    h[(m2 as usize, col)] -= 0.5 * delta * s1 * s2;
                }
            }
            if let Some((m1, s1)) = annihilate(mask, i) {
                if let Some((m2, s2)) = annihilate(m1, j) {
                    h[(m2 as usize, col)] -= 0.5 * delta * s1 * s2;
                }
            }
        }
    }
    h
}

/// Spin operators `(Sˣ, Sʸ, Sᶻ)` for local dimension 2 or 3, in the order of
/// increasing `m` so that digit `k` of a configuration code is `m = k − S`.
pub fn spin_ops(d: usize) -> [CMatrix; 3] {
    let s = (d as f64 - 1.0) / 2.0;
    let m = |k: usize| k as f64 - s;
    // ⟨m+1|S⁺|m⟩ = √(s(s+1) − m(m+1))
    let plus = CMatrix::from_fn(d, d, |r, c| {
        if r == c + 1 {
            cx((s * (s + 1.0) - m(c) * (m(c) + 1.0)).sqrt(), 0.0)
        } else {
            cx(0.0, 0.0)
        }
    });
    let minus = plus.adjoint();
    let sx = (&plus + &minus) * cx(0.5, 0.0);
    let sy = (&plus - &minus) * cx(0.0, -0.5);
    let sz = CMatrix::from_fn(d, d, |r, c| if r == c { cx(m(r), 0.0) } else { cx(0.0, 0.0) });
    [sx, sy, sz]
}

/// Dense chain Hamiltonian
/// `Σ_bonds [B + α B²] + D Σ (Sᶻ)² + h Σ Sᶻ` with `B = Σ_a J_a S^a S^a`,
/// built by Kronecker products.
pub struct SpinChain {
    pub d: usize,
    pub j: [f64; 3],
    pub alpha: f64,
    pub anisotropy: f64,
    pub h: f64,
    pub sites: usize,
    pub periodic: bool,
}

impl SpinChain {
    pub fn dense(&self) -> CMatrix {
        let s = spin_ops(self.d);
        let d = self.d;
        // site 0 is the least significant digit, so it is the rightmost factor
        let embed = |ops: &[(usize, &CMatrix)]| {
            let mut m = CMatrix::identity(1, 1);
            for site in (0..self.sites).rev() {
                let local = ops
                    .iter()
                    .find(|(p, _)| *p == site)
                    .map_or_else(|| CMatrix::identity(d, d), |(_, o)| (*o).clone());
                m = m.kronecker(&local);
            }
            m
        };
        let dim = d.pow(self.sites as u32);
        let mut out = CMatrix::zeros(dim, dim);
        let mut bonds: Vec<(usize, usize)> = (0..self.sites - 1).map(|k| (k, k + 1)).collect();
        if self.periodic && self.sites > 2 {
            bonds.push((self.sites - 1, 0));
        }
        for &(a, b) in &bonds {
            let mut bond = CMatrix::zeros(dim, dim);
            for (c, op) in s.iter().enumerate() {
                bond += embed(&[(a, op), (b, op)]) * cx(self.j[c], 0.0);
            }
            if self.alpha != 0.0 {
                out += &bond * &bond * cx(self.alpha, 0.0);
            }
            out += bond;
        }
        let sz2 = &s[2] * &s[2];
        for site in 0..self.sites {
            out += embed(&[(site, &s[2])]) * cx(self.h, 0.0);
            out += embed(&[(site, &sz2)]) * cx(self.anisotropy, 0.0);
        }
        out
    }
}

/// Exact block statistics of the periodic AKLT ground state from its
/// matrix-product form.
pub mod aklt_mps {
    use super::*;

    /// Spin-1 operators in the order `m = +1, 0, −1`.
    pub fn sz() -> DMatrix<f64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 0.0, -1.0]))
    }

    pub fn sx() -> DMatrix<f64> {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        DMatrix::from_row_slice(3, 3, &[0.0, r, 0.0, r, 0.0, r, 0.0, r, 0.0])
    }

    fn tensors() -> [CMatrix; 3] {
        let a = (2.0f64 / 3.0).sqrt();
        let b = (1.0f64 / 3.0).sqrt();
        let m = |v: [f64; 4]| CMatrix::from_row_slice(2, 2, &v.map(|x| cx(x, 0.0)));
        [m([0.0, a, 0.0, 0.0]), m([-b, 0.0, 0.0, b]), m([0.0, 0.0, -a, 0.0])]
    }

    /// `E_O = Σ_{ss'} O_{s's} A_s ⊗ conj(A_{s'})`.
    fn transfer(o: &CMatrix) -> CMatrix {
        let a = tensors();
        let mut e = CMatrix::zeros(4, 4);
        for s in 0..3 {
            for s2 in 0..3 {
                if o[(s2, s)] != cx(0.0, 0.0) {
                    e += a[s].kronecker(&a[s2].map(|z| z.conj())) * o[(s2, s)];
                }
            }
        }
        e
    }

    fn power(m: &CMatrix, k: usize) -> CMatrix {
        (0..k).fold(CMatrix::identity(m.nrows(), m.ncols()), |acc, _| acc * m)
    }

    /// Distribution of the block sum `Σ_{j∈Ω} O_j` over its integer outcomes
    /// `−N..=N` for a block of `n` sites in a ring of `l` sites.
    pub fn block_distribution(op: &DMatrix<f64>, l: usize, n: usize) -> Vec<(i32, f64)> {
        let eig = SymmetricEigen::new(op.clone());
        let identity = transfer(&CMatrix::identity(3, 3));
        let norm = trace(&power(&identity, l));
        let rest = power(&identity, l - n);
        let k = 2 * n + 1;
        let thetas: Vec<f64> = (0..k)
            .map(|j| 2.0 * std::f64::consts::PI * j as f64 / k as f64)
            .collect();
        let generating: Vec<Complex64> = thetas
            .iter()
            .map(|&th| {
                let phase = CMatrix::from_fn(3, 3, |r, c| {
                    (0..3)
                        .map(|q| {
                            Complex64::from_polar(1.0, th * eig.eigenvalues[q])
                                * eig.eigenvectors[(r, q)]
                                * eig.eigenvectors[(c, q)]
                        })
                        .sum()
                });
                trace(&(power(&transfer(&phase), n) * &rest)) / norm
            })
            .collect();
        (-(n as i32)..=n as i32)
            .map(|m| {
                let p: Complex64 = thetas
                    .iter()
                    .zip(&generating)
                    .map(|(&th, g)| g * Complex64::from_polar(1.0, -th * f64::from(m)))
                    .sum::<Complex64>()
                    / k as f64;
                (m, p.re)
            })
            .collect()
    }

    pub fn block_variance(op: &DMatrix<f64>, l: usize, n: usize) -> f64 {
        let d = block_distribution(op, l, n);
        let mean: f64 = d.iter().map(|(m, p)| f64::from(*m) * p).sum();
        d.iter().map(|(m, p)| (f64::from(*m) - mean).powi(2) * p).sum()
    }

    /// `E₀ = −(2/3) L` for the isotropic chain with `α = 1/3`.
    pub fn energy(l: usize) -> f64 {
        -2.0 * l as f64 / 3.0
    }
}
