//! Reduced density matrices, entanglement spectra and entropies.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::basis::{Bipartition, SectorBasis, SiteKind};
use crate::ed::ManyBodyState;
use crate::linalg::{c, commutator_norm, hermitian_eigen, trace_re, CMatrix};
use crate::uncertainty::{SubsystemObservable, CONSERVATION_TOL, OUTCOME_TOL};
use crate::{Complex64, Error, Result};

/// Probabilities below this carry no entanglement energy and are skipped in
/// logarithms.
pub const LAMBDA_CUTOFF: f64 = 1e-14;

/// `ρ_Ω` on the unrestricted subsystem space of `sites` sites of `kind`, with
/// subsystem configuration codes as row/column indices.
#[derive(Clone, Debug)]
pub struct ReducedDensityMatrix {
    matrix: CMatrix,
    kind: SiteKind,
    sites: usize,
}

impl ReducedDensityMatrix {
    /// Wraps an explicit density matrix; it must be square with unit trace.
    pub fn from_matrix(kind: SiteKind, sites: usize, matrix: CMatrix) -> Result<Self> {
        let dim = kind.local_dim().pow(sites as u32);
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: matrix.nrows(),
            });
        }
        Ok(Self { matrix, kind, sites })
    }

    /// A density matrix of arbitrary dimension, for analyses that are not tied
    /// to a lattice.
    pub fn generic(matrix: CMatrix) -> Self {
        Self {
            matrix,
            kind: SiteKind::SpinHalf,
            sites: 0,
        }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn kind(&self) -> SiteKind {
        self.kind
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn trace(&self) -> f64 {
        trace_re(&self.matrix)
    }
}

/// `ρ_Ω = Tr_Ω̄ |Ψ⟩⟨Ψ|`.
pub fn reduced_density_matrix(state: &ManyBodyState, part: &Bipartition) -> Result<ReducedDensityMatrix> {
    reduced_density_matrix_from_amplitudes(&state.basis, &state.amplitudes, part)
}

/// Partial trace of an amplitude vector over a sector basis.
///
/// Amplitudes are grouped by environment configuration; each group
/// contributes `ψ(a, e) ψ(b, e)*` to `ρ_ab`. For fermions the codes are
/// Jordan–Wigner ordered, so a contiguous `Ω` needs no extra signs for
/// parity-even subsystem observables.
pub fn reduced_density_matrix_from_amplitudes(
    basis: &SectorBasis,
    amplitudes: &[Complex64],
    part: &Bipartition,
) -> Result<ReducedDensityMatrix> {
    if part.sites() != basis.sites() {
        return Err(Error::InvalidBipartition(format!(
            "bipartition of {} sites applied to a {}-site basis",
            part.sites(),
            basis.sites()
        )));
    }
    if amplitudes.len() != basis.len() {
        return Err(Error::DimensionMismatch {
            expected: basis.len(),
            found: amplitudes.len(),
        });
    }
    let kind = basis.kind();
    let dim = part.subsystem_dim(kind);
    let mut entries: Vec<(u64, u64, Complex64)> = basis
        .states()
        .iter()
        .zip(amplitudes)
        .filter(|(_, a)| a.norm_sqr() > 0.0)
        .map(|(&code, &a)| {
            let (omega, env) = part.factorize(code, kind);
            (env, omega, a)
        })
        .collect();
    entries.sort_unstable_by_key(|&(env, omega, _)| (env, omega));

    let mut rho = CMatrix::zeros(dim, dim);
    for group in entries.chunk_by(|x, y| x.0 == y.0) {
        for &(_, a, psi_a) in group {
            for &(_, b, psi_b) in group {
                rho[(a as usize, b as usize)] += psi_a * psi_b.conj();
            }
        }
    }
    let norm = trace_re(&rho);
    if norm <= 0.0 {
        return Err(Error::InvalidParams("state has zero norm".into()));
    }
    rho.unscale_mut(norm);
    ReducedDensityMatrix::from_matrix(kind, part.len(), rho)
}

/// Eigenvalues `λ_i` of `ρ_Ω`, descending, with optional eigenvectors and
/// conserved-charge labels `A_i`.
#[derive(Clone, Debug)]
pub struct EntanglementSpectrum {
    pub lambdas: Vec<f64>,
    /// Columns are `|λ_i⟩`, in the order of `lambdas`.
    pub vectors: Option<CMatrix>,
    pub charges: Option<Vec<f64>>,
}

impl EntanglementSpectrum {
    /// A spectrum without vectors, e.g. from a model calculation. The
    /// probabilities are sorted descending together with their charges.
    pub fn from_probabilities(lambdas: Vec<f64>, charges: Option<Vec<f64>>) -> Result<Self> {
        if let Some(ch) = &charges {
            if ch.len() != lambdas.len() {
                return Err(Error::DimensionMismatch {
                    expected: lambdas.len(),
                    found: ch.len(),
                });
            }
        }
        let mut order: Vec<usize> = (0..lambdas.len()).collect();
        order.sort_by(|&a, &b| lambdas[b].total_cmp(&lambdas[a]));
        Ok(Self {
            lambdas: order.iter().map(|&i| lambdas[i]).collect(),
            vectors: None,
            charges: charges.map(|ch| order.iter().map(|&i| ch[i]).collect()),
        })
    }

    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    /// `ε_i = −ln λ_i` for `λ_i` above [`LAMBDA_CUTOFF`], ascending.
    pub fn entanglement_energies(&self) -> Vec<f64> {
        self.lambdas
            .iter()
            .filter(|&&l| l > LAMBDA_CUTOFF)
            .map(|l| -l.ln())
            .collect()
    }

    /// Writes `index,lambda,charge,entanglement_energy` rows; absent values
    /// are left empty.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["index", "lambda", "charge", "entanglement_energy"])?;
        for (i, &l) in self.lambdas.iter().enumerate() {
            let charge = self.charges.as_ref().map(|ch| ch[i].to_string()).unwrap_or_default();
            let energy = if l > LAMBDA_CUTOFF {
                (-l.ln()).to_string()
            } else {
                String::new()
            };
            w.write_record([i.to_string(), l.to_string(), charge, energy])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Diagonalizes `ρ`. When `observable` is given it must commute with `ρ`; the
/// eigenvectors are then chosen as simultaneous eigenvectors and labelled by
/// their eigenvalue of the observable.
///
/// Labelling diagonalizes the observable first, grouping eigenvalues within
/// [`OUTCOME_TOL`], and then `ρ` inside each group. This fixes the charge of
/// every vector even when `ρ` has degenerate eigenvalues.
pub fn entanglement_spectrum(
    rho: &ReducedDensityMatrix,
    observable: Option<&SubsystemObservable>,
) -> Result<EntanglementSpectrum> {
    let Some(obs) = observable else {
        let (vals, vecs) = hermitian_eigen(rho.matrix());
        let n = vals.len();
        let lambdas = vals.iter().rev().map(|&l| l.clamp(0.0, 1.0)).collect();
        let vectors = CMatrix::from_fn(n, n, |r, col| vecs[(r, n - 1 - col)]);
        return Ok(EntanglementSpectrum {
            lambdas,
            vectors: Some(vectors),
            charges: None,
        });
    };
    if obs.dim() != rho.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: obs.dim(),
        });
    }
    let norm = commutator_norm(obs.matrix(), rho.matrix());
    if norm >= CONSERVATION_TOL {
        return Err(Error::NotConserved { norm });
    }

    let n = rho.dim();
    let (a_vals, a_vecs) = hermitian_eigen(obs.matrix());
    let mut triples: Vec<(f64, f64, Vec<Complex64>)> = Vec::with_capacity(n);
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && a_vals[end] - a_vals[start] < OUTCOME_TOL {
            end += 1;
        }
        let charge = a_vals[start..end].iter().sum::<f64>() / (end - start) as f64;
        let u = a_vecs.columns(start, end - start).into_owned();
        let block = u.adjoint() * rho.matrix() * &u;
        let (vals, vecs) = hermitian_eigen(&block);
        let rotated = &u * vecs;
        for (i, &l) in vals.iter().enumerate() {
            triples.push((l.clamp(0.0, 1.0), charge, rotated.column(i).iter().copied().collect()));
        }
        start = end;
    }
    triples.sort_by(|a, b| b.0.total_cmp(&a.0));
    let vectors = CMatrix::from_fn(n, n, |r, col| triples[col].2[r]);
    Ok(EntanglementSpectrum {
        lambdas: triples.iter().map(|t| t.0).collect(),
        vectors: Some(vectors),
        charges: Some(triples.iter().map(|t| t.1).collect()),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    /// `−Σ λ ln λ`, nats.
    pub s_vn: f64,
    /// `−ln Σ λ²`, nats.
    pub s_renyi2: f64,
}

impl EntropyReport {
    /// `S / (4 ln 2)`, the normalization under which a maximally entangled
    /// qubit pair has entropy `¼`, matching a `±½` variance.
    pub fn scaled(&self) -> Self {
        let f = 4.0 * std::f64::consts::LN_2;
        Self {
            s_vn: self.s_vn / f,
            s_renyi2: self.s_renyi2 / f,
        }
    }
}

/// Von Neumann and second Rényi entropies of a spectrum.
pub fn entropies(spec: &EntanglementSpectrum) -> EntropyReport {
    entropies_of(spec.lambdas.iter().map(|&l| (l, 1.0)))
}

/// Entropies of `(λ, multiplicity)` pairs. The cutoff applies to the total
/// weight `mult · λ` of a level, so a huge multiplicity of tiny eigenvalues
/// still counts.
pub fn entropies_of(levels: impl IntoIterator<Item = (f64, f64)>) -> EntropyReport {
    let mut s_vn = 0.0;
    let mut purity = 0.0;
    for (l, mult) in levels {
        purity += mult * l * l;
        if l > 0.0 && mult * l > LAMBDA_CUTOFF {
            s_vn -= mult * l * l.ln();
        }
    }
    EntropyReport {
        s_vn: s_vn.max(0.0),
        s_renyi2: (-purity.ln()).max(0.0),
    }
}

/// Dense `|ψ⟩⟨ψ|` helper for small hand-built states.
pub fn pure_state_rdm(basis: &SectorBasis, amplitudes: &[f64], part: &Bipartition) -> Result<ReducedDensityMatrix> {
    let amps: Vec<Complex64> = amplitudes.iter().map(|&a| c(a)).collect();
    reduced_density_matrix_from_amplitudes(basis, &amps, part)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::Sector;
    use crate::linalg::max_abs;
    use std::f64::consts::LN_2;

    fn bell() -> (SectorBasis, Vec<f64>) {
        let basis = SectorBasis::full(2, SiteKind::SpinHalf).unwrap();
        let s = 0.5f64.sqrt();
        // (↑↓ − ↓↑)/√2: ↑↓ is code 1, ↓↑ is code 2
        (basis, vec![0.0, s, -s, 0.0])
    }

    #[test]
    fn bell_pair() {
        let (basis, amps) = bell();
        let part = Bipartition::new(2, 0, 1).unwrap();
        let rho = pure_state_rdm(&basis, &amps, &part).unwrap();
        let expected = CMatrix::from_diagonal_element(2, 2, c(0.5));
        assert!(max_abs(&(rho.matrix() - expected)) < 1e-15);

        let sz = SubsystemObservable::sz(SiteKind::SpinHalf, 1);
        let spec = entanglement_spectrum(&rho, Some(&sz)).unwrap();
        assert_eq!(spec.lambdas, vec![0.5, 0.5]);
        let mut charges = spec.charges.clone().unwrap();
        charges.sort_by(f64::total_cmp);
        assert_eq!(charges, vec![-0.5, 0.5]);
        let e = entropies(&spec);
        assert!((e.s_vn - LN_2).abs() < 1e-15 && (e.s_renyi2 - LN_2).abs() < 1e-15);
    }

    #[test]
    fn product_state_is_rank_one() {
        let basis = SectorBasis::full(3, SiteKind::SpinHalf).unwrap();
        let mut amps = vec![0.0; 8];
        amps[7] = 1.0;
        for (start, len) in [(0, 1), (1, 1), (0, 2), (1, 2)] {
            let part = Bipartition::new(3, start, len).unwrap();
            let spec = entanglement_spectrum(&pure_state_rdm(&basis, &amps, &part).unwrap(), None).unwrap();
            assert_eq!(spec.lambdas[0], 1.0);
            assert!(spec.lambdas[1..].iter().all(|&l| l < 1e-15));
            assert_eq!(entropies(&spec).s_vn, 0.0);
            assert_eq!(spec.entanglement_energies().len(), 1);
        }
    }

    #[test]
    fn entropy_formulas() {
        let quarter = EntanglementSpectrum::from_probabilities(vec![0.25; 4], None).unwrap();
        let e = entropies(&quarter);
        assert!((e.s_vn - 2.0 * LN_2).abs() < 1e-15);
        assert!((e.s_renyi2 - 2.0 * LN_2).abs() < 1e-15);

        let skew = EntanglementSpectrum::from_probabilities(vec![0.3, 0.7], None).unwrap();
        assert_eq!(skew.lambdas, vec![0.7, 0.3]);
        let e = entropies(&skew);
        let s_vn: f64 = -(0.7f64 * 0.7f64.ln() + 0.3 * 0.3f64.ln());
        let s2: f64 = -(0.49f64 + 0.09).ln();
        assert!((e.s_vn - s_vn).abs() < 1e-15);
        assert!((e.s_renyi2 - s2).abs() < 1e-15);
        assert!((e.s_vn - 0.6109).abs() < 1e-4 && (e.s_renyi2 - 0.5447).abs() < 1e-4);
    }

    #[test]
    fn schmidt_symmetry_on_random_sector_state() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let basis = SectorBasis::new(7, SiteKind::Spin1, Some(Sector::Magnetization(2))).unwrap();
        let amps: Vec<Complex64> = (0..basis.len())
            .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        for len in 1..7 {
            let part = Bipartition::new(7, 0, len).unwrap();
            let rest = part.complement().unwrap();
            let a = entanglement_spectrum(
                &reduced_density_matrix_from_amplitudes(&basis, &amps, &part).unwrap(),
                None,
            )
            .unwrap();
            let b = entanglement_spectrum(
                &reduced_density_matrix_from_amplitudes(&basis, &amps, &rest).unwrap(),
                None,
            )
            .unwrap();
            let k = a.len().min(b.len());
            for i in 0..k {
                assert!((a.lambdas[i] - b.lambdas[i]).abs() < 1e-10);
            }
            assert!(a.lambdas[k..].iter().chain(&b.lambdas[k..]).all(|&l| l < 1e-10));
            let sum: f64 = a.lambdas.iter().sum();
            assert!((sum - 1.0).abs() < 1e-10);
            let e = entropies(&a);
            assert!(e.s_renyi2 <= e.s_vn + 1e-12);
            assert!(e.s_vn <= (a.len() as f64).ln() + 1e-12);
        }
    }

    #[test]
    fn non_conserved_label_refused() {
        // (↓↓ + ↑↓)/√2 leaves site 0 in a coherent superposition of Sz values.
        let (basis, _) = bell();
        let s = 0.5f64.sqrt();
        let amps = vec![s, s, 0.0, 0.0];
        let part = Bipartition::new(2, 0, 1).unwrap();
        let rho = pure_state_rdm(&basis, &amps, &part).unwrap();
        let sz = SubsystemObservable::sz(SiteKind::SpinHalf, 1);
        match entanglement_spectrum(&rho, Some(&sz)) {
            Err(Error::NotConserved { norm }) => assert!(norm > 0.1),
            other => panic!("expected NotConserved, got {other:?}"),
        }
    }

    #[test]
    fn spectrum_csv_export() {
        let spec = EntanglementSpectrum::from_probabilities(vec![0.5, 0.5, 0.0], Some(vec![1.0, -1.0, 0.0])).unwrap();
        let mut out = Vec::new();
        spec.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "index,lambda,charge,entanglement_energy");
        assert_eq!(lines.len(), 4);
        assert!(lines[3].ends_with(','));
        assert!(lines[1].starts_with("0,0.5,"));
    }
}
