//! Measurement uncertainty of subsystem observables expressed through the
//! entanglement spectrum.
//!
//! For a reduced state `ρ = Σ λᵢ |λᵢ⟩⟨λᵢ|` and an observable `A` on the
//! subsystem, the variance obeys
//! `δ²A ≥ ½ Σᵢⱼ λᵢλⱼ (⟨A⟩ᵢ − ⟨A⟩ⱼ)²`, with equality when `[A, ρ] = 0`. In that
//! case it depends only on the outcome probabilities `λ_{Aᵢ}`.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::basis::SiteKind;
use crate::entanglement::{
    entanglement_spectrum, entropies_of, EntanglementSpectrum, EntropyReport, ReducedDensityMatrix,
};
use crate::linalg::{c, commutator_norm, hermiticity_defect, max_abs, sum_of_local, trace_re, CMatrix};
use crate::models::spin::spin_matrices;
use crate::{Error, Result};

/// Max-norm of `[A, ρ]` below which `A` counts as conserved.
pub const CONSERVATION_TOL: f64 = 1e-10;

/// Eigenvalues of `A` closer than this are one measurement outcome.
pub const OUTCOME_TOL: f64 = 1e-8;

/// A Hermitian operator on the subsystem Hilbert space, indexed by subsystem
/// configuration codes.
#[derive(Clone, Debug)]
pub struct SubsystemObservable {
    name: String,
    matrix: CMatrix,
    local_terms: Option<Vec<CMatrix>>,
}

impl SubsystemObservable {
    /// Wraps an arbitrary matrix, rejecting non-Hermitian input.
    pub fn from_matrix(name: impl Into<String>, matrix: CMatrix) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        let defect = hermiticity_defect(&matrix);
        if defect > 1e-12 * max_abs(&matrix).max(1.0) {
            return Err(Error::InvalidParams(format!(
                "observable is not Hermitian (defect {defect:e})"
            )));
        }
        Ok(Self {
            name: name.into(),
            matrix,
            local_terms: None,
        })
    }

    /// `Σ_{i∈Ω} a_i` for one single-site operator repeated on every site.
    pub fn sum_of_local(name: impl Into<String>, local: &CMatrix, sites: usize) -> Self {
        Self {
            name: name.into(),
            matrix: sum_of_local(local, sites),
            local_terms: Some(vec![local.clone(); sites]),
        }
    }

    /// Total `Sᶻ` of the subsystem; for fermions this is `Σ (nᵢ − ½)`.
    pub fn sz(kind: SiteKind, sites: usize) -> Self {
        let [_, _, sz] = spin_matrices(kind);
        Self::sum_of_local("Sz", &sz, sites)
    }

    /// Total `Sˣ` of the subsystem.
    pub fn sx(kind: SiteKind, sites: usize) -> Self {
        let [sx, _, _] = spin_matrices(kind);
        Self::sum_of_local("Sx", &sx, sites)
    }

    /// Subsystem particle number `N_Ω = Σ nᵢ`.
    pub fn number(sites: usize) -> Self {
        let n = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(0.0), c(1.0)]));
        Self::sum_of_local("N", &n, sites)
    }

    /// Subsystem fermion parity, `+1` for an even particle number.
    pub fn parity(sites: usize) -> Self {
        let dim = 1usize << sites;
        let diag: Vec<_> = (0..dim)
            .map(|code: usize| c(if code.count_ones().is_multiple_of(2) { 1.0 } else { -1.0 }))
            .collect();
        Self {
            name: "P".into(),
            matrix: CMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag)),
            local_terms: None,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn is_sum_of_local(&self) -> bool {
        self.local_terms.is_some()
    }

    pub fn local_terms(&self) -> Option<&[CMatrix]> {
        self.local_terms.as_deref()
    }

    /// `factor · A`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            name: format!("{factor}*{}", self.name),
            matrix: self.matrix.scale(factor),
            local_terms: self
                .local_terms
                .as_ref()
                .map(|t| t.iter().map(|m| m.scale(factor)).collect()),
        }
    }
}

fn check_dims(rho: &ReducedDensityMatrix, a: &SubsystemObservable) -> Result<()> {
    if rho.dim() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: a.dim(),
        });
    }
    Ok(())
}

/// Whether `[A, ρ] = 0` within [`CONSERVATION_TOL`], together with the
/// commutator's max-norm.
pub fn check_conserved(rho: &ReducedDensityMatrix, a: &SubsystemObservable) -> Result<(bool, f64)> {
    check_dims(rho, a)?;
    let norm = commutator_norm(a.matrix(), rho.matrix());
    Ok((norm < CONSERVATION_TOL, norm))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyReport {
    pub observable: String,
    pub mean: f64,
    pub variance: f64,
    pub pairwise_lower_bound: f64,
    pub conserved: bool,
    pub commutator_norm: f64,
}

/// `δ²A = Tr(ρA²) − Tr(ρA)²` plus the pairwise lower bound.
///
/// For a conserved observable the bound is evaluated in a simultaneous
/// eigenbasis, where it coincides with the variance.
pub fn variance_direct(rho: &ReducedDensityMatrix, a: &SubsystemObservable) -> Result<UncertaintyReport> {
    let (conserved, norm) = check_conserved(rho, a)?;
    let ra = rho.matrix() * a.matrix();
    let mean = trace_re(&ra);
    let second = trace_re(&(ra * a.matrix()));
    let variance = (second - mean * mean).max(0.0);
    let spec = entanglement_spectrum(rho, conserved.then_some(a))?;
    Ok(UncertaintyReport {
        observable: a.name().to_string(),
        mean,
        variance,
        pairwise_lower_bound: variance_pairwise(&spec, a)?,
        conserved,
        commutator_norm: norm,
    })
}

/// `(⟨A⟩ᵢ, ⟨A²⟩ᵢ)` in every eigenvector of the spectrum.
fn eigen_moments(spec: &EntanglementSpectrum, a: &SubsystemObservable) -> Result<Vec<(f64, f64)>> {
    let vecs = spec
        .vectors
        .as_ref()
        .ok_or_else(|| Error::InvalidParams("entanglement spectrum carries no eigenvectors".into()))?;
    if vecs.nrows() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: vecs.nrows(),
            found: a.dim(),
        });
    }
    let av = a.matrix() * vecs;
    Ok((0..vecs.ncols())
        .map(|i| {
            let first = vecs.column(i).dotc(&av.column(i)).re;
            let second = av.column(i).norm_squared();
            (first, second)
        })
        .collect())
}

/// `½ Σᵢⱼ λᵢλⱼ (⟨A⟩ᵢ − ⟨A⟩ⱼ)²`, a lower bound on `δ²A` that is exact for
/// conserved `A` when the spectrum's vectors are also eigenvectors of `A`.
pub fn variance_pairwise(spec: &EntanglementSpectrum, a: &SubsystemObservable) -> Result<f64> {
    let means: Vec<f64> = eigen_moments(spec, a)?.into_iter().map(|m| m.0).collect();
    let mut sum = 0.0;
    for (i, (&li, &ai)) in spec.lambdas.iter().zip(&means).enumerate() {
        for (&lj, &aj) in spec.lambdas[..i].iter().zip(&means) {
            sum += li * lj * (ai - aj) * (ai - aj);
        }
    }
    Ok(sum)
}

/// Probabilities of the distinct measurement outcomes of a conserved
/// observable, the coarse-grained entanglement spectrum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutcomeDistribution {
    pub outcomes: Vec<f64>,
    pub probabilities: Vec<f64>,
}

impl OutcomeDistribution {
    /// Validates strictly increasing outcomes and unit total probability.
    pub fn new(outcomes: Vec<f64>, probabilities: Vec<f64>) -> Result<Self> {
        if outcomes.len() != probabilities.len() {
            return Err(Error::DimensionMismatch {
                expected: outcomes.len(),
                found: probabilities.len(),
            });
        }
        if outcomes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParams("outcomes must be strictly increasing".into()));
        }
        let total: f64 = probabilities.iter().sum();
        if (total - 1.0).abs() > 1e-10 || probabilities.iter().any(|&p| p < -1e-12) {
            return Err(Error::InvalidParams(format!("probabilities sum to {total}")));
        }
        Ok(Self {
            outcomes,
            probabilities,
        })
    }

    pub fn mean(&self) -> f64 {
        self.outcomes.iter().zip(&self.probabilities).map(|(a, p)| a * p).sum()
    }

    /// Probability of the outcome within [`OUTCOME_TOL`] of `value`, zero if
    /// there is none.
    pub fn probability_of(&self, value: f64) -> f64 {
        self.outcomes
            .iter()
            .position(|&a| (a - value).abs() < OUTCOME_TOL)
            .map_or(0.0, |i| self.probabilities[i])
    }

    /// Writes `outcome,probability` rows.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["outcome", "probability"])?;
        for (a, p) in self.outcomes.iter().zip(&self.probabilities) {
            w.write_record([a.to_string(), p.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Sums `λᵢ` over eigenvectors sharing a charge.
pub fn outcome_distribution(spec: &EntanglementSpectrum) -> Result<OutcomeDistribution> {
    let charges = spec.charges.as_ref().ok_or(Error::MissingCharges)?;
    let mut pairs: Vec<(f64, f64)> = charges.iter().copied().zip(spec.lambdas.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut outcomes: Vec<f64> = Vec::new();
    let mut probabilities: Vec<f64> = Vec::new();
    let mut anchor = f64::NEG_INFINITY;
    for (a, l) in pairs {
        if a - anchor < OUTCOME_TOL {
            *probabilities.last_mut().expect("anchor set with first outcome") += l;
        } else {
            anchor = a;
            outcomes.push(a);
            probabilities.push(l);
        }
    }
    let total: f64 = probabilities.iter().sum();
    if total > 0.0 {
        probabilities.iter_mut().for_each(|p| *p /= total);
    }
    OutcomeDistribution::new(outcomes, probabilities)
}

/// `Σ_{Aᵢ>Aⱼ} λ_{Aᵢ} λ_{Aⱼ} (Aᵢ − Aⱼ)²`.
pub fn variance_sector(dist: &OutcomeDistribution) -> f64 {
    let mut sum = 0.0;
    for (i, (&ai, &pi)) in dist.outcomes.iter().zip(&dist.probabilities).enumerate() {
        for (&aj, &pj) in dist.outcomes[..i].iter().zip(&dist.probabilities) {
            sum += pi * pj * (ai - aj) * (ai - aj);
        }
    }
    sum
}

/// Rule choosing the low-lying subspace `Σ` of the entanglement Hamiltonian.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubspaceSelector {
    /// Every eigenvector.
    All,
    /// The `k` largest `λᵢ`.
    Lowest(usize),
    /// All `λᵢ ≥ threshold`.
    Threshold(f64),
    /// Levels below the largest relative gap `(ε_{k+1} − ε_k)/ε_k` in the
    /// entanglement energies `εᵢ = −ln λᵢ`, among the lowest `max_levels`
    /// finite ones. Relative gaps keep the far tail, where `ε` grows quickly,
    /// from outweighing the gap above a low-lying manifold.
    EntanglementGap { max_levels: usize },
}

impl Default for SubspaceSelector {
    fn default() -> Self {
        Self::EntanglementGap { max_levels: 16 }
    }
}

impl SubspaceSelector {
    /// Indices into the descending spectrum.
    pub fn select(self, spec: &EntanglementSpectrum) -> Vec<usize> {
        let n = spec.len();
        match self {
            Self::All => (0..n).collect(),
            Self::Lowest(k) => (0..k.min(n)).collect(),
            Self::Threshold(t) => (0..n).filter(|&i| spec.lambdas[i] >= t).collect(),
            Self::EntanglementGap { max_levels } => {
                let finite = spec.entanglement_energies();
                let mut eps: Vec<f64> = finite.iter().copied().take(max_levels).collect();
                // Levels of vanishing weight sit at infinite ε, an unbounded gap.
                if finite.len() < n && finite.len() <= max_levels {
                    eps.push(f64::INFINITY);
                }
                if eps.len() < 2 {
                    return (0..eps.len()).collect();
                }
                let relative = |k: usize| (eps[k + 1] - eps[k]) / eps[k].max(1e-12);
                let cut = (0..eps.len() - 1)
                    .max_by(|&a, &b| relative(a).total_cmp(&relative(b)))
                    .expect("at least one gap");
                (0..=cut).collect()
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubspaceBoundReport {
    pub size: usize,
    pub lambda_sigma: f64,
    pub sigma_variance: f64,
    pub bound: f64,
    pub full_variance: f64,
}

/// `δ²A ≥ λ_Σ² δ²_Σ A`, where `δ²_Σ A` is the variance in the normalized
/// projection `ρ_Σ` of `ρ` onto the selected eigenvectors.
pub fn subspace_bound(
    spec: &EntanglementSpectrum,
    a: &SubsystemObservable,
    selector: SubspaceSelector,
) -> Result<SubspaceBoundReport> {
    let moments = eigen_moments(spec, a)?;
    let chosen = selector.select(spec);
    if chosen.is_empty() {
        return Err(Error::EmptySubspace);
    }
    let lambda_sigma: f64 = chosen.iter().map(|&i| spec.lambdas[i]).sum();
    let sigma_variance = if lambda_sigma > 0.0 {
        let m1: f64 = chosen.iter().map(|&i| spec.lambdas[i] * moments[i].0).sum::<f64>() / lambda_sigma;
        let m2: f64 = chosen.iter().map(|&i| spec.lambdas[i] * moments[i].1).sum::<f64>() / lambda_sigma;
        (m2 - m1 * m1).max(0.0)
    } else {
        0.0
    };
    let total: f64 = spec.lambdas.iter().sum();
    let m1: f64 = spec.lambdas.iter().zip(&moments).map(|(l, m)| l * m.0).sum::<f64>() / total;
    let m2: f64 = spec.lambdas.iter().zip(&moments).map(|(l, m)| l * m.1).sum::<f64>() / total;
    Ok(SubspaceBoundReport {
        size: chosen.len(),
        lambda_sigma,
        sigma_variance,
        bound: lambda_sigma * lambda_sigma * sigma_variance,
        full_variance: (m2 - m1 * m1).max(0.0),
    })
}

/// The flat microstate model of `N_a` independently fluctuating spins.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountingDemo {
    pub n_a: usize,
    /// Outcomes are the number `n` of up spins, `0..=N_a`.
    pub distribution: OutcomeDistribution,
    pub variance: f64,
    pub entropy: EntropyReport,
}

/// `2^{N_a}` equally weighted microstates, grouped by their number of up
/// spins into a binomial outcome distribution.
pub fn counting_demo(n_a: usize) -> Result<CountingDemo> {
    if n_a == 0 {
        return Err(Error::InvalidParams("counting demo needs at least one spin".into()));
    }
    let n = n_a as f64;
    let mut probabilities = Vec::with_capacity(n_a + 1);
    let mut p = 0.5f64.powi(n_a as i32);
    for k in 0..=n_a {
        probabilities.push(p);
        p *= (n - k as f64) / (k as f64 + 1.0);
    }
    let distribution = OutcomeDistribution::new((0..=n_a).map(|k| k as f64).collect(), probabilities)?;
    let lambda = 0.5f64.powi(n_a as i32);
    Ok(CountingDemo {
        n_a,
        variance: variance_sector(&distribution),
        distribution,
        entropy: entropies_of([(lambda, 2f64.powi(n_a as i32))]),
    })
}

/// Writes reports as CSV rows with a header.
pub fn write_reports_csv<W: Write>(reports: &[UncertaintyReport], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in reports {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::entanglement::entropies;
    use crate::Complex64;
    use std::f64::consts::LN_2;

    fn diag_rho(p: &[f64]) -> ReducedDensityMatrix {
        let d: Vec<Complex64> = p.iter().map(|&x| c(x)).collect();
        ReducedDensityMatrix::generic(CMatrix::from_diagonal(&nalgebra::DVector::from_vec(d)))
    }

    #[test]
    fn bell_pair_site_variance() {
        let rho = diag_rho(&[0.5, 0.5]);
        let sz = SubsystemObservable::sz(SiteKind::SpinHalf, 1);
        let r = variance_direct(&rho, &sz).unwrap();
        assert!(r.conserved && r.mean.abs() < 1e-15);
        assert!((r.variance - 0.25).abs() < 1e-15 && (r.pairwise_lower_bound - 0.25).abs() < 1e-15);
    }

    #[test]
    fn maximally_mixed_state_conserves_everything() {
        let rho = diag_rho(&[0.25; 4]);
        let sx = SubsystemObservable::sx(SiteKind::SpinHalf, 2);
        assert!(check_conserved(&rho, &sx).unwrap().0);
    }

    #[test]
    fn sector_formula_examples() {
        let aklt = OutcomeDistribution::new(vec![-1.0, 0.0, 1.0], vec![0.25, 0.5, 0.25]).unwrap();
        assert!((variance_sector(&aklt) - 0.5).abs() < 1e-15);
        let parity = OutcomeDistribution::new(vec![-1.0, 1.0], vec![0.5, 0.5]).unwrap();
        assert!((variance_sector(&parity) - 1.0).abs() < 1e-15);
        let single = OutcomeDistribution::new(vec![3.0], vec![1.0]).unwrap();
        assert_eq!(variance_sector(&single), 0.0);
        assert!(OutcomeDistribution::new(vec![1.0, 0.0], vec![0.5, 0.5]).is_err());
        assert!(OutcomeDistribution::new(vec![0.0, 1.0], vec![0.5, 0.4]).is_err());
    }

    #[test]
    fn outcomes_need_charges() {
        let spec = EntanglementSpectrum::from_probabilities(vec![1.0], None).unwrap();
        assert!(matches!(outcome_distribution(&spec), Err(Error::MissingCharges)));
        let labelled =
            EntanglementSpectrum::from_probabilities(vec![0.4, 0.1, 0.5], Some(vec![1.0, 1.0 + 1e-12, 0.0])).unwrap();
        let dist = outcome_distribution(&labelled).unwrap();
        assert_eq!(dist.outcomes.len(), 2);
        assert!((dist.probability_of(1.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn subspace_bound_edge_cases() {
        let rho = diag_rho(&[0.5, 0.3, 0.2, 0.0]);
        let n = SubsystemObservable::number(2);
        let spec = entanglement_spectrum(&rho, Some(&n)).unwrap();
        let full = variance_direct(&rho, &n).unwrap().variance;
        let all = subspace_bound(&spec, &n, SubspaceSelector::All).unwrap();
        assert!((all.bound - full).abs() < 1e-14 && (all.lambda_sigma - 1.0).abs() < 1e-14);
        let one = subspace_bound(&spec, &n, SubspaceSelector::Lowest(1)).unwrap();
        assert_eq!(one.bound, 0.0);
        assert!(matches!(
            subspace_bound(&spec, &n, SubspaceSelector::Lowest(0)),
            Err(Error::EmptySubspace)
        ));
    }

    #[test]
    fn gap_selector_finds_degenerate_manifold() {
        let spec =
            EntanglementSpectrum::from_probabilities(vec![0.24, 0.24, 0.24, 0.24, 0.02, 0.01, 0.01], None).unwrap();
        assert_eq!(SubspaceSelector::default().select(&spec), vec![0, 1, 2, 3]);
        assert_eq!(SubspaceSelector::Threshold(0.015).select(&spec).len(), 5);
        let rank_four = EntanglementSpectrum::from_probabilities(vec![0.26, 0.25, 0.25, 0.24, 0.0, 0.0], None).unwrap();
        assert_eq!(SubspaceSelector::default().select(&rank_four).len(), 4);
    }

    #[test]
    fn counting_examples() {
        let one = counting_demo(1).unwrap();
        assert!((one.variance - 0.25).abs() < 1e-15 && (one.entropy.s_vn - LN_2).abs() < 1e-15);
        let eight = counting_demo(8).unwrap();
        assert!((eight.variance - 2.0).abs() < 1e-13);
        assert!((eight.entropy.s_vn - 8.0 * LN_2).abs() < 1e-12);
        for n in 1..40 {
            let d = counting_demo(n).unwrap();
            let ratio = d.variance / d.entropy.s_vn;
            assert!((ratio - 1.0 / (4.0 * LN_2)).abs() < 1e-12, "N_a = {n}");
            assert!((d.entropy.s_renyi2 - d.entropy.s_vn).abs() < 1e-10);
        }
    }

    #[test]
    fn counting_matches_materialized_microstates() {
        for n_a in 1..=8usize {
            let dim = 1usize << n_a;
            let rho = diag_rho(&vec![1.0 / dim as f64; dim]);
            let up = SubsystemObservable::number(n_a);
            let spec = entanglement_spectrum(&rho, Some(&up)).unwrap();
            let dist = outcome_distribution(&spec).unwrap();
            let demo = counting_demo(n_a).unwrap();
            for (p, q) in dist.probabilities.iter().zip(&demo.distribution.probabilities) {
                assert!((p - q).abs() < 1e-12);
            }
            assert!((entropies(&spec).s_vn - demo.entropy.s_vn).abs() < 1e-12);
        }
    }

    #[test]
    fn reports_serialize() {
        let rho = diag_rho(&[0.5, 0.5]);
        let r = variance_direct(&rho, &SubsystemObservable::sz(SiteKind::SpinHalf, 1)).unwrap();
        let json = serde_json::to_string(&r).unwrap();
        let back: UncertaintyReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, r);
        let mut out = Vec::new();
        write_reports_csv(&[r], &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        assert!(text.starts_with("observable,mean,variance,pairwise_lower_bound,conserved,commutator_norm\n"));
    }

    #[test]
    fn rejects_non_hermitian() {
        let mut m = CMatrix::zeros(2, 2);
        m[(0, 1)] = c(1.0);
        assert!(SubsystemObservable::from_matrix("bad", m).is_err());
    }
}
