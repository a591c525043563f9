//! TOML experiment configuration.
//!
//! A file names one experiment and may override any of its parameters in a
//! table named after the model:
//!
//! ```toml
//! experiment = "kitaev_mu_sweep"
//! seed = 0
//! output = "kitaev.csv"
//!
//! [kitaev]
//! sites = 12
//! subsystem = 6
//! mu_over_t = { start = -3.0, stop = 3.0, points = 25 }
//! ```
//!
//! Grids are either explicit lists or `{ start, stop, points }` ranges with
//! both endpoints included. Unknown keys are rejected.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::models::lattice::LatticeBoundary;
use crate::models::Boundary;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ExperimentId {
    #[serde(rename = "aklt_D_sweep")]
    AkltDSweep,
    #[serde(rename = "kitaev_mu_sweep")]
    KitaevMuSweep,
    #[serde(rename = "xxz_scaling")]
    XxzScaling,
    #[serde(rename = "ti1d_m_sweep")]
    Ti1dMSweep,
    #[serde(rename = "chern_area_law")]
    ChernAreaLaw,
    #[serde(rename = "metal_logvolume")]
    MetalLogvolume,
    #[serde(rename = "counting_demo")]
    CountingDemo,
}

impl ExperimentId {
    pub const ALL: [ExperimentId; 7] = [
        ExperimentId::AkltDSweep,
        ExperimentId::KitaevMuSweep,
        ExperimentId::XxzScaling,
        ExperimentId::Ti1dMSweep,
        ExperimentId::ChernAreaLaw,
        ExperimentId::MetalLogvolume,
        ExperimentId::CountingDemo,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentId::AkltDSweep => "aklt_D_sweep",
            ExperimentId::KitaevMuSweep => "kitaev_mu_sweep",
            ExperimentId::XxzScaling => "xxz_scaling",
            ExperimentId::Ti1dMSweep => "ti1d_m_sweep",
            ExperimentId::ChernAreaLaw => "chern_area_law",
            ExperimentId::MetalLogvolume => "metal_logvolume",
            ExperimentId::CountingDemo => "counting_demo",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            ExperimentId::AkltDSweep => {
                "spin-1 AKLT chain vs anisotropy D: δ²Sz, δ²Sx, outcome distribution, entropies"
            }
            ExperimentId::KitaevMuSweep => {
                "interacting Kitaev chain vs chemical potential: parity uncertainty and entropies"
            }
            ExperimentId::XxzScaling => {
                "critical XXZ chain, half-chain δ²Sz and entropy vs length, fitted scale factors"
            }
            ExperimentId::Ti1dMSweep => "1D two-band insulator vs mass m: number fluctuations, entropies, ξ spectrum",
            ExperimentId::ChernAreaLaw => "QWZ Chern insulator: δ²N and entropy vs square subsystem side",
            ExperimentId::MetalLogvolume => "2D square-lattice metal: δ²N and entropy vs subsystem side",
            ExperimentId::CountingDemo => "flat microstate model of N_a fluctuating spins",
        }
    }

    /// The config table holding this experiment's parameters.
    pub fn section(self) -> &'static str {
        match self {
            ExperimentId::AkltDSweep => "aklt",
            ExperimentId::KitaevMuSweep => "kitaev",
            ExperimentId::XxzScaling => "xxz",
            ExperimentId::Ti1dMSweep => "ti1d",
            ExperimentId::ChernAreaLaw => "chern",
            ExperimentId::MetalLogvolume => "metal",
            ExperimentId::CountingDemo => "counting",
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ExperimentId::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment `{s}`")))
    }
}

/// A list of parameter values.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    Values(Vec<f64>),
    Range { start: f64, stop: f64, points: usize },
}

impl Grid {
    pub fn range(start: f64, stop: f64, points: usize) -> Self {
        Grid::Range { start, stop, points }
    }

    pub fn values(&self) -> Result<Vec<f64>> {
        let v = match *self {
            Grid::Values(ref v) => v.clone(),
            Grid::Range { start, stop, points } => match points {
                0 => Vec::new(),
                1 => vec![start],
                n => (0..n)
                    .map(|i| start + (stop - start) * i as f64 / (n - 1) as f64)
                    .collect(),
            },
        };
        if v.is_empty() {
            return Err(Error::Config("grid is empty".into()));
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::Config("grid contains non-finite values".into()));
        }
        Ok(v)
    }
}

/// Size limits for the default, desk-scale runs; `large` lifts them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Budget {
    pub large: bool,
    pub max_spin1_sites: usize,
    pub max_spin_half_sites: usize,
    pub max_fermion_sites: usize,
    /// Largest single-particle matrix diagonalized in real space.
    pub max_dense_orbitals: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            large: false,
            max_spin1_sites: 12,
            max_spin_half_sites: 20,
            max_fermion_sites: 14,
            max_dense_orbitals: 4096,
        }
    }
}

impl Budget {
    pub fn check(&self, what: &str, size: usize, limit: usize) -> Result<()> {
        if !self.large && size > limit {
            return Err(Error::Config(format!(
                "{what} = {size} exceeds the default compute budget of {limit}; pass --large to allow it"
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AkltConfig {
    pub sites: usize,
    pub subsystem: usize,
    pub subsystem_start: usize,
    pub boundary: Boundary,
    pub j: f64,
    pub alpha: f64,
    pub d: Grid,
}

impl Default for AkltConfig {
    fn default() -> Self {
        Self {
            sites: 10,
            subsystem: 5,
            subsystem_start: 0,
            boundary: Boundary::Periodic,
            j: 1.0,
            alpha: 1.0 / 3.0,
            d: Grid::range(0.0, 3.0, 16),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KitaevConfig {
    pub sites: usize,
    pub subsystem: usize,
    pub subsystem_start: usize,
    pub boundary: Boundary,
    pub t: f64,
    pub delta_over_t: f64,
    pub v_over_delta: f64,
    pub mu_over_t: Grid,
}

impl Default for KitaevConfig {
    fn default() -> Self {
        Self {
            sites: 12,
            subsystem: 6,
            subsystem_start: 0,
            boundary: Boundary::Periodic,
            t: 1.0,
            delta_over_t: 0.9,
            v_over_delta: 0.5,
            mu_over_t: Grid::range(-3.0, 3.0, 25),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct XxzConfig {
    /// `Jx = Jy`.
    pub jxy: f64,
    pub jz: Vec<f64>,
    /// Even chain lengths; the subsystem is the first half.
    pub sizes: Vec<usize>,
    pub boundary: Boundary,
}

impl Default for XxzConfig {
    fn default() -> Self {
        Self {
            jxy: 1.0,
            jz: vec![0.0, 0.5, 1.0],
            sizes: vec![8, 10, 12, 14],
            boundary: Boundary::Periodic,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Ti1dConfig {
    pub m: Grid,
    pub subsystem_lengths: Vec<usize>,
    /// Total length as a multiple of the subsystem length.
    pub length_factor: usize,
    pub boundary: LatticeBoundary,
    /// Masses whose full ξ spectrum is written to a companion file.
    pub spectrum_m: Vec<f64>,
}

impl Default for Ti1dConfig {
    fn default() -> Self {
        Self {
            m: Grid::range(-2.95, 2.95, 60),
            subsystem_lengths: vec![20, 40],
            length_factor: 10,
            boundary: LatticeBoundary::Periodic,
            spectrum_m: vec![0.0],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChernConfig {
    pub m: Vec<f64>,
    pub subsystem_lengths: Vec<usize>,
    /// Torus side; defaults to three times the largest subsystem side.
    pub length: Option<usize>,
    pub boundary: [LatticeBoundary; 2],
}

impl Default for ChernConfig {
    fn default() -> Self {
        Self {
            m: vec![1.0],
            subsystem_lengths: (4..=14).collect(),
            length: None,
            boundary: [LatticeBoundary::Periodic, LatticeBoundary::AntiPeriodic],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MetalConfig {
    pub t: f64,
    pub subsystem_lengths: Vec<usize>,
    pub length: usize,
    pub boundary: [LatticeBoundary; 2],
}

impl Default for MetalConfig {
    fn default() -> Self {
        Self {
            t: 1.0,
            subsystem_lengths: (4..=16).collect(),
            length: 64,
            boundary: [LatticeBoundary::Periodic, LatticeBoundary::AntiPeriodic],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CountingConfig {
    pub n_a: Vec<usize>,
}

impl Default for CountingConfig {
    fn default() -> Self {
        Self {
            n_a: (1..=16).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentId,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub budget: Budget,
    #[serde(default)]
    pub aklt: AkltConfig,
    #[serde(default)]
    pub kitaev: KitaevConfig,
    #[serde(default)]
    pub xxz: XxzConfig,
    #[serde(default)]
    pub ti1d: Ti1dConfig,
    #[serde(default)]
    pub chern: ChernConfig,
    #[serde(default)]
    pub metal: MetalConfig,
    #[serde(default)]
    pub counting: CountingConfig,
}

impl ExperimentConfig {
    /// Defaults for `experiment`.
    pub fn new(experiment: ExperimentId) -> Self {
        Self {
            experiment,
            seed: 0,
            output: None,
            budget: Budget::default(),
            aklt: AkltConfig::default(),
            kitaev: KitaevConfig::default(),
            xxz: XxzConfig::default(),
            ti1d: Ti1dConfig::default(),
            chern: ChernConfig::default(),
            metal: MetalConfig::default(),
            counting: CountingConfig::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// The experiment's own parameter table plus the shared keys, as TOML.
    pub fn to_toml(&self) -> String {
        #[derive(Serialize)]
        struct Shown<'a, T: Serialize> {
            experiment: ExperimentId,
            seed: u64,
            #[serde(skip_serializing_if = "Option::is_none")]
            output: &'a Option<PathBuf>,
            budget: &'a Budget,
            #[serde(flatten)]
            section: std::collections::BTreeMap<&'static str, &'a T>,
        }
        fn render<T: Serialize>(cfg: &ExperimentConfig, section: &T) -> String {
            let shown = Shown {
                experiment: cfg.experiment,
                seed: cfg.seed,
                output: &cfg.output,
                budget: &cfg.budget,
                section: [(cfg.experiment.section(), section)].into_iter().collect(),
            };
            toml::to_string(&shown).expect("configuration serializes to TOML")
        }
        match self.experiment {
            ExperimentId::AkltDSweep => render(self, &self.aklt),
            ExperimentId::KitaevMuSweep => render(self, &self.kitaev),
            ExperimentId::XxzScaling => render(self, &self.xxz),
            ExperimentId::Ti1dMSweep => render(self, &self.ti1d),
            ExperimentId::ChernAreaLaw => render(self, &self.chern),
            ExperimentId::MetalLogvolume => render(self, &self.metal),
            ExperimentId::CountingDemo => render(self, &self.counting),
        }
    }

    /// Checks the selected experiment's parameters and compute budget.
    pub fn validate(&self) -> Result<()> {
        let budget = &self.budget;
        let chain = |sites: usize, subsystem: usize, start: usize| -> Result<()> {
            if subsystem == 0 || subsystem >= sites || start + subsystem > sites {
                return Err(Error::Config(format!(
                    "subsystem of {subsystem} sites starting at {start} does not fit a proper part of {sites} sites"
                )));
            }
            Ok(())
        };
        let nonempty = |name: &str, len: usize| -> Result<()> {
            if len == 0 {
                return Err(Error::Config(format!("`{name}` is empty")));
            }
            Ok(())
        };
        match self.experiment {
            ExperimentId::AkltDSweep => {
                let c = &self.aklt;
                chain(c.sites, c.subsystem, c.subsystem_start)?;
                budget.check("aklt.sites", c.sites, budget.max_spin1_sites)?;
                c.d.values()?;
            }
            ExperimentId::KitaevMuSweep => {
                let c = &self.kitaev;
                chain(c.sites, c.subsystem, c.subsystem_start)?;
                budget.check("kitaev.sites", c.sites, budget.max_fermion_sites)?;
                if c.t == 0.0 {
                    return Err(Error::Config("kitaev.t must be nonzero".into()));
                }
                c.mu_over_t.values()?;
            }
            ExperimentId::XxzScaling => {
                let c = &self.xxz;
                nonempty("xxz.jz", c.jz.len())?;
                nonempty("xxz.sizes", c.sizes.len())?;
                for &l in &c.sizes {
                    if l < 4 || l % 2 != 0 {
                        return Err(Error::Config(format!("xxz size {l} must be even and at least 4")));
                    }
                    budget.check("xxz size", l, budget.max_spin_half_sites)?;
                }
            }
            ExperimentId::Ti1dMSweep => {
                let c = &self.ti1d;
                c.m.values()?;
                nonempty("ti1d.subsystem_lengths", c.subsystem_lengths.len())?;
                if c.length_factor < 2 {
                    return Err(Error::Config("ti1d.length_factor must be at least 2".into()));
                }
                if c.subsystem_lengths.contains(&0) {
                    return Err(Error::Config("ti1d subsystem lengths must be positive".into()));
                }
                if c.boundary == LatticeBoundary::Open {
                    let largest = c.subsystem_lengths.iter().max().copied().unwrap_or(0);
                    budget.check(
                        "ti1d orbitals",
                        2 * largest * c.length_factor,
                        budget.max_dense_orbitals,
                    )?;
                }
            }
            ExperimentId::ChernAreaLaw => {
                let c = &self.chern;
                nonempty("chern.m", c.m.len())?;
                nonempty("chern.subsystem_lengths", c.subsystem_lengths.len())?;
                let largest = c.subsystem_lengths.iter().max().copied().unwrap_or(0);
                let length = self.chern_length();
                if c.subsystem_lengths.contains(&0) || largest >= length {
                    return Err(Error::Config(format!("chern subsystem sides must lie in 1..{length}")));
                }
                if c.boundary.contains(&LatticeBoundary::Open) {
                    budget.check("chern orbitals", 2 * length * length, budget.max_dense_orbitals)?;
                }
            }
            ExperimentId::MetalLogvolume => {
                let c = &self.metal;
                nonempty("metal.subsystem_lengths", c.subsystem_lengths.len())?;
                let largest = c.subsystem_lengths.iter().max().copied().unwrap_or(0);
                if c.subsystem_lengths.contains(&0) || largest >= c.length {
                    return Err(Error::Config(format!(
                        "metal subsystem sides must lie in 1..{}",
                        c.length
                    )));
                }
                if c.boundary.contains(&LatticeBoundary::Open) {
                    budget.check("metal orbitals", c.length * c.length, budget.max_dense_orbitals)?;
                }
            }
            ExperimentId::CountingDemo => {
                nonempty("counting.n_a", self.counting.n_a.len())?;
                if self.counting.n_a.iter().any(|&n| n == 0 || n > 1000) {
                    return Err(Error::Config("counting.n_a values must lie in 1..=1000".into()));
                }
            }
        }
        Ok(())
    }

    pub fn chern_length(&self) -> usize {
        self.chern
            .length
            .unwrap_or_else(|| 3 * self.chern.subsystem_lengths.iter().max().copied().unwrap_or(1))
    }
}
