//! Configuration bases for spin-1, spin-½ and spinless-fermion chains.
//!
//! A configuration is encoded as a base-`d` integer with site 0 as the least
//! significant digit. Spin digits are ordered by ascending `m` (for spin-1:
//! `0 → −1`, `1 → 0`, `2 → +1`; for spin-½: `0 → ↓`, `1 → ↑`). Fermion digits
//! are occupations in Jordan–Wigner order; signs are the Hamiltonian builder's
//! concern, so a spin-½ basis and a fermion basis share the same codes.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Largest Hilbert space the enumerator will walk.
const MAX_FULL_DIM: u64 = 1 << 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SiteKind {
    Spin1,
    SpinHalf,
    Fermion,
}

impl SiteKind {
    pub fn local_dim(self) -> usize {
        match self {
            SiteKind::Spin1 => 3,
            SiteKind::SpinHalf | SiteKind::Fermion => 2,
        }
    }

    /// Twice the `Sᶻ` eigenvalue of a local digit. For fermions this is
    /// `2n − 1`, i.e. the spin-½ value under Jordan–Wigner.
    pub fn twice_sz(self, digit: u64) -> i32 {
        match self {
            SiteKind::Spin1 => 2 * (digit as i32 - 1),
            SiteKind::SpinHalf | SiteKind::Fermion => 2 * digit as i32 - 1,
        }
    }

    pub fn is_spin(self) -> bool {
        !matches!(self, SiteKind::Fermion)
    }
}

/// Conserved charge selecting a block of the Hilbert space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sector {
    /// Total `Sᶻ` in units of ½, so `Magnetization(0)` is `Sᶻ = 0` and
    /// `Magnetization(1)` is `Sᶻ = ½`.
    Magnetization(i32),
    /// `+1` for an even number of occupied sites (up spins), `−1` for odd.
    Parity(i8),
    /// Number of occupied sites (up spins).
    Number(usize),
}

impl Sector {
    fn check_kind(self, kind: SiteKind) -> Result<()> {
        let ok = match self {
            Sector::Magnetization(_) => kind.is_spin(),
            Sector::Parity(p) => kind.local_dim() == 2 && (p == 1 || p == -1),
            Sector::Number(_) => kind.local_dim() == 2,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::UnsupportedSector { kind, sector: self })
        }
    }

    /// Whether `code` on `sites` sites of `kind` carries this charge.
    pub fn contains(self, kind: SiteKind, sites: usize, code: u64) -> bool {
        match self {
            Sector::Magnetization(m) => {
                let d = kind.local_dim() as u64;
                let mut c = code;
                let mut total = 0;
                for _ in 0..sites {
                    total += kind.twice_sz(c % d);
                    c /= d;
                }
                total == m
            }
            Sector::Parity(p) => {
                let even = code.count_ones().is_multiple_of(2);
                even == (p == 1)
            }
            Sector::Number(n) => code.count_ones() as usize == n,
        }
    }
}

/// `d^n` as a configuration-code multiplier.
pub fn pow(d: usize, n: usize) -> u64 {
    (d as u64).pow(n as u32)
}

/// Digit of `code` on `site`.
#[inline]
pub fn digit(code: u64, d: usize, site: usize) -> u64 {
    (code / pow(d, site)) % d as u64
}

/// Ordered configurations of a chain, optionally restricted to one sector.
#[derive(Clone, Debug)]
pub struct SectorBasis {
    sites: usize,
    kind: SiteKind,
    sector: Option<Sector>,
    states: Vec<u64>,
}

impl SectorBasis {
    /// Enumerates all configurations of `sites` sites carrying `sector`.
    pub fn new(sites: usize, kind: SiteKind, sector: Option<Sector>) -> Result<Self> {
        if sites == 0 {
            return Err(Error::InvalidParams("a basis needs at least one site".into()));
        }
        let d = kind.local_dim();
        let full = (d as u64)
            .checked_pow(sites as u32)
            .filter(|&n| n <= MAX_FULL_DIM)
            .ok_or_else(|| Error::InvalidParams(format!("{sites} {kind:?} sites exceed the enumerable size")))?;
        let states: Vec<u64> = match sector {
            None => (0..full).collect(),
            Some(s) => {
                s.check_kind(kind)?;
                (0..full).filter(|&c| s.contains(kind, sites, c)).collect()
            }
        };
        if states.is_empty() {
            return Err(Error::EmptySector {
                sites,
                kind,
                sector: sector.expect("the full space is never empty"),
            });
        }
        Ok(Self {
            sites,
            kind,
            sector,
            states,
        })
    }

    pub fn full(sites: usize, kind: SiteKind) -> Result<Self> {
        Self::new(sites, kind, None)
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn kind(&self) -> SiteKind {
        self.kind
    }

    pub fn local_dim(&self) -> usize {
        self.kind.local_dim()
    }

    pub fn sector(&self) -> Option<Sector> {
        self.sector
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Dimension of the unrestricted space, `d^L`.
    pub fn full_dim(&self) -> u64 {
        pow(self.local_dim(), self.sites)
    }

    pub fn states(&self) -> &[u64] {
        &self.states
    }

    pub fn state(&self, index: usize) -> u64 {
        self.states[index]
    }

    /// Ordinal of `code`, or `None` if it lies outside the basis.
    pub fn index_of(&self, code: u64) -> Option<usize> {
        self.states.binary_search(&code).ok()
    }

    pub fn digit(&self, code: u64, site: usize) -> u64 {
        digit(code, self.local_dim(), site)
    }
}

/// A contiguous subsystem `Ω = [start, start + len)` of an `L`-site chain.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bipartition {
    sites: usize,
    start: usize,
    len: usize,
}

impl Bipartition {
    pub fn new(sites: usize, start: usize, len: usize) -> Result<Self> {
        if len == 0 || len >= sites {
            return Err(Error::InvalidBipartition(format!(
                "subsystem length {len} must lie in 1..={}",
                sites.saturating_sub(1)
            )));
        }
        if start + len > sites {
            return Err(Error::InvalidBipartition(format!(
                "subsystem [{start}, {}) exceeds the {sites}-site chain",
                start + len
            )));
        }
        Ok(Self { sites, start, len })
    }

    /// Builds a bipartition from an explicit site list, which must be contiguous.
    pub fn from_sites(sites: usize, subsystem: &[usize]) -> Result<Self> {
        let mut sorted = subsystem.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let start = *sorted
            .first()
            .ok_or_else(|| Error::InvalidBipartition("empty subsystem".into()))?;
        if sorted.iter().enumerate().any(|(i, &s)| s != start + i) {
            return Err(Error::InvalidBipartition(format!(
                "subsystem {subsystem:?} is not contiguous"
            )));
        }
        Self::new(sites, start, sorted.len())
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn start(&self) -> usize {
        self.start
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn contains(&self, site: usize) -> bool {
        site >= self.start && site < self.start + self.len
    }

    /// Environment sites in chain order.
    pub fn environment(&self) -> Vec<usize> {
        (0..self.sites).filter(|&s| !self.contains(s)).collect()
    }

    /// The complementary subsystem, when it is itself contiguous.
    pub fn complement(&self) -> Option<Self> {
        if self.start == 0 {
            Self::new(self.sites, self.len, self.sites - self.len).ok()
        } else if self.start + self.len == self.sites {
            Self::new(self.sites, 0, self.start).ok()
        } else {
            None
        }
    }

    /// Splits `config` into the subsystem code and the environment code.
    /// Both keep site order, with the lowest site as least significant digit.
    pub fn factorize(&self, config: u64, kind: SiteKind) -> (u64, u64) {
        let d = kind.local_dim();
        let below = pow(d, self.start);
        let omega_span = pow(d, self.len);
        let low = config % below;
        let rest = config / below;
        let omega = rest % omega_span;
        let high = rest / omega_span;
        (omega, low + high * below)
    }

    /// Inverse of [`factorize`](Self::factorize).
    pub fn recombine(&self, omega: u64, env: u64, kind: SiteKind) -> u64 {
        let d = kind.local_dim();
        let below = pow(d, self.start);
        let omega_span = pow(d, self.len);
        let low = env % below;
        let high = env / below;
        low + below * (omega + omega_span * high)
    }

    pub fn subsystem_dim(&self, kind: SiteKind) -> usize {
        pow(kind.local_dim(), self.len) as usize
    }

    pub fn environment_dim(&self, kind: SiteKind) -> usize {
        pow(kind.local_dim(), self.sites - self.len) as usize
    }
}
