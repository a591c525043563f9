//! Least-squares fits of size-scaling series to candidate growth laws.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitLaw {
    /// `y = c`.
    Constant,
    /// `y = a·x + b`, the area law of a 2D subsystem of side `x`.
    Linear,
    /// `y = a·x·ln x + b·x`, the logarithmically violated area law of a 2D
    /// metal.
    LinearLog,
}

impl FitLaw {
    pub const ALL: [FitLaw; 3] = [FitLaw::Constant, FitLaw::Linear, FitLaw::LinearLog];

    pub fn name(self) -> &'static str {
        match self {
            FitLaw::Constant => "constant",
            FitLaw::Linear => "linear",
            FitLaw::LinearLog => "linear-log",
        }
    }

    /// Coefficient names in the order of [`FitReport::coefficients`].
    pub fn coefficient_names(self) -> &'static [&'static str] {
        match self {
            FitLaw::Constant => &["c"],
            FitLaw::Linear => &["a", "b"],
            FitLaw::LinearLog => &["a", "b"],
        }
    }

    fn basis(self, x: f64) -> Vec<f64> {
        match self {
            FitLaw::Constant => vec![1.0],
            FitLaw::Linear => vec![x, 1.0],
            FitLaw::LinearLog => vec![x * x.ln(), x],
        }
    }

    /// The fitted function at `x`.
    pub fn evaluate(self, coefficients: &[f64], x: f64) -> f64 {
        self.basis(x).iter().zip(coefficients).map(|(f, c)| f * c).sum()
    }
}

impl std::str::FromStr for FitLaw {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FitLaw::ALL.into_iter().find(|l| l.name() == s).ok_or_else(|| {
            Error::Config(format!(
                "unknown fit law `{s}` (expected constant, linear or linear-log)"
            ))
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub law: FitLaw,
    pub coefficients: Vec<f64>,
    pub residuals: Vec<f64>,
    /// Residual sum of squares.
    pub rss: f64,
    /// `‖r‖ / ‖y‖`.
    pub relative_residual: f64,
}

/// Minimum number of points for a fit.
pub const MIN_POINTS: usize = 4;

/// Least-squares fit of `(size, value)` pairs to one law.
pub fn fit_scaling(series: &[(f64, f64)], law: FitLaw) -> Result<FitReport> {
    if series.len() < MIN_POINTS {
        return Err(Error::DegenerateSeries(format!(
            "{} points, at least {MIN_POINTS} needed",
            series.len()
        )));
    }
    if series.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(Error::DegenerateSeries("non-finite values".into()));
    }
    let first = series[0].0;
    if series.iter().all(|&(x, _)| x == first) {
        return Err(Error::DegenerateSeries("all sizes are equal".into()));
    }
    if law == FitLaw::LinearLog && series.iter().any(|&(x, _)| x <= 0.0) {
        return Err(Error::DegenerateSeries("x ln x needs positive sizes".into()));
    }
    let k = law.coefficient_names().len();
    let design = DMatrix::from_fn(series.len(), k, |i, j| law.basis(series[i].0)[j]);
    let y = DVector::from_iterator(series.len(), series.iter().map(|p| p.1));
    let svd = design.clone().svd(true, true);
    let coef = svd
        .solve(&y, 1e-12)
        .map_err(|e| Error::DegenerateSeries(e.to_string()))?;
    let residuals: Vec<f64> = (design * &coef - &y).iter().copied().collect();
    let rss: f64 = residuals.iter().map(|r| r * r).sum();
    let norm_y = y.norm();
    Ok(FitReport {
        law,
        coefficients: coef.iter().copied().collect(),
        residuals,
        rss,
        relative_residual: if norm_y > 0.0 { rss.sqrt() / norm_y } else { rss.sqrt() },
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitComparison {
    pub fits: Vec<FitReport>,
    /// The law with the smallest residual. Residuals that agree to within
    /// `1e-12 ‖y‖` count as equal, and the law listed first wins the tie.
    pub best: FitLaw,
}

impl FitComparison {
    pub fn get(&self, law: FitLaw) -> Option<&FitReport> {
        self.fits.iter().find(|f| f.law == law)
    }

    /// `‖r_a‖ / ‖r_b‖`, how much better law `b` fits than law `a`.
    pub fn residual_ratio(&self, a: FitLaw, b: FitLaw) -> Option<f64> {
        Some(self.get(a)?.rss.sqrt() / self.get(b)?.rss.sqrt())
    }
}

/// Fits every law in `laws` (listed from simplest) and picks the best.
pub fn compare_laws(series: &[(f64, f64)], laws: &[FitLaw]) -> Result<FitComparison> {
    if laws.is_empty() {
        return Err(Error::Config("no fit laws given".into()));
    }
    let fits = laws
        .iter()
        .map(|&l| fit_scaling(series, l))
        .collect::<Result<Vec<_>>>()?;
    let norm_y = series.iter().map(|p| p.1 * p.1).sum::<f64>().sqrt();
    let tie = 1e-12 * norm_y.max(f64::MIN_POSITIVE);
    let mut best = 0;
    for (i, f) in fits.iter().enumerate().skip(1) {
        if f.rss.sqrt() < fits[best].rss.sqrt() - tie {
            best = i;
        }
    }
    Ok(FitComparison {
        best: fits[best].law,
        fits,
    })
}
