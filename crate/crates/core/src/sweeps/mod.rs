//! Parameter sweeps behind the `entfluc` command line.
//!
//! An experiment is chosen by id in a TOML file (see [`config`]). Running it
//! evaluates every grid point independently, so a failing point is recorded
//! in its row and the rest of the sweep still completes. Results are written
//! as CSV with a comment header holding the code version and the full
//! configuration, which is enough to rerun the sweep.

pub mod config;
mod experiments;
pub mod fit;
pub mod table;

use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

pub use config::{ExperimentConfig, ExperimentId};
pub use experiments::{FORMULA_TOL, METAL_REFERENCE_SCALE, XXZ_REFERENCE_SCALES};
pub use table::{Cell, CsvFile, Table};

use crate::Result;

/// Version string written at the top of every CSV file.
pub const CODE_VERSION: &str = concat!("entfluc ", env!("CARGO_PKG_VERSION"));

#[derive(Clone, Debug)]
pub struct SweepResult {
    pub experiment: ExperimentId,
    /// One row per grid point.
    pub table: Table,
    /// Further tables, written next to the main file as `<stem>.<name>.csv`.
    pub extra: Vec<(String, Table)>,
    /// Summary lines computed over the whole sweep.
    pub notes: Vec<String>,
    /// Number of grid points that failed.
    pub failures: usize,
}

impl SweepResult {
    fn new(experiment: ExperimentId, table: Table, failures: usize) -> Self {
        Self {
            experiment,
            table,
            extra: Vec::new(),
            notes: Vec::new(),
            failures,
        }
    }

    pub fn succeeded(&self) -> bool {
        self.failures == 0
    }
}

/// Runs a validated configuration.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<SweepResult> {
    cfg.validate()?;
    match cfg.experiment {
        ExperimentId::AkltDSweep => experiments::aklt(cfg),
        ExperimentId::KitaevMuSweep => experiments::kitaev(cfg),
        ExperimentId::XxzScaling => experiments::xxz(cfg),
        ExperimentId::Ti1dMSweep => experiments::ti1d(cfg),
        ExperimentId::ChernAreaLaw => experiments::chern(cfg),
        ExperimentId::MetalLogvolume => experiments::metal(cfg),
        ExperimentId::CountingDemo => experiments::counting(cfg),
    }
}

/// The comment block that heads every CSV file of a run.
pub fn header_comments(result: &SweepResult, cfg: &ExperimentConfig) -> Vec<String> {
    let mut comments = vec![
        CODE_VERSION.to_string(),
        format!("experiment: {} ({})", cfg.experiment, cfg.experiment.description()),
        format!("points: {}, failed: {}", result.table.rows.len(), result.failures),
        "config:".to_string(),
        cfg.to_toml(),
    ];
    if !result.notes.is_empty() {
        comments.push("notes:".to_string());
        comments.extend(result.notes.iter().cloned());
    }
    comments
}

/// Path of an extra table next to `main`.
pub fn extra_path(main: &Path, name: &str) -> PathBuf {
    let stem = main
        .file_stem()
        .map_or_else(|| "out".into(), |s| s.to_string_lossy().into_owned());
    main.with_file_name(format!("{stem}.{name}.csv"))
}

/// Writes the main table to `path` and each extra table beside it. Returns
/// every path written.
pub fn write_result(result: &SweepResult, cfg: &ExperimentConfig, path: &Path) -> Result<Vec<PathBuf>> {
    let comments = header_comments(result, cfg);
    let mut written = vec![path.to_path_buf()];
    result.table.write_csv(BufWriter::new(File::create(path)?), &comments)?;
    for (name, table) in &result.extra {
        let p = extra_path(path, name);
        table.write_csv(BufWriter::new(File::create(&p)?), &comments)?;
        written.push(p);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counting_run_writes_header_and_rows() {
        let mut cfg = ExperimentConfig::new(ExperimentId::CountingDemo);
        cfg.counting.n_a = vec![1, 2, 3];
        let result = run_experiment(&cfg).unwrap();
        assert!(result.succeeded());
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("counting.csv");
        write_result(&result, &cfg, &path).unwrap();
        let file = CsvFile::read(File::open(&path).unwrap()).unwrap();
        assert_eq!(file.comments[0], CODE_VERSION);
        let back = ExperimentConfig::from_toml(
            &file
                .comments
                .iter()
                .skip_while(|l| *l != "config:")
                .skip(1)
                .take_while(|l| *l != "notes:")
                .cloned()
                .collect::<Vec<_>>()
                .join("\n"),
        )
        .unwrap();
        assert_eq!(back.counting.n_a, vec![1, 2, 3]);
        let series = file.series("n_a", "variance", &[]).unwrap();
        assert_eq!(series, vec![(1.0, 0.25), (2.0, 0.5), (3.0, 0.75)]);
    }

    #[test]
    fn failed_points_are_recorded() {
        let mut cfg = ExperimentConfig::new(ExperimentId::Ti1dMSweep);
        cfg.ti1d.subsystem_lengths = vec![4];
        cfg.ti1d.length_factor = 2;
        cfg.ti1d.m = config::Grid::Values(vec![0.5, 1.0]);
        cfg.ti1d.spectrum_m = vec![];
        let result = run_experiment(&cfg).unwrap();
        let status = result.table.column_index("status").unwrap();
        let statuses: Vec<String> = result.table.rows.iter().map(|r| r[status].to_string()).collect();
        // m = 1 closes the gap of a periodic ring, leaving a degenerate Fermi level
        assert_eq!(statuses, ["ok", "error"]);
        assert_eq!(result.failures, 1);
        assert!(!result.succeeded());
    }
}
