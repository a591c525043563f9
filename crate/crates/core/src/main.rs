use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use entfluc::sweeps::fit::{compare_laws, FitLaw};
use entfluc::sweeps::{run_experiment, write_result, CsvFile, ExperimentConfig, ExperimentId};

#[derive(Parser)]
#[command(name = "entfluc", version, about = "Subsystem uncertainty and entanglement sweeps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML file and write its CSV.
    Run {
        config: PathBuf,
        /// Lift the default size limits.
        #[arg(long)]
        large: bool,
        /// Output path, overriding `output` in the file.
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// List the experiment ids accepted in config files.
    ListExperiments,
    /// Fit a column of a result CSV against growth laws.
    Fit {
        csv: PathBuf,
        /// `constant`, `linear`, `linear-log` or `all`.
        #[arg(long, default_value = "all")]
        law: String,
        #[arg(long, default_value = "L_s")]
        x: String,
        #[arg(long, default_value = "delta2_N")]
        y: String,
        /// Keep only rows with `column=value`; may be repeated.
        #[arg(long = "where", value_name = "COLUMN=VALUE")]
        filters: Vec<String>,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> Result<ExitCode, Box<dyn std::error::Error>> {
    match command {
        Command::Run { config, large, output } => {
            let text = fs::read_to_string(&config).map_err(|e| format!("cannot read {}: {e}", config.display()))?;
            let mut cfg: ExperimentConfig = toml::from_str(&text)?;
            cfg.budget.large |= large;
            cfg.validate()?;
            let path = output
                .or_else(|| cfg.output.clone())
                .unwrap_or_else(|| PathBuf::from(format!("{}.csv", cfg.experiment)));
            let start = Instant::now();
            let result = run_experiment(&cfg)?;
            for p in write_result(&result, &cfg, &path)? {
                println!("wrote {}", p.display());
            }
            for note in &result.notes {
                println!("{note}");
            }
            println!(
                "{} points, {} failed, {:.1} s",
                result.table.rows.len(),
                result.failures,
                start.elapsed().as_secs_f64()
            );
            Ok(if result.succeeded() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
        Command::ListExperiments => {
            for id in ExperimentId::ALL {
                println!("{:<16} [{}] {}", id.name(), id.section(), id.description());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Fit {
            csv,
            law,
            x,
            y,
            filters,
        } => {
            let laws = if law == "all" {
                FitLaw::ALL.to_vec()
            } else {
                vec![law.parse()?]
            };
            let filters = filters
                .iter()
                .map(|f| {
                    f.split_once('=')
                        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                        .ok_or_else(|| format!("filter `{f}` is not of the form column=value"))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let file = CsvFile::read(fs::File::open(&csv)?)?;
            let series = file.series(&x, &y, &filters)?;
            let cmp = compare_laws(&series, &laws)?;
            println!("{y} vs {x}, {} points", series.len());
            for fit in &cmp.fits {
                let coefficients: Vec<String> = fit
                    .law
                    .coefficient_names()
                    .iter()
                    .zip(&fit.coefficients)
                    .map(|(n, c)| format!("{n} = {c:.6}"))
                    .collect();
                println!(
                    "{:<10} {}  rss = {:.3e}  relative residual = {:.3e}",
                    fit.law.name(),
                    coefficients.join(", "),
                    fit.rss,
                    fit.relative_residual
                );
            }
            println!("best: {}", cmp.best.name());
            Ok(ExitCode::SUCCESS)
        }
    }
}
