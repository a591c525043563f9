//! Browser bindings for the `entfluc` sweeps.
//!
//! Every export returns a JSON string so the page needs no generated types.
//! The functions are plain Rust underneath, which keeps them testable natively.

use entfluc::freefermion::{correlation_matrix, entropy_from_xi, number_variance, Filling};
use entfluc::models::lattice::{LatticeBoundary, SingleParticleModel};
use entfluc::sweeps::{run_experiment, Cell, ExperimentConfig, ExperimentId, SweepResult};
use serde::Serialize;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Largest ring the spectrum view will diagonalize.
const MAX_SPECTRUM_ORBITALS: usize = 2000;

fn cell_json(cell: &Cell) -> Value {
    match cell {
        Cell::Num(x) if x.is_finite() => json!(x),
        Cell::Num(_) | Cell::Empty => Value::Null,
        Cell::Int(i) => json!(i),
        Cell::Bool(b) => json!(b),
        Cell::Text(s) => json!(s),
    }
}

#[derive(Serialize)]
struct TableJson {
    columns: Vec<String>,
    rows: Vec<Vec<Value>>,
}

#[derive(Serialize)]
struct RunJson {
    experiment: &'static str,
    table: TableJson,
    notes: Vec<String>,
    failures: usize,
}

fn result_json(result: &SweepResult) -> RunJson {
    RunJson {
        experiment: result.experiment.name(),
        table: TableJson {
            columns: result.table.columns.clone(),
            rows: result
                .table
                .rows
                .iter()
                .map(|r| r.iter().map(cell_json).collect())
                .collect(),
        },
        notes: result.notes.clone(),
        failures: result.failures,
    }
}

/// Runs a TOML experiment config and returns the result table.
pub fn run_config(config: &str) -> entfluc::Result<String> {
    let cfg = ExperimentConfig::from_toml(config)?;
    let result = run_experiment(&cfg)?;
    Ok(serde_json::to_string(&result_json(&result))?)
}

/// Correlation spectrum of a block of `subsystem` cells on a periodic 1D insulator ring.
pub fn insulator_spectrum(m: f64, subsystem: usize, length_factor: usize) -> entfluc::Result<String> {
    let length = subsystem * length_factor;
    if subsystem == 0 || 2 * length > MAX_SPECTRUM_ORBITALS {
        return Err(entfluc::Error::Config(format!(
            "ring of {length} cells is outside the demo range"
        )));
    }
    let model = SingleParticleModel::ti1d(m, length, LatticeBoundary::Periodic);
    let omega = model.orbitals_of(&model.chain_block(0, subsystem));
    let corr = correlation_matrix(&model, Filling::HalfFilling, &omega)?;
    let entropies = entropy_from_xi(&corr);
    Ok(json!({
        "m": m,
        "L": length,
        "L_s": subsystem,
        "xi": corr.xi(),
        "delta2_N": number_variance(&corr),
        "s_vn": entropies.s_vn,
        "s_renyi2": entropies.s_renyi2,
    })
    .to_string())
}

fn js_error(e: entfluc::Error) -> JsError {
    JsError::new(&e.to_string())
}

#[wasm_bindgen(js_name = listExperiments)]
pub fn list_experiments() -> String {
    let list: Vec<Value> = ExperimentId::ALL
        .iter()
        .map(|id| json!({ "id": id.name(), "description": id.description() }))
        .collect();
    Value::Array(list).to_string()
}

#[wasm_bindgen(js_name = runConfig)]
pub fn run_config_js(config: &str) -> Result<String, JsError> {
    run_config(config).map_err(js_error)
}

#[wasm_bindgen(js_name = insulatorSpectrum)]
pub fn insulator_spectrum_js(m: f64, subsystem: usize, length_factor: usize) -> Result<String, JsError> {
    insulator_spectrum(m, subsystem, length_factor).map_err(js_error)
}
