//! Browser bindings: check a document, load a corpus member, run a flow.

use std::f64::consts::PI;

use serde_json::json;
use wasm_bindgen::prelude::*;

use pencil_core::cli::{emit_report, parse_check_list, run_document, Format, TensorDocument};
use pencil_core::corpus::{build, ExampleId};
use pencil_core::hydro::{conservation_densities, flow_operators};
use pencil_core::sim::{
    conservation_drift, evolve, max_speed, CompiledFun, CompiledOperator, Grid1D, Profile, Scheme,
};

/// Time samples kept in a simulation result.
const FRAMES: usize = 48;

fn text(e: impl ToString) -> String {
    e.to_string()
}

/// Names of the standard corpus members as a JSON array.
pub fn example_names() -> String {
    let names: Vec<String> = ExampleId::standard().iter().map(ToString::to_string).collect();
    serde_json::to_string(&names).expect("serializes")
}

/// The tensor document of a corpus member.
pub fn example_document(name: &str) -> Result<String, String> {
    let id: ExampleId = name.parse().map_err(text)?;
    let e = build(id).map_err(text)?;
    Ok(TensorDocument::from_pair(&e.g, &e.l, e.pencil.clone()).to_json())
}

/// Runs `checks` on a document and returns the text report.
pub fn verify_text(doc: &str, checks: &str, seed: u64) -> Result<String, String> {
    let doc = TensorDocument::parse(doc).map_err(text)?;
    let checks = parse_check_list(checks).map_err(text)?;
    let report = run_document(&doc, &checks, seed);
    String::from_utf8(emit_report(&report, Format::Text)).map_err(text)
}

/// Evolves the `A_1` flow of the document's operator from the smooth profile.
///
/// Returns JSON with the nodes, sampled times, states (`cells × dim`,
/// row-major) and the relative drift of the first two densities.
pub fn simulate_json(doc: &str, cells: usize, t_final: f64) -> Result<String, String> {
    let doc = TensorDocument::parse(doc).map_err(text)?;
    let l = doc
        .operator()
        .map_err(text)?
        .ok_or("document has no operator L")?;
    let n = l.rows();
    let a = CompiledOperator::new(&flow_operators(&l, 1).operators[0]).map_err(text)?;
    let dens = conservation_densities(&l, 2)
        .iter()
        .map(|f| CompiledFun::new(f, n))
        .collect::<Result<Vec<_>, _>>()
        .map_err(text)?;
    let grid = Grid1D::periodic(cells, 2.0 * PI).map_err(text)?;
    let u0 = Profile::named("smooth", n).map_err(text)?.sample(&grid);
    let speed = max_speed(&a, &u0).map_err(text)?;
    let dt = if speed > 0.0 { 0.5 * grid.spacing() / speed } else { grid.spacing() };
    let traj = evolve(&a, &u0, &grid, dt, t_final, Scheme::Rk4Central).map_err(text)?;
    let drifts = conservation_drift(&traj, &dens).map_err(text)?;
    let stride = traj.states.len().div_ceil(FRAMES).max(1);
    let mut picked: Vec<usize> = (0..traj.states.len()).step_by(stride).collect();
    if picked.last() != Some(&(traj.states.len() - 1)) {
        picked.push(traj.states.len() - 1);
    }
    let out = json!({
        "dim": n,
        "nodes": grid.nodes(),
        "times": picked.iter().map(|&i| traj.times[i]).collect::<Vec<_>>(),
        "states": picked.iter().map(|&i| &traj.states[i]).collect::<Vec<_>>(),
        "steps": traj.steps,
        "dt": traj.dt,
        "drifts": drifts,
    });
    Ok(out.to_string())
}

#[wasm_bindgen(js_name = exampleNames)]
pub fn example_names_js() -> String {
    example_names()
}

#[wasm_bindgen(js_name = exampleDocument)]
pub fn example_document_js(name: &str) -> Result<String, JsError> {
    example_document(name).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = verify)]
pub fn verify_js(doc: &str, checks: &str, seed: u32) -> Result<String, JsError> {
    verify_text(doc, checks, u64::from(seed)).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = simulate)]
pub fn simulate_js(doc: &str, cells: usize, t_final: f64) -> Result<String, JsError> {
    simulate_json(doc, cells, t_final).map_err(|e| JsError::new(&e))
}
