//! Browser bindings for three interactive views: the overhead floor, a
//! lattice partition and the relative-entropy bracket of a Werner state.
//!
//! Every export returns a JSON string; failures come back as `{"error": …}`.

use locbound::bounds::{overhead_floor, BoundInputs};
use locbound::linalg::{CMatrix, C64};
use locbound::partition::{check_guarantees, grid_partition, EmbeddedGraph};
use locbound::qstate::{DensityMatrix, RegisterLayout};
use locbound::separability::{ree_bracket, ReeBudget};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

const MAX_SITES: usize = 4096;
const MAX_RESTARTS: usize = 8;
const MAX_ITERATIONS: usize = 2000;

fn render(result: Result<Value, String>) -> String {
    result.unwrap_or_else(|e| json!({ "error": e })).to_string()
}

/// Overhead floor with explicit partition constants.
#[allow(clippy::too_many_arguments)]
pub fn overhead_value(
    m: usize,
    k: usize,
    p: f64,
    delta: f64,
    depth: f64,
    dim: usize,
    c1: f64,
    c2: f64,
) -> Result<Value, String> {
    let inputs = BoundInputs {
        m,
        k,
        d: None,
        depth,
        p,
        delta,
        dim,
        c1,
        c2,
    };
    let report = overhead_floor(&inputs).map_err(|e| e.to_string())?;
    serde_json::to_value(report).map_err(|e| e.to_string())
}

#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn overhead(m: usize, k: usize, p: f64, delta: f64, depth: f64, dim: usize, c1: f64, c2: f64) -> String {
    render(overhead_value(m, k, p, delta, depth, dim, c1, c2))
}

/// Partition of a `width × height` square lattice with coordinates, edges,
/// blocks and the guarantee check.
pub fn lattice_partition_value(width: usize, height: usize, lambda: f64) -> Result<Value, String> {
    if width == 0 || height == 0 || width * height > MAX_SITES {
        return Err(format!("lattice must have between 1 and {MAX_SITES} sites"));
    }
    let eg = EmbeddedGraph::lattice(&[width, height]);
    let partition = grid_partition(&eg, lambda, None).map_err(|e| e.to_string())?;
    let guarantee = check_guarantees(&partition, &eg, lambda, true, None);
    Ok(json!({
        "coords": eg.embedding.coords,
        "edges": eg.graph.edges(),
        "blocks": partition.blocks,
        "boundary_sizes": partition.boundary_sizes,
        "cell_side": partition.cell_side,
        "guarantee": guarantee,
        "all_hold": guarantee.all_hold(),
    }))
}

#[wasm_bindgen]
pub fn lattice_partition(width: usize, height: usize, lambda: f64) -> String {
    render(lattice_partition_value(width, height, lambda))
}

/// `F |ψ⁻⟩⟨ψ⁻| + (1 − F)(I − |ψ⁻⟩⟨ψ⁻|)/3` on qubits `a`, `b`.
pub fn werner(f: f64) -> Result<DensityMatrix, String> {
    if !(0.0..=1.0).contains(&f) {
        return Err(format!("singlet weight {f} not in [0, 1]"));
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let amp = |x: usize| match x {
        1 => h,
        2 => -h,
        _ => 0.0,
    };
    let singlet = CMatrix::from_fn(4, 4, |i, j| C64::new(amp(i) * amp(j), 0.0));
    let rest = (CMatrix::identity(4, 4) - &singlet).unscale(3.0);
    let layout = RegisterLayout::qubits(&["a", "b"]).map_err(|e| e.to_string())?;
    DensityMatrix::new(layout, singlet.scale(f) + rest.scale(1.0 - f)).map_err(|e| e.to_string())
}

pub fn werner_bracket_value(f: f64, restarts: usize, iterations: usize, seed: u64) -> Result<Value, String> {
    if !(1..=MAX_RESTARTS).contains(&restarts) || !(1..=MAX_ITERATIONS).contains(&iterations) {
        return Err(format!(
            "restarts must be in 1..={MAX_RESTARTS} and iterations in 1..={MAX_ITERATIONS}"
        ));
    }
    let rho = werner(f)?;
    let budget = ReeBudget::new(restarts, iterations, seed);
    let bracket = ree_bracket(&rho, &["a"], &["b"], &budget).map_err(|e| e.to_string())?;
    Ok(json!({
        "lower": bracket.lower,
        "upper": bracket.upper,
        "gap": bracket.upper - bracket.lower,
        "diagnostics": bracket.diagnostics,
    }))
}

#[wasm_bindgen]
pub fn werner_bracket(f: f64, restarts: usize, iterations: usize, seed: u32) -> String {
    render(werner_bracket_value(f, restarts, iterations, seed as u64))
}
