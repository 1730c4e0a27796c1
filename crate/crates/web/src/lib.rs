//! Browser bindings: reconstruct a patch, offset it, classify a relation.
//!
//! The `*_impl` functions hold the logic and are what native tests call;
//! the exported wrappers only translate errors into JS exceptions.

use wasm_bindgen::prelude::*;

use weingarten_core::classes::{BasicClassId, Operator};
use weingarten_core::classification::{classify, LinearRelation};
use weingarten_core::grid::GridSpec;
use weingarten_core::parallel::offset_patch;
use weingarten_core::pde::{dirichlet_grid, optimal_omega};
use weingarten_core::pipeline::{class_with_defaults, lambda0, reconstruct, solve_class, SolveData, SolveOptions};
use weingarten_core::reconstruction::SurfacePatch;

pub const MAX_NODES: usize = 129;

/// Solves the class PDE on [0, 1]² (u ∈ [0, ½] for Δ*) from a Gaussian bump of λ and integrates the frame.
pub fn patch_impl(class: &str, amplitude: f64, n: usize) -> Result<SurfacePatch, String> {
    if !(3..=MAX_NODES).contains(&n) {
        return Err(format!("resolution {n} outside 3..={MAX_NODES}"));
    }
    let id = BasicClassId::parse(class).map_err(|e| e.to_string())?;
    let (class, pair) = class_with_defaults(id, None).map_err(|e| e.to_string())?;
    // The reciprocal march needs du below dv; halve the u range for it.
    let lu = if class.pde.operator == Operator::Star { 0.5 } else { 1.0 };
    let spec = GridSpec::spanning(n, n, 0.0, 0.0, lu, 1.0).map_err(|e| e.to_string())?;
    let l0 = lambda0(&class);
    let g = |t: f64| (-((t - 0.5) / 0.25).powi(2)).exp();
    let mut opts = SolveOptions::default();
    let data = if class.pde.operator.is_hyperbolic() {
        SolveData::Cauchy { lambda: (0..n).map(|j| l0 + amplitude * g(spec.v(j))).collect(), lambda_u: vec![0.0; n] }
    } else {
        opts.elliptic.omega = optimal_omega(&spec);
        SolveData::Dirichlet { initial: dirichlet_grid(&spec, |u, v| l0 + 0.5 * amplitude * (g(u) + g(v)), l0) }
    };
    let (lam, _) = solve_class(&class, &spec, &data, &opts).map_err(|e| e.to_string())?;
    reconstruct(&pair, &class.to_nu_field(&lam)).map_err(|e| e.to_string())
}

/// Node positions as x1, x2, x3 triples in row-major (u, v) order.
pub fn vertices(patch: &SurfacePatch) -> Vec<f64> {
    patch.z.iter().flat_map(|p| [p.x1, p.x2, p.x3]).collect()
}

pub fn parallel_impl(class: &str, amplitude: f64, n: usize, a: f64) -> Result<SurfacePatch, String> {
    let patch = patch_impl(class, amplitude, n)?;
    offset_patch(&patch, a).map(|(p, _)| p).map_err(|e| e.to_string())
}

pub fn classify_impl(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Result<String, String> {
    let rel = LinearRelation::new(alpha, beta, gamma, delta).map_err(|e| e.to_string())?;
    classify(&rel).and_then(|c| c.render()).map_err(|e| e.to_string())
}

/// Flat vertex array of the reconstructed n×n patch.
#[wasm_bindgen]
pub fn surface(class: &str, amplitude: f64, n: usize) -> Result<Vec<f64>, JsError> {
    patch_impl(class, amplitude, n).map(|p| vertices(&p)).map_err(|e| JsError::new(&e))
}

/// Flat vertex array of the patch pushed along its normal by `a`.
#[wasm_bindgen]
pub fn parallel_surface(class: &str, amplitude: f64, n: usize, a: f64) -> Result<Vec<f64>, JsError> {
    parallel_impl(class, amplitude, n, a).map(|p| vertices(&p)).map_err(|e| JsError::new(&e))
}

/// Classification report for δK = αH + βH′ + γ.
#[wasm_bindgen]
pub fn classify_relation(alpha: f64, beta: f64, gamma: f64, delta: f64) -> Result<String, JsError> {
    classify_impl(alpha, beta, gamma, delta).map_err(|e| JsError::new(&e))
}

/// Registry names, one per line.
#[wasm_bindgen]
pub fn class_names() -> String {
    BasicClassId::ALL.iter().map(|c| c.name()).collect::<Vec<_>>().join("\n")
}
