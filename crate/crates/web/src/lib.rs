//! wasm-bindgen bindings for the static demo page in `www/`.

pub mod ops;

use wasm_bindgen::prelude::*;

#[wasm_bindgen]
pub struct ConstantResult {
    pub value: f64,
    branch: String,
}

#[wasm_bindgen]
impl ConstantResult {
    #[wasm_bindgen(getter)]
    pub fn branch(&self) -> String {
        self.branch.clone()
    }
}

#[wasm_bindgen(js_name = normConstant)]
pub fn norm_constant(dim: u32, m: u32, s: f64) -> Result<ConstantResult, JsError> {
    let (value, branch) = ops::constant(dim, m, s).map_err(|e| JsError::new(&e))?;
    Ok(ConstantResult { value, branch })
}

#[wasm_bindgen(js_name = stencilWeights)]
pub fn stencil_weights(m: u32) -> Result<Vec<String>, JsError> {
    ops::stencil(m).map_err(|e| JsError::new(&e))
}

/// Flat `[x..., field..., direct..., spectral...]`, each block `count` long.
#[wasm_bindgen(js_name = operatorProfile)]
pub fn operator_profile(field: &str, m: u32, s: f64, lo: f64, hi: f64, count: usize) -> Result<Vec<f64>, JsError> {
    let p = ops::profile(field, m, s, lo, hi, count).map_err(|e| JsError::new(&e))?;
    Ok([p.x, p.field, p.direct, p.spectral].concat())
}
