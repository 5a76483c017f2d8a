//! The demo's operations as plain Rust, so they can be tested natively.

use hyperfrac::field::parse_field;
use hyperfrac::spectral::{symbol_apply, UniformGrid};
use hyperfrac::{eval_lms, norm_constant, FracParams, QuadratureConfig, Stencil};

/// Constant `c_{N,m,s}` and the branch that produced it.
pub fn constant(dim: u32, m: u32, s: f64) -> Result<(f64, String), String> {
    let p = FracParams::new(dim, m, s).map_err(|e| e.to_string())?;
    let c = norm_constant(&p).map_err(|e| e.to_string())?;
    let branch = match c.branch {
        hyperfrac::Branch::Integer => "integer",
        hyperfrac::Branch::NonInteger => "non-integer",
    };
    Ok((c.value, branch.to_string()))
}

/// Stencil weights `w_{-m}..w_m` as decimal strings (they outgrow f64 past m = 26).
pub fn stencil(m: u32) -> Result<Vec<String>, String> {
    let st = Stencil::new(m).map_err(|e| e.to_string())?;
    Ok(st.weights().iter().map(|w| w.to_string()).collect())
}

/// A 1-d profile: field values, `L_{m,s} f` at `count` points of
/// `[lo, hi]`, and the FFT multiplier at the same points.
pub struct Profile {
    pub x: Vec<f64>,
    pub field: Vec<f64>,
    pub direct: Vec<f64>,
    pub spectral: Vec<f64>,
}

pub const MAX_PROFILE_POINTS: usize = 201;

pub fn profile(field: &str, m: u32, s: f64, lo: f64, hi: f64, count: usize) -> Result<Profile, String> {
    if !(2..=MAX_PROFILE_POINTS).contains(&count) || !(lo < hi) {
        return Err(format!("need lo < hi and 2..={MAX_PROFILE_POINTS} points"));
    }
    let p = FracParams::new(1, m, s).map_err(|e| e.to_string())?;
    let f = parse_field(field, 1).map_err(|e| e.to_string())?;
    let cfg = QuadratureConfig { tol: 1e-7, ..QuadratureConfig::default() };
    let grid = UniformGrid::from_field(f.as_ref(), 256.0, 1 << 14).map_err(|e| e.to_string())?;
    let spec = symbol_apply(&grid, s).map_err(|e| e.to_string())?.grid;
    let mut out = Profile { x: Vec::new(), field: Vec::new(), direct: Vec::new(), spectral: Vec::new() };
    for i in 0..count {
        let x = lo + (hi - lo) * i as f64 / (count - 1) as f64;
        let d = eval_lms(f.as_ref(), &[x], &p, &cfg).map_err(|e| e.to_string())?;
        out.x.push(x);
        out.field.push(f.eval(&[x]));
        out.direct.push(d.value);
        out.spectral.push(spec.nearest(&[x]).0);
    }
    Ok(out)
}
