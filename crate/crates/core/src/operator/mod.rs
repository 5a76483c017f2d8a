//! Pointwise evaluation of `L_{m,s}` by graded radial-angular quadrature.
//!
//! After `y = r theta` the operator reads
//! `c/2 * int_{S^{N-1}} int_0^inf delta_m f(x, r theta) r^{-1-2s} dr dtheta`.
//! The radial integrals are in [`radial`]; this module owns the angular
//! rules, the tolerance split and the principal-value variant.

pub mod config;
pub mod directions;
mod grid;
mod polyharmonic;
mod radial;

use serde::Serialize;

pub use config::{EvalReport, QuadratureConfig};
pub use grid::eval_points;
pub use polyharmonic::{eval_polyharmonic, Polyharmonic};

use crate::constants::{norm_constant, FracParams};
use crate::error::{Error, Result};
use crate::field::{Field, ScalarField};
use crate::quad::GaussLegendre;
use directions::{full_rule, half_rule, sphere_area};
use radial::{one_sided_radial, symmetric_radial, FloatStencil, RadialOutcome};

/// Graded radial panel edges on `[lo, hi]`.
pub(crate) fn radial_panel_edges(lo: f64, hi: f64, grading: f64, max_width: f64) -> Vec<f64> {
    radial::panel_edges(lo, hi, grading, max_width, &[])
}

/// Largest dimension with angular rules.
pub const MAX_OPERATOR_DIM: usize = 3;

fn check_inputs(f: &dyn ScalarField, x: &[f64], p: &FracParams, cfg: &QuadratureConfig) -> Result<()> {
    cfg.validate()?;
    let dim = p.dim as usize;
    if f.dim() != dim || x.len() != dim {
        return Err(Error::GeometryMismatch(format!(
            "field has N={}, point has N={}, parameters have N={dim}",
            f.dim(),
            x.len()
        )));
    }
    if dim > MAX_OPERATOR_DIM {
        return Err(Error::InvalidParams(format!(
            "pointwise quadrature supports N <= {MAX_OPERATOR_DIM}, got {dim}"
        )));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain(format!("evaluation point {x:?} is not finite")));
    }
    f.check_point(x, p.m)
}

fn par_map<T: Send>(dirs: &[Vec<f64>], work: impl Fn(&[f64]) -> T + Sync + Send) -> Vec<T> {
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        dirs.par_iter().map(|d| work(d)).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        dirs.iter().map(|d| work(d)).collect()
    }
}

#[derive(Debug, Default, Clone)]
struct Sweep {
    value: f64,
    radial_error: f64,
    tail: f64,
    panels: usize,
    evals: usize,
}

fn combine(outcomes: &[RadialOutcome], weights: &[f64]) -> Sweep {
    let mut s = Sweep::default();
    for (o, w) in outcomes.iter().zip(weights) {
        s.value += w * o.value;
        s.radial_error += w * o.error;
        s.tail += w * o.tail;
        s.panels += o.panels;
        s.evals += o.evals;
    }
    s
}

fn halve_even(n: usize) -> usize {
    ((n / 2 + 1) & !1).max(2)
}

/// Angular sweep of `work` over half-sphere rules. Returns the finest sweep
/// and the difference to the next coarser one as the angular error.
fn angular_sweep(
    dim: usize,
    cfg: &QuadratureConfig,
    tol: f64,
    work: impl Fn(&[f64]) -> RadialOutcome + Sync + Send,
) -> (Sweep, f64, Vec<String>) {
    let mut warnings = Vec::new();
    match dim {
        1 => {
            let rule = half_rule(1, 2, 2, 2);
            let out = par_map(&rule.dirs, &work);
            (combine(&out, &rule.weights), 0.0, warnings)
        }
        2 => {
            // nested trapezoid rules: the coarse rule is every other angle
            let mut points = cfg.circle_points;
            let mut outcomes = par_map(&half_rule(2, points, 2, 2).dirs, &work);
            let mut refinements = 0;
            loop {
                let fine_w = 2.0 * 2.0 * std::f64::consts::PI / points as f64;
                let fine = combine(&outcomes, &vec![fine_w; outcomes.len()]);
                let coarse_out: Vec<RadialOutcome> = outcomes.iter().step_by(2).cloned().collect();
                let coarse = combine(&coarse_out, &vec![2.0 * fine_w; coarse_out.len()]);
                let ang = (fine.value - coarse.value).abs();
                if ang <= tol || refinements >= cfg.angular_refinements {
                    if ang > tol {
                        warnings.push(format!("angular error {ang:.2e} after {points} circle points"));
                    }
                    return (fine, ang, warnings);
                }
                points *= 2;
                refinements += 1;
                let new_dirs: Vec<Vec<f64>> = half_rule(2, points, 2, 2)
                    .dirs
                    .into_iter()
                    .skip(1)
                    .step_by(2)
                    .collect();
                let new_out = par_map(&new_dirs, &work);
                let mut merged = Vec::with_capacity(outcomes.len() * 2);
                for (a, b) in outcomes.into_iter().zip(new_out) {
                    merged.push(a);
                    merged.push(b);
                }
                outcomes = merged;
            }
        }
        _ => {
            let (mut polar, mut azimuth) = (cfg.polar_points, cfg.azimuth_points);
            let coarse_rule = half_rule(3, 0, halve_even(polar), halve_even(azimuth));
            let mut prev = combine(&par_map(&coarse_rule.dirs, &work), &coarse_rule.weights);
            let mut refinements = 0;
            loop {
                let rule = half_rule(3, 0, polar, azimuth);
                let fine = combine(&par_map(&rule.dirs, &work), &rule.weights);
                let ang = (fine.value - prev.value).abs();
                if ang <= tol || refinements >= cfg.angular_refinements {
                    if ang > tol {
                        warnings.push(format!(
                            "angular error {ang:.2e} with {polar}x{azimuth} sphere points"
                        ));
                    }
                    let mut fine = fine;
                    fine.evals += prev.evals;
                    return (fine, ang, warnings);
                }
                polar *= 2;
                azimuth *= 2;
                refinements += 1;
                let evals = prev.evals + fine.evals;
                prev = fine;
                prev.evals = evals;
            }
        }
    }
}

/// `L_{m,s} f(x)` from the symmetric difference form.
pub fn eval_lms(f: &dyn ScalarField, x: &[f64], p: &FracParams, cfg: &QuadratureConfig) -> Result<EvalReport> {
    check_inputs(f, x, p, cfg)?;
    let dim = p.dim as usize;
    let half_c = 0.5 * norm_constant(p)?.value;
    let st = FloatStencil::new(p.m);
    let gl = GaussLegendre::new(cfg.nodes_per_panel);
    let area = sphere_area(dim);
    // radial integrals are weighted by half_c and the sphere area
    let scale = half_c * area;
    let radial_tol = 0.5 * cfg.tol / scale;
    let work = |dir: &[f64]| symmetric_radial(f, x, dir, &st, p.s, cfg, radial_tol, &gl);
    let (sweep, ang, mut warnings) = angular_sweep(dim, cfg, 0.25 * cfg.tol / half_c, work);
    let report = EvalReport {
        value: half_c * sweep.value,
        tail_estimate: half_c * sweep.tail,
        error_estimate: half_c * (sweep.radial_error + ang),
        panel_count: sweep.panels,
        evaluations: sweep.evals,
        warnings: Vec::new(),
    };
    if report.tail_estimate > cfg.tol {
        warnings.push(format!("tail estimate {:.2e} exceeds tol", report.tail_estimate));
    }
    if report.error_estimate > cfg.tol {
        warnings.push(format!("error estimate {:.2e} exceeds tol", report.error_estimate));
    }
    Ok(EvalReport { warnings, ..report })
}

/// Excision radius below which rounding in the one-sided difference
/// outweighs a `0.1 tol` share of the result.
fn pv_min_epsilon(fmax: f64, c: f64, area: f64, st: &FloatStencil, s: f64, tol: f64) -> f64 {
    let noise = f64::EPSILON * st.abs_sum * fmax * c * area / (2.0 * s);
    (noise / (1e-1 * tol)).powf(1.0 / (2.0 * s))
}

/// `L_{m,s} f(x)` from the principal-value form with the one-sided
/// difference `delta^+_m`.
///
/// The inner excision `eps` is removed by Richardson extrapolation over
/// `pv_levels` radii `eps_0 / 2^i`: the error of the truncated integral is
/// a series in `eps^{2m - 2s + 2j}`. The outer limit `1/eps -> inf` is taken
/// analytically, since beyond the field's reach the integrand is constant.
pub fn eval_lms_pv(f: &dyn ScalarField, x: &[f64], p: &FracParams, cfg: &QuadratureConfig) -> Result<EvalReport> {
    check_inputs(f, x, p, cfg)?;
    let dim = p.dim as usize;
    let c = norm_constant(p)?.value;
    let st = FloatStencil::new(p.m);
    let gl = GaussLegendre::new(cfg.nodes_per_panel);
    let area = sphere_area(dim);
    let levels = cfg.pv_levels;
    let scale = f.length_scale();
    let mut warnings = Vec::new();

    let fmax = f.eval(x).abs().max(1.0);
    let eps_min = pv_min_epsilon(fmax, c, area, &st, p.s, cfg.tol);
    let eps0 = match cfg.pv_epsilon {
        Some(e) => e,
        None => {
            let want = (eps_min * 2f64.powi(levels as i32 - 1)).max(0.02 * scale);
            let cap = 0.5 * scale / p.m as f64;
            if want > cap {
                warnings.push(format!(
                    "excision radius {want:.2e} exceeds {cap:.2e}; extrapolation may be inaccurate"
                ));
            }
            want
        }
    };
    let eps: Vec<f64> = (0..levels).map(|i| eps0 / 2f64.powi(i as i32)).collect();
    let radial_tol = 0.1 * cfg.tol / (c * area);
    let rule = full_rule(dim, cfg.circle_points, cfg.polar_points, cfg.azimuth_points);
    let per_dir: Vec<Vec<RadialOutcome>> = par_map(&rule.dirs, |dir| {
        eps.iter()
            .map(|&e| one_sided_radial(f, x, dir, &st, p.s, e, cfg, radial_tol, &gl))
            .collect()
    });
    let mut sums = vec![0.0; levels];
    let mut radial_error = 0.0;
    let mut panels = 0;
    let mut evals = 0;
    for (outs, w) in per_dir.iter().zip(&rule.weights) {
        for (i, o) in outs.iter().enumerate() {
            sums[i] += c * w * o.value;
            radial_error += c * w * o.error;
            panels += o.panels;
            evals += o.evals;
        }
    }
    let (value, extrap_error) = richardson(&sums, 2.0 * (p.m as f64 - p.s), 2.0);
    let error_estimate = extrap_error + radial_error / levels as f64;
    if error_estimate > cfg.tol {
        warnings.push(format!("error estimate {error_estimate:.2e} exceeds tol"));
    }
    Ok(EvalReport {
        value,
        tail_estimate: 0.0,
        error_estimate,
        panel_count: panels,
        evaluations: evals,
        warnings,
    })
}

/// Extrapolate `values[i] = V + sum_j A_j h_i^{p0 + j dp}` with `h_i = h_0 / 2^i`
/// to `h -> 0`. Returns the estimate and the size of the last correction.
fn richardson(values: &[f64], p0: f64, dp: f64) -> (f64, f64) {
    let mut row = values.to_vec();
    let mut err = f64::INFINITY;
    let mut exponent = p0;
    while row.len() > 1 {
        let factor = 2f64.powf(exponent);
        let next: Vec<f64> = row.windows(2).map(|w| (factor * w[1] - w[0]) / (factor - 1.0)).collect();
        err = (next[next.len() - 1] - row[row.len() - 1]).abs();
        row = next;
        exponent += dp;
    }
    (row[0], if err.is_finite() { err } else { 0.0 })
}

/// Both sides of `L_{m,s} f = (-Delta)^sigma (-Delta)^n f`.
#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceReport {
    pub n: u32,
    pub sigma: f64,
    pub direct: f64,
    pub composed: f64,
    pub discrepancy: f64,
    pub direct_error: f64,
    pub composed_error: f64,
}

/// Evaluate `L_{m,s} f(x)` directly and as `L_{1,sigma}` applied to the field
/// `(-Delta)^n f` (classical derivatives). For integer `s` the composed side
/// is `(-Delta)^s f(x)` itself; for `s < 1` it is `L_{1,s} f(x)`.
pub fn equivalence_check(f: &Field, x: &[f64], p: &FracParams, cfg: &QuadratureConfig) -> Result<EquivalenceReport> {
    let direct = eval_lms(f.as_ref(), x, p, cfg)?;
    let n = p.n();
    let sigma = p.sigma();
    let (composed, composed_error) = if p.is_integer() {
        (eval_polyharmonic(f.as_ref(), x, n)?, 0.0)
    } else {
        let inner: Field = if n == 0 {
            f.clone()
        } else {
            let probe = vec![1.0; p.dim as usize];
            if f.line_jet(x, &probe, 2).is_none() {
                return Err(Error::FieldSpec(format!(
                    "{} has no exact derivatives for (-Delta)^{n}",
                    f.describe()
                )));
            }
            std::sync::Arc::new(Polyharmonic::new(f.clone(), n))
        };
        let q = FracParams::new(p.dim, 1, sigma)?;
        let r = eval_lms(inner.as_ref(), x, &q, cfg)?;
        (r.value, r.error_estimate + r.tail_estimate)
    };
    Ok(EquivalenceReport {
        n,
        sigma,
        direct: direct.value,
        composed,
        discrepancy: (direct.value - composed).abs(),
        direct_error: direct.error_estimate + direct.tail_estimate,
        composed_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn richardson_removes_power_terms() {
        let p0 = 1.4;
        let vals: Vec<f64> = (0..4)
            .map(|i| {
                let h = 0.1 / 2f64.powi(i);
                3.0 + 2.0 * h.powf(p0) - 5.0 * h.powf(p0 + 2.0) + h.powf(p0 + 4.0)
            })
            .collect();
        let (v, _) = richardson(&vals, p0, 2.0);
        assert!((v - 3.0).abs() < 1e-13, "{v}");
    }

    #[test]
    fn halve_even_stays_even() {
        assert_eq!(halve_even(16), 8);
        assert_eq!(halve_even(6), 4);
        assert_eq!(halve_even(2), 2);
    }
}
