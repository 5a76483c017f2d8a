use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, ValueEnum};
use serde_json::{json, Value};

use hyperfrac::constants::{constant_limits, norm_constant};
use hyperfrac::energy::{energy_direct, energy_via_operator, EnergyConfig};
use hyperfrac::field::{parse_field, Field};
use hyperfrac::harmonic::{verify_sharmonic, OutsideDatum, PoissonExtension};
use hyperfrac::operator::{equivalence_check, eval_points, eval_polyharmonic};
use hyperfrac::spectral::{fourier_energy, symbol_apply, UniformGrid};
use hyperfrac::stencils::identity_suite;
use hyperfrac::{FracParams, QuadratureConfig, Stencil};

use crate::output::{Body, Failure, Report};
use crate::OrderArgs;

fn params(a: &OrderArgs) -> Result<FracParams, Failure> {
    Ok(FracParams::new(a.dim, a.m, a.s)?)
}

fn quad(tol: f64) -> Result<QuadratureConfig, Failure> {
    if !(tol > 0.0) {
        return Err(Failure::config(format!("--tol must be positive, got {tol}")));
    }
    Ok(QuadratureConfig { tol, ..QuadratureConfig::default() })
}

/// Parse `1.5,-2` into a point of dimension `dim`.
fn parse_point(raw: &str, dim: usize) -> Result<Vec<f64>, Failure> {
    let x: Vec<f64> = raw
        .split(',')
        .map(|v| v.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| Failure::config(format!("bad point '{raw}'")))?;
    if x.len() != dim {
        return Err(Failure::config(format!("point '{raw}' has {} coordinates, expected {dim}", x.len())));
    }
    Ok(x)
}

fn points_or_origin(raw: &[String], dim: usize) -> Result<Vec<Vec<f64>>, Failure> {
    if raw.is_empty() {
        return Ok(vec![vec![0.0; dim]]);
    }
    raw.iter().map(|r| parse_point(r, dim)).collect()
}

/// `count` points from `lo` to `hi` inclusive.
fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![0.5 * (lo + hi)];
    }
    (0..count).map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64).collect()
}

pub fn constant(a: &OrderArgs) -> Result<Report, Failure> {
    let p = params(a)?;
    let c = norm_constant(&p)?;
    let lim = constant_limits(p.dim, p.m)?;
    Ok(Report::json(
        json!({
            "N": p.dim, "m": p.m, "s": p.s,
            "value": c.value,
            "branch": c.branch,
            "p_sum": c.p_sum,
            "limits": { "c_over_s_at_0": lim.at_zero, "c_over_m_minus_s_at_m": lim.at_m },
        }),
        true,
    ))
}

pub fn stencil(m: u32) -> Result<Report, Failure> {
    let st = Stencil::new(m)?;
    // exact integers; the arbitrary-precision number type keeps large ones intact
    let weights: Vec<Value> = st
        .weights()
        .iter()
        .map(|w| serde_json::from_str(&w.to_string()).expect("integer literal"))
        .collect();
    Ok(Report::json(json!({ "m": m, "weights": weights }), true))
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
pub struct ApplyArgs {
    #[command(flatten)]
    pub order: OrderArgs,
    #[arg(long, default_value = "gaussian")]
    pub field: String,
    /// CSV file with one point per row (a header row is skipped).
    #[arg(long, conflicts_with = "grid")]
    pub points: Option<PathBuf>,
    /// Tensor grid `lo:hi:count`, one per axis separated by commas, or a
    /// single spec for every axis.
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

fn parse_grid(spec: &str, dim: usize) -> Result<Vec<Vec<f64>>, Failure> {
    let axes: Vec<&str> = spec.split(',').collect();
    if axes.len() != 1 && axes.len() != dim {
        return Err(Failure::config(format!("grid '{spec}' needs 1 or {dim} axis specs")));
    }
    let mut coords = Vec::with_capacity(dim);
    for a in 0..dim {
        let raw = axes[if axes.len() == 1 { 0 } else { a }];
        let parts: Vec<&str> = raw.split(':').collect();
        let bad = || Failure::config(format!("bad grid axis '{raw}', expected lo:hi:count"));
        if parts.len() != 3 {
            return Err(bad());
        }
        let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
        if n == 0 || !(lo <= hi) {
            return Err(bad());
        }
        coords.push(linspace(lo, hi, n));
    }
    let total: usize = coords.iter().map(Vec::len).product();
    let mut pts = Vec::with_capacity(total);
    for flat in 0..total {
        let mut rem = flat;
        let mut x = vec![0.0; dim];
        for a in (0..dim).rev() {
            x[a] = coords[a][rem % coords[a].len()];
            rem /= coords[a].len();
        }
        pts.push(x);
    }
    Ok(pts)
}

fn read_points(path: &PathBuf, dim: usize) -> Result<Vec<Vec<f64>>, Failure> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Failure::io(format!("cannot read {}: {e}", path.display())))?;
    let mut pts = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Failure::io(format!("{}: {e}", path.display())))?;
        let row: Result<Vec<f64>, _> = rec.iter().map(str::parse::<f64>).collect();
        match row {
            Ok(x) if x.len() == dim => pts.push(x),
            Ok(x) => {
                return Err(Failure::config(format!("row {} has {} columns, expected {dim}", i + 1, x.len())))
            }
            Err(_) if i == 0 => continue,
            Err(_) => return Err(Failure::config(format!("row {} is not numeric", i + 1))),
        }
    }
    Ok(pts)
}

pub fn apply(a: &ApplyArgs) -> Result<Report, Failure> {
    let p = params(&a.order)?;
    let dim = p.dim as usize;
    let f = parse_field(&a.field, dim)?;
    let pts = match (&a.points, &a.grid) {
        (Some(path), _) => read_points(path, dim)?,
        (None, Some(g)) => parse_grid(g, dim)?,
        (None, None) => return Err(Failure::config("apply needs --points or --grid")),
    };
    let results: Vec<_> = eval_points(f.as_ref(), &pts, &p, &quad(a.tol)?)
        .into_iter()
        .collect::<Result<_, _>>()?;
    let body = match a.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let mut header: Vec<String> = (1..=dim).map(|i| format!("x{i}")).collect();
            header.extend(["value".into(), "tail_estimate".into()]);
            let io = |e: csv::Error| Failure::io(e.to_string());
            w.write_record(&header).map_err(io)?;
            for (x, r) in pts.iter().zip(&results) {
                let mut row: Vec<String> = x.iter().map(|v| format!("{v:?}")).collect();
                row.push(format!("{:?}", r.value));
                row.push(format!("{:?}", r.tail_estimate));
                w.write_record(&row).map_err(io)?;
            }
            let bytes = w.into_inner().map_err(|e| Failure::io(e.to_string()))?;
            Body::Csv(String::from_utf8(bytes).expect("csv is utf-8"))
        }
        Format::Json => {
            let rows: Vec<Value> = pts
                .iter()
                .zip(&results)
                .map(|(x, r)| json!({ "x": x, "value": r.value, "tail_estimate": r.tail_estimate,
                                      "error_estimate": r.error_estimate, "warnings": r.warnings }))
                .collect();
            return Ok(Report::json(json!({ "N": dim, "m": p.m, "s": p.s, "field": a.field, "results": rows }), true));
        }
    };
    Ok(Report { body, passed: true })
}

#[derive(Args, Debug)]
pub struct SymbolArgs {
    #[command(flatten)]
    pub order: OrderArgs,
    #[arg(long, default_value = "gaussian")]
    pub field: String,
    /// Points per axis of the periodic grid.
    #[arg(long = "M", default_value_t = 1024)]
    pub points: usize,
    /// Period of the grid.
    #[arg(long = "L", default_value_t = 40.0)]
    pub extent: f64,
    /// Grid nodes compared, spread along the first axis over the middle
    /// quarter of the period.
    #[arg(long, default_value_t = 9)]
    pub samples: usize,
    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,
}

pub fn symbol_check(a: &SymbolArgs) -> Result<Report, Failure> {
    let p = params(&a.order)?;
    let dim = p.dim as usize;
    if a.points.checked_pow(dim as u32).map_or(true, |t| t > 1 << 24) {
        return Err(Failure::config(format!("grid of {}^{dim} points is too large", a.points)));
    }
    if a.samples == 0 {
        return Err(Failure::config("--samples must be at least 1"));
    }
    let f = parse_field(&a.field, dim)?;
    let grid = UniformGrid::from_field(f.as_ref(), a.extent, a.points)?;
    let out = symbol_apply(&grid, p.s)?;
    let h = grid.spacing();
    let half = (0.125 * a.extent / h).floor() as i64;
    let idx: Vec<i64> = if a.samples == 1 {
        vec![0]
    } else {
        (0..a.samples).map(|i| -half + (2 * half * i as i64) / (a.samples as i64 - 1)).collect()
    };
    let pts: Vec<Vec<f64>> = idx
        .iter()
        .map(|&k| {
            let mut x = vec![0.0; dim];
            x[0] = k as f64 * h;
            x
        })
        .collect();
    let direct = eval_points(f.as_ref(), &pts, &p, &quad(1e-8)?);
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for (x, r) in pts.iter().zip(direct) {
        let d = r?.value;
        let (spec, _) = out.grid.nearest(x);
        worst = worst.max((d - spec).abs());
        rows.push(json!({ "x": x, "direct": d, "spectral": spec }));
    }
    Ok(Report::json(
        json!({
            "max_abs_discrepancy": worst,
            "points_compared": pts.len(),
            "tolerance": a.tol,
            "imag_residue": out.imag_residue,
            "padding_mass": out.padding_mass,
            "samples": rows,
        }),
        worst <= a.tol,
    ))
}

#[derive(Args, Debug)]
pub struct EquivArgs {
    #[command(flatten)]
    pub order: OrderArgs,
    #[arg(long, default_value = "gaussian")]
    pub field: String,
    /// Evaluation point `x1,x2,...`; repeatable, defaults to the origin.
    #[arg(long = "at", allow_hyphen_values = true)]
    pub at: Vec<String>,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
}

pub fn equiv_check(a: &EquivArgs) -> Result<Report, Failure> {
    let p = params(&a.order)?;
    let f = parse_field(&a.field, p.dim as usize)?;
    let cfg = quad(a.tol)?;
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for x in points_or_origin(&a.at, p.dim as usize)? {
        let r = equivalence_check(&f, &x, &p, &cfg)?;
        worst = worst.max(r.discrepancy);
        rows.push(json!({ "x": x, "report": r }));
    }
    Ok(Report::json(
        json!({ "n": p.n(), "sigma": p.sigma(), "max_discrepancy": worst, "limit": 2.0 * a.tol, "points": rows }),
        worst <= 2.0 * a.tol,
    ))
}

#[derive(Args, Debug)]
pub struct LimitsArgs {
    #[arg(long = "N", default_value_t = 1)]
    pub dim: u32,
    #[arg(long)]
    pub m: u32,
    #[arg(long, default_value = "gaussian")]
    pub field: String,
    #[arg(long = "at", allow_hyphen_values = true)]
    pub at: Vec<String>,
    /// Distance of s from the endpoints 0 and m.
    #[arg(long, default_value_t = 1e-3)]
    pub eps: f64,
    /// Allowed relative gap at the endpoints.
    #[arg(long, default_value_t = 5e-2)]
    pub tol: f64,
}

pub fn limits_check(a: &LimitsArgs) -> Result<Report, Failure> {
    let dim = a.dim as usize;
    if !(a.eps > 0.0 && a.eps < 0.5) {
        return Err(Failure::config(format!("--eps must lie in (0, 0.5), got {}", a.eps)));
    }
    let f: Field = parse_field(&a.field, dim)?;
    let cfg = quad(1e-8)?;
    let near_zero = FracParams::new(a.dim, a.m, a.eps)?;
    let near_m = FracParams::new(a.dim, a.m, a.m as f64 - a.eps)?;
    let rel = |v: f64, t: f64| if t == 0.0 { v.abs() } else { (v - t).abs() / t.abs() };
    let mut rows = Vec::new();
    let mut worst: f64 = 0.0;
    for x in points_or_origin(&a.at, dim)? {
        let u = f.eval(&x);
        let lap = eval_polyharmonic(f.as_ref(), &x, a.m)?;
        let at0 = hyperfrac::eval_lms(f.as_ref(), &x, &near_zero, &cfg)?.value;
        let atm = hyperfrac::eval_lms(f.as_ref(), &x, &near_m, &cfg)?.value;
        let (g0, gm) = (rel(at0, u), rel(atm, lap));
        worst = worst.max(g0).max(gm);
        rows.push(json!({
            "x": x, "u": u, "near_zero": at0, "gap_zero": g0,
            "polyharmonic": lap, "near_m": atm, "gap_m": gm,
        }));
    }
    // the constant itself, closer to the endpoints where it is cheap
    let lim = constant_limits(a.dim, a.m)?;
    let s0 = 1e-5;
    let c0 = norm_constant(&FracParams::new(a.dim, a.m, s0)?)?.value / s0;
    let c1 = norm_constant(&FracParams::new(a.dim, a.m, a.m as f64 - s0)?)?.value / s0;
    let const_gap = rel(c0, lim.at_zero).max(rel(c1, lim.at_m));
    Ok(Report::json(
        json!({
            "N": a.dim, "m": a.m, "eps": a.eps,
            "max_relative_gap": worst,
            "constant_gap": const_gap,
            "limit": a.tol,
            "points": rows,
        }),
        worst <= a.tol && const_gap <= 1e-3,
    ))
}

#[derive(Args, Debug)]
pub struct BilinearArgs {
    #[arg(long = "N", default_value_t = 1)]
    pub dim: u32,
    #[arg(long)]
    pub m: u32,
    #[arg(long)]
    pub s: f64,
    #[arg(long, default_value = "bump")]
    pub u: String,
    #[arg(long, default_value = "bump")]
    pub v: String,
    /// Period of the Fourier-side grid (default 256 for N = 1, 16 for N = 2).
    #[arg(long = "L")]
    pub extent: Option<f64>,
    /// Points per axis of the Fourier-side grid (default 16384 for N = 1, 512 for N = 2).
    #[arg(long = "M")]
    pub points: Option<usize>,
    /// Also evaluate int (L_{n,s} u) v with the smallest n > s.
    #[arg(long)]
    pub with_operator: bool,
    #[arg(long, default_value_t = 1e-2)]
    pub tol: f64,
}

pub fn bilinear(a: &BilinearArgs) -> Result<Report, Failure> {
    let dim = a.dim as usize;
    if !(1..=2).contains(&dim) {
        return Err(Failure::config("the direct energy form is available for N = 1 and 2"));
    }
    let u = parse_field(&a.u, dim)?;
    let v = parse_field(&a.v, dim)?;
    let ecfg = if dim == 1 {
        EnergyConfig::default()
    } else {
        EnergyConfig { x_nodes: 8, radial_nodes: 10, ..EnergyConfig::default() }
    };
    let direct = energy_direct(u.as_ref(), v.as_ref(), a.m, a.s, &ecfg)?;
    let (l_def, m_def) = if dim == 1 { (256.0, 1 << 14) } else { (16.0, 512) };
    let extent = a.extent.unwrap_or(l_def);
    let points = a.points.unwrap_or(m_def);
    let gu = UniformGrid::from_field(u.as_ref(), extent, points)?;
    let gv = UniformGrid::from_field(v.as_ref(), extent, points)?;
    let fourier = fourier_energy(&gu, &gv, a.s)?;
    let rel = |x: f64| if fourier == 0.0 { x.abs() } else { (x - fourier).abs() / fourier.abs() };
    let gap = rel(direct.value);
    let mut passed = gap <= a.tol;
    let mut body = json!({
        "N": dim, "m": a.m, "s": a.s,
        "direct": direct.value,
        "direct_error": direct.quadrature_error_estimate,
        "fourier": fourier,
        "relative_gap": gap,
        "limit": a.tol,
    });
    if a.with_operator {
        let n = a.s.floor() as u32 + 1;
        let op = energy_via_operator(u.as_ref(), v.as_ref(), n, a.s, &quad(1e-8)?, &ecfg)?;
        passed &= rel(op) <= a.tol;
        body["operator"] = json!(op);
        body["operator_gap"] = json!(rel(op));
    }
    Ok(Report::json(body, passed))
}

#[derive(Args, Debug)]
pub struct HarmonicArgs {
    #[arg(long = "N", default_value_t = 1)]
    pub dim: u32,
    #[arg(long)]
    pub s: f64,
    #[arg(long)]
    pub m: u32,
    /// Outside datum, `annulus:inner:outer` with 1 < inner < outer.
    #[arg(long, default_value = "annulus:2:3")]
    pub psi: String,
    #[arg(long, default_value_t = 1.0)]
    pub amplitude: f64,
    /// Sample points spread along the first axis over [-radius, radius].
    #[arg(long, default_value_t = 5)]
    pub samples: usize,
    #[arg(long, default_value_t = 0.8)]
    pub radius: f64,
    /// Self-convergence target of the kernel integral.
    #[arg(long, default_value_t = 1e-9)]
    pub kernel_tol: f64,
    /// Target of each operator evaluation.
    #[arg(long, default_value_t = 1e-5)]
    pub op_tol: f64,
    /// Allowed max |L u| / max |u|.
    #[arg(long, default_value_t = 1e-3)]
    pub tol: f64,
}

fn parse_annulus(spec: &str) -> Result<(f64, f64), Failure> {
    let bad = || Failure::config(format!("--psi must look like annulus:inner:outer, got '{spec}'"));
    let mut parts = spec.split(':');
    if parts.next().map(str::trim) != Some("annulus") {
        return Err(bad());
    }
    let nums: Vec<f64> = parts.map(|p| p.trim().parse()).collect::<Result<_, _>>().map_err(|_| bad())?;
    match nums.as_slice() {
        [a, b] => Ok((*a, *b)),
        _ => Err(bad()),
    }
}

pub fn harmonic(a: &HarmonicArgs) -> Result<Report, Failure> {
    let dim = a.dim as usize;
    let (inner, outer) = parse_annulus(&a.psi)?;
    if a.samples == 0 || !(a.radius > 0.0 && a.radius < 1.0) {
        return Err(Failure::config("need --samples >= 1 and 0 < --radius < 1"));
    }
    let datum = OutsideDatum::annulus(dim, inner, outer, a.amplitude)?;
    let pe = Arc::new(PoissonExtension::converged(datum, a.s, a.kernel_tol)?);
    let pts: Vec<Vec<f64>> = linspace(-a.radius, a.radius, a.samples)
        .into_iter()
        .map(|t| {
            let mut x = vec![0.0; dim];
            x[0] = t;
            x
        })
        .collect();
    let r = verify_sharmonic(pe, a.m, &pts, &quad(a.op_tol)?)?;
    Ok(Report::json(
        json!({
            "N": dim, "s": a.s, "m": a.m, "psi": a.psi,
            "max_residual": r.max_residual,
            "u_scale": r.u_scale,
            "ratio": r.ratio,
            "limit": a.tol,
            "kernel_error": r.kernel_error,
            "points": r.points,
            "residuals": r.residuals,
            "warnings": r.warnings,
        }),
        r.ratio <= a.tol,
    ))
}

pub fn identities() -> Result<Report, Failure> {
    let checks = identity_suite();
    let passed = checks.iter().all(|c| c.passed);
    let failed = checks.iter().filter(|c| !c.passed).count();
    Ok(Report::json(json!({ "checks": checks, "failed": failed }), passed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_is_row_major() {
        let pts = parse_grid("0:1:2,5:7:3", 2).unwrap();
        assert_eq!(pts.len(), 6);
        assert_eq!(pts[1], vec![0.0, 6.0]);
        assert_eq!(pts[3], vec![1.0, 5.0]);
        assert!(parse_grid("0:1", 1).is_err());
        assert!(parse_grid("0:1:2,0:1:2", 3).is_err());
    }

    #[test]
    fn annulus_spec() {
        assert_eq!(parse_annulus("annulus:2:3").unwrap(), (2.0, 3.0));
        assert!(parse_annulus("bump:2").is_err());
    }
}
