//! Direct-space bilinear form
//! `E_{2m,s}(u, v) = c_{N,2m,s}/2 * int int delta_m u(x,y) delta_m v(x,y) / |y|^{N+2s} dx dy`
//! and the double integrals of the discrete integration-by-parts identities.
//!
//! The integration order is swapped: for each `y = r theta` the inner
//! `x`-integral `G(r, theta)` runs over the cells where both shifted
//! supports overlap, and `G` is then integrated radially. Once `r` exceeds
//! the largest distance between the two supports, all cross terms vanish and
//! `G` is a constant times `int u v`, so the far field is analytic.

use serde::Serialize;

use crate::constants::{norm_constant, FracParams};
use crate::error::{Error, Result};
use crate::field::{dist, Extent, ScalarField};
use crate::operator::directions::half_rule;
use crate::operator::{eval_points, QuadratureConfig};
use crate::quad::GaussLegendre;
use crate::stencils::Stencil;

/// Node counts of the double integral. All nodes are fixed, so two forms
/// with the same supports share them exactly.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyConfig {
    /// Gauss points per `x` cell and axis.
    pub x_nodes: usize,
    /// Gauss points per radial panel.
    pub radial_nodes: usize,
    /// Ratio of consecutive radial panel edges.
    pub grading: f64,
    /// Below this radius `G(r)` is replaced by its leading power.
    pub inner_radius: Option<f64>,
    pub max_panel_width: Option<f64>,
    /// Widest `x` cell; defaults to a quarter of the fields' length scale.
    pub max_cell_width: Option<f64>,
    /// Points on the full circle (`N = 2`).
    pub circle_points: usize,
}

impl Default for EnergyConfig {
    fn default() -> Self {
        Self {
            x_nodes: 20,
            radial_nodes: 16,
            grading: 1.5,
            inner_radius: None,
            max_panel_width: None,
            max_cell_width: None,
            circle_points: 32,
        }
    }
}

impl EnergyConfig {
    fn validate(&self) -> Result<()> {
        if self.x_nodes < 4 || self.radial_nodes < 4 {
            return Err(Error::InvalidConfig("need at least 4 nodes per cell and panel".into()));
        }
        if !(self.grading > 1.0 && self.grading <= 2.0) {
            return Err(Error::InvalidConfig(format!("grading must lie in (1, 2], got {}", self.grading)));
        }
        if matches!(self.max_cell_width, Some(w) if !(w > 0.0)) {
            return Err(Error::InvalidConfig("max_cell_width must be positive".into()));
        }
        if self.circle_points < 2 || self.circle_points % 2 != 0 {
            return Err(Error::InvalidConfig("circle_points must be even and >= 2".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyEstimate {
    pub value: f64,
    pub quadrature_error_estimate: f64,
    pub config: EnergyConfig,
}

/// Both sides of a discrete integration-by-parts identity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IbpReport {
    pub lhs: f64,
    pub rhs: f64,
    pub relative_gap: f64,
    pub lhs_error: f64,
    pub rhs_error: f64,
}

/// The `x`-integrand of a double integral at fixed `y`.
#[derive(Debug, Clone)]
enum Form {
    /// `delta_a u(x, y) * delta_b v(x, y)`
    Product { a: Vec<f64>, b: Vec<f64> },
    /// `delta_k u(x, y) * v(x)`
    Stencil { w: Vec<f64> },
    /// `(u(x) - u(x + y)) * (v(x) - v(x + y))`
    OneSided,
}

impl Form {
    fn product(a: u32, b: u32) -> Self {
        Form::Product { a: weights(a), b: weights(b) }
    }

    fn stencil(k: u32) -> Self {
        Form::Stencil { w: weights(k) }
    }

    /// Shifts `k` (in units of `y`) at which `u` and `v` are sampled.
    fn shifts(&self) -> (Vec<i64>, Vec<i64>) {
        let sym = |w: &Vec<f64>| {
            let m = (w.len() / 2) as i64;
            (-m..=m).collect::<Vec<_>>()
        };
        match self {
            Form::Product { a, b } => (sym(a), sym(b)),
            Form::Stencil { w } => (sym(w), vec![0]),
            Form::OneSided => (vec![0, 1], vec![0, 1]),
        }
    }

    /// Power of `r` at which `G(r)` vanishes at the origin.
    fn order(&self) -> f64 {
        match self {
            Form::Product { a, b } => (a.len() - 1 + b.len() - 1) as f64,
            Form::Stencil { w } => (w.len() - 1) as f64,
            Form::OneSided => 2.0,
        }
    }

    /// `G(r) / int u v` once no shifted copies of the supports overlap.
    fn far_weight(&self) -> f64 {
        match self {
            Form::Product { a, b } => {
                // only equal shifts of u and v overlap
                let (ma, mb) = (a.len() / 2, b.len() / 2);
                let k = ma.min(mb);
                (0..=2 * k).map(|i| a[ma - k + i] * b[mb - k + i]).sum()
            }
            Form::Stencil { w } => w[w.len() / 2],
            Form::OneSided => 2.0,
        }
    }

    fn eval(&self, u: &dyn ScalarField, v: &dyn ScalarField, x: &[f64], y: &[f64], buf: &mut [f64]) -> f64 {
        let mut shifted = |f: &dyn ScalarField, k: f64| {
            for i in 0..x.len() {
                buf[i] = x[i] + k * y[i];
            }
            f.eval(buf)
        };
        let delta = |f: &dyn ScalarField, w: &[f64], sh: &mut dyn FnMut(&dyn ScalarField, f64) -> f64| {
            let m = (w.len() / 2) as i64;
            w.iter().enumerate().map(|(i, wk)| wk * sh(f, (i as i64 - m) as f64)).sum::<f64>()
        };
        match self {
            Form::Product { a, b } => delta(u, a, &mut shifted) * delta(v, b, &mut shifted),
            Form::Stencil { w } => delta(u, w, &mut shifted) * shifted(v, 0.0),
            Form::OneSided => {
                (shifted(u, 0.0) - shifted(u, 1.0)) * (shifted(v, 0.0) - shifted(v, 1.0))
            }
        }
    }
}

fn weights(m: u32) -> Vec<f64> {
    Stencil::new(m).expect("order >= 1").float_weights()
}

/// Balls covering the support of a compactly supported field.
fn support(f: &dyn ScalarField) -> Result<Vec<(Vec<f64>, f64)>> {
    if f.value_at_infinity() != 0.0 {
        return Err(Error::FieldSpec(format!("{} does not vanish at infinity", f.describe())));
    }
    f.blobs()
        .into_iter()
        .map(|b| match b.extent {
            Extent::Compact { radius } => Ok((b.center, radius)),
            Extent::Gaussian { .. } => Err(Error::FieldSpec(format!(
                "{} is not compactly supported",
                f.describe()
            ))),
        })
        .collect()
}

/// Sort, merge near-duplicates and split gaps wider than `width`.
fn refine_breaks(b: &mut Vec<f64>, width: f64) {
    b.sort_by(f64::total_cmp);
    b.dedup_by(|p, q| (*p - *q).abs() < 1e-14);
    let mut out = Vec::with_capacity(b.len());
    for w in b.windows(2) {
        out.push(w[0]);
        let pieces = ((w[1] - w[0]) / width).ceil().max(1.0) as usize;
        for j in 1..pieces {
            out.push(w[0] + (w[1] - w[0]) * j as f64 / pieces as f64);
        }
    }
    if let Some(last) = b.last() {
        out.push(*last);
    }
    *b = out;
}

fn box_meets_ball(lo: &[f64], hi: &[f64], c: &[f64], r: f64) -> bool {
    let d2: f64 = (0..c.len())
        .map(|a| {
            let p = c[a].clamp(lo[a], hi[a]);
            (p - c[a]) * (p - c[a])
        })
        .sum();
    d2 < r * r
}

struct DoubleIntegral<'a> {
    u: &'a dyn ScalarField,
    v: &'a dyn ScalarField,
    su: Vec<(Vec<f64>, f64)>,
    sv: Vec<(Vec<f64>, f64)>,
    form: Form,
    x_rule: GaussLegendre,
    cell_width: f64,
}

impl<'a> DoubleIntegral<'a> {
    fn new(u: &'a dyn ScalarField, v: &'a dyn ScalarField, form: Form, cfg: &EnergyConfig) -> Result<Self> {
        if u.dim() != v.dim() {
            return Err(Error::GeometryMismatch("u and v live in different dimensions".into()));
        }
        if u.dim() > 2 {
            return Err(Error::InvalidParams("double integrals are limited to N <= 2".into()));
        }
        let scale = u.length_scale().min(v.length_scale());
        Ok(Self {
            u,
            v,
            su: support(u)?,
            sv: support(v)?,
            form,
            x_rule: GaussLegendre::new(cfg.x_nodes),
            cell_width: cfg.max_cell_width.unwrap_or(0.25 * scale),
        })
    }

    fn shifted_balls(&self, balls: &[(Vec<f64>, f64)], shifts: &[i64], y: &[f64]) -> Vec<(Vec<f64>, f64)> {
        let mut out = Vec::new();
        for (c, r) in balls {
            for &k in shifts {
                // x + k y lies in the ball iff x lies in the ball moved by -k y
                out.push((c.iter().zip(y).map(|(ci, yi)| ci - k as f64 * yi).collect(), *r));
            }
        }
        out
    }

    /// `int g(x, y) dx` over the cells where both shifted supports can meet.
    fn x_integral(&self, y: &[f64], form: &Form) -> f64 {
        let dim = y.len();
        let (ku, kv) = form.shifts();
        let bu = self.shifted_balls(&self.su, &ku, y);
        let bv = self.shifted_balls(&self.sv, &kv, y);
        let mut breaks: Vec<Vec<f64>> = vec![Vec::new(); dim];
        for (c, r) in bu.iter().chain(&bv) {
            for a in 0..dim {
                breaks[a].push(c[a] - r);
                breaks[a].push(c[a] + r);
            }
        }
        for b in &mut breaks {
            refine_breaks(b, self.cell_width);
        }
        let mut buf = vec![0.0; dim];
        let mut x = vec![0.0; dim];
        let mut total = 0.0;
        let cells: Vec<usize> = breaks.iter().map(|b| b.len().saturating_sub(1)).collect();
        let count: usize = cells.iter().product();
        let n = self.x_rule.len();
        for cell in 0..count {
            let mut rem = cell;
            let mut lo = vec![0.0; dim];
            let mut hi = vec![0.0; dim];
            for a in 0..dim {
                let i = rem % cells[a];
                rem /= cells[a];
                lo[a] = breaks[a][i];
                hi[a] = breaks[a][i + 1];
            }
            if !bu.iter().any(|(c, r)| box_meets_ball(&lo, &hi, c, *r))
                || !bv.iter().any(|(c, r)| box_meets_ball(&lo, &hi, c, *r))
            {
                continue;
            }
            let half: Vec<f64> = (0..dim).map(|a| 0.5 * (hi[a] - lo[a])).collect();
            let mid: Vec<f64> = (0..dim).map(|a| 0.5 * (hi[a] + lo[a])).collect();
            for node in 0..n.pow(dim as u32) {
                let mut r = node;
                let mut w = 1.0;
                for a in 0..dim {
                    let j = r % n;
                    r /= n;
                    x[a] = mid[a] + half[a] * self.x_rule.nodes[j];
                    w *= half[a] * self.x_rule.weights[j];
                }
                total += w * form.eval(self.u, self.v, &x, y, &mut buf);
            }
        }
        total
    }

    /// Largest distance between a point of `supp u` and a point of `supp v`.
    fn reach(&self) -> f64 {
        let mut d: f64 = 0.0;
        for (cu, ru) in &self.su {
            for (cv, rv) in &self.sv {
                d = d.max(dist(cu, cv) + ru + rv);
            }
        }
        d
    }

    fn scale(&self) -> f64 {
        self.u.length_scale().min(self.v.length_scale())
    }

    /// `int_{S^{N-1}} int_0^inf G(r, theta) r^{-1-2s} dr dtheta` and an error estimate.
    fn integrate(&self, s: f64, cfg: &EnergyConfig) -> (f64, f64) {
        let dim = self.u.dim();
        if self.su.is_empty() || self.sv.is_empty() {
            return (0.0, 0.0);
        }
        let scale = self.scale();
        let reach = self.reach();
        let rho0 = cfg.inner_radius.unwrap_or(0.02 * scale).min(0.5 * reach);
        let max_width = cfg.max_panel_width.unwrap_or(0.25 * scale);
        let edges = crate::operator::radial_panel_edges(rho0, reach, cfg.grading, max_width);
        let fine = GaussLegendre::new(cfg.radial_nodes);
        let coarse = GaussLegendre::new(cfg.radial_nodes / 2 + 2);
        let rule = half_rule(dim, cfg.circle_points, 2, 2);

        // every (direction, radius) pair is independent
        let mut jobs: Vec<(usize, f64, f64, f64)> = Vec::new();
        for (d, _) in rule.dirs.iter().enumerate() {
            jobs.push((d, rho0, 0.0, 0.0));
            for w in edges.windows(2) {
                for (t, wt) in fine.mapped(w[0], w[1]) {
                    jobs.push((d, t, wt, 0.0));
                }
                for (t, wt) in coarse.mapped(w[0], w[1]) {
                    jobs.push((d, t, 0.0, wt));
                }
            }
        }
        let g_at = |&(d, r, _, _): &(usize, f64, f64, f64)| -> f64 {
            let y: Vec<f64> = rule.dirs[d].iter().map(|t| t * r).collect();
            self.x_integral(&y, &self.form)
        };
        #[cfg(feature = "parallel")]
        let values: Vec<f64> = {
            use rayon::prelude::*;
            jobs.par_iter().map(g_at).collect()
        };
        #[cfg(not(feature = "parallel"))]
        let values: Vec<f64> = jobs.iter().map(g_at).collect();

        let p = self.form.order();
        let mut per_dir = vec![(0.0f64, 0.0f64, 0.0f64); rule.len()];
        for (job, g) in jobs.iter().zip(&values) {
            let (d, r, wf, wc) = *job;
            let k = g * r.powf(-1.0 - 2.0 * s);
            if wf == 0.0 && wc == 0.0 {
                // G(r) ~ G(rho0) (r / rho0)^p below rho0
                per_dir[d].2 = g * rho0.powf(-2.0 * s) / (p - 2.0 * s);
            }
            per_dir[d].0 += wf * k;
            per_dir[d].1 += wc * k;
        }
        let zero = vec![0.0; dim];
        let uv = self.x_integral(&zero, &Form::Stencil { w: vec![1.0] });
        let far = self.form.far_weight() * uv * reach.powf(-2.0 * s) / (2.0 * s);
        let mut value = 0.0;
        let mut err = 0.0;
        for ((f, c, inner), w) in per_dir.iter().zip(&rule.weights) {
            value += w * (f + inner + far);
            err += w * ((f - c).abs() + inner.abs() * 4.0 * (rho0 / scale).powi(2));
        }
        (value, err)
    }
}

fn check_order(s: f64, limit: f64, what: &str) -> Result<()> {
    if !(s > 0.0 && s < limit) {
        return Err(Error::InvalidParams(format!("{what} needs 0 < s < {limit}, got {s}")));
    }
    Ok(())
}

/// `E_{2m,s}(u, v)` for compactly supported `u, v` in `N <= 2`.
pub fn energy_direct(
    u: &dyn ScalarField,
    v: &dyn ScalarField,
    m: u32,
    s: f64,
    cfg: &EnergyConfig,
) -> Result<EnergyEstimate> {
    cfg.validate()?;
    if m == 0 {
        return Err(Error::InvalidParams("m must be >= 1".into()));
    }
    check_order(s, 2.0 * m as f64, "E_{2m,s}")?;
    let di = DoubleIntegral::new(u, v, Form::product(m, m), cfg)?;
    let c = norm_constant(&FracParams::new(u.dim() as u32, 2 * m, s)?)?.value;
    let (raw, err) = di.integrate(s, cfg);
    Ok(EnergyEstimate {
        value: 0.5 * c * raw,
        quadrature_error_estimate: 0.5 * c * err,
        config: cfg.clone(),
    })
}

/// `int L_{n,s} u(x) v(x) dx` with the operator evaluated pointwise on Gauss
/// nodes over the support of `v`.
pub fn energy_via_operator(
    u: &dyn ScalarField,
    v: &dyn ScalarField,
    n: u32,
    s: f64,
    qcfg: &QuadratureConfig,
    cfg: &EnergyConfig,
) -> Result<f64> {
    cfg.validate()?;
    let dim = u.dim();
    if v.dim() != dim {
        return Err(Error::GeometryMismatch("u and v live in different dimensions".into()));
    }
    let p = FracParams::new(dim as u32, n, s)?;
    let sv = support(v)?;
    let gl = GaussLegendre::new(cfg.x_nodes);
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let su = support(u)?;
    let mut breaks: Vec<Vec<f64>> = vec![Vec::new(); dim];
    // L u varies fastest near the edge of supp u, so both supports are cut
    // into cells and their edges are cell boundaries
    for (c, r) in sv.iter().chain(&su) {
        for a in 0..dim {
            breaks[a].push(c[a] - r);
            breaks[a].push(c[a] + r);
        }
    }
    let width = cfg.max_cell_width.unwrap_or(0.25 * u.length_scale().min(v.length_scale()));
    for b in &mut breaks {
        refine_breaks(b, width);
    }
    let cells: Vec<usize> = breaks.iter().map(|b| b.len() - 1).collect();
    let count: usize = cells.iter().product();
    let n_gl = gl.len();
    for cell in 0..count {
        let mut rem = cell;
        let mut lo = vec![0.0; dim];
        let mut hi = vec![0.0; dim];
        for a in 0..dim {
            let i = rem % cells[a];
            rem /= cells[a];
            lo[a] = breaks[a][i];
            hi[a] = breaks[a][i + 1];
        }
        if !sv.iter().any(|(c, r)| box_meets_ball(&lo, &hi, c, *r)) {
            continue;
        }
        for node in 0..n_gl.pow(dim as u32) {
            let mut r = node;
            let mut w = 1.0;
            let mut x = vec![0.0; dim];
            for a in 0..dim {
                let j = r % n_gl;
                r /= n_gl;
                let half = 0.5 * (hi[a] - lo[a]);
                x[a] = 0.5 * (hi[a] + lo[a]) + half * gl.nodes[j];
                w *= half * gl.weights[j];
            }
            let vx = v.eval(&x);
            if vx != 0.0 {
                nodes.push(x);
                weights.push(w * vx);
            }
        }
    }
    let values = eval_points(u, &nodes, &p, qcfg);
    let mut total = 0.0;
    for (r, w) in values.into_iter().zip(weights) {
        total += w * r?.value;
    }
    Ok(total)
}

fn ibp_report(lhs: (f64, f64), rhs: (f64, f64)) -> IbpReport {
    let denom = lhs.0.abs().max(rhs.0.abs());
    IbpReport {
        lhs: lhs.0,
        rhs: rhs.0,
        relative_gap: if denom == 0.0 { 0.0 } else { (lhs.0 - rhs.0).abs() / denom },
        lhs_error: lhs.1,
        rhs_error: rhs.1,
    }
}

/// `int int delta_n u delta_m v / |y|^{N+2s}` against
/// `int int delta_{n+m} u v / |y|^{N+2s}` (no normalizing constant).
pub fn discrete_ibp_check(
    u: &dyn ScalarField,
    v: &dyn ScalarField,
    n: u32,
    m: u32,
    s: f64,
    cfg: &EnergyConfig,
) -> Result<IbpReport> {
    cfg.validate()?;
    if n == 0 || m == 0 {
        return Err(Error::InvalidParams("difference orders must be >= 1".into()));
    }
    check_order(s, (n + m) as f64, "the double integrals")?;
    let lhs = DoubleIntegral::new(u, v, Form::product(n, m), cfg)?.integrate(s, cfg);
    let rhs = DoubleIntegral::new(u, v, Form::stencil(n + m), cfg)?.integrate(s, cfg);
    Ok(ibp_report(lhs, rhs))
}

/// `int int u delta_1 v / |y|^{N+2s}` against
/// `int int (u(x) - u(x+y)) (v(x) - v(x+y)) / |y|^{N+2s}`, for `0 < s < 1`.
pub fn first_difference_ibp_check(
    u: &dyn ScalarField,
    v: &dyn ScalarField,
    s: f64,
    cfg: &EnergyConfig,
) -> Result<IbpReport> {
    cfg.validate()?;
    check_order(s, 1.0, "the first-difference identity")?;
    // the Stencil form differences its first argument
    let lhs = DoubleIntegral::new(v, u, Form::stencil(1), cfg)?.integrate(s, cfg);
    let rhs = DoubleIntegral::new(u, v, Form::OneSided, cfg)?.integrate(s, cfg);
    Ok(ibp_report(lhs, rhs))
}
