//! Radial integrals `int_0^inf g(r) r^{-1-2s} dr` along one direction.
//!
//! `g(r) = delta_m f(x, r theta)` vanishes like `r^{2m}` at the origin, so the
//! integral splits into three pieces:
//!
//! * `[0, rho0]`: the even Taylor series of `g` (from jets) integrated term by
//!   term, or for fields without jets a Chebyshev interpolant of
//!   `g(sqrt(u)) / u^m` in `u = r^2`. Either way no difference is ever formed
//!   at tiny `r`, where it would be pure rounding noise.
//! * `[rho0, r_cut]`: graded Gauss-Legendre panels, split at the radii where
//!   some `x + k r theta` crosses a non-smooth sphere of the field, with
//!   adaptive bisection.
//! * `[r_cut, inf)`: every shifted sample has reached the field's limit, so
//!   `g` is the constant `w_0 (f(x) - f_inf)` and the integral is analytic.

use crate::field::{dist, Extent, ScalarField};
use crate::jet::MAX_ORDER;
use crate::quad::GaussLegendre;

use super::config::QuadratureConfig;

/// Float view of a stencil plus its moments `mu_j = sum_k w_k k^j`.
#[derive(Debug, Clone)]
pub(crate) struct FloatStencil {
    pub m: usize,
    /// `w_k` for `k = 0..=m` (the stencil is symmetric).
    pub w: Vec<f64>,
    pub moments: Vec<f64>,
    pub abs_sum: f64,
}

impl FloatStencil {
    pub fn new(m: u32) -> Self {
        let st = crate::stencils::Stencil::new(m).expect("m >= 1 checked by FracParams");
        let full = st.float_weights();
        let mu = m as usize;
        let w: Vec<f64> = full[mu..].to_vec();
        let moments = (0..=MAX_ORDER)
            .map(|j| {
                use num_traits::ToPrimitive;
                crate::stencils::moment_sum(m, j as u32).to_f64().unwrap_or(f64::NAN)
            })
            .collect();
        Self { m: mu, w, moments, abs_sum: st.abs_sum() }
    }
}

/// Outcome of one radial integral.
#[derive(Debug, Clone, Default)]
pub(crate) struct RadialOutcome {
    pub value: f64,
    pub error: f64,
    pub tail: f64,
    pub panels: usize,
    pub evals: usize,
    pub inner_radius: f64,
}

pub(crate) struct Geometry {
    pub rho0: f64,
    pub r_cut: f64,
    pub max_width: f64,
    pub breaks: Vec<f64>,
}

/// Radii where `x +- k r dir` crosses a non-smooth locus of `f`.
fn radial_breaks(f: &dyn ScalarField, x: &[f64], dir: &[f64], m: usize, one_sided: bool) -> Vec<f64> {
    let scale = f.length_scale();
    let mut out: Vec<f64> = f
        .breakpoints(x, dir)
        .into_iter()
        .filter(|t| !one_sided || *t > 0.0)
        .flat_map(|t| (1..=m).map(move |k| t.abs() / k as f64))
        .filter(|r| *r > 1e-12 * scale)
        .collect();
    out.sort_by(f64::total_cmp);
    out.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));
    out
}

/// Radius beyond which every shifted sample `x + k r theta` (`k >= 1`) has
/// left the support, or the Gaussian envelopes have dropped below `thr`.
pub(crate) fn far_radius(f: &dyn ScalarField, x: &[f64], thr: f64) -> Option<f64> {
    f.blobs().iter().map(|b| b.reach(x, thr)).fold(None, |acc: Option<f64>, r| {
        Some(acc.map_or(r, |a| a.max(r)))
    })
}

pub(crate) fn geometry(
    f: &dyn ScalarField,
    x: &[f64],
    dir: &[f64],
    st: &FloatStencil,
    cfg: &QuadratureConfig,
    one_sided: bool,
) -> Geometry {
    let m = st.m;
    let scale = f.length_scale();
    let breaks = radial_breaks(f, x, dir, m, one_sided);
    let mut rho0 = cfg.inner_radius.unwrap_or(cfg.inner_scale * scale / m as f64);
    if cfg.inner_radius.is_none() {
        if let Some(b) = breaks.first() {
            rho0 = rho0.min(0.5 * b);
        }
    }
    let thr = 1e-3 * cfg.tol / st.abs_sum;
    let r_cut = cfg
        .r_cut
        .unwrap_or_else(|| far_radius(f, x, thr).unwrap_or(0.0))
        .max(2.0 * rho0);
    let max_width = cfg.max_panel_width.unwrap_or(0.5 * scale / m as f64);
    Geometry { rho0, r_cut, max_width, breaks }
}

/// Panel edges on `[lo, hi]`: geometric growth by `grading`, widths capped
/// by `max_width`, with every break inside the interval inserted.
pub(crate) fn panel_edges(lo: f64, hi: f64, grading: f64, max_width: f64, breaks: &[f64]) -> Vec<f64> {
    let mut edges = vec![lo];
    let mut r = lo;
    while r < hi {
        let mut next = (r * grading).min(r + max_width);
        if next >= hi || hi - next < 1e-9 * hi {
            next = hi;
        }
        edges.push(next);
        r = next;
    }
    edges.extend(breaks.iter().copied().filter(|b| *b > lo && *b < hi));
    edges.sort_by(f64::total_cmp);
    edges.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1e-300));
    edges
}

/// Gauss-Legendre on every panel, bisecting a panel while the rule on its
/// halves disagrees with the rule on the whole by more than its share of `tol`.
pub(crate) fn integrate_panels(
    g: &mut dyn FnMut(f64) -> f64,
    edges: &[f64],
    gl: &GaussLegendre,
    tol: f64,
    max_depth: usize,
) -> RadialOutcome {
    let mut out = RadialOutcome::default();
    let n = gl.len();
    let panels = edges.len().saturating_sub(1).max(1);
    let share = tol / panels as f64;
    for w in edges.windows(2) {
        let whole = gl.integrate(w[0], w[1], &mut *g);
        out.evals += n;
        let (v, e, p) = refine(g, gl, w[0], w[1], whole, share, max_depth, &mut out.evals);
        out.value += v;
        out.error += e;
        out.panels += p;
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn refine(
    g: &mut dyn FnMut(f64) -> f64,
    gl: &GaussLegendre,
    a: f64,
    b: f64,
    whole: f64,
    tol: f64,
    depth: usize,
    evals: &mut usize,
) -> (f64, f64, usize) {
    if depth == 0 {
        return (whole, 0.0, 1);
    }
    let mid = 0.5 * (a + b);
    let left = gl.integrate(a, mid, &mut *g);
    let right = gl.integrate(mid, b, &mut *g);
    *evals += 2 * gl.len();
    let halves = left + right;
    let err = (halves - whole).abs();
    if err <= tol || depth == 1 {
        return (halves, err, 2);
    }
    let (lv, le, lp) = refine(g, gl, a, mid, left, 0.5 * tol, depth - 1, evals);
    let (rv, re, rp) = refine(g, gl, mid, b, right, 0.5 * tol, depth - 1, evals);
    (lv + rv, le + re, lp + rp)
}

/// Inner piece from the Taylor series of `g`: `sum_j mu_j c_j rho0^{j-2s} / (j - 2s)`.
/// Returns `(value, truncation_estimate, rho0)` after shrinking `rho0` until
/// the last terms are below `tol`.
fn inner_series(coeffs: &[f64], st: &FloatStencil, s: f64, mut rho0: f64, tol: f64) -> (f64, f64, f64) {
    let order = coeffs.len() - 1;
    let start = 2 * st.m;
    let mut best = (f64::NAN, f64::INFINITY, rho0);
    for _ in 0..16 {
        let mut value = 0.0;
        let mut last = [0.0f64; 2];
        let mut j = start;
        while j <= order {
            let term = st.moments[j] * coeffs[j] * rho0.powi(j as i32) * rho0.powf(-2.0 * s)
                / (j as f64 - 2.0 * s);
            value += term;
            last = [last[1], term.abs()];
            j += 2;
        }
        let est = 2.0 * (last[0] + last[1]);
        if est < best.1 {
            best = (value, est, rho0);
        }
        if est <= tol {
            break;
        }
        rho0 *= 0.5;
    }
    best
}

/// Inner piece without jets: Chebyshev interpolation of
/// `h(u) = g(sqrt(u)) / u^m` on `[0, rho0^2]`, then
/// `1/2 int_0^U h(u) u^{a-1} du` with `a = m - s`.
fn inner_chebyshev(
    g: &mut dyn FnMut(f64) -> f64,
    m: usize,
    s: f64,
    rho0: f64,
    nodes: usize,
) -> (f64, f64, usize) {
    use std::f64::consts::PI;
    let big_u = rho0 * rho0;
    let k = nodes;
    let h: Vec<f64> = (0..k)
        .map(|j| {
            let u = 0.5 * big_u * (1.0 + (PI * (j as f64 + 0.5) / k as f64).cos());
            g(u.sqrt()) / u.powi(m as i32)
        })
        .collect();
    let mut c: Vec<f64> = (0..k)
        .map(|i| {
            2.0 / k as f64
                * h.iter()
                    .enumerate()
                    .map(|(j, hj)| hj * (PI * i as f64 * (j as f64 + 0.5) / k as f64).cos())
                    .sum::<f64>()
        })
        .collect();
    c[0] *= 0.5;
    let eval = |u: f64| {
        let t = 2.0 * u / big_u - 1.0;
        let (mut b1, mut b2) = (0.0, 0.0);
        for ci in c.iter().skip(1).rev() {
            let b0 = 2.0 * t * b1 - b2 + ci;
            b2 = b1;
            b1 = b0;
        }
        t * b1 - b2 + c[0]
    };
    let a = m as f64 - s;
    let p0 = eval(0.0);
    let gl = GaussLegendre::new(8);
    let mut rest = 0.0;
    let mut hi = big_u;
    for _ in 0..30 {
        let lo = 0.25 * hi;
        rest += gl.integrate(lo, hi, |u| u.powf(a - 1.0) * (eval(u) - p0));
        hi = lo;
    }
    let value = 0.5 * (p0 * big_u.powf(a) / a + rest);
    let est = 0.5 * (c[k - 1].abs() + c[k - 2].abs()) * big_u.powf(a) / a;
    (value, est, k)
}

/// `int_0^inf delta_m f(x, r dir) r^{-1-2s} dr` for a unit vector `dir`.
pub(crate) fn symmetric_radial(
    f: &dyn ScalarField,
    x: &[f64],
    dir: &[f64],
    st: &FloatStencil,
    s: f64,
    cfg: &QuadratureConfig,
    tol: f64,
    gl: &GaussLegendre,
) -> RadialOutcome {
    let m = st.m;
    let dim = x.len();
    let fx = f.eval(x);
    let f_inf = f.value_at_infinity();
    let geo = geometry(f, x, dir, st, cfg, false);
    let mut buf = vec![0.0; dim];
    let mut evals = 0usize;
    let mut delta = |r: f64| -> f64 {
        let mut acc = st.w[0] * fx;
        for k in 1..=m {
            let kr = k as f64 * r;
            for i in 0..dim {
                buf[i] = x[i] + kr * dir[i];
            }
            let plus = f.eval(&buf);
            for i in 0..dim {
                buf[i] = x[i] - kr * dir[i];
            }
            acc += st.w[k] * (plus + f.eval(&buf));
        }
        evals += 2 * m;
        acc
    };

    // inner region
    let inner_tol = 0.1 * tol;
    let jet_order = if MAX_ORDER % 2 == 0 { MAX_ORDER } else { MAX_ORDER - 1 };
    // on a non-smooth sphere the one-sided jets say nothing about the other side
    let on_locus = f.breakpoints(x, dir).iter().any(|t| t.abs() <= 1e-12 * f.length_scale());
    let jet = if 2 * m + 4 <= jet_order && !on_locus { f.line_jet(x, dir, jet_order) } else { None };
    let (inner, inner_est, rho0) = match jet {
        Some(j) => inner_series(j.coeffs(), st, s, geo.rho0, inner_tol),
        None => {
            // dividing by u^m amplifies rounding near u = 0, so larger radii
            // can win when m is large; the nearest break still caps them
            let mut best = (f64::NAN, f64::INFINITY, geo.rho0);
            let mut rho = geo.rho0;
            if cfg.inner_radius.is_none() {
                let cap = geo.breaks.first().map_or(f64::INFINITY, |b| 0.5 * b);
                rho = (4.0 * rho).min(cap).max(rho);
            }
            for _ in 0..8 {
                let (v, e, _) = inner_chebyshev(&mut delta, m, s, rho, cfg.inner_nodes);
                if e < best.1 {
                    best = (v, e, rho);
                }
                if e <= inner_tol {
                    break;
                }
                rho *= 0.5;
            }
            best
        }
    };

    // graded panels
    let edges = panel_edges(rho0, geo.r_cut, cfg.grading, geo.max_width, &geo.breaks);
    let mut integrand = |r: f64| delta(r) * r.powf(-1.0 - 2.0 * s);
    let mut out = integrate_panels(&mut integrand, &edges, gl, 0.8 * tol, cfg.max_bisections);

    // analytic far field
    let r_cut = geo.r_cut;
    let far_g = st.w[0] * (fx - f_inf);
    let far = far_g * r_cut.powf(-2.0 * s) / (2.0 * s);
    let mut tail = inner_est;
    for b in f.blobs() {
        let d = dist(x, &b.center);
        match b.extent {
            Extent::Gaussian { width, amplitude } => {
                for k in 1..=m {
                    let gap = (k as f64 * r_cut - d).max(0.0);
                    tail += 2.0 * st.w[k].abs() * amplitude * (-gap * gap / (2.0 * width * width)).exp()
                        * r_cut.powf(-2.0 * s)
                        / (2.0 * s);
                }
            }
            Extent::Compact { radius } => {
                if r_cut < d + radius {
                    // forced truncation inside the support: charge the jump at r_cut
                    tail += (delta(r_cut) - far_g).abs() * r_cut.powf(-2.0 * s) / (2.0 * s);
                }
            }
        }
    }
    out.value += inner + far;
    out.tail = tail;
    out.evals += evals;
    out.inner_radius = rho0;
    out
}

/// `int_eps^inf delta^+_m f(x, r dir) r^{-1-2s} dr` with the one-sided
/// difference `w_0 f(x) / 2 + sum_{k>=1} w_k f(x + k r dir)`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn one_sided_radial(
    f: &dyn ScalarField,
    x: &[f64],
    dir: &[f64],
    st: &FloatStencil,
    s: f64,
    eps: f64,
    cfg: &QuadratureConfig,
    tol: f64,
    gl: &GaussLegendre,
) -> RadialOutcome {
    let m = st.m;
    let dim = x.len();
    let fx = f.eval(x);
    let f_inf = f.value_at_infinity();
    let geo = geometry(f, x, dir, st, cfg, true);
    let r_cut = geo.r_cut.max(2.0 * eps);
    let mut buf = vec![0.0; dim];
    let mut evals = 0usize;
    let mut delta = |r: f64| -> f64 {
        let mut acc = 0.5 * st.w[0] * fx;
        for k in 1..=m {
            let kr = k as f64 * r;
            for i in 0..dim {
                buf[i] = x[i] + kr * dir[i];
            }
            acc += st.w[k] * f.eval(&buf);
        }
        evals += m;
        acc
    };
    let edges = panel_edges(eps, r_cut, cfg.grading, geo.max_width, &geo.breaks);
    let mut integrand = |r: f64| delta(r) * r.powf(-1.0 - 2.0 * s);
    let mut out = integrate_panels(&mut integrand, &edges, gl, tol, cfg.max_bisections);
    let far = 0.5 * st.w[0] * (fx - f_inf) * r_cut.powf(-2.0 * s) / (2.0 * s);
    out.value += far;
    out.evals += evals;
    out.inner_radius = eps;
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::gaussian;

    #[test]
    fn edges_are_sorted_and_cover_interval() {
        let e = panel_edges(0.01, 10.0, 1.7, 0.5, &[0.3, 2.0, 20.0]);
        assert_eq!(e[0], 0.01);
        assert_eq!(*e.last().unwrap(), 10.0);
        assert!(e.windows(2).all(|w| w[1] > w[0] && w[1] - w[0] <= 0.5 + 1e-12));
        assert!(e.contains(&0.3) && e.contains(&2.0));
    }

    #[test]
    fn series_and_chebyshev_inner_pieces_agree() {
        // N = 1 gaussian at x = 0.3, m = 2, s = 1.3
        let f = gaussian(1);
        let st = FloatStencil::new(2);
        let x = [0.3];
        let dir = [1.0];
        let jet = f.line_jet(&x, &dir, 32).unwrap();
        let (series, est, rho) = inner_series(jet.coeffs(), &st, 1.3, 0.4, 1e-14);
        assert!(est < 1e-12);
        let mut g = |r: f64| {
            st.w[0] * f.eval(&x)
                + st.w[1] * (f.eval(&[x[0] + r]) + f.eval(&[x[0] - r]))
                + st.w[2] * (f.eval(&[x[0] + 2.0 * r]) + f.eval(&[x[0] - 2.0 * r]))
        };
        let (cheb, _, _) = inner_chebyshev(&mut g, 2, 1.3, rho, 12);
        assert!((series - cheb).abs() < 1e-9 * series.abs().max(1.0), "{series} vs {cheb}");
    }
}
