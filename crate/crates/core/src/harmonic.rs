//! The explicit s-harmonic family on the unit ball.
//!
//! For outside data `psi` vanishing on `B_r`, `r > 1`,
//!
//! ```text
//! u(x) = kappa (1 - |x|^2)_+^s int_{|y|>1} psi(y) / ((|y|^2 - 1)^s |x - y|^N) dy + chi_{|x|>1} psi(x)
//! kappa = (-1)^n Gamma(N/2) / (Gamma(sigma) Gamma(1 - sigma) pi^{N/2})
//! ```
//!
//! satisfies `L_{m,s} u = 0` in `B` for every `m > s`. The kernel integral
//! runs over the annulus holding `supp psi` in polar coordinates about the
//! origin, where the integrand is smooth for `|x| < 1`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex};

use serde::Serialize;

use crate::constants::FracParams;
use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::field::{annulus, combination, Blob, Extent, Field, ScalarField, Sphere};
use crate::operator::{eval_points, QuadratureConfig};
use crate::quad::GaussLegendre;
use crate::specialfn::gamma;

/// Outside data: `psi` vanishes on `B_inner`, `inner > 1`, and outside `B_outer`.
#[derive(Clone)]
pub struct OutsideDatum {
    pub psi: Field,
    pub inner: f64,
    pub outer: f64,
}

impl OutsideDatum {
    pub fn new(psi: Field, inner: f64, outer: f64) -> Result<Self> {
        if !(inner > 1.0 && outer > inner) {
            return Err(Error::InvalidParams(format!(
                "need 1 < inner < outer, got inner={inner}, outer={outer}"
            )));
        }
        if !matches!(psi.dim(), 1..=3) {
            return Err(Error::InvalidParams("outside data need N <= 3".into()));
        }
        for b in psi.blobs() {
            let c = b.center.iter().map(|v| v * v).sum::<f64>().sqrt();
            match b.extent {
                Extent::Compact { radius } if c + radius <= outer * (1.0 + 1e-12) => {}
                _ => {
                    return Err(Error::SupportViolation(format!(
                        "{} is not supported inside |y| <= {outer}",
                        psi.describe()
                    )))
                }
            }
        }
        // spot check that psi vanishes on B_inner
        let dim = psi.dim();
        for i in 0..=16 {
            let r = inner * i as f64 / 16.0 * (1.0 - 1e-9);
            for a in 0..dim {
                for sign in [-1.0, 1.0] {
                    let mut y = vec![0.0; dim];
                    y[a] = sign * r;
                    if psi.eval(&y) != 0.0 {
                        return Err(Error::SupportViolation(format!(
                            "{} does not vanish at {y:?} inside |y| < {inner}",
                            psi.describe()
                        )));
                    }
                }
            }
        }
        Ok(Self { psi, inner, outer })
    }

    /// Radial bump of height `amplitude` on `inner <= |y| <= outer`.
    pub fn annulus(dim: usize, inner: f64, outer: f64, amplitude: f64) -> Result<Self> {
        let psi = combination(vec![(amplitude, annulus(dim, inner, outer))]);
        Self::new(psi, inner, outer)
    }

    pub fn zero(dim: usize, inner: f64, outer: f64) -> Result<Self> {
        Self::annulus(dim, inner, outer, 0.0)
    }

    /// `a psi_1 + b psi_2` on the union of both annuli.
    pub fn combine(a: f64, p: &Self, b: f64, q: &Self) -> Result<Self> {
        let psi = combination(vec![(a, p.psi.clone()), (b, q.psi.clone())]);
        Self::new(psi, p.inner.min(q.inner), p.outer.max(q.outer))
    }
}

/// Node counts of the kernel integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelConfig {
    /// Radial Gauss panels across the annulus and points per panel.
    pub radial_panels: usize,
    pub radial_nodes: usize,
    /// Angular points on the circle (`N = 2`) or polar x azimuth (`N = 3`).
    pub angular_points: usize,
}

impl Default for KernelConfig {
    fn default() -> Self {
        Self { radial_panels: 8, radial_nodes: 20, angular_points: 64 }
    }
}

impl KernelConfig {
    pub fn doubled(self) -> Self {
        Self {
            radial_panels: 2 * self.radial_panels,
            radial_nodes: self.radial_nodes,
            angular_points: 2 * self.angular_points,
        }
    }
}

/// `u` of the explicit family for given data and `s`.
pub struct PoissonExtension {
    pub datum: OutsideDatum,
    pub s: f64,
    pub n: u32,
    pub sigma: f64,
    pub kappa: f64,
    cfg: KernelConfig,
    kernel_error: f64,
    // polar nodes y and weights (including the Jacobian), fixed per extension
    nodes: Vec<(Vec<f64>, f64)>,
}

/// `(-1)^n Gamma(N/2) / (Gamma(sigma) Gamma(1 - sigma) pi^{N/2})`.
pub fn kernel_constant(dim: usize, s: f64) -> Result<f64> {
    let n = s.floor();
    let sigma = s - n;
    if sigma == 0.0 {
        return Err(Error::InvalidParams(format!("the explicit family needs non-integer s, got {s}")));
    }
    let sign = if (n as i64) % 2 == 0 { 1.0 } else { -1.0 };
    let nn = dim as f64;
    Ok(sign * gamma(nn / 2.0)? / (gamma(sigma)? * gamma(1.0 - sigma)? * PI.powf(nn / 2.0)))
}

fn unit_directions(dim: usize, points: usize) -> Vec<(Vec<f64>, f64)> {
    let rule = crate::operator::directions::full_rule(dim, points, points / 2, points);
    rule.dirs.into_iter().zip(rule.weights).collect()
}

impl PoissonExtension {
    pub fn new(datum: OutsideDatum, s: f64, cfg: KernelConfig) -> Result<Self> {
        if !(s > 0.0) {
            return Err(Error::InvalidParams(format!("s must be positive, got {s}")));
        }
        let kappa = kernel_constant(datum.psi.dim(), s)?;
        let n = s.floor() as u32;
        let dim = datum.psi.dim();
        let gl = GaussLegendre::new(cfg.radial_nodes);
        let (a, b) = (datum.inner, datum.outer);
        let mut nodes = Vec::new();
        for p in 0..cfg.radial_panels {
            let lo = a + (b - a) * p as f64 / cfg.radial_panels as f64;
            let hi = a + (b - a) * (p + 1) as f64 / cfg.radial_panels as f64;
            for (rho, w) in gl.mapped(lo, hi) {
                let radial = w * rho.powi(dim as i32 - 1) / (rho * rho - 1.0).powf(s);
                for (dir, wd) in unit_directions(dim, cfg.angular_points) {
                    let y: Vec<f64> = dir.iter().map(|d| d * rho).collect();
                    let psi = datum.psi.eval(&y);
                    if psi != 0.0 {
                        nodes.push((y, radial * wd * psi));
                    }
                }
            }
        }
        Ok(Self { datum, s, n, sigma: s - n as f64, kappa, cfg, kernel_error: f64::NAN, nodes })
    }

    /// Doubles the kernel nodes from the default until the kernel integral
    /// moves by at most `tol` at probe points inside `B_{0.9}`.
    pub fn converged(datum: OutsideDatum, s: f64, tol: f64) -> Result<Self> {
        let mut cfg = KernelConfig::default();
        if datum.psi.dim() == 3 {
            cfg = KernelConfig { radial_panels: 4, radial_nodes: 16, angular_points: 24 };
        }
        let dim = datum.psi.dim();
        let probes: Vec<Vec<f64>> = [0.0, 0.5, -0.9]
            .iter()
            .map(|&a| {
                let mut v = vec![0.0; dim];
                v[0] = a;
                v
            })
            .collect();
        let mut cur = Self::new(datum.clone(), s, cfg)?;
        for _ in 0..4 {
            let next = Self::new(datum.clone(), s, cur.cfg.doubled())?;
            let gap = probes
                .iter()
                .map(|x| (cur.kernel_integral(x) - next.kernel_integral(x)).abs())
                .fold(0.0, f64::max);
            cur.kernel_error = gap;
            if gap <= tol {
                return Ok(cur);
            }
            cur = next;
        }
        Err(Error::Budget(format!(
            "kernel integral still moves by {:.2e} > {tol:.0e} after 4 doublings",
            cur.kernel_error
        )))
    }

    pub fn dim(&self) -> usize {
        self.datum.psi.dim()
    }

    /// Change of the kernel integral under doubled nodes, when measured.
    pub fn kernel_error(&self) -> Option<f64> {
        self.kernel_error.is_finite().then_some(self.kernel_error)
    }

    pub fn config(&self) -> KernelConfig {
        self.cfg
    }

    /// `kappa int psi(y) / ((|y|^2 - 1)^s |x - y|^N) dy`, without the boundary factor.
    pub fn kernel_integral(&self, x: &[f64]) -> f64 {
        let dim = self.dim() as i32;
        let mut acc = 0.0;
        for (y, w) in &self.nodes {
            let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
            acc += w / d2.sqrt().powi(dim);
        }
        self.kappa * acc
    }
}

/// `u(x)`; fails on the unit sphere.
pub fn poisson_eval(pe: &PoissonExtension, x: &[f64]) -> Result<f64> {
    if x.len() != pe.dim() {
        return Err(Error::GeometryMismatch("point and datum dimensions differ".into()));
    }
    let r2: f64 = x.iter().map(|v| v * v).sum();
    if (r2.sqrt() - 1.0).abs() < 1e-12 {
        return Err(Error::Domain(format!("{x:?} lies on the unit sphere")));
    }
    if r2 < 1.0 {
        Ok((1.0 - r2).powf(pe.s) * pe.kernel_integral(x))
    } else {
        Ok(pe.datum.psi.eval(x))
    }
}

/// `u` as a field, with a memo of evaluated points shared across threads.
pub struct PoissonField {
    pe: Arc<PoissonExtension>,
    memo: Mutex<HashMap<Vec<u64>, f64>>,
}

impl PoissonField {
    pub fn new(pe: Arc<PoissonExtension>) -> Self {
        Self { pe, memo: Mutex::new(HashMap::new()) }
    }

    pub fn cached_points(&self) -> usize {
        self.memo.lock().map(|m| m.len()).unwrap_or(0)
    }
}

impl ScalarField for PoissonField {
    fn dim(&self) -> usize {
        self.pe.dim()
    }

    fn eval(&self, x: &[f64]) -> f64 {
        let key: Vec<u64> = x.iter().map(|v| v.to_bits()).collect();
        if let Some(v) = self.memo.lock().ok().and_then(|m| m.get(&key).copied()) {
            return v;
        }
        // the unit sphere itself has measure zero; u is continuous there with value 0
        let v = poisson_eval(&self.pe, x).unwrap_or(0.0);
        if let Ok(mut m) = self.memo.lock() {
            m.entry(key).or_insert(v);
        }
        v
    }

    fn line_jet(&self, x: &[f64], dir: &[f64], order: usize) -> Option<Jet> {
        let r2: f64 = x.iter().map(|v| v * v).sum();
        if r2 >= 1.0 {
            return self.pe.datum.psi.line_jet(x, dir, order);
        }
        let dn = dir.iter().map(|d| d * d).sum::<f64>().sqrt();
        if dn == 0.0 {
            return Some(Jet::constant(self.eval(x), order));
        }
        // |x + t dir - y|^-N = r^-N sum_k C_k^{N/2}(z) (t dn / r)^k
        let lambda = 0.5 * self.dim() as f64;
        let mut acc = vec![0.0; order + 1];
        let mut gg = vec![0.0; order + 1];
        for (y, w) in &self.pe.nodes {
            let diff: Vec<f64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
            let r = diff.iter().map(|v| v * v).sum::<f64>().sqrt();
            let z = -diff.iter().zip(dir).map(|(a, d)| a * d).sum::<f64>() / (r * dn);
            gg[0] = 1.0;
            if order >= 1 {
                gg[1] = 2.0 * lambda * z;
            }
            for k in 2..=order {
                let kf = k as f64;
                gg[k] = (2.0 * z * (kf + lambda - 1.0) * gg[k - 1] - (kf + 2.0 * lambda - 2.0) * gg[k - 2]) / kf;
            }
            let mut scale = w / r.powi(self.dim() as i32);
            let step = dn / r;
            for k in 0..=order {
                acc[k] += scale * gg[k];
                scale *= step;
            }
        }
        let kernel = Jet::from_coeffs(&acc) * self.pe.kappa;
        let xs: f64 = x.iter().zip(dir).map(|(a, d)| a * d).sum();
        let mut c = vec![1.0 - r2, -2.0 * xs, -dn * dn];
        c.resize(order + 1, 0.0);
        Some(Jet::from_coeffs(&c).powf(self.pe.s) * kernel)
    }

    fn blobs(&self) -> Vec<Blob> {
        let d = &self.pe.datum;
        vec![Blob {
            center: vec![0.0; self.dim()],
            extent: Extent::Compact { radius: d.outer },
            scale: (0.25 * (d.outer - d.inner)).min(0.25),
        }]
    }

    fn spheres(&self) -> Vec<Sphere> {
        let c = vec![0.0; self.dim()];
        let d = &self.pe.datum;
        [1.0, d.inner, d.outer]
            .into_iter()
            .map(|radius| Sphere { center: c.clone(), radius })
            .collect()
    }

    fn describe(&self) -> String {
        format!("poisson(s={}, {})", self.pe.s, self.pe.datum.psi.describe())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HarmonicReport {
    pub points: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
    pub max_residual: f64,
    /// `max |u|` over a scan of the datum's support radius.
    pub u_scale: f64,
    pub ratio: f64,
    pub kernel_error: Option<f64>,
    pub warnings: Vec<String>,
}

/// `L_{m,s} u` at `points` inside the ball, against the scale of `u`.
pub fn verify_sharmonic(
    pe: Arc<PoissonExtension>,
    m: u32,
    points: &[Vec<f64>],
    cfg: &QuadratureConfig,
) -> Result<HarmonicReport> {
    let dim = pe.dim();
    let p = FracParams::new(dim as u32, m, pe.s)?;
    for x in points {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if x.len() != dim || r >= 1.0 {
            return Err(Error::Domain(format!("sample point {x:?} must lie inside the unit ball")));
        }
    }
    let field = PoissonField::new(pe.clone());
    let mut residuals = Vec::with_capacity(points.len());
    let mut warnings = Vec::new();
    for (x, r) in points.iter().zip(eval_points(&field, points, &p, cfg)) {
        let r = r?;
        warnings.extend(r.warnings.iter().map(|w| format!("at {x:?}: {w}")));
        residuals.push(r.value);
    }
    let reach = pe.datum.outer;
    let mut u_scale: f64 = 0.0;
    for i in 0..=200 {
        let mut y = vec![0.0; dim];
        y[0] = -reach + 2.0 * reach * i as f64 / 200.0;
        u_scale = u_scale.max(field.eval(&y).abs());
    }
    for x in points {
        u_scale = u_scale.max(field.eval(x).abs());
    }
    let max_residual = residuals.iter().fold(0.0f64, |a, r| a.max(r.abs()));
    Ok(HarmonicReport {
        points: points.to_vec(),
        residuals,
        max_residual,
        u_scale,
        ratio: if u_scale > 0.0 { max_residual / u_scale } else { max_residual },
        kernel_error: pe.kernel_error(),
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_constant_sign_follows_n() {
        assert!(kernel_constant(1, 0.5).unwrap() > 0.0);
        assert!(kernel_constant(1, 1.5).unwrap() < 0.0);
        assert!(kernel_constant(2, 2.3).unwrap() > 0.0);
        assert!(kernel_constant(1, 2.0).is_err());
        // N = 1, s = 1/2: Gamma(1/2) / (Gamma(1/2)^2 sqrt(pi)) = 1 / pi
        assert!((kernel_constant(1, 0.5).unwrap() - 1.0 / PI).abs() < 1e-15);
    }

    #[test]
    fn line_jet_matches_differences() {
        let d = OutsideDatum::annulus(2, 2.0, 3.0, 1.0).unwrap();
        let cfg = KernelConfig { radial_panels: 2, radial_nodes: 8, angular_points: 16 };
        let pe = Arc::new(PoissonExtension::new(d, 1.3, cfg).unwrap());
        let f = PoissonField::new(pe);
        let (x, dir) = ([0.3, -0.2], [0.6, 0.8]);
        let j = f.line_jet(&x, &dir, 4).unwrap();
        let at = |t: f64| f.eval(&[x[0] + t * dir[0], x[1] + t * dir[1]]);
        let h = 1e-3;
        assert!((j.coeffs()[0] - at(0.0)).abs() < 1e-14);
        assert!((j.coeffs()[1] - (at(h) - at(-h)) / (2.0 * h)).abs() < 1e-7);
        let second = (at(h) - 2.0 * at(0.0) + at(-h)) / (h * h);
        assert!((2.0 * j.coeffs()[2] - second).abs() < 1e-5);
    }

    #[test]
    fn zero_datum_gives_zero() {
        let pe = PoissonExtension::new(OutsideDatum::zero(1, 2.0, 3.0).unwrap(), 1.5, KernelConfig::default())
            .unwrap();
        for x in [0.0, 0.5, 2.5] {
            assert_eq!(poisson_eval(&pe, &[x]).unwrap(), 0.0);
        }
    }

    #[test]
    fn rejects_unit_sphere_and_bad_data() {
        let d = OutsideDatum::annulus(1, 2.0, 3.0, 1.0).unwrap();
        let pe = PoissonExtension::new(d, 1.5, KernelConfig::default()).unwrap();
        assert!(poisson_eval(&pe, &[1.0]).is_err());
        assert!(OutsideDatum::annulus(1, 0.5, 3.0, 1.0).is_err());
        let wide = crate::field::bump(1, 2.5);
        assert!(OutsideDatum::new(wide, 2.0, 3.0).is_err());
    }
}
