//! Classical `(-Delta)^n` from directional derivatives.
//!
//! On homogeneous polynomials of degree `2n`, averaging `(theta . grad)^{2n}`
//! over the sphere gives `c_n Delta^n` with `c_n = avg theta_1^{2n}`, so
//! `(-Delta)^n f(x) = (-1)^n avg_theta D_theta^{2n} f(x) / c_n`, and an exact
//! spherical design turns the average into a finite sum.

use super::directions::{design, even_moment};
use super::MAX_OPERATOR_DIM;
use crate::error::{Error, Result};
use crate::field::{Blob, Extent, Field, ScalarField, Sphere};
use crate::jet::Jet;

/// `D_dir^{2n} f(x)` by central differences `(-1)^n delta_n f(x, h dir) / h^{2n}`,
/// Richardson-extrapolated over `h, h/2, h/4`.
fn fd_directional(f: &dyn ScalarField, x: &[f64], dir: &[f64], n: u32) -> f64 {
    let st = crate::stencils::Stencil::new(n).expect("n >= 1");
    let w = st.float_weights();
    let nn = n as i64;
    let h0 = 0.2 * f.length_scale() / n as f64;
    let mut buf = vec![0.0; x.len()];
    let mut at = |h: f64| {
        let mut acc = 0.0;
        for (i, wk) in w.iter().enumerate() {
            let k = i as i64 - nn;
            for a in 0..x.len() {
                buf[a] = x[a] + k as f64 * h * dir[a];
            }
            acc += wk * f.eval(&buf);
        }
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        sign * acc / h.powi(2 * n as i32)
    };
    let d = [at(h0), at(0.5 * h0), at(0.25 * h0)];
    let r1 = [(4.0 * d[1] - d[0]) / 3.0, (4.0 * d[2] - d[1]) / 3.0];
    (16.0 * r1[1] - r1[0]) / 15.0
}

/// `(-Delta)^n f(x)` for `N <= 3`, exact when the field has jets.
pub fn eval_polyharmonic(f: &dyn ScalarField, x: &[f64], n: u32) -> Result<f64> {
    let dim = f.dim();
    if x.len() != dim {
        return Err(Error::GeometryMismatch(format!("point has N={}, field has N={dim}", x.len())));
    }
    if dim > MAX_OPERATOR_DIM {
        return Err(Error::InvalidParams(format!("(-Delta)^n supports N <= {MAX_OPERATOR_DIM}")));
    }
    if n == 0 {
        return Ok(f.eval(x));
    }
    if 2 * n as usize > crate::jet::MAX_ORDER {
        return Err(Error::InvalidParams(format!("(-Delta)^n needs n <= {}", crate::jet::MAX_ORDER / 2)));
    }
    f.check_point(x, n)?;
    let rule = design(dim, n);
    let order = 2 * n as usize;
    let mut avg = 0.0;
    for (dir, w) in rule.dirs.iter().zip(&rule.weights) {
        let d = match f.line_jet(x, dir, order) {
            Some(j) => j.derivative(order),
            None => fd_directional(f, x, dir, n),
        };
        avg += w * d;
    }
    let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
    Ok(sign * avg / even_moment(dim, n))
}

/// The field `(-Delta)^n f` for a field with exact derivatives.
pub struct Polyharmonic {
    inner: Field,
    n: u32,
}

impl Polyharmonic {
    pub fn new(inner: Field, n: u32) -> Self {
        Self { inner, n }
    }
}

impl ScalarField for Polyharmonic {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn eval(&self, x: &[f64]) -> f64 {
        eval_polyharmonic(self.inner.as_ref(), x, self.n).unwrap_or(f64::NAN)
    }

    fn line_jet(&self, _x: &[f64], _dir: &[f64], _order: usize) -> Option<Jet> {
        None
    }

    fn blobs(&self) -> Vec<Blob> {
        let n = self.n as i32;
        let dim = self.dim() as f64;
        self.inner
            .blobs()
            .into_iter()
            .map(|b| match b.extent {
                // derivatives of a Gaussian are a polynomial times the same
                // Gaussian; a wider envelope absorbs the polynomial
                Extent::Gaussian { width, amplitude } => {
                    let grow = (1..=2 * n).map(f64::from).product::<f64>() * (dim + 4.0 * n as f64).powi(n);
                    Blob {
                        extent: Extent::Gaussian {
                            width: 1.5 * width,
                            amplitude: amplitude * grow / width.powi(2 * n),
                        },
                        ..b
                    }
                }
                Extent::Compact { .. } => b,
            })
            .collect()
    }

    fn spheres(&self) -> Vec<Sphere> {
        self.inner.spheres()
    }

    fn breakpoints(&self, x: &[f64], dir: &[f64]) -> Vec<f64> {
        self.inner.breakpoints(x, dir)
    }

    fn length_scale(&self) -> f64 {
        self.inner.length_scale()
    }

    fn describe(&self) -> String {
        format!("(-Delta)^{}({})", self.n, self.inner.describe())
    }

    fn check_point(&self, x: &[f64], m: u32) -> Result<()> {
        self.inner.check_point(x, m + self.n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{gaussian, CatalogField, CatalogKind};

    #[test]
    fn gaussian_laplacians_at_origin() {
        // -Delta exp(-|x|^2/2) at 0 is N; Delta^2 at 0 is N(N+2)
        for dim in 1..=3 {
            let f = gaussian(dim);
            let x = vec![0.0; dim];
            let n = dim as f64;
            assert!((eval_polyharmonic(f.as_ref(), &x, 1).unwrap() - n).abs() < 1e-13);
            assert!((eval_polyharmonic(f.as_ref(), &x, 2).unwrap() - n * (n + 2.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn quartic_times_wide_bump() {
        // x^4 times a wide bump: (-Delta)^2 at the centre is 24 up to bump corrections
        let f = CatalogField::new(1, CatalogKind::PolyBump { power: 4, radius: 1e3 });
        let v = eval_polyharmonic(&f, &[0.0], 2).unwrap();
        assert!((v - 24.0).abs() < 1e-3, "{v}");
    }

    #[test]
    fn finite_differences_track_jets() {
        let f = crate::field::SampledField::from_fn(vec![-6.0, -6.0], 0.05, vec![241, 241], |p| {
            (-(p[0] * p[0] + p[1] * p[1]) / 2.0).exp()
        })
        .unwrap();
        let v = eval_polyharmonic(&f, &[0.3, -0.2], 1).unwrap();
        let r2: f64 = 0.13;
        let exact = (2.0 - r2) * (-r2 / 2.0).exp();
        assert!((v - exact).abs() < 1e-3, "{v} vs {exact}");
    }
}
