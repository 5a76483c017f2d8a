//! Fields given by samples on a uniform grid, interpolated with tensor cubic
//! B-splines and extended by zero outside the sampled box.

use super::{Blob, Extent, ScalarField};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct SampledField {
    lo: Vec<f64>,
    spacing: f64,
    shape: Vec<usize>,
    coeffs: Vec<f64>,
}

fn cubic_bspline(t: f64) -> f64 {
    let a = t.abs();
    if a < 1.0 {
        (4.0 - 6.0 * a * a + 3.0 * a * a * a) / 6.0
    } else if a < 2.0 {
        let b = 2.0 - a;
        b * b * b / 6.0
    } else {
        0.0
    }
}

/// Solve `(c_{j-1} + 4 c_j + c_{j+1}) / 6 = f_j` with zero coefficients
/// beyond both ends (Thomas algorithm, in place).
fn prefilter_line(line: &mut [f64]) {
    let n = line.len();
    if n == 0 {
        return;
    }
    let mut diag = vec![0.0; n];
    diag[0] = 4.0 / 6.0;
    let off = 1.0 / 6.0;
    for i in 1..n {
        let w = off / diag[i - 1];
        diag[i] = 4.0 / 6.0 - w * off;
        line[i] -= w * line[i - 1];
    }
    line[n - 1] /= diag[n - 1];
    for i in (0..n - 1).rev() {
        line[i] = (line[i] - off * line[i + 1]) / diag[i];
    }
}

impl SampledField {
    /// `samples` are row-major with the last axis fastest; the point with
    /// multi-index `i` sits at `lo + spacing * i`.
    pub fn new(lo: Vec<f64>, spacing: f64, shape: Vec<usize>, samples: Vec<f64>) -> Result<Self> {
        if lo.len() != shape.len() || lo.is_empty() || lo.len() > 8 {
            return Err(Error::GeometryMismatch("need 1..=8 axes with matching origin".into()));
        }
        if !(spacing > 0.0) {
            return Err(Error::GeometryMismatch(format!("spacing must be positive, got {spacing}")));
        }
        if shape.iter().any(|&n| n < 4) {
            return Err(Error::GeometryMismatch("each axis needs at least 4 samples".into()));
        }
        let total: usize = shape.iter().product();
        if samples.len() != total {
            return Err(Error::GeometryMismatch(format!(
                "expected {total} samples, got {}",
                samples.len()
            )));
        }
        let mut coeffs = samples;
        let dim = shape.len();
        for axis in 0..dim {
            let stride: usize = shape[axis + 1..].iter().product();
            let n = shape[axis];
            let mut line = vec![0.0; n];
            for start in 0..total {
                // visit each line once, from the index whose axis coordinate is 0
                if (start / stride) % n != 0 {
                    continue;
                }
                for (j, v) in line.iter_mut().enumerate() {
                    *v = coeffs[start + j * stride];
                }
                prefilter_line(&mut line);
                for (j, v) in line.iter().enumerate() {
                    coeffs[start + j * stride] = *v;
                }
            }
        }
        Ok(Self { lo, spacing, shape, coeffs })
    }

    /// Sample `f` on the grid and build the interpolant.
    pub fn from_fn(
        lo: Vec<f64>,
        spacing: f64,
        shape: Vec<usize>,
        f: impl Fn(&[f64]) -> f64,
    ) -> Result<Self> {
        let total: usize = shape.iter().product();
        let dim = shape.len();
        let mut samples = Vec::with_capacity(total);
        let mut point = vec![0.0; dim];
        for flat in 0..total {
            let mut rem = flat;
            for axis in (0..dim).rev() {
                let i = rem % shape[axis];
                rem /= shape[axis];
                point[axis] = lo[axis] + spacing * i as f64;
            }
            samples.push(f(&point));
        }
        Self::new(lo, spacing, shape, samples)
    }

    pub fn hi(&self, axis: usize) -> f64 {
        self.lo[axis] + self.spacing * (self.shape[axis] - 1) as f64
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    /// Whether `x` is at least `margin` inside the sampled box.
    pub fn contains_with_margin(&self, x: &[f64], margin: f64) -> bool {
        x.iter()
            .enumerate()
            .all(|(a, &v)| v >= self.lo[a] + margin && v <= self.hi(a) - margin)
    }
}

impl ScalarField for SampledField {
    fn dim(&self) -> usize {
        self.shape.len()
    }

    fn eval(&self, x: &[f64]) -> f64 {
        let dim = self.dim();
        if !self.contains_with_margin(x, 0.0) {
            return 0.0;
        }
        let mut base = [0i64; 8];
        let mut frac = [0.0f64; 8];
        for a in 0..dim {
            let u = (x[a] - self.lo[a]) / self.spacing;
            let fl = u.floor();
            base[a] = fl as i64;
            frac[a] = u - fl;
        }
        let mut acc = 0.0;
        let combos = 4usize.pow(dim as u32);
        'outer: for c in 0..combos {
            let mut rem = c;
            let mut w = 1.0;
            let mut flat = 0usize;
            for a in 0..dim {
                let off = (rem % 4) as i64 - 1;
                rem /= 4;
                let idx = base[a] + off;
                if idx < 0 || idx >= self.shape[a] as i64 {
                    continue 'outer;
                }
                w *= cubic_bspline(frac[a] - off as f64);
                flat = flat * self.shape[a] + idx as usize;
            }
            acc += w * self.coeffs[flat];
        }
        acc
    }

    fn blobs(&self) -> Vec<Blob> {
        let dim = self.dim();
        let center: Vec<f64> = (0..dim).map(|a| 0.5 * (self.lo[a] + self.hi(a))).collect();
        let radius = (0..dim)
            .map(|a| {
                let h = 0.5 * (self.hi(a) - self.lo[a]);
                h * h
            })
            .sum::<f64>()
            .sqrt();
        vec![Blob { center, extent: Extent::Compact { radius }, scale: 4.0 * self.spacing }]
    }

    fn spheres(&self) -> Vec<super::Sphere> {
        Vec::new()
    }

    fn breakpoints(&self, x: &[f64], dir: &[f64]) -> Vec<f64> {
        let mut out = Vec::new();
        for a in 0..self.dim() {
            if dir[a] != 0.0 {
                out.push((self.lo[a] - x[a]) / dir[a]);
                out.push((self.hi(a) - x[a]) / dir[a]);
            }
        }
        out
    }

    fn describe(&self) -> String {
        format!("sampled{:?}", self.shape)
    }

    fn check_point(&self, x: &[f64], m: u32) -> Result<()> {
        let margin = 2.0 * m as f64 * self.spacing;
        if self.contains_with_margin(x, margin) {
            Ok(())
        } else {
            Err(Error::SupportViolation(format!(
                "{x:?} is closer than {margin} to the edge of the sampled box"
            )))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolates_samples_exactly() {
        let f = |p: &[f64]| (-(p[0] * p[0]) / 2.0).exp();
        let s = SampledField::from_fn(vec![-6.0], 0.25, vec![49], f).unwrap();
        for i in 0..49 {
            let x = -6.0 + 0.25 * i as f64;
            assert!((s.eval(&[x]) - f(&[x])).abs() < 1e-12, "x = {x}");
        }
        assert_eq!(s.eval(&[7.0]), 0.0);
    }

    #[test]
    fn interpolation_is_accurate_between_nodes_in_2d() {
        let f = |p: &[f64]| (-(p[0] * p[0] + p[1] * p[1]) / 2.0).exp();
        let s = SampledField::from_fn(vec![-6.0, -6.0], 0.125, vec![97, 97], f).unwrap();
        for p in [[0.03, -0.41], [1.17, 0.66], [-2.2, 0.01]] {
            assert!((s.eval(&p) - f(&p)).abs() < 2e-5, "{p:?}");
        }
    }

    #[test]
    fn rejects_bad_geometry() {
        assert!(SampledField::new(vec![0.0], 0.1, vec![3], vec![0.0; 3]).is_err());
        assert!(SampledField::new(vec![0.0], 0.1, vec![5], vec![0.0; 4]).is_err());
        assert!(SampledField::new(vec![0.0], -0.1, vec![5], vec![0.0; 5]).is_err());
    }
}
