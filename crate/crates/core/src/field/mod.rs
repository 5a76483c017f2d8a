//! Scalar fields on `R^N`.
//!
//! A field is anything that can be evaluated pointwise and can describe
//! where it lives: a list of [`Blob`]s (compact balls or Gaussian envelopes)
//! that bound `f - f_inf`, and the spheres across which it loses smoothness.
//! The quadrature engine uses both to place panel breaks and to truncate the
//! radial integral.

mod catalog;
mod sampled;

use std::sync::Arc;

pub use catalog::{parse_field, CatalogField, CatalogKind};
pub use sampled::SampledField;

use crate::jet::Jet;

/// Shared, immutable field handle.
pub type Field = Arc<dyn ScalarField>;

/// How a piece of a field decays away from its centre.
#[derive(Debug, Clone, PartialEq)]
pub enum Extent {
    /// `f - f_inf` vanishes outside the ball.
    Compact { radius: f64 },
    /// `|f - f_inf| <= amplitude * exp(-|x - c|^2 / (2 width^2))`.
    Gaussian { width: f64, amplitude: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Blob {
    pub center: Vec<f64>,
    pub extent: Extent,
    /// Length on which the field varies; sets the finest panel width.
    pub scale: f64,
}

impl Blob {
    fn shifted(&self, h: &[f64]) -> Blob {
        Blob {
            center: self.center.iter().zip(h).map(|(c, d)| c + d).collect(),
            ..self.clone()
        }
    }

    /// Distance from `x` beyond which this blob is below `tol` (or exactly 0).
    pub fn reach(&self, x: &[f64], tol: f64) -> f64 {
        let d = dist(x, &self.center);
        match self.extent {
            Extent::Compact { radius } => d + radius,
            Extent::Gaussian { width, amplitude } => {
                let ratio = (amplitude / tol.max(1e-300)).max(1.0);
                d + width * (2.0 * ratio.ln()).sqrt().max(6.0)
            }
        }
    }

    /// Bound on `|f - f_inf|` at distance `r` from the centre.
    pub fn envelope(&self, r: f64) -> f64 {
        match self.extent {
            Extent::Compact { radius } => {
                if r >= radius {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            Extent::Gaussian { width, amplitude } => amplitude * (-r * r / (2.0 * width * width)).exp(),
        }
    }
}

/// A sphere `|x - center| = radius` (two points when `N = 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct Sphere {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Sphere {
    /// Parameters `t` at which `x + t dir` meets the sphere.
    pub fn crossings(&self, x: &[f64], dir: &[f64]) -> Vec<f64> {
        let a: f64 = dir.iter().map(|d| d * d).sum();
        if a == 0.0 {
            return Vec::new();
        }
        let diff: Vec<f64> = x.iter().zip(&self.center).map(|(p, c)| p - c).collect();
        let b: f64 = diff.iter().zip(dir).map(|(p, d)| p * d).sum();
        let c: f64 = diff.iter().map(|p| p * p).sum::<f64>() - self.radius * self.radius;
        let disc = b * b - a * c;
        if disc < 0.0 {
            return Vec::new();
        }
        let root = disc.sqrt();
        if root == 0.0 {
            return vec![-b / a];
        }
        vec![(-b - root) / a, (-b + root) / a]
    }
}

pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// A real function on `R^N`.
///
/// Implementations must be immutable after construction; the operator
/// evaluates them concurrently from worker threads.
pub trait ScalarField: Send + Sync {
    fn dim(&self) -> usize;

    fn eval(&self, x: &[f64]) -> f64;

    /// Taylor jet of `t -> f(x + t dir)` at `t = 0`, when the field has exact
    /// derivatives. `dir` need not be a unit vector.
    fn line_jet(&self, _x: &[f64], _dir: &[f64], _order: usize) -> Option<Jet> {
        None
    }

    /// Pieces bounding `f - f_inf`; empty for constants.
    fn blobs(&self) -> Vec<Blob>;

    /// Limit of `f` at infinity (catalog fields: 0 except constants).
    fn value_at_infinity(&self) -> f64 {
        0.0
    }

    /// Spheres across which `f` is only finitely smooth or switches formula.
    fn spheres(&self) -> Vec<Sphere> {
        self.blobs()
            .into_iter()
            .filter_map(|b| match b.extent {
                Extent::Compact { radius } => Some(Sphere { center: b.center, radius }),
                Extent::Gaussian { .. } => None,
            })
            .collect()
    }

    /// Parameters `t` where the line `x + t dir` meets a non-smooth locus.
    fn breakpoints(&self, x: &[f64], dir: &[f64]) -> Vec<f64> {
        self.spheres().iter().flat_map(|s| s.crossings(x, dir)).collect()
    }

    /// Smallest variation length over all pieces (1 when there are none).
    fn length_scale(&self) -> f64 {
        let s = self.blobs().iter().map(|b| b.scale).fold(f64::INFINITY, f64::min);
        if s.is_finite() && s > 0.0 {
            s
        } else {
            1.0
        }
    }

    fn describe(&self) -> String;

    /// Reject evaluation points where a difference of order `2m` cannot be
    /// trusted (sampled fields need a margin inside their box).
    fn check_point(&self, _x: &[f64], _m: u32) -> crate::error::Result<()> {
        Ok(())
    }
}

/// `sum_i a_i f_i`.
pub struct Combination {
    terms: Vec<(f64, Field)>,
}

impl Combination {
    pub fn new(terms: Vec<(f64, Field)>) -> Self {
        assert!(!terms.is_empty(), "empty combination");
        let dim = terms[0].1.dim();
        assert!(terms.iter().all(|(_, f)| f.dim() == dim), "dimension mismatch in combination");
        Self { terms }
    }
}

impl ScalarField for Combination {
    fn dim(&self) -> usize {
        self.terms[0].1.dim()
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|(a, f)| a * f.eval(x)).sum()
    }

    fn line_jet(&self, x: &[f64], dir: &[f64], order: usize) -> Option<Jet> {
        let mut acc = Jet::constant(0.0, order);
        for (a, f) in &self.terms {
            acc = acc + f.line_jet(x, dir, order)? * *a;
        }
        Some(acc)
    }

    fn blobs(&self) -> Vec<Blob> {
        self.terms
            .iter()
            .filter(|(a, _)| *a != 0.0)
            .flat_map(|(a, f)| {
                f.blobs().into_iter().map(move |mut b| {
                    if let Extent::Gaussian { amplitude, .. } = &mut b.extent {
                        *amplitude *= a.abs();
                    }
                    b
                })
            })
            .collect()
    }

    fn value_at_infinity(&self) -> f64 {
        self.terms.iter().map(|(a, f)| a * f.value_at_infinity()).sum()
    }

    fn spheres(&self) -> Vec<Sphere> {
        self.terms.iter().flat_map(|(_, f)| f.spheres()).collect()
    }

    fn breakpoints(&self, x: &[f64], dir: &[f64]) -> Vec<f64> {
        self.terms.iter().flat_map(|(_, f)| f.breakpoints(x, dir)).collect()
    }

    fn describe(&self) -> String {
        let parts: Vec<String> =
            self.terms.iter().map(|(a, f)| format!("{a}*{}", f.describe())).collect();
        parts.join(" + ")
    }

    fn check_point(&self, x: &[f64], m: u32) -> crate::error::Result<()> {
        self.terms.iter().try_for_each(|(_, f)| f.check_point(x, m))
    }
}

/// `x -> f(x - shift)`.
pub struct Shifted {
    inner: Field,
    shift: Vec<f64>,
}

impl Shifted {
    pub fn new(inner: Field, shift: Vec<f64>) -> Self {
        assert_eq!(inner.dim(), shift.len(), "shift dimension mismatch");
        Self { inner, shift }
    }

    fn back(&self, x: &[f64]) -> Vec<f64> {
        x.iter().zip(&self.shift).map(|(a, h)| a - h).collect()
    }
}

impl ScalarField for Shifted {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn eval(&self, x: &[f64]) -> f64 {
        self.inner.eval(&self.back(x))
    }
    fn line_jet(&self, x: &[f64], dir: &[f64], order: usize) -> Option<Jet> {
        self.inner.line_jet(&self.back(x), dir, order)
    }
    fn blobs(&self) -> Vec<Blob> {
        self.inner.blobs().iter().map(|b| b.shifted(&self.shift)).collect()
    }
    fn value_at_infinity(&self) -> f64 {
        self.inner.value_at_infinity()
    }
    fn spheres(&self) -> Vec<Sphere> {
        self.inner
            .spheres()
            .into_iter()
            .map(|s| Sphere {
                center: s.center.iter().zip(&self.shift).map(|(c, h)| c + h).collect(),
                radius: s.radius,
            })
            .collect()
    }
    fn breakpoints(&self, x: &[f64], dir: &[f64]) -> Vec<f64> {
        self.inner.breakpoints(&self.back(x), dir)
    }
    fn describe(&self) -> String {
        format!("shift({}, {:?})", self.inner.describe(), self.shift)
    }
    fn check_point(&self, x: &[f64], m: u32) -> crate::error::Result<()> {
        self.inner.check_point(&self.back(x), m)
    }
}

/// `x -> f(lambda x)`.
pub struct Dilated {
    inner: Field,
    lambda: f64,
}

impl Dilated {
    pub fn new(inner: Field, lambda: f64) -> Self {
        assert!(lambda > 0.0, "dilation factor must be positive");
        Self { inner, lambda }
    }

    fn scaled(&self, x: &[f64]) -> Vec<f64> {
        x.iter().map(|v| v * self.lambda).collect()
    }
}

impl ScalarField for Dilated {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn eval(&self, x: &[f64]) -> f64 {
        self.inner.eval(&self.scaled(x))
    }
    fn line_jet(&self, x: &[f64], dir: &[f64], order: usize) -> Option<Jet> {
        self.inner.line_jet(&self.scaled(x), &self.scaled(dir), order)
    }
    fn blobs(&self) -> Vec<Blob> {
        let l = self.lambda;
        self.inner
            .blobs()
            .into_iter()
            .map(|b| Blob {
                center: b.center.iter().map(|c| c / l).collect(),
                extent: match b.extent {
                    Extent::Compact { radius } => Extent::Compact { radius: radius / l },
                    Extent::Gaussian { width, amplitude } => {
                        Extent::Gaussian { width: width / l, amplitude }
                    }
                },
                scale: b.scale / l,
            })
            .collect()
    }
    fn value_at_infinity(&self) -> f64 {
        self.inner.value_at_infinity()
    }
    fn spheres(&self) -> Vec<Sphere> {
        self.inner
            .spheres()
            .into_iter()
            .map(|s| Sphere {
                center: s.center.iter().map(|c| c / self.lambda).collect(),
                radius: s.radius / self.lambda,
            })
            .collect()
    }
    fn breakpoints(&self, x: &[f64], dir: &[f64]) -> Vec<f64> {
        self.inner.breakpoints(&self.scaled(x), &self.scaled(dir))
    }
    fn describe(&self) -> String {
        format!("dilate({}, {})", self.inner.describe(), self.lambda)
    }
}

/// Wraps a closure as a field with user-supplied geometry.
pub struct FnField<F> {
    dim: usize,
    f: F,
    blobs: Vec<Blob>,
    spheres: Vec<Sphere>,
    name: String,
}

impl<F: Fn(&[f64]) -> f64 + Send + Sync> FnField<F> {
    pub fn new(dim: usize, f: F, blobs: Vec<Blob>, spheres: Vec<Sphere>, name: impl Into<String>) -> Self {
        Self { dim, f, blobs, spheres, name: name.into() }
    }
}

impl<F: Fn(&[f64]) -> f64 + Send + Sync> ScalarField for FnField<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn eval(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
    fn blobs(&self) -> Vec<Blob> {
        self.blobs.clone()
    }
    fn spheres(&self) -> Vec<Sphere> {
        self.spheres.clone()
    }
    fn describe(&self) -> String {
        self.name.clone()
    }
}

/// Convenience constructors.
pub fn gaussian(dim: usize) -> Field {
    Arc::new(CatalogField::new(dim, CatalogKind::Gaussian { width: 1.0 }))
}

pub fn bump(dim: usize, radius: f64) -> Field {
    Arc::new(CatalogField::new(dim, CatalogKind::Bump { radius }))
}

pub fn annulus(dim: usize, inner: f64, outer: f64) -> Field {
    Arc::new(CatalogField::new(dim, CatalogKind::Annulus { inner, outer }))
}

pub fn shifted(f: Field, shift: Vec<f64>) -> Field {
    Arc::new(Shifted::new(f, shift))
}

pub fn dilated(f: Field, lambda: f64) -> Field {
    Arc::new(Dilated::new(f, lambda))
}

pub fn combination(terms: Vec<(f64, Field)>) -> Field {
    Arc::new(Combination::new(terms))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_crossings() {
        let s = Sphere { center: vec![0.0, 0.0], radius: 1.0 };
        let mut t = s.crossings(&[0.0, 0.0], &[1.0, 0.0]);
        t.sort_by(f64::total_cmp);
        assert_eq!(t, vec![-1.0, 1.0]);
        assert!(s.crossings(&[0.0, 2.0], &[1.0, 0.0]).is_empty());
        let t = Sphere { center: vec![0.0], radius: 2.0 }.crossings(&[0.5], &[2.0]);
        assert_eq!(t, vec![-1.25, 0.75]);
    }

    #[test]
    fn wrappers_agree_with_direct_evaluation() {
        let g = gaussian(2);
        let b = bump(2, 1.5);
        let combo = combination(vec![(2.0, g.clone()), (-0.5, b.clone())]);
        let x = [0.3, -0.2];
        assert!((combo.eval(&x) - (2.0 * g.eval(&x) - 0.5 * b.eval(&x))).abs() < 1e-15);
        let sh = shifted(b.clone(), vec![1.0, 0.5]);
        assert_eq!(sh.eval(&[1.3, 0.3]), b.eval(&[0.3, -0.2]));
        let d = dilated(g.clone(), 2.0);
        assert_eq!(d.eval(&x), g.eval(&[0.6, -0.4]));
        let jet = d.line_jet(&x, &[1.0, 0.0], 2).unwrap();
        let h = 1e-5;
        let fd = (d.eval(&[x[0] + h, x[1]]) - d.eval(&[x[0] - h, x[1]])) / (2.0 * h);
        assert!((jet.derivative(1) - fd).abs() < 1e-8);
    }

    #[test]
    fn shifted_geometry_moves() {
        let b = shifted(bump(1, 1.0), vec![3.0]);
        let mut t = b.breakpoints(&[0.0], &[1.0]);
        t.sort_by(f64::total_cmp);
        assert_eq!(t, vec![2.0, 4.0]);
        assert_eq!(b.blobs()[0].center, vec![3.0]);
    }
}
