//! Closed-form test fields and the `name[:param...][@c1,c2,...]` spec grammar.

use std::sync::Arc;

use super::{Blob, Extent, Field, ScalarField, Sphere};
use crate::error::{Error, Result};
use crate::jet::{norm_sq, Jet, Real};

#[derive(Debug, Clone, PartialEq)]
pub enum CatalogKind {
    /// `exp(-|x|^2 / (2 w^2))`
    Gaussian { width: f64 },
    /// `exp(1 - 1 / (1 - |x|^2 / R^2))` inside the ball, 0 outside; value 1 at the centre.
    Bump { radius: f64 },
    /// `x_1^p` times a bump of radius `R`.
    PolyBump { power: u32, radius: f64 },
    /// Radial bump supported on `inner <= |x| <= outer`, peak 1 at the mid radius.
    Annulus { inner: f64, outer: f64 },
    /// Gaussian of width `w` times a bump of radius `R`.
    GaussBump { width: f64, radius: f64 },
    Constant { value: f64 },
}

fn bump_profile<T: Real>(q: T) -> T {
    // q = 1 - (distance / radius)^2 in (0, 1]
    (q.lift(1.0) - q.recip()).exp()
}

impl CatalogKind {
    fn eval_generic<T: Real>(&self, p: &[T]) -> T {
        let zero = p[0].lift(0.0);
        match *self {
            CatalogKind::Gaussian { width } => (norm_sq(p) * (-0.5 / (width * width))).exp(),
            CatalogKind::Bump { radius } => {
                let q = (norm_sq(p) * (-1.0 / (radius * radius))) + 1.0;
                if q.value() <= 0.0 {
                    zero
                } else {
                    bump_profile(q)
                }
            }
            CatalogKind::PolyBump { power, radius } => {
                let q = (norm_sq(p) * (-1.0 / (radius * radius))) + 1.0;
                if q.value() <= 0.0 {
                    zero
                } else {
                    p[0].powi(power) * bump_profile(q)
                }
            }
            CatalogKind::Annulus { inner, outer } => {
                let r2 = norm_sq(p);
                let v = r2.value();
                if v <= inner * inner || v >= outer * outer {
                    return zero;
                }
                let mid = 0.5 * (inner + outer);
                let half = 0.5 * (outer - inner);
                let t = (r2.sqrt() - mid) * (1.0 / half);
                let q = (t * t * -1.0) + 1.0;
                if q.value() <= 0.0 {
                    zero
                } else {
                    bump_profile(q)
                }
            }
            CatalogKind::GaussBump { width, radius } => {
                let r2 = norm_sq(p);
                let q = (r2 * (-1.0 / (radius * radius))) + 1.0;
                if q.value() <= 0.0 {
                    zero
                } else {
                    (r2 * (-0.5 / (width * width))).exp() * bump_profile(q)
                }
            }
            CatalogKind::Constant { value } => p[0].lift(value),
        }
    }

    fn name(&self) -> String {
        match *self {
            CatalogKind::Gaussian { width } => format!("gaussian:{width}"),
            CatalogKind::Bump { radius } => format!("bump:{radius}"),
            CatalogKind::PolyBump { power, radius } => format!("polybump:{power}:{radius}"),
            CatalogKind::Annulus { inner, outer } => format!("annulus:{inner}:{outer}"),
            CatalogKind::GaussBump { width, radius } => format!("gaussbump:{width}:{radius}"),
            CatalogKind::Constant { value } => format!("constant:{value}"),
        }
    }
}

/// A catalog field centred at `center`.
#[derive(Debug, Clone, PartialEq)]
pub struct CatalogField {
    dim: usize,
    kind: CatalogKind,
    center: Vec<f64>,
}

impl CatalogField {
    pub fn new(dim: usize, kind: CatalogKind) -> Self {
        assert!((1..=16).contains(&dim), "catalog fields support 1..=16 dimensions");
        Self { dim, kind, center: vec![0.0; dim] }
    }

    pub fn with_center(mut self, center: Vec<f64>) -> Self {
        assert_eq!(center.len(), self.dim, "centre dimension mismatch");
        self.center = center;
        self
    }

    pub fn kind(&self) -> &CatalogKind {
        &self.kind
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }
}

impl ScalarField for CatalogField {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, x: &[f64]) -> f64 {
        let mut local = [0.0f64; 16];
        let local = &mut local[..self.dim];
        for (l, (a, c)) in local.iter_mut().zip(x.iter().zip(&self.center)) {
            *l = a - c;
        }
        self.kind.eval_generic(local)
    }

    fn line_jet(&self, x: &[f64], dir: &[f64], order: usize) -> Option<Jet> {
        let p: Vec<Jet> = x
            .iter()
            .zip(&self.center)
            .zip(dir)
            .map(|((a, c), d)| Jet::line(a - c, *d, order))
            .collect();
        Some(self.kind.eval_generic(&p))
    }

    fn blobs(&self) -> Vec<Blob> {
        let center = self.center.clone();
        match self.kind {
            CatalogKind::Gaussian { width } => vec![Blob {
                center,
                extent: Extent::Gaussian { width, amplitude: 1.0 },
                scale: width,
            }],
            CatalogKind::Bump { radius } => {
                vec![Blob { center, extent: Extent::Compact { radius }, scale: 0.5 * radius }]
            }
            CatalogKind::PolyBump { radius, .. } => {
                vec![Blob { center, extent: Extent::Compact { radius }, scale: 0.5 * radius }]
            }
            CatalogKind::Annulus { inner, outer } => vec![Blob {
                center,
                extent: Extent::Compact { radius: outer },
                scale: 0.5 * (outer - inner),
            }],
            CatalogKind::GaussBump { width, radius } => vec![Blob {
                center,
                extent: Extent::Compact { radius },
                scale: width.min(0.5 * radius),
            }],
            CatalogKind::Constant { .. } => Vec::new(),
        }
    }

    fn value_at_infinity(&self) -> f64 {
        match self.kind {
            CatalogKind::Constant { value } => value,
            _ => 0.0,
        }
    }

    fn spheres(&self) -> Vec<Sphere> {
        let center = self.center.clone();
        match self.kind {
            CatalogKind::Bump { radius }
            | CatalogKind::PolyBump { radius, .. }
            | CatalogKind::GaussBump { radius, .. } => vec![Sphere { center, radius }],
            CatalogKind::Annulus { inner, outer } => vec![
                Sphere { center: center.clone(), radius: inner },
                Sphere { center, radius: outer },
            ],
            _ => Vec::new(),
        }
    }

    fn describe(&self) -> String {
        if self.center.iter().all(|&c| c == 0.0) {
            self.kind.name()
        } else {
            let c: Vec<String> = self.center.iter().map(|v| v.to_string()).collect();
            format!("{}@{}", self.kind.name(), c.join(","))
        }
    }
}

fn parse_params(name: &str, raw: &[&str], max: usize) -> Result<Vec<f64>> {
    if raw.len() > max {
        return Err(Error::FieldSpec(format!("{name} takes at most {max} parameters")));
    }
    raw.iter()
        .map(|r| {
            r.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| Error::FieldSpec(format!("bad number '{r}' in {name}")))
        })
        .collect()
}

fn positive(name: &str, v: f64) -> Result<f64> {
    if v > 0.0 {
        Ok(v)
    } else {
        Err(Error::FieldSpec(format!("{name} needs positive parameters, got {v}")))
    }
}

/// Parse a field spec such as `gaussian`, `bump:1.5`, `annulus:2:3` or
/// `bump:1@0.5,0` (centre after `@`).
pub fn parse_field(spec: &str, dim: usize) -> Result<Field> {
    if dim == 0 || dim > 16 {
        return Err(Error::FieldSpec(format!("unsupported dimension {dim}")));
    }
    let (body, center) = match spec.split_once('@') {
        Some((b, c)) => {
            let coords = c
                .split(',')
                .map(|v| v.trim().parse::<f64>())
                .collect::<std::result::Result<Vec<f64>, _>>()
                .map_err(|_| Error::FieldSpec(format!("bad centre '{c}'")))?;
            if coords.len() != dim {
                return Err(Error::FieldSpec(format!(
                    "centre has {} coordinates, expected {dim}",
                    coords.len()
                )));
            }
            (b, coords)
        }
        None => (spec, vec![0.0; dim]),
    };
    let mut parts = body.trim().split(':');
    let name = parts.next().unwrap_or("").trim().to_ascii_lowercase();
    let raw: Vec<&str> = parts.collect();
    let kind = match name.as_str() {
        "gaussian" => {
            let p = parse_params("gaussian", &raw, 1)?;
            CatalogKind::Gaussian { width: positive("gaussian", p.first().copied().unwrap_or(1.0))? }
        }
        "bump" => {
            let p = parse_params("bump", &raw, 1)?;
            CatalogKind::Bump { radius: positive("bump", p.first().copied().unwrap_or(1.0))? }
        }
        "polybump" => {
            let p = parse_params("polybump", &raw, 2)?;
            let power = p.first().copied().unwrap_or(2.0);
            if power < 0.0 || power.fract() != 0.0 || power > 16.0 {
                return Err(Error::FieldSpec(format!("polybump power must be an integer in 0..=16, got {power}")));
            }
            CatalogKind::PolyBump {
                power: power as u32,
                radius: positive("polybump", p.get(1).copied().unwrap_or(2.0))?,
            }
        }
        "annulus" => {
            let p = parse_params("annulus", &raw, 2)?;
            let inner = positive("annulus", p.first().copied().unwrap_or(2.0))?;
            let outer = positive("annulus", p.get(1).copied().unwrap_or(inner + 1.0))?;
            if outer <= inner {
                return Err(Error::FieldSpec(format!("annulus needs inner < outer, got {inner}:{outer}")));
            }
            CatalogKind::Annulus { inner, outer }
        }
        "gaussbump" => {
            let p = parse_params("gaussbump", &raw, 2)?;
            CatalogKind::GaussBump {
                width: positive("gaussbump", p.first().copied().unwrap_or(1.0))?,
                radius: positive("gaussbump", p.get(1).copied().unwrap_or(2.0))?,
            }
        }
        "constant" => {
            let p = parse_params("constant", &raw, 1)?;
            CatalogKind::Constant { value: p.first().copied().unwrap_or(1.0) }
        }
        "" => return Err(Error::FieldSpec("empty field spec".into())),
        other => return Err(Error::FieldSpec(format!("unknown field '{other}'"))),
    };
    Ok(Arc::new(CatalogField::new(dim, kind).with_center(center)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_catalog_specs() {
        let g = parse_field("gaussian", 1).unwrap();
        assert_eq!(g.eval(&[0.0]), 1.0);
        assert!((g.eval(&[1.0]) - (-0.5f64).exp()).abs() < 1e-16);
        let b = parse_field("bump:2", 2).unwrap();
        assert_eq!(b.eval(&[0.0, 0.0]), 1.0);
        assert_eq!(b.eval(&[2.0, 0.0]), 0.0);
        let a = parse_field("annulus:2:3", 1).unwrap();
        assert_eq!(a.eval(&[2.5]), 1.0);
        assert_eq!(a.eval(&[-2.5]), 1.0);
        assert_eq!(a.eval(&[1.0]), 0.0);
        let c = parse_field("bump:1@3", 1).unwrap();
        assert_eq!(c.eval(&[3.0]), 1.0);
        assert_eq!(c.describe(), "bump:1@3");
        let k = parse_field("constant:2.5", 3).unwrap();
        assert_eq!(k.eval(&[1.0, 2.0, 3.0]), 2.5);
        assert_eq!(k.value_at_infinity(), 2.5);
    }

    #[test]
    fn rejects_bad_specs() {
        for spec in ["", "nope", "bump:-1", "bump:x", "annulus:3:2", "gaussian:1:2", "bump@1,2", "polybump:1.5"] {
            assert!(parse_field(spec, 1).is_err(), "{spec}");
        }
    }

    #[test]
    fn jets_match_finite_differences() {
        for spec in ["gaussian:0.8", "bump:1.5", "polybump:3:2", "annulus:1:2", "gaussbump:0.7:2"] {
            let f = parse_field(spec, 2).unwrap();
            let x = [0.9, 0.6];
            let dir = [0.6, -0.8];
            let jet = f.line_jet(&x, &dir, 4).unwrap();
            assert!((jet.derivative(0) - f.eval(&x)).abs() < 1e-15);
            let h = 1e-4;
            let at = |t: f64| f.eval(&[x[0] + t * dir[0], x[1] + t * dir[1]]);
            let d1 = (at(h) - at(-h)) / (2.0 * h);
            let d2 = (at(h) - 2.0 * at(0.0) + at(-h)) / (h * h);
            assert!((jet.derivative(1) - d1).abs() < 1e-7, "{spec}");
            assert!((jet.derivative(2) - d2).abs() < 1e-5, "{spec}");
        }
    }

    #[test]
    fn polybump_fourth_derivative_at_centre() {
        // (x^4 b(x))'''' at 0 = 24 b(0) = 24
        let f = parse_field("polybump:4:3", 1).unwrap();
        let jet = f.line_jet(&[0.0], &[1.0], 4).unwrap();
        assert!((jet.derivative(4) - 24.0).abs() < 1e-12);
    }
}
