use serde::Serialize;

use crate::error::{Error, Result};

/// Knobs of the radial-angular quadrature.
///
/// Distances default to multiples of the field's length scale; every
/// `Option` left at `None` is chosen per evaluation point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuadratureConfig {
    /// Target absolute error of one operator value.
    pub tol: f64,
    /// Radius of the innermost region handled by a series / interpolant.
    pub inner_radius: Option<f64>,
    /// Default inner radius as a fraction of `length_scale / m`.
    pub inner_scale: f64,
    /// Interpolation nodes for the inner region of fields without jets.
    pub inner_nodes: usize,
    /// Ratio of consecutive radial panel edges near the origin, in `(1, 2]`.
    pub grading: f64,
    /// Truncation radius; beyond it the integrand is replaced by its limit.
    pub r_cut: Option<f64>,
    /// Gauss-Legendre points per radial panel.
    pub nodes_per_panel: usize,
    /// Upper bound on a radial panel width.
    pub max_panel_width: Option<f64>,
    /// Depth of adaptive panel bisection; 0 keeps the node set fixed.
    pub max_bisections: usize,
    /// Points on the full circle (`N = 2`).
    pub circle_points: usize,
    /// Gauss-Legendre points in `cos(theta)` (`N = 3`).
    pub polar_points: usize,
    /// Trapezoid points in `phi` (`N = 3`).
    pub azimuth_points: usize,
    /// How often the angular counts may be doubled to meet `tol`.
    pub angular_refinements: usize,
    /// Largest excision radius of the principal-value form.
    pub pv_epsilon: Option<f64>,
    /// Number of excision radii used in the extrapolation `eps -> 0`.
    pub pv_levels: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            inner_radius: None,
            inner_scale: 1.0,
            inner_nodes: 10,
            grading: 1.7,
            r_cut: None,
            nodes_per_panel: 12,
            max_panel_width: None,
            max_bisections: 8,
            circle_points: 64,
            polar_points: 16,
            azimuth_points: 32,
            angular_refinements: 2,
            pv_epsilon: None,
            pv_levels: 4,
        }
    }
}

impl QuadratureConfig {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    /// Freeze every adaptive choice so that two fields with the same
    /// geometry are integrated on identical nodes.
    pub fn fixed_nodes(mut self) -> Self {
        self.max_bisections = 0;
        self.angular_refinements = 0;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.tol > 0.0) {
            return bad(format!("tol must be positive, got {}", self.tol));
        }
        if !(self.grading > 1.0 && self.grading <= 2.0) {
            return bad(format!("grading must lie in (1, 2], got {}", self.grading));
        }
        if self.nodes_per_panel < 4 {
            return bad(format!("nodes_per_panel must be >= 4, got {}", self.nodes_per_panel));
        }
        if self.inner_nodes < 4 {
            return bad(format!("inner_nodes must be >= 4, got {}", self.inner_nodes));
        }
        if !(self.inner_scale > 0.0) {
            return bad(format!("inner_scale must be positive, got {}", self.inner_scale));
        }
        for (name, n) in [
            ("circle_points", self.circle_points),
            ("polar_points", self.polar_points),
            ("azimuth_points", self.azimuth_points),
        ] {
            if n < 2 || n % 2 != 0 {
                return bad(format!("{name} must be even and >= 2, got {n}"));
            }
        }
        if let Some(r) = self.inner_radius {
            if !(r > 0.0) {
                return bad(format!("inner_radius must be positive, got {r}"));
            }
            if let Some(c) = self.r_cut {
                if !(r < c) {
                    return bad(format!("need inner_radius < r_cut, got {r} >= {c}"));
                }
            }
        }
        if let Some(c) = self.r_cut {
            if !(c > 0.0) {
                return bad(format!("r_cut must be positive, got {c}"));
            }
        }
        if let Some(w) = self.max_panel_width {
            if !(w > 0.0) {
                return bad(format!("max_panel_width must be positive, got {w}"));
            }
        }
        if let Some(e) = self.pv_epsilon {
            if !(e > 0.0) {
                return bad(format!("pv_epsilon must be positive, got {e}"));
            }
        }
        if self.pv_levels < 1 || self.pv_levels > 8 {
            return bad(format!("pv_levels must be in 1..=8, got {}", self.pv_levels));
        }
        Ok(())
    }
}

/// Result of one pointwise evaluation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub value: f64,
    /// Bound on what was cut off: the inner-series truncation plus the
    /// far-field envelope beyond `r_cut`.
    pub tail_estimate: f64,
    /// Quadrature error estimate from panel bisection and angular refinement.
    pub error_estimate: f64,
    pub panel_count: usize,
    pub evaluations: usize,
    pub warnings: Vec<String>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid() {
        QuadratureConfig::default().validate().unwrap();
    }

    #[test]
    fn rejects_bad_values() {
        let base = QuadratureConfig::default();
        let cases = [
            QuadratureConfig { tol: 0.0, ..base.clone() },
            QuadratureConfig { grading: 2.5, ..base.clone() },
            QuadratureConfig { nodes_per_panel: 3, ..base.clone() },
            QuadratureConfig { circle_points: 63, ..base.clone() },
            QuadratureConfig { azimuth_points: 0, ..base.clone() },
            QuadratureConfig { inner_radius: Some(2.0), r_cut: Some(1.0), ..base.clone() },
            QuadratureConfig { pv_levels: 0, ..base.clone() },
        ];
        for c in cases {
            assert!(c.validate().is_err(), "{c:?}");
        }
    }
}
