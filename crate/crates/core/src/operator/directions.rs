//! Quadrature rules on the unit sphere `S^{N-1}`.
//!
//! The symmetric operator integrand is even in `y`, so its rules cover half
//! the sphere with doubled weights. The principal-value form integrates a
//! one-sided difference and needs the full, exactly antipodal rule.
//! Rules are provided for `N <= 3`; callers validate the dimension.

use std::f64::consts::PI;

use crate::quad::GaussLegendre;

#[derive(Debug, Clone)]
pub struct DirectionRule {
    pub dirs: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl DirectionRule {
    pub fn len(&self) -> usize {
        self.dirs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dirs.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Surface area of `S^{N-1}`.
pub fn sphere_area(dim: usize) -> f64 {
    let n = dim as f64;
    2.0 * PI.powf(n / 2.0) / crate::specialfn::gamma(n / 2.0).unwrap_or(f64::NAN)
}

fn circle_dir(angle: f64) -> Vec<f64> {
    vec![angle.cos(), angle.sin()]
}

/// Half-sphere rule with weights summing to the full area.
///
/// `N = 2`: `circle_points` equally spaced angles of which the first half
/// is kept. `N = 3`: positive Gauss-Legendre nodes in `cos(theta)` times an
/// azimuthal trapezoid rule.
pub fn half_rule(dim: usize, circle_points: usize, polar: usize, azimuth: usize) -> DirectionRule {
    match dim {
        1 => DirectionRule { dirs: vec![vec![1.0]], weights: vec![2.0] },
        2 => {
            let half = circle_points / 2;
            let w = 2.0 * 2.0 * PI / circle_points as f64;
            DirectionRule {
                dirs: (0..half).map(|j| circle_dir(2.0 * PI * j as f64 / circle_points as f64)).collect(),
                weights: vec![w; half],
            }
        }
        3 => {
            let gl = GaussLegendre::new(polar);
            let mut dirs = Vec::new();
            let mut weights = Vec::new();
            for (z, wz) in gl.nodes.iter().zip(&gl.weights) {
                if *z <= 0.0 {
                    continue;
                }
                let rho = (1.0 - z * z).sqrt();
                for l in 0..azimuth {
                    let phi = 2.0 * PI * l as f64 / azimuth as f64;
                    dirs.push(vec![rho * phi.cos(), rho * phi.sin(), *z]);
                    weights.push(2.0 * wz * 2.0 * PI / azimuth as f64);
                }
            }
            DirectionRule { dirs, weights }
        }
        _ => panic!("direction rules exist for N <= 3, got {dim}"),
    }
}

/// Full-sphere rule, closed under `theta -> -theta`.
pub fn full_rule(dim: usize, circle_points: usize, polar: usize, azimuth: usize) -> DirectionRule {
    match dim {
        1 => DirectionRule { dirs: vec![vec![1.0], vec![-1.0]], weights: vec![1.0, 1.0] },
        2 => {
            let w = 2.0 * PI / circle_points as f64;
            DirectionRule {
                dirs: (0..circle_points)
                    .map(|j| circle_dir(2.0 * PI * j as f64 / circle_points as f64))
                    .collect(),
                weights: vec![w; circle_points],
            }
        }
        3 => {
            let gl = GaussLegendre::new(polar);
            let mut dirs = Vec::new();
            let mut weights = Vec::new();
            for (z, wz) in gl.nodes.iter().zip(&gl.weights) {
                let rho = (1.0 - z * z).sqrt();
                for l in 0..azimuth {
                    let phi = 2.0 * PI * l as f64 / azimuth as f64;
                    dirs.push(vec![rho * phi.cos(), rho * phi.sin(), *z]);
                    weights.push(wz * 2.0 * PI / azimuth as f64);
                }
            }
            DirectionRule { dirs, weights }
        }
        _ => panic!("direction rules exist for N <= 3, got {dim}"),
    }
}

/// Exact averaging design for homogeneous polynomials of degree `2n` on the
/// sphere, halved by antipodal symmetry. Weights sum to one.
pub fn design(dim: usize, n: u32) -> DirectionRule {
    let n = n as usize;
    match dim {
        1 => DirectionRule { dirs: vec![vec![1.0]], weights: vec![1.0] },
        2 => {
            // 2n + 2 equally spaced angles are exact up to degree 2n + 1
            let count = n + 1;
            DirectionRule {
                dirs: (0..count).map(|j| circle_dir(PI * j as f64 / count as f64)).collect(),
                weights: vec![1.0 / count as f64; count],
            }
        }
        3 => {
            let gl = GaussLegendre::new(n + 1);
            let az = 2 * n + 2;
            let mut dirs = Vec::new();
            let mut weights = Vec::new();
            for (z, wz) in gl.nodes.iter().zip(&gl.weights) {
                let rho = (1.0 - z * z).sqrt();
                for l in 0..az {
                    let phi = 2.0 * PI * l as f64 / az as f64;
                    dirs.push(vec![rho * phi.cos(), rho * phi.sin(), *z]);
                    weights.push(0.5 * wz / az as f64);
                }
            }
            DirectionRule { dirs, weights }
        }
        _ => panic!("averaging designs exist for N <= 3, got {dim}"),
    }
}

/// `avg_{theta in S^{N-1}} theta_1^{2n} = Gamma(n + 1/2) Gamma(N/2) / (sqrt(pi) Gamma(n + N/2))`.
pub fn even_moment(dim: usize, n: u32) -> f64 {
    use crate::specialfn::ln_gamma;
    let nn = dim as f64;
    let k = n as f64;
    let lg = |x: f64| ln_gamma(x).map(|v| v.0).unwrap_or(f64::NAN);
    (lg(k + 0.5) + lg(nn / 2.0) - 0.5 * PI.ln() - lg(k + nn / 2.0)).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_area() {
        for dim in 1..=3 {
            let area = sphere_area(dim);
            assert!((half_rule(dim, 64, 16, 32).total_weight() - area).abs() < 1e-12);
            assert!((full_rule(dim, 64, 16, 32).total_weight() - area).abs() < 1e-12);
        }
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-13);
    }

    #[test]
    fn full_rules_are_antipodal() {
        for dim in 1..=3 {
            let r = full_rule(dim, 16, 8, 8);
            for d in &r.dirs {
                let neg: Vec<f64> = d.iter().map(|v| -v).collect();
                assert!(r.dirs.iter().any(|e| e.iter().zip(&neg).all(|(a, b)| (a - b).abs() < 1e-12)));
            }
        }
    }

    #[test]
    fn designs_reproduce_even_moments() {
        for dim in 1..=3 {
            for n in 0..=6u32 {
                let d = design(dim, n);
                let avg: f64 = d
                    .dirs
                    .iter()
                    .zip(&d.weights)
                    .map(|(t, w)| w * t[0].powi(2 * n as i32))
                    .sum();
                assert!((avg - even_moment(dim, n)).abs() < 1e-13, "N={dim} n={n}");
                // a mixed monomial with the same degree
                if dim >= 2 && n >= 1 {
                    let mixed: f64 = d
                        .dirs
                        .iter()
                        .zip(&d.weights)
                        .map(|(t, w)| w * t[0].powi(2) * t[1].powi(2 * n as i32 - 2))
                        .sum();
                    let exact = even_moment(dim, n) / (2.0 * n as f64 - 1.0);
                    assert!((mixed - exact).abs() < 1e-13, "N={dim} n={n}");
                }
            }
        }
    }
}
