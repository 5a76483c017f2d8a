//! Normalizing constants `c_{N,m,s}` and the integrals that pin them down.
//!
//! For non-integer `s`
//!
//! ```text
//! c = 4^s Gamma(N/2 + s) / (pi^{N/2} Gamma(-s) P(s)),
//! P(s) = sum_{k=1}^m (-1)^k binom(2m, m-k) k^{2s}
//! ```
//!
//! and for integer `s` the log-weighted sum replaces `Gamma(-s) P(s)`:
//!
//! ```text
//! c = 4^s Gamma(N/2 + s) s! / (2 pi^{N/2} sum_{k=2}^m (-1)^{k-s+1} binom(2m, m-k) k^{2s} ln k).
//! ```
//!
//! Both forms are evaluated in log space with explicit signs.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::specialfn::{ln_factorial, ln_gamma, sin_pi};

/// Below this distance from an integer the non-integer formula has lost
/// essentially all accuracy to cancellation, so it refuses to run.
pub const NEAR_INTEGER_REFUSAL: f64 = 1e-9;

/// Largest dimension accepted.
pub const MAX_DIM: u32 = 10;

/// Neumaier-compensated sum.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(terms: I) -> f64 {
    let mut sum = 0.0f64;
    let mut c = 0.0f64;
    for t in terms {
        let next = sum + t;
        if sum.abs() >= t.abs() {
            c += (sum - next) + t;
        } else {
            c += (t - next) + sum;
        }
        sum = next;
    }
    sum + c
}

/// The parameter triple `(N, m, s)` with `s = n + sigma`.
///
/// For integer `s` we take `n = s` and `sigma = 0`; otherwise
/// `n = ceil(s) - 1` and `sigma` lies in `(0, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FracParams {
    pub dim: u32,
    pub m: u32,
    pub s: f64,
}

impl FracParams {
    pub fn new(dim: u32, m: u32, s: f64) -> Result<Self> {
        if dim < 1 || dim > MAX_DIM {
            return Err(Error::InvalidParams(format!("dimension must be in 1..={MAX_DIM}, got {dim}")));
        }
        if m < 1 {
            return Err(Error::InvalidParams("m must be at least 1".into()));
        }
        if !s.is_finite() || s <= 0.0 || s >= m as f64 {
            return Err(Error::InvalidParams(format!("need 0 < s < m = {m}, got s = {s}")));
        }
        Ok(Self { dim, m, s })
    }

    pub fn is_integer(&self) -> bool {
        self.s.fract() == 0.0
    }

    /// Integer part `n` of the decomposition `s = n + sigma`.
    pub fn n(&self) -> u32 {
        if self.is_integer() {
            self.s as u32
        } else {
            self.s.ceil() as u32 - 1
        }
    }

    pub fn sigma(&self) -> f64 {
        self.s - self.n() as f64
    }

    /// Same `N` and `s` with a different `m`.
    pub fn with_m(&self, m: u32) -> Result<Self> {
        Self::new(self.dim, m, self.s)
    }
}

/// Which closed form produced a constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    NonInteger,
    Integer,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormConstant {
    pub value: f64,
    pub branch: Branch,
    /// `P(s)` on the non-integer branch, the `k^{2s} ln k` sum otherwise.
    pub p_sum: f64,
}

fn binomial_f64(n: u32, k: u32) -> f64 {
    (ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)).exp().round()
}

fn parity(k: i64) -> f64 {
    if k.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `P(s) = sum_{k=1}^m (-1)^k binom(2m, m-k) k^{2s}`.
pub fn p_sum(m: u32, s: f64) -> Result<f64> {
    if m < 1 || !(s > 0.0) {
        return Err(Error::Domain(format!("p_sum needs m >= 1 and s > 0, got ({m}, {s})")));
    }
    Ok(compensated_sum(
        (1..=m).map(|k| parity(k as i64) * binomial(2 * m, m - k) * (k as f64).powf(2.0 * s)),
    ))
}

/// `sum_{k=2}^m (-1)^{k-s+1} binom(2m, m-k) k^{2s} ln k` for integer `s`.
pub fn log_sum(m: u32, s: u32) -> f64 {
    compensated_sum((2..=m).map(|k| {
        let kf = k as f64;
        parity(k as i64 - s as i64 + 1) * binomial(2 * m, m - k) * kf.powi(2 * s as i32) * kf.ln()
    }))
}

/// `c_{N,m,s}`.
pub fn norm_constant(p: &FracParams) -> Result<NormConstant> {
    let n = p.dim as f64;
    let s = p.s;
    let (ln_top, _) = ln_gamma(n / 2.0 + s)?;
    let ln_common = s * 4f64.ln() + ln_top - 0.5 * n * PI.ln();
    if p.is_integer() {
        let si = s as u32;
        let sum = log_sum(p.m, si);
        let ln_value = ln_common + ln_factorial(si) - 2f64.ln() - sum.abs().ln();
        if !(sum > 0.0) {
            return Err(Error::Domain(format!(
                "integer-branch sum is not positive ({sum}) for m = {}, s = {si}",
                p.m
            )));
        }
        return Ok(NormConstant { value: ln_value.exp(), branch: Branch::Integer, p_sum: sum });
    }
    let gap = (s - s.round()).abs();
    if gap < NEAR_INTEGER_REFUSAL {
        return Err(Error::Domain(format!(
            "s = {s} is within {NEAR_INTEGER_REFUSAL:e} of an integer; pass the integer itself"
        )));
    }
    let psum = p_sum(p.m, s)?;
    let (ln_g, sign_g) = ln_gamma(-s)?;
    let sign = sign_g * psum.signum();
    if !(sign > 0.0) || psum == 0.0 {
        return Err(Error::Domain(format!(
            "non-integer formula lost its sign to cancellation at s = {s} (P = {psum})"
        )));
    }
    let value = (ln_common - ln_g - psum.abs().ln()).exp();
    Ok(NormConstant { value, branch: Branch::NonInteger, p_sum: psum })
}

/// `int_0^inf rho^{s-1} / prod_{k=1}^m (rho + k^2) d rho` in closed form.
///
/// Non-integer `s`: `2 Gamma(s) Gamma(1-s) sum_k (-1)^{k+1} k^{2s} / ((m-k)! (m+k)!)`.
/// Integer `s`: `4 sum_k (-1)^{k-s+1} k^{2s} ln k / ((m+k)! (m-k)!)`.
pub fn closed_form_integral(m: u32, s: f64) -> Result<f64> {
    if m < 1 || !(s > 0.0) || s >= m as f64 {
        return Err(Error::Domain(format!("need m >= 1 and 0 < s < m, got ({m}, {s})")));
    }
    let ln_den = |k: u32| ln_factorial(m - k) + ln_factorial(m + k);
    if s.fract() == 0.0 {
        let si = s as i64;
        let sum = compensated_sum((2..=m).map(|k| {
            let kf = k as f64;
            parity(k as i64 - si + 1) * (2.0 * s * kf.ln() - ln_den(k)).exp() * kf.ln()
        }));
        return Ok(4.0 * sum);
    }
    let sum = compensated_sum(
        (1..=m).map(|k| parity(k as i64 + 1) * (2.0 * s * (k as f64).ln() - ln_den(k)).exp()),
    );
    // Gamma(s) Gamma(1 - s) = pi / sin(pi s)
    Ok(2.0 * PI / sin_pi(s) * sum)
}

/// `2 / c` through the closed-form integral:
/// `(2m)! pi^{N/2} / (4^s Gamma(s+1) Gamma(N/2+s)) * closed_form_integral(m, s)`.
pub fn two_over_c_via_integral(p: &FracParams) -> Result<f64> {
    let n = p.dim as f64;
    let s = p.s;
    let (g1, _) = ln_gamma(s + 1.0)?;
    let (g2, _) = ln_gamma(n / 2.0 + s)?;
    let ln_pref = ln_factorial(2 * p.m) + 0.5 * n * PI.ln() - s * 4f64.ln() - g1 - g2;
    Ok(ln_pref.exp() * closed_form_integral(p.m, s)?)
}

/// A multi-index.
pub type MultiIndex = Vec<u32>;

fn ln_double_factorial_index(alpha: &[u32]) -> f64 {
    alpha.iter().map(|&a| ln_factorial(2 * a) - ln_factorial(a)).sum()
}

/// `int_{B_1} y^{2 alpha} / |y|^{N+2s} dy` for `|alpha| = m`:
/// `(2 alpha)! / alpha! * pi^{N/2} / (2^{2m-1} Gamma(N/2 + m)) / (2 (m - s))`.
pub fn moment_ball_integral(dim: u32, m: u32, s: f64, alpha: &[u32]) -> Result<f64> {
    if alpha.len() != dim as usize {
        return Err(Error::Domain(format!(
            "multi-index has {} entries for dimension {dim}",
            alpha.len()
        )));
    }
    let total: u32 = alpha.iter().sum();
    if total != m {
        return Err(Error::Domain(format!("|alpha| = {total} but m = {m}")));
    }
    if !(s > 0.0 && s < m as f64) {
        return Err(Error::Domain(format!("need 0 < s < m, got s = {s}")));
    }
    let n = dim as f64;
    let (g, _) = ln_gamma(n / 2.0 + m as f64)?;
    let ln = ln_double_factorial_index(alpha) + 0.5 * n * PI.ln()
        - (2 * m - 1) as f64 * 2f64.ln()
        - g;
    Ok(ln.exp() / (2.0 * (m as f64 - s)))
}

/// `(-1)^m (2m)! / (2 alpha)! * c/2 * moment_ball_integral`, which tends to
/// `(-1)^m m! / alpha!` as `s -> m-`.
pub fn moment_limit_probe(dim: u32, m: u32, s: f64, alpha: &[u32]) -> Result<f64> {
    let integral = moment_ball_integral(dim, m, s, alpha)?;
    let c = norm_constant(&FracParams::new(dim, m, s)?)?.value;
    let ln = ln_factorial(2 * m) - alpha.iter().map(|&a| ln_factorial(2 * a)).sum::<f64>();
    Ok(parity(m as i64) * ln.exp() * 0.5 * c * integral)
}

/// `(-1)^m m! / alpha!`.
pub fn moment_limit_target(m: u32, alpha: &[u32]) -> f64 {
    let ln = ln_factorial(m) - alpha.iter().map(|&a| ln_factorial(a)).sum::<f64>();
    parity(m as i64) * ln.exp()
}

/// Endpoint behaviour of the constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstantLimits {
    /// `lim_{s -> 0+} c / s = 2 (m!)^2 Gamma(N/2) / ((2m)! pi^{N/2})`
    pub at_zero: f64,
    /// `lim_{s -> m-} c / (m - s) = 2^{2m+1} m! Gamma(N/2 + m) / ((2m)! pi^{N/2})`
    pub at_m: f64,
}

pub fn constant_limits(dim: u32, m: u32) -> Result<ConstantLimits> {
    if dim < 1 || m < 1 {
        return Err(Error::Domain(format!("need N >= 1 and m >= 1, got ({dim}, {m})")));
    }
    let n = dim as f64;
    let (g0, _) = ln_gamma(n / 2.0)?;
    let (gm, _) = ln_gamma(n / 2.0 + m as f64)?;
    let base = ln_factorial(2 * m) + 0.5 * n * PI.ln();
    let at_zero = (2f64.ln() + 2.0 * ln_factorial(m) + g0 - base).exp();
    let at_m = ((2 * m + 1) as f64 * 2f64.ln() + ln_factorial(m) + gm - base).exp();
    Ok(ConstantLimits { at_zero, at_m })
}

/// Binomial coefficient as a float (exact up to about `binom(60, 30)`).
pub fn binomial(n: u32, k: u32) -> f64 {
    if k > n {
        0.0
    } else {
        binomial_f64(n, k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::adaptive_semi_infinite;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn params_decomposition() {
        let p = FracParams::new(2, 3, 2.4).unwrap();
        assert_eq!(p.n(), 2);
        assert!((p.sigma() - 0.4).abs() < 1e-15);
        let p = FracParams::new(1, 3, 2.0).unwrap();
        assert_eq!((p.n(), p.sigma()), (2, 0.0));
        let p = FracParams::new(1, 1, 0.3).unwrap();
        assert_eq!(p.n(), 0);
        assert!(FracParams::new(1, 2, 2.0).is_err());
        assert!(FracParams::new(1, 2, 0.0).is_err());
        assert!(FracParams::new(0, 2, 1.0).is_err());
        assert!(FracParams::new(11, 2, 1.0).is_err());
    }

    #[test]
    fn p_sum_examples() {
        assert_eq!(p_sum(1, 0.5).unwrap(), -1.0);
        for s in [0.3, 0.9, 1.4] {
            assert!((p_sum(2, s).unwrap() - (4f64.powf(s) - 4.0)).abs() < 1e-13);
        }
        assert_eq!(p_sum(2, 1.0).unwrap(), 0.0);
        assert!(p_sum(3, 2.0).unwrap().abs() < 1e-12);
    }

    #[test]
    fn constant_examples() {
        let c = norm_constant(&FracParams::new(1, 1, 0.5).unwrap()).unwrap();
        assert!(rel(c.value, 1.0 / PI) < 1e-13);
        assert_eq!(c.branch, Branch::NonInteger);
        for dim in 1..=3u32 {
            let c = norm_constant(&FracParams::new(dim, 2, 1.0).unwrap()).unwrap();
            assert_eq!(c.branch, Branch::Integer);
            let n = dim as f64;
            let expected = crate::specialfn::gamma(n / 2.0 + 1.0).unwrap()
                / (4.0 * PI.powf(n / 2.0) * 2f64.ln());
            assert!(rel(c.value / 2.0, expected) < 1e-13);
        }
        let c = norm_constant(&FracParams::new(2, 2, 1.0).unwrap()).unwrap();
        assert!(rel(c.value / 2.0, 0.114_806_023_565_821_3) < 1e-13);
    }

    #[test]
    fn constant_rejects_near_integers() {
        let p = FracParams::new(1, 3, 1.0 + 1e-11).unwrap();
        assert!(norm_constant(&p).is_err());
    }

    #[test]
    fn constant_is_positive_on_grid() {
        for dim in 1..=3 {
            for m in 1..=5u32 {
                for i in 1..(20 * m) {
                    let s = i as f64 * 0.05 + 0.013;
                    if s >= m as f64 {
                        continue;
                    }
                    let c = norm_constant(&FracParams::new(dim, m, s).unwrap()).unwrap();
                    assert!(c.value > 0.0 && c.value.is_finite(), "N={dim} m={m} s={s}");
                }
                for s in 1..m {
                    let c = norm_constant(&FracParams::new(dim, m, s as f64).unwrap()).unwrap();
                    assert!(c.value > 0.0);
                }
            }
        }
    }

    #[test]
    fn continuous_across_integers() {
        for dim in 1..=3 {
            for n in [1.0, 2.0] {
                let at = norm_constant(&FracParams::new(dim, 3, n).unwrap()).unwrap().value;
                for d in [-1e-4, 1e-4] {
                    let near = norm_constant(&FracParams::new(dim, 3, n + d).unwrap()).unwrap().value;
                    assert!(rel(near, at) < 1e-2, "N={dim} n={n} d={d}");
                }
            }
        }
    }

    #[test]
    fn closed_form_examples() {
        assert!(rel(closed_form_integral(1, 0.5).unwrap(), PI) < 1e-14);
        assert!(rel(closed_form_integral(2, 1.0).unwrap(), 2.0 / 3.0 * 2f64.ln()) < 1e-14);
        // independent: the antiderivative (1/3) ln((rho+1)/(rho+4)) on [0, inf)
        assert!(rel(closed_form_integral(2, 1.0).unwrap(), (4f64).ln() / 3.0) < 1e-14);
        let q = adaptive_semi_infinite(
            |r: f64| r.powf(0.7) / ((r + 1.0) * (r + 4.0) * (r + 9.0)),
            0.0,
            1e-14,
            1e-12,
        );
        assert!(rel(closed_form_integral(3, 1.7).unwrap(), q.value) < 1e-8);
    }

    #[test]
    fn chain_identity() {
        for dim in 1..=3 {
            for m in 1..=5u32 {
                for s in [0.3, 0.5, 1.0, 1.5, 2.0, 2.5, 3.7, 4.2] {
                    if s >= m as f64 {
                        continue;
                    }
                    let p = FracParams::new(dim, m, s).unwrap();
                    let c = norm_constant(&p).unwrap().value;
                    let lhs = 2.0 / c;
                    let rhs = two_over_c_via_integral(&p).unwrap();
                    assert!(rel(lhs, rhs) < 1e-10, "N={dim} m={m} s={s}: {lhs} vs {rhs}");
                }
            }
        }
    }

    #[test]
    fn order_reduction_relation() {
        for dim in 1..=3 {
            for m in 2..=5u32 {
                for n in 1..m {
                    for s in [0.3, 0.5, 1.5, 2.5, 3.3] {
                        if s >= n as f64 {
                            continue;
                        }
                        let cm = norm_constant(&FracParams::new(dim, m, s).unwrap()).unwrap();
                        let cn = norm_constant(&FracParams::new(dim, n, s).unwrap()).unwrap();
                        let lhs = cm.value * cm.p_sum / cn.p_sum;
                        assert!(rel(lhs, cn.value) < 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn limit_examples() {
        let l = constant_limits(1, 1).unwrap();
        assert!(rel(l.at_zero, 1.0) < 1e-14);
        assert!(rel(l.at_m, 2.0) < 1e-14);
        for (dim, m) in [(1, 1), (2, 2), (3, 2), (2, 3)] {
            let l = constant_limits(dim, m).unwrap();
            let s = 1e-5;
            let c = norm_constant(&FracParams::new(dim, m, s).unwrap()).unwrap().value;
            assert!(rel(c / s, l.at_zero) < 1e-3);
            let s = m as f64 - 1e-5;
            let c = norm_constant(&FracParams::new(dim, m, s).unwrap()).unwrap().value;
            assert!(rel(c / (m as f64 - s), l.at_m) < 1e-3);
        }
    }

    #[test]
    fn moment_integral_examples() {
        assert!(rel(moment_ball_integral(1, 1, 0.5, &[1]).unwrap(), 2.0) < 1e-14);
        // int_{-1}^{1} |y|^{2m - 1 - 2s} dy = 1 / (m - s) for N = 1
        for (m, s) in [(2u32, 0.4), (3, 2.2), (2, 1.5)] {
            let v = moment_ball_integral(1, m, s, &[m]).unwrap();
            assert!(rel(v, 1.0 / (m as f64 - s)) < 1e-13);
        }
        assert!(moment_ball_integral(2, 2, 1.5, &[1, 0]).is_err());
        for alpha in [[2u32, 0], [1, 1]] {
            let v = moment_limit_probe(2, 2, 2.0 - 1e-4, &alpha).unwrap();
            assert!(rel(v, moment_limit_target(2, &alpha)) < 1e-3);
        }
    }

    #[test]
    fn binomial_floats() {
        assert_eq!(binomial(10, 5), 252.0);
        assert_eq!(binomial(4, 0), 1.0);
        assert_eq!(binomial(3, 4), 0.0);
    }
}
