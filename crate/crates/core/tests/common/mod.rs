//! Reference values computed without the library: statrs Gamma, tanh-sinh
//! quadrature, and closed forms for the Gaussian.
#![allow(dead_code)]

use std::f64::consts::PI;

use statrs::function::gamma::gamma;

/// `int_a^b f` by tanh-sinh, refined until two levels agree to `rel`.
/// Integrable algebraic singularities at either endpoint are fine.
pub fn tanh_sinh<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel: f64) -> f64 {
    let half = 0.5 * (b - a);
    let term = |t: f64| -> f64 {
        let u = 0.5 * PI * t.sinh();
        let w = 0.5 * PI * t.cosh() / u.cosh().powi(2);
        // distance to the nearer endpoint without cancellation
        let d = (b - a) / (1.0 + (2.0 * u.abs()).exp());
        let x = if t < 0.0 { a + d } else { b - d };
        if d == 0.0 || !w.is_finite() {
            0.0
        } else {
            w * f(x)
        }
    };
    let tmax = 4.0;
    let mut h = 0.5;
    let mut sum = term(0.0);
    let mut t = h;
    while t <= tmax {
        sum += term(t) + term(-t);
        t += h;
    }
    let mut prev = sum * h * half;
    for _ in 0..12 {
        // add the midpoints of the current level
        let mut t = 0.5 * h;
        while t <= tmax {
            sum += term(t) + term(-t);
            t += h;
        }
        h *= 0.5;
        let cur = sum * h * half;
        if (cur - prev).abs() <= rel * cur.abs() {
            return cur;
        }
        prev = cur;
    }
    prev
}

/// `int_0^inf rho^{s-1} / prod_{k=1}^m (rho + k^2) d rho` by the trapezoid
/// rule in `t = ln rho`, which converges geometrically for this integrand.
pub fn product_integral(m: u32, s: f64) -> f64 {
    let h = 0.02;
    let lo = -60.0 / s;
    let hi = 60.0 / (m as f64 - s);
    let n = ((hi - lo) / h).ceil() as usize;
    let log_integrand = |t: f64| -> f64 {
        let mut acc = s * t;
        for k in 1..=m {
            let b = 2.0 * (k as f64).ln();
            // ln(e^t + k^2)
            acc -= t.max(b) + (-(t - b).abs()).exp().ln_1p();
        }
        acc
    };
    (0..=n).map(|i| log_integrand(lo + i as f64 * h).exp()).sum::<f64>() * h
}

fn binom(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `2^m int_{R^N} (1 - cos y_1)^m / |y|^{N+2s} dy`, reduced to one variable
/// by integrating out the `N - 1` transverse directions.
pub fn constant_integral(dim: u32, m: u32, s: f64) -> f64 {
    let n = dim as f64;
    let transverse = PI.powf(0.5 * (n - 1.0)) * gamma(s + 0.5) / gamma(0.5 * n + s);
    let p = 1.0 + 2.0 * s;
    let g = |t: f64| (1.0 - t.cos()).powi(m as i32) * t.powf(-p);
    let periods = 400;
    let mut body = 0.0;
    for k in 0..periods {
        let a = 2.0 * PI * k as f64;
        body += tanh_sinh(g, a, a + 2.0 * PI, 1e-13);
    }
    // tail from the cosine expansion of (1 - cos t)^m, integrated by parts
    let big_t = 2.0 * PI * periods as f64;
    let scale = 0.5f64.powi(m as i32);
    let mut tail = scale * binom(2 * m, m) * big_t.powf(-2.0 * s) / (2.0 * s);
    for j in 1..=m {
        let a_j = 2.0 * scale * binom(2 * m, m - j) * if j % 2 == 0 { 1.0 } else { -1.0 };
        let jf = j as f64;
        tail += a_j
            * (p * big_t.powf(-p - 1.0) / (jf * jf)
                - p * (p + 1.0) * (p + 2.0) * big_t.powf(-p - 3.0) / jf.powi(4));
    }
    2f64.powi(m as i32) * 2.0 * transverse * (body + tail)
}

/// `(-Delta)^s exp(-|x|^2 / 2)` at `|x| = r` in dimension `N`:
/// `2^s Gamma(N/2 + s) / Gamma(N/2) * 1F1(N/2 + s; N/2; -r^2/2)`, with Kummer's
/// transformation so the series terms do not alternate.
pub fn gaussian_fractional(dim: usize, s: f64, r: f64) -> f64 {
    let b = 0.5 * dim as f64;
    let z = 0.5 * r * r;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..400 {
        let kf = k as f64;
        term *= (-s + kf) / (b + kf) * z / (kf + 1.0);
        sum += term;
        if term.abs() < 1e-17 * sum.abs() && k > 10 {
            break;
        }
    }
    2f64.powf(s) * gamma(b + s) / gamma(b) * (-z).exp() * sum
}

pub fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// `exp(-|x|^2 / 2)`.
pub fn gaussian_value(x: &[f64]) -> f64 {
    (-0.5 * norm(x).powi(2)).exp()
}
