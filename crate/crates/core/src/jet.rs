//! Truncated Taylor series ("jets") for exact directional derivatives.
//!
//! A jet of order `K` holds `f(t0), f'(t0), f''(t0)/2!, ..., f^(K)(t0)/K!`.
//! Catalog fields are written once against the [`Real`] trait and evaluated
//! either on plain `f64` or on jets in `t` along a line `x + t * dir`.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Highest supported jet order.
pub const MAX_ORDER: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    coeffs: [f64; MAX_ORDER + 1],
    order: usize,
}

impl Jet {
    pub fn constant(value: f64, order: usize) -> Self {
        assert!(order <= MAX_ORDER, "jet order {order} exceeds {MAX_ORDER}");
        let mut coeffs = [0.0; MAX_ORDER + 1];
        coeffs[0] = value;
        Self { coeffs, order }
    }

    /// The affine jet `value + slope * t`.
    pub fn line(value: f64, slope: f64, order: usize) -> Self {
        let mut j = Self::constant(value, order);
        if order >= 1 {
            j.coeffs[1] = slope;
        }
        j
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Taylor coefficients `f^(k) / k!`.
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs[..=self.order]
    }

    /// `k`-th derivative.
    pub fn derivative(&self, k: usize) -> f64 {
        let fact: f64 = (1..=k).map(|i| i as f64).product();
        self.coeffs.get(k).copied().unwrap_or(0.0) * fact
    }

    fn zip(self, other: Jet, op: impl Fn(f64, f64) -> f64) -> Jet {
        let order = self.order.min(other.order);
        let mut out = Jet::constant(0.0, order);
        for k in 0..=order {
            out.coeffs[k] = op(self.coeffs[k], other.coeffs[k]);
        }
        out
    }

    pub fn recip(self) -> Jet {
        let b = &self.coeffs;
        let mut r = Jet::constant(1.0 / b[0], self.order);
        for k in 1..=self.order {
            let acc: f64 = (1..=k).map(|j| b[j] * r.coeffs[k - j]).sum();
            r.coeffs[k] = -acc / b[0];
        }
        r
    }

    pub fn exp(self) -> Jet {
        let a = &self.coeffs;
        let mut e = Jet::constant(a[0].exp(), self.order);
        for k in 1..=self.order {
            let acc: f64 = (1..=k).map(|j| j as f64 * a[j] * e.coeffs[k - j]).sum();
            e.coeffs[k] = acc / k as f64;
        }
        e
    }

    pub fn sqrt(self) -> Jet {
        let a = &self.coeffs;
        let s0 = a[0].sqrt();
        let mut s = Jet::constant(s0, self.order);
        for k in 1..=self.order {
            let acc: f64 = (1..k).map(|j| s.coeffs[j] * s.coeffs[k - j]).sum();
            s.coeffs[k] = (a[k] - acc) / (2.0 * s0);
        }
        s
    }
}

impl Jet {
    /// `self^p` for a jet with positive value.
    pub fn powf(self, p: f64) -> Jet {
        let a = &self.coeffs;
        let mut b = Jet::constant(a[0].powf(p), self.order);
        for k in 1..=self.order {
            let acc: f64 = (1..=k)
                .map(|j| (p * j as f64 - (k - j) as f64) * a[j] * b.coeffs[k - j])
                .sum();
            b.coeffs[k] = acc / (k as f64 * a[0]);
        }
        b
    }

    /// Jet with the given Taylor coefficients (truncated to `MAX_ORDER`).
    pub fn from_coeffs(c: &[f64]) -> Jet {
        let order = c.len().clamp(1, MAX_ORDER + 1) - 1;
        let mut j = Jet::constant(0.0, order);
        for (k, v) in c.iter().take(order + 1).enumerate() {
            j.coeffs[k] = *v;
        }
        j
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(self, rhs: Jet) -> Jet {
        self.zip(rhs, |a, b| a + b)
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        self.zip(rhs, |a, b| a - b)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let order = self.order.min(rhs.order);
        let mut out = Jet::constant(0.0, order);
        for k in 0..=order {
            out.coeffs[k] = (0..=k).map(|j| self.coeffs[j] * rhs.coeffs[k - j]).sum();
        }
        out
    }
}

impl Div for Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Jet) -> Jet {
        self * rhs.recip()
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(mut self) -> Jet {
        for c in self.coeffs.iter_mut() {
            *c = -*c;
        }
        self
    }
}

impl Add<f64> for Jet {
    type Output = Jet;
    fn add(mut self, rhs: f64) -> Jet {
        self.coeffs[0] += rhs;
        self
    }
}

impl Sub<f64> for Jet {
    type Output = Jet;
    fn sub(mut self, rhs: f64) -> Jet {
        self.coeffs[0] -= rhs;
        self
    }
}

impl Mul<f64> for Jet {
    type Output = Jet;
    fn mul(mut self, rhs: f64) -> Jet {
        for c in self.coeffs.iter_mut() {
            *c *= rhs;
        }
        self
    }
}

/// Arithmetic shared by `f64` and [`Jet`].
pub trait Real:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
{
    fn value(&self) -> f64;
    fn exp(self) -> Self;
    fn sqrt(self) -> Self;
    fn recip(self) -> Self;
    /// A constant of the same kind (and jet order) as `self`.
    fn lift(&self, v: f64) -> Self;

    fn powi(self, n: u32) -> Self {
        let mut acc = self.lift(1.0);
        for _ in 0..n {
            acc = acc * self;
        }
        acc
    }
}

impl Real for f64 {
    fn value(&self) -> f64 {
        *self
    }
    fn exp(self) -> f64 {
        f64::exp(self)
    }
    fn sqrt(self) -> f64 {
        f64::sqrt(self)
    }
    fn recip(self) -> f64 {
        1.0 / self
    }
    fn lift(&self, v: f64) -> f64 {
        v
    }
}

impl Real for Jet {
    fn value(&self) -> f64 {
        self.coeffs[0]
    }
    fn exp(self) -> Jet {
        Jet::exp(self)
    }
    fn sqrt(self) -> Jet {
        Jet::sqrt(self)
    }
    fn recip(self) -> Jet {
        Jet::recip(self)
    }
    fn lift(&self, v: f64) -> Jet {
        Jet::constant(v, self.order)
    }
}

/// `sum_i p_i^2`.
pub fn norm_sq<T: Real>(p: &[T]) -> T {
    p.iter().skip(1).fold(p[0] * p[0], |acc, &c| acc + c * c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn powf_matches_closed_form() {
        // (1 + t)^-1.5 has coefficients binom(-1.5, k)
        let y = Jet::line(1.0, 1.0, 6).powf(-1.5);
        let mut c = 1.0;
        for k in 0..=6 {
            assert!((y.coeffs()[k] - c).abs() < 1e-14 * c.abs().max(1.0));
            c *= (-1.5 - k as f64) / (k + 1) as f64;
        }
    }

    #[test]
    fn polynomial_derivatives() {
        // (2 + t)^3 at t = 0
        let x = Jet::line(2.0, 1.0, 5);
        let y = x * x * x;
        assert_eq!(y.derivative(0), 8.0);
        assert_eq!(y.derivative(1), 12.0);
        assert_eq!(y.derivative(2), 12.0);
        assert_eq!(y.derivative(3), 6.0);
        assert_eq!(y.derivative(4), 0.0);
    }

    #[test]
    fn exp_of_quadratic_is_gaussian() {
        // exp(-t^2 / 2): derivatives at 0 are 1, 0, -1, 0, 3, 0, -15, 0, 105
        let t = Jet::line(0.0, 1.0, 8);
        let g = (t * t * -0.5).exp();
        let expected = [1.0, 0.0, -1.0, 0.0, 3.0, 0.0, -15.0, 0.0, 105.0];
        for (k, e) in expected.iter().enumerate() {
            assert!((g.derivative(k) - e).abs() < 1e-12, "k = {k}");
        }
    }

    #[test]
    fn recip_and_sqrt_invert_products() {
        let a = Jet::line(1.7, 0.3, 6) * Jet::line(0.9, -1.1, 6) + 2.0;
        let one = a * a.recip();
        assert!((one.derivative(0) - 1.0).abs() < 1e-14);
        for k in 1..=6 {
            assert!(one.derivative(k).abs() < 1e-10);
        }
        let r = a.sqrt();
        let back = r * r - a;
        for k in 0..=6 {
            assert!(back.derivative(k).abs() < 1e-10);
        }
    }

    #[test]
    fn f64_and_jet_agree_on_value() {
        fn f<T: Real>(x: T) -> T {
            (x * x + 1.0).sqrt().recip() * (-x).exp()
        }
        for x in [-1.3, 0.0, 0.4, 2.2] {
            assert!((f(x) - f(Jet::line(x, 1.0, 3)).value()).abs() < 1e-15);
            // first derivative against a central difference
            let h = 1e-5;
            let fd = (f(x + h) - f(x - h)) / (2.0 * h);
            assert!((f(Jet::line(x, 1.0, 3)).derivative(1) - fd).abs() < 1e-8);
        }
    }
}
