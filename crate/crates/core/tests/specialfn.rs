mod common;

use std::f64::consts::PI;

use approx::assert_relative_eq;
use hyperfrac::specialfn::{
    beta_radial, gamma, ln_gamma, sin2m_laplace, sin_cos_moment, sin_cos_moment_integer_b, TrigPeriod,
};
use hyperfrac::Error;
use proptest::prelude::*;

#[test]
fn gamma_half_is_sqrt_pi() {
    assert_relative_eq!(gamma(0.5).unwrap(), PI.sqrt(), max_relative = 1e-13);
}

#[test]
fn gamma_matches_statrs() {
    for x in [0.013, 0.5, 1.3, 2.7, 9.25, 17.5, 33.3, 49.9, -0.5, -2.75, -11.2] {
        let want = statrs::function::gamma::gamma(x);
        assert_relative_eq!(gamma(x).unwrap(), want, max_relative = 1e-12);
    }
}

#[test]
fn gamma_poles() {
    for x in [0.0, -1.0, -7.0] {
        assert!(matches!(gamma(x), Err(Error::GammaPole(_))));
    }
}

#[test]
fn duplication_at_three_quarters() {
    let a: f64 = 0.75;
    let rhs = 2f64.powf(1.0 - 2.0 * a) * PI.sqrt() * gamma(2.0 * a).unwrap() / gamma(a).unwrap();
    assert_relative_eq!(gamma(0.5 + a).unwrap(), rhs, max_relative = 1e-14);
}

#[test]
fn recurrence_examples() {
    for a in [0.3, 1.7, 4.2] {
        assert_relative_eq!(gamma(a + 1.0).unwrap(), a * gamma(a).unwrap(), max_relative = 1e-14);
    }
}

#[test]
fn laplace_examples() {
    assert_eq!(sin2m_laplace(1, 2.0).unwrap(), 0.125);
    assert_relative_eq!(sin2m_laplace(2, 1.0).unwrap(), 24.0 / 85.0, max_relative = 1e-13);
    assert!(sin2m_laplace(0, 1.0).is_err());
    assert!(sin2m_laplace(1, 0.0).is_err());
}

#[test]
fn laplace_against_quadrature() {
    // int_0^T sin^6(t) e^{-0.7 t} dt with T = 60 leaves a tail below 1e-18
    let (m, a) = (3, 0.7);
    let mut q = 0.0;
    for k in 0..60 {
        let lo = k as f64;
        q += common::tanh_sinh(|t| t.sin().powi(2 * m) * (-a * t).exp(), lo, lo + 1.0, 1e-14);
    }
    assert_relative_eq!(sin2m_laplace(m as u32, a).unwrap(), q, max_relative = 1e-8);
}

#[test]
fn trig_moment_examples() {
    assert_relative_eq!(sin_cos_moment(0.0, 0.0, TrigPeriod::Full).unwrap(), 2.0 * PI, max_relative = 1e-13);
    // Gamma((N-1)/2) Gamma(s+1/2) / (2 Gamma(N/2+s)) at N = 3, s = 1/2
    assert_relative_eq!(beta_radial(3, 0.5).unwrap(), 0.5, max_relative = 1e-13);
    let q = common::tanh_sinh(|t| (t.sin() * t.cos()).powi(2), 0.0, PI, 1e-14);
    assert_relative_eq!(sin_cos_moment(1.0, 1.0, TrigPeriod::Half).unwrap(), q, max_relative = 1e-10);
    assert_relative_eq!(sin_cos_moment_integer_b(1.0, 1).unwrap(), q, max_relative = 1e-10);
}

#[test]
fn beta_radial_against_quadrature() {
    for (dim, s) in [(2u32, 0.3), (3, 1.7)] {
        let n = dim as f64;
        let f = |r: f64| r.powf(n - 2.0) * (1.0 + r * r).powf(-(n + 2.0 * s) / 2.0);
        // fold [1, inf) onto (0, 1] with r -> 1/r
        let g = |r: f64| f(1.0 / r) / (r * r);
        let q = common::tanh_sinh(f, 0.0, 1.0, 1e-14) + common::tanh_sinh(g, 0.0, 1.0, 1e-14);
        assert_relative_eq!(beta_radial(dim, s).unwrap(), q, max_relative = 1e-10);
    }
}

proptest! {
    #[test]
    fn recurrence_on_log_grid(e in -3.0f64..1.6) {
        let a = 10f64.powf(e);
        let lhs = gamma(a + 1.0).unwrap();
        let rhs = a * gamma(a).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs());
    }

    #[test]
    fn reflection(s in 0.001f64..0.999) {
        let v = gamma(s).unwrap() * gamma(1.0 - s).unwrap() * (PI * s).sin() / PI;
        prop_assert!((v - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn duplication(a in 0.01f64..20.0) {
        let lhs = gamma(0.5 + a).unwrap();
        let rhs = 2f64.powf(1.0 - 2.0 * a) * PI.sqrt() * gamma(2.0 * a).unwrap() / gamma(a).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs());
    }

    #[test]
    fn positive_on_positive_axis(x in 1e-6f64..50.0) {
        prop_assert!(gamma(x).unwrap() > 0.0);
        let (lg, sign) = ln_gamma(x).unwrap();
        prop_assert_eq!(sign, 1.0);
        prop_assert!((lg - gamma(x).unwrap().ln()).abs() <= 1e-12 * lg.abs().max(1.0));
    }
}
