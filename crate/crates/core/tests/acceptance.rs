//! Acceptance suite: one line per criterion, nonzero exit if any fails.

mod common;

use std::sync::Arc;
use std::time::{Duration, Instant};

use hyperfrac::constants::{
    closed_form_integral, constant_limits, moment_ball_integral, moment_limit_probe, moment_limit_target,
};
use hyperfrac::energy::{energy_direct, energy_via_operator, EnergyConfig};
use hyperfrac::field::{bump, gaussian, shifted, Field};
use hyperfrac::harmonic::{verify_sharmonic, OutsideDatum, PoissonExtension};
use hyperfrac::spectral::{fourier_energy, oracle_grid, symbol_apply, UniformGrid};
use hyperfrac::stencils::identity_suite;
use hyperfrac::{eval_lms, norm_constant, FracParams, QuadratureConfig};

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn cfg(tol: f64) -> QuadratureConfig {
    QuadratureConfig { tol, ..QuadratureConfig::default() }
}

fn lms(f: &Field, x: &[f64], m: u32, s: f64, tol: f64) -> f64 {
    let p = FracParams::new(x.len() as u32, m, s).unwrap();
    eval_lms(f.as_ref(), x, &p, &cfg(tol)).unwrap().value
}

fn exact_identities() -> Outcome {
    let checks = identity_suite();
    let failed: Vec<String> = checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect();
    outcome(failed.is_empty(), format!("{} exact checks, failed: {failed:?}", checks.len()))
}

fn constant_cross_validation() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for dim in 1..=3u32 {
        for m in 1..=3u32 {
            for s in [0.3, 0.5, 1.0, 1.5, 2.5] {
                if s >= m as f64 {
                    continue;
                }
                let c = norm_constant(&FracParams::new(dim, m, s).unwrap()).unwrap().value;
                let q = common::constant_integral(dim, m, s);
                worst = worst.max((2.0 / c - q).abs() / q);
                cases += 1;
            }
        }
    }
    outcome(worst <= 1e-5, format!("{cases} cases, max relative gap {worst:.2e} (limit 1e-5)"))
}

fn closed_form_vs_quadrature() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for m in 1..=4u32 {
        for s in [0.5, 1.0, 1.7, 2.0, 3.2] {
            if s >= m as f64 {
                continue;
            }
            let a = closed_form_integral(m, s).unwrap();
            let b = common::product_integral(m, s);
            worst = worst.max((a - b).abs() / b.abs());
            cases += 1;
        }
    }
    outcome(worst <= 1e-8, format!("{cases} cases, max relative gap {worst:.2e} (limit 1e-8)"))
}

fn fourier_symbol() -> Outcome {
    let g1 = gaussian(1);
    let mut worst: f64 = 0.0;
    for (m, s) in [(1, 0.5), (2, 0.3), (2, 1.5), (3, 2.5)] {
        let choice = oracle_grid(1, s, 6.0, 1.0, 1e-5);
        let grid = UniformGrid::from_field(g1.as_ref(), choice.extent, choice.points).unwrap();
        let out = symbol_apply(&grid, s).unwrap().grid;
        for j in 0..9 {
            let x = [-2.0 + 0.5 * j as f64];
            let (spec, d) = out.nearest(&x);
            assert!(d < 1e-12, "sample point off the grid");
            worst = worst.max((lms(&g1, &x, m, s, 1e-8) - spec).abs());
        }
    }
    let g2 = gaussian(2);
    let choice = oracle_grid(2, 0.5, 6.0, 1.0, 1e-4);
    let grid = UniformGrid::from_field(g2.as_ref(), choice.extent, choice.points).unwrap();
    let out = symbol_apply(&grid, 0.5).unwrap().grid;
    let mut worst2: f64 = 0.0;
    for x in [[0.0, 0.0], [0.5, -0.25], [1.0, 1.5]] {
        let (spec, _) = out.nearest(&x);
        worst2 = worst2.max((lms(&g2, &x, 1, 0.5, 1e-6) - spec).abs());
    }
    outcome(
        worst <= 1e-4 && worst2 <= 1e-3,
        format!("N=1 max gap {worst:.2e} (limit 1e-4), N=2 smoke {worst2:.2e} (limit 1e-3)"),
    )
}

fn order_reduction() -> Outcome {
    let g = gaussian(1);
    let mut worst: f64 = 0.0;
    for x in [-1.5, -0.4, 0.0, 0.9, 2.2] {
        let l1 = lms(&g, &[x], 1, 0.5, 1e-8);
        let l2 = lms(&g, &[x], 2, 0.5, 1e-8);
        let l3 = lms(&g, &[x], 3, 0.5, 1e-8);
        worst = worst.max((l3 - l1).abs()).max((l3 - l2).abs());
    }
    outcome(worst <= 2e-5, format!("max |L_3 - L_1|, |L_3 - L_2| = {worst:.2e} (limit 2e-5)"))
}

fn limits() -> Outcome {
    let g = gaussian(1);
    let mut worst_zero: f64 = 0.0;
    let mut worst_m: f64 = 0.0;
    for m in 1..=2u32 {
        for x in [0.0, 0.7] {
            let u = common::gaussian_value(&[x]);
            let near_zero = lms(&g, &[x], m, 1e-3, 1e-8);
            worst_zero = worst_zero.max((near_zero - u).abs() / u.abs());
            let target = common::gaussian_fractional(1, m as f64, x);
            let near_m = lms(&g, &[x], m, m as f64 - 1e-3, 1e-8);
            worst_m = worst_m.max((near_m - target).abs() / target.abs());
        }
    }
    outcome(
        worst_zero <= 5e-2 && worst_m <= 5e-2,
        format!("s -> 0 gap {worst_zero:.2e}, s -> m gap {worst_m:.2e} (limit 5e-2)"),
    )
}

fn integer_collapse() -> Outcome {
    let mut worst: f64 = 0.0;
    let pts1: Vec<Vec<f64>> = [-1.2, -0.3, 0.0, 0.8, 1.9].iter().map(|&v| vec![v]).collect();
    let pts2: Vec<Vec<f64>> =
        vec![vec![0.0, 0.0], vec![0.5, 0.3], vec![-1.0, 0.2], vec![1.5, -1.0], vec![0.2, 2.0]];
    for (dim, pts) in [(1usize, &pts1), (2, &pts2)] {
        let g = gaussian(dim);
        for (m, n) in [(2u32, 1u32), (3, 2)] {
            for x in pts.iter() {
                let exact = common::gaussian_fractional(dim, n as f64, common::norm(x));
                worst = worst.max((lms(&g, x, m, n as f64, 1e-8) - exact).abs());
            }
        }
    }
    outcome(worst <= 1e-5, format!("max gap to exact derivatives {worst:.2e} (limit 1e-5)"))
}

fn constant_limits_check() -> Outcome {
    let mut worst: f64 = 0.0;
    for (dim, m) in [(1u32, 1u32), (2, 2), (3, 2)] {
        let lim = constant_limits(dim, m).unwrap();
        let s0 = 1e-5;
        let c0 = norm_constant(&FracParams::new(dim, m, s0).unwrap()).unwrap().value;
        worst = worst.max((c0 / s0 - lim.at_zero).abs() / lim.at_zero);
        let s1 = m as f64 - 1e-5;
        let c1 = norm_constant(&FracParams::new(dim, m, s1).unwrap()).unwrap().value;
        worst = worst.max((c1 / (m as f64 - s1) - lim.at_m).abs() / lim.at_m);
    }
    outcome(worst <= 1e-3, format!("max relative gap {worst:.2e} (limit 1e-3)"))
}

fn energy_equivalence() -> Outcome {
    let u: Field = bump(1, 1.0);
    let v: Field = shifted(bump(1, 1.2), vec![0.5]);
    let ecfg = EnergyConfig::default();
    let mut worst_direct: f64 = 0.0;
    let mut worst_op: f64 = 0.0;
    for (m, s) in [(1u32, 0.5), (2, 1.5)] {
        // the bumps need a fine spacing; a long period keeps the Riemann sum
        // over the kink of |xi|^{2s} at the origin small
        let ug = UniformGrid::from_field(u.as_ref(), 256.0, 1 << 14).unwrap();
        let vg = UniformGrid::from_field(v.as_ref(), 256.0, 1 << 14).unwrap();
        let target = fourier_energy(&ug, &vg, s).unwrap();
        let direct = energy_direct(u.as_ref(), v.as_ref(), m, s, &ecfg).unwrap().value;
        worst_direct = worst_direct.max((direct - target).abs() / target.abs());
        let n = s.ceil() as u32;
        let via_op = energy_via_operator(u.as_ref(), v.as_ref(), n, s, &cfg(1e-8), &ecfg).unwrap();
        worst_op = worst_op.max((via_op - target).abs() / target.abs());
    }
    outcome(
        worst_direct <= 1e-2 && worst_op <= 1e-2,
        format!("direct gap {worst_direct:.2e}, operator clause gap {worst_op:.2e} (limit 1e-2)"),
    )
}

fn s_harmonicity() -> Outcome {
    let datum = OutsideDatum::annulus(1, 2.0, 3.0, 1.0).unwrap();
    let pe = Arc::new(PoissonExtension::converged(datum, 1.5, 1e-9).unwrap());
    let points: Vec<Vec<f64>> = [-0.8, -0.4, 0.0, 0.4, 0.8].iter().map(|&v| vec![v]).collect();
    let report = verify_sharmonic(pe, 2, &points, &cfg(1e-5)).unwrap();
    outcome(
        report.ratio <= 1e-3,
        format!("max |L u| / max |u| = {:.2e} (limit 1e-3)", report.ratio),
    )
}

fn moment_integral() -> Outcome {
    let mut worst: f64 = 0.0;
    for (dim, alphas) in [(1u32, vec![vec![2u32]]), (2, vec![vec![2, 0], vec![1, 1]])] {
        for alpha in alphas {
            for s in [0.5, 1.3, 1.9] {
                let formula = moment_ball_integral(dim, 2, s, &alpha).unwrap();
                let quad = ball_moment_quadrature(dim, s, &alpha);
                worst = worst.max((formula - quad).abs() / quad.abs());
            }
        }
    }
    let mut worst_limit: f64 = 0.0;
    for (dim, alpha) in [(1u32, vec![2u32]), (2, vec![2, 0]), (2, vec![1, 1])] {
        let probe = moment_limit_probe(dim, 2, 2.0 - 1e-4, &alpha).unwrap();
        let target = moment_limit_target(2, &alpha);
        worst_limit = worst_limit.max((probe - target).abs() / target.abs());
    }
    outcome(
        worst <= 1e-6 && worst_limit <= 1e-3,
        format!("formula gap {worst:.2e} (limit 1e-6), s -> m limit gap {worst_limit:.2e} (limit 1e-3)"),
    )
}

/// `int_{B_1} y^{2 alpha} / |y|^{N+2s}` for `|alpha| = 2` in polar coordinates.
fn ball_moment_quadrature(dim: u32, s: f64, alpha: &[u32]) -> f64 {
    let radial = common::tanh_sinh(|r| r.powf(3.0 - 2.0 * s), 0.0, 1.0, 1e-13);
    let angular = match dim {
        1 => 2.0,
        _ => common::tanh_sinh(
            |t| t.cos().powi(2 * alpha[0] as i32) * t.sin().powi(2 * alpha[1] as i32),
            0.0,
            2.0 * std::f64::consts::PI,
            1e-13,
        ),
    };
    radial * angular
}

fn main() {
    let criteria: Vec<(&str, Duration, fn() -> Outcome)> = vec![
        ("exact identities", Duration::from_secs(5), exact_identities),
        ("constant cross-validation", Duration::from_secs(60), constant_cross_validation),
        ("closed-form integral", Duration::from_secs(10), closed_form_vs_quadrature),
        ("fourier symbol", Duration::from_secs(120), fourier_symbol),
        ("order reduction", Duration::MAX, order_reduction),
        ("limits in s", Duration::MAX, limits),
        ("integer collapse", Duration::MAX, integer_collapse),
        ("constant limits", Duration::MAX, constant_limits_check),
        ("energy equivalence", Duration::from_secs(120), energy_equivalence),
        ("s-harmonicity", Duration::from_secs(300), s_harmonicity),
        ("moment integral", Duration::MAX, moment_integral),
    ];
    let mut failures = 0;
    for (i, (name, budget, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let elapsed = start.elapsed();
        let in_time = elapsed <= budget;
        let passed = out.passed && in_time;
        if !passed {
            failures += 1;
        }
        let budget_note = if budget == Duration::MAX {
            String::new()
        } else {
            format!(", budget {} s", budget.as_secs())
        };
        println!(
            "{} {:>2} {name}: {}; {:.2} s{budget_note}",
            if passed { "PASS" } else { "FAIL" },
            i + 1,
            out.detail,
            elapsed.as_secs_f64()
        );
    }
    println!("{} of 11 criteria passed", 11 - failures);
    if failures > 0 {
        std::process::exit(1);
    }
}
