use proptest::prelude::*;

use hyperfrac::energy::{
    discrete_ibp_check, energy_direct, energy_via_operator, first_difference_ibp_check, EnergyConfig,
};
use hyperfrac::field::{bump, combination, gaussian, parse_field, shifted, Field};
use hyperfrac::spectral::{fourier_energy, UniformGrid};
use hyperfrac::{Error, QuadratureConfig};

fn direct(u: &Field, v: &Field, m: u32, s: f64) -> f64 {
    energy_direct(u.as_ref(), v.as_ref(), m, s, &EnergyConfig::default()).unwrap().value
}

fn fourier(u: &Field, v: &Field, s: f64) -> f64 {
    let gu = UniformGrid::from_field(u.as_ref(), 64.0, 1 << 13).unwrap();
    let gv = UniformGrid::from_field(v.as_ref(), 64.0, 1 << 13).unwrap();
    fourier_energy(&gu, &gv, s).unwrap()
}

#[test]
fn zero_fields_give_zero() {
    let zero = combination(vec![(0.0, bump(1, 1.0))]);
    assert_eq!(direct(&zero, &zero, 1, 0.5), 0.0);
    let r = discrete_ibp_check(bump(1, 1.0).as_ref(), zero.as_ref(), 1, 1, 0.5, &EnergyConfig::default()).unwrap();
    assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
}

#[test]
fn bump_energy_matches_fourier_side() {
    let u = bump(1, 1.0);
    let (d, f) = (direct(&u, &u, 1, 0.5), fourier(&u, &u, 0.5));
    assert!((d - f).abs() <= 1e-2 * f, "{d} vs {f}");
}

#[test]
fn gaussian_bump_energy_matches_both_sides() {
    let u = parse_field("gaussbump:1:2", 1).unwrap();
    let (d, f) = (direct(&u, &u, 2, 1.5), fourier(&u, &u, 1.5));
    assert!((d - f).abs() <= 1e-2 * f, "{d} vs {f}");
    let q = QuadratureConfig { tol: 1e-8, ..QuadratureConfig::default() };
    let op = energy_via_operator(u.as_ref(), u.as_ref(), 3, 1.5, &q, &EnergyConfig::default()).unwrap();
    assert!((op - f).abs() <= 1e-2 * f, "{op} vs {f}");
}

#[test]
fn integration_by_parts_examples() {
    let cfg = EnergyConfig::default();
    let u = bump(1, 1.0);
    let r = discrete_ibp_check(u.as_ref(), u.as_ref(), 1, 1, 0.5, &cfg).unwrap();
    assert!(r.relative_gap <= 1e-2, "{}", r.relative_gap);
    let v = shifted(bump(1, 0.8), vec![0.5]);
    let r = first_difference_ibp_check(u.as_ref(), v.as_ref(), 0.5, &cfg).unwrap();
    assert!(r.relative_gap <= 1e-2, "{}", r.relative_gap);
}

#[test]
fn rejects_bad_input() {
    let cfg = EnergyConfig::default();
    let u = bump(1, 1.0);
    assert!(energy_direct(u.as_ref(), u.as_ref(), 1, 2.0, &cfg).is_err());
    assert!(energy_direct(gaussian(1).as_ref(), u.as_ref(), 1, 0.5, &cfg).is_err());
    let bad = EnergyConfig { grading: 3.0, ..EnergyConfig::default() };
    assert!(matches!(energy_direct(u.as_ref(), u.as_ref(), 1, 0.5, &bad), Err(Error::InvalidConfig(_))));
}

#[test]
fn two_dimensional_smoke() {
    let cfg = EnergyConfig { x_nodes: 8, radial_nodes: 10, max_cell_width: Some(0.5), ..EnergyConfig::default() };
    let u = bump(2, 1.0);
    let d = energy_direct(u.as_ref(), u.as_ref(), 1, 0.5, &cfg).unwrap().value;
    let g = UniformGrid::from_field(u.as_ref(), 16.0, 512).unwrap();
    let f = fourier_energy(&g, &g, 0.5).unwrap();
    assert!((d - f).abs() <= 5e-2 * f, "{d} vs {f}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn symmetric(shift in -1.0f64..1.0, r in 0.5f64..1.5, s in 0.1f64..1.9) {
        let u = bump(1, 1.0);
        let v = shifted(bump(1, r), vec![shift]);
        let (a, b) = (direct(&u, &v, 1, s), direct(&v, &u, 1, s));
        prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(b.abs()));
    }

    #[test]
    fn bilinear(a in -2.0f64..2.0, b in -2.0f64..2.0, width in 0.3f64..2.0, s in 0.1f64..1.9) {
        // equal supports and pinned widths keep the node sets identical
        let u = bump(1, 1.0);
        let v = parse_field(&format!("gaussbump:{width}:1"), 1).unwrap();
        let w = combination(vec![(a, u.clone()), (b, v.clone())]);
        let cfg = EnergyConfig {
            inner_radius: Some(0.01),
            max_panel_width: Some(0.1),
            max_cell_width: Some(0.1),
            ..EnergyConfig::default()
        };
        let e = |f: &Field| energy_direct(f.as_ref(), u.as_ref(), 1, s, &cfg).unwrap().value;
        let (uu, vu) = (a * e(&u), b * e(&v));
        let gap = (e(&w) - uu - vu).abs();
        prop_assert!(gap <= 1e-10 * (uu.abs() + vu.abs()), "{gap:e}");
    }

    #[test]
    fn positive_and_cauchy_schwarz(shift in -2.0f64..2.0, r in 0.5f64..1.5, s in 0.1f64..1.9) {
        let u = bump(1, 1.0);
        let v = shifted(bump(1, r), vec![shift]);
        let cfg = EnergyConfig::default();
        let uu = energy_direct(u.as_ref(), u.as_ref(), 1, s, &cfg).unwrap();
        let vv = energy_direct(v.as_ref(), v.as_ref(), 1, s, &cfg).unwrap();
        let uv = energy_direct(u.as_ref(), v.as_ref(), 1, s, &cfg).unwrap();
        prop_assert!(uu.value > 0.0 && vv.value > 0.0);
        let err = uu.quadrature_error_estimate + vv.quadrature_error_estimate + uv.quadrature_error_estimate;
        prop_assert!(uv.value.abs() <= (uu.value * vv.value).sqrt() + err);
    }
}
