use std::f64::consts::PI;

use proptest::prelude::*;
use wco_core::{AutoKind, Complex64, Moebius};

fn automorphism() -> impl Strategy<Value = Moebius> {
    (0.0f64..0.95, -PI..PI, -PI..PI)
        .prop_map(|(r, a, t)| Moebius::disc_automorphism(Complex64::from_polar(r, a), t).unwrap())
}

fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
    (a - b).norm() <= tol * a.norm().max(1.0)
}

proptest! {
    #[test]
    fn composition_is_pointwise(f in automorphism(), g in automorphism(), t in 0.0f64..2.0 * PI, r in 0.0f64..0.99) {
        let z = Complex64::from_polar(r, t);
        prop_assert!(close(f.compose(&g).eval(z), f.eval(g.eval(z)), 1e-10));
    }

    #[test]
    fn inverse_undoes(f in automorphism(), t in 0.0f64..2.0 * PI, r in 0.0f64..0.99) {
        let z = Complex64::from_polar(r, t);
        prop_assert!(close(f.inverse().eval(f.eval(z)), z, 1e-9));
    }

    #[test]
    fn iterates_keep_kind_and_fixed_points(f in automorphism(), n in 1u64..12) {
        let c = f.classify().unwrap();
        prop_assume!(c.kind != AutoKind::Identity && !c.near_parabolic);
        prop_assume!(c.margin.abs() > 1e-6);
        let it = f.iterate(n);
        prop_assume!(!it.is_identity());
        let ci = it.classify().unwrap();
        if c.kind == AutoKind::Elliptic {
            // a rational rotation can return near the identity
            prop_assume!(ci.kind != AutoKind::Identity);
        }
        prop_assert_eq!(ci.kind, c.kind);
        if c.kind != AutoKind::Elliptic {
            for p in &c.fixed_points {
                prop_assert!(ci.fixed_points.iter().any(|q| (p - q).norm() < 1e-9));
            }
        }
    }

    #[test]
    fn derivative_sup_bounds_boundary_samples(f in automorphism()) {
        let sup = f.derivative_sup(512).unwrap();
        let grid = f.derivative_grid_max(4096);
        prop_assert!(grid <= sup * (1.0 + 1e-9));
        prop_assert!(grid >= sup * 0.9);
    }
}

#[test]
fn hyperbolic_derivative_growth_is_geometric() {
    let mu = 0.5;
    for j in 1..=40u64 {
        let psi = Moebius::hyperbolic_normal_form(mu, j).unwrap();
        let normalized = psi.derivative_sup(0).unwrap() * mu.powi(j as i32);
        assert!((0.5..=2.0).contains(&normalized), "j={j}: {normalized}");
    }
}

#[test]
fn matrix_powers_match_closed_forms() {
    let pts = [Complex64::new(0.1, 0.2), Complex64::new(-0.9, 0.0), Complex64::from_polar(1.0, 2.0)];
    let p1 = Moebius::parabolic_normal_form(0.7, 1).unwrap();
    let h1 = Moebius::hyperbolic_normal_form(0.6, 1).unwrap();
    for n in [1u64, 2, 7, 20, 33] {
        let pn = Moebius::parabolic_normal_form(0.7, n).unwrap();
        let hn = Moebius::hyperbolic_normal_form(0.6, n).unwrap();
        for &z in &pts {
            assert!(close(p1.iterate(n).eval(z), pn.eval(z), 1e-11));
            assert!(close(h1.iterate(n).eval(z), hn.eval(z), 1e-11));
        }
    }
}

#[test]
fn canonical_conjugates_are_conjugate() {
    for (p, t) in [(0.3, 0.5), (0.9, 0.2), (0.2, 2.5)] {
        let m = Moebius::disc_automorphism(Complex64::new(p, 0.1), t).unwrap();
        let (canon, g) = m.conjugate_to_canonical().unwrap();
        assert!(canon.approx_eq(&m.conjugate_by(&g), 1e-12));
        assert_eq!(canon.classify().unwrap().kind, m.classify().unwrap().kind);
    }
}
