use std::f64::consts::PI;

use proptest::prelude::*;
use wco_core::series::{coeffs_from_samples, extract, Extraction};
use wco_core::{Complex64, Series};

fn coeff() -> impl Strategy<Value = Complex64> {
    (-2.0f64..2.0, -2.0f64..2.0).prop_map(|(re, im)| Complex64::new(re, im))
}

fn poly(max_len: usize) -> impl Strategy<Value = Series> {
    prop::collection::vec(coeff(), 1..max_len).prop_map(|c| Series::new(c).unwrap())
}

fn disc_point() -> impl Strategy<Value = Complex64> {
    (0.0f64..0.95, 0.0f64..2.0 * PI).prop_map(|(r, t)| Complex64::from_polar(r, t))
}

fn rel(a: &Series, b: &Series) -> f64 {
    a.max_abs_diff(b) / a.l2_norm().max(b.l2_norm()).max(1.0)
}

proptest! {
    #[test]
    fn product_commutes(f in poly(20), g in poly(20), n in 0usize..40) {
        prop_assert!(rel(&f.mul_trunc(&g, n), &g.mul_trunc(&f, n)) < 1e-12);
    }

    #[test]
    fn product_associates(f in poly(12), g in poly(12), h in poly(12), n in 0usize..40) {
        let a = f.mul_trunc(&g, n).mul_trunc(&h, n);
        let b = f.mul_trunc(&g.mul_trunc(&h, n), n);
        prop_assert!(rel(&a, &b) < 1e-12);
    }

    #[test]
    fn product_evaluates_pointwise(f in poly(15), g in poly(15), z in disc_point()) {
        let n = f.degree() + g.degree();
        let lhs = f.mul_trunc(&g, n).eval(z);
        let rhs = f.eval(z) * g.eval(z);
        prop_assert!((lhs - rhs).norm() <= 1e-12 * rhs.norm().max(1.0));
    }

    #[test]
    fn extraction_reproduces_polynomials(f in poly(40)) {
        let n = f.order();
        let m = (4 * (n + 1)).next_power_of_two();
        let got = coeffs_from_samples(|z| f.eval(z), 0.9, n, m).unwrap();
        prop_assert!(got.max_abs_diff(&f) < 1e-10);
    }

    #[test]
    fn derivative_undoes_antiderivative(f in poly(30)) {
        let mut c = f.coeffs().to_vec();
        c[0] = Complex64::new(0.0, 0.0);
        let g = Series::new(c).unwrap();
        let back = g.derivative().antiderivative();
        prop_assert!(back.max_abs_diff(&g) < 1e-13);
    }

    #[test]
    fn reciprocal_is_inverse(f in poly(10)) {
        prop_assume!(f.coeff(0).norm() > 0.5);
        let n = 24;
        let r = f.reciprocal(n).unwrap();
        let one = f.mul_trunc(&r, n);
        // coefficients of 1/f can grow; compare relative to their size
        let scale = r.coeffs().iter().map(|c| c.norm()).fold(1.0, f64::max) * f.l2_norm();
        prop_assert!(one.max_abs_diff(&Series::one(n)) <= 1e-12 * scale);
    }

    #[test]
    fn linear_factors_round_trip(f in poly(30), root in disc_point()) {
        // (z − w)/(1 − w̄ z) has its pole outside the disc
        let b = -root;
        let g = f.mul_linear(Complex64::new(1.0, 0.0), b)
            .div_linear(-root.conj(), Complex64::new(1.0, 0.0)).unwrap();
        let back = g.mul_linear(-root.conj(), Complex64::new(1.0, 0.0));
        let want = f.mul_linear(Complex64::new(1.0, 0.0), b);
        prop_assert!(back.max_abs_diff(&want) < 1e-10 * want.l2_norm().max(1.0));
    }
}

#[test]
fn derivative_matches_finite_differences() {
    let f = Series::from_real(&[0.3, -1.0, 2.0, 0.5, -0.25, 0.125]).unwrap();
    let df = f.derivative();
    for k in 0..16 {
        let z = Complex64::from_polar(0.6, 0.4 * k as f64);
        let h = 1e-5;
        let fd = (f.eval(z + h) - f.eval(z - h)) / (2.0 * h);
        assert!((fd - df.eval(z)).norm() < 1e-8);
    }
}

#[test]
fn extraction_of_rational_function_matches_recurrence() {
    // 1/(2 − z) = Σ zᵏ/2^{k+1}
    let order = 64;
    let got = extract(|z| 1.0 / (2.0 - z), order, Extraction::default()).unwrap();
    let want = Series::one(order).div_linear(Complex64::new(-1.0, 0.0), Complex64::new(2.0, 0.0)).unwrap();
    assert!(got.max_abs_diff(&want) < 1e-10);
}

#[test]
fn boundary_modulus_bound() {
    let f = Series::from_real(&[1.0, 1.0, 1.0]).unwrap();
    assert!((f.max_abs_on_circle(1.0, 64) - 3.0).abs() < 1e-12);
}
