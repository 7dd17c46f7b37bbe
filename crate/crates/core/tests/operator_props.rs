use std::f64::consts::PI;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use wco_core::linalg::dense_norm;
use wco_core::series::random_polynomial;
use wco_core::spectra::{eig_cloud, predicted_spectrum, radius_sequence};
use wco_core::wco::{op_norm, Compression};
use wco_core::{Complex64, Moebius, Series, SpaceWeight, Wco};

fn real(c: &[f64]) -> Series {
    Series::from_real(c).unwrap()
}

#[test]
fn section_norms_grow_with_order() {
    let w = Wco::new(real(&[1.0, 0.5]), Moebius::parabolic_normal_form(1.0, 1).unwrap()).unwrap();
    for n in [1u64, 4] {
        let p = w.power(n, 128).unwrap();
        let norms: Vec<f64> = [16, 32, 64, 128]
            .iter()
            .map(|&o| op_norm(&p.compress(SpaceWeight::Dirichlet, o)).unwrap())
            .collect();
        assert!(norms.windows(2).all(|x| x[1] >= x[0] * (1.0 - 1e-12)), "{norms:?}");
    }
}

#[test]
fn op_norm_matches_gram_eigenvalue() {
    // independent route: largest eigenvalue of MᴴM by power iteration on the dense Gram matrix
    let mut rng = StdRng::seed_from_u64(5);
    let n = 50;
    let mut m = faer::Mat::<Complex64>::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            m[(j, k)] = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        }
    }
    let mut v = vec![Complex64::new(1.0, 0.0); n];
    let mut lambda = 0.0;
    for _ in 0..5000 {
        let mv: Vec<Complex64> = (0..n).map(|j| (0..n).map(|k| m[(j, k)] * v[k]).sum()).collect();
        let w: Vec<Complex64> = (0..n).map(|k| (0..n).map(|j| m[(j, k)].conj() * mv[j]).sum()).collect();
        let norm = w.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        lambda = norm / v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        v = w.iter().map(|x| x / norm).collect();
    }
    let want = lambda.sqrt();
    let got = op_norm(&Compression { matrix: m.clone(), space: SpaceWeight::Hardy, order: n - 1 }).unwrap();
    assert!((got - want).abs() < 1e-8 * want);
    assert_eq!(got, dense_norm(&m).unwrap());
}

#[test]
fn scaling_multiplies_eigenvalues() {
    let w = Wco::new(real(&[2.0, 1.0]), Moebius::rotation(1.0)).unwrap();
    let s = Complex64::new(0.0, 3.0);
    let a = eig_cloud(&w.compress(SpaceWeight::Hardy, 64)).unwrap();
    let b = eig_cloud(&w.scaled(s).compress(SpaceWeight::Hardy, 64)).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert!((x * s - y).norm() < 1e-10 * y.norm());
    }
}

#[test]
fn radius_product_of_inverse_pair() {
    let phi = Moebius::disc_automorphism(Complex64::new(0.2, 0.1), 0.9).unwrap();
    let w = Wco::new(real(&[2.0, 1.0]), phi).unwrap();
    let inv = w.formal_inverse(128).unwrap();
    let r = radius_sequence(&w, SpaceWeight::Dirichlet, 128, &[16]).unwrap().limit_guess;
    let ri = radius_sequence(&inv, SpaceWeight::Dirichlet, 128, &[16]).unwrap().limit_guess;
    assert!(r * ri >= 0.8, "{r} {ri}");
}

#[test]
fn inverse_symbol_undoes_the_operator() {
    let phi = Moebius::disc_automorphism(Complex64::new(-0.3, 0.2), 2.0).unwrap();
    let w = Wco::new(real(&[2.0, 0.5, 0.25]), phi).unwrap();
    let inv = w.formal_inverse(256).unwrap();
    let mut rng = StdRng::seed_from_u64(6);
    let f = random_polynomial(&mut rng, 10, 256);
    let back = inv.apply(&w.apply(&f, 256), 256);
    for k in 0..16 {
        let z = Complex64::from_polar(0.5, 2.0 * PI * k as f64 / 16.0);
        assert!((back.eval(z) - f.eval(z)).norm() < 1e-9 * f.l2_norm());
    }
}

#[test]
fn apply_for_general_series_map_matches_sampled_extraction() {
    use wco_core::series::{extract, Extraction};
    let phi = real(&[0.1, 0.5, 0.2]);
    let u = real(&[1.0, -0.5]);
    let w = Wco::new(u.clone(), phi.clone()).unwrap();
    let f = real(&[0.0, 1.0, 0.0, -2.0, 0.5]);
    let got = w.apply(&f, 40);
    let want = extract(|z| u.eval(z) * f.eval(phi.eval(z)), 40, Extraction::default()).unwrap();
    assert!(got.max_abs_diff(&want) < 1e-9);
}

#[test]
fn predicted_model_rejects_general_maps() {
    let w = Wco::composition(real(&[0.0, 0.5, 0.25])).unwrap();
    assert!(predicted_spectrum(&w).is_err());
}
