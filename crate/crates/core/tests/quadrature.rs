use std::sync::Arc;

use morse_spectral::quadrature::{adaptive, gauss_legendre, gaussian_tail_bound, gl_panel, integrate_finite, integrate_semi_infinite, QuadratureSpec};
use morse_spectral::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn spec() -> QuadratureSpec<f64> {
    QuadratureSpec::default()
}

#[test]
fn finite_examples() {
    let r = integrate_finite(&|x: f64| x * x, 0.0, 1.0, &spec()).unwrap();
    assert!((r.value - 1.0 / 3.0).abs() < 1e-12);
    let r = integrate_finite(&f64::sin, 0.0, std::f64::consts::PI, &spec()).unwrap();
    assert!((r.value - 2.0).abs() < 1e-12);
    assert!(r.est_error >= 0.0);
    // endpoint cusp resolved by bisection towards 0
    let s = spec().with_tolerances(1e-10, 1e-12);
    let r = integrate_finite(&|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, &s).unwrap();
    assert!((r.value - 2.0).abs() < 1e-8, "{}", r.value);
    assert!(r.panels_used > 1);
}

#[test]
fn semi_infinite_examples() {
    let s = spec().with_tolerances(1e-12, 1e-13).with_envelope(gaussian_tail_bound(0.0, 0.0, 1.0));
    let r = integrate_semi_infinite(&|p: f64| (-p * p / 2.0).exp(), 0.0, &s).unwrap();
    assert!((r.value - (std::f64::consts::PI / 2.0).sqrt()).abs() < 1e-10, "{}", r.value);
    assert!(r.truncated_at.is_finite() && r.truncated_at > 5.0);

    // ∫_x^∞ p e^{−p} dp = (x+1) e^{−x}
    let s = spec().with_tolerances(1e-12, 1e-13).with_envelope(Arc::new(|x: f64| (x + 1.0) * (-x).exp()));
    let r = integrate_semi_infinite(&|p: f64| p * (-p).exp(), 0.0, &s).unwrap();
    assert!((r.value - 1.0).abs() < 1e-10, "{}", r.value);

    // the same without an envelope, stopping on negligible panels
    let r = integrate_semi_infinite(&|p: f64| p * (-p).exp(), 0.0, &spec()).unwrap();
    assert!((r.value - 1.0).abs() < 1e-10, "{}", r.value);
}

#[test]
fn price_shaped_integrand_matches_fine_grid() {
    let tau = 0.5;
    let g_pi = |p: f64| (-p * p * tau / 2.0).exp() * (std::f64::consts::PI * p).sinh() * (-std::f64::consts::PI * p).exp() * p;
    // composite Simpson, step 1e-4 on [0, 20]; the tail beyond 20 is below e^{−100}
    let n = 200_000;
    let h = 20.0 / n as f64;
    let mut acc = g_pi(0.0) + g_pi(20.0);
    for i in 1..n {
        acc += g_pi(i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    let oracle = acc * h / 3.0;
    let s = spec().with_tolerances(1e-12, 1e-13).with_envelope(gaussian_tail_bound(0.0, 1.0, tau));
    let r = integrate_semi_infinite(&g_pi, 0.0, &s).unwrap();
    assert!((r.value - oracle).abs() < 1e-8, "{} vs {oracle}", r.value);
}

#[test]
fn polynomial_exactness() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in [4usize, 8, 16, 32, 64] {
        let rule = gauss_legendre(n);
        let degree = 2 * n - 1;
        let coeffs: Vec<f64> = (0..=degree).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let poly = |x: f64| coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c);
        let (a, b) = (-0.3f64, 1.1f64);
        let exact: f64 = coeffs.iter().enumerate().map(|(k, &c)| c * (b.powi(k as i32 + 1) - a.powi(k as i32 + 1)) / (k + 1) as f64).sum();
        let scale: f64 = coeffs.iter().enumerate().map(|(k, &c)| (c * (b.abs().powi(k as i32 + 1) + a.abs().powi(k as i32 + 1)) / (k + 1) as f64).abs()).sum();
        let got = gl_panel(&poly, a, b, &rule);
        assert!((got - exact).abs() <= 1e-13 * scale, "n = {n}: {got} vs {exact}");
    }
}

#[test]
fn node_doubling_refines() {
    let g = |x: f64| x.exp() * (5.0 * x).cos();
    let s = QuadratureSpec { max_panels: 1, ..spec() };
    let mut last: Option<(f64, f64)> = None;
    for n in [4usize, 8, 16, 32] {
        let (r, _) = adaptive(&g, &[0.0, 3.0], &s.clone().with_nodes(n)).unwrap();
        if let Some((v, e)) = last {
            assert!(r.est_error < e || (r.value - v).abs() <= s.abs_tol, "n = {n}: {} after {e}", r.est_error);
        }
        last = Some((r.value, r.est_error));
    }
}

#[test]
fn deterministic() {
    let g = |x: f64| (x * 3.0).sin() / (1.0 + x * x);
    let a = integrate_finite(&g, -2.0, 7.0, &spec()).unwrap();
    let b = integrate_finite(&g, -2.0, 7.0, &spec()).unwrap();
    assert_eq!(a.value.to_bits(), b.value.to_bits());
    assert_eq!(a.est_error.to_bits(), b.est_error.to_bits());
}

#[test]
fn failures_are_signalled() {
    let s = QuadratureSpec { max_panels: 3, ..spec() };
    assert!(matches!(integrate_finite(&|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, &s), Err(Error::NoConvergence { .. })));
    assert!(matches!(integrate_semi_infinite(&f64::exp, 0.0, &spec()), Err(Error::MissingEnvelope { .. })));
    assert!(integrate_finite(&f64::exp, 1.0, 0.0, &spec()).is_err());
}
