use morse_spectral::asian::{mean_of_a, HeatKernel, MarketParams, Payoff};
use morse_spectral::mc::{price_asian, sample_a_tau, McConfig, HISTOGRAM_BINS, HISTOGRAM_HI, HISTOGRAM_LO};
use morse_spectral::quadrature::{integrate_finite, QuadratureSpec};

#[test]
fn histogram_follows_the_spectral_density() {
    let (nu, tau) = (-0.6, 0.25);
    let n = 1_000_000u64;
    let s = sample_a_tau(nu, tau, &McConfig::new(n, 128, 5, false).unwrap()).unwrap();
    assert_eq!(s.n, n);
    assert_eq!(s.histogram.counts.len(), HISTOGRAM_BINS);
    assert!((s.mean - mean_of_a(nu, tau)).abs() < 3.0 * s.std_error);

    let hk = HeatKernel::new(nu, tau, &HeatKernel::default_rule()).unwrap();
    let spec = QuadratureSpec::default().with_tolerances(1e-9, 1e-14).with_nodes(16);
    let edges = s.histogram.edges();
    assert_eq!(edges[0], HISTOGRAM_LO);
    assert_eq!(edges[HISTOGRAM_BINS], HISTOGRAM_HI);
    let mut chi2 = 0.0;
    for (i, &observed) in s.histogram.counts.iter().enumerate() {
        let p = integrate_finite(&|a| hk.eval(a).unwrap(), edges[i], edges[i + 1], &spec).unwrap().value;
        let expected = p * n as f64;
        if expected > 5.0 {
            chi2 += (observed as f64 - expected).powi(2) / expected;
        }
    }
    eprintln!("histogram chi2 = {chi2:.1}");
    // 49 degrees of freedom; the threshold is a regression guard
    assert!(chi2 < 120.0, "χ² = {chi2}");
}

#[test]
fn a_tau_concentrates_at_short_times() {
    let s = sample_a_tau(-0.6, 0.01, &McConfig::new(100_000, 64, 3, false).unwrap()).unwrap();
    assert!(s.percentiles[2] < 5.0 * 0.01, "{:?}", s.percentiles);
    assert!(s.percentiles[0] > 0.0);
}

#[test]
fn near_deterministic_dynamics() {
    let m = MarketParams::new(2.0, 2.2, 0.05, 1e-6, 1.0).unwrap();
    let e = price_asian(&m, Payoff::Put, &McConfig::new(10_000, 256, 1, true).unwrap()).unwrap();
    let exact = m.discount() * (m.strike - m.expected_average()).max(0.0);
    assert!((e.mean - exact).abs() < 1e-6, "{} vs {exact}", e.mean);
}

#[test]
fn seed_fixes_the_estimate() {
    let m = MarketParams::new(2.0, 2.0, 0.05, 0.5, 1.0).unwrap();
    let cfg = McConfig::new(20_000, 64, 77, true).unwrap();
    let a = price_asian(&m, Payoff::Put, &cfg).unwrap();
    let b = price_asian(&m, Payoff::Put, &cfg).unwrap();
    assert_eq!(a.mean.to_bits(), b.mean.to_bits());
    assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
    assert_eq!(a.n_effective, 10_000);
    let c = price_asian(&m, Payoff::Put, &McConfig { seed: 78, ..cfg }).unwrap();
    assert_ne!(a.mean.to_bits(), c.mean.to_bits());
}
