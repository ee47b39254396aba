use num_complex::Complex64;

use nanobec::error::Error;
use nanobec::quadrature::*;

#[test]
fn gauss_legendre_integrates_polynomials_exactly() {
    for n in [1, 2, 5, 16, 32, 64] {
        let (x, w) = gauss_legendre(n);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
        for k in 0..(2 * n) {
            let exact = if k % 2 == 0 {
                2.0 / (k as f64 + 1.0)
            } else {
                0.0
            };
            let approx: f64 = x
                .iter()
                .zip(&w)
                .map(|(xi, wi)| wi * xi.powi(k as i32))
                .sum();
            assert!(
                (approx - exact).abs() < 1e-12,
                "n={n} k={k}: {approx} vs {exact}"
            );
        }
    }
}

#[test]
fn adaptive_gk_handles_sqrt_endpoint() {
    // ∫_0^1 x sqrt(1-x) dx = 4/15
    let est = integrate(
        |x: f64| x * (1.0 - x).max(0.0).sqrt(),
        &[(0.0, 1.0)],
        Tolerance::relative(1e-12),
        "test",
    )
    .unwrap();
    assert!((est.value - 4.0 / 15.0).abs() < 1e-12);
}

#[test]
fn adaptive_gk_complex_lorentzian() {
    // ∫_{-1}^{1} dx / (x - i eps) = 2i atan(1/eps)
    let eps = 1e-4;
    let est = integrate(
        |x: f64| Complex64::new(1.0, 0.0) / Complex64::new(x, -eps),
        &[(-1.0, 1.0)],
        Tolerance::relative(1e-10),
        "test",
    )
    .unwrap();
    let exact = Complex64::new(0.0, 2.0 * (1.0 / eps).atan());
    assert!((est.value - exact).norm() < 1e-9 * exact.norm());
}

#[test]
fn nonconvergence_reports_diagnostics() {
    let err = integrate(
        |x: f64| 1.0 / x.abs().sqrt().max(1e-300) / x.abs().max(1e-300).powf(0.6),
        &[(-1.0, 1.0)],
        Tolerance {
            abs: 0.0,
            rel: 1e-14,
            max_intervals: 20,
        },
        "divergent",
    )
    .unwrap_err();
    match err {
        Error::NonConvergence { context, .. } => {
            assert_eq!(context, "divergent");
        }
        other => panic!("unexpected error {other}"),
    }
}

#[test]
fn adaptive_gauss_legendre_matches_closed_form() {
    let v = adaptive_gauss_legendre(&|x: f64| (3.0 * x).cos(), 0.0, 2.0, 16, 1e-12, 30);
    assert!((v - (6.0f64).sin() / 3.0).abs() < 1e-13);
}

#[test]
fn pairwise_sum_is_order_stable() {
    let v: Vec<f64> = (0..1000).map(|i| 1.0 / (i as f64 + 1.0)).collect();
    assert_eq!(pairwise_sum(&v), pairwise_sum(&v.clone()));
    let direct: f64 = v.iter().sum();
    assert!((pairwise_sum(&v) - direct).abs() < 1e-12);
}
