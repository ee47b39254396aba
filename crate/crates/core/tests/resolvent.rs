use std::f64::consts::PI;

use num_complex::Complex64;

use nanobec::coupling::CouplingDensity;
use nanobec::error::Error;
use nanobec::resolvent::*;

const W: f64 = 43_187.566;

fn tf(weight: f64) -> LevelShift {
    LevelShift::new(CouplingDensity::thomas_fermi(W, weight).unwrap(), 0.0).unwrap()
}

fn tabulated(weight: f64) -> LevelShift {
    let d = CouplingDensity::thomas_fermi(W, weight).unwrap();
    let vals = (0..513).map(|i| d.value(W * i as f64 / 512.0)).collect();
    LevelShift::new(CouplingDensity::tabulated(W, vals).unwrap(), 0.0).unwrap()
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re * W, im * W)
}

#[test]
fn principal_value_at_two_thirds() {
    // Brute-force scipy oracle: P∫₀¹ (15/4) y √(1−y) / (2/3 − y) dy.
    let k = tf_cauchy(Complex64::new(2.0 / 3.0, 0.0));
    assert!((k.re - 0.599_135_0).abs() < 1e-7);
    assert!((k.im + PI * 5.0 / (2.0 * 3f64.sqrt())).abs() < 1e-12);
}

#[test]
fn analytic_forms_match_subtraction_quadrature() {
    for ls in [tf(2.5e4), tabulated(2.5e4)] {
        let quad = ls.clone().with_method(Method::Quadrature);
        for z in [
            c(0.3, 0.2),
            c(0.7, -0.05),
            c(-0.4, 0.01),
            c(1.5, 0.3),
            c(0.5, 0.0),
            c(0.91, 1e-4),
            c(12.0, -3.0),
        ] {
            let (a, b) = (
                ls.cauchy_integral(z).unwrap(),
                quad.cauchy_integral(z).unwrap(),
            );
            assert!((a - b).norm() < 1e-8 * b.norm(), "{z}: {a} vs {b}");
            let (a, b) = (
                ls.cauchy_derivative(z).unwrap(),
                quad.cauchy_derivative(z)
                    .unwrap_or_else(|e| panic!("{z} {e:?}")),
            );
            assert!((a - b).norm() < 1e-7 * b.norm(), "{z}: {a} vs {b}");
        }
    }
}

#[test]
fn derivative_matches_finite_difference() {
    for ls in [tf(1.0), tabulated(1.0)] {
        for z in [c(0.3, 0.2), c(0.66, 0.01), c(-0.2, 0.4), c(5.0, 1.0)] {
            let h = 1e-5 * W;
            let fd = (ls.level_shift(z + h).unwrap() - ls.level_shift(z - h).unwrap()) / (2.0 * h);
            let d = ls.derivative(z).unwrap();
            assert!((fd - d).norm() < 1e-6 * d.norm(), "{z}");
        }
    }
}

#[test]
fn zero_density_gives_zero_shift() {
    let ls = tf(0.0);
    assert_eq!(
        ls.level_shift(c(0.4, 0.1)).unwrap(),
        Complex64::new(0.0, 0.0)
    );
    assert_eq!(
        ls.derivative(c(0.4, 0.0)).unwrap(),
        Complex64::new(0.0, 0.0)
    );
}

#[test]
fn on_axis_is_the_limit_from_above() {
    for ls in [tf(3e4), tabulated(3e4)] {
        for x in [0.05, 0.3, 0.6667, 0.95] {
            let on = ls.level_shift_on_axis(x * W).unwrap();
            assert!((on.im + PI * ls.density().value(x * W)).abs() < 1e-12 * on.norm());
            let at = |e: f64| ls.level_shift(c(x, e)).unwrap();
            // Richardson on ε = 1e-3, 1e-4 with linear leading error.
            let extrap = (10.0 * at(1e-4) - at(1e-3)) / 9.0;
            assert!(
                (extrap - on).norm() < 1e-4 * on.norm(),
                "{x}: {extrap} vs {on}"
            );
        }
        let outside = ls.level_shift_on_axis(1.3 * W).unwrap();
        assert_eq!(outside.im, 0.0);
    }
}

#[test]
fn jump_across_cut() {
    for ls in [tf(3e4), tabulated(3e4)] {
        let x = 2.0 / 3.0 * W;
        let jump = ls.branch_cut_jump(x).unwrap();
        let expected = -2.0 * PI * ls.density().value(x);
        assert!((jump - expected).abs() < 1e-10 * expected.abs());
        assert_eq!(ls.branch_cut_jump(1.2 * W).unwrap(), 0.0);
        // Finite offsets on both sides approach the same jump.
        let eps = ls.eps_cut();
        let above = ls.cauchy_integral(Complex64::new(x, eps)).unwrap();
        let below = ls.cauchy_integral(Complex64::new(x, -eps)).unwrap();
        assert!((above.im - below.im - expected).abs() < 1e-2 * expected.abs());
    }
}

#[test]
fn asymptotic_weight() {
    for ls in [tf(3e4), tabulated(3e4)] {
        let w2 = ls.density().total_weight();
        for r in [10.0, 100.0, 1000.0] {
            let z = Complex64::from_polar(r * W, 0.7);
            let k = ls.level_shift(z).unwrap();
            assert!((z * k - w2).norm() <= 1.0 * w2 * W / z.norm());
        }
    }
}

#[test]
fn below_cut_is_rejected_and_gamma_shifts_domain() {
    assert!(matches!(
        tf(1.0).level_shift(c(0.5, -0.01)),
        Err(Error::BelowCut { .. })
    ));
    let ls = LevelShift::new(CouplingDensity::thomas_fermi(W, 1.0).unwrap(), 0.1 * W).unwrap();
    let a = ls.level_shift(c(0.5, -0.05)).unwrap();
    let b = tf(1.0).level_shift(c(0.5, 0.05)).unwrap();
    assert!((a - b).norm() < 1e-14 * b.norm());
}

#[test]
fn lorentzian_is_a_single_pole() {
    let d = CouplingDensity::lorentzian(0.4 * W, 0.05 * W, 7.0, W).unwrap();
    let ls = LevelShift::new(d.clone(), 0.0).unwrap();
    let on = ls.level_shift_on_axis(0.43 * W).unwrap();
    assert!((on.im + PI * d.value(0.43 * W)).abs() < 1e-12 * on.norm());
    let jump = ls.branch_cut_jump(0.43 * W).unwrap();
    assert!((jump + 2.0 * PI * d.value(0.43 * W)).abs() < 1e-4 * jump.abs());
}

#[test]
fn propagator_inverts_characteristic() {
    let p = Propagator::new(tf(4e4), 0.6 * W, 5.0).unwrap();
    for z in [c(0.2, 0.1), c(0.9, 0.0), c(-3.0, 2.0)] {
        let s = p.forward_propagator(z).unwrap();
        assert!((s.value * s.characteristic - 1.0).norm() < 1e-14);
    }
    let free = Propagator::new(tf(0.0), 0.6 * W, 5.0).unwrap();
    let z = c(0.3, 0.2);
    let g = free.forward_propagator(z).unwrap().value;
    assert!((g - 1.0 / (z - 0.6 * W + Complex64::new(0.0, 5.0))).norm() < 1e-15 * g.norm());
    let far = c(400.0, 300.0);
    assert!((far * p.forward_propagator(far).unwrap().value - 1.0).norm() < 1e-2);
}

#[test]
fn surface_has_cut_only_on_support() {
    let ls = tf(3e4);
    let pts = ls
        .surface((-0.5 * W, 1.5 * W, 9), (-0.5 * W, 0.5 * W, 5))
        .unwrap();
    assert_eq!(pts.len(), 45);
    let at = |re: f64, im: f64| {
        pts.iter()
            .find(|p| (p.z.re - re * W).abs() < 1e-6 && (p.z.im - im * W).abs() < 1e-6)
            .unwrap()
            .k
    };
    assert!(at(0.5, 0.25).im < 0.0 && at(0.5, -0.25).im > 0.0);
    assert!((at(0.5, 0.25).re - at(0.5, -0.25).re).abs() < 1e-12 * at(0.5, 0.25).norm());
}

proptest::proptest! {
    #[test]
    fn level_shift_is_linear_in_density(
        re in -1.0f64..2.0, im in 0.0f64..1.0, a in 0.1f64..10.0, b in 0.1f64..10.0,
    ) {
        let z = c(re, im);
        let d1 = CouplingDensity::thomas_fermi(W, 1.0).unwrap();
        let d2 = CouplingDensity::lorentzian(0.3 * W, 0.1 * W, 1.0, W).unwrap();
        let k1 = LevelShift::new(d1.with_total_weight(a).unwrap(), 0.0).unwrap().level_shift(z).unwrap();
        let k2 = LevelShift::new(d2.with_total_weight(b).unwrap(), 0.0).unwrap().level_shift(z).unwrap();
        let u1 = LevelShift::new(d1, 0.0).unwrap().level_shift(z).unwrap();
        let u2 = LevelShift::new(d2, 0.0).unwrap().level_shift(z).unwrap();
        let mix = u1 * a + u2 * b;
        proptest::prop_assert!((k1 + k2 - mix).norm() <= 1e-10 * mix.norm());
    }
}
