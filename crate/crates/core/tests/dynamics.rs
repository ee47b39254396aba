use nanobec::coupling::CouplingDensity;
use nanobec::dynamics::*;
use nanobec::resolvent::{LevelShift, Propagator};
use num_complex::Complex64;
use proptest::prelude::*;

const W: f64 = 43_187.566;
/// Paper damping ω_nw/Q.
const KAPPA: f64 = 5.026_548_245_743_669;
/// P∫ρ̄(y)/(2/3 − y)dy for the closed form, from an independent scipy quadrature.
const PV_ORACLE: f64 = 0.599_135_0;

fn tf() -> CouplingDensity {
    CouplingDensity::thomas_fermi(W, 1.0).unwrap()
}

fn propagator(
    density: &CouplingDensity,
    omega: f64,
    gamma: f64,
    delta: f64,
    kappa: f64,
) -> Propagator {
    let ls = LevelShift::new(density.with_total_weight(omega * omega).unwrap(), gamma).unwrap();
    Propagator::new(ls, delta, kappa).unwrap()
}

fn poles(p: &Propagator) -> PoleSet {
    find_poles(p, &SearchRect::around(p)).unwrap()
}

#[test]
fn closed_form_threshold_coefficients() {
    let r = threshold_report(&tf(), KAPPA).unwrap();
    let c = 2.0 * 3f64.sqrt() / (5.0 * std::f64::consts::PI);
    assert!((r.omega_coefficient - c).abs() < 1e-12);
    assert!((r.omega_th * r.omega_th / (KAPPA * W) - c).abs() < 1e-12);
    assert!((r.omega_th / 219.0 - 1.0).abs() < 0.02, "{}", r.omega_th);
    assert!((r.x_max - 2.0 / 3.0).abs() < 1e-9);
    assert!((r.principal_value - PV_ORACLE).abs() < 1e-7);
    assert!(
        (r.detuning_coefficient - PV_ORACLE / (std::f64::consts::PI * 5.0 / (2.0 * 3f64.sqrt())))
            .abs()
            < 1e-7
    );
    assert!((r.delta_th - (2.0 / 3.0 * W + r.detuning_coefficient * KAPPA)).abs() < 1e-6);
}

#[test]
fn zero_damping_has_zero_threshold() {
    let bar = tf().dimensionless().unwrap();
    assert_eq!(threshold_omega(&bar, 0.0, W).unwrap(), 0.0);
    let d = threshold_detuning(&bar, 0.0, 0.0, W).unwrap();
    assert!((d - 2.0 / 3.0 * W).abs() < 1e-9 * W);
    assert!(threshold_omega(&bar, -1.0, W).is_err());
}

#[test]
fn symmetric_density_has_no_principal_value_shift() {
    let (lo, hi) = (0.2 * W, 0.8 * W);
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    let norm = 3.0 / (4.0 * h);
    let d = CouplingDensity::custom(
        (lo, hi),
        std::sync::Arc::new(move |w: f64| norm * (1.0 - ((w - c) / h).powi(2)).max(0.0)),
        std::sync::Arc::new(move |w: f64| {
            if (w - c).abs() < h {
                -2.0 * norm * (w - c) / (h * h)
            } else {
                0.0
            }
        }),
        1.0,
        W,
    )
    .unwrap();
    let r = threshold_report(&d, 0.05 * W).unwrap();
    // A flat maximum is only located to about √ε.
    assert!((r.x_max - 0.5).abs() < 1e-7);
    assert!(r.principal_value.abs() < 1e-6);
    assert!((r.delta_th - c).abs() < 1e-6 * W);
}

#[test]
fn uncoupled_lossy_mode_has_no_poles() {
    for delta in [-0.3 * W, 0.2 * W, 0.9 * W, 3.0 * W] {
        let p = propagator(&tf(), 0.0, 0.0, delta, KAPPA);
        assert!(poles(&p).is_empty());
    }
}

#[test]
fn marginal_pole_at_threshold() {
    for kappa in [KAPPA, 0.1 * W] {
        let r = threshold_report(&tf(), kappa).unwrap();
        let set = poles(&propagator(&tf(), r.omega_th, 0.0, r.delta_th, kappa));
        let dom = set.dominant(r.delta_th).expect("marginal root");
        assert!(dom.z.im.abs() <= 1e-3 * kappa, "{:?}", dom.z);
        assert!((dom.z.re - 2.0 / 3.0 * W).abs() < 1e-6 * W);
    }
}

#[test]
fn single_growing_pole_above_threshold() {
    let r = threshold_report(&tf(), KAPPA).unwrap();
    let p = propagator(&tf(), 1.05 * r.omega_th, 0.0, r.delta_th, KAPPA);
    let set = poles(&p);
    assert_eq!(set.poles.len(), 1);
    let z = set.poles[0].z;
    assert!(z.im > 0.0 && z.im < 0.2 * KAPPA, "{z}");
}

#[test]
fn lossless_wire_is_always_marginal_or_growing() {
    let delta = 2.0 / 3.0 * W;
    for omega in [10.0, 200.0, 2000.0, 20_000.0] {
        let set = poles(&propagator(&tf(), omega, 0.0, delta, 0.0));
        assert!(set.max_growth().unwrap() >= 0.0, "Ω = {omega}");
    }
}

#[test]
fn poles_satisfy_characteristic_equation_and_residue_formula() {
    let r = threshold_report(&tf(), 0.1 * W).unwrap();
    for (f, d) in [(1.3, r.delta_th), (2.0, 0.5 * W), (5.0, 0.9 * W)] {
        let p = propagator(&tf(), f * r.omega_th, 0.0, d, 0.1 * W);
        for pole in poles(&p).poles {
            let f = p.characteristic(pole.z).unwrap();
            assert!(f.norm() < RESIDUAL_TOL * W);
            assert!(pole.z.im >= 0.0);
            let dk = p.level_shift.derivative(pole.z).unwrap();
            assert!((pole.residue - 1.0 / (1.0 + dk)).norm() < 1e-12);
        }
    }
}

#[test]
fn tabulated_density_gives_the_same_poles() {
    let d = tf();
    let vals = (0..513).map(|i| d.value(W * i as f64 / 512.0)).collect();
    let tab = CouplingDensity::tabulated(W, vals).unwrap();
    let r = threshold_report(&d, 0.1 * W).unwrap();
    let a = poles(&propagator(&d, 1.2 * r.omega_th, 0.0, r.delta_th, 0.1 * W));
    let b = poles(&propagator(
        &tab,
        1.2 * r.omega_th,
        0.0,
        r.delta_th,
        0.1 * W,
    ));
    assert_eq!(a.poles.len(), b.poles.len());
    for (x, y) in a.poles.iter().zip(&b.poles) {
        assert!((x.z - y.z).norm() < 1e-4 * W, "{} vs {}", x.z, y.z);
    }
}

#[test]
fn exact_threshold_matches_analytic_for_zero_gamma() {
    let r = threshold_report(&tf(), KAPPA).unwrap();
    let e = threshold_exact(&tf(), 0.0, KAPPA).unwrap();
    assert!((e.omega_th / r.omega_th - 1.0).abs() < 1e-2);
    assert!((e.delta_th - r.delta_th).abs() < 1e-2 * KAPPA);
    let pole = e.pole.expect("marginal root");
    assert!(pole.z.im.abs() <= 1e-3 * KAPPA);
}

#[test]
fn lorentzian_threshold_is_kappa_gamma() {
    let (center, width) = (0.4 * W, 0.05 * W);
    let d = CouplingDensity::lorentzian(center, width, 1.0, W).unwrap();
    let kappa = 0.01 * W;
    let e = threshold_exact(&d, 0.0, kappa).unwrap();
    assert!((e.omega_th * e.omega_th / (kappa * width) - 1.0).abs() < 1e-2);
    assert!((e.delta_th - center).abs() < 1e-6 * W);
    // A cut offset broadens the Lorentzian to Γ + γ.
    let gamma = 0.02 * W;
    let g = threshold_exact(&d, gamma, kappa).unwrap();
    assert!((g.omega_th * g.omega_th / (kappa * (width + gamma)) - 1.0).abs() < 1e-6);
}

#[test]
fn finite_gamma_raises_the_threshold() {
    let kappa = 0.1 * W;
    let analytic = threshold_report(&tf(), kappa).unwrap().omega_th;
    let e = threshold_exact(&tf(), 0.5 * W, kappa).unwrap();
    assert!(
        e.omega_th > 1.1 * analytic,
        "{} vs {}",
        e.omega_th,
        analytic
    );
    assert!(e.pole.unwrap().z.im.abs() <= 1e-3 * kappa);
}

#[test]
fn optimum_growth_matches_a_detuning_scan() {
    let kappa = 0.1 * W;
    let r = threshold_report(&tf(), kappa).unwrap();
    let scan = ThresholdScan::new(&tf(), 0.0).unwrap();
    let omega = 1.3 * r.omega_th;
    let best = scan.optimum(omega, kappa).unwrap();
    let at = poles(&propagator(&tf(), omega, 0.0, best.detuning, kappa))
        .max_growth()
        .unwrap();
    assert!((at / best.growth - 1.0).abs() < 1e-6);
    for k in -5..=5 {
        let d = best.detuning + k as f64 * 0.01 * W;
        let g = poles(&propagator(&tf(), omega, 0.0, d, kappa))
            .max_growth()
            .unwrap_or(f64::NEG_INFINITY);
        assert!(g <= best.growth * (1.0 + 1e-9));
    }
    let below = scan.optimum(0.9 * r.omega_th, kappa).unwrap();
    assert!(below.growth < 0.0);
}

#[test]
fn gain_map_structure() {
    let kappa = 0.1 * W;
    let r = threshold_report(&tf(), kappa).unwrap();
    let omegas: Vec<f64> = (0..11)
        .map(|i| r.omega_th * (0.5 + 0.1 * i as f64))
        .collect();
    let mut with_zero = vec![0.0];
    with_zero.extend(&omegas);
    let detunings: Vec<f64> = (0..7)
        .map(|j| r.delta_th + (j as f64 - 3.0) * 0.02 * W)
        .collect();
    let map = gain_map(&tf(), 0.0, kappa, &with_zero, &detunings).unwrap();
    assert_eq!(map.failures(), 0);
    for j in 0..detunings.len() {
        assert!(map.gain(0, j) <= 0.0);
    }
    // Ω_th sits at index 6 (factor 1.0); the sign changes there along Δ_th.
    assert!(map.gain(5, 3) < 0.0 && map.gain(7, 3) > 0.0);
    assert!(map.gain(6, 3).abs() <= 1e-3 * kappa);
    for j in 0..detunings.len() {
        for i in 1..with_zero.len() - 1 {
            assert!(
                map.gain(i + 1, j) >= map.gain(i, j) - 1e-9 * W,
                "({i}, {j})"
            );
        }
    }
}

#[test]
fn gain_map_is_deterministic() {
    let kappa = 0.1 * W;
    let r = threshold_report(&tf(), kappa).unwrap();
    let o = [0.8 * r.omega_th, 1.2 * r.omega_th];
    let d = [0.6 * W, r.delta_th];
    let a = gain_map(&tf(), 0.0, kappa, &o, &d).unwrap();
    let b = gain_map(&tf(), 0.0, kappa, &o, &d).unwrap();
    assert_eq!(a.cells, b.cells);
}

#[test]
fn uncoupled_trace_is_exponential_decay() {
    let kappa = 0.1 * W;
    let p = propagator(&tf(), 0.0, 0.0, 0.6 * W, kappa);
    let tr = propagator_time(&p, &poles(&p), &time_grid(40.0 / W, 201)).unwrap();
    for (t, g) in tr.times.iter().zip(&tr.values) {
        assert!((g.norm() - (-kappa * t).exp()).abs() < 1e-6);
    }
    assert!((tr.growth_rate + kappa).abs() < 1e-6 * kappa);
}

#[test]
fn trace_starts_at_unity_and_grows_at_the_pole_rate() {
    let kappa = 0.1 * W;
    let r = threshold_report(&tf(), kappa).unwrap();
    let p = propagator(&tf(), 1.05 * r.omega_th, 0.0, r.delta_th, kappa);
    let set = poles(&p);
    let tr = propagator_time(&p, &set, &time_grid(200.0 / W, 801)).unwrap();
    assert!((tr.values[0].norm() - 1.0).abs() < 1e-2);
    let g = set.max_growth().unwrap();
    assert!(
        (tr.growth_rate / g - 1.0).abs() < 1e-2,
        "{} vs {}",
        tr.growth_rate,
        g
    );
    assert!(tr.warnings.is_empty(), "{:?}", tr.warnings);
}

#[test]
fn slope_over_twenty_to_forty_inverse_bandwidths() {
    let kappa = 0.3 * W;
    let r = threshold_report(&tf(), kappa).unwrap();
    let times: Vec<f64> = (0..=60).map(|i| (i as f64) / W).collect();
    for f in [1.2, 1.5] {
        let p = propagator(&tf(), f * r.omega_th, 0.0, r.delta_th, kappa);
        let set = poles(&p);
        let tr = propagator_time(&p, &set, &times[20..=40]).unwrap();
        let all: Vec<f64> = tr.times.clone();
        let lg: Vec<f64> = tr.magnitudes().iter().map(|v| v.ln()).collect();
        let slope = (lg[lg.len() - 1] - lg[0]) / (all[all.len() - 1] - all[0]);
        let g = set.max_growth().unwrap();
        assert!((slope / g - 1.0).abs() < 1e-2, "f = {f}: {slope} vs {g}");
    }
    // Weak coupling, no root: the trace decays at least at κ/2.
    let kappa = 0.05 * W;
    let r = threshold_report(&tf(), kappa).unwrap();
    let p = propagator(&tf(), 0.3 * r.omega_th, 0.0, r.delta_th, kappa);
    let set = poles(&p);
    assert!(set.is_empty());
    let tr = propagator_time(&p, &set, &times[20..=40]).unwrap();
    let m = tr.magnitudes();
    let slope = (m[m.len() - 1].ln() - m[0].ln()) / (20.0 / W);
    assert!(slope <= -kappa / 2.0, "{slope}");
}

#[test]
fn trace_rejects_bad_grids() {
    let p = propagator(&tf(), 100.0, 0.0, 0.5 * W, KAPPA);
    let set = poles(&p);
    assert!(propagator_time(&p, &set, &[0.0, 1.0]).is_err());
    assert!(propagator_time(&p, &set, &[0.0, -1.0, 2.0]).is_err());
}

#[test]
fn search_rect_validation() {
    let p = propagator(&tf(), 100.0, 0.0, 0.5 * W, KAPPA);
    let mut r = SearchRect::around(&p);
    r.im_min = -1.0;
    assert!(find_poles(&p, &r).is_err());
    r.im_min = 0.0;
    r.re_max = r.re_min;
    assert!(find_poles(&p, &r).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn polishing_a_perturbed_pole_returns_it(f in 1.1f64..3.0, dx in -1.0f64..1.0, dy in 0.0f64..1.0) {
        let kappa = 0.1 * W;
        let r = threshold_report(&tf(), kappa).unwrap();
        let p = propagator(&tf(), f * r.omega_th, 0.0, r.delta_th, kappa);
        let pole = poles(&p).poles[0];
        let start = pole.z + Complex64::new(dx, dy) * 1e-4 * W;
        let again = polish(&p, start).unwrap().unwrap();
        prop_assert!((again.z - pole.z).norm() < 1e-10 * W);
    }

    #[test]
    fn rates_are_scale_covariant(c in 0.1f64..10.0, f in 1.1f64..3.0) {
        let kappa = 0.1 * W;
        let r = threshold_report(&tf(), kappa).unwrap();
        let base = propagator(&tf(), f * r.omega_th, 0.0, r.delta_th, kappa);
        let scaled_density = CouplingDensity::thomas_fermi(c * W, 1.0).unwrap();
        let rs = threshold_report(&scaled_density, c * kappa).unwrap();
        prop_assert!((rs.omega_th / r.omega_th - c).abs() < 1e-9 * c);
        prop_assert!((rs.delta_th / r.delta_th - c).abs() < 1e-9 * c);
        prop_assert!((rs.omega_coefficient - r.omega_coefficient).abs() < 1e-12);
        let scaled = propagator(&scaled_density, c * f * r.omega_th, 0.0, c * r.delta_th, c * kappa);
        let a = poles(&base);
        let b = poles(&scaled);
        prop_assert_eq!(a.poles.len(), b.poles.len());
        for (x, y) in a.poles.iter().zip(&b.poles) {
            prop_assert!((y.z / c - x.z).norm() < 1e-8 * W);
            prop_assert!((y.residue - x.residue).norm() < 1e-8);
        }
    }
}
