use std::f64::consts::PI;

use nanobec::condensate::*;
use nanobec::constants::RB87_MASS;
use nanobec::error::Error;
use nanobec::quadrature::GaussRule;

fn reference_trap() -> TrapConfig {
    TrapConfig {
        omega_r: 2.0 * PI * 500.0,
        omega_z: 2.0 * PI * 200.0,
        atom_number: 6e4,
        b_offset: 1.143e-5,
    }
}

/// Atom number enclosed by a trial μ, integrated in physical cylindrical coordinates
/// without using the closed-form radii relation of the model.
fn atom_number_oracle(species: &AtomSpecies, trap: &TrapConfig, mu: f64) -> f64 {
    let g = species.interaction();
    let m = species.mass;
    let z_max = (2.0 * mu / (m * trap.omega_z.powi(2))).sqrt();
    let zr = GaussRule::new(48, 0.0, z_max);
    2.0 * zr.integrate(|z| {
        let rem = mu - 0.5 * m * trap.omega_z.powi(2) * z * z;
        let rho_max = (2.0 * rem.max(0.0) / (m * trap.omega_r.powi(2))).sqrt();
        let rr = GaussRule::new(8, 0.0, rho_max);
        rr.integrate(|rho| 2.0 * PI * rho * (rem - 0.5 * m * trap.omega_r.powi(2) * rho * rho) / g)
    })
}

fn mu_by_bisection(species: &AtomSpecies, trap: &TrapConfig) -> f64 {
    let target = trap.atom_number;
    let (mut lo, mut hi) = (1e-40f64, 1e-25f64);
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if atom_number_oracle(species, trap, mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo * hi).sqrt()
}

#[test]
fn reference_chemical_potential_and_size() {
    let model = CondensateModel::new(AtomSpecies::rubidium87(), reference_trap()).unwrap();
    let w = model.bandwidth();
    // Frozen from an independent Python evaluation of the closed form.
    assert!((w - 43_187.566).abs() < 0.01 * 1.0, "mu/hbar = {w}");
    assert!((w / 4.3e4 - 1.0).abs() < 0.05);
    let d = model.tf_diameters();
    assert!((d[0] * 1e6 - 5.0577).abs() < 1e-3);
    assert_eq!(d[0], d[1]);
    assert!((d[2] * 1e6 - 12.644).abs() < 1e-3);
}

#[test]
fn closed_form_matches_normalization_oracle() {
    let species = AtomSpecies::rubidium87();
    let trap = reference_trap();
    let closed = chemical_potential(&species, &trap).unwrap();
    let oracle = mu_by_bisection(&species, &trap);
    assert!((closed / oracle - 1.0).abs() < 1e-6, "{closed} vs {oracle}");
}

#[test]
fn power_law_in_atom_number() {
    let species = AtomSpecies::rubidium87();
    let one = TrapConfig {
        atom_number: 1.0,
        ..reference_trap()
    };
    let ratio = chemical_potential(&species, &reference_trap()).unwrap()
        / chemical_potential(&species, &one).unwrap();
    assert!((ratio / 6e4f64.powf(0.4) - 1.0).abs() < 1e-12);
}

#[test]
fn radii_symmetry_and_scaling() {
    let iso = TrapConfig {
        omega_z: 2.0 * PI * 500.0,
        ..reference_trap()
    };
    let m = CondensateModel::new(AtomSpecies::rubidium87(), iso).unwrap();
    let r = m.tf_radii();
    assert!((r[0] - r[2]).abs() < 1e-18 && r[0] == r[1]);

    // Quadrupling the trap stiffness (ω_z²) at fixed μ halves R_z.
    let base = CondensateModel::new(AtomSpecies::rubidium87(), reference_trap()).unwrap();
    let mass = base.species().mass;
    let rz = (2.0 * base.mu() / (mass * 4.0 * base.trap().omega_z.powi(2))).sqrt();
    assert!((rz / base.tf_radii()[2] - 0.5).abs() < 1e-12);
    // With μ ∝ ω_z^{2/5} recomputed, doubling ω_z scales R_z by 2^{1/5} / 2.
    let stiff = TrapConfig {
        omega_z: 2.0 * base.trap().omega_z,
        ..reference_trap()
    };
    let m2 = CondensateModel::new(AtomSpecies::rubidium87(), stiff).unwrap();
    let ratio = m2.tf_radii()[2] / base.tf_radii()[2];
    assert!((ratio - 2f64.powf(0.2) / 2.0).abs() < 1e-12);
}

#[test]
fn density_profile_edges() {
    let m = CondensateModel::new(AtomSpecies::rubidium87(), reference_trap()).unwrap();
    let g = m.interaction();
    assert!((m.tf_density([0.0; 3]) - m.mu() / g).abs() < 1e-9 * m.mu() / g);
    let r = m.tf_radii();
    assert!(m.tf_density([r[0], 0.0, 0.0]).abs() < 1e-6 * m.mu() / g);
    assert_eq!(m.tf_density([0.0, 0.0, 1.01 * r[2]]), 0.0);
    assert_eq!(m.scattering_potential([0.0; 3]), m.mu());
    // V_T = μ/2 at s² = 1/2.
    let p = [0.0, r[1] / 2f64.sqrt(), 0.0];
    assert!((m.scattering_potential(p) / m.mu() - 0.5).abs() < 1e-12);
}

#[test]
fn density_integrates_to_atom_number() {
    let m = CondensateModel::new(AtomSpecies::rubidium87(), reference_trap()).unwrap();
    let n = atom_number_oracle(m.species(), m.trap(), m.mu());
    assert!((n / 6e4 - 1.0).abs() < 1e-4);
}

#[test]
fn bec_frequency_exceeds_larmor() {
    let m = CondensateModel::new(AtomSpecies::rubidium87(), reference_trap()).unwrap();
    assert!(m.bec_frequency() > m.larmor_frequency());
}

#[test]
fn rejects_non_positive_inputs() {
    let s = AtomSpecies::rubidium87();
    for bad in [
        TrapConfig {
            omega_r: 0.0,
            ..reference_trap()
        },
        TrapConfig {
            omega_z: -1.0,
            ..reference_trap()
        },
        TrapConfig {
            atom_number: 0.5,
            ..reference_trap()
        },
        TrapConfig {
            b_offset: 0.0,
            ..reference_trap()
        },
    ] {
        assert!(matches!(
            chemical_potential(&s, &bad),
            Err(Error::Domain { .. })
        ));
    }
    let bad_species = AtomSpecies {
        scattering_length: -1e-9,
        ..s
    };
    assert!(chemical_potential(&bad_species, &reference_trap()).is_err());
}

proptest::proptest! {
    #![proptest_config(proptest::prelude::ProptestConfig::with_cases(24))]
    #[test]
    fn closed_form_mu_matches_oracle_over_decades(
        log_n in 2.0f64..5.0,
        log_wr in 2.0f64..5.0,
        log_wz in 1.5f64..4.5,
        log_a in -9.7f64..-6.7,
    ) {
        let species = AtomSpecies::new(RB87_MASS, -0.5, 10f64.powf(log_a)).unwrap();
        let trap = TrapConfig {
            omega_r: 10f64.powf(log_wr),
            omega_z: 10f64.powf(log_wz),
            atom_number: 10f64.powf(log_n).round(),
            b_offset: 1e-5,
        };
        let closed = chemical_potential(&species, &trap).unwrap();
        let oracle = mu_by_bisection(&species, &trap);
        proptest::prop_assert!((closed / oracle - 1.0).abs() < 1e-6);
    }

    #[test]
    fn density_non_negative_and_potential_bounded(
        x in -2.0f64..2.0, y in -2.0f64..2.0, z in -2.0f64..2.0,
    ) {
        let m = CondensateModel::new(AtomSpecies::rubidium87(), reference_trap()).unwrap();
        let r = m.tf_radii();
        let p = [x * r[0], y * r[1], z * r[2]];
        let mu0 = m.scattering_potential(p);
        proptest::prop_assert!(m.tf_density(p) >= 0.0);
        proptest::prop_assert!((0.0..=m.mu()).contains(&mu0));
        // Level sets are ellipsoids similar to the boundary.
        let expected = (m.mu() * (1.0 - m.scaled_radius_sq(p))).max(0.0);
        proptest::prop_assert!((mu0 - expected).abs() <= 1e-9 * m.mu());
    }
}
