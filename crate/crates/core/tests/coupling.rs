use std::f64::consts::PI;

use num_complex::Complex64;

use nanobec::condensate::CondensateModel;
use nanobec::condensate::{AtomSpecies, TrapConfig};
use nanobec::constants::{BOHR_MAGNETON, HBAR};
use nanobec::coupling::*;
use nanobec::nanowire::NanowireModel;
use nanobec::nanowire::{Damping, Geometry};
use nanobec::quadrature::gauss_legendre;

fn condensate() -> CondensateModel {
    let trap = TrapConfig {
        omega_r: 2.0 * PI * 500.0,
        omega_z: 2.0 * PI * 200.0,
        atom_number: 6e4,
        b_offset: 1.143e-5,
    };
    CondensateModel::new(AtomSpecies::rubidium87(), trap).unwrap()
}

fn wire(geometry: Geometry) -> NanowireModel {
    NanowireModel::new(
        geometry,
        2e-6,
        4.5e-6,
        20e-6,
        2.0 * PI * 8e4,
        7e-22,
        Damping::QualityFactor(1e5),
    )
    .unwrap()
}

#[test]
fn eta_limits_at_centre() {
    let f = CouplingField::new(condensate(), wire(Geometry::Dipole));
    let e = f.eta([0.0; 3]).unwrap();
    assert!((e.norm() - 1.05667).abs() < 1e-4);
    let inf = CouplingField::new(condensate(), wire(Geometry::Infinite));
    let closed = 0.5 * BOHR_MAGNETON * nanobec::constants::MU0 * 20e-6
        / (4.0 * PI * (HBAR * 7e-22 * 2.0 * PI * 8e4).sqrt() * 4.5e-6f64.powi(2));
    assert!((inf.eta([0.0; 3]).unwrap().norm() - closed).abs() < 1e-12 * closed);
    let doubled = CouplingField::new(condensate(), wire(Geometry::Dipole).with_current(40e-6));
    assert!((doubled.eta([0.0; 3]).unwrap().norm() - 2.0 * e.norm()).abs() < 1e-13 * e.norm());
}

#[test]
fn eta_decays_away_from_wire() {
    let f = CouplingField::new(condensate(), wire(Geometry::Bent));
    let mut prev = f64::INFINITY;
    for k in 0..8 {
        let y = -2.0e-6 + 1.0e-6 * k as f64;
        let e = f.eta([0.0, y, 0.0]).unwrap().norm();
        assert!(e < prev);
        prev = e;
    }
}

#[test]
fn uniform_coupling_gives_closed_form() {
    let c = condensate();
    let f = CouplingField::uniform(c.clone(), Complex64::new(1.0, 0.5));
    let opts = ShellQuadrature::default();
    let omega = f.collective_coupling(&opts).unwrap().omega;
    let expected = (c.atom_number() * 1.25).sqrt();
    assert!((omega - expected).abs() < 1e-9 * expected);
    let num = f.density_numerical(&opts).unwrap();
    let closed = density_closed_form(&c, 1.25f64.sqrt()).unwrap();
    let peak = closed.maximum().1;
    for (w, r) in num.nodes().unwrap() {
        assert!((r - closed.value(w)).abs() <= 1e-12 * peak, "{w} {r}");
    }
    assert!((num.total_weight() - closed.total_weight()).abs() < 1e-4 * closed.total_weight());
}

/// Independent cylindrical-coordinate quadrature of ∫|η|²Φ² d³r.
fn omega_cylindrical(f: &CouplingField) -> f64 {
    let c = f.condensate();
    let [rx, _, rz] = c.tf_radii();
    let (xz, wz) = gauss_legendre(64);
    let (xr, wr) = gauss_legendre(64);
    let (xp, wp) = gauss_legendre(64);
    let mut total = 0.0;
    for (&tz, &az) in xz.iter().zip(&wz) {
        let z = rz * tz;
        let rho_max = rx * (1.0 - tz * tz).sqrt();
        for (&tr, &ar) in xr.iter().zip(&wr) {
            let rho = 0.5 * rho_max * (tr + 1.0);
            for (&tp, &ap) in xp.iter().zip(&wp) {
                let phi = PI * (tp + 1.0);
                let r = [rho * phi.cos(), rho * phi.sin(), z];
                let w = az * rz * ar * 0.5 * rho_max * ap * PI * rho;
                total += w * f.eta(r).unwrap().norm_sqr() * c.tf_density(r);
            }
        }
    }
    total.sqrt()
}

#[test]
fn collective_coupling_matches_cylindrical_oracle() {
    for g in [Geometry::Dipole, Geometry::Bent] {
        let f = CouplingField::new(condensate(), wire(g));
        let omega = f
            .collective_coupling(&ShellQuadrature::default())
            .unwrap()
            .omega;
        let oracle = omega_cylindrical(&f);
        assert!(
            (omega - oracle).abs() < 1e-4 * oracle,
            "{g:?}: {omega} vs {oracle}"
        );
    }
}

#[test]
fn atom_number_scaling_is_not_square_root() {
    let base = CouplingField::new(condensate(), wire(Geometry::Dipole));
    let mut trap = condensate().trap().clone();
    trap.atom_number *= 4.0;
    let big = CouplingField::new(
        CondensateModel::new(AtomSpecies::rubidium87(), trap).unwrap(),
        wire(Geometry::Dipole),
    );
    let opts = ShellQuadrature::default();
    let ratio = big.collective_coupling(&opts).unwrap().omega
        / base.collective_coupling(&opts).unwrap().omega;
    let oracle = omega_cylindrical(&big) / omega_cylindrical(&base);
    assert!((ratio - oracle).abs() < 1e-4 * oracle);
    assert!((ratio - 2.0).abs() > 1e-3);
}

#[test]
fn numerical_density_sum_rule() {
    let f = CouplingField::new(condensate(), wire(Geometry::Bent));
    let opts = ShellQuadrature::default();
    let rho = f.density_numerical(&opts).unwrap();
    let omega = f.collective_coupling(&opts).unwrap().omega;
    let w2 = omega * omega;
    assert!((rho.total_weight() - w2).abs() < 1e-4 * w2);
    let (lo, hi) = rho.support();
    assert_eq!((lo, hi), (0.0, condensate().bandwidth()));
    assert!(rho.nodes().unwrap().iter().all(|&(_, v)| v >= 0.0));
}
