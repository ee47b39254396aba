//! Largest growth rate over a grid of coupling strengths and detunings.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::coupling::CouplingDensity;
use crate::error::{Error, Result};
use crate::resolvent::{LevelShift, Propagator};
use crate::solve::bisect;

use super::poles::{find_poles, SearchRect};

const AXIS_SCAN: usize = 400;

/// One (Ω, Δ) cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GainCell {
    pub omega: f64,
    pub detuning: f64,
    /// max Im z* (s⁻¹) when a root exists in the upper half plane, otherwise the
    /// non-positive stability margin.
    pub gain: f64,
    pub poles: usize,
    /// True when `gain` is the stability margin rather than a root.
    pub margin: bool,
    pub error: Option<String>,
}

/// Row-major map: `cells[i * detunings.len() + j]` holds `(omegas[i], detunings[j])`.
#[derive(Debug, Clone, Serialize)]
pub struct GainMap {
    pub omegas: Vec<f64>,
    pub detunings: Vec<f64>,
    pub cells: Vec<GainCell>,
}

impl GainMap {
    pub fn gain(&self, i: usize, j: usize) -> f64 {
        self.cells[i * self.detunings.len() + j].gain
    }

    pub fn failures(&self) -> usize {
        self.cells.iter().filter(|c| c.error.is_some()).count()
    }
}

/// Runs the pole search at every grid point. Cells are independent and evaluated in
/// parallel; a failing cell records its error and a NaN gain.
pub fn gain_map(
    density: &CouplingDensity,
    gamma: f64,
    kappa: f64,
    omegas: &[f64],
    detunings: &[f64],
) -> Result<GainMap> {
    if omegas.iter().chain(detunings).any(|v| !v.is_finite()) {
        return Err(Error::domain("grid", "all grid values must be finite"));
    }
    if omegas.iter().any(|&o| o < 0.0) {
        return Err(Error::domain(
            "omega grid",
            "coupling strengths must be >= 0",
        ));
    }
    let shifts = omegas
        .iter()
        .map(|&o| LevelShift::new(density.with_total_weight(o * o)?, gamma))
        .collect::<Result<Vec<_>>>()?;
    let nd = detunings.len();
    let cells = (0..omegas.len() * nd)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / nd, idx % nd);
            let (omega, detuning) = (omegas[i], detunings[j]);
            match cell(&shifts[i], detuning, kappa) {
                Ok((gain, poles, margin)) => GainCell {
                    omega,
                    detuning,
                    gain,
                    poles,
                    margin,
                    error: None,
                },
                Err(e) => GainCell {
                    omega,
                    detuning,
                    gain: f64::NAN,
                    poles: 0,
                    margin: false,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    Ok(GainMap {
        omegas: omegas.to_vec(),
        detunings: detunings.to_vec(),
        cells,
    })
}

fn cell(shift: &LevelShift, detuning: f64, kappa: f64) -> Result<(f64, usize, bool)> {
    let p = Propagator::new(shift.clone(), detuning, kappa)?;
    let set = find_poles(&p, &SearchRect::around(&p))?;
    match set.max_growth() {
        Some(g) => Ok((g, set.poles.len(), false)),
        None => Ok((stability_margin(&p)?, 0, true)),
    }
}

/// −Im F at the real roots of Re F, taking the least stable one and clipping at zero.
/// To first order this is Im z of the continued root times Re F′.
pub fn stability_margin(p: &Propagator) -> Result<f64> {
    let w = p.scale();
    let density = p.level_shift.density();
    let (lo, hi) = density.search_interval();
    let reach = w + 2.0 * density.total_weight().sqrt();
    let a = lo.min(p.detuning) - reach;
    let b = hi.max(p.detuning) + reach;
    let f = |x: f64| p.characteristic(Complex64::new(x, 0.0));
    let xs: Vec<f64> = (0..AXIS_SCAN)
        .map(|i| a + (b - a) * i as f64 / (AXIS_SCAN - 1) as f64)
        .collect();
    let vals = xs.iter().map(|&x| f(x)).collect::<Result<Vec<_>>>()?;
    let mut worst = f64::NEG_INFINITY;
    for k in 0..AXIS_SCAN - 1 {
        if vals[k].re.signum() == vals[k + 1].re.signum() && vals[k].re != 0.0 {
            continue;
        }
        let root = bisect(
            |x| f(x).map(|v| v.re).unwrap_or(f64::NAN),
            xs[k],
            xs[k + 1],
            1e-12 * w,
        )
        .unwrap_or(xs[k]);
        worst = worst.max(-f(root)?.im);
    }
    if worst == f64::NEG_INFINITY {
        worst = -p.kappa;
    }
    Ok(worst.min(0.0))
}
