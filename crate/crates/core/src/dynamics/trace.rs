//! Time-domain propagator G(t) = (i/2π)∫G⁺(ω)e^{−iωt}dω + Σ R_k e^{−iz_k t}.
//!
//! The real-line integrand is split as G⁺ = r + Σ R_k/(ω − z_k) + A/(ω − p₁) + B/(ω − p₂)
//! with p₁ = Δ − iμ/ħ and p₂ = Δ − 2iμ/ħ. A and B match the 1/ω and 1/ω² terms of G⁺,
//! so the remainder r decays as 1/ω³ and the window truncation is small. For t > 0 the
//! upper-half-plane terms transform to zero and each reference pole to a plain
//! exponential, which leaves only r for numerical quadrature. Without coupling the single
//! reference 1/(ω − Δ + iκ) is exact.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre_rule;
use crate::resolvent::Propagator;

use super::poles::PoleSet;

const PANEL: usize = 16;
/// Tail estimates above this trigger a window warning.
const TAIL_TOL: f64 = 1e-3;

/// Quadrature settings for the inverse transform.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceOptions {
    /// Half-width of the frequency window in units of μ/ħ.
    pub half_window: f64,
    /// Total Gauss–Legendre nodes.
    pub nodes: usize,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions {
            half_window: 40.0,
            nodes: 1 << 14,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PropagatorTrace {
    /// Sample times (s).
    pub times: Vec<f64>,
    #[serde(skip)]
    pub values: Vec<Complex64>,
    /// Least-squares slope of ln|G| over the last third of the grid (s⁻¹).
    pub growth_rate: f64,
    /// Time interval of the fit (s).
    pub fit_window: (f64, f64),
    /// Estimated magnitude of the truncated window tails.
    pub tail_estimate: f64,
    pub warnings: Vec<String>,
}

impl PropagatorTrace {
    pub fn magnitudes(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.norm()).collect()
    }
}

/// `n` equally spaced times on `[0, t_max]`.
pub fn time_grid(t_max: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| t_max * i as f64 / (n - 1).max(1) as f64)
        .collect()
}

pub fn propagator_time(p: &Propagator, poles: &PoleSet, times: &[f64]) -> Result<PropagatorTrace> {
    propagator_time_with(p, poles, times, TraceOptions::default())
}

pub fn propagator_time_with(
    p: &Propagator,
    poles: &PoleSet,
    times: &[f64],
    opts: TraceOptions,
) -> Result<PropagatorTrace> {
    if times.len() < 3 {
        return Err(Error::domain("times", "need at least three samples"));
    }
    if times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) || times.windows(2).any(|w| w[1] <= w[0])
    {
        return Err(Error::domain(
            "times",
            "must be finite, >= 0 and strictly increasing",
        ));
    }
    if !(opts.half_window > 1.0 && opts.nodes >= 4 * PANEL) {
        return Err(Error::domain(
            "trace options",
            "window must exceed μ/ħ and nodes >= 64",
        ));
    }
    let w = p.scale();
    let delta = p.detuning;
    let i = Complex64::new(0.0, 1.0);
    let mut warnings = Vec::new();

    let pole_terms: Vec<(Complex64, Complex64)> =
        poles.poles.iter().map(|q| (q.z, q.residue)).collect();
    if pole_terms.iter().any(|(z, _)| z.im < 1e-6 * w) {
        warnings.push(
            "a pole lies within 1e-6 μ/ħ of the real axis; the subtraction is ill-conditioned"
                .into(),
        );
    }
    let coupled = p.level_shift.density().total_weight() > 0.0;
    let refs: Vec<(Complex64, Complex64)> = if coupled {
        let s1 = Complex64::new(1.0, 0.0) - pole_terms.iter().map(|t| t.1).sum::<Complex64>();
        let s2 = Complex64::new(delta, -p.kappa)
            - pole_terms.iter().map(|t| t.0 * t.1).sum::<Complex64>();
        let p1 = Complex64::new(delta, -w);
        let p2 = Complex64::new(delta, -2.0 * w);
        let b = (s2 - s1 * p1) / (p2 - p1);
        vec![(p1, s1 - b), (p2, b)]
    } else {
        vec![(Complex64::new(delta, -p.kappa), Complex64::new(1.0, 0.0))]
    };

    let (nodes, weights, core_step) = frequency_nodes(p, opts);
    if coupled && p.kappa < 4.0 * core_step {
        warnings.push(format!(
            "κ = {:.3e} s⁻¹ is below four node spacings ({:.3e} s⁻¹); narrow features may be unresolved",
            p.kappa, core_step
        ));
    }
    let remainder = |om: f64| -> Result<Complex64> {
        let g = p.forward_propagator(Complex64::new(om, 0.0))?.value;
        let mut sub = Complex64::new(0.0, 0.0);
        for &(z, r) in pole_terms.iter().chain(refs.iter()) {
            sub += r / (om - z);
        }
        Ok(g - sub)
    };
    let weighted: Vec<(f64, Complex64)> = if coupled {
        nodes
            .par_iter()
            .zip(weights.par_iter())
            .map(|(&om, &wt)| Ok((om, wt * remainder(om)?)))
            .collect::<Result<Vec<_>>>()?
    } else {
        Vec::new()
    };

    let tail_estimate = if coupled {
        let half = opts.half_window * w;
        let edge = remainder(delta - half)?.norm() + remainder(delta + half)?.norm();
        edge * half / 2.0 / (2.0 * std::f64::consts::PI)
    } else {
        0.0
    };
    if tail_estimate > TAIL_TOL {
        warnings.push(format!(
            "window tail estimate {tail_estimate:.2e} exceeds {TAIL_TOL:.0e}; widen the frequency window"
        ));
    }

    let prefactor = i / (2.0 * std::f64::consts::PI);
    let values: Vec<Complex64> = times
        .par_iter()
        .map(|&t| {
            let mut g = Complex64::new(0.0, 0.0);
            for &(z, r) in pole_terms.iter().chain(refs.iter()) {
                g += r * (-i * z * t).exp();
            }
            let mut integral = Complex64::new(0.0, 0.0);
            for &(om, v) in &weighted {
                integral += v * Complex64::from_polar(1.0, -om * t);
            }
            g + prefactor * integral
        })
        .collect();

    let start = times.len() - times.len().div_ceil(3);
    let (growth_rate, fit_window) = fit_slope(&times[start..], &values[start..]);
    Ok(PropagatorTrace {
        times: times.to_vec(),
        values,
        growth_rate,
        fit_window,
        tail_estimate,
        warnings,
    })
}

/// Composite Gauss–Legendre nodes: half of them on the band plus one μ/ħ either side,
/// the rest on the two outer wings. Returns nodes, weights and the core spacing.
fn frequency_nodes(p: &Propagator, opts: TraceOptions) -> (Vec<f64>, Vec<f64>, f64) {
    let w = p.scale();
    let (lo, hi) = p.level_shift.density().search_interval();
    let a = p.detuning - opts.half_window * w;
    let b = p.detuning + opts.half_window * w;
    let core = (
        (lo.min(p.detuning) - w).max(a),
        (hi.max(p.detuning) + w).min(b),
    );
    let panels = (opts.nodes / PANEL).max(4);
    let core_panels = panels / 2;
    let wing_len = (core.0 - a) + (b - core.1);
    let left = (((core.0 - a) / wing_len) * (panels - core_panels) as f64)
        .round()
        .max(1.0) as usize;
    let right = (panels - core_panels - left).max(1);
    let (x, wt) = gauss_legendre_rule(PANEL);
    let mut nodes = Vec::with_capacity(panels * PANEL);
    let mut weights = Vec::with_capacity(panels * PANEL);
    let mut add = |lo: f64, hi: f64, n: usize| {
        let h = (hi - lo) / n as f64;
        for k in 0..n {
            let c = lo + (k as f64 + 0.5) * h;
            for (xi, wi) in x.iter().zip(wt) {
                nodes.push(c + 0.5 * h * xi);
                weights.push(0.5 * h * wi);
            }
        }
    };
    add(a, core.0, left);
    add(core.0, core.1, core_panels);
    add(core.1, b, right);
    let core_step = (core.1 - core.0) / (core_panels * PANEL) as f64;
    (nodes, weights, core_step)
}

fn fit_slope(t: &[f64], g: &[Complex64]) -> (f64, (f64, f64)) {
    let n = t.len() as f64;
    let y: Vec<f64> = g.iter().map(|v| v.norm().ln()).collect();
    let tm = t.iter().sum::<f64>() / n;
    let ym = y.iter().sum::<f64>() / n;
    let sxy: f64 = t.iter().zip(&y).map(|(a, b)| (a - tm) * (b - ym)).sum();
    let sxx: f64 = t.iter().map(|a| (a - tm).powi(2)).sum();
    (sxy / sxx, (t[0], t[t.len() - 1]))
}
