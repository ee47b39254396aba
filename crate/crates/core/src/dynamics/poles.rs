//! Roots of z − Δ + iκ + K(z) in the closed upper half plane.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::resolvent::Propagator;

/// Accepted roots satisfy |F(z)| below this multiple of μ/ħ.
pub const RESIDUAL_TOL: f64 = 1e-8;
/// Roots closer than this multiple of μ/ħ are the same root.
pub const DEDUP_TOL: f64 = 1e-7;

const GRID: usize = 8;
const MAX_ITER: usize = 60;
const MAX_CLAMPS: usize = 6;

/// Rectangle of complex frequencies (s⁻¹) seeded by the multistart search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SearchRect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl SearchRect {
    /// Default region: the band with margins, the detuning, and heights up to the
    /// larger of μ/(2ħ) and 1.5 Ω.
    pub fn around(propagator: &Propagator) -> Self {
        let w = propagator.scale();
        let density = propagator.level_shift.density();
        let (lo, hi) = density.search_interval();
        let omega = density.total_weight().sqrt();
        let d = propagator.detuning;
        SearchRect {
            re_min: (lo - 0.2 * w).min(d - 0.2 * w).min(0.5 * d - omega),
            re_max: (hi + 0.2 * w).max(d + 0.2 * w).max(0.5 * d + omega),
            im_min: 0.0,
            im_max: (0.5 * w).max(1.5 * omega).max(2.0 * propagator.kappa),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.re_min, self.re_max, self.im_min, self.im_max]
            .iter()
            .all(|v| v.is_finite());
        if !finite || self.re_max <= self.re_min || self.im_max <= self.im_min {
            return Err(Error::domain(
                "search_rect",
                "needs finite bounds with max > min",
            ));
        }
        if self.im_min < 0.0 {
            return Err(Error::domain("search_rect", "im_min must be >= 0"));
        }
        Ok(())
    }

    fn starts(&self, detuning: f64) -> Vec<Complex64> {
        let dx = (self.re_max - self.re_min) / GRID as f64;
        let dy = (self.im_max - self.im_min) / GRID as f64;
        let mut out = Vec::with_capacity(GRID * GRID + 1);
        out.push(Complex64::new(detuning, self.im_min + 0.1 * dy));
        for j in 0..GRID {
            for i in 0..GRID {
                out.push(Complex64::new(
                    self.re_min + (i as f64 + 0.5) * dx,
                    self.im_min + (j as f64 + 0.5) * dy,
                ));
            }
        }
        out
    }
}

/// A root z_k of the characteristic function with residue R_k = 1/(1 + K′(z_k)).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Pole {
    #[serde(serialize_with = "complex_pair")]
    pub z: Complex64,
    #[serde(serialize_with = "complex_pair")]
    pub residue: Complex64,
    /// |F(z_k)| in s⁻¹.
    pub residual: f64,
    pub iterations: usize,
}

fn complex_pair<S: serde::Serializer>(z: &Complex64, s: S) -> std::result::Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(s)
}

impl Pole {
    pub fn growth_rate(&self) -> f64 {
        self.z.im
    }
}

/// Counters from a multistart search.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct PoleDiagnostics {
    pub starts: usize,
    /// Starts whose iteration converged to an accepted root (including duplicates).
    pub converged: usize,
    /// Starts that ended in the lower half plane, off a root, or in an evaluation error.
    pub rejected: usize,
    pub duplicates: usize,
}

/// All roots found in the closed upper half plane, sorted by decreasing Im z.
#[derive(Debug, Clone, Serialize)]
pub struct PoleSet {
    pub poles: Vec<Pole>,
    pub rect: SearchRect,
    pub diagnostics: PoleDiagnostics,
}

impl PoleSet {
    pub fn is_empty(&self) -> bool {
        self.poles.is_empty()
    }

    /// Root with the largest Im z; ties go to the root closest to the detuning.
    pub fn dominant(&self, detuning: f64) -> Option<&Pole> {
        self.poles.iter().max_by(|a, b| {
            a.z.im.total_cmp(&b.z.im).then(
                (b.z.re - detuning)
                    .abs()
                    .total_cmp(&(a.z.re - detuning).abs()),
            )
        })
    }

    /// Largest Im z, or `None` when no root was found.
    pub fn max_growth(&self) -> Option<f64> {
        self.poles.iter().map(|p| p.z.im).reduce(f64::max)
    }
}

enum Outcome {
    Root(Complex64, usize),
    Lost,
}

fn evaluate(p: &Propagator, z: Complex64) -> Result<(Complex64, Complex64)> {
    let (k, dk) = p.level_shift.with_derivative(z)?;
    let f = z - p.detuning + Complex64::new(0.0, p.kappa) + k;
    Ok((f, 1.0 + dk))
}

/// Damped Newton iteration on F with the known roots divided out. Iterates that cross
/// the real axis are put back onto it.
fn newton(p: &Propagator, z0: Complex64, known: &[Complex64], max_step: f64) -> Outcome {
    let w = p.scale();
    let mut z = z0;
    let mut clamps = 0;
    for it in 0..MAX_ITER {
        let Ok((f, fp)) = evaluate(p, z) else {
            return Outcome::Lost;
        };
        if f.norm() < 1e-13 * w {
            return Outcome::Root(z, it);
        }
        let mut ratio = fp / f;
        for &r in known {
            ratio -= 1.0 / (z - r);
        }
        let mut step = 1.0 / ratio;
        if !(step.re.is_finite() && step.im.is_finite()) {
            return Outcome::Lost;
        }
        let len = step.norm();
        if len > max_step {
            step *= max_step / len;
        }
        let mut next = z - step;
        if next.im < 0.0 {
            next.im = 0.0;
            clamps += 1;
            if clamps > MAX_CLAMPS {
                return Outcome::Root(next, it + 1);
            }
        }
        if (next - z).norm() <= 1e-15 * w {
            return Outcome::Root(next, it + 1);
        }
        z = next;
    }
    Outcome::Root(z, MAX_ITER)
}

/// Undeflated Newton refinement from `z0`; returns the root if it is accepted.
pub fn polish(p: &Propagator, z0: Complex64) -> Result<Option<Pole>> {
    let w = p.scale();
    let mut z = z0;
    let mut iterations = 0;
    for _ in 0..12 {
        let (f, fp) = evaluate(p, z)?;
        if f.norm() < 1e-14 * w {
            break;
        }
        let mut next = z - f / fp;
        if next.im < 0.0 {
            next.im = 0.0;
        }
        iterations += 1;
        let done = (next - z).norm() <= 1e-15 * w.max(z.norm());
        z = next;
        if done {
            break;
        }
    }
    let (f, fp) = evaluate(p, z)?;
    if !(f.norm() < RESIDUAL_TOL * w) || z.im < 0.0 {
        return Ok(None);
    }
    Ok(Some(Pole {
        z,
        residue: 1.0 / fp,
        residual: f.norm(),
        iterations,
    }))
}

/// Multistart Newton search with deflation over an 8 × 8 grid of `rect` plus a start
/// above the detuning. Every accepted root satisfies |F| < 10⁻⁸ μ/ħ and Im z ≥ 0.
pub fn find_poles(p: &Propagator, rect: &SearchRect) -> Result<PoleSet> {
    rect.validate()?;
    let w = p.scale();
    let max_step = 0.5 * (rect.re_max - rect.re_min).max(rect.im_max - rect.im_min);
    let mut diagnostics = PoleDiagnostics::default();
    let mut poles: Vec<Pole> = Vec::new();
    for start in rect.starts(p.detuning) {
        diagnostics.starts += 1;
        let known: Vec<Complex64> = poles.iter().map(|q| q.z).collect();
        let Outcome::Root(z, it) = newton(p, start, &known, max_step) else {
            diagnostics.rejected += 1;
            continue;
        };
        let Some(mut pole) = polish(p, z).ok().flatten() else {
            diagnostics.rejected += 1;
            continue;
        };
        pole.iterations += it;
        diagnostics.converged += 1;
        if poles.iter().any(|q| (q.z - pole.z).norm() < DEDUP_TOL * w) {
            diagnostics.duplicates += 1;
            continue;
        }
        poles.push(pole);
    }
    poles.sort_by(|a, b| b.z.im.total_cmp(&a.z.im).then(a.z.re.total_cmp(&b.z.re)));
    Ok(PoleSet {
        poles,
        rect: *rect,
        diagnostics,
    })
}
