//! Configuration-driven scenarios: the figure-of-merit report, figure data and the
//! dynamics outputs. Every file carries the SHA-256 of the validated configuration.

mod config;
mod output;

use std::fmt::Write as _;
use std::path::PathBuf;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::condensate::{CondensateModel, TrapConfig};
use crate::coupling::{CollectiveCoupling, CouplingDensity, CouplingField, ShellQuadrature};
use crate::dynamics::{
    find_poles, gain_map, propagator_time_with, threshold_exact, threshold_report, time_grid,
    PoleSet, SearchRect, ThresholdReport, TraceOptions,
};
use crate::error::Error;
use crate::nanowire::{Damping, Geometry, NanowireModel};
use crate::resolvent::{LevelShift, Propagator};

pub use config::{
    apply_override, parse_config, parse_config_str, CauchyMethod, CondensateSection,
    CouplingSection, DensityMode, DynamicsSection, FiguresSection, FrequencyInput, NanowireSection,
    OutputFormat, OutputSection, RangeSection, RectSection, ScenarioConfig, SweepSection,
    TimeSection,
};
pub use output::{fmt as format_float, Sink, UNITS};

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("{stage}: {source}")]
    Stage { stage: &'static str, source: Error },
}

impl ScenarioError {
    /// Process exit status: 2 configuration, 1 I/O, 3 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            ScenarioError::Config(_) => 2,
            ScenarioError::Io(_) => 1,
            ScenarioError::Stage {
                source: Error::Domain { .. },
                ..
            } => 2,
            ScenarioError::Stage { .. } => 3,
        }
    }
}

fn stage(name: &'static str) -> impl Fn(Error) -> ScenarioError {
    move |source| ScenarioError::Stage {
        stage: name,
        source,
    }
}

/// Stable when Ω < Ω_th(1 − tol), amplifying when Ω > Ω_th(1 + tol).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    #[serde(rename = "above threshold")]
    AboveThreshold,
    #[serde(rename = "at threshold")]
    AtThreshold,
    #[serde(rename = "below threshold")]
    BelowThreshold,
}

impl Verdict {
    pub fn classify(omega: f64, omega_th: f64, tolerance: f64) -> Self {
        if (omega - omega_th).abs() <= tolerance * omega_th {
            Verdict::AtThreshold
        } else if omega > omega_th {
            Verdict::AboveThreshold
        } else {
            Verdict::BelowThreshold
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Verdict::AboveThreshold => "above threshold",
            Verdict::AtThreshold => "at threshold",
            Verdict::BelowThreshold => "below threshold",
        }
    }
}

pub const UNIT_NOTE: &str = "All rates are angular frequencies in s^-1. Values quoted in Hz for \
     mu/hbar, Omega and Omega_th correspond to these s^-1 numbers (mu/hbar ~ 4.3e4 s^-1).";

#[derive(Debug, Clone, Serialize)]
pub struct FigureOfMeritReport {
    /// μ/ħ (s⁻¹).
    pub bandwidth: f64,
    /// μ (J).
    pub chemical_potential: f64,
    /// Thomas–Fermi diameters 2R_x, 2R_y, 2R_z (m).
    pub tf_diameters: [f64; 3],
    /// ω_L (s⁻¹).
    pub larmor_frequency: f64,
    /// |η(0)| of the point-dipole and infinite-wire limits (s⁻¹).
    pub eta0_dipole: f64,
    pub eta0_infinite: f64,
    /// √N |η(0)| of the point dipole (s⁻¹).
    pub constant_eta_estimate: f64,
    /// Ω from the spatial integral of |η|² (s⁻¹).
    pub omega_computed: f64,
    /// Ω used for the verdict, after any override (s⁻¹).
    pub omega: f64,
    pub omega_overridden: bool,
    pub omega_th: f64,
    pub delta_th: f64,
    pub kappa: f64,
    pub geometry: Geometry,
    pub threshold: ThresholdReport,
    pub verdict: Verdict,
    pub verdict_tolerance: f64,
    pub unit_note: &'static str,
}

/// Validated inputs turned into models, with Ω, the density and the thresholds.
pub struct Pipeline {
    pub config: ScenarioConfig,
    pub config_hash: String,
    pub condensate: CondensateModel,
    pub nanowire: NanowireModel,
    pub field: CouplingField,
    pub quadrature: ShellQuadrature,
    pub coupling: CollectiveCoupling,
    /// Ω used downstream (s⁻¹).
    pub omega: f64,
    pub kappa: f64,
    pub gamma: f64,
    /// Unit-weight density shape.
    pub shape: CouplingDensity,
    /// Density with total weight Ω².
    pub density: CouplingDensity,
    pub threshold: ThresholdReport,
    /// Δ used downstream (s⁻¹).
    pub detuning: f64,
}

/// What a scenario wrote and whether the mode amplifies.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub files: Vec<PathBuf>,
    pub message: String,
    pub amplifying: bool,
}

impl Pipeline {
    pub fn build(config: ScenarioConfig) -> Result<Self, ScenarioError> {
        config.validate()?;
        let f = config.rate_factor();
        let c = &config.condensate;
        let trap = TrapConfig {
            omega_r: c.omega_r.unwrap_or_default() * f,
            omega_z: c.omega_z.unwrap_or_default() * f,
            atom_number: c.atom_number.unwrap_or_default(),
            b_offset: c.b_offset.unwrap_or_default(),
        };
        let condensate =
            CondensateModel::new(config.species(), trap).map_err(stage("condensate"))?;
        let w = &config.nanowire;
        let omega_nw = w.omega_nw.unwrap_or_default() * f;
        let damping = match (w.quality_factor, w.kappa) {
            (Some(q), _) => Damping::QualityFactor(q),
            (_, k) => Damping::Rate(k.unwrap_or_default() * f),
        };
        let nanowire = NanowireModel::new(
            w.geometry,
            w.length.unwrap_or_default(),
            w.distance.unwrap_or_default(),
            w.current.unwrap_or_default(),
            omega_nw,
            w.effective_mass.unwrap_or_default(),
            damping,
        )
        .map_err(stage("nanowire"))?
        .with_bend_amplitude(w.bend_amplitude)
        .with_coupling_gradient(w.coupling_gradient);
        let field = CouplingField::new(condensate.clone(), nanowire.clone());
        let k = &config.coupling;
        let quadrature = ShellQuadrature {
            nodes: k.nodes,
            angular_order: k.angular_order,
            radial_order: k.radial_order,
            rel_tol: k.rel_tol,
            max_order: k.max_order,
        };
        let coupling = field
            .collective_coupling(&quadrature)
            .map_err(stage("coupling"))?;
        let omega = config
            .dynamics
            .omega_override
            .map(|v| v * f)
            .unwrap_or(coupling.omega);
        let band = condensate.bandwidth();
        let shape = match k.density {
            DensityMode::ClosedForm => CouplingDensity::thomas_fermi(band, 1.0),
            DensityMode::Numerical => field
                .density_numerical(&quadrature)
                .and_then(|d| d.with_total_weight(1.0)),
        }
        .map_err(stage("density"))?;
        let kappa = nanowire.kappa;
        let threshold = threshold_report(&shape, kappa).map_err(stage("threshold"))?;
        let detuning = config
            .dynamics
            .detuning
            .map(|d| d * f)
            .unwrap_or(threshold.delta_th);
        let density = shape
            .with_total_weight(omega * omega)
            .map_err(stage("density"))?;
        let config_hash = config_hash(&config);
        Ok(Pipeline {
            gamma: config.dynamics.gamma * f,
            config,
            config_hash,
            condensate,
            nanowire,
            field,
            quadrature,
            coupling,
            omega,
            kappa,
            shape,
            density,
            threshold,
            detuning,
        })
    }

    pub fn bandwidth(&self) -> f64 {
        self.condensate.bandwidth()
    }

    pub fn sink(&self) -> Result<Sink, ScenarioError> {
        let mut sink = Sink::new(
            std::path::Path::new(&self.config.output.directory),
            &self.config_hash,
        )?;
        sink.config(&self.config.to_json())?;
        Ok(sink)
    }

    pub fn level_shift(&self) -> Result<LevelShift, ScenarioError> {
        Ok(LevelShift::new(self.density.clone(), self.gamma)
            .map_err(stage("resolvent"))?
            .with_method(self.config.coupling.method.into()))
    }

    pub fn propagator(&self) -> Result<Propagator, ScenarioError> {
        Propagator::new(self.level_shift()?, self.detuning, self.kappa).map_err(stage("resolvent"))
    }

    fn search_rect(&self, p: &Propagator) -> SearchRect {
        let f = self.config.rate_factor();
        match self.config.dynamics.search_rect {
            Some(r) => SearchRect {
                re_min: r.re_min * f,
                re_max: r.re_max * f,
                im_min: r.im_min * f,
                im_max: r.im_max * f,
            },
            None => SearchRect::around(p),
        }
    }

    /// Growth rates above this count as amplification.
    fn growth_tolerance(&self) -> f64 {
        (1e-3 * self.kappa).max(1e-12 * self.bandwidth())
    }

    pub fn figure_of_merit(&self) -> Result<FigureOfMeritReport, ScenarioError> {
        let eta0 = |g: Geometry| -> Result<f64, ScenarioError> {
            let mut wire = self.nanowire.clone();
            wire.geometry = g;
            Ok(CouplingField::new(self.condensate.clone(), wire)
                .eta([0.0; 3])
                .map_err(stage("coupling"))?
                .norm())
        };
        let eta0_dipole = eta0(Geometry::Dipole)?;
        let tol = self.config.dynamics.verdict_tolerance;
        Ok(FigureOfMeritReport {
            bandwidth: self.bandwidth(),
            chemical_potential: self.condensate.mu(),
            tf_diameters: self.condensate.tf_diameters(),
            larmor_frequency: self.condensate.larmor_frequency(),
            eta0_dipole,
            eta0_infinite: eta0(Geometry::Infinite)?,
            constant_eta_estimate: self.condensate.atom_number().sqrt() * eta0_dipole,
            omega_computed: self.coupling.omega,
            omega: self.omega,
            omega_overridden: self.config.dynamics.omega_override.is_some(),
            omega_th: self.threshold.omega_th,
            delta_th: self.threshold.delta_th,
            kappa: self.kappa,
            geometry: self.nanowire.geometry,
            threshold: self.threshold,
            verdict: Verdict::classify(self.omega, self.threshold.omega_th, tol),
            verdict_tolerance: tol,
            unit_note: UNIT_NOTE,
        })
    }

    pub fn run_figure_of_merit(&self) -> Result<(FigureOfMeritReport, RunSummary), ScenarioError> {
        let report = self.figure_of_merit()?;
        let mut sink = self.sink()?;
        sink.json(
            "report.json",
            "figure-of-merit",
            json!({ "report": report }),
        )?;
        let text = report_text(&report);
        sink.text("report.txt", &text)?;
        let amplifying = report.verdict == Verdict::AboveThreshold;
        Ok((
            report,
            RunSummary {
                files: sink.written,
                message: text,
                amplifying,
            },
        ))
    }

    /// Density figure: closed form, numerical and Lorentzian fit on [0, μ/ħ].
    pub fn emit_fig2(&self) -> Result<RunSummary, ScenarioError> {
        let band = self.bandwidth();
        let omega_sq = self.omega * self.omega;
        let closed = CouplingDensity::thomas_fermi(band, omega_sq).map_err(stage("fig2"))?;
        let numerical = match self.config.coupling.density {
            DensityMode::Numerical => self.shape.with_total_weight(omega_sq),
            DensityMode::ClosedForm => self
                .field
                .density_numerical(&self.quadrature)
                .and_then(|d| d.with_total_weight(omega_sq)),
        }
        .map_err(stage("fig2"))?;
        let fit = closed.lorentzian_fit().map_err(stage("fig2"))?;
        let lorentz = CouplingDensity::lorentzian(fit.center, fit.half_width, omega_sq, band)
            .map_err(stage("fig2"))?;
        let numerical_fit = numerical.lorentzian_fit().map_err(stage("fig2"))?;
        let n = self.config.figures.fig2_samples;
        let rows: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                let w = band * i as f64 / (n - 1) as f64;
                vec![
                    w,
                    w / band,
                    closed.value(w),
                    numerical.value(w),
                    lorentz.value(w),
                ]
            })
            .collect();
        let mut sink = self.sink()?;
        let meta = [
            ("omega_sq", output::fmt(omega_sq)),
            ("lorentzian_center", output::fmt(fit.center)),
            ("lorentzian_half_width", output::fmt(fit.half_width)),
        ];
        if self.config.wants(OutputFormat::Csv) {
            sink.csv(
                "fig2.csv",
                "fig2 coupling density",
                &meta,
                &[
                    "omega",
                    "x",
                    "rho_closed_form",
                    "rho_numerical",
                    "rho_lorentzian",
                ],
                &rows,
            )?;
        }
        sink.json(
            "fig2.json",
            "fig2 coupling density",
            json!({
                "lorentzian": { "center": fit.center, "half_width": fit.half_width,
                                "center_over_bandwidth": fit.center / band,
                                "half_width_over_bandwidth": fit.half_width / band },
                "numerical_moment_fit": { "center": numerical_fit.center,
                                          "half_width": numerical_fit.half_width },
                "omega_sq": omega_sq,
                "omega": self.omega,
                "bandwidth": band,
                "grid": { "samples": n, "omega_min": 0.0, "omega_max": band,
                          "numerical_nodes": self.quadrature.nodes },
            }),
        )?;
        let message = format!(
            "fig2: ω₀ = {:.6e} s^-1 ({:.6} μ/ħ), Γ = {:.6e} s^-1 ({:.6} μ/ħ), Ω² = {:.6e} s^-2",
            fit.center,
            fit.center / band,
            fit.half_width,
            fit.half_width / band,
            omega_sq
        );
        Ok(RunSummary {
            files: sink.written,
            message,
            amplifying: false,
        })
    }

    /// Level-shift surface, graphical-solution planes and on-axis boundary values.
    pub fn emit_fig3(&self) -> Result<RunSummary, ScenarioError> {
        let band = self.bandwidth();
        let f = self.config.rate_factor();
        let figs = &self.config.figures;
        let axis = |r: &RangeSection, lo: f64, hi: f64| {
            (
                r.min.map(|v| v * f).unwrap_or(lo),
                r.max.map(|v| v * f).unwrap_or(hi),
                r.count,
            )
        };
        let re = axis(&figs.fig3_re, -0.5 * band, 1.5 * band);
        let im = axis(&figs.fig3_im, -0.5 * band, 0.5 * band);
        let ls = self.level_shift()?;
        let surface = ls.surface(re, im).map_err(stage("fig3"))?;
        let rows: Vec<Vec<f64>> = surface
            .iter()
            .map(|p| {
                vec![
                    p.z.re,
                    p.z.im,
                    p.k.re,
                    p.k.im,
                    p.z.re - self.detuning,
                    -(p.z.im + self.kappa),
                ]
            })
            .collect();
        let (lo, hi) = self.density.support();
        let na = figs.fig3_axis_samples;
        let axis_rows = (0..na)
            .map(|i| {
                let w = lo + (hi - lo) * (i as f64 + 0.5) / na as f64;
                let above = ls.cauchy_integral(Complex64::new(w, 0.0))?;
                let below = ls.cauchy_integral(Complex64::new(w, -0.0))?;
                Ok(vec![
                    w,
                    self.density.value(w),
                    above.re,
                    above.im,
                    below.re,
                    below.im,
                ])
            })
            .collect::<Result<Vec<_>, Error>>()
            .map_err(stage("fig3"))?;
        let mut sink = self.sink()?;
        let meta = [
            ("detuning", output::fmt(self.detuning)),
            ("kappa", output::fmt(self.kappa)),
            ("gamma", output::fmt(self.gamma)),
            ("omega_sq", output::fmt(self.omega * self.omega)),
        ];
        if self.config.wants(OutputFormat::Csv) {
            sink.csv(
                "fig3.csv",
                "fig3 level shift K(z)",
                &meta,
                &["re_z", "im_z", "re_k", "im_k", "plane_re", "plane_im"],
                &rows,
            )?;
            sink.csv(
                "fig3_axis.csv",
                "fig3 boundary values K(omega +/- i0) of the gamma = 0 Cauchy integral",
                &meta,
                &[
                    "omega",
                    "rho",
                    "re_k_above",
                    "im_k_above",
                    "re_k_below",
                    "im_k_below",
                ],
                &axis_rows,
            )?;
        }
        sink.json(
            "fig3.json",
            "fig3 level shift K(z)",
            json!({
                "support": [lo, hi],
                "detuning": self.detuning,
                "kappa": self.kappa,
                "gamma": self.gamma,
                "omega_sq": self.omega * self.omega,
                "grid": { "re": [re.0, re.1, re.2], "im": [im.0, im.1, im.2], "order": "row-major in im_z" },
                "axis_samples": na,
                "planes": { "plane_re": "Re z - detuning", "plane_im": "-(Im z + kappa)" },
            }),
        )?;
        let message = format!(
            "fig3: {} x {} grid, support [{lo:.6e}, {hi:.6e}] s^-1",
            re.2, im.2
        );
        Ok(RunSummary {
            files: sink.written,
            message,
            amplifying: false,
        })
    }

    fn pole_set(&self, p: &Propagator) -> Result<PoleSet, ScenarioError> {
        find_poles(p, &self.search_rect(p)).map_err(stage("poles"))
    }

    fn write_poles(&self, sink: &mut Sink, set: &PoleSet) -> Result<(), ScenarioError> {
        let rows: Vec<Vec<f64>> = set
            .poles
            .iter()
            .map(|q| vec![q.z.re, q.z.im, q.residue.re, q.residue.im])
            .collect();
        let meta = [
            ("omega", output::fmt(self.omega)),
            ("detuning", output::fmt(self.detuning)),
            ("kappa", output::fmt(self.kappa)),
            ("gamma", output::fmt(self.gamma)),
        ];
        if self.config.wants(OutputFormat::Csv) {
            sink.csv(
                "poles.csv",
                "poles of G+",
                &meta,
                &["re", "im", "re_residue", "im_residue"],
                &rows,
            )?;
        }
        if self.config.wants(OutputFormat::Json) {
            sink.json(
                "poles.json",
                "poles of G+",
                json!({ "omega": self.omega, "detuning": self.detuning, "kappa": self.kappa,
                        "gamma": self.gamma, "poles": set }),
            )?;
        }
        Ok(())
    }

    pub fn run_poles(&self) -> Result<RunSummary, ScenarioError> {
        let p = self.propagator()?;
        let set = self.pole_set(&p)?;
        let mut sink = self.sink()?;
        self.write_poles(&mut sink, &set)?;
        Ok(self.pole_summary(&set, sink.written))
    }

    fn pole_summary(&self, set: &PoleSet, files: Vec<PathBuf>) -> RunSummary {
        let growth = set.max_growth();
        let amplifying = growth.is_some_and(|g| g > self.growth_tolerance());
        let message = match set.dominant(self.detuning) {
            Some(q) => format!(
                "{} pole(s); dominant z* = {:.9e} + {:.9e}i s^-1 ({})",
                set.poles.len(),
                q.z.re,
                q.z.im,
                if amplifying {
                    "amplifying"
                } else {
                    "not amplifying"
                }
            ),
            None => "no poles in the upper half plane (stable)".into(),
        };
        RunSummary {
            files,
            message,
            amplifying,
        }
    }

    /// Ω grid (default [0, 2Ω_th]) and Δ grid (default Δ_th ± max(10κ, 10Ω_max²ħ/μ)).
    pub fn sweep_grids(&self) -> (Vec<f64>, Vec<f64>) {
        let f = self.config.rate_factor();
        let s = &self.config.dynamics.sweep;
        let th = &self.threshold;
        let lin = |lo: f64, hi: f64, n: usize| -> Vec<f64> {
            if n == 1 {
                vec![lo]
            } else {
                (0..n)
                    .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
                    .collect()
            }
        };
        let o_lo = s.omega.min.map(|v| v * f).unwrap_or(0.0);
        let o_hi = s
            .omega
            .max
            .map(|v| v * f)
            .unwrap_or(2.0 * th.omega_th.max(self.omega));
        let band = self.bandwidth();
        let half = (10.0 * self.kappa)
            .max(10.0 * o_hi * o_hi / band)
            .max(1e-4 * band);
        let d_lo = s
            .detuning
            .min
            .map(|v| v * f)
            .unwrap_or(self.detuning - half);
        let d_hi = s
            .detuning
            .max
            .map(|v| v * f)
            .unwrap_or(self.detuning + half);
        (
            lin(o_lo, o_hi, s.omega.count),
            lin(d_lo, d_hi, s.detuning.count),
        )
    }

    pub fn run_gain_map(&self) -> Result<RunSummary, ScenarioError> {
        let mut sink = self.sink()?;
        let msg = self.write_gain_map(&mut sink)?;
        Ok(RunSummary {
            files: sink.written,
            message: msg,
            amplifying: false,
        })
    }

    fn write_gain_map(&self, sink: &mut Sink) -> Result<String, ScenarioError> {
        let (omegas, detunings) = self.sweep_grids();
        let map = gain_map(&self.shape, self.gamma, self.kappa, &omegas, &detunings)
            .map_err(stage("gain map"))?;
        let rows: Vec<Vec<f64>> = map
            .cells
            .iter()
            .map(|c| vec![c.omega, c.detuning, c.gain])
            .collect();
        let meta = [
            ("kappa", output::fmt(self.kappa)),
            ("gamma", output::fmt(self.gamma)),
            ("omega_th", output::fmt(self.threshold.omega_th)),
            ("delta_th", output::fmt(self.threshold.delta_th)),
            (
                "layout",
                format!(
                    "row-major: {} omega values x {} detunings",
                    omegas.len(),
                    detunings.len()
                ),
            ),
            (
                "gain",
                "max Im z* over poles; non-positive stability margin where no pole exists".into(),
            ),
        ];
        if self.config.wants(OutputFormat::Csv) {
            sink.csv(
                "gain_map.csv",
                "gain map",
                &meta,
                &["omega", "delta", "gain"],
                &rows,
            )?;
        }
        if self.config.wants(OutputFormat::Json) {
            sink.json("gain_map.json", "gain map", json!({ "map": map }))?;
        }
        Ok(format!(
            "gain map: {} x {} cells, {} failures",
            omegas.len(),
            detunings.len(),
            map.failures()
        ))
    }

    pub fn run_trace(&self) -> Result<RunSummary, ScenarioError> {
        let p = self.propagator()?;
        let set = self.pole_set(&p)?;
        let mut sink = self.sink()?;
        let msg = self.write_trace(&mut sink, &p, &set)?;
        let mut summary = self.pole_summary(&set, sink.written);
        summary.message = format!("{msg}; {}", summary.message);
        Ok(summary)
    }

    fn write_trace(
        &self,
        sink: &mut Sink,
        p: &Propagator,
        set: &PoleSet,
    ) -> Result<String, ScenarioError> {
        let t = &self.config.dynamics.time;
        let t_max = t.t_max.unwrap_or(200.0 / self.bandwidth());
        let opts = TraceOptions {
            half_window: t.half_window,
            nodes: t.quadrature_nodes,
        };
        let trace = propagator_time_with(p, set, &time_grid(t_max, t.samples), opts)
            .map_err(stage("trace"))?;
        let rows: Vec<Vec<f64>> = trace
            .times
            .iter()
            .zip(&trace.values)
            .map(|(t, g)| vec![*t, g.re, g.im, g.norm()])
            .collect();
        let mut meta = vec![
            ("growth_rate", output::fmt(trace.growth_rate)),
            (
                "fit_window",
                format!(
                    "{} {}",
                    output::fmt(trace.fit_window.0),
                    output::fmt(trace.fit_window.1)
                ),
            ),
            ("tail_estimate", output::fmt(trace.tail_estimate)),
        ];
        for w in &trace.warnings {
            meta.push(("warning", w.clone()));
        }
        if self.config.wants(OutputFormat::Csv) {
            sink.csv(
                "trace.csv",
                "time-domain propagator G(t)",
                &meta,
                &["t", "re_g", "im_g", "abs_g"],
                &rows,
            )?;
        }
        if self.config.wants(OutputFormat::Json) {
            sink.json(
                "trace.json",
                "time-domain propagator G(t)",
                json!({ "growth_rate": trace.growth_rate, "fit_window": trace.fit_window,
                        "tail_estimate": trace.tail_estimate, "warnings": trace.warnings,
                        "max_pole_growth": set.max_growth(), "samples": trace.times.len() }),
            )?;
        }
        for w in &trace.warnings {
            eprintln!("warning: {w}");
        }
        Ok(format!(
            "trace: fitted growth rate {:.6e} s^-1",
            trace.growth_rate
        ))
    }

    /// Poles, gain map and time trace in one run.
    pub fn run_dynamics(&self) -> Result<RunSummary, ScenarioError> {
        let p = self.propagator()?;
        let set = self.pole_set(&p)?;
        let mut sink = self.sink()?;
        self.write_poles(&mut sink, &set)?;
        let gm = self.write_gain_map(&mut sink)?;
        let tr = self.write_trace(&mut sink, &p, &set)?;
        let mut summary = self.pole_summary(&set, sink.written);
        summary.message = format!("{}; {gm}; {tr}", summary.message);
        Ok(summary)
    }

    pub fn run_threshold(&self) -> Result<RunSummary, ScenarioError> {
        let exact = if self.kappa > 0.0 {
            Some(threshold_exact(&self.shape, self.gamma, self.kappa).map_err(stage("threshold"))?)
        } else {
            None
        };
        let mut sink = self.sink()?;
        sink.json(
            "threshold.json",
            "amplification threshold",
            json!({ "analytic": self.threshold, "exact": exact, "omega": self.omega,
                    "verdict": Verdict::classify(self.omega, self.threshold.omega_th,
                                                 self.config.dynamics.verdict_tolerance) }),
        )?;
        let mut message = format!(
            "Ω_th = {:.6e} s^-1, Δ_th = {:.6e} s^-1 (coefficients {:.6}, {:.6})",
            self.threshold.omega_th,
            self.threshold.delta_th,
            self.threshold.omega_coefficient,
            self.threshold.detuning_coefficient
        );
        if let Some(e) = &exact {
            let _ = write!(
                message,
                "; exact (γ = {:.3e}): Ω_th* = {:.6e}, Δ_th* = {:.6e}",
                e.gamma, e.omega_th, e.delta_th
            );
        }
        let amplifying =
            self.omega > self.threshold.omega_th * (1.0 + self.config.dynamics.verdict_tolerance);
        Ok(RunSummary {
            files: sink.written,
            message,
            amplifying,
        })
    }
}

/// SHA-256 of the canonical configuration JSON with the output directory blanked, so
/// the same scenario written to two places carries the same hash.
pub fn config_hash(config: &ScenarioConfig) -> String {
    let mut c = config.clone();
    c.output.directory.clear();
    hex(&Sha256::digest(c.to_json().as_bytes()))
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn report_text(r: &FigureOfMeritReport) -> String {
    let mut s = String::new();
    let mut line = |label: &str, value: String| {
        let _ = writeln!(s, "  {label:<30}{value}");
    };
    let d = r.tf_diameters.map(|v| v * 1e6);
    let geometry = match r.geometry {
        Geometry::Dipole => "point dipole",
        Geometry::Infinite => "infinite wire",
        Geometry::Bent => "bent wire",
    };
    line("mu/hbar", format!("{:.6e} s^-1", r.bandwidth));
    line(
        "TF diameters",
        format!("{:.4} x {:.4} x {:.4} um", d[0], d[1], d[2]),
    );
    line(
        "Larmor frequency",
        format!("{:.6e} s^-1", r.larmor_frequency),
    );
    line(
        "|eta(0)| point dipole",
        format!("{:.6e} s^-1", r.eta0_dipole),
    );
    line(
        "|eta(0)| infinite wire",
        format!("{:.6e} s^-1", r.eta0_infinite),
    );
    line(
        "sqrt(N) |eta(0)| dipole",
        format!("{:.6e} s^-1", r.constant_eta_estimate),
    );
    line(
        &format!("Omega ({geometry})"),
        format!("{:.6e} s^-1", r.omega_computed),
    );
    if r.omega_overridden {
        line("Omega (override)", format!("{:.6e} s^-1", r.omega));
    }
    line("kappa", format!("{:.6e} s^-1", r.kappa));
    line("Omega_th", format!("{:.6e} s^-1", r.omega_th));
    line("Delta_th", format!("{:.6e} s^-1", r.delta_th));
    line("verdict", r.verdict.label().to_string());
    format!("Figure of merit\n{s}  {}\n", r.unit_note)
}
