//! Poles of G⁺, amplification thresholds, gain maps and the time-domain propagator.

mod gain;
mod poles;
mod threshold;
mod trace;

pub use gain::{gain_map, stability_margin, GainCell, GainMap};
pub use poles::{
    find_poles, polish, Pole, PoleDiagnostics, PoleSet, SearchRect, DEDUP_TOL, RESIDUAL_TOL,
};
pub use threshold::{
    principal_value, threshold_detuning, threshold_exact, threshold_omega, threshold_report,
    ExactThreshold, GrowthOptimum, ThresholdReport, ThresholdScan,
};
pub use trace::{propagator_time, propagator_time_with, time_grid, PropagatorTrace, TraceOptions};
