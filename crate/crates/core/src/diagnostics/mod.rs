//! Numerical evidence for and against weak mixing: eigenvalue trackers,
//! rigidity exclusion scans and correlation averages. Floating point only.

pub mod correlation;
pub mod exclusion;
pub mod tracker;

pub use correlation::{correlation_cesaro, sobol_directions, CorrelationCurve, CorrelationOptions, Observable};
pub use exclusion::{replay_exclusions, rigidity_exclusion_scan, ExclusionReport, Replay};
pub use tracker::{default_transversal, veech_tracker, TrackerStep, TrackerTrace};

#[cfg(test)]
mod tests;
