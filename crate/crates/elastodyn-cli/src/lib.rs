//! Experiment harness around the solver library: pinned experiment
//! presets, configured runs with exact snapshot times, CSV/JSON output,
//! error analysis against exact wave fans, and the seeded histogram
//! study.

pub mod analysis;
pub mod config;
pub mod experiments;
pub mod output;
pub mod runner;
