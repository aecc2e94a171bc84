//! Support library for the `dialectic` command-line experiment runner.

pub mod csvio;
pub mod experiment;
pub mod mb;
pub mod model;
pub mod pgm;
pub mod phantom;
pub mod presets;
pub mod spec;
