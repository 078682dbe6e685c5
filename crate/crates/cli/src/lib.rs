//! Command-line harness: signal generation, segmentation, evaluation and
//! seeded ensemble experiments.

pub mod commands;
pub mod experiment;
pub mod io;
pub mod methods;
