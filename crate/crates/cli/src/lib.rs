//! Command-line front end to the twisted-paraproduct laboratory: identity
//! suites, exponent sweeps, counterexample tables, decomposition reports, and
//! CSV/JSON/SVG emission.

pub mod commands;
pub mod config;
pub mod exponent;
pub mod report;
pub mod suites;
pub mod svg;
pub mod sweep;
