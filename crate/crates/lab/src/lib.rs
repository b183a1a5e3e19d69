//! Reproducible experiments on hyperspace entropy: each scenario reads one
//! JSON config, writes CSV tables and JSON fits, and judges its results
//! against the expectations declared in the config.

pub mod config;
pub mod error;
pub mod oracle;
pub mod output;
pub mod sample;
pub mod scenarios;

pub use error::{LabError, LabResult};
pub use output::{RunResult, Verdict};
pub use scenarios::{run, Scenario, ALL};

/// Scenarios exercised by `lab selftest`: the exact and structural suites.
pub const SELFTEST: [Scenario; 4] =
    [Scenario::FullshiftCode, Scenario::CodingCrosscheck, Scenario::CylinderCheck, Scenario::IsometryCheck];
