//! Shared fixtures for the criterion benchmarks.

use clairaut_core::scenario_file::{bundled, ScenarioFile};
use clairaut_core::SubmersionScenario;

/// A bundled scenario, built.
pub fn scenario(name: &str) -> SubmersionScenario {
    ScenarioFile::from_json(bundled(name).expect("bundled scenario"))
        .and_then(|f| f.build())
        .expect("bundled scenario builds")
}

/// First sample point of a bundled scenario.
pub fn first_point(scn: &SubmersionScenario) -> Vec<f64> {
    scn.sampling.points().into_iter().next().expect("at least one sample")
}
