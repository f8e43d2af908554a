#![allow(dead_code)]

pub mod oneill;
pub mod oracle;

use clairaut_core::scenario_file::{bundled, ScenarioFile};
use clairaut_core::SubmersionScenario;

pub fn scenario(name: &str) -> SubmersionScenario {
    ScenarioFile::from_json(bundled(name).expect("bundled scenario"))
        .and_then(|f| f.build())
        .expect("bundled scenario builds")
}

/// Scenario with its sample count overridden.
pub fn scenario_with_count(name: &str, count: usize) -> SubmersionScenario {
    let mut s = scenario(name);
    s.sampling.count = count;
    s
}
