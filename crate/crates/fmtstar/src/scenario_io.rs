//! Scenario files: a small TOML dialect, parsed and validated.
//!
//! ```toml
//! name = "corridors"
//! dimension = 2
//! x_init = [0.05, 0.5]
//!
//! [bounds]
//! lo = [0.0, 0.0]
//! hi = [1.0, 1.0]
//!
//! [goal]
//! center = [0.95, 0.5]
//! radius = 0.05
//!
//! [[obstacles]]
//! type = "box"        # or "ball" with center/radius
//! lo = [0.30, 0.00]
//! hi = [0.36, 0.47]
//! ```

use std::path::Path;

use crate::cspace::Scenario;
use crate::error::PlanError;

/// Parse and validate a scenario from TOML text. `origin` names the source
/// in error messages.
pub fn parse_scenario_str(content: &str, origin: &str) -> Result<Scenario, PlanError> {
    let scenario: Scenario = toml::from_str(content).map_err(|e| PlanError::ScenarioParse {
        path: origin.to_string(),
        message: e.to_string(),
    })?;
    scenario.validate()?;
    Ok(scenario)
}

/// Parse and validate a scenario file.
pub fn parse_scenario(path: &Path) -> Result<Scenario, PlanError> {
    let content = std::fs::read_to_string(path)?;
    parse_scenario_str(&content, &path.display().to_string())
}

/// Serialize a scenario back to TOML. Round-trips through
/// [`parse_scenario_str`] to an equal scenario.
pub fn serialize_scenario(scenario: &Scenario) -> Result<String, PlanError> {
    toml::to_string_pretty(scenario).map_err(|e| PlanError::ScenarioParse {
        path: "<serialize>".to_string(),
        message: e.to_string(),
    })
}
