//! Scenario runner for the dual-triangle manipulator toolkit: parses a TOML
//! config, runs named experiments, and writes deterministic CSV or JSON
//! tables.

pub mod config;
pub mod scenarios;
pub mod table;

pub use config::{ConfigError, ScenarioConfig};
pub use scenarios::{run_scenario, ScenarioError, SCENARIOS};
pub use table::{ResultTable, Value};
