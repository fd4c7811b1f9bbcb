//! Scenario configuration, runners and acceptance summaries.

pub mod config;
pub mod criteria;
pub mod scenarios;
pub mod summary;

pub use config::{ConfigError, ScenarioConfig, ScenarioKind};
pub use scenarios::{exit_code, run_scenario, RunError};
pub use summary::{Property, Summary};
