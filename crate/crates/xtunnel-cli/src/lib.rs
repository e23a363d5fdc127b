//! Scenario runner for the xtunnel simulator: config parsing, scenarios and CSV/JSON output.

pub mod config;
pub mod report;
pub mod scenarios;

pub use config::{parse_config, ConfigError, Scenario, ScenarioConfig};
pub use report::{Report, Status};
pub use scenarios::run;

/// Exit code for configuration errors.
pub const EXIT_CONFIG: i32 = 2;
/// Exit code for numerical failures.
pub const EXIT_NUMERICAL: i32 = 3;
