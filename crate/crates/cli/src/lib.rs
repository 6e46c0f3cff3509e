//! Command-line driver for the measurement-driven refrigerator: configuration,
//! presets, grid evaluation and CSV/JSON output.

pub mod config;
pub mod error;
pub mod output;
pub mod presets;
pub mod run;

pub use config::{parse_config, parse_config_over, Format, RunConfig};
pub use error::CliError;
pub use run::{run, run_point, Mode, Row, Table};
