//! Command-line front end: scenario files, figure presets, CSV/SVG output and
//! verification runs.

pub mod commands;
pub mod error;
pub mod plot;
pub mod presets;
pub mod scenario;
pub mod verify;

pub use commands::{run, Cli, Outcome};
pub use error::{CliError, Result};
