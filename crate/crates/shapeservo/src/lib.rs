//! File formats, run configuration and the experiment commands behind the
//! `shapeservo` binary.

pub mod commands;
pub mod config;
pub mod io;

pub use commands::{cmd_fit, cmd_jacobian_check, cmd_servo, CliError};
pub use config::RunConfig;
