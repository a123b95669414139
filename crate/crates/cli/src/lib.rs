//! The `wez` command-line pipeline: experimental design, batch simulation,
//! statistics, filtering, surrogate training and the off-boresight sweep.

mod args;
mod commands;
mod error;
pub mod sweep;

pub use args::{Cli, Command, ConfigKind};
pub use commands::{run, TrainSettings};
pub use error::CliError;
