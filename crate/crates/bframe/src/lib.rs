//! Instance files, reports and the command-line driver around `bframe-core`.

pub mod cli;
pub mod instance;
pub mod oracle;
pub mod report;
pub mod suite;

pub use cli::run_command;
