//! File formats and command implementations behind the `subord` binary.

pub mod commands;
pub mod config;
pub mod literal;
pub mod measure_file;
pub mod record;
