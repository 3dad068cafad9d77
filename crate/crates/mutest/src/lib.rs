//! Filesystem, report formats, parallel execution and the command line for
//! `mutest-core`.

pub mod cli;
pub mod commands;
pub mod config;
pub mod formats;
pub mod history;
pub mod load;
pub mod pool;
