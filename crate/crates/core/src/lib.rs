//! Diff-aware mutation testing over the MiniLang subject language.
//!
//! This crate is `no_std` (it needs `alloc`). Everything that touches the
//! filesystem, threads or the command line lives in the `mutest` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod lang;
pub mod mutagen;
pub mod selection;
pub mod diff;
pub mod eval;
pub mod exec;
pub mod project;
pub mod change;
pub mod coupling;
pub mod metrics;
#[cfg(feature = "gen")]
pub mod gen;
