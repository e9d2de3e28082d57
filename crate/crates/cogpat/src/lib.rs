//! File formats, report artifacts and the `cogpat` command-line tool built
//! on [`cogpat_core`].

pub mod cli;
mod commands;
pub mod config;
pub mod demo;
pub mod formats;
pub mod report;
