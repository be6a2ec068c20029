//! Command-line driver for the `rabi-core` models.
//!
//! Every command is a plain function from a [`config::RunConfig`] to an
//! [`commands::Output`], so the binary is a thin wrapper around this crate.

pub mod app;
pub mod commands;
pub mod config;
pub mod data;
pub mod error;
pub mod plot;
pub mod table;
pub mod verify;

pub use error::CliError;
