//! Command-line front end and HTTP configuration service for splforge.

pub mod commands;
pub mod service;

pub use commands::Outcome;
