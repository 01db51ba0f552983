//! HTTP API and command line for `dispo-core`.

pub mod api;
pub mod cli;
pub mod config;
