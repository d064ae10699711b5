//! Command-line harness around `optojc-core`: config parsing, built-in
//! scenarios, route comparison and atomic output.

pub mod compare;
pub mod config;
pub mod error;
pub mod output;
pub mod runner;
pub mod scenarios;
