//! Command-line front end of the vector coded caching experiment harness.

pub mod config;
pub mod run;
