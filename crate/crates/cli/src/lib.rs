//! Sweep runner behind the `qsteer` command: run descriptions, parallel
//! parameter scans, output tables and figure presets.

pub mod check;
pub mod config;
pub mod emit;
pub mod error;
pub mod oracle;
pub mod presets;
pub mod quantity;
pub mod sweep;
