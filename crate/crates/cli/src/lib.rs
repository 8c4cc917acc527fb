//! Library half of the scenario runner; the `cavity-dw` binary is a thin
//! wrapper around these modules.

pub mod config;
pub mod manifest;
pub mod scenario;
