//! Library surface of the experiment runner; the `dsigma` binary is a thin
//! wrapper around these modules.

pub mod config;
pub mod record;
pub mod tasks;
