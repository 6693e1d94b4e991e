//! File formats, parallel drivers and the command line for `esec-core`.
//!
//! - [`scene_io`]: line-delimited JSON scene files.
//! - [`esec_io`]: JSON event-chain files.
//! - [`timing`]: timing tables as CSV.
//! - [`config`]: TOML run configuration.
//! - [`suite`]: generated datasets and input discovery.
//! - [`parallel`]: rayon drivers whose output does not depend on the job count.
//! - [`cli`]: the `esec` command.

pub mod cli;
pub mod config;
pub mod error;
pub mod esec_io;
pub mod parallel;
pub mod scene_io;
pub mod suite;
pub mod timing;

pub use error::{Error, Result};
