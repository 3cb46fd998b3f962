//! Input/output and command-line pipeline for homonym author disambiguation.
//!
//! [`xml`] streams records out of DBLP dumps, [`formats`] holds the canonical
//! on-disk formats, and [`pipeline`] runs the experiments on top of
//! `namesake-core`, writing the JSON documents described in [`report`].

pub mod config;
pub mod error;
pub mod formats;
pub mod pipeline;
pub mod report;
pub mod xml;

pub use error::{AppError, Result};
