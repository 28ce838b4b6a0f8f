//! File formats, configuration, planning entry points and the benchmark
//! driver around `partgrasp-core`.

pub mod bench;
pub mod config;
pub mod error;
pub mod plan;
pub mod ply;
pub mod records;
pub mod scene_io;

pub use error::{Error, Result};
