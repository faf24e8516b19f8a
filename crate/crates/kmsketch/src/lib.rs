//! Std companion to `kmsketch-core`: CSV datasets, timed reductions, the
//! r-sweep benchmark with CSV/SVG output, and the lemma verification suites.

pub mod bench;
pub mod error;
pub mod io;
pub mod plot;
pub mod timed;
pub mod verify;

pub use error::{Error, Result};
pub use kmsketch_core as core;
