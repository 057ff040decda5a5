//! Core library of the `nbhd` toolkit: finite graphs with loops, the
//! constructions built from paths-with-loops quotients (generalized
//! Mycielskians, exponential graphs), fold reductions with verifiable
//! certificates, neighborhood/Hom(K2,-) complexes with integer simplicial
//! homology, exact chromatic-number search, and the verification pipelines
//! that tie them together.
//!
//! The crate is `no_std` + `alloc`: everything here is pure computation on
//! owned data. File formats, caching, timing and the command-line front end
//! live in the companion `nbhd-cli` crate.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod bits;
pub mod coloring;
pub mod complexes;
pub mod config;
pub mod error;
pub mod graph;
pub mod reductions;
pub mod verify;

pub use config::Limits;
pub use error::Error;

/// Library version stamped into reports and cache keys.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
