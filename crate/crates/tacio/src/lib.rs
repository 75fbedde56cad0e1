//! File formats, shipped fixtures and the command line for the tacio
//! lineage engine.
//!
//! The engine itself lives in `tacio-core`; this crate adds the JSON-lines
//! event log ([`ingest`]), the Turtle subset ([`turtle`]), the example
//! scenarios behind the canned competency queries ([`fixtures`]) and the
//! `tacio` command ([`cli`]).

pub mod cli;
pub mod fixtures;
pub mod ingest;
pub mod turtle;

pub use tacio_core as core;
