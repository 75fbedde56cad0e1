//! Lineage and canonicity engine for copies of information carriers.
//!
//! The crate keeps a typed in-memory graph of content items, the carriers
//! that bear them, and the acts of encoding and copying that produce new
//! carriers. On top of that graph it derives copy lineage (descendant and
//! ancestor closure, aggregates of copies), decides which copies are
//! canonical under a defeater model, maps everything onto an RDF-style
//! triple view, and evaluates basic graph pattern queries over that view.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, IO and the
//! command line live in the companion `tacio` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod canonicity;
pub mod diagnostic;
pub mod error;
pub mod lineage;
pub mod model;
pub mod query;
pub mod rdf;
mod scc;
pub mod syntax;

pub use canonicity::{CanonicityConfig, CanonicityVerdict, Fidelity, Route};
pub use diagnostic::{DiagCode, Diagnostic, Severity};
pub use error::Error;
pub use lineage::{Aggregate, AggregateClass, CopyClass, LineageIndex};
pub use model::{
    ActKind, Carrier, ContentItem, Defeater, DefeaterKind, EncodingAct, EntityId, Graph, Icse,
};
pub use rdf::{Term, Triple};
