//! Example event logs, one per scenario, compiled into the crate.

use tacio_core::query::CompetencyId;
use tacio_core::{Diagnostic, Graph};

use crate::ingest::load_log;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Fixture {
    pub name: &'static str,
    pub text: &'static str,
}

impl Fixture {
    /// Loads the fixture, returning its diagnostics if there are any.
    pub fn load(&self) -> Result<Graph, Vec<Diagnostic>> {
        let (g, diags) = load_log(self.text.as_bytes());
        if diags.is_empty() {
            Ok(g)
        } else {
            Err(diags)
        }
    }

    /// Number of record lines (blank and comment lines excluded).
    pub fn record_count(&self) -> usize {
        self.text
            .lines()
            .filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
            .count()
    }
}

macro_rules! fixture {
    ($const:ident, $name:literal) => {
        pub const $const: Fixture = Fixture {
            name: $name,
            text: include_str!(concat!("../fixtures/", $name, ".jsonl")),
        };
    };
}

fixture!(EMAIL, "email");
fixture!(DISPLAY, "display");
fixture!(SNAPSHOT, "snapshot");
fixture!(TRAFFIC, "traffic");
fixture!(MARINE, "marine");
fixture!(FANOUT, "fanout");
fixture!(PASSWORD_TLS, "password_tls");
fixture!(PASSWORD_HTTP, "password_http");
fixture!(SHARED_DOC, "shared_doc");
fixture!(REPOSITORY, "repository");
fixture!(CORRUPTED_COPY, "corrupted_copy");

pub const ALL: [Fixture; 11] = [
    EMAIL,
    DISPLAY,
    SNAPSHOT,
    TRAFFIC,
    MARINE,
    FANOUT,
    PASSWORD_TLS,
    PASSWORD_HTTP,
    SHARED_DOC,
    REPOSITORY,
    CORRUPTED_COPY,
];

pub fn by_name(name: &str) -> Option<Fixture> {
    ALL.into_iter().find(|f| f.name == name)
}

/// The scenario a canned competency query was written against.
pub fn for_competency(id: CompetencyId) -> Fixture {
    match id {
        CompetencyId::Cq1a => EMAIL,
        CompetencyId::Cq1b => DISPLAY,
        CompetencyId::Cq1c | CompetencyId::Cq3b => SNAPSHOT,
        CompetencyId::Cq2a => TRAFFIC,
        CompetencyId::Cq2b => MARINE,
        CompetencyId::Cq3a => FANOUT,
        CompetencyId::Cq4a => PASSWORD_TLS,
        CompetencyId::Cq4b => PASSWORD_HTTP,
        CompetencyId::Cq5a => SHARED_DOC,
        CompetencyId::Cq5b => REPOSITORY,
    }
}
