use alloc::string::ToString;
use core::fmt;
use core::str::FromStr;

use super::{evaluate, parse_query, BgpQuery, BindingTable, QueryError};
use crate::model::Graph;
use crate::rdf::to_triples;

/// Identifier of a canned competency question.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CompetencyId {
    Cq1a,
    Cq1b,
    Cq1c,
    Cq2a,
    Cq2b,
    Cq3a,
    Cq3b,
    Cq4a,
    Cq4b,
    Cq5a,
    Cq5b,
}

impl CompetencyId {
    pub const ALL: [CompetencyId; 11] = [
        CompetencyId::Cq1a,
        CompetencyId::Cq1b,
        CompetencyId::Cq1c,
        CompetencyId::Cq2a,
        CompetencyId::Cq2b,
        CompetencyId::Cq3a,
        CompetencyId::Cq3b,
        CompetencyId::Cq4a,
        CompetencyId::Cq4b,
        CompetencyId::Cq5a,
        CompetencyId::Cq5b,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            CompetencyId::Cq1a => "CQ1a",
            CompetencyId::Cq1b => "CQ1b",
            CompetencyId::Cq1c => "CQ1c",
            CompetencyId::Cq2a => "CQ2a",
            CompetencyId::Cq2b => "CQ2b",
            CompetencyId::Cq3a => "CQ3a",
            CompetencyId::Cq3b => "CQ3b",
            CompetencyId::Cq4a => "CQ4a",
            CompetencyId::Cq4b => "CQ4b",
            CompetencyId::Cq5a => "CQ5a",
            CompetencyId::Cq5b => "CQ5b",
        }
    }

    /// One-line description of the scenario the query asks about.
    pub fn scenario(self) -> &'static str {
        match self {
            CompetencyId::Cq1a => "email sent from a laptop to a personal computer",
            CompetencyId::Cq1b => "solid-state drive contents shown on a monitor",
            CompetencyId::Cq1c => "file system snapshot stored on a backup drive",
            CompetencyId::Cq2a => "audio and image traffic data fused by a signal controller",
            CompetencyId::Cq2b => "ocean sensor readings gathered into a marine-life dataset",
            CompetencyId::Cq3a => "one email received by ten machines",
            CompetencyId::Cq3b => "identical snapshots on distinct drives",
            CompetencyId::Cq4a => "password submitted over an encrypted connection",
            CompetencyId::Cq4b => "password submitted over plaintext HTTP",
            CompetencyId::Cq5a => "two authors editing a shared cloud document",
            CompetencyId::Cq5b => "one repository cloned onto distinct machines",
        }
    }

    /// The query text.
    pub fn text(self) -> &'static str {
        match self {
            CompetencyId::Cq1a => include_str!("cq/cq1a.rq"),
            CompetencyId::Cq1b => include_str!("cq/cq1b.rq"),
            CompetencyId::Cq1c => include_str!("cq/cq1c.rq"),
            CompetencyId::Cq2a => include_str!("cq/cq2a.rq"),
            CompetencyId::Cq2b => include_str!("cq/cq2b.rq"),
            CompetencyId::Cq3a => include_str!("cq/cq3a.rq"),
            CompetencyId::Cq3b => include_str!("cq/cq3b.rq"),
            CompetencyId::Cq4a => include_str!("cq/cq4a.rq"),
            CompetencyId::Cq4b => include_str!("cq/cq4b.rq"),
            CompetencyId::Cq5a => include_str!("cq/cq5a.rq"),
            CompetencyId::Cq5b => include_str!("cq/cq5b.rq"),
        }
    }

    pub fn query(self) -> BgpQuery {
        parse_query(self.text()).expect("canned queries parse")
    }
}

impl fmt::Display for CompetencyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CompetencyId {
    type Err = QueryError;

    /// Case-insensitive: `cq2a` and `CQ2A` both name CQ2a.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CompetencyId::ALL
            .into_iter()
            .find(|id| id.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| QueryError::UnknownCompetencyId(s.to_string()))
    }
}

/// Runs the canned query `id` against the triple view of `g`.
pub fn run_competency(id: CompetencyId, g: &Graph) -> Result<BindingTable, QueryError> {
    evaluate(&id.query(), &to_triples(g)?)
}
