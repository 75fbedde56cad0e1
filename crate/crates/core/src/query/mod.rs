//! Basic graph pattern queries over the triple view.
//!
//! The accepted language is a small SPARQL subset: `PREFIX` declarations,
//! `SELECT [DISTINCT] (?vars | *)`, and a `WHERE { ... }` block of triple
//! patterns using `a`, `;` and `,` abbreviations. Evaluation is a natural
//! join of the per-pattern matches.

mod competency;
mod eval;
mod parse;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::rdf::{RdfError, Term};

pub use competency::{run_competency, CompetencyId};
pub use eval::{evaluate, evaluate_naive, resolve, ResolvedPattern, Slot};
pub use parse::parse_query;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PatternTerm {
    Var(String),
    Iri(String),
    Prefixed { prefix: String, local: String },
    Literal(String),
}

impl PatternTerm {
    pub fn var(&self) -> Option<&str> {
        match self {
            PatternTerm::Var(v) => Some(v),
            _ => None,
        }
    }
}

impl fmt::Display for PatternTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatternTerm::Var(v) => write!(f, "?{v}"),
            PatternTerm::Iri(i) => write!(f, "<{i}>"),
            PatternTerm::Prefixed { prefix, local } => write!(f, "{prefix}:{local}"),
            PatternTerm::Literal(l) => write!(f, "\"{}\"", crate::syntax::escape_literal(l)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TriplePattern {
    pub subject: PatternTerm,
    pub predicate: PatternTerm,
    pub object: PatternTerm,
}

impl TriplePattern {
    pub fn new(subject: PatternTerm, predicate: PatternTerm, object: PatternTerm) -> Self {
        TriplePattern {
            subject,
            predicate,
            object,
        }
    }

    pub fn terms(&self) -> [&PatternTerm; 3] {
        [&self.subject, &self.predicate, &self.object]
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Projection {
    Star,
    Vars(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BgpQuery {
    /// Declarations made by the query text, in order. They extend (and may
    /// rebind) the standard prefix table.
    pub prefixes: Vec<(String, String)>,
    pub projection: Projection,
    pub distinct: bool,
    pub patterns: Vec<TriplePattern>,
}

impl BgpQuery {
    /// Variables in order of first appearance in the patterns.
    pub fn pattern_vars(&self) -> Vec<&str> {
        let mut seen = Vec::new();
        for p in &self.patterns {
            for v in p.terms().into_iter().filter_map(PatternTerm::var) {
                if !seen.contains(&v) {
                    seen.push(v);
                }
            }
        }
        seen
    }

    /// Result columns: the requested variables, or every pattern variable
    /// for `*`.
    pub fn columns(&self) -> Vec<String> {
        match &self.projection {
            Projection::Vars(vars) => vars.clone(),
            Projection::Star => self.pattern_vars().into_iter().map(String::from).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BindingTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Term>>,
}

impl BindingTable {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Values of one column across all rows.
    pub fn values<'a>(&'a self, name: &str) -> impl Iterator<Item = &'a Term> + 'a {
        let idx = self.column(name);
        self.rows.iter().filter_map(move |r| idx.map(|i| &r[i]))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub expected: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "line {}, column {}: expected {}",
            self.line, self.column, self.expected
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QueryError {
    #[error("query parse error at {0}")]
    Parse(ParseError),
    #[error("undeclared prefix `{0}:`")]
    UnknownPrefix(String),
    #[error("unknown competency question `{0}`")]
    UnknownCompetencyId(String),
    #[error(transparent)]
    Graph(#[from] RdfError),
}

impl From<ParseError> for QueryError {
    fn from(e: ParseError) -> Self {
        QueryError::Parse(e)
    }
}
