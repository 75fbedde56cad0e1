//! Diagnostics shared by graph validation and the text loaders.

use alloc::string::String;
use core::fmt;

use crate::model::EntityId;

/// Closed set of diagnostic codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DiagCode {
    Syntax,
    UnknownKind,
    MissingField,
    InvalidField,
    UnknownField,
    DanglingRef,
    DuplicateId,
    SecondProducer,
    Cycle,
    CompositeSpan,
    SharedSubAct,
    UndeclaredPrefix,
    Unsupported,
}

impl DiagCode {
    pub const fn as_str(self) -> &'static str {
        match self {
            DiagCode::Syntax => "SYNTAX",
            DiagCode::UnknownKind => "UNKNOWN_KIND",
            DiagCode::MissingField => "MISSING_FIELD",
            DiagCode::InvalidField => "INVALID_FIELD",
            DiagCode::UnknownField => "UNKNOWN_FIELD",
            DiagCode::DanglingRef => "DANGLING_REF",
            DiagCode::DuplicateId => "DUPLICATE_ID",
            DiagCode::SecondProducer => "SECOND_PRODUCER",
            DiagCode::Cycle => "CYCLE",
            DiagCode::CompositeSpan => "COMPOSITE_SPAN",
            DiagCode::SharedSubAct => "SHARED_SUB_ACT",
            DiagCode::UndeclaredPrefix => "UNDECLARED_PREFIX",
            DiagCode::Unsupported => "UNSUPPORTED",
        }
    }
}

impl fmt::Display for DiagCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `Note` diagnostics are informational and never make a load fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Severity {
    Error,
    Note,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    /// 1-based source line, or 0 when the finding has no source position.
    pub line: usize,
    pub code: DiagCode,
    pub severity: Severity,
    /// Entity the finding is about, when there is one.
    pub subject: Option<EntityId>,
    pub message: String,
}

impl Diagnostic {
    pub fn new(line: usize, code: DiagCode, message: impl Into<String>) -> Self {
        Diagnostic {
            line,
            code,
            severity: Severity::Error,
            subject: None,
            message: message.into(),
        }
    }

    pub fn about(mut self, subject: EntityId) -> Self {
        self.subject = Some(subject);
        self
    }

    pub fn note(mut self) -> Self {
        self.severity = Severity::Note;
        self
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.line > 0 {
            write!(f, "line {}: ", self.line)?;
        }
        write!(f, "{}: {}", self.code, self.message)
    }
}

/// Sorts by `(line, code)` and then by message so output is fully
/// deterministic.
pub fn sort_diagnostics(diags: &mut [Diagnostic]) {
    diags.sort_by(|a, b| {
        (a.line, a.code, &a.message, &a.subject).cmp(&(b.line, b.code, &b.message, &b.subject))
    });
}
