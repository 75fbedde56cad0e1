use alloc::string::String;

use crate::diagnostic::DiagCode;
use crate::model::EntityId;

/// Errors raised by graph mutation and by the lineage and canonicity
/// operations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid entity id {0:?}: ids are non-empty and contain no whitespace or '\"'")]
    InvalidId(String),
    #[error("id `{0}` is already in use")]
    DuplicateId(EntityId),
    #[error("invalid field `{field}` on `{id}`: {reason}")]
    InvalidField {
        id: EntityId,
        field: &'static str,
        reason: String,
    },
    #[error("copying act `{0}` has no reference carrier")]
    MissingReference(EntityId),
    #[error("carrier `{carrier}` is already the output of atomic act `{existing}`; `{act}` cannot also produce it")]
    SecondProducer {
        carrier: EntityId,
        existing: EntityId,
        act: EntityId,
    },
    #[error("defeater target `{0}` is neither an act nor a carrier")]
    DanglingTarget(EntityId),
    #[error("unknown id `{0}`")]
    UnknownId(EntityId),
    #[error("`{0}` is not an act of copying")]
    NotACopyAct(EntityId),
    #[error("`{member}` is not a member of the aggregate rooted at `{root}`")]
    NotAMember { member: EntityId, root: EntityId },
    #[error("`{0}` is not an aggregate root")]
    NotARoot(EntityId),
}

pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    /// Diagnostic code used when this error is reported against a source
    /// record.
    pub fn diag_code(&self) -> DiagCode {
        match self {
            Error::DuplicateId(_) => DiagCode::DuplicateId,
            Error::SecondProducer { .. } => DiagCode::SecondProducer,
            Error::DanglingTarget(_) | Error::UnknownId(_) => DiagCode::DanglingRef,
            Error::MissingReference(_) => DiagCode::MissingField,
            Error::InvalidId(_)
            | Error::InvalidField { .. }
            | Error::NotACopyAct(_)
            | Error::NotAMember { .. }
            | Error::NotARoot(_) => DiagCode::InvalidField,
        }
    }
}
