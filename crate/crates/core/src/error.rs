use crate::lang::LangError;
use crate::store::StoreError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error(transparent)]
    Lang(#[from] LangError),
    #[error("placeholder `${0}` was not instantiated")]
    Placeholder(String),
    #[error("variable `{var}` is bound to a {found}, not a {expected}")]
    TypeMismatch {
        var: String,
        expected: &'static str,
        found: &'static str,
    },
    #[error("cannot create {0}")]
    InvalidCreate(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("a view named `{0}` already exists")]
    DuplicateViewName(String),
    #[error("invalid view definition: {0}")]
    InvalidViewDefinition(String),
    #[error("no view named `{0}`")]
    NoSuchView(String),
    #[error("match result is incomplete")]
    IncompleteMatch,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
