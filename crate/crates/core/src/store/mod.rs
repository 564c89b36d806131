//! In-memory property graph storage.

mod graph;
mod schema;
mod value;

pub use graph::{
    DeletionSummary, Direction, Edge, EdgeId, LabelCount, MaintenanceHooks, MaintenanceOutcome, Node, NodeId,
    NoHooks, Properties, PropertyGraph,
};
pub use schema::{GraphSchema, LabelId, LabelKind};
pub use value::PropertyValue;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StoreError {
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("label `{0}` is already declared")]
    DuplicateLabel(String),
    #[error("`{label}` is not a {expected} label")]
    LabelKindMismatch { label: String, expected: &'static str },
    #[error("{label} node lacks primary key property `{key}`")]
    MissingPrimaryKey { label: String, key: String },
    #[error("a {label} node with primary key {value} already exists")]
    DuplicatePrimaryKey { label: String, value: PropertyValue },
    #[error("no such node {0}")]
    NoSuchNode(NodeId),
    #[error("no such edge {0}")]
    NoSuchEdge(EdgeId),
    #[error("edge {0} belongs to a view")]
    IsViewEdge(EdgeId),
    #[error("label `{0}` is reserved for a view")]
    ViewLabelReserved(String),
}
