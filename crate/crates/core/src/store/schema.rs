use std::collections::HashMap;

use super::StoreError;

/// Interned label handle. Handles are never reused, even after a view label
/// is unregistered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LabelId(pub u32);

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelKind {
    Node { primary_key: String },
    Edge,
    View,
}

#[derive(Debug, Clone)]
struct LabelEntry {
    name: String,
    kind: LabelKind,
    live: bool,
}

/// Declared node labels (each with its primary-key property), edge labels,
/// and registered view labels.
#[derive(Debug, Clone, Default)]
pub struct GraphSchema {
    entries: Vec<LabelEntry>,
    by_name: HashMap<String, LabelId>,
}

impl GraphSchema {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_node_label(mut self, label: &str, primary_key: &str) -> Self {
        self.declare_node_label(label, primary_key)
            .expect("duplicate label in schema builder");
        self
    }

    pub fn with_edge_label(mut self, label: &str) -> Self {
        self.declare_edge_label(label)
            .expect("duplicate label in schema builder");
        self
    }

    pub fn declare_node_label(&mut self, label: &str, primary_key: &str) -> Result<LabelId, StoreError> {
        self.insert(
            label,
            LabelKind::Node {
                primary_key: primary_key.to_string(),
            },
        )
    }

    pub fn declare_edge_label(&mut self, label: &str) -> Result<LabelId, StoreError> {
        self.insert(label, LabelKind::Edge)
    }

    pub(crate) fn register_view(&mut self, label: &str) -> Result<LabelId, StoreError> {
        self.insert(label, LabelKind::View)
    }

    pub(crate) fn unregister_view(&mut self, id: LabelId) {
        let entry = &mut self.entries[id.0 as usize];
        debug_assert_eq!(entry.kind, LabelKind::View);
        entry.live = false;
        self.by_name.remove(&entry.name);
    }

    fn insert(&mut self, label: &str, kind: LabelKind) -> Result<LabelId, StoreError> {
        if label.is_empty() {
            return Err(StoreError::UnknownLabel(String::new()));
        }
        if self.by_name.contains_key(label) {
            return Err(StoreError::DuplicateLabel(label.to_string()));
        }
        let id = LabelId(self.entries.len() as u32);
        self.entries.push(LabelEntry {
            name: label.to_string(),
            kind,
            live: true,
        });
        self.by_name.insert(label.to_string(), id);
        Ok(id)
    }

    pub fn resolve(&self, label: &str) -> Option<LabelId> {
        self.by_name.get(label).copied()
    }

    pub fn name(&self, id: LabelId) -> &str {
        &self.entries[id.0 as usize].name
    }

    pub fn kind(&self, id: LabelId) -> &LabelKind {
        &self.entries[id.0 as usize].kind
    }

    pub fn is_view(&self, id: LabelId) -> bool {
        matches!(self.kind(id), LabelKind::View)
    }

    pub fn primary_key(&self, id: LabelId) -> Option<&str> {
        match self.kind(id) {
            LabelKind::Node { primary_key } => Some(primary_key),
            _ => None,
        }
    }

    /// Primary key property name for a node label given by name.
    pub fn primary_key_of(&self, label: &str) -> Option<&str> {
        self.resolve(label).and_then(|id| self.primary_key(id))
    }

    pub(crate) fn capacity(&self) -> usize {
        self.entries.len()
    }

    /// Live labels in declaration order.
    pub fn labels(&self) -> impl Iterator<Item = (LabelId, &str, &LabelKind)> {
        self.entries
            .iter()
            .enumerate()
            .filter(|(_, e)| e.live)
            .map(|(i, e)| (LabelId(i as u32), e.name.as_str(), &e.kind))
    }

    /// Parses the schema file format: one line per label, `label,pk_name` for
    /// node labels and a bare `label` for edge labels. Blank lines and lines
    /// starting with `#` are ignored.
    pub fn parse(text: &str) -> Result<GraphSchema, StoreError> {
        let mut schema = GraphSchema::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut parts = line.split(',').map(str::trim);
            let label = parts.next().unwrap_or_default();
            match parts.next().filter(|p| !p.is_empty()) {
                Some(pk) => schema.declare_node_label(label, pk)?,
                None => schema.declare_edge_label(label)?,
            };
        }
        Ok(schema)
    }

    /// Inverse of [`GraphSchema::parse`]; view labels are not written.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (_, name, kind) in self.labels() {
            match kind {
                LabelKind::Node { primary_key } => {
                    out.push_str(&format!("{name},{primary_key}\n"));
                }
                LabelKind::Edge => {
                    out.push_str(name);
                    out.push('\n');
                }
                LabelKind::View => {}
            }
        }
        out
    }
}
