use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use super::schema::{GraphSchema, LabelId, LabelKind};
use super::value::PropertyValue;
use super::StoreError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub u64);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EdgeId(pub u64);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

pub type Properties = BTreeMap<String, PropertyValue>;

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: NodeId,
    pub label: LabelId,
    pub properties: Properties,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub id: EdgeId,
    pub src: NodeId,
    pub dst: NodeId,
    pub label: LabelId,
    pub properties: Properties,
    pub is_view: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Out,
    In,
    Both,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LabelCount {
    pub nodes: u64,
    pub edges: u64,
}

/// What view maintenance did in response to one mutation.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct MaintenanceOutcome {
    pub view_edges_created: u64,
    pub view_edges_deleted: u64,
    pub db_hits: u64,
}

impl std::ops::AddAssign for MaintenanceOutcome {
    fn add_assign(&mut self, rhs: Self) {
        self.view_edges_created += rhs.view_edges_created;
        self.view_edges_deleted += rhs.view_edges_deleted;
        self.db_hits += rhs.db_hits;
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct DeletionSummary {
    pub nodes_removed: u64,
    /// Base edges detached together with a deleted node, or the deleted edge.
    pub incident_edges_removed: u64,
    pub view_edges_removed: u64,
    pub maintenance: MaintenanceOutcome,
}

/// Callbacks fired by the mutation primitives at the points where view
/// maintenance has to run. Deletions call the hook while the element is still
/// visible; edge creation calls it once the edge exists.
pub trait MaintenanceHooks {
    type Error: From<StoreError>;

    fn before_delete_node(
        &mut self,
        graph: &mut PropertyGraph,
        node: NodeId,
    ) -> Result<MaintenanceOutcome, Self::Error>;

    fn after_create_edge(
        &mut self,
        graph: &mut PropertyGraph,
        edge: EdgeId,
    ) -> Result<MaintenanceOutcome, Self::Error>;

    fn before_delete_edge(
        &mut self,
        graph: &mut PropertyGraph,
        edge: EdgeId,
    ) -> Result<MaintenanceOutcome, Self::Error>;
}

/// Hooks for a graph without views.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoHooks;

impl MaintenanceHooks for NoHooks {
    type Error = StoreError;

    fn before_delete_node(&mut self, _: &mut PropertyGraph, _: NodeId) -> Result<MaintenanceOutcome, StoreError> {
        Ok(MaintenanceOutcome::default())
    }

    fn after_create_edge(&mut self, _: &mut PropertyGraph, _: EdgeId) -> Result<MaintenanceOutcome, StoreError> {
        Ok(MaintenanceOutcome::default())
    }

    fn before_delete_edge(&mut self, _: &mut PropertyGraph, _: EdgeId) -> Result<MaintenanceOutcome, StoreError> {
        Ok(MaintenanceOutcome::default())
    }
}

type AdjList = Vec<(LabelId, Vec<(EdgeId, NodeId)>)>;

#[derive(Debug, Clone, Default)]
struct Adjacency {
    out: AdjList,
    inc: AdjList,
}

fn adj_insert(list: &mut AdjList, label: LabelId, entry: (EdgeId, NodeId)) {
    let slot = match list.iter().position(|(l, _)| *l == label) {
        Some(i) => &mut list[i].1,
        None => {
            list.push((label, Vec::new()));
            &mut list.last_mut().unwrap().1
        }
    };
    match slot.last() {
        Some((last, _)) if *last > entry.0 => {
            let at = slot.partition_point(|(e, _)| *e < entry.0);
            slot.insert(at, entry);
        }
        _ => slot.push(entry),
    }
}

fn adj_remove(list: &mut AdjList, label: LabelId, edge: EdgeId) {
    if let Some(i) = list.iter().position(|(l, _)| *l == label) {
        let slot = &mut list[i].1;
        if let Ok(at) = slot.binary_search_by(|(e, _)| e.cmp(&edge)) {
            slot.remove(at);
        }
        if slot.is_empty() {
            list.swap_remove(i);
        }
    }
}

fn adj_slice(list: &AdjList, label: LabelId) -> &[(EdgeId, NodeId)] {
    list.iter()
        .find(|(l, _)| *l == label)
        .map(|(_, v)| v.as_slice())
        .unwrap_or(&[])
}

#[derive(Debug, Clone)]
enum Undo {
    NodeInserted(NodeId),
    NodeRemoved(Node),
    EdgeInserted(EdgeId),
    EdgeRemoved(Edge),
}

/// In-memory property graph: single-label nodes and edges, a primary-key
/// index per node label, per-label membership sets and adjacency lists kept
/// in ascending edge-id order.
#[derive(Debug, Clone)]
pub struct PropertyGraph {
    schema: GraphSchema,
    nodes: Vec<Option<Node>>,
    edges: Vec<Option<Edge>>,
    adjacency: Vec<Adjacency>,
    pk_index: HashMap<(LabelId, PropertyValue), NodeId>,
    label_nodes: Vec<BTreeSet<NodeId>>,
    label_edges: Vec<BTreeSet<EdgeId>>,
    live_nodes: usize,
    live_edges: usize,
    journal: Option<Vec<Undo>>,
}

impl PropertyGraph {
    pub fn new(schema: GraphSchema) -> Self {
        let labels = schema.capacity();
        PropertyGraph {
            schema,
            nodes: Vec::new(),
            edges: Vec::new(),
            adjacency: Vec::new(),
            pk_index: HashMap::new(),
            label_nodes: vec![BTreeSet::new(); labels],
            label_edges: vec![BTreeSet::new(); labels],
            live_nodes: 0,
            live_edges: 0,
            journal: None,
        }
    }

    pub fn schema(&self) -> &GraphSchema {
        &self.schema
    }

    pub fn node_count(&self) -> usize {
        self.live_nodes
    }

    pub fn edge_count(&self) -> usize {
        self.live_edges
    }

    pub fn node(&self, id: NodeId) -> Option<&Node> {
        self.nodes.get(id.0 as usize).and_then(Option::as_ref)
    }

    pub fn edge(&self, id: EdgeId) -> Option<&Edge> {
        self.edges.get(id.0 as usize).and_then(Option::as_ref)
    }

    pub fn contains_node(&self, id: NodeId) -> bool {
        self.node(id).is_some()
    }

    pub fn label_name(&self, id: LabelId) -> &str {
        self.schema.name(id)
    }

    pub fn resolve_label(&self, name: &str) -> Result<LabelId, StoreError> {
        self.schema
            .resolve(name)
            .ok_or_else(|| StoreError::UnknownLabel(name.to_string()))
    }

    /// Live node and edge counts for a label.
    pub fn label_count(&self, label: LabelId) -> LabelCount {
        LabelCount {
            nodes: self.label_nodes.get(label.0 as usize).map_or(0, |s| s.len() as u64),
            edges: self.label_edges.get(label.0 as usize).map_or(0, |s| s.len() as u64),
        }
    }

    pub fn nodes(&self) -> impl Iterator<Item = &Node> + '_ {
        self.nodes.iter().flatten()
    }

    pub fn edges(&self) -> impl Iterator<Item = &Edge> + '_ {
        self.edges.iter().flatten()
    }

    /// Live node ids of one label, ascending.
    pub fn nodes_with_label(&self, label: LabelId) -> impl Iterator<Item = NodeId> + '_ {
        self.label_nodes
            .get(label.0 as usize)
            .into_iter()
            .flat_map(|s| s.iter().copied())
    }

    /// Live edge ids of one label, ascending.
    pub fn edges_with_label(&self, label: LabelId) -> impl Iterator<Item = EdgeId> + '_ {
        self.label_edges
            .get(label.0 as usize)
            .into_iter()
            .flat_map(|s| s.iter().copied())
    }

    pub fn lookup_pk(&self, label: &str, value: &PropertyValue) -> Result<Option<NodeId>, StoreError> {
        let id = self.resolve_label(label)?;
        if self.schema.primary_key(id).is_none() {
            return Err(StoreError::LabelKindMismatch {
                label: label.to_string(),
                expected: "node",
            });
        }
        Ok(self.lookup_pk_id(id, value))
    }

    pub(crate) fn lookup_pk_id(&self, label: LabelId, value: &PropertyValue) -> Option<NodeId> {
        // Avoid cloning the key: HashMap lookup needs an owned tuple here.
        self.pk_index.get(&(label, value.clone())).copied()
    }

    /// Incident edges with their far endpoint, in ascending edge-id order.
    /// Without a label filter, view edges are excluded.
    pub fn incident_edges(
        &self,
        node: NodeId,
        direction: Direction,
        label: Option<&str>,
    ) -> Result<Vec<(EdgeId, NodeId)>, StoreError> {
        if !self.contains_node(node) {
            return Err(StoreError::NoSuchNode(node));
        }
        let filter = match label {
            Some(name) => match self.schema.resolve(name) {
                Some(id) => Some(id),
                None => return Ok(Vec::new()),
            },
            None => None,
        };
        let mut out = Vec::new();
        self.visit_incident(node, direction, filter, |e, n| {
            out.push((e, n));
            true
        });
        Ok(out)
    }

    /// Calls `f(edge, neighbor)` for each incident edge in ascending id order
    /// until it returns false. `node` must be live.
    pub(crate) fn visit_incident(
        &self,
        node: NodeId,
        direction: Direction,
        filter: Option<LabelId>,
        mut f: impl FnMut(EdgeId, NodeId) -> bool,
    ) {
        let adj = &self.adjacency[node.0 as usize];
        match (direction, filter) {
            (Direction::Out, Some(l)) => {
                for &(e, n) in adj_slice(&adj.out, l) {
                    if !f(e, n) {
                        return;
                    }
                }
            }
            (Direction::In, Some(l)) => {
                for &(e, n) in adj_slice(&adj.inc, l) {
                    if !f(e, n) {
                        return;
                    }
                }
            }
            (Direction::Both, Some(l)) => {
                merge_visit(adj_slice(&adj.out, l), adj_slice(&adj.inc, l), f);
            }
            (_, None) => {
                let mut all: Vec<(EdgeId, NodeId)> = Vec::new();
                let lists: &[&AdjList] = match direction {
                    Direction::Out => &[&adj.out],
                    Direction::In => &[&adj.inc],
                    Direction::Both => &[&adj.out, &adj.inc],
                };
                for list in lists {
                    for (l, entries) in list.iter() {
                        if !self.schema.is_view(*l) {
                            all.extend_from_slice(entries);
                        }
                    }
                }
                all.sort_unstable_by_key(|(e, _)| *e);
                all.dedup_by_key(|(e, _)| *e);
                for (e, n) in all {
                    if !f(e, n) {
                        return;
                    }
                }
            }
        }
    }

    pub fn create_node(&mut self, label: &str, properties: Properties) -> Result<NodeId, StoreError> {
        let label_id = self.resolve_label(label)?;
        let pk = match self.schema.kind(label_id) {
            LabelKind::Node { primary_key } => primary_key.clone(),
            _ => {
                return Err(StoreError::LabelKindMismatch {
                    label: label.to_string(),
                    expected: "node",
                })
            }
        };
        let pk_value = properties
            .get(&pk)
            .cloned()
            .ok_or_else(|| StoreError::MissingPrimaryKey {
                label: label.to_string(),
                key: pk.clone(),
            })?;
        if self.pk_index.contains_key(&(label_id, pk_value.clone())) {
            return Err(StoreError::DuplicatePrimaryKey {
                label: label.to_string(),
                value: pk_value,
            });
        }
        let id = NodeId(self.nodes.len() as u64);
        self.nodes.push(None);
        self.adjacency.push(Adjacency::default());
        self.attach_node(Node {
            id,
            label: label_id,
            properties,
        });
        self.record(Undo::NodeInserted(id));
        Ok(id)
    }

    /// Deletes a node together with its incident edges. The delete-node hook
    /// runs first against the unmodified graph; detaching incident edges
    /// afterwards does not fire edge hooks.
    pub fn delete_node<H: MaintenanceHooks>(
        &mut self,
        id: NodeId,
        hooks: &mut H,
    ) -> Result<DeletionSummary, H::Error> {
        if !self.contains_node(id) {
            return Err(StoreError::NoSuchNode(id).into());
        }
        self.atomically(|g| {
            let maintenance = hooks.before_delete_node(g, id)?;
            let mut incident: Vec<EdgeId> = Vec::new();
            g.visit_incident_all(id, |e| incident.push(e));
            incident.sort_unstable();
            incident.dedup();
            let mut summary = DeletionSummary {
                nodes_removed: 1,
                view_edges_removed: maintenance.view_edges_deleted,
                maintenance,
                ..Default::default()
            };
            for e in incident {
                let edge = g.detach_edge(e);
                if edge.is_view {
                    summary.view_edges_removed += 1;
                } else {
                    summary.incident_edges_removed += 1;
                }
            }
            g.detach_node(id);
            Ok(summary)
        })
    }

    /// Inserts a base edge, then fires the create-edge hook.
    pub fn create_edge<H: MaintenanceHooks>(
        &mut self,
        src: NodeId,
        dst: NodeId,
        label: &str,
        properties: Properties,
        hooks: &mut H,
    ) -> Result<(EdgeId, MaintenanceOutcome), H::Error> {
        let label_id = self.resolve_label(label)?;
        match self.schema.kind(label_id) {
            LabelKind::Edge => {}
            LabelKind::View => return Err(StoreError::ViewLabelReserved(label.to_string()).into()),
            LabelKind::Node { .. } => {
                return Err(StoreError::LabelKindMismatch {
                    label: label.to_string(),
                    expected: "edge",
                }
                .into())
            }
        }
        for n in [src, dst] {
            if !self.contains_node(n) {
                return Err(StoreError::NoSuchNode(n).into());
            }
        }
        self.atomically(|g| {
            let id = g.insert_edge(src, dst, label_id, properties, false);
            let outcome = hooks.after_create_edge(g, id)?;
            Ok((id, outcome))
        })
    }

    /// Fires the delete-edge hook, then removes the edge. View edges are
    /// owned by the view catalog and cannot be deleted here.
    pub fn delete_edge<H: MaintenanceHooks>(
        &mut self,
        id: EdgeId,
        hooks: &mut H,
    ) -> Result<DeletionSummary, H::Error> {
        match self.edge(id) {
            None => return Err(StoreError::NoSuchEdge(id).into()),
            Some(e) if e.is_view => return Err(StoreError::IsViewEdge(id).into()),
            Some(_) => {}
        }
        self.atomically(|g| {
            let maintenance = hooks.before_delete_edge(g, id)?;
            g.detach_edge(id);
            Ok(DeletionSummary {
                nodes_removed: 0,
                incident_edges_removed: 1,
                view_edges_removed: maintenance.view_edges_deleted,
                maintenance,
            })
        })
    }

    /// Runs `f` as one unit: if it fails, every structural change it made is
    /// undone. Identifiers handed out inside `f` are not reissued.
    pub fn atomically<T, E>(&mut self, f: impl FnOnce(&mut Self) -> Result<T, E>) -> Result<T, E> {
        let outer = self.journal.is_none();
        if outer {
            self.journal = Some(Vec::new());
        }
        let mark = self.journal.as_ref().map_or(0, Vec::len);
        let result = f(self);
        if result.is_err() {
            self.rollback_to(mark);
        }
        if outer {
            self.journal = None;
        }
        result
    }

    pub(crate) fn register_view_label(&mut self, name: &str) -> Result<LabelId, StoreError> {
        let id = self.schema.register_view(name)?;
        self.grow_label_tables();
        Ok(id)
    }

    pub(crate) fn unregister_view_label(&mut self, id: LabelId) {
        debug_assert!(self.label_edges[id.0 as usize].is_empty());
        self.schema.unregister_view(id);
    }

    pub(crate) fn insert_view_edge(&mut self, src: NodeId, dst: NodeId, label: LabelId) -> Result<EdgeId, StoreError> {
        debug_assert!(self.schema.is_view(label));
        for n in [src, dst] {
            if !self.contains_node(n) {
                return Err(StoreError::NoSuchNode(n));
            }
        }
        Ok(self.insert_edge(src, dst, label, Properties::new(), true))
    }

    pub(crate) fn remove_view_edge(&mut self, id: EdgeId) -> Result<(), StoreError> {
        match self.edge(id) {
            Some(e) if e.is_view => {
                self.detach_edge(id);
                Ok(())
            }
            Some(_) => Err(StoreError::NoSuchEdge(id)),
            None => Err(StoreError::NoSuchEdge(id)),
        }
    }

    /// Inserts an edge under a registered view label without going through
    /// the view catalog. Only meant for exercising consistency checks.
    #[doc(hidden)]
    pub fn debug_insert_view_edge(&mut self, src: NodeId, dst: NodeId, view: &str) -> Result<EdgeId, StoreError> {
        let label = self.resolve_label(view)?;
        if !self.schema.is_view(label) {
            return Err(StoreError::LabelKindMismatch {
                label: view.to_string(),
                expected: "view",
            });
        }
        self.insert_view_edge(src, dst, label)
    }

    /// Checks every structural invariant by brute force. Used by tests.
    pub fn check_integrity(&self) -> Result<(), String> {
        let mut node_counts = vec![0u64; self.schema.capacity()];
        let mut edge_counts = vec![0u64; self.schema.capacity()];
        let mut live_nodes = 0;
        for (i, n) in self.nodes.iter().enumerate() {
            let Some(n) = n else { continue };
            live_nodes += 1;
            if n.id.0 as usize != i {
                return Err(format!("node slot {i} holds {}", n.id));
            }
            node_counts[n.label.0 as usize] += 1;
            let pk = self.schema.primary_key(n.label).ok_or("node with non-node label")?;
            let v = n.properties.get(pk).ok_or_else(|| format!("{} lacks primary key", n.id))?;
            if self.pk_index.get(&(n.label, v.clone())) != Some(&n.id) {
                return Err(format!("pk index does not map to {}", n.id));
            }
        }
        if self.pk_index.len() != live_nodes {
            return Err("pk index holds dead entries".into());
        }
        let mut live_edges = 0;
        for (i, e) in self.edges.iter().enumerate() {
            let Some(e) = e else { continue };
            live_edges += 1;
            if e.id.0 as usize != i {
                return Err(format!("edge slot {i} holds {}", e.id));
            }
            if !self.contains_node(e.src) || !self.contains_node(e.dst) {
                return Err(format!("{} has a dead endpoint", e.id));
            }
            if e.is_view != self.schema.is_view(e.label) {
                return Err(format!("{} view flag disagrees with its label", e.id));
            }
            edge_counts[e.label.0 as usize] += 1;
            let out = adj_slice(&self.adjacency[e.src.0 as usize].out, e.label);
            let inc = adj_slice(&self.adjacency[e.dst.0 as usize].inc, e.label);
            if !out.contains(&(e.id, e.dst)) || !inc.contains(&(e.id, e.src)) {
                return Err(format!("{} missing from adjacency", e.id));
            }
        }
        let adj_total: usize = self
            .adjacency
            .iter()
            .map(|a| a.out.iter().map(|(_, v)| v.len()).sum::<usize>())
            .sum();
        if adj_total != live_edges {
            return Err("adjacency holds dead edges".into());
        }
        for a in &self.adjacency {
            for (_, v) in a.out.iter().chain(a.inc.iter()) {
                if v.windows(2).any(|w| w[0].0 >= w[1].0) {
                    return Err("adjacency not in ascending edge order".into());
                }
            }
        }
        if live_nodes != self.live_nodes || live_edges != self.live_edges {
            return Err("live counters drifted".into());
        }
        for l in 0..self.schema.capacity() {
            let c = self.label_count(LabelId(l as u32));
            if c.nodes != node_counts[l] || c.edges != edge_counts[l] {
                return Err(format!("label count for {} drifted", self.schema.name(LabelId(l as u32))));
            }
        }
        Ok(())
    }

    fn grow_label_tables(&mut self) {
        let n = self.schema.capacity();
        self.label_nodes.resize_with(n, BTreeSet::new);
        self.label_edges.resize_with(n, BTreeSet::new);
    }

    fn record(&mut self, undo: Undo) {
        if let Some(j) = self.journal.as_mut() {
            j.push(undo);
        }
    }

    fn attach_node(&mut self, node: Node) {
        let id = node.id;
        if let Some(pk) = self.schema.primary_key(node.label) {
            if let Some(v) = node.properties.get(pk) {
                self.pk_index.insert((node.label, v.clone()), id);
            }
        }
        self.label_nodes[node.label.0 as usize].insert(id);
        self.nodes[id.0 as usize] = Some(node);
        self.live_nodes += 1;
    }

    fn detach_node(&mut self, id: NodeId) -> Node {
        let node = self.nodes[id.0 as usize].take().expect("detach of dead node");
        if let Some(pk) = self.schema.primary_key(node.label) {
            if let Some(v) = node.properties.get(pk) {
                self.pk_index.remove(&(node.label, v.clone()));
            }
        }
        self.label_nodes[node.label.0 as usize].remove(&id);
        self.adjacency[id.0 as usize] = Adjacency::default();
        self.live_nodes -= 1;
        self.record(Undo::NodeRemoved(node.clone()));
        node
    }

    fn insert_edge(&mut self, src: NodeId, dst: NodeId, label: LabelId, properties: Properties, is_view: bool) -> EdgeId {
        let id = EdgeId(self.edges.len() as u64);
        self.edges.push(None);
        self.attach_edge(Edge {
            id,
            src,
            dst,
            label,
            properties,
            is_view,
        });
        self.record(Undo::EdgeInserted(id));
        id
    }

    fn attach_edge(&mut self, edge: Edge) {
        adj_insert(&mut self.adjacency[edge.src.0 as usize].out, edge.label, (edge.id, edge.dst));
        adj_insert(&mut self.adjacency[edge.dst.0 as usize].inc, edge.label, (edge.id, edge.src));
        self.label_edges[edge.label.0 as usize].insert(edge.id);
        let slot = edge.id.0 as usize;
        self.edges[slot] = Some(edge);
        self.live_edges += 1;
    }

    fn detach_edge(&mut self, id: EdgeId) -> Edge {
        let edge = self.edges[id.0 as usize].take().expect("detach of dead edge");
        adj_remove(&mut self.adjacency[edge.src.0 as usize].out, edge.label, id);
        adj_remove(&mut self.adjacency[edge.dst.0 as usize].inc, edge.label, id);
        self.label_edges[edge.label.0 as usize].remove(&id);
        self.live_edges -= 1;
        self.record(Undo::EdgeRemoved(edge.clone()));
        edge
    }

    fn visit_incident_all(&self, node: NodeId, mut f: impl FnMut(EdgeId)) {
        let adj = &self.adjacency[node.0 as usize];
        for (_, entries) in adj.out.iter().chain(adj.inc.iter()) {
            for (e, _) in entries {
                f(*e);
            }
        }
    }

    fn rollback_to(&mut self, mark: usize) {
        let Some(mut journal) = self.journal.take() else { return };
        while journal.len() > mark {
            match journal.pop().unwrap() {
                Undo::NodeInserted(id) => {
                    self.detach_node(id);
                }
                Undo::NodeRemoved(node) => self.attach_node(node),
                Undo::EdgeInserted(id) => {
                    self.detach_edge(id);
                }
                Undo::EdgeRemoved(edge) => self.attach_edge(edge),
            }
        }
        self.journal = Some(journal);
    }
}

fn merge_visit(a: &[(EdgeId, NodeId)], b: &[(EdgeId, NodeId)], mut f: impl FnMut(EdgeId, NodeId) -> bool) {
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let take_a = j >= b.len() || (i < a.len() && a[i].0 <= b[j].0);
        let (e, n) = if take_a { a[i] } else { b[j] };
        if take_a {
            i += 1;
            // A self-loop sits in both lists; yield it once.
            if j < b.len() && b[j].0 == e {
                j += 1;
            }
        } else {
            j += 1;
        }
        if !f(e, n) {
            return;
        }
    }
}
