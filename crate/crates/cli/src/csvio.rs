//! CSV node/edge files and the schema file.
//!
//! Node files have the header `label,pk,prop1,...`: the second column holds
//! the primary-key value, stored under the key name the schema declares for
//! the row's label. Edge files have the header
//! `src_label,src_pk,edge_label,dst_label,dst_pk,prop1,...`. Empty property
//! cells mean the property is absent.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use pgview_core::store::{GraphSchema, LabelKind, NoHooks, NodeId, Properties, PropertyGraph, PropertyValue, StoreError};

pub const EDGE_HEADER: [&str; 5] = ["src_label", "src_pk", "edge_label", "dst_label", "dst_pk"];

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{file}: {source}")]
    Csv { file: &'static str, source: csv::Error },
    #[error("schema: {0}")]
    Schema(StoreError),
    #[error("{file}: bad header: {message}")]
    Header { file: &'static str, message: String },
    #[error("{file} row {row}: {message}")]
    Row { file: &'static str, row: usize, message: String },
    #[error("edges row {row}: no {label} node with primary key {pk}")]
    MissingNode { row: usize, label: String, pk: String },
}

/// A CSV file held in memory.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn read(file: &'static str, input: impl Read) -> Result<Table, LoadError> {
        let mut rdr = csv::ReaderBuilder::new().flexible(true).from_reader(input);
        let header = rdr
            .headers()
            .map_err(|source| LoadError::Csv { file, source })?
            .iter()
            .map(|s| s.trim().to_string())
            .collect();
        let mut rows = Vec::new();
        for rec in rdr.records() {
            let rec = rec.map_err(|source| LoadError::Csv { file, source })?;
            rows.push(rec.iter().map(str::to_string).collect());
        }
        Ok(Table { header, rows })
    }

    fn write(&self, out: impl Write) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// A schema plus node and edge tables, not yet turned into a graph.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub schema: GraphSchema,
    pub nodes: Table,
    pub edges: Table,
}

fn open(path: &Path) -> Result<File, LoadError> {
    File::open(path).map_err(|source| LoadError::Io {
        path: path.display().to_string(),
        source,
    })
}

impl Dataset {
    pub fn read(nodes: impl Read, edges: impl Read, schema: GraphSchema) -> Result<Dataset, LoadError> {
        let nodes = Table::read("nodes", nodes)?;
        let edges = Table::read("edges", edges)?;
        if nodes.header.len() < 2 || nodes.header[0] != "label" {
            return Err(LoadError::Header {
                file: "nodes",
                message: format!("expected `label,pk,...`, found `{}`", nodes.header.join(",")),
            });
        }
        if edges.header.len() < 5 || edges.header[..5] != EDGE_HEADER {
            return Err(LoadError::Header {
                file: "edges",
                message: format!("expected `{},...`, found `{}`", EDGE_HEADER.join(","), edges.header.join(",")),
            });
        }
        Ok(Dataset { schema, nodes, edges })
    }

    pub fn read_files(nodes: &Path, edges: &Path, schema: &Path) -> Result<Dataset, LoadError> {
        let mut text = String::new();
        open(schema)?
            .read_to_string(&mut text)
            .map_err(|source| LoadError::Io {
                path: schema.display().to_string(),
                source,
            })?;
        let schema = GraphSchema::parse(&text).map_err(LoadError::Schema)?;
        Dataset::read(open(nodes)?, open(edges)?, schema)
    }

    /// Writes `nodes.csv`, `edges.csv` and `schema.txt` into `dir`.
    pub fn write_dir(&self, dir: &Path) -> std::io::Result<()> {
        std::fs::create_dir_all(dir)?;
        self.nodes.write(File::create(dir.join("nodes.csv"))?)?;
        self.edges.write(File::create(dir.join("edges.csv"))?)?;
        std::fs::write(dir.join("schema.txt"), self.schema.to_text())
    }

    pub fn write(&self, nodes: impl Write, edges: impl Write) -> csv::Result<()> {
        self.nodes.write(nodes)?;
        self.edges.write(edges)
    }

    pub fn to_graph(&self) -> Result<PropertyGraph, LoadError> {
        let mut g = PropertyGraph::new(self.schema.clone());
        for (i, r) in self.nodes.rows.iter().enumerate() {
            let row = i + 1;
            let bad = |message: String| LoadError::Row { file: "nodes", row, message };
            if r.len() != self.nodes.header.len() {
                return Err(bad(format!("expected {} fields, found {}", self.nodes.header.len(), r.len())));
            }
            let label = r[0].as_str();
            let pk_name = self
                .schema
                .primary_key_of(label)
                .ok_or_else(|| bad(format!("`{label}` is not a node label")))?;
            if r[1].is_empty() {
                return Err(bad("empty primary key".into()));
            }
            let mut props = properties(&self.nodes.header[2..], &r[2..]);
            props.insert(pk_name.to_string(), PropertyValue::infer(&r[1]));
            g.create_node(label, props).map_err(|e| bad(e.to_string()))?;
        }
        for (i, r) in self.edges.rows.iter().enumerate() {
            let row = i + 1;
            let bad = |message: String| LoadError::Row { file: "edges", row, message };
            if r.len() != self.edges.header.len() {
                return Err(bad(format!("expected {} fields, found {}", self.edges.header.len(), r.len())));
            }
            let endpoint = |label: &str, pk: &str| -> Result<NodeId, LoadError> {
                g.lookup_pk(label, &PropertyValue::infer(pk))
                    .map_err(|e| bad(e.to_string()))?
                    .ok_or_else(|| LoadError::MissingNode {
                        row,
                        label: label.to_string(),
                        pk: pk.to_string(),
                    })
            };
            let src = endpoint(&r[0], &r[1])?;
            let dst = endpoint(&r[3], &r[4])?;
            let props = properties(&self.edges.header[5..], &r[5..]);
            g.create_edge(src, dst, &r[2], props, &mut NoHooks)
                .map_err(|e| bad(e.to_string()))?;
        }
        Ok(g)
    }

    /// Tables for the base part of a graph; view edges are left out.
    pub fn from_graph(g: &PropertyGraph) -> Dataset {
        let schema = g.schema();
        let pk_of = |n: NodeId| {
            let node = g.node(n).expect("live node");
            let key = schema.primary_key(node.label).expect("node label");
            (g.label_name(node.label), node.properties[key].to_cell())
        };

        let mut pk_names: Vec<&str> = schema
            .labels()
            .filter_map(|(_, _, k)| match k {
                LabelKind::Node { primary_key } => Some(primary_key.as_str()),
                _ => None,
            })
            .collect();
        pk_names.sort_unstable();
        pk_names.dedup();
        let pk_header = if pk_names.len() == 1 { pk_names[0] } else { "pk" };

        let mut node_props: Vec<String> = Vec::new();
        for n in g.nodes() {
            let key = schema.primary_key(n.label).expect("node label");
            for k in n.properties.keys().filter(|k| *k != key) {
                if !node_props.contains(k) {
                    node_props.push(k.clone());
                }
            }
        }
        node_props.sort();
        let mut nodes = Table {
            header: ["label", pk_header].iter().map(|s| s.to_string()).chain(node_props.iter().cloned()).collect(),
            rows: Vec::new(),
        };
        for n in g.nodes() {
            let (label, pk) = pk_of(n.id);
            let mut row = vec![label.to_string(), pk];
            row.extend(node_props.iter().map(|k| n.properties.get(k).map(PropertyValue::to_cell).unwrap_or_default()));
            nodes.rows.push(row);
        }

        let base = || g.edges().filter(|e| !e.is_view);
        let mut edge_props: Vec<String> = Vec::new();
        for e in base() {
            for k in e.properties.keys() {
                if !edge_props.contains(k) {
                    edge_props.push(k.clone());
                }
            }
        }
        edge_props.sort();
        let mut edges = Table {
            header: EDGE_HEADER.iter().map(|s| s.to_string()).chain(edge_props.iter().cloned()).collect(),
            rows: Vec::new(),
        };
        for e in base() {
            let (sl, sk) = pk_of(e.src);
            let (dl, dk) = pk_of(e.dst);
            let mut row = vec![sl.to_string(), sk, g.label_name(e.label).to_string(), dl.to_string(), dk];
            row.extend(edge_props.iter().map(|k| e.properties.get(k).map(PropertyValue::to_cell).unwrap_or_default()));
            edges.rows.push(row);
        }

        let mut base_schema = GraphSchema::new();
        for (_, name, kind) in schema.labels() {
            match kind {
                LabelKind::Node { primary_key } => base_schema = base_schema.with_node_label(name, primary_key),
                LabelKind::Edge => base_schema = base_schema.with_edge_label(name),
                LabelKind::View => {}
            }
        }
        Dataset {
            schema: base_schema,
            nodes,
            edges,
        }
    }
}

fn properties(names: &[String], cells: &[String]) -> Properties {
    names
        .iter()
        .zip(cells)
        .filter(|(_, c)| !c.is_empty())
        .map(|(k, c)| (k.clone(), PropertyValue::infer(c)))
        .collect()
}

/// Node and edge counts per label, in schema order, skipping view labels.
pub fn label_counts(g: &PropertyGraph) -> Vec<(String, u64)> {
    g.schema()
        .labels()
        .filter_map(|(id, name, kind)| {
            let c = g.label_count(id);
            match kind {
                LabelKind::Node { .. } => Some((name.to_string(), c.nodes)),
                LabelKind::Edge => Some((name.to_string(), c.edges)),
                LabelKind::View => None,
            }
        })
        .collect()
}
