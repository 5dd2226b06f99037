//! CSV node and edge tables.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::File;
use std::io;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::netcore::{
    build_network, conform_waves, EdgeRecord, MultilevelNetwork, NetworkError, NodeLevel, NodeRecord,
    TieLevel,
};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{path}, line {line}: {message}")]
    Malformed { path: PathBuf, line: u64, message: String },
    #[error("{path}: missing column `{column}`")]
    MissingColumn { path: PathBuf, column: String },
    #[error("edge table has {0} waves; at most two are supported")]
    TooManyWaves(usize),
    #[error(transparent)]
    Network(#[from] NetworkError),
}

/// A node table plus the names of its attribute columns.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeTable {
    pub attribute_names: Vec<String>,
    pub nodes: Vec<NodeRecord>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EdgeRow {
    pub edge: EdgeRecord,
    pub wave: u32,
    pub line: u64,
}

fn open(path: &Path) -> Result<csv::Reader<File>, IngestError> {
    let file = File::open(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file))
}

fn columns(
    path: &Path,
    reader: &mut csv::Reader<File>,
    required: &[&str],
) -> Result<(HashMap<String, usize>, Vec<String>), IngestError> {
    let headers = reader.headers().map_err(|source| IngestError::Csv {
        path: path.to_path_buf(),
        source,
    })?;
    let names: Vec<String> = headers.iter().map(str::to_string).collect();
    let index: HashMap<String, usize> = names.iter().enumerate().map(|(k, n)| (n.clone(), k)).collect();
    for c in required {
        if !index.contains_key(*c) {
            return Err(IngestError::MissingColumn {
                path: path.to_path_buf(),
                column: c.to_string(),
            });
        }
    }
    Ok((index, names))
}

fn malformed(path: &Path, line: u64, message: impl Into<String>) -> IngestError {
    IngestError::Malformed {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

fn line_of(record: &csv::StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

fn rows(path: &Path, reader: &mut csv::Reader<File>) -> Result<Vec<csv::StringRecord>, IngestError> {
    reader
        .records()
        .map(|r| {
            r.map_err(|e| match e.position() {
                Some(p) => malformed(path, p.line(), e.to_string()),
                None => IngestError::Csv {
                    path: path.to_path_buf(),
                    source: e,
                },
            })
        })
        .collect()
}

/// Reads `id,level,group` plus any further columns as actor attributes.
pub fn read_nodes(path: &Path) -> Result<NodeTable, IngestError> {
    let mut reader = open(path)?;
    let (index, names) = columns(path, &mut reader, &["id", "level", "group"])?;
    let attribute_names: Vec<String> = names
        .iter()
        .filter(|n| !matches!(n.as_str(), "id" | "level" | "group"))
        .cloned()
        .collect();
    let mut nodes = Vec::new();
    for record in rows(path, &mut reader)? {
        let line = line_of(&record);
        let get = |c: &str| record.get(index[c]).unwrap_or("");
        let id = get("id");
        if id.is_empty() {
            return Err(malformed(path, line, "empty node id"));
        }
        let level: NodeLevel = get("level")
            .parse()
            .map_err(|e: NetworkError| malformed(path, line, e.to_string()))?;
        let group = get("group");
        if group.is_empty() {
            return Err(malformed(path, line, format!("node `{id}` has no group")));
        }
        let mut attributes = BTreeMap::new();
        if level == NodeLevel::Actor {
            for a in &attribute_names {
                let v = get(a);
                if v.is_empty() {
                    return Err(malformed(path, line, format!("actor `{id}` has no value for `{a}`")));
                }
                attributes.insert(a.clone(), v.to_string());
            }
        }
        nodes.push(NodeRecord {
            id: id.to_string(),
            level,
            group: group.to_string(),
            attributes,
        });
    }
    Ok(NodeTable {
        attribute_names,
        nodes,
    })
}

/// Reads `level,from,to[,wave]`; a missing or blank wave means wave 1.
pub fn read_edges(path: &Path) -> Result<Vec<EdgeRow>, IngestError> {
    let mut reader = open(path)?;
    let (index, _) = columns(path, &mut reader, &["level", "from", "to"])?;
    let mut out = Vec::new();
    for record in rows(path, &mut reader)? {
        let line = line_of(&record);
        let get = |c: &str| index.get(c).and_then(|&k| record.get(k)).unwrap_or("");
        let level: TieLevel = get("level")
            .parse()
            .map_err(|_| malformed(path, line, format!("unknown tie level `{}`", get("level"))))?;
        let (from, to) = (get("from"), get("to"));
        if from.is_empty() || to.is_empty() {
            return Err(malformed(path, line, "missing endpoint"));
        }
        let wave = match get("wave") {
            "" => 1,
            w => w
                .parse::<u32>()
                .ok()
                .filter(|w| *w >= 1)
                .ok_or_else(|| malformed(path, line, format!("bad wave `{w}`")))?,
        };
        out.push(EdgeRow {
            edge: EdgeRecord {
                level,
                from: from.to_string(),
                to: to.to_string(),
            },
            wave,
            line,
        });
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct DatasetPaths {
    pub nodes: PathBuf,
    pub edges: PathBuf,
    /// Node table of the second wave; defaults to the first one.
    pub nodes_wave2: Option<PathBuf>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct WaveSummary {
    pub wave: u32,
    pub actors: usize,
    pub objects: usize,
    pub groups: usize,
    pub ties_a: u64,
    pub ties_b: u64,
    pub ties_x: u64,
    pub duplicate_edges: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct IngestSummary {
    pub waves: Vec<WaveSummary>,
    /// Objects removed by the minimum-usage rule.
    pub dropped_objects: usize,
    /// Nodes removed because they are missing from the other wave.
    pub dropped_by_conformance: usize,
}

impl IngestSummary {
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for w in &self.waves {
            s.push_str(&format!(
                "wave {}: {} actors, {} objects, {} groups; ties A {}, B {}, X {}; duplicate edge rows {}\n",
                w.wave, w.actors, w.objects, w.groups, w.ties_a, w.ties_b, w.ties_x, w.duplicate_edges
            ));
        }
        s.push_str(&format!(
            "objects dropped by usage filter: {}\nnodes dropped by wave conformance: {}\n",
            self.dropped_objects, self.dropped_by_conformance
        ));
        s
    }
}

/// One network per wave, in wave order, each holding every group.
#[derive(Clone, Debug)]
pub struct Dataset {
    pub waves: Vec<MultilevelNetwork>,
    pub summary: IngestSummary,
}

impl Dataset {
    /// The most recent wave.
    pub fn last(&self) -> &MultilevelNetwork {
        self.waves.last().expect("dataset has at least one wave")
    }
}

fn check_references(path: &Path, table: &NodeTable, edges: &[&EdgeRow]) -> Result<(), IngestError> {
    let ids: BTreeSet<&str> = table.nodes.iter().map(|n| n.id.as_str()).collect();
    for e in edges {
        for id in [&e.edge.from, &e.edge.to] {
            if !ids.contains(id.as_str()) {
                return Err(malformed(path, e.line, format!("unknown node `{id}`")));
            }
        }
        if e.edge.level != TieLevel::X && e.edge.from == e.edge.to {
            return Err(malformed(path, e.line, format!("self-tie on `{}`", e.edge.from)));
        }
    }
    Ok(())
}

fn build_wave(
    edges_path: &Path,
    table: &NodeTable,
    rows: &[&EdgeRow],
) -> Result<(MultilevelNetwork, usize), IngestError> {
    check_references(edges_path, table, rows)?;
    let records: Vec<EdgeRecord> = rows.iter().map(|r| r.edge.clone()).collect();
    match build_network(&table.nodes, &records, &table.attribute_names) {
        Ok((net, summary)) => Ok((net, summary.duplicate_edges)),
        Err(e) => {
            // point at the first offending row where possible
            let line = rows.iter().find_map(|r| {
                build_network(&table.nodes, std::slice::from_ref(&r.edge), &table.attribute_names)
                    .err()
                    .map(|_| r.line)
            });
            match line {
                Some(line) => Err(malformed(edges_path, line, e.to_string())),
                None => Err(e.into()),
            }
        }
    }
}

/// Loads one or two waves, conforms their node sets and optionally drops
/// objects with fewer than `min_users` users in the last wave.
pub fn load_dataset(paths: &DatasetPaths, min_users: Option<u32>) -> Result<Dataset, IngestError> {
    let nodes1 = read_nodes(&paths.nodes)?;
    let nodes2 = paths.nodes_wave2.as_deref().map(read_nodes).transpose()?;
    let edges = read_edges(&paths.edges)?;
    let mut wave_ids: BTreeSet<u32> = edges.iter().map(|e| e.wave).collect();
    if wave_ids.is_empty() {
        wave_ids.insert(1);
    }
    if nodes2.is_some() && wave_ids.len() == 1 {
        let first = *wave_ids.iter().next().unwrap();
        wave_ids.insert(if first == 1 { 2 } else { first + 1 });
    }
    if wave_ids.len() > 2 {
        return Err(IngestError::TooManyWaves(wave_ids.len()));
    }
    let wave_ids: Vec<u32> = wave_ids.into_iter().collect();
    let mut waves = Vec::new();
    let mut summaries = Vec::new();
    for (k, &w) in wave_ids.iter().enumerate() {
        let table = if k == 1 { nodes2.as_ref().unwrap_or(&nodes1) } else { &nodes1 };
        let rows: Vec<&EdgeRow> = edges.iter().filter(|e| e.wave == w).collect();
        let (net, dups) = build_wave(&paths.edges, table, &rows)?;
        summaries.push(WaveSummary {
            wave: w,
            duplicate_edges: dups,
            ..Default::default()
        });
        waves.push(net);
    }
    let total = |ws: &[MultilevelNetwork]| ws.iter().map(|n| n.n_actors() + n.n_objects()).sum::<usize>();
    let mut dropped_by_conformance = 0;
    if waves.len() == 2 {
        let before = total(&waves);
        let (a, b) = conform_waves(&waves[0], &waves[1])?;
        waves = vec![a, b];
        dropped_by_conformance = before - total(&waves);
    }
    let mut dropped_objects = 0;
    if let Some(min) = min_users {
        let (filtered, dropped) = waves.last().unwrap().filter_min_usage(min);
        dropped_objects = dropped;
        let last = waves.len() - 1;
        waves[last] = filtered;
        if waves.len() == 2 {
            let (a, b) = conform_waves(&waves[0], &waves[1])?;
            waves = vec![a, b];
        }
    }
    for (s, net) in summaries.iter_mut().zip(&waves) {
        s.actors = net.n_actors();
        s.objects = net.n_objects();
        s.groups = net.partition().labels().len();
        s.ties_a = net.edge_count(TieLevel::A);
        s.ties_b = net.edge_count(TieLevel::B);
        s.ties_x = net.edge_count(TieLevel::X);
    }
    Ok(Dataset {
        waves,
        summary: IngestSummary {
            waves: summaries,
            dropped_objects,
            dropped_by_conformance,
        },
    })
}

/// Writes the node table of `net` and the edges of every wave.
pub fn write_dataset(waves: &[MultilevelNetwork], nodes: &Path, edges: &Path) -> Result<(), IngestError> {
    let first = waves.first().ok_or_else(|| malformed(nodes, 0, "no waves to write"))?;
    let csv_err = |path: &Path| {
        let path = path.to_path_buf();
        move |source| IngestError::Csv {
            path: path.clone(),
            source,
        }
    };
    let (records, _) = first.to_records();
    let names = first.attributes().names().to_vec();
    let mut w = csv::Writer::from_path(nodes).map_err(csv_err(nodes))?;
    let mut header = vec!["id".to_string(), "level".into(), "group".into()];
    header.extend(names.iter().cloned());
    w.write_record(&header).map_err(csv_err(nodes))?;
    for r in &records {
        let mut row = vec![r.id.clone(), r.level.to_string(), r.group.clone()];
        row.extend(names.iter().map(|n| r.attributes.get(n).cloned().unwrap_or_default()));
        w.write_record(&row).map_err(csv_err(nodes))?;
    }
    w.flush().map_err(|source| IngestError::Io {
        path: nodes.to_path_buf(),
        source,
    })?;

    let mut w = csv::Writer::from_path(edges).map_err(csv_err(edges))?;
    w.write_record(["level", "from", "to", "wave"]).map_err(csv_err(edges))?;
    for (k, net) in waves.iter().enumerate() {
        let (_, es) = net.to_records();
        for e in es {
            w.write_record([e.level.to_string(), e.from, e.to, (k + 1).to_string()])
                .map_err(csv_err(edges))?;
        }
    }
    w.flush().map_err(|source| IngestError::Io {
        path: edges.to_path_buf(),
        source,
    })?;
    Ok(())
}
