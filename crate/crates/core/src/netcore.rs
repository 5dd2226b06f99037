//! Two-level network data model: an actor network (A), an object network (B)
//! and the bipartite actor-object usage network (X).
//!
//! Nodes are split into groups. Only dyads whose endpoints share a group can
//! carry a tie; every other dyad is a structural zero and is never counted,
//! proposed or toggled.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NetworkError {
    #[error("unknown node id `{0}`")]
    UnknownNode(String),
    #[error("duplicate node id `{0}`")]
    DuplicateNode(String),
    #[error("self-tie on node `{0}`")]
    SelfTie(String),
    #[error("tie {from} - {to} crosses groups (structural zero)")]
    CrossGroupTie { from: String, to: String },
    #[error("actor `{actor}` has no value for attribute `{attribute}`")]
    MissingAttribute { actor: String, attribute: String },
    #[error("{level} tie {from} - {to} does not connect nodes of the right levels")]
    LevelMismatch {
        level: TieLevel,
        from: String,
        to: String,
    },
    #[error("dyad {0} is a structural zero")]
    StructuralZero(DyadRef),
    #[error("dyad {0} is out of range")]
    OutOfRange(DyadRef),
    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),
    #[error("unknown level token `{0}`")]
    UnknownLevel(String),
}

/// Node level in the two-level network.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NodeLevel {
    Actor,
    Object,
}

impl FromStr for NodeLevel {
    type Err = NetworkError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "actor" | "a" => Ok(NodeLevel::Actor),
            "object" | "o" | "b" => Ok(NodeLevel::Object),
            _ => Err(NetworkError::UnknownLevel(s.to_string())),
        }
    }
}

impl fmt::Display for NodeLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeLevel::Actor => f.write_str("actor"),
            NodeLevel::Object => f.write_str("object"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId {
    pub level: NodeLevel,
    pub index: usize,
}

impl NodeId {
    pub fn actor(index: usize) -> Self {
        NodeId {
            level: NodeLevel::Actor,
            index,
        }
    }

    pub fn object(index: usize) -> Self {
        NodeId {
            level: NodeLevel::Object,
            index,
        }
    }
}

/// Tie level: actor-actor (A), object-object (B) or actor-object (X).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum TieLevel {
    A,
    B,
    X,
}

impl TieLevel {
    pub const ALL: [TieLevel; 3] = [TieLevel::A, TieLevel::B, TieLevel::X];

    pub fn index(self) -> usize {
        match self {
            TieLevel::A => 0,
            TieLevel::B => 1,
            TieLevel::X => 2,
        }
    }
}

impl FromStr for TieLevel {
    type Err = NetworkError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "A" | "a" => Ok(TieLevel::A),
            "B" | "b" => Ok(TieLevel::B),
            "X" | "x" => Ok(TieLevel::X),
            other => Err(NetworkError::UnknownLevel(other.to_string())),
        }
    }
}

impl fmt::Display for TieLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TieLevel::A => "A",
            TieLevel::B => "B",
            TieLevel::X => "X",
        };
        f.write_str(s)
    }
}

/// A dyad in canonical order: `(min, max)` for A and B, `(actor, object)`
/// for X.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DyadRef {
    level: TieLevel,
    first: usize,
    second: usize,
}

impl DyadRef {
    /// For X dyads `u` is the actor index and `v` the object index.
    pub fn new(level: TieLevel, u: usize, v: usize) -> Result<Self, NetworkError> {
        match level {
            TieLevel::X => Ok(DyadRef {
                level,
                first: u,
                second: v,
            }),
            _ if u == v => Err(NetworkError::SelfTie(u.to_string())),
            _ => Ok(DyadRef {
                level,
                first: u.min(v),
                second: u.max(v),
            }),
        }
    }

    pub fn actors(i: usize, j: usize) -> Result<Self, NetworkError> {
        Self::new(TieLevel::A, i, j)
    }

    pub fn objects(o: usize, p: usize) -> Result<Self, NetworkError> {
        Self::new(TieLevel::B, o, p)
    }

    pub fn usage(actor: usize, object: usize) -> Self {
        DyadRef {
            level: TieLevel::X,
            first: actor,
            second: object,
        }
    }

    pub fn level(&self) -> TieLevel {
        self.level
    }

    pub fn first(&self) -> usize {
        self.first
    }

    pub fn second(&self) -> usize {
        self.second
    }

    pub fn endpoints(&self) -> (NodeId, NodeId) {
        match self.level {
            TieLevel::A => (NodeId::actor(self.first), NodeId::actor(self.second)),
            TieLevel::B => (NodeId::object(self.first), NodeId::object(self.second)),
            TieLevel::X => (NodeId::actor(self.first), NodeId::object(self.second)),
        }
    }
}

impl fmt::Display for DyadRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({}, {})", self.level, self.first, self.second)
    }
}

/// Dense binary matrix.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub(crate) struct BitMatrix {
    rows: usize,
    cols: usize,
    bits: Vec<bool>,
}

impl BitMatrix {
    fn new(rows: usize, cols: usize) -> Self {
        BitMatrix {
            rows,
            cols,
            bits: vec![false; rows * cols],
        }
    }

    #[inline]
    pub(crate) fn get(&self, r: usize, c: usize) -> bool {
        self.bits[r * self.cols + c]
    }

    #[inline]
    fn set(&mut self, r: usize, c: usize, v: bool) {
        self.bits[r * self.cols + c] = v;
    }

    #[inline]
    pub(crate) fn row(&self, r: usize) -> &[bool] {
        &self.bits[r * self.cols..(r + 1) * self.cols]
    }
}

/// Categorical actor attributes, stored as dense codes with a label table per
/// attribute. Codes follow the sorted order of the labels.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Attributes {
    names: Vec<String>,
    codes: Vec<Vec<u32>>,
    labels: Vec<Vec<String>>,
}

impl Attributes {
    /// `values[a][i]` is the label of attribute `names[a]` for actor `i`.
    pub fn from_labels(names: Vec<String>, values: Vec<Vec<String>>) -> Self {
        let mut codes = Vec::with_capacity(names.len());
        let mut labels = Vec::with_capacity(names.len());
        for column in &values {
            let dict: Vec<String> = column
                .iter()
                .cloned()
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            let lookup: HashMap<&str, u32> = dict
                .iter()
                .enumerate()
                .map(|(k, l)| (l.as_str(), k as u32))
                .collect();
            codes.push(column.iter().map(|l| lookup[l.as_str()]).collect());
            labels.push(dict);
        }
        Attributes {
            names,
            codes,
            labels,
        }
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn has(&self, name: &str) -> bool {
        self.names.iter().any(|n| n == name)
    }

    pub fn codes(&self, name: &str) -> Option<&[u32]> {
        let k = self.names.iter().position(|n| n == name)?;
        Some(&self.codes[k])
    }

    pub fn label(&self, name: &str, actor: usize) -> Option<&str> {
        let k = self.names.iter().position(|n| n == name)?;
        let code = *self.codes[k].get(actor)?;
        Some(self.labels[k][code as usize].as_str())
    }

    fn restrict(&self, keep: &[usize]) -> Self {
        let values = self
            .names
            .iter()
            .map(|n| {
                keep.iter()
                    .map(|&i| self.label(n, i).unwrap_or_default().to_string())
                    .collect()
            })
            .collect();
        Attributes::from_labels(self.names.clone(), values)
    }
}

/// Group membership for actors and objects.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct GroupPartition {
    labels: Vec<String>,
    actor_group: Vec<u32>,
    object_group: Vec<u32>,
}

impl GroupPartition {
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn group_of(&self, node: NodeId) -> u32 {
        match node.level {
            NodeLevel::Actor => self.actor_group[node.index],
            NodeLevel::Object => self.object_group[node.index],
        }
    }

    pub fn group_label(&self, node: NodeId) -> &str {
        &self.labels[self.group_of(node) as usize]
    }

    pub fn same_group(&self, u: NodeId, v: NodeId) -> bool {
        self.group_of(u) == self.group_of(v)
    }
}

/// One row of the node table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeRecord {
    pub id: String,
    pub level: NodeLevel,
    pub group: String,
    pub attributes: BTreeMap<String, String>,
}

/// One row of the edge table. X edges may list the actor or the object first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeRecord {
    pub level: TieLevel,
    pub from: String,
    pub to: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BuildSummary {
    pub duplicate_edges: usize,
}

/// Two-level network with structural zeros between groups.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultilevelNetwork {
    actor_ids: Vec<String>,
    object_ids: Vec<String>,
    a: BitMatrix,
    b: BitMatrix,
    x: BitMatrix,
    deg_a: Vec<u32>,
    deg_b: Vec<u32>,
    deg_xa: Vec<u32>,
    deg_xo: Vec<u32>,
    edge_counts: [u64; 3],
    partition: GroupPartition,
    attrs: Attributes,
}

impl Default for MultilevelNetwork {
    fn default() -> Self {
        Self::empty(&[], &[], &[], &[])
    }
}

impl MultilevelNetwork {
    /// Empty network from explicit group assignments. All nodes get numeric
    /// ids (`a0`, `a1`, ..., `o0`, ...).
    pub fn empty(
        actor_groups: &[u32],
        object_groups: &[u32],
        attribute_names: &[&str],
        attribute_values: &[Vec<u32>],
    ) -> Self {
        let n = actor_groups.len();
        let m = object_groups.len();
        let width = (n.max(m).max(1) - 1).to_string().len();
        let n_groups = actor_groups
            .iter()
            .chain(object_groups)
            .max()
            .map_or(0, |g| g + 1);
        let attrs = Attributes::from_labels(
            attribute_names.iter().map(|s| s.to_string()).collect(),
            attribute_values
                .iter()
                .map(|col| col.iter().map(|c| format!("{c:06}")).collect())
                .collect(),
        );
        MultilevelNetwork {
            actor_ids: (0..n).map(|i| format!("a{i:0width$}")).collect(),
            object_ids: (0..m).map(|i| format!("o{i:0width$}")).collect(),
            a: BitMatrix::new(n, n),
            b: BitMatrix::new(m, m),
            x: BitMatrix::new(n, m),
            deg_a: vec![0; n],
            deg_b: vec![0; m],
            deg_xa: vec![0; n],
            deg_xo: vec![0; m],
            edge_counts: [0; 3],
            partition: GroupPartition {
                labels: (0..n_groups).map(|g| g.to_string()).collect(),
                actor_group: actor_groups.to_vec(),
                object_group: object_groups.to_vec(),
            },
            attrs,
        }
    }

    /// Single-group network without attributes.
    pub fn single_group(n_actors: usize, n_objects: usize) -> Self {
        Self::empty(&vec![0; n_actors], &vec![0; n_objects], &[], &[])
    }

    pub fn n_actors(&self) -> usize {
        self.actor_ids.len()
    }

    pub fn n_objects(&self) -> usize {
        self.object_ids.len()
    }

    pub fn actor_ids(&self) -> &[String] {
        &self.actor_ids
    }

    pub fn object_ids(&self) -> &[String] {
        &self.object_ids
    }

    pub fn node_label(&self, node: NodeId) -> &str {
        match node.level {
            NodeLevel::Actor => &self.actor_ids[node.index],
            NodeLevel::Object => &self.object_ids[node.index],
        }
    }

    pub fn partition(&self) -> &GroupPartition {
        &self.partition
    }

    pub fn attributes(&self) -> &Attributes {
        &self.attrs
    }

    pub fn edge_count(&self, level: TieLevel) -> u64 {
        self.edge_counts[level.index()]
    }

    #[inline]
    pub fn tie_a(&self, i: usize, j: usize) -> bool {
        self.a.get(i, j)
    }

    #[inline]
    pub fn tie_b(&self, o: usize, p: usize) -> bool {
        self.b.get(o, p)
    }

    #[inline]
    pub fn tie_x(&self, i: usize, o: usize) -> bool {
        self.x.get(i, o)
    }

    pub fn has_tie(&self, dyad: DyadRef) -> bool {
        match dyad.level {
            TieLevel::A => self.a.get(dyad.first, dyad.second),
            TieLevel::B => self.b.get(dyad.first, dyad.second),
            TieLevel::X => self.x.get(dyad.first, dyad.second),
        }
    }

    #[inline]
    pub fn degree_a(&self, i: usize) -> u32 {
        self.deg_a[i]
    }

    #[inline]
    pub fn degree_b(&self, o: usize) -> u32 {
        self.deg_b[o]
    }

    /// Number of objects used by actor `i`.
    #[inline]
    pub fn degree_x_actor(&self, i: usize) -> u32 {
        self.deg_xa[i]
    }

    /// Number of actors using object `o`.
    #[inline]
    pub fn degree_x_object(&self, o: usize) -> u32 {
        self.deg_xo[o]
    }

    pub fn degrees_a(&self) -> &[u32] {
        &self.deg_a
    }

    pub fn degrees_b(&self) -> &[u32] {
        &self.deg_b
    }

    pub fn degrees_x_actor(&self) -> &[u32] {
        &self.deg_xa
    }

    pub fn degrees_x_object(&self) -> &[u32] {
        &self.deg_xo
    }

    pub fn neighbors_a(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        ones(self.a.row(i))
    }

    pub fn neighbors_b(&self, o: usize) -> impl Iterator<Item = usize> + '_ {
        ones(self.b.row(o))
    }

    /// Objects used by actor `i`.
    pub fn objects_of(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        ones(self.x.row(i))
    }

    /// Actors using object `o`.
    pub fn users_of(&self, o: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.n_actors()).filter(move |&i| self.x.get(i, o))
    }

    /// Shared A-partners of actors `i` and `j`.
    pub fn shared_partners_a(&self, i: usize, j: usize) -> u32 {
        count_common(self.a.row(i), self.a.row(j))
    }

    /// Shared B-partners of objects `o` and `p`.
    pub fn shared_partners_b(&self, o: usize, p: usize) -> u32 {
        count_common(self.b.row(o), self.b.row(p))
    }

    /// Objects used by both actors `i` and `j`.
    pub fn shared_objects(&self, i: usize, j: usize) -> u32 {
        count_common(self.x.row(i), self.x.row(j))
    }

    /// Actors using both objects `o` and `p`.
    pub fn shared_users(&self, o: usize, p: usize) -> u32 {
        (0..self.n_actors())
            .filter(|&i| self.x.get(i, o) && self.x.get(i, p))
            .count() as u32
    }

    pub(crate) fn matrix(&self, level: TieLevel) -> &BitMatrix {
        match level {
            TieLevel::A => &self.a,
            TieLevel::B => &self.b,
            TieLevel::X => &self.x,
        }
    }

    fn in_range(&self, dyad: DyadRef) -> bool {
        let (n, m) = (self.n_actors(), self.n_objects());
        match dyad.level {
            TieLevel::A => dyad.second < n,
            TieLevel::B => dyad.second < m,
            TieLevel::X => dyad.first < n && dyad.second < m,
        }
    }

    /// Whether the dyad lies within one group and inside the node ranges.
    pub fn is_toggleable(&self, dyad: DyadRef) -> bool {
        if !self.in_range(dyad) {
            return false;
        }
        let (u, v) = dyad.endpoints();
        self.partition.same_group(u, v)
    }

    pub fn check_dyad(&self, dyad: DyadRef) -> Result<(), NetworkError> {
        if !self.in_range(dyad) {
            return Err(NetworkError::OutOfRange(dyad));
        }
        let (u, v) = dyad.endpoints();
        if !self.partition.same_group(u, v) {
            return Err(NetworkError::StructuralZero(dyad));
        }
        Ok(())
    }

    /// All toggleable dyads of one level, in canonical order.
    pub fn toggleable_dyads(&self, level: TieLevel) -> Vec<DyadRef> {
        let (n, m) = (self.n_actors(), self.n_objects());
        let p = &self.partition;
        let mut out = Vec::new();
        match level {
            TieLevel::A => {
                for i in 0..n {
                    for j in i + 1..n {
                        if p.actor_group[i] == p.actor_group[j] {
                            out.push(DyadRef {
                                level,
                                first: i,
                                second: j,
                            });
                        }
                    }
                }
            }
            TieLevel::B => {
                for o in 0..m {
                    for q in o + 1..m {
                        if p.object_group[o] == p.object_group[q] {
                            out.push(DyadRef {
                                level,
                                first: o,
                                second: q,
                            });
                        }
                    }
                }
            }
            TieLevel::X => {
                for i in 0..n {
                    for o in 0..m {
                        if p.actor_group[i] == p.object_group[o] {
                            out.push(DyadRef::usage(i, o));
                        }
                    }
                }
            }
        }
        out
    }

    pub fn toggleable_count(&self, level: TieLevel) -> usize {
        let p = &self.partition;
        let groups = p.labels.len();
        let mut actors = vec![0usize; groups];
        let mut objects = vec![0usize; groups];
        for &g in &p.actor_group {
            actors[g as usize] += 1;
        }
        for &g in &p.object_group {
            objects[g as usize] += 1;
        }
        (0..groups)
            .map(|g| match level {
                TieLevel::A => actors[g] * actors[g].saturating_sub(1) / 2,
                TieLevel::B => objects[g] * objects[g].saturating_sub(1) / 2,
                TieLevel::X => actors[g] * objects[g],
            })
            .sum()
    }

    /// Flips the dyad and returns its new state.
    pub fn apply_toggle(&mut self, dyad: DyadRef) -> Result<bool, NetworkError> {
        self.check_dyad(dyad)?;
        Ok(self.toggle_unchecked(dyad))
    }

    /// Copy of the network with the dyad flipped.
    pub fn toggled(&self, dyad: DyadRef) -> Result<Self, NetworkError> {
        let mut next = self.clone();
        next.apply_toggle(dyad)?;
        Ok(next)
    }

    /// Sets the dyad to the given state. Returns whether anything changed.
    pub fn set_tie(&mut self, dyad: DyadRef, present: bool) -> Result<bool, NetworkError> {
        self.check_dyad(dyad)?;
        if self.has_tie(dyad) == present {
            return Ok(false);
        }
        self.toggle_unchecked(dyad);
        Ok(true)
    }

    /// Caller guarantees the dyad passed [`Self::check_dyad`].
    pub(crate) fn toggle_unchecked(&mut self, dyad: DyadRef) -> bool {
        let (u, v) = (dyad.first, dyad.second);
        let level = dyad.level;
        let now = !self.has_tie(dyad);
        let (delta_deg, delta_edges): (fn(&mut u32), i64) = if now {
            (|d| *d += 1, 1)
        } else {
            (|d| *d -= 1, -1)
        };
        match level {
            TieLevel::A => {
                self.a.set(u, v, now);
                self.a.set(v, u, now);
                delta_deg(&mut self.deg_a[u]);
                delta_deg(&mut self.deg_a[v]);
            }
            TieLevel::B => {
                self.b.set(u, v, now);
                self.b.set(v, u, now);
                delta_deg(&mut self.deg_b[u]);
                delta_deg(&mut self.deg_b[v]);
            }
            TieLevel::X => {
                self.x.set(u, v, now);
                delta_deg(&mut self.deg_xa[u]);
                delta_deg(&mut self.deg_xo[v]);
            }
        }
        let count = &mut self.edge_counts[level.index()];
        *count = (*count as i64 + delta_edges) as u64;
        now
    }

    /// All present ties of one level, canonical order.
    pub fn ties(&self, level: TieLevel) -> Vec<DyadRef> {
        let mut out = Vec::with_capacity(self.edge_count(level) as usize);
        match level {
            TieLevel::A | TieLevel::B => {
                let mat = if level == TieLevel::A { &self.a } else { &self.b };
                for r in 0..mat.rows {
                    for c in r + 1..mat.cols {
                        if mat.get(r, c) {
                            out.push(DyadRef {
                                level,
                                first: r,
                                second: c,
                            });
                        }
                    }
                }
            }
            TieLevel::X => {
                for i in 0..self.n_actors() {
                    for o in self.objects_of(i) {
                        out.push(DyadRef::usage(i, o));
                    }
                }
            }
        }
        out
    }

    /// Removes every tie of one level.
    pub fn clear_level(&mut self, level: TieLevel) {
        for dyad in self.ties(level) {
            self.toggle_unchecked(dyad);
        }
    }

    /// Copy of the node sets with no ties.
    pub fn without_ties(&self) -> Self {
        let mut out = self.clone();
        for level in TieLevel::ALL {
            out.clear_level(level);
        }
        out
    }

    /// Replaces the ties of `level` by those of `other`, which must have the
    /// same node sets.
    pub fn with_level_from(
        &self,
        other: &MultilevelNetwork,
        level: TieLevel,
    ) -> Result<Self, NetworkError> {
        if self.actor_ids != other.actor_ids || self.object_ids != other.object_ids {
            return Err(NetworkError::SchemaMismatch(
                "node sets differ; conform the waves first".into(),
            ));
        }
        let mut out = self.clone();
        out.clear_level(level);
        for dyad in other.ties(level) {
            out.set_tie(dyad, true)?;
        }
        Ok(out)
    }

    /// Node and edge tables reproducing this network under [`build_network`].
    pub fn to_records(&self) -> (Vec<NodeRecord>, Vec<EdgeRecord>) {
        let mut nodes = Vec::with_capacity(self.n_actors() + self.n_objects());
        for (i, id) in self.actor_ids.iter().enumerate() {
            let attributes = self
                .attrs
                .names()
                .iter()
                .map(|n| (n.clone(), self.attrs.label(n, i).unwrap().to_string()))
                .collect();
            nodes.push(NodeRecord {
                id: id.clone(),
                level: NodeLevel::Actor,
                group: self.partition.group_label(NodeId::actor(i)).to_string(),
                attributes,
            });
        }
        for (o, id) in self.object_ids.iter().enumerate() {
            nodes.push(NodeRecord {
                id: id.clone(),
                level: NodeLevel::Object,
                group: self.partition.group_label(NodeId::object(o)).to_string(),
                attributes: BTreeMap::new(),
            });
        }
        let mut edges = Vec::new();
        for level in TieLevel::ALL {
            for d in self.ties(level) {
                let (u, v) = d.endpoints();
                edges.push(EdgeRecord {
                    level,
                    from: self.node_label(u).to_string(),
                    to: self.node_label(v).to_string(),
                });
            }
        }
        (nodes, edges)
    }

    /// Sub-network on the given actors and objects (indices ascending).
    fn restrict(&self, keep_actors: &[usize], keep_objects: &[usize]) -> Self {
        let mut out = MultilevelNetwork {
            actor_ids: keep_actors.iter().map(|&i| self.actor_ids[i].clone()).collect(),
            object_ids: keep_objects
                .iter()
                .map(|&o| self.object_ids[o].clone())
                .collect(),
            a: BitMatrix::new(keep_actors.len(), keep_actors.len()),
            b: BitMatrix::new(keep_objects.len(), keep_objects.len()),
            x: BitMatrix::new(keep_actors.len(), keep_objects.len()),
            deg_a: vec![0; keep_actors.len()],
            deg_b: vec![0; keep_objects.len()],
            deg_xa: vec![0; keep_actors.len()],
            deg_xo: vec![0; keep_objects.len()],
            edge_counts: [0; 3],
            partition: GroupPartition {
                labels: self.partition.labels.clone(),
                actor_group: keep_actors
                    .iter()
                    .map(|&i| self.partition.actor_group[i])
                    .collect(),
                object_group: keep_objects
                    .iter()
                    .map(|&o| self.partition.object_group[o])
                    .collect(),
            },
            attrs: self.attrs.restrict(keep_actors),
        };
        for (ni, &i) in keep_actors.iter().enumerate() {
            for (nj, &j) in keep_actors.iter().enumerate().skip(ni + 1) {
                if self.a.get(i, j) {
                    out.toggle_unchecked(DyadRef {
                        level: TieLevel::A,
                        first: ni,
                        second: nj,
                    });
                }
            }
            for (no, &o) in keep_objects.iter().enumerate() {
                if self.x.get(i, o) {
                    out.toggle_unchecked(DyadRef::usage(ni, no));
                }
            }
        }
        for (no, &o) in keep_objects.iter().enumerate() {
            for (np, &p) in keep_objects.iter().enumerate().skip(no + 1) {
                if self.b.get(o, p) {
                    out.toggle_unchecked(DyadRef {
                        level: TieLevel::B,
                        first: no,
                        second: np,
                    });
                }
            }
        }
        out
    }

    /// Drops objects used by fewer than `min_users` actors. Returns the
    /// filtered network and the number of dropped objects.
    pub fn filter_min_usage(&self, min_users: u32) -> (Self, usize) {
        let keep_objects: Vec<usize> = (0..self.n_objects())
            .filter(|&o| self.deg_xo[o] >= min_users)
            .collect();
        let dropped = self.n_objects() - keep_objects.len();
        let keep_actors: Vec<usize> = (0..self.n_actors()).collect();
        (self.restrict(&keep_actors, &keep_objects), dropped)
    }

    /// One network per group, labelled by the group id.
    pub fn split_by_group(&self) -> Vec<(String, Self)> {
        let p = &self.partition;
        let mut out = Vec::new();
        for (g, label) in p.labels.iter().enumerate() {
            let g = g as u32;
            let actors: Vec<usize> = (0..self.n_actors())
                .filter(|&i| p.actor_group[i] == g)
                .collect();
            let objects: Vec<usize> = (0..self.n_objects())
                .filter(|&o| p.object_group[o] == g)
                .collect();
            if actors.is_empty() && objects.is_empty() {
                continue;
            }
            let mut sub = self.restrict(&actors, &objects);
            sub.partition = GroupPartition {
                labels: vec![label.clone()],
                actor_group: vec![0; actors.len()],
                object_group: vec![0; objects.len()],
            };
            out.push((label.clone(), sub));
        }
        out
    }
}

fn ones(row: &[bool]) -> impl Iterator<Item = usize> + '_ {
    row.iter()
        .enumerate()
        .filter_map(|(k, &b)| if b { Some(k) } else { None })
}

fn count_common(r: &[bool], s: &[bool]) -> u32 {
    r.iter().zip(s).filter(|(a, b)| **a && **b).count() as u32
}

/// Builds a validated network from node and edge tables. Nodes are ordered
/// by ascending id within each level and duplicate edges are collapsed.
pub fn build_network(
    nodes: &[NodeRecord],
    edges: &[EdgeRecord],
    attribute_names: &[String],
) -> Result<(MultilevelNetwork, BuildSummary), NetworkError> {
    let mut seen = BTreeSet::new();
    for n in nodes {
        if !seen.insert(n.id.as_str()) {
            return Err(NetworkError::DuplicateNode(n.id.clone()));
        }
    }
    let mut actors: Vec<&NodeRecord> = nodes
        .iter()
        .filter(|n| n.level == NodeLevel::Actor)
        .collect();
    let mut objects: Vec<&NodeRecord> = nodes
        .iter()
        .filter(|n| n.level == NodeLevel::Object)
        .collect();
    actors.sort_by(|a, b| a.id.cmp(&b.id));
    objects.sort_by(|a, b| a.id.cmp(&b.id));

    let group_labels: Vec<String> = nodes
        .iter()
        .map(|n| n.group.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let group_code = |g: &str| group_labels.binary_search_by(|l| l.as_str().cmp(g)).unwrap() as u32;

    let mut values = vec![Vec::with_capacity(actors.len()); attribute_names.len()];
    for actor in &actors {
        for (k, name) in attribute_names.iter().enumerate() {
            match actor.attributes.get(name) {
                Some(v) if !v.trim().is_empty() => values[k].push(v.trim().to_string()),
                _ => {
                    return Err(NetworkError::MissingAttribute {
                        actor: actor.id.clone(),
                        attribute: name.clone(),
                    })
                }
            }
        }
    }

    let n = actors.len();
    let m = objects.len();
    let mut net = MultilevelNetwork {
        actor_ids: actors.iter().map(|a| a.id.clone()).collect(),
        object_ids: objects.iter().map(|o| o.id.clone()).collect(),
        a: BitMatrix::new(n, n),
        b: BitMatrix::new(m, m),
        x: BitMatrix::new(n, m),
        deg_a: vec![0; n],
        deg_b: vec![0; m],
        deg_xa: vec![0; n],
        deg_xo: vec![0; m],
        edge_counts: [0; 3],
        partition: GroupPartition {
            actor_group: actors.iter().map(|a| group_code(&a.group)).collect(),
            object_group: objects.iter().map(|o| group_code(&o.group)).collect(),
            labels: group_labels.clone(),
        },
        attrs: Attributes::from_labels(attribute_names.to_vec(), values),
    };

    let index: HashMap<&str, NodeId> = actors
        .iter()
        .enumerate()
        .map(|(i, r)| (r.id.as_str(), NodeId::actor(i)))
        .chain(
            objects
                .iter()
                .enumerate()
                .map(|(o, r)| (r.id.as_str(), NodeId::object(o))),
        )
        .collect();

    let mut summary = BuildSummary::default();
    for e in edges {
        let u = *index
            .get(e.from.as_str())
            .ok_or_else(|| NetworkError::UnknownNode(e.from.clone()))?;
        let v = *index
            .get(e.to.as_str())
            .ok_or_else(|| NetworkError::UnknownNode(e.to.clone()))?;
        if u == v {
            return Err(NetworkError::SelfTie(e.from.clone()));
        }
        let mismatch = || NetworkError::LevelMismatch {
            level: e.level,
            from: e.from.clone(),
            to: e.to.clone(),
        };
        let dyad = match e.level {
            TieLevel::A if u.level == NodeLevel::Actor && v.level == NodeLevel::Actor => {
                DyadRef::actors(u.index, v.index)?
            }
            TieLevel::B if u.level == NodeLevel::Object && v.level == NodeLevel::Object => {
                DyadRef::objects(u.index, v.index)?
            }
            TieLevel::X => match (u.level, v.level) {
                (NodeLevel::Actor, NodeLevel::Object) => DyadRef::usage(u.index, v.index),
                (NodeLevel::Object, NodeLevel::Actor) => DyadRef::usage(v.index, u.index),
                _ => return Err(mismatch()),
            },
            _ => return Err(mismatch()),
        };
        if !net.partition.same_group(u, v) {
            return Err(NetworkError::CrossGroupTie {
                from: e.from.clone(),
                to: e.to.clone(),
            });
        }
        if net.has_tie(dyad) {
            summary.duplicate_edges += 1;
        } else {
            net.toggle_unchecked(dyad);
        }
    }
    Ok((net, summary))
}

/// Restricts two waves to the actors and objects present in both.
pub fn conform_waves(
    wave1: &MultilevelNetwork,
    wave2: &MultilevelNetwork,
) -> Result<(MultilevelNetwork, MultilevelNetwork), NetworkError> {
    if wave1.attrs.names() != wave2.attrs.names() {
        return Err(NetworkError::SchemaMismatch(format!(
            "attribute columns {:?} vs {:?}",
            wave1.attrs.names(),
            wave2.attrs.names()
        )));
    }
    let common = |ids1: &[String], ids2: &[String]| -> (Vec<usize>, Vec<usize>) {
        let pos2: HashMap<&str, usize> = ids2
            .iter()
            .enumerate()
            .map(|(k, id)| (id.as_str(), k))
            .collect();
        let mut pairs: Vec<(&str, usize, usize)> = ids1
            .iter()
            .enumerate()
            .filter_map(|(k, id)| pos2.get(id.as_str()).map(|&k2| (id.as_str(), k, k2)))
            .collect();
        pairs.sort();
        pairs.into_iter().map(|(_, a, b)| (a, b)).unzip()
    };
    let (act1, act2) = common(&wave1.actor_ids, &wave2.actor_ids);
    let (obj1, obj2) = common(&wave1.object_ids, &wave2.object_ids);

    for (&i1, &i2) in act1.iter().zip(&act2) {
        if wave1.partition.group_label(NodeId::actor(i1))
            != wave2.partition.group_label(NodeId::actor(i2))
        {
            return Err(NetworkError::SchemaMismatch(format!(
                "actor `{}` changes group between waves",
                wave1.actor_ids[i1]
            )));
        }
    }
    for (&o1, &o2) in obj1.iter().zip(&obj2) {
        if wave1.partition.group_label(NodeId::object(o1))
            != wave2.partition.group_label(NodeId::object(o2))
        {
            return Err(NetworkError::SchemaMismatch(format!(
                "object `{}` changes group between waves",
                wave1.object_ids[o1]
            )));
        }
    }
    Ok((wave1.restrict(&act1, &obj1), wave2.restrict(&act2, &obj2)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn actor(id: &str, group: &str) -> NodeRecord {
        NodeRecord {
            id: id.into(),
            level: NodeLevel::Actor,
            group: group.into(),
            attributes: BTreeMap::new(),
        }
    }

    fn object(id: &str, group: &str) -> NodeRecord {
        NodeRecord {
            level: NodeLevel::Object,
            ..actor(id, group)
        }
    }

    fn edge(level: TieLevel, from: &str, to: &str) -> EdgeRecord {
        EdgeRecord {
            level,
            from: from.into(),
            to: to.into(),
        }
    }

    #[test]
    fn empty_tables() {
        let (net, summary) = build_network(&[], &[], &[]).unwrap();
        assert_eq!(net.n_actors(), 0);
        assert_eq!(net.n_objects(), 0);
        for level in TieLevel::ALL {
            assert_eq!(net.edge_count(level), 0);
            assert_eq!(net.toggleable_count(level), 0);
        }
        assert_eq!(summary.duplicate_edges, 0);
    }

    #[test]
    fn toggleable_counts_single_group() {
        let nodes = vec![
            actor("a1", "g"),
            actor("a2", "g"),
            actor("a3", "g"),
            object("o1", "g"),
            object("o2", "g"),
        ];
        let (net, _) = build_network(&nodes, &[], &[]).unwrap();
        assert_eq!(net.toggleable_count(TieLevel::A), 3);
        assert_eq!(net.toggleable_count(TieLevel::B), 1);
        assert_eq!(net.toggleable_count(TieLevel::X), 6);
        for level in TieLevel::ALL {
            assert_eq!(net.toggleable_dyads(level).len(), net.toggleable_count(level));
        }
    }

    #[test]
    fn self_tie_rejected() {
        let nodes = vec![actor("a1", "g")];
        let err = build_network(&nodes, &[edge(TieLevel::A, "a1", "a1")], &[]).unwrap_err();
        assert_eq!(err, NetworkError::SelfTie("a1".into()));
    }

    #[test]
    fn build_errors() {
        let nodes = vec![actor("a1", "g"), actor("a2", "h"), object("o1", "g")];
        assert!(matches!(
            build_network(&nodes, &[edge(TieLevel::A, "a1", "zz")], &[]),
            Err(NetworkError::UnknownNode(_))
        ));
        assert!(matches!(
            build_network(&nodes, &[edge(TieLevel::A, "a1", "a2")], &[]),
            Err(NetworkError::CrossGroupTie { .. })
        ));
        assert!(matches!(
            build_network(&nodes, &[edge(TieLevel::B, "a1", "o1")], &[]),
            Err(NetworkError::LevelMismatch { .. })
        ));
        assert!(matches!(
            build_network(&nodes, &[], &["gender".to_string()]),
            Err(NetworkError::MissingAttribute { .. })
        ));
        let dup = vec![actor("a1", "g"), object("a1", "g")];
        assert!(matches!(
            build_network(&dup, &[], &[]),
            Err(NetworkError::DuplicateNode(_))
        ));
    }

    #[test]
    fn duplicates_collapse_and_x_orientation() {
        let nodes = vec![actor("a1", "g"), actor("a2", "g"), object("o1", "g")];
        let edges = vec![
            edge(TieLevel::A, "a1", "a2"),
            edge(TieLevel::A, "a2", "a1"),
            edge(TieLevel::X, "o1", "a2"),
        ];
        let (net, summary) = build_network(&nodes, &edges, &[]).unwrap();
        assert_eq!(summary.duplicate_edges, 1);
        assert_eq!(net.edge_count(TieLevel::A), 1);
        assert!(net.tie_a(0, 1) && net.tie_a(1, 0));
        assert!(net.tie_x(1, 0));
        assert_eq!(net.degree_x_object(0), 1);
    }

    #[test]
    fn toggle_basics() {
        let mut net = MultilevelNetwork::single_group(3, 2);
        let d = DyadRef::actors(2, 0).unwrap();
        assert_eq!((d.first(), d.second()), (0, 2));
        let before = net.clone();
        assert!(net.apply_toggle(d).unwrap());
        assert_eq!(net.edge_count(TieLevel::A), 1);
        assert_eq!(net.degree_a(0), 1);
        assert_eq!(net.degree_a(2), 1);
        assert!(!net.apply_toggle(d).unwrap());
        assert_eq!(net, before);
    }

    #[test]
    fn toggle_structural_zero() {
        let mut net = MultilevelNetwork::empty(&[0, 1], &[0], &[], &[]);
        let d = DyadRef::actors(0, 1).unwrap();
        assert_eq!(net.apply_toggle(d), Err(NetworkError::StructuralZero(d)));
        let x = DyadRef::usage(1, 0);
        assert_eq!(net.apply_toggle(x), Err(NetworkError::StructuralZero(x)));
        let far = DyadRef::usage(5, 0);
        assert_eq!(net.apply_toggle(far), Err(NetworkError::OutOfRange(far)));
    }

    fn two_wave_fixture() -> (MultilevelNetwork, MultilevelNetwork) {
        let w1 = vec![actor("a", "g"), actor("b", "g"), actor("c", "g"), object("o", "g")];
        let w2 = vec![actor("b", "g"), actor("c", "g"), actor("d", "g"), object("o", "g")];
        let (n1, _) = build_network(
            &w1,
            &[
                edge(TieLevel::A, "a", "b"),
                edge(TieLevel::A, "b", "c"),
                edge(TieLevel::X, "a", "o"),
            ],
            &[],
        )
        .unwrap();
        let (n2, _) = build_network(
            &w2,
            &[edge(TieLevel::A, "c", "d"), edge(TieLevel::X, "b", "o")],
            &[],
        )
        .unwrap();
        (n1, n2)
    }

    #[test]
    fn conform_intersects() {
        let (n1, n2) = two_wave_fixture();
        let (c1, c2) = conform_waves(&n1, &n2).unwrap();
        assert_eq!(c1.actor_ids(), &["b".to_string(), "c".to_string()]);
        assert_eq!(c2.actor_ids(), c1.actor_ids());
        assert_eq!(c1.edge_count(TieLevel::A), 1);
        assert!(c1.tie_a(0, 1));
        assert_eq!(c1.edge_count(TieLevel::X), 0);
        assert_eq!(c2.edge_count(TieLevel::A), 0);
        assert_eq!(c2.edge_count(TieLevel::X), 1);
    }

    #[test]
    fn conform_identity_and_empty() {
        let (n1, _) = two_wave_fixture();
        let (c1, c2) = conform_waves(&n1, &n1).unwrap();
        assert_eq!(c1, n1);
        assert_eq!(c2, n1);
        let empty = MultilevelNetwork::default();
        let (e1, e2) = conform_waves(&n1, &empty).unwrap();
        assert_eq!(e1.n_actors() + e1.n_objects(), 0);
        assert_eq!(e2.n_actors() + e2.n_objects(), 0);
    }

    #[test]
    fn conform_schema_mismatch() {
        let mut with_attr = actor("a", "g");
        with_attr.attributes.insert("gender".into(), "F".into());
        let (n1, _) = build_network(&[with_attr], &[], &["gender".to_string()]).unwrap();
        let (n2, _) = build_network(&[actor("a", "g")], &[], &[]).unwrap();
        assert!(matches!(
            conform_waves(&n1, &n2),
            Err(NetworkError::SchemaMismatch(_))
        ));
    }

    #[test]
    fn min_usage_filter() {
        let nodes = vec![
            actor("a1", "g"),
            actor("a2", "g"),
            object("o1", "g"),
            object("o2", "g"),
        ];
        let edges = vec![
            edge(TieLevel::X, "a1", "o1"),
            edge(TieLevel::X, "a2", "o1"),
            edge(TieLevel::X, "a1", "o2"),
            edge(TieLevel::B, "o1", "o2"),
        ];
        let (net, _) = build_network(&nodes, &edges, &[]).unwrap();
        let (filtered, dropped) = net.filter_min_usage(2);
        assert_eq!(dropped, 1);
        assert_eq!(filtered.object_ids(), &["o1".to_string()]);
        assert_eq!(filtered.edge_count(TieLevel::X), 2);
        assert_eq!(filtered.edge_count(TieLevel::B), 0);
    }

    #[test]
    fn records_round_trip() {
        let (n1, _) = two_wave_fixture();
        let (nodes, edges) = n1.to_records();
        let (again, _) = build_network(&nodes, &edges, &[]).unwrap();
        assert_eq!(again, n1);
    }

    #[test]
    fn split_groups() {
        let mut net = MultilevelNetwork::empty(&[0, 0, 1], &[1], &[], &[]);
        net.apply_toggle(DyadRef::actors(0, 1).unwrap()).unwrap();
        net.apply_toggle(DyadRef::usage(2, 0)).unwrap();
        let parts = net.split_by_group();
        assert_eq!(parts.len(), 2);
        assert_eq!(parts[0].1.n_actors(), 2);
        assert_eq!(parts[0].1.edge_count(TieLevel::A), 1);
        assert_eq!(parts[1].1.n_objects(), 1);
        assert_eq!(parts[1].1.edge_count(TieLevel::X), 1);
    }
}
