//! Configuration statistics for multilevel networks: global values and
//! single-dyad change statistics.
//!
//! Degrees are written `dA`, `dB` (one-mode), `dXa` (objects used by an
//! actor) and `dXo` (users of an object). `SP` counts shared one-mode
//! partners, `SO` shared objects of two actors and `SA` shared users of two
//! objects. Alternating statistics use `q = 1 - 1/lambda`.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Deref, DerefMut};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::netcore::{BitMatrix, DyadRef, MultilevelNetwork, NetworkError, TieLevel};
use crate::scalar::{choose, Scalar};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatError {
    #[error("unknown statistic `{0}`")]
    UnknownStatistic(String),
    #[error("unknown attribute `{0}`")]
    UnknownAttribute(String),
    #[error("statistic `{0}` needs an attribute")]
    MissingAttribute(String),
    #[error("statistic `{0}` does not take an attribute")]
    UnexpectedAttribute(String),
    #[error("statistic `{0}`: lambda must be finite and > 1")]
    InvalidLambda(String),
    #[error("model has no statistics")]
    EmptyModel,
    #[error("duplicate statistic `{0}` in model")]
    DuplicateDescriptor(String),
    #[error("free level {0} has no statistic touching it")]
    UntouchedLevel(TieLevel),
    #[error("`{0}` is a summary statistic and cannot be a model term")]
    SummaryInModel(String),
    #[error(transparent)]
    Network(#[from] NetworkError),
}

/// One-mode side of the network.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    A,
    B,
}

impl Side {
    fn tie_level(self) -> TieLevel {
        match self {
            Side::A => TieLevel::A,
            Side::B => TieLevel::B,
        }
    }

    fn suffix(self) -> &'static str {
        match self {
            Side::A => "A",
            Side::B => "B",
        }
    }
}

/// Degree sequence used by the summary statistics.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DegreeSeq {
    A,
    B,
    XActor,
    XObject,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ClusterKind {
    A,
    B,
    X,
}

/// Catalog entry. Stable string ids are given by [`StatId::name`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StatId {
    Edge(Side),
    /// k-star, k in 2..=5.
    Star(Side, u8),
    Triangle(Side),
    Cycle4(Side),
    Isolates(Side),
    IsolateEdges(Side),
    AltStar(Side),
    AltTriangle(Side),
    AltTwoPath(Side),
    MatchA,
    MismatchA,
    XEdge,
    XStar2A,
    XStar2B,
    XStar3A,
    XStar3B,
    X3Path,
    X4Cycle,
    XAltStarA,
    XAltStarB,
    XAlt4CycleA,
    IsolatesXA,
    IsolatesXB,
    XMatchB,
    XMismatchB,
    X4CycleMatch,
    X4CycleMismatch,
    Star2AX,
    Star2BX,
    StarAXAA,
    TriangleXAX,
    AltTriangleXAX,
    L3XAX,
    TXAXMatch,
    TXAXMismatch,
    TriangleXBX,
    AltTriangleXBX,
    L3XBX,
    L3AXB,
    C4AXB,
    StddevDegree(DegreeSeq),
    SkewDegree(DegreeSeq),
    Clustering(ClusterKind),
}

/// Which part of the two-level network a statistic describes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StatLevel {
    A,
    B,
    X,
    Cross,
}

impl StatLevel {
    /// Section heading used in fit reports.
    pub fn section(self) -> &'static str {
        match self {
            StatLevel::A => "Social",
            StatLevel::B => "Material",
            StatLevel::X => "Object usage",
            StatLevel::Cross => "Socio-material",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AttributeMode {
    Match,
    Mismatch,
}

impl StatId {
    /// Every catalog entry, in catalog order.
    pub fn all() -> Vec<StatId> {
        use StatId::*;
        let mut out = Vec::new();
        for side in [Side::A, Side::B] {
            out.push(Edge(side));
            for k in 2..=5 {
                out.push(Star(side, k));
            }
            out.extend([
                Triangle(side),
                Cycle4(side),
                Isolates(side),
                IsolateEdges(side),
                AltStar(side),
                AltTriangle(side),
                AltTwoPath(side),
            ]);
            if side == Side::A {
                out.extend([MatchA, MismatchA]);
            }
        }
        out.extend([
            XEdge,
            XStar2A,
            XStar2B,
            XStar3A,
            XStar3B,
            X3Path,
            X4Cycle,
            XAltStarA,
            XAltStarB,
            XAlt4CycleA,
            IsolatesXA,
            IsolatesXB,
            XMatchB,
            XMismatchB,
            X4CycleMatch,
            X4CycleMismatch,
            Star2AX,
            Star2BX,
            StarAXAA,
            TriangleXAX,
            AltTriangleXAX,
            L3XAX,
            TXAXMatch,
            TXAXMismatch,
            TriangleXBX,
            AltTriangleXBX,
            L3XBX,
            L3AXB,
            C4AXB,
        ]);
        for seq in [DegreeSeq::A, DegreeSeq::XActor, DegreeSeq::XObject, DegreeSeq::B] {
            out.push(StddevDegree(seq));
            out.push(SkewDegree(seq));
        }
        out.extend([
            Clustering(ClusterKind::A),
            Clustering(ClusterKind::X),
            Clustering(ClusterKind::B),
        ]);
        out
    }

    pub fn name(self) -> String {
        use StatId::*;
        let seq_name = |s: DegreeSeq| match s {
            DegreeSeq::A => "A",
            DegreeSeq::B => "B",
            DegreeSeq::XActor => "X_A",
            DegreeSeq::XObject => "X_B",
        };
        match self {
            Edge(s) => format!("Edge{}", s.suffix()),
            Star(s, k) => format!("Star{k}{}", s.suffix()),
            Triangle(s) => format!("Triangle{}", s.suffix()),
            Cycle4(s) => format!("Cycle4{}", s.suffix()),
            Isolates(s) => format!("Isolates{}", s.suffix()),
            IsolateEdges(s) => format!("IsolateEdges{}", s.suffix()),
            AltStar(s) => format!("AS{}", s.suffix()),
            AltTriangle(s) => format!("AT{}", s.suffix()),
            AltTwoPath(s) => format!("A2P{}", s.suffix()),
            MatchA => "MatchA".into(),
            MismatchA => "MismatchA".into(),
            XEdge => "XEdge".into(),
            XStar2A => "XStar2A".into(),
            XStar2B => "XStar2B".into(),
            XStar3A => "XStar3A".into(),
            XStar3B => "XStar3B".into(),
            X3Path => "X3Path".into(),
            X4Cycle => "X4Cycle".into(),
            XAltStarA => "XASA".into(),
            XAltStarB => "XASB".into(),
            XAlt4CycleA => "ALT4CYC_A".into(),
            IsolatesXA => "IsolatesXA".into(),
            IsolatesXB => "IsolatesXB".into(),
            XMatchB => "XMatchB".into(),
            XMismatchB => "XMismatchB".into(),
            X4CycleMatch => "X4CycleMatch".into(),
            X4CycleMismatch => "X4CycleMismatch".into(),
            Star2AX => "Star2AX".into(),
            Star2BX => "Star2BX".into(),
            StarAXAA => "StarAXAA".into(),
            TriangleXAX => "TriangleXAX".into(),
            AltTriangleXAX => "ATXAX".into(),
            L3XAX => "L3XAX".into(),
            TXAXMatch => "TXAXMatch".into(),
            TXAXMismatch => "TXAXMismatch".into(),
            TriangleXBX => "TriangleXBX".into(),
            AltTriangleXBX => "ATXBX".into(),
            L3XBX => "L3XBX".into(),
            L3AXB => "L3AXB".into(),
            C4AXB => "C4AXB".into(),
            StddevDegree(s) => format!("stddev_degree{}", seq_name(s)),
            SkewDegree(s) => format!("skew_degree{}", seq_name(s)),
            Clustering(ClusterKind::A) => "clusteringA".into(),
            Clustering(ClusterKind::B) => "clusteringB".into(),
            Clustering(ClusterKind::X) => "clusteringX".into(),
        }
    }

    /// Parses a catalog id. A few spellings used by other ERGM tools are
    /// accepted as well.
    pub fn from_name(name: &str) -> Option<StatId> {
        let canonical = match name.trim() {
            "X2StarMatch" | "X2StarAMatch" => "XMatchB",
            "X2StarMismatch" | "X2StarAMismatch" => "XMismatchB",
            "X4CycleAMatch" => "X4CycleMatch",
            "X4CycleAMismatch" => "X4CycleMismatch",
            "MatchTXAX" => "TXAXMatch",
            "MismatchTXAX" => "TXAXMismatch",
            "IsolatedEdgesA" => "IsolateEdgesA",
            "IsolatedEdgesB" => "IsolateEdgesB",
            other => other,
        };
        StatId::all().into_iter().find(|id| id.name() == canonical)
    }

    pub fn level(self) -> StatLevel {
        use StatId::*;
        match self {
            Edge(Side::A) | Star(Side::A, _) | Triangle(Side::A) | Cycle4(Side::A)
            | Isolates(Side::A) | IsolateEdges(Side::A) | AltStar(Side::A)
            | AltTriangle(Side::A) | AltTwoPath(Side::A) | MatchA | MismatchA => StatLevel::A,
            Edge(Side::B) | Star(Side::B, _) | Triangle(Side::B) | Cycle4(Side::B)
            | Isolates(Side::B) | IsolateEdges(Side::B) | AltStar(Side::B)
            | AltTriangle(Side::B) | AltTwoPath(Side::B) => StatLevel::B,
            XEdge | XStar2A | XStar2B | XStar3A | XStar3B | X3Path | X4Cycle | XAltStarA
            | XAltStarB | XAlt4CycleA | IsolatesXA | IsolatesXB | XMatchB | XMismatchB
            | X4CycleMatch | X4CycleMismatch => StatLevel::X,
            StddevDegree(DegreeSeq::A) | SkewDegree(DegreeSeq::A) | Clustering(ClusterKind::A) => {
                StatLevel::A
            }
            StddevDegree(DegreeSeq::B) | SkewDegree(DegreeSeq::B) | Clustering(ClusterKind::B) => {
                StatLevel::B
            }
            StddevDegree(_) | SkewDegree(_) | Clustering(ClusterKind::X) => StatLevel::X,
            Star2AX | Star2BX | StarAXAA | TriangleXAX | AltTriangleXAX | L3XAX | TXAXMatch
            | TXAXMismatch | TriangleXBX | AltTriangleXBX | L3XBX | L3AXB | C4AXB => {
                StatLevel::Cross
            }
        }
    }

    /// Tie levels whose toggles can change the statistic.
    pub fn touches(self) -> &'static [TieLevel] {
        use StatId::*;
        use TieLevel as L;
        match self {
            Star2AX | StarAXAA | TriangleXAX | AltTriangleXAX | L3XAX | TXAXMatch
            | TXAXMismatch => &[L::A, L::X],
            Star2BX | TriangleXBX | AltTriangleXBX | L3XBX => &[L::B, L::X],
            L3AXB | C4AXB => &[L::A, L::B, L::X],
            other => match other.level() {
                StatLevel::A => &[L::A],
                StatLevel::B => &[L::B],
                _ => &[L::X],
            },
        }
    }

    pub fn attribute_mode(self) -> Option<AttributeMode> {
        use StatId::*;
        match self {
            MatchA | XMatchB | X4CycleMatch | TXAXMatch => Some(AttributeMode::Match),
            MismatchA | XMismatchB | X4CycleMismatch | TXAXMismatch => {
                Some(AttributeMode::Mismatch)
            }
            _ => None,
        }
    }

    pub fn is_alternating(self) -> bool {
        use StatId::*;
        matches!(
            self,
            AltStar(_)
                | AltTriangle(_)
                | AltTwoPath(_)
                | XAltStarA
                | XAltStarB
                | XAlt4CycleA
                | AltTriangleXAX
                | AltTriangleXBX
        )
    }

    /// Degree/clustering summaries: GOF only, never model terms.
    pub fn is_summary(self) -> bool {
        matches!(
            self,
            StatId::StddevDegree(_) | StatId::SkewDegree(_) | StatId::Clustering(_)
        )
    }

    /// Integer-valued statistics.
    pub fn is_count(self) -> bool {
        !self.is_alternating() && !self.is_summary()
    }

    /// Human-readable pattern label used in fit reports.
    pub fn pattern_label(self, attribute: Option<&str>) -> String {
        use StatId::*;
        let attr = attribute.unwrap_or("attribute");
        match self {
            Edge(_) => "Edge".into(),
            Star(_, 2) => "2-stars".into(),
            Star(_, k) => format!("{k}-stars"),
            Triangle(_) => "Triangles".into(),
            Cycle4(_) => "4-cycles".into(),
            Isolates(_) => "Isolates".into(),
            IsolateEdges(_) => "Isolated edges".into(),
            AltStar(_) => "Degree distribution".into(),
            AltTriangle(_) => "Triadic closure".into(),
            AltTwoPath(_) => "Alternating two-paths".into(),
            MatchA => format!("Ties between actors of same {attr}"),
            MismatchA => format!("Ties between actors of different {attr}"),
            XEdge => "Actors using objects".into(),
            XStar2A => "Pairs of objects used by actors".into(),
            XStar2B => "Pair of actors sharing an object".into(),
            XStar3A => "Triples of objects used by actors".into(),
            XStar3B => "Triples of actors sharing an object".into(),
            X3Path => "Usage three-paths".into(),
            X4Cycle => "Usage four-cycles".into(),
            XAltStarA => "Object usage degree of actors".into(),
            XAltStarB => "Usage degree of objects".into(),
            XAlt4CycleA => "Pair of actors sharing multiple objects".into(),
            IsolatesXA => "Actors using no objects".into(),
            IsolatesXB => "Unused objects".into(),
            XMatchB => format!("Objects shared by actors of same {attr}"),
            XMismatchB => format!("Objects shared by actors of different {attr}"),
            X4CycleMatch => format!("Object pairs shared by actors of same {attr}"),
            X4CycleMismatch => format!("Object pairs shared by actors of different {attr}"),
            Star2AX => "Influence of social ties on usage of objects".into(),
            Star2BX => "Influence of material ties on usage of objects".into(),
            StarAXAA => "Influence of social ties on usage of objects in dyads".into(),
            TriangleXAX => "Influence of dyadic social ties on object sharing".into(),
            AltTriangleXAX => "Alternating object sharing by socially tied actors".into(),
            L3XAX => "Usage three-paths through social ties".into(),
            TXAXMatch => format!(
                "Influence of dyadic social ties between actors of same {attr} on objects sharing"
            ),
            TXAXMismatch => format!(
                "Influence of dyadic social ties between actors of different {attr} on objects sharing"
            ),
            TriangleXBX => "Usage of objects that are part of material contexts".into(),
            AltTriangleXBX => "Alternating usage of linked objects".into(),
            L3XBX => "Engagement with same materiality".into(),
            L3AXB => "Socio-material three-paths".into(),
            C4AXB => {
                "Influence of dyadic social ties on engagement with the same material context"
                    .into()
            }
            other => other.name(),
        }
    }
}

impl fmt::Display for StatId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Resolves an English pattern label (as printed in ERGM result tables) to a
/// catalog id. Labels that exist on both one-mode levels take `level`
/// (`A` when absent). Matching ignores case and a trailing `[H..]` tag.
pub fn resolve_label(label: &str, level: Option<TieLevel>) -> Option<StatId> {
    use StatId::*;
    let side = match level {
        Some(TieLevel::B) => Side::B,
        _ => Side::A,
    };
    let mut key = label.trim().to_ascii_lowercase();
    if let Some(pos) = key.find(" [h") {
        key.truncate(pos);
    }
    let id = match key.as_str() {
        "edge" | "edges" => Edge(side),
        "2-star" | "2-stars" => Star(side, 2),
        "degree spread" | "degree distribution" => AltStar(side),
        "triadic closure" => AltTriangle(side),
        "tie between actors with same attribute value"
        | "ties between actors with same attribute value" => MatchA,
        "actor using object" | "actors using objects" => XEdge,
        "object usage degree of actors" => XAltStarA,
        "usage degree of objects" => XAltStarB,
        "pair of actors sharing an object" => XStar2B,
        "pair of actors sharing objects" | "pair of actors sharing multiple objects" => {
            XAlt4CycleA
        }
        "pairs of objects used by actors" => XStar2A,
        "actors with same attribute values sharing object" => XMatchB,
        "usage of objects that are part of material contexts" => TriangleXBX,
        "engagement with same materiality" => L3XBX,
        "influence of social ties on usage of objects" => Star2AX,
        "influence of dyadic social ties on usage of objects"
        | "influence of social ties on usage of objects in dyads" => StarAXAA,
        "influence of dyadic social ties on object sharing" => TriangleXAX,
        "influence of dyadic social ties between actors with same attribute values on object sharing" => {
            TXAXMatch
        }
        "influence of dyadic social ties on engagement with the same material context" => C4AXB,
        _ => return None,
    };
    Some(id)
}

/// A statistic with its damping and attribute binding.
#[derive(Clone, Debug, PartialEq)]
pub struct StatDescriptor<S> {
    pub id: StatId,
    pub lambda: S,
    pub attribute: Option<String>,
    /// Report label override.
    pub label: Option<String>,
}

impl<S: Scalar> StatDescriptor<S> {
    pub fn new(id: StatId) -> Self {
        StatDescriptor {
            id,
            lambda: S::lit(2.0),
            attribute: None,
            label: None,
        }
    }

    pub fn with_lambda(mut self, lambda: S) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn with_attribute(mut self, attribute: impl Into<String>) -> Self {
        self.attribute = Some(attribute.into());
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    /// Column name: `Edge A`-style ids get the attribute prefixed, as in
    /// `gender_MatchA`.
    pub fn key(&self) -> String {
        match &self.attribute {
            Some(a) => format!("{a}_{}", self.id.name()),
            None => self.id.name(),
        }
    }

    pub fn display_label(&self) -> String {
        self.label
            .clone()
            .unwrap_or_else(|| self.id.pattern_label(self.attribute.as_deref()))
    }

    pub fn validate(&self) -> Result<(), StatError> {
        let lambda = self.lambda.as_f64();
        if !(lambda.is_finite() && lambda > 1.0) {
            return Err(StatError::InvalidLambda(self.key()));
        }
        match (self.id.attribute_mode(), &self.attribute) {
            (Some(_), None) => Err(StatError::MissingAttribute(self.id.name())),
            (None, Some(_)) => Err(StatError::UnexpectedAttribute(self.id.name())),
            _ => Ok(()),
        }
    }

    fn same_term(&self, other: &Self) -> bool {
        self.id == other.id
            && self.attribute == other.attribute
            && (!self.id.is_alternating() || self.lambda == other.lambda)
    }
}

/// Ordered list of model terms plus the levels that may change.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelSpec<S> {
    stats: Vec<StatDescriptor<S>>,
    free_levels: BTreeSet<TieLevel>,
}

impl<S: Scalar> ModelSpec<S> {
    pub fn new(
        stats: Vec<StatDescriptor<S>>,
        free_levels: impl IntoIterator<Item = TieLevel>,
    ) -> Result<Self, StatError> {
        if stats.is_empty() {
            return Err(StatError::EmptyModel);
        }
        for (k, d) in stats.iter().enumerate() {
            d.validate()?;
            if d.id.is_summary() {
                return Err(StatError::SummaryInModel(d.id.name()));
            }
            if stats[..k].iter().any(|e| e.same_term(d)) {
                return Err(StatError::DuplicateDescriptor(d.key()));
            }
        }
        let free_levels: BTreeSet<TieLevel> = free_levels.into_iter().collect();
        for &level in &free_levels {
            if !stats.iter().any(|d| d.id.touches().contains(&level)) {
                return Err(StatError::UntouchedLevel(level));
            }
        }
        Ok(ModelSpec { stats, free_levels })
    }

    pub fn stats(&self) -> &[StatDescriptor<S>] {
        &self.stats
    }

    pub fn len(&self) -> usize {
        self.stats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stats.is_empty()
    }

    pub fn free_levels(&self) -> &BTreeSet<TieLevel> {
        &self.free_levels
    }

    pub fn is_free(&self, level: TieLevel) -> bool {
        self.free_levels.contains(&level)
    }

    pub fn with_free_levels(
        &self,
        free_levels: impl IntoIterator<Item = TieLevel>,
    ) -> Result<Self, StatError> {
        Self::new(self.stats.clone(), free_levels)
    }

    pub fn keys(&self) -> Vec<String> {
        self.stats.iter().map(|d| d.key()).collect()
    }

    /// Checks attribute bindings against a network.
    pub fn check_network(&self, net: &MultilevelNetwork) -> Result<(), StatError> {
        for d in &self.stats {
            if let Some(a) = &d.attribute {
                if !net.attributes().has(a) {
                    return Err(StatError::UnknownAttribute(a.clone()));
                }
            }
        }
        Ok(())
    }
}

/// Statistic values aligned with a [`ModelSpec`] (or any descriptor list).
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct StatVector<S>(pub Vec<S>);

impl<S: Scalar> StatVector<S> {
    pub fn zeros(n: usize) -> Self {
        StatVector(vec![S::zero(); n])
    }

    pub fn dot(&self, weights: &[S]) -> S {
        self.0.iter().zip(weights).map(|(a, b)| *a * *b).sum()
    }
}

impl<S> Deref for StatVector<S> {
    type Target = Vec<S>;
    fn deref(&self) -> &Vec<S> {
        &self.0
    }
}

impl<S> DerefMut for StatVector<S> {
    fn deref_mut(&mut self) -> &mut Vec<S> {
        &mut self.0
    }
}

fn attribute_codes<'a, S>(
    net: &'a MultilevelNetwork,
    desc: &StatDescriptor<S>,
) -> Result<Option<&'a [u32]>, StatError> {
    match (&desc.attribute, desc.id.attribute_mode()) {
        (Some(a), Some(_)) => net
            .attributes()
            .codes(a)
            .map(Some)
            .ok_or_else(|| StatError::UnknownAttribute(a.clone())),
        (None, Some(_)) => Err(StatError::MissingAttribute(desc.id.name())),
        _ => Ok(None),
    }
}

#[inline]
fn agrees(mode: Option<AttributeMode>, codes: Option<&[u32]>, i: usize, j: usize) -> bool {
    match (mode, codes) {
        (Some(AttributeMode::Match), Some(c)) => c[i] == c[j],
        (Some(AttributeMode::Mismatch), Some(c)) => c[i] != c[j],
        _ => true,
    }
}

fn one_mode(net: &MultilevelNetwork, side: Side) -> (&BitMatrix, &[u32]) {
    match side {
        Side::A => (net.matrix(TieLevel::A), net.degrees_a()),
        Side::B => (net.matrix(TieLevel::B), net.degrees_b()),
    }
}

fn common(r: &[bool], s: &[bool]) -> u64 {
    r.iter().zip(s).filter(|(a, b)| **a && **b).count() as u64
}

fn shared_users_matrix(net: &MultilevelNetwork) -> Vec<Vec<u64>> {
    let m = net.n_objects();
    let mut sa = vec![vec![0u64; m]; m];
    for i in 0..net.n_actors() {
        let objs: Vec<usize> = net.objects_of(i).collect();
        for (k, &o) in objs.iter().enumerate() {
            for &p in &objs[k + 1..] {
                sa[o][p] += 1;
                sa[p][o] += 1;
            }
        }
    }
    sa
}

/// `lambda^2 * sum_v [q^d_v + d_v/lambda - 1]`
fn alt_star<S: Scalar>(degrees: &[u32], lambda: S) -> S {
    let q = S::one() - lambda.recip();
    let total: S = degrees
        .iter()
        .map(|&d| q.powi(d as i32) + S::from_count(d as u64) / lambda - S::one())
        .sum();
    lambda * lambda * total
}

/// `lambda * [1 - q^s]`
#[inline]
fn alt_term<S: Scalar>(s: u64, lambda: S) -> S {
    let q = S::one() - lambda.recip();
    lambda * (S::one() - q.powi(s as i32))
}

fn degree_moments(degrees: &[u32]) -> (f64, f64, f64) {
    let n = degrees.len() as f64;
    let mean = degrees.iter().map(|&d| d as f64).sum::<f64>() / n;
    let (mut m2, mut m3) = (0.0, 0.0);
    for &d in degrees {
        let e = d as f64 - mean;
        m2 += e * e;
        m3 += e * e * e;
    }
    (mean, m2 / n, m3 / n)
}

/// Sample standard deviation (n - 1 denominator); 0 below two values.
pub fn degree_stddev(degrees: &[u32]) -> f64 {
    let n = degrees.len();
    if n < 2 {
        return 0.0;
    }
    let (_, m2, _) = degree_moments(degrees);
    (m2 * n as f64 / (n as f64 - 1.0)).sqrt()
}

/// Adjusted Fisher-Pearson skewness; 0 below three values or for a
/// constant sequence.
pub fn degree_skewness(degrees: &[u32]) -> f64 {
    let n = degrees.len();
    if n < 3 {
        return 0.0;
    }
    let (_, m2, m3) = degree_moments(degrees);
    if m2 <= 0.0 {
        return 0.0;
    }
    let g1 = m3 / m2.powf(1.5);
    let n = n as f64;
    g1 * (n * (n - 1.0)).sqrt() / (n - 2.0)
}

/// Integer part of the catalog computed exactly.
fn global_count(
    net: &MultilevelNetwork,
    id: StatId,
    codes: Option<&[u32]>,
) -> Option<u64> {
    use StatId::*;
    let n = net.n_actors();
    let m = net.n_objects();
    let mode = id.attribute_mode();
    let value = match id {
        Edge(s) => net.edge_count(s.tie_level()),
        Star(s, k) => {
            let (_, deg) = one_mode(net, s);
            deg.iter().map(|&d| choose(d as u64, k as u64)).sum()
        }
        Triangle(s) => {
            let (adj, _) = one_mode(net, s);
            let size = adj_size(net, s);
            let mut t = 0;
            for i in 0..size {
                for j in i + 1..size {
                    if adj.get(i, j) {
                        t += common(adj.row(i), adj.row(j));
                    }
                }
            }
            t / 3
        }
        Cycle4(s) => {
            let (adj, _) = one_mode(net, s);
            let size = adj_size(net, s);
            let mut c = 0;
            for i in 0..size {
                for j in i + 1..size {
                    c += choose(common(adj.row(i), adj.row(j)), 2);
                }
            }
            c / 2
        }
        Isolates(s) => one_mode(net, s).1.iter().filter(|&&d| d == 0).count() as u64,
        IsolateEdges(s) => {
            let (adj, deg) = one_mode(net, s);
            let size = adj_size(net, s);
            let mut c = 0;
            for i in 0..size {
                for j in i + 1..size {
                    if adj.get(i, j) && deg[i] == 1 && deg[j] == 1 {
                        c += 1;
                    }
                }
            }
            c
        }
        MatchA | MismatchA => {
            let mut c = 0;
            for i in 0..n {
                for j in net.neighbors_a(i).filter(|&j| j > i) {
                    if agrees(mode, codes, i, j) {
                        c += 1;
                    }
                }
            }
            c
        }
        XEdge => net.edge_count(TieLevel::X),
        XStar2A => sum_choose(net.degrees_x_actor(), 2),
        XStar3A => sum_choose(net.degrees_x_actor(), 3),
        XStar2B => sum_choose(net.degrees_x_object(), 2),
        XStar3B => sum_choose(net.degrees_x_object(), 3),
        X3Path => {
            let mut c = 0;
            for i in 0..n {
                for o in net.objects_of(i) {
                    c += (net.degree_x_actor(i) as u64 - 1) * (net.degree_x_object(o) as u64 - 1);
                }
            }
            c
        }
        X4Cycle | X4CycleMatch | X4CycleMismatch => {
            let x = net.matrix(TieLevel::X);
            let mut c = 0;
            for i in 0..n {
                for j in i + 1..n {
                    if agrees(mode, codes, i, j) {
                        c += choose(common(x.row(i), x.row(j)), 2);
                    }
                }
            }
            c
        }
        IsolatesXA => net.degrees_x_actor().iter().filter(|&&d| d == 0).count() as u64,
        IsolatesXB => net.degrees_x_object().iter().filter(|&&d| d == 0).count() as u64,
        XMatchB | XMismatchB => {
            let mut c = 0;
            for o in 0..m {
                let users: Vec<usize> = net.users_of(o).collect();
                for (k, &i) in users.iter().enumerate() {
                    for &j in &users[k + 1..] {
                        if agrees(mode, codes, i, j) {
                            c += 1;
                        }
                    }
                }
            }
            c
        }
        Star2AX => (0..n)
            .map(|i| net.degree_a(i) as u64 * net.degree_x_actor(i) as u64)
            .sum(),
        Star2BX => (0..m)
            .map(|o| net.degree_b(o) as u64 * net.degree_x_object(o) as u64)
            .sum(),
        StarAXAA => (0..n)
            .map(|i| net.degree_x_actor(i) as u64 * choose(net.degree_a(i) as u64, 2))
            .sum(),
        TriangleXAX | TXAXMatch | TXAXMismatch => {
            let mut c = 0;
            for i in 0..n {
                for j in net.neighbors_a(i).filter(|&j| j > i) {
                    if agrees(mode, codes, i, j) {
                        c += net.shared_objects(i, j) as u64;
                    }
                }
            }
            c
        }
        L3XAX => {
            let mut c = 0;
            for i in 0..n {
                for j in net.neighbors_a(i).filter(|&j| j > i) {
                    c += net.degree_x_actor(i) as u64 * net.degree_x_actor(j) as u64
                        - net.shared_objects(i, j) as u64;
                }
            }
            c
        }
        TriangleXBX | L3XBX => {
            let sa = shared_users_matrix(net);
            let mut c = 0;
            for o in 0..m {
                for p in net.neighbors_b(o).filter(|&p| p > o) {
                    c += if id == TriangleXBX {
                        sa[o][p]
                    } else {
                        net.degree_x_object(o) as u64 * net.degree_x_object(p) as u64 - sa[o][p]
                    };
                }
            }
            c
        }
        L3AXB => {
            let mut c = 0;
            for i in 0..n {
                for o in net.objects_of(i) {
                    c += net.degree_a(i) as u64 * net.degree_b(o) as u64;
                }
            }
            c
        }
        C4AXB => {
            let a_ties = net.ties(TieLevel::A);
            let b_ties = net.ties(TieLevel::B);
            let mut c = 0;
            for ta in &a_ties {
                let (i, j) = (ta.first(), ta.second());
                for tb in &b_ties {
                    let (o, p) = (tb.first(), tb.second());
                    c += (net.tie_x(i, o) && net.tie_x(j, p)) as u64
                        + (net.tie_x(i, p) && net.tie_x(j, o)) as u64;
                }
            }
            c
        }
        _ => return None,
    };
    Some(value)
}

fn adj_size(net: &MultilevelNetwork, side: Side) -> usize {
    match side {
        Side::A => net.n_actors(),
        Side::B => net.n_objects(),
    }
}

fn sum_choose(degrees: &[u32], k: u64) -> u64 {
    degrees.iter().map(|&d| choose(d as u64, k)).sum()
}

/// Value of one catalog statistic on the network.
pub fn global_statistic<S: Scalar>(
    net: &MultilevelNetwork,
    desc: &StatDescriptor<S>,
) -> Result<S, StatError> {
    use StatId::*;
    let codes = attribute_codes(net, desc)?;
    if let Some(c) = global_count(net, desc.id, codes) {
        return Ok(S::from_count(c));
    }
    let lambda = desc.lambda;
    let n = net.n_actors();
    let m = net.n_objects();
    let value = match desc.id {
        AltStar(s) => alt_star(one_mode(net, s).1, lambda),
        AltTriangle(s) => {
            let (adj, _) = one_mode(net, s);
            let size = adj_size(net, s);
            let mut acc = S::zero();
            for i in 0..size {
                for j in i + 1..size {
                    if adj.get(i, j) {
                        acc += alt_term(common(adj.row(i), adj.row(j)), lambda);
                    }
                }
            }
            acc
        }
        AltTwoPath(s) => {
            let (adj, _) = one_mode(net, s);
            let size = adj_size(net, s);
            let mut acc = S::zero();
            for i in 0..size {
                for j in i + 1..size {
                    acc += alt_term(common(adj.row(i), adj.row(j)), lambda);
                }
            }
            acc
        }
        XAltStarA => alt_star(net.degrees_x_actor(), lambda),
        XAltStarB => alt_star(net.degrees_x_object(), lambda),
        XAlt4CycleA => {
            let x = net.matrix(TieLevel::X);
            let mut acc = S::zero();
            for i in 0..n {
                for j in i + 1..n {
                    let so = common(x.row(i), x.row(j));
                    if so >= 1 {
                        acc += alt_term(so - 1, lambda);
                    }
                }
            }
            acc
        }
        AltTriangleXAX => {
            let mut acc = S::zero();
            for i in 0..n {
                for j in net.neighbors_a(i).filter(|&j| j > i) {
                    acc += alt_term(net.shared_objects(i, j) as u64, lambda);
                }
            }
            acc
        }
        AltTriangleXBX => {
            let sa = shared_users_matrix(net);
            let mut acc = S::zero();
            for o in 0..m {
                for p in net.neighbors_b(o).filter(|&p| p > o) {
                    acc += alt_term(sa[o][p], lambda);
                }
            }
            acc
        }
        StddevDegree(seq) => S::lit(degree_stddev(degree_seq(net, seq))),
        SkewDegree(seq) => S::lit(degree_skewness(degree_seq(net, seq))),
        Clustering(kind) => {
            let (num, den) = match kind {
                ClusterKind::A | ClusterKind::B => {
                    let side = if kind == ClusterKind::A { Side::A } else { Side::B };
                    (
                        3 * global_count(net, Triangle(side), None).unwrap(),
                        global_count(net, Star(side, 2), None).unwrap(),
                    )
                }
                ClusterKind::X => (
                    4 * global_count(net, X4Cycle, None).unwrap(),
                    global_count(net, X3Path, None).unwrap(),
                ),
            };
            if den == 0 {
                S::zero()
            } else {
                S::lit(num as f64 / den as f64)
            }
        }
        _ => unreachable!("count statistics handled above"),
    };
    Ok(value)
}

fn degree_seq(net: &MultilevelNetwork, seq: DegreeSeq) -> &[u32] {
    match seq {
        DegreeSeq::A => net.degrees_a(),
        DegreeSeq::B => net.degrees_b(),
        DegreeSeq::XActor => net.degrees_x_actor(),
        DegreeSeq::XObject => net.degrees_x_object(),
    }
}

/// Evaluates a list of descriptors.
pub fn evaluate<S: Scalar>(
    net: &MultilevelNetwork,
    stats: &[StatDescriptor<S>],
) -> Result<StatVector<S>, StatError> {
    stats
        .iter()
        .map(|d| global_statistic(net, d))
        .collect::<Result<Vec<_>, _>>()
        .map(StatVector)
}

/// `z(G)` for the model terms.
pub fn statistic_vector<S: Scalar>(
    net: &MultilevelNetwork,
    model: &ModelSpec<S>,
) -> Result<StatVector<S>, StatError> {
    evaluate(net, model.stats())
}

/// `z(G with dyad) - z(G without dyad)` for every model term.
pub fn change_statistics<S: Scalar>(
    net: &MultilevelNetwork,
    dyad: DyadRef,
    model: &ModelSpec<S>,
) -> Result<StatVector<S>, StatError> {
    let mut out = StatVector::zeros(model.len());
    change_into(net, dyad, model.stats(), &mut out)?;
    Ok(out)
}

/// As [`change_statistics`] for an arbitrary descriptor list, writing into
/// `out`.
pub fn change_into<S: Scalar>(
    net: &MultilevelNetwork,
    dyad: DyadRef,
    stats: &[StatDescriptor<S>],
    out: &mut [S],
) -> Result<(), StatError> {
    net.check_dyad(dyad)?;
    let ctx = DyadContext::new(net, dyad);
    for (slot, desc) in out.iter_mut().zip(stats) {
        let codes = attribute_codes(net, desc)?;
        *slot = if desc.id.is_summary() {
            summary_change(net, dyad, desc)?
        } else {
            ctx.change(desc, codes)
        };
    }
    Ok(())
}

fn summary_change<S: Scalar>(
    net: &MultilevelNetwork,
    dyad: DyadRef,
    desc: &StatDescriptor<S>,
) -> Result<S, StatError> {
    let mut with = net.clone();
    with.set_tie(dyad, true)?;
    let mut without = net.clone();
    without.set_tie(dyad, false)?;
    Ok(global_statistic(&with, desc)? - global_statistic(&without, desc)?)
}

/// Neighbourhood quantities of one dyad, all measured with the dyad absent.
struct DyadContext<'a> {
    net: &'a MultilevelNetwork,
    dyad: DyadRef,
    present: u32,
}

impl<'a> DyadContext<'a> {
    fn new(net: &'a MultilevelNetwork, dyad: DyadRef) -> Self {
        DyadContext {
            net,
            dyad,
            present: net.has_tie(dyad) as u32,
        }
    }

    fn change<S: Scalar>(&self, desc: &StatDescriptor<S>, codes: Option<&[u32]>) -> S {
        match self.dyad.level() {
            TieLevel::A => self.change_a(desc, codes),
            TieLevel::B => self.change_b(desc),
            TieLevel::X => self.change_x(desc, codes),
        }
    }

    /// Change of a one-mode statistic of `side` when toggling `(u, v)` on
    /// that side.
    fn one_mode_change<S: Scalar>(&self, side: Side, id: StatId, lambda: S) -> S {
        use StatId::*;
        let net = self.net;
        let (adj, deg) = one_mode(net, side);
        let (u, v) = (self.dyad.first(), self.dyad.second());
        let p = self.present;
        let du = deg[u] - p;
        let dv = deg[v] - p;
        let q = S::one() - lambda.recip();
        let neighbors = |w: usize| adj.row(w).iter().enumerate().filter(|(_, &b)| b).map(|(k, _)| k);
        match id {
            Edge(_) => S::one(),
            Star(_, k) => S::from_count(
                choose(du as u64, k as u64 - 1) + choose(dv as u64, k as u64 - 1),
            ),
            Triangle(_) => S::from_count(common(adj.row(u), adj.row(v))),
            Cycle4(_) => {
                let mut c = 0u64;
                for k in neighbors(u).filter(|&k| k != v) {
                    for l in neighbors(v).filter(|&l| l != u && l != k) {
                        c += adj.get(k, l) as u64;
                    }
                }
                S::from_count(c)
            }
            Isolates(_) => -S::from_count((du == 0) as u64 + (dv == 0) as u64),
            IsolateEdges(_) => {
                let in_isolated_pair = |w: usize, other: usize, dw: u32| -> bool {
                    dw == 1
                        && neighbors(w)
                            .find(|&k| k != other)
                            .is_some_and(|k| deg[k] == 1)
                };
                let created = (du == 0 && dv == 0) as i64;
                let destroyed =
                    in_isolated_pair(u, v, du) as i64 + in_isolated_pair(v, u, dv) as i64;
                S::from_signed(created - destroyed)
            }
            AltStar(_) => {
                lambda * (S::one() - q.powi(du as i32)) + lambda * (S::one() - q.powi(dv as i32))
            }
            AltTriangle(_) => {
                let mut acc = alt_term(common(adj.row(u), adj.row(v)), lambda);
                for k in neighbors(u).filter(|&k| k != v && adj.get(v, k)) {
                    let sp_uk = common(adj.row(u), adj.row(k)) - p as u64;
                    let sp_vk = common(adj.row(v), adj.row(k)) - p as u64;
                    acc += q.powi(sp_uk as i32) + q.powi(sp_vk as i32);
                }
                acc
            }
            AltTwoPath(_) => {
                let mut acc = S::zero();
                for k in neighbors(v).filter(|&k| k != u) {
                    let tp = common(adj.row(u), adj.row(k)) - p as u64;
                    acc += q.powi(tp as i32);
                }
                for k in neighbors(u).filter(|&k| k != v) {
                    let tp = common(adj.row(v), adj.row(k)) - p as u64;
                    acc += q.powi(tp as i32);
                }
                acc
            }
            _ => S::zero(),
        }
    }

    fn change_a<S: Scalar>(&self, desc: &StatDescriptor<S>, codes: Option<&[u32]>) -> S {
        use StatId::*;
        let net = self.net;
        let (i, j) = (self.dyad.first(), self.dyad.second());
        let p = self.present;
        let id = desc.id;
        let lambda = desc.lambda;
        let mode = id.attribute_mode();
        let so = || net.shared_objects(i, j) as u64;
        match id {
            Edge(Side::A) | Star(Side::A, _) | Triangle(Side::A) | Cycle4(Side::A)
            | Isolates(Side::A) | IsolateEdges(Side::A) | AltStar(Side::A)
            | AltTriangle(Side::A) | AltTwoPath(Side::A) => {
                self.one_mode_change(Side::A, id, lambda)
            }
            MatchA | MismatchA => S::from_count(agrees(mode, codes, i, j) as u64),
            Star2AX => S::from_count(net.degree_x_actor(i) as u64 + net.degree_x_actor(j) as u64),
            StarAXAA => S::from_count(
                net.degree_x_actor(i) as u64 * (net.degree_a(i) - p) as u64
                    + net.degree_x_actor(j) as u64 * (net.degree_a(j) - p) as u64,
            ),
            TriangleXAX => S::from_count(so()),
            TXAXMatch | TXAXMismatch => {
                if agrees(mode, codes, i, j) {
                    S::from_count(so())
                } else {
                    S::zero()
                }
            }
            AltTriangleXAX => alt_term(so(), lambda),
            L3XAX => S::from_count(
                net.degree_x_actor(i) as u64 * net.degree_x_actor(j) as u64 - so(),
            ),
            L3AXB => {
                let s: u64 = net
                    .objects_of(i)
                    .chain(net.objects_of(j))
                    .map(|o| net.degree_b(o) as u64)
                    .sum();
                S::from_count(s)
            }
            C4AXB => {
                let mut c = 0u64;
                for o in net.objects_of(i) {
                    for q in net.neighbors_b(o) {
                        c += net.tie_x(j, q) as u64;
                    }
                }
                S::from_count(c)
            }
            _ => S::zero(),
        }
    }

    fn change_b<S: Scalar>(&self, desc: &StatDescriptor<S>) -> S {
        use StatId::*;
        let net = self.net;
        let (o, q) = (self.dyad.first(), self.dyad.second());
        let id = desc.id;
        let lambda = desc.lambda;
        let sa = || net.shared_users(o, q) as u64;
        match id {
            Edge(Side::B) | Star(Side::B, _) | Triangle(Side::B) | Cycle4(Side::B)
            | Isolates(Side::B) | IsolateEdges(Side::B) | AltStar(Side::B)
            | AltTriangle(Side::B) | AltTwoPath(Side::B) => {
                self.one_mode_change(Side::B, id, lambda)
            }
            Star2BX => S::from_count(
                net.degree_x_object(o) as u64 + net.degree_x_object(q) as u64,
            ),
            TriangleXBX => S::from_count(sa()),
            AltTriangleXBX => alt_term(sa(), lambda),
            L3XBX => S::from_count(
                net.degree_x_object(o) as u64 * net.degree_x_object(q) as u64 - sa(),
            ),
            L3AXB => {
                let s: u64 = net
                    .users_of(o)
                    .chain(net.users_of(q))
                    .map(|i| net.degree_a(i) as u64)
                    .sum();
                S::from_count(s)
            }
            C4AXB => {
                let mut c = 0u64;
                for i in net.users_of(o) {
                    for j in net.neighbors_a(i) {
                        c += net.tie_x(j, q) as u64;
                    }
                }
                S::from_count(c)
            }
            _ => S::zero(),
        }
    }

    fn change_x<S: Scalar>(&self, desc: &StatDescriptor<S>, codes: Option<&[u32]>) -> S {
        use StatId::*;
        let net = self.net;
        let (i, o) = (self.dyad.first(), self.dyad.second());
        let p = self.present;
        let dxi = net.degree_x_actor(i) - p;
        let dxo = net.degree_x_object(o) - p;
        let lambda = desc.lambda;
        let q = S::one() - lambda.recip();
        let mode = desc.id.attribute_mode();
        // co-users of o other than i, with their shared-object count with i
        // (dyad absent)
        let co_users = || {
            net.users_of(o)
                .filter(move |&j| j != i)
                .map(move |j| (j, net.shared_objects(i, j) as u64 - p as u64))
        };
        match desc.id {
            XEdge => S::one(),
            XStar2A => S::from_count(dxi as u64),
            XStar3A => S::from_count(choose(dxi as u64, 2)),
            XStar2B => S::from_count(dxo as u64),
            XStar3B => S::from_count(choose(dxo as u64, 2)),
            X3Path => {
                let mut c = dxi as u64 * dxo as u64;
                for r in net.objects_of(i).filter(|&r| r != o) {
                    c += net.degree_x_object(r) as u64 - 1;
                }
                for j in net.users_of(o).filter(|&j| j != i) {
                    c += net.degree_x_actor(j) as u64 - 1;
                }
                S::from_count(c)
            }
            X4Cycle | X4CycleMatch | X4CycleMismatch => S::from_count(
                co_users()
                    .filter(|&(j, _)| agrees(mode, codes, i, j))
                    .map(|(_, s)| s)
                    .sum(),
            ),
            XAltStarA => lambda * (S::one() - q.powi(dxi as i32)),
            XAltStarB => lambda * (S::one() - q.powi(dxo as i32)),
            XAlt4CycleA => co_users()
                .filter(|&(_, s)| s >= 1)
                .map(|(_, s)| q.powi(s as i32 - 1))
                .sum(),
            IsolatesXA => -S::from_count((dxi == 0) as u64),
            IsolatesXB => -S::from_count((dxo == 0) as u64),
            XMatchB | XMismatchB => S::from_count(
                net.users_of(o)
                    .filter(|&j| j != i && agrees(mode, codes, i, j))
                    .count() as u64,
            ),
            Star2AX => S::from_count(net.degree_a(i) as u64),
            Star2BX => S::from_count(net.degree_b(o) as u64),
            StarAXAA => S::from_count(choose(net.degree_a(i) as u64, 2)),
            TriangleXAX | TXAXMatch | TXAXMismatch => S::from_count(
                net.neighbors_a(i)
                    .filter(|&j| net.tie_x(j, o) && agrees(mode, codes, i, j))
                    .count() as u64,
            ),
            AltTriangleXAX => net
                .neighbors_a(i)
                .filter(|&j| net.tie_x(j, o))
                .map(|j| q.powi((net.shared_objects(i, j) - p) as i32))
                .sum(),
            L3XAX => S::from_count(
                net.neighbors_a(i)
                    .map(|j| net.degree_x_actor(j) as u64 - net.tie_x(j, o) as u64)
                    .sum(),
            ),
            TriangleXBX => S::from_count(
                net.neighbors_b(o).filter(|&r| net.tie_x(i, r)).count() as u64,
            ),
            AltTriangleXBX => net
                .neighbors_b(o)
                .filter(|&r| net.tie_x(i, r))
                .map(|r| q.powi((net.shared_users(o, r) - p) as i32))
                .sum(),
            L3XBX => S::from_count(
                net.neighbors_b(o)
                    .map(|r| net.degree_x_object(r) as u64 - net.tie_x(i, r) as u64)
                    .sum(),
            ),
            L3AXB => S::from_count(net.degree_a(i) as u64 * net.degree_b(o) as u64),
            C4AXB => {
                let mut c = 0u64;
                for j in net.neighbors_a(i) {
                    for r in net.neighbors_b(o) {
                        c += net.tie_x(j, r) as u64;
                    }
                }
                S::from_count(c)
            }
            _ => S::zero(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn desc(id: StatId) -> StatDescriptor<f64> {
        StatDescriptor::new(id)
    }

    fn stat(net: &MultilevelNetwork, id: StatId) -> f64 {
        global_statistic(net, &desc(id)).unwrap()
    }

    fn with_ties(n: usize, m: usize, a: &[(usize, usize)], b: &[(usize, usize)], x: &[(usize, usize)]) -> MultilevelNetwork {
        let mut net = MultilevelNetwork::single_group(n, m);
        for &(i, j) in a {
            net.apply_toggle(DyadRef::actors(i, j).unwrap()).unwrap();
        }
        for &(o, p) in b {
            net.apply_toggle(DyadRef::objects(o, p).unwrap()).unwrap();
        }
        for &(i, o) in x {
            net.apply_toggle(DyadRef::usage(i, o)).unwrap();
        }
        net
    }

    #[test]
    fn names_round_trip_and_unique() {
        let all = StatId::all();
        let names: BTreeSet<String> = all.iter().map(|id| id.name()).collect();
        assert_eq!(names.len(), all.len());
        for id in all {
            assert_eq!(StatId::from_name(&id.name()), Some(id));
        }
        assert_eq!(StatId::from_name("X2StarMatch"), Some(StatId::XMatchB));
        assert_eq!(StatId::from_name("nope"), None);
    }

    #[test]
    fn empty_network_is_zero() {
        let net = MultilevelNetwork::single_group(4, 3);
        for id in StatId::all() {
            if id.attribute_mode().is_some() || matches!(id, StatId::Isolates(_) | StatId::IsolatesXA | StatId::IsolatesXB) {
                continue;
            }
            assert_eq!(stat(&net, id), 0.0, "{id}");
        }
        let none = MultilevelNetwork::default();
        for id in StatId::all().into_iter().filter(|id| id.attribute_mode().is_none()) {
            assert_eq!(stat(&none, id), 0.0, "{id}");
        }
    }

    #[test]
    fn triangle_values() {
        let net = with_ties(3, 0, &[(0, 1), (1, 2), (0, 2)], &[], &[]);
        assert_eq!(stat(&net, StatId::Star(Side::A, 2)), 3.0);
        assert_eq!(stat(&net, StatId::Triangle(Side::A)), 1.0);
        assert_abs_diff_eq!(stat(&net, StatId::AltTriangle(Side::A)), 3.0, epsilon = 1e-12);
        assert_eq!(stat(&net, StatId::Clustering(ClusterKind::A)), 1.0);
    }

    #[test]
    fn star_alternating_value() {
        let net = with_ties(4, 0, &[(0, 1), (0, 2), (0, 3)], &[], &[]);
        // 3 - 1/2 from the truncated alternating k-star sum
        assert_abs_diff_eq!(stat(&net, StatId::AltStar(Side::A)), 2.5, epsilon = 1e-12);
    }

    #[test]
    fn tied_actors_sharing_object() {
        let net = with_ties(2, 1, &[(0, 1)], &[], &[(0, 0), (1, 0)]);
        assert_eq!(stat(&net, StatId::TriangleXAX), 1.0);
        assert_eq!(stat(&net, StatId::C4AXB), 0.0);
    }

    #[test]
    fn change_on_empty_network() {
        let net = MultilevelNetwork::single_group(3, 1);
        let model = ModelSpec::new(
            vec![desc(StatId::Edge(Side::A)), desc(StatId::Star(Side::A, 2)), desc(StatId::TriangleXAX)],
            [TieLevel::A],
        )
        .unwrap();
        let dz = change_statistics(&net, DyadRef::actors(0, 1).unwrap(), &model).unwrap();
        assert_eq!(dz.0, vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn change_with_shared_object() {
        let net = with_ties(2, 1, &[], &[], &[(0, 0), (1, 0)]);
        let model = ModelSpec::new(vec![desc(StatId::TriangleXAX)], [TieLevel::A]).unwrap();
        let d = DyadRef::actors(0, 1).unwrap();
        assert_eq!(change_statistics(&net, d, &model).unwrap().0, vec![1.0]);
        // sign convention is independent of the current state
        let present = net.toggled(d).unwrap();
        assert_eq!(change_statistics(&present, d, &model).unwrap().0, vec![1.0]);
    }

    #[test]
    fn change_rejects_structural_zero() {
        let net = MultilevelNetwork::empty(&[0, 1], &[], &[], &[]);
        let model = ModelSpec::new(vec![desc(StatId::Edge(Side::A))], [TieLevel::A]).unwrap();
        let err = change_statistics(&net, DyadRef::actors(0, 1).unwrap(), &model).unwrap_err();
        assert!(matches!(err, StatError::Network(NetworkError::StructuralZero(_))));
    }

    #[test]
    fn model_validation() {
        let e = desc(StatId::Edge(Side::A));
        assert_eq!(
            ModelSpec::new(vec![e.clone(), e.clone()], [TieLevel::A]).unwrap_err(),
            StatError::DuplicateDescriptor("EdgeA".into())
        );
        assert_eq!(ModelSpec::<f64>::new(vec![], []).unwrap_err(), StatError::EmptyModel);
        assert_eq!(
            ModelSpec::new(vec![e.clone()], [TieLevel::B]).unwrap_err(),
            StatError::UntouchedLevel(TieLevel::B)
        );
        assert!(matches!(
            ModelSpec::new(vec![desc(StatId::AltStar(Side::A)).with_lambda(1.0)], [TieLevel::A]),
            Err(StatError::InvalidLambda(_))
        ));
        assert!(matches!(
            ModelSpec::new(vec![desc(StatId::MatchA)], [TieLevel::A]),
            Err(StatError::MissingAttribute(_))
        ));
        assert!(matches!(
            ModelSpec::new(vec![e.clone().with_attribute("gender")], [TieLevel::A]),
            Err(StatError::UnexpectedAttribute(_))
        ));
        assert!(matches!(
            ModelSpec::new(vec![desc(StatId::Clustering(ClusterKind::A))], [TieLevel::A]),
            Err(StatError::SummaryInModel(_))
        ));
        // same id, different lambda: distinct terms
        let ok = ModelSpec::new(
            vec![desc(StatId::AltStar(Side::A)), desc(StatId::AltStar(Side::A)).with_lambda(3.0)],
            [TieLevel::A],
        );
        assert!(ok.is_ok());
    }

    #[test]
    fn unknown_attribute() {
        let net = MultilevelNetwork::single_group(2, 0);
        let d = desc(StatId::MatchA).with_attribute("gender");
        assert_eq!(
            global_statistic(&net, &d).unwrap_err(),
            StatError::UnknownAttribute("gender".into())
        );
    }

    #[test]
    fn labels_resolve() {
        assert_eq!(resolve_label("Triadic closure", Some(TieLevel::B)), Some(StatId::AltTriangle(Side::B)));
        assert_eq!(
            resolve_label("Influence of dyadic social ties on object sharing", None),
            Some(StatId::TriangleXAX)
        );
        assert_eq!(resolve_label("Engagement with same materiality", None), Some(StatId::L3XBX));
        assert_eq!(resolve_label("nonsense", None), None);
    }

    #[test]
    fn skewness_and_stddev() {
        assert_eq!(degree_stddev(&[2, 2, 2]), 0.0);
        assert_eq!(degree_skewness(&[2, 2, 2]), 0.0);
        assert_abs_diff_eq!(degree_stddev(&[1, 2, 3]), 1.0, epsilon = 1e-12);
        // scipy.stats.skew([0, 0, 0, 3], bias=False) = 2.0
        assert_abs_diff_eq!(degree_skewness(&[0, 0, 0, 3]), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn clustering_x_ratio() {
        // two actors sharing two objects: one 4-cycle, X3Path = 4
        let net = with_ties(2, 2, &[], &[], &[(0, 0), (0, 1), (1, 0), (1, 1)]);
        assert_eq!(stat(&net, StatId::X4Cycle), 1.0);
        assert_eq!(stat(&net, StatId::X3Path), 4.0);
        assert_eq!(stat(&net, StatId::Clustering(ClusterKind::X)), 1.0);
    }
}
