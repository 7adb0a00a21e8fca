//! Graphs of groups as input, and the Kato graphs realized from them by
//! gluing elementary trees along edge-group trees.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::catalog::{AttachmentTrace, Catalog, CatalogError, ElementaryTree, Location, TraceKind};
use crate::group::{
    derive_edge_group, is_subgroup, validate_in_context, FieldContext, GroupError, GroupSymbol,
    Violation,
};

#[derive(Clone, Debug)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    pub(crate) fn push(&mut self) -> usize {
        let i = self.parent.len();
        self.parent.push(i);
        i
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false when `a` and `b` were already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        // keep the smaller index as root so results do not depend on call order
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputVertex {
    pub id: String,
    pub group: GroupSymbol,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SiteHints {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub from: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub to: Option<String>,
}

impl SiteHints {
    fn is_empty(&self) -> bool {
        self.from.is_none() && self.to.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EdgeGroupSpec {
    Given(GroupSymbol),
    Derive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawInputEdge", into = "RawInputEdge")]
pub struct InputEdge {
    pub id: String,
    pub from: String,
    pub to: String,
    pub group: EdgeGroupSpec,
    pub site_hints: SiteHints,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInputEdge {
    id: String,
    from: String,
    to: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    group: Option<GroupSymbol>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    derive: bool,
    #[serde(default, skip_serializing_if = "SiteHints::is_empty")]
    site_hints: SiteHints,
}

impl TryFrom<RawInputEdge> for InputEdge {
    type Error = String;

    fn try_from(raw: RawInputEdge) -> Result<Self, Self::Error> {
        let group = match (raw.group, raw.derive) {
            (Some(g), false) => EdgeGroupSpec::Given(g),
            (None, true) => EdgeGroupSpec::Derive,
            (Some(_), true) => {
                return Err(format!(
                    "edge {}: give either \"group\" or \"derive\": true, not both",
                    raw.id
                ))
            }
            (None, false) => {
                return Err(format!(
                    "edge {}: missing \"group\" (or \"derive\": true)",
                    raw.id
                ))
            }
        };
        Ok(InputEdge {
            id: raw.id,
            from: raw.from,
            to: raw.to,
            group,
            site_hints: raw.site_hints,
        })
    }
}

impl From<InputEdge> for RawInputEdge {
    fn from(e: InputEdge) -> Self {
        let (group, derive) = match e.group {
            EdgeGroupSpec::Given(g) => (Some(g), false),
            EdgeGroupSpec::Derive => (None, true),
        };
        RawInputEdge {
            id: e.id,
            from: e.from,
            to: e.to,
            group,
            derive,
            site_hints: e.site_hints,
        }
    }
}

/// An edge with trivial stabilizer closing a cycle of the graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GenusEdge {
    pub id: String,
    pub from: String,
    pub to: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupSymbol>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputGraphOfGroups {
    #[serde(rename = "field")]
    pub ctx: FieldContext,
    pub vertices: Vec<InputVertex>,
    #[serde(default)]
    pub edges: Vec<InputEdge>,
    #[serde(default)]
    pub genus_edges: Vec<GenusEdge>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InputViolation {
    DuplicateId(String),
    UnknownVertex {
        element: String,
        vertex: String,
    },
    Inadmissible {
        element: String,
        group: GroupSymbol,
        violations: Vec<Violation>,
    },
    Catalog {
        element: String,
        error: CatalogError,
    },
    Derive {
        edge: String,
        error: GroupError,
    },
    NotEdgeCapable {
        edge: String,
        group: GroupSymbol,
    },
    NotContained {
        edge: String,
        group: GroupSymbol,
        vertex: String,
    },
    NoTrace {
        edge: String,
        vertex: String,
    },
    AmbiguousTrace {
        edge: String,
        vertex: String,
        sites: Vec<String>,
    },
    BadSiteHint {
        edge: String,
        vertex: String,
        site: String,
    },
    SharedSite {
        vertex: String,
        site: String,
        edges: Vec<String>,
    },
    Cycle {
        edge: String,
    },
    EndpointsIdentified {
        edge: String,
    },
    GenusEdgeNonTrivial {
        edge: String,
        group: GroupSymbol,
    },
}

impl fmt::Display for InputViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use InputViolation::*;
        match self {
            DuplicateId(id) => write!(f, "duplicate id {id}"),
            UnknownVertex { element, vertex } => write!(f, "{element}: unknown vertex {vertex}"),
            Inadmissible { element, group, violations } => write!(
                f,
                "{element}: group {group} not admissible: {}",
                violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; ")
            ),
            Catalog { element, error } => write!(f, "{element}: {error}"),
            Derive { edge, error } => write!(f, "edge {edge}: {error}"),
            NotEdgeCapable { edge, group } => {
                write!(f, "edge {edge}: edge group {group} not Borel/cyclic/printed")
            }
            NotContained { edge, group, vertex } => {
                write!(f, "edge {edge}: edge group {group} is not contained in the group of {vertex}")
            }
            NoTrace { edge, vertex } => write!(f, "edge {edge}: no attachment site on the tree of {vertex}"),
            AmbiguousTrace { edge, vertex, sites } => write!(
                f,
                "edge {edge}: ambiguous attachment on the tree of {vertex} (sites {}); add a site hint",
                sites.join(", ")
            ),
            BadSiteHint { edge, vertex, site } => {
                write!(f, "edge {edge}: site hint {site} does not match any attachment on {vertex}")
            }
            SharedSite { vertex, site, edges } => {
                write!(f, "vertex {vertex}: site {site} used by several edges ({})", edges.join(", "))
            }
            Cycle { edge } => write!(f, "edge {edge} closes a cycle; declare it as a genus edge"),
            EndpointsIdentified { edge } => {
                write!(f, "edge {edge}: the catalog traces identify its two endpoint vertices")
            }
            GenusEdgeNonTrivial { edge, group } => {
                write!(f, "genus edge {edge} must have trivial stabilizer, got {group}")
            }
        }
    }
}

/// Resolved data for one input edge.
#[derive(Clone, Debug)]
pub struct CheckedEdge {
    pub group: GroupSymbol,
    pub boundary_count: usize,
    /// Traces on the `from` and `to` trees; `None` for trivial connectors.
    pub traces: Option<(AttachmentTrace, AttachmentTrace)>,
    pub tree: Option<ElementaryTree>,
}

/// An input that passed validation, carrying everything `realize` needs.
#[derive(Clone, Debug)]
pub struct CheckedInput {
    pub input: InputGraphOfGroups,
    pub vertex_trees: Vec<ElementaryTree>,
    pub edges: Vec<CheckedEdge>,
}

fn pick_trace(
    traces: Vec<AttachmentTrace>,
    hint: Option<&String>,
    edge: &str,
    vertex: &str,
) -> Result<AttachmentTrace, InputViolation> {
    if traces.is_empty() {
        return Err(InputViolation::NoTrace {
            edge: edge.into(),
            vertex: vertex.into(),
        });
    }
    if let Some(h) = hint {
        return traces
            .into_iter()
            .find(|t| t.site.as_ref() == Some(h))
            .ok_or_else(|| InputViolation::BadSiteHint {
                edge: edge.into(),
                vertex: vertex.into(),
                site: h.clone(),
            });
    }
    if traces.len() > 1 {
        return Err(InputViolation::AmbiguousTrace {
            edge: edge.into(),
            vertex: vertex.into(),
            sites: traces
                .iter()
                .map(|t| t.site.clone().unwrap_or_else(|| "-".into()))
                .collect(),
        });
    }
    Ok(traces.into_iter().next().expect("one trace"))
}

/// Check an input graph of groups against the catalog and resolve its edges.
pub fn validate_input(
    input: &InputGraphOfGroups,
    catalog: &Catalog,
) -> Result<CheckedInput, Vec<InputViolation>> {
    let ctx = input.ctx;
    let mut errs = Vec::new();
    let mut seen = BTreeSet::new();
    let all_ids = input
        .vertices
        .iter()
        .map(|v| &v.id)
        .chain(input.edges.iter().map(|e| &e.id))
        .chain(input.genus_edges.iter().map(|e| &e.id));
    for id in all_ids {
        if !seen.insert(id.clone()) {
            errs.push(InputViolation::DuplicateId(id.clone()));
        }
    }
    let index: BTreeMap<&str, usize> = input
        .vertices
        .iter()
        .enumerate()
        .map(|(i, v)| (v.id.as_str(), i))
        .collect();

    let mut trees = Vec::with_capacity(input.vertices.len());
    for v in &input.vertices {
        if let Err(violations) = validate_in_context(&v.group, &ctx) {
            errs.push(InputViolation::Inadmissible {
                element: format!("vertex {}", v.id),
                group: v.group,
                violations,
            });
            trees.push(None);
            continue;
        }
        match catalog.elementary_tree(&v.group, &ctx) {
            Ok(t) => trees.push(Some(t)),
            Err(error) => {
                errs.push(InputViolation::Catalog {
                    element: format!("vertex {}", v.id),
                    error,
                });
                trees.push(None);
            }
        }
    }

    let mut forest = UnionFind::new(input.vertices.len());
    let mut used_sites: BTreeMap<(usize, String), Vec<String>> = BTreeMap::new();
    let mut edges = Vec::new();
    for e in &input.edges {
        let (Some(&iu), Some(&iv)) = (index.get(e.from.as_str()), index.get(e.to.as_str())) else {
            for end in [&e.from, &e.to] {
                if !index.contains_key(end.as_str()) {
                    errs.push(InputViolation::UnknownVertex {
                        element: format!("edge {}", e.id),
                        vertex: end.clone(),
                    });
                }
            }
            continue;
        };
        if !forest.union(iu, iv) {
            errs.push(InputViolation::Cycle { edge: e.id.clone() });
        }
        let (gu, gv) = (input.vertices[iu].group, input.vertices[iv].group);
        let group = match &e.group {
            EdgeGroupSpec::Given(g) => *g,
            EdgeGroupSpec::Derive => match derive_edge_group(&gu, &gv, &ctx) {
                Ok(g) => g,
                Err(error) => {
                    errs.push(InputViolation::Derive {
                        edge: e.id.clone(),
                        error,
                    });
                    continue;
                }
            },
        };
        if group.is_trivial() {
            edges.push(CheckedEdge {
                group,
                boundary_count: 0,
                traces: None,
                tree: None,
            });
            continue;
        }
        if let Err(violations) = validate_in_context(&group, &ctx) {
            errs.push(InputViolation::Inadmissible {
                element: format!("edge {}", e.id),
                group,
                violations,
            });
            continue;
        }
        if !catalog.is_edge_capable(&group, &ctx) {
            errs.push(InputViolation::NotEdgeCapable {
                edge: e.id.clone(),
                group,
            });
            continue;
        }
        let mut bad = false;
        for (vid, vg) in [(&e.from, gu), (&e.to, gv)] {
            if !is_subgroup(&group, &vg, &ctx) {
                errs.push(InputViolation::NotContained {
                    edge: e.id.clone(),
                    group,
                    vertex: vid.clone(),
                });
                bad = true;
            }
        }
        if bad || trees[iu].is_none() || trees[iv].is_none() {
            continue;
        }
        let tree = match catalog.elementary_tree(&group, &ctx) {
            Ok(t) => t,
            Err(error) => {
                errs.push(InputViolation::Catalog {
                    element: format!("edge {}", e.id),
                    error,
                });
                continue;
            }
        };
        let mut sides = Vec::new();
        for (vid, vi, vg, hint) in [
            (&e.from, iu, gu, e.site_hints.from.as_ref()),
            (&e.to, iv, gv, e.site_hints.to.as_ref()),
        ] {
            let traces = match catalog.attachment_traces(&group, &vg, &ctx) {
                Ok(ts) => ts,
                Err(error) => {
                    errs.push(InputViolation::Catalog {
                        element: format!("edge {}", e.id),
                        error,
                    });
                    continue;
                }
            };
            match pick_trace(traces, hint, &e.id, vid) {
                Ok(t) => {
                    for s in t.occupied_sites() {
                        used_sites.entry((vi, s)).or_default().push(e.id.clone());
                    }
                    sides.push(t);
                }
                Err(v) => errs.push(v),
            }
        }
        if sides.len() == 2 {
            let tv = sides.pop().expect("two sides");
            let tu = sides.pop().expect("two sides");
            let (Some(tree_u), Some(tree_v)) = (&trees[iu], &trees[iv]) else {
                continue;
            };
            if is_explicit(&tree) && explicit_identifies_ends(&tree, (tree_u, &tu), (tree_v, &tv)) {
                errs.push(InputViolation::EndpointsIdentified { edge: e.id.clone() });
                continue;
            }
            edges.push(CheckedEdge {
                group,
                boundary_count: tree.boundary_count(),
                traces: Some((tu, tv)),
                tree: Some(tree),
            });
        }
    }
    for ((vi, site), users) in &used_sites {
        if users.len() > 1 {
            errs.push(InputViolation::SharedSite {
                vertex: input.vertices[*vi].id.clone(),
                site: site.clone(),
                edges: users.clone(),
            });
        }
    }
    for g in &input.genus_edges {
        for end in [&g.from, &g.to] {
            if !index.contains_key(end.as_str()) {
                errs.push(InputViolation::UnknownVertex {
                    element: format!("genus edge {}", g.id),
                    vertex: end.clone(),
                });
            }
        }
        if let Some(group) = g.group {
            if !group.is_trivial() {
                errs.push(InputViolation::GenusEdgeNonTrivial {
                    edge: g.id.clone(),
                    group,
                });
            }
        }
    }
    if !errs.is_empty() {
        return Err(errs);
    }
    Ok(CheckedInput {
        input: input.clone(),
        vertex_trees: trees.into_iter().map(|t| t.expect("validated")).collect(),
        edges,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GraphVertex {
    pub id: String,
    pub stabilizer: GroupSymbol,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiniteEdge {
    pub id: String,
    pub from: String,
    pub to: String,
    pub stabilizer: GroupSymbol,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cusp {
    pub id: String,
    pub base: String,
    pub stabilizer: GroupSymbol,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GenusLoop {
    pub id: String,
    pub from: String,
    pub to: String,
}

/// A realized quotient skeleton with cusps: vertices, finite edges, cusps
/// and genus loops, each list sorted by id.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KatoGraph {
    pub ctx: FieldContext,
    pub vertices: Vec<GraphVertex>,
    pub finite_edges: Vec<FiniteEdge>,
    pub cusps: Vec<Cusp>,
    pub genus_loops: Vec<GenusLoop>,
    /// Choices made where the gluing rules leave relative position open.
    pub notes: Vec<String>,
}

impl KatoGraph {
    pub fn empty(ctx: FieldContext) -> Self {
        KatoGraph {
            ctx,
            vertices: Vec::new(),
            finite_edges: Vec::new(),
            cusps: Vec::new(),
            genus_loops: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn vertex(&self, id: &str) -> Option<&GraphVertex> {
        self.vertices.iter().find(|v| v.id == id)
    }

    pub fn sort(&mut self) {
        self.vertices.sort_by(|a, b| a.id.cmp(&b.id));
        self.finite_edges.sort_by(|a, b| a.id.cmp(&b.id));
        self.cusps.sort_by(|a, b| a.id.cmp(&b.id));
        self.genus_loops.sort_by(|a, b| a.id.cmp(&b.id));
    }

    fn vertex_index(&self) -> BTreeMap<&str, usize> {
        self.vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.id.as_str(), i))
            .collect()
    }

    /// Whether the finite edges (genus loops excluded) form a forest.
    pub fn is_forest(&self) -> bool {
        let idx = self.vertex_index();
        let mut uf = UnionFind::new(self.vertices.len());
        self.finite_edges.iter().all(
            |e| match (idx.get(e.from.as_str()), idx.get(e.to.as_str())) {
                (Some(&a), Some(&b)) => uf.union(a, b),
                _ => false,
            },
        )
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RealizeError {
    #[error("edge {edge}: trace locations do not correspond ({detail})")]
    TraceMismatch { edge: String, detail: String },
    #[error("cannot merge stabilizers {groups}: no containment")]
    MergeWithoutContainment { groups: String },
    #[error("gluing identifies the vertices {a} and {b}")]
    VerticesIdentified { a: String, b: String },
    #[error("edge {edge}: gluing collapsed the edge onto a single vertex")]
    DegenerateEdge { edge: String },
    #[error("realized graph is not a forest after removing genus loops")]
    NotForest,
    #[error("cusp count {direct} differs from the vertex/edge boundary sum {expected}")]
    Conservation { direct: usize, expected: i64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum NodeKind {
    Vertex,
    Cusp,
    Point,
}

#[derive(Clone, Debug)]
struct Node {
    kind: NodeKind,
    id: String,
    stab: GroupSymbol,
    /// Base vertex node of a cusp.
    base: Option<usize>,
}

struct TreeInstance {
    vertices: BTreeMap<String, usize>,
    cusps: BTreeMap<String, usize>,
    marked: BTreeMap<String, usize>,
    main: usize,
}

struct Builder {
    ctx: FieldContext,
    nodes: Vec<Node>,
    uf: UnionFind,
    consumed: BTreeSet<usize>,
    edges: Vec<(String, usize, usize, GroupSymbol, bool)>,
    notes: Vec<String>,
    genus: Vec<(String, usize, usize)>,
    mains: BTreeSet<usize>,
}

impl Builder {
    fn new(ctx: FieldContext) -> Self {
        Builder {
            ctx,
            nodes: Vec::new(),
            uf: UnionFind::new(0),
            consumed: BTreeSet::new(),
            edges: Vec::new(),
            notes: Vec::new(),
            genus: Vec::new(),
            mains: BTreeSet::new(),
        }
    }

    fn add(&mut self, kind: NodeKind, id: String, stab: GroupSymbol, base: Option<usize>) -> usize {
        self.nodes.push(Node {
            kind,
            id,
            stab,
            base,
        });
        self.uf.push()
    }

    fn instantiate(&mut self, vid: &str, tree: &ElementaryTree) -> TreeInstance {
        let main_local = tree.main_vertex().id.clone();
        let mut vertices = BTreeMap::new();
        for tv in &tree.vertices {
            let id = if tv.id == main_local {
                vid.to_owned()
            } else {
                format!("{vid}.{}", tv.id)
            };
            let n = self.add(NodeKind::Vertex, id, tv.stabilizer, None);
            vertices.insert(tv.id.clone(), n);
        }
        let mut cusps = BTreeMap::new();
        let mut marked = BTreeMap::new();
        for c in &tree.cusps {
            let base = vertices[&c.base_vertex];
            let n = self.add(
                NodeKind::Cusp,
                format!("{vid}.{}", c.id),
                c.stabilizer,
                Some(base),
            );
            cusps.insert(c.id.clone(), n);
            if let Some(mp) = &c.marked_point {
                let m = self.add(
                    NodeKind::Point,
                    format!("{vid}.{}.m", c.id),
                    mp.stabilizer,
                    Some(base),
                );
                marked.insert(c.id.clone(), m);
            }
        }
        for e in &tree.internal_edges {
            self.edges.push((
                format!("{vid}.{}", e.id),
                vertices[&e.from],
                vertices[&e.to],
                e.stabilizer,
                true,
            ));
        }
        self.mains.insert(vertices[&main_local]);
        TreeInstance {
            main: vertices[&main_local],
            vertices,
            cusps,
            marked,
        }
    }

    fn resolve(
        &mut self,
        inst: &TreeInstance,
        loc: &Location,
        edge: &str,
    ) -> Result<usize, RealizeError> {
        let missing = || RealizeError::TraceMismatch {
            edge: edge.into(),
            detail: format!("{loc:?} not on the vertex tree"),
        };
        match loc {
            Location::Vertex(v) => inst.vertices.get(v).copied().ok_or_else(missing),
            Location::Cusp(c) => inst.cusps.get(c).copied().ok_or_else(missing),
            Location::MarkedPoint(c) => inst.marked.get(c).copied().ok_or_else(missing),
            Location::CuspInterior(c) => {
                let cusp = *inst.cusps.get(c).ok_or_else(missing)?;
                let (stab, base) = (self.nodes[cusp].stab, self.nodes[cusp].base);
                let id = format!("{}.{edge}", self.nodes[cusp].id);
                Ok(self.add(NodeKind::Point, id, stab, base))
            }
        }
    }

    fn site(
        &self,
        inst: &TreeInstance,
        trace: &AttachmentTrace,
        edge: &str,
    ) -> Result<usize, RealizeError> {
        trace
            .site
            .as_ref()
            .and_then(|s| inst.cusps.get(s).copied())
            .ok_or_else(|| RealizeError::TraceMismatch {
                edge: edge.into(),
                detail: "trace has no cusp site".into(),
            })
    }

    fn base(&self, cusp: usize) -> usize {
        self.nodes[cusp].base.expect("cusps have a base vertex")
    }

    fn glue_line(
        &mut self,
        eid: &str,
        group: GroupSymbol,
        (iu, tu): (&TreeInstance, &AttachmentTrace),
        (iv, tv): (&TreeInstance, &AttachmentTrace),
    ) -> Result<(), RealizeError> {
        let su = self.site(iu, tu, eid)?;
        let sv = self.site(iv, tv, eid)?;
        let (bu, bv) = (self.base(su), self.base(sv));
        match (tu.kind, tv.kind) {
            (TraceKind::Injective, TraceKind::Injective) => {
                self.consumed.insert(su);
                self.consumed.insert(sv);
                let j = self.add(NodeKind::Vertex, format!("{eid}.j"), group, None);
                self.add(NodeKind::Cusp, format!("{eid}.c"), group, Some(j));
                self.edges.push((format!("{eid}.a"), bu, j, group, false));
                self.edges.push((format!("{eid}.b"), j, bv, group, false));
                self.notes.push(format!(
                    "edge {eid}: one-cusped edge group {group} realized as a tripod at junction {eid}.j (relative position not determined by the gluing rules)"
                ));
            }
            (TraceKind::Fold, TraceKind::Fold) | (TraceKind::Iso, TraceKind::Iso) => {
                self.consumed.insert(su);
                self.consumed.insert(sv);
                self.edges.push((eid.to_owned(), bu, bv, group, false));
            }
            (TraceKind::Fold, TraceKind::Iso) | (TraceKind::Iso, TraceKind::Fold) => {
                let (fold_inst, fold_trace, fold_site, iso_site) = if tu.kind == TraceKind::Fold {
                    (iu, tu, su, sv)
                } else {
                    (iv, tv, sv, su)
                };
                self.consumed.insert(fold_site);
                self.consumed.insert(iso_site);
                if let Some(Location::MarkedPoint(c)) = &fold_trace.fold_at {
                    let marked = fold_inst.marked.get(c).copied().ok_or_else(|| {
                        RealizeError::TraceMismatch {
                            edge: eid.into(),
                            detail: format!("no marked point on {c}"),
                        }
                    })?;
                    let iso_base = self.base(iso_site);
                    self.uf.union(marked, iso_base);
                }
                self.edges.push((eid.to_owned(), bu, bv, group, false));
            }
            (a, b) => {
                return Err(RealizeError::TraceMismatch {
                    edge: eid.into(),
                    detail: format!("incompatible trace kinds {a:?} and {b:?}"),
                })
            }
        }
        Ok(())
    }

    fn glue_explicit(
        &mut self,
        eid: &str,
        edge_tree: &ElementaryTree,
        (iu, tu): (&TreeInstance, &AttachmentTrace),
        (iv, tv): (&TreeInstance, &AttachmentTrace),
    ) -> Result<(), RealizeError> {
        let mut sources: Vec<Location> = edge_tree
            .vertices
            .iter()
            .map(|v| Location::Vertex(v.id.clone()))
            .chain(edge_tree.cusps.iter().map(|c| Location::Cusp(c.id.clone())))
            .chain(
                edge_tree
                    .cusps
                    .iter()
                    .filter(|c| c.marked_point.is_some())
                    .map(|c| Location::MarkedPoint(c.id.clone())),
            )
            .collect();
        sources.sort();
        for src in &sources {
            match (tu.target_of(src), tv.target_of(src)) {
                (Some(a), Some(b)) => {
                    let na = self.resolve(iu, a, eid)?;
                    let nb = self.resolve(iv, b, eid)?;
                    self.uf.union(na, nb);
                }
                (None, None) => {}
                _ => {
                    return Err(RealizeError::TraceMismatch {
                        edge: eid.into(),
                        detail: format!("{src:?} is mapped on one side only"),
                    })
                }
            }
        }
        Ok(())
    }

    fn merged_stabilizer(&self, members: &[usize]) -> Result<usize, RealizeError> {
        let order = |i: usize| self.nodes[i].stab.raw_order(&self.ctx).unwrap_or(u64::MAX);
        let best = *members
            .iter()
            .max_by(|&&a, &&b| {
                order(a)
                    .cmp(&order(b))
                    .then(
                        (self.nodes[a].kind == NodeKind::Vertex)
                            .cmp(&(self.nodes[b].kind == NodeKind::Vertex)),
                    )
                    .then(b.cmp(&a))
            })
            .expect("non-empty class");
        let top = self.nodes[best].stab;
        if members
            .iter()
            .any(|&m| !is_subgroup(&self.nodes[m].stab, &top, &self.ctx))
        {
            let mut groups: Vec<String> = members
                .iter()
                .map(|&m| self.nodes[m].stab.label(&self.ctx))
                .collect();
            groups.sort();
            groups.dedup();
            return Err(RealizeError::MergeWithoutContainment {
                groups: groups.join(", "),
            });
        }
        Ok(best)
    }

    fn finish(mut self) -> Result<KatoGraph, RealizeError> {
        let mut classes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..self.nodes.len() {
            let r = self.uf.find(i);
            classes.entry(r).or_default().push(i);
        }
        let mut graph = KatoGraph::empty(self.ctx);
        let mut vertex_of_class: BTreeMap<usize, String> = BTreeMap::new();
        let mut cusp_classes = Vec::new();
        for members in classes.values() {
            let mains: Vec<usize> = members
                .iter()
                .copied()
                .filter(|m| self.mains.contains(m))
                .collect();
            if mains.len() > 1 {
                return Err(RealizeError::VerticesIdentified {
                    a: self.nodes[mains[0]].id.clone(),
                    b: self.nodes[mains[1]].id.clone(),
                });
            }
        }
        for (root, members) in &classes {
            let has_vertex = members
                .iter()
                .any(|&m| self.nodes[m].kind == NodeKind::Vertex);
            let has_point = members
                .iter()
                .any(|&m| self.nodes[m].kind == NodeKind::Point);
            if has_vertex || (has_point && members.len() > 1) {
                let point_members: Vec<usize> = members
                    .iter()
                    .copied()
                    .filter(|&m| self.nodes[m].kind != NodeKind::Cusp)
                    .collect();
                let best = self.merged_stabilizer(members)?;
                let rep = if self.nodes[best].kind == NodeKind::Cusp {
                    point_members[0]
                } else {
                    best
                };
                let id = self.nodes[rep].id.clone();
                vertex_of_class.insert(*root, id.clone());
                graph.vertices.push(GraphVertex {
                    id,
                    stabilizer: self.nodes[best].stab,
                });
            } else if !has_point {
                cusp_classes.push(*root);
            }
        }
        for root in cusp_classes {
            let members = &classes[&root];
            if members.iter().any(|m| self.consumed.contains(m)) {
                continue;
            }
            let best = self.merged_stabilizer(members)?;
            let base = self.nodes[best].base.expect("cusp base");
            let base_root = self.uf.find(base);
            graph.cusps.push(Cusp {
                id: self.nodes[best].id.clone(),
                base: vertex_of_class[&base_root].clone(),
                stabilizer: self.nodes[best].stab,
            });
        }
        let mut seen_pairs = BTreeSet::new();
        let edges = std::mem::take(&mut self.edges);
        for (id, a, b, stab, internal) in edges {
            let (ra, rb) = (self.uf.find(a), self.uf.find(b));
            if ra == rb {
                if internal {
                    continue;
                }
                return Err(RealizeError::DegenerateEdge { edge: id });
            }
            let key = (ra.min(rb), ra.max(rb));
            if internal && seen_pairs.contains(&key) {
                continue;
            }
            seen_pairs.insert(key);
            graph.finite_edges.push(FiniteEdge {
                id,
                from: vertex_of_class[&ra].clone(),
                to: vertex_of_class[&rb].clone(),
                stabilizer: stab,
            });
        }
        for (id, a, b) in std::mem::take(&mut self.genus) {
            let (ra, rb) = (self.uf.find(a), self.uf.find(b));
            graph.genus_loops.push(GenusLoop {
                id,
                from: vertex_of_class[&ra].clone(),
                to: vertex_of_class[&rb].clone(),
            });
        }
        graph.notes = self.notes;
        Ok(graph)
    }
}

/// Edge trees with more than a line's worth of boundary glue by following
/// the trace correspondences point by point.
fn is_explicit(tree: &ElementaryTree) -> bool {
    tree.vertices.len() > 1 || tree.boundary_count() > 2
}

fn explicit_identifies_ends(
    edge_tree: &ElementaryTree,
    (tree_u, tu): (&ElementaryTree, &AttachmentTrace),
    (tree_v, tv): (&ElementaryTree, &AttachmentTrace),
) -> bool {
    let mut b = Builder::new(tree_u.ctx);
    let iu = b.instantiate("u", tree_u);
    let iv = b.instantiate("v", tree_v);
    if b.glue_explicit("e", edge_tree, (&iu, tu), (&iv, tv))
        .is_err()
    {
        return false;
    }
    b.uf.find(iu.main) == b.uf.find(iv.main)
}

/// Glue the elementary trees of all vertex groups along the trees of the
/// edge groups, without checking the cusp-count postcondition.
pub fn realize_unchecked(checked: &CheckedInput) -> Result<KatoGraph, RealizeError> {
    let input = &checked.input;
    let mut b = Builder::new(input.ctx);
    let mut instances = BTreeMap::new();
    for (v, tree) in input.vertices.iter().zip(&checked.vertex_trees) {
        let inst = b.instantiate(&v.id, tree);
        instances.insert(v.id.clone(), inst);
    }
    for (e, ce) in input.edges.iter().zip(&checked.edges) {
        let (iu, iv) = (&instances[&e.from], &instances[&e.to]);
        match (&ce.traces, &ce.tree) {
            (Some((tu, tv)), Some(tree)) => {
                if !is_explicit(tree) {
                    b.glue_line(&e.id, ce.group, (iu, tu), (iv, tv))?;
                } else {
                    b.glue_explicit(&e.id, tree, (iu, tu), (iv, tv))?;
                }
            }
            _ => b
                .edges
                .push((e.id.clone(), iu.main, iv.main, ce.group, false)),
        }
    }
    b.genus = input
        .genus_edges
        .iter()
        .map(|g| (g.id.clone(), instances[&g.from].main, instances[&g.to].main))
        .collect();
    let mut graph = b.finish()?;
    graph.sort();
    if !graph.is_forest() {
        return Err(RealizeError::NotForest);
    }
    Ok(graph)
}

/// Σ over vertices of boundary counts minus Σ over non-trivial edges.
pub fn boundary_sum(checked: &CheckedInput) -> i64 {
    let v: usize = checked
        .vertex_trees
        .iter()
        .map(|t| t.boundary_count())
        .sum();
    let e: usize = checked.edges.iter().map(|e| e.boundary_count).sum();
    v as i64 - e as i64
}

/// Realize the Kato graph of a validated input and check that its cusp
/// count equals the vertex/edge boundary sum.
pub fn realize(checked: &CheckedInput) -> Result<KatoGraph, RealizeError> {
    let graph = realize_unchecked(checked)?;
    let expected = boundary_sum(checked);
    if graph.cusps.len() as i64 != expected {
        return Err(RealizeError::Conservation {
            direct: graph.cusps.len(),
            expected,
        });
    }
    Ok(graph)
}

/// A maximal subtree whose edges all have non-trivial stabilizer.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IrreducibleComponent {
    pub vertices: Vec<String>,
    pub edges: Vec<String>,
}

pub fn irreducible_components(g: &KatoGraph) -> Vec<IrreducibleComponent> {
    let idx = g.vertex_index();
    let mut uf = UnionFind::new(g.vertices.len());
    for e in g.finite_edges.iter().filter(|e| !e.stabilizer.is_trivial()) {
        if let (Some(&a), Some(&b)) = (idx.get(e.from.as_str()), idx.get(e.to.as_str())) {
            uf.union(a, b);
        }
    }
    let mut comps: BTreeMap<usize, IrreducibleComponent> = BTreeMap::new();
    for (i, v) in g.vertices.iter().enumerate() {
        let r = uf.find(i);
        comps
            .entry(r)
            .or_insert_with(|| IrreducibleComponent {
                vertices: Vec::new(),
                edges: Vec::new(),
            })
            .vertices
            .push(v.id.clone());
    }
    for e in g.finite_edges.iter().filter(|e| !e.stabilizer.is_trivial()) {
        if let Some(&a) = idx.get(e.from.as_str()) {
            let r = uf.find(a);
            if let Some(c) = comps.get_mut(&r) {
                c.edges.push(e.id.clone());
            }
        }
    }
    comps.into_values().collect()
}

/// First Betti number of the underlying graph, finite edges and genus loops together.
pub fn genus(g: &KatoGraph) -> usize {
    let idx = g.vertex_index();
    let mut uf = UnionFind::new(g.vertices.len());
    let mut components = g.vertices.len();
    let mut edges = 0;
    let ends = g
        .finite_edges
        .iter()
        .map(|e| (&e.from, &e.to))
        .chain(g.genus_loops.iter().map(|l| (&l.from, &l.to)));
    for (a, b) in ends {
        edges += 1;
        if let (Some(&a), Some(&b)) = (idx.get(a.as_str()), idx.get(b.as_str())) {
            if uf.union(a, b) {
                components -= 1;
            }
        }
    }
    edges + components - g.vertices.len()
}
