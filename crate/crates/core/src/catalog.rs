//! Elementary Kato trees of finite subgroups of PGL2 and the traces along
//! which an edge group's tree attaches to a vertex group's tree.
//!
//! Characteristic p and characteristic zero with residue characteristic
//! above 5 are fully tabulated. In characteristic zero with residue
//! characteristic at most 5, groups of order divisible by p have
//! non-star trees; only the dihedral and icosahedral trees at p = 5 that
//! build the (2, 3, 10m) triangle group are built in, and further entries
//! come from an extension file.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::{
    borel_extends, is_subgroup, pl_invariants, validate_in_context, FieldContext, GroupError,
    GroupKind, GroupSymbol,
};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeVertex {
    pub id: String,
    #[serde(rename = "group")]
    pub stabilizer: GroupSymbol,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeEdge {
    pub id: String,
    pub from: String,
    pub to: String,
    #[serde(rename = "group")]
    pub stabilizer: GroupSymbol,
}

/// A distinguished interior point of a cusp, stored without metric data.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarkedPoint {
    #[serde(rename = "group")]
    pub stabilizer: GroupSymbol,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CuspSite {
    pub id: String,
    #[serde(rename = "base")]
    pub base_vertex: String,
    #[serde(rename = "group")]
    pub stabilizer: GroupSymbol,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub marked_point: Option<MarkedPoint>,
    #[serde(default)]
    pub fold_on_attach: bool,
}

/// The Kato tree of a single finite group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ElementaryTree {
    pub group: GroupSymbol,
    pub ctx: FieldContext,
    pub vertices: Vec<TreeVertex>,
    pub internal_edges: Vec<TreeEdge>,
    pub cusps: Vec<CuspSite>,
}

impl ElementaryTree {
    pub fn boundary_count(&self) -> usize {
        self.cusps.len()
    }

    pub fn cusp(&self, id: &str) -> Option<&CuspSite> {
        self.cusps.iter().find(|c| c.id == id)
    }

    pub fn vertex(&self, id: &str) -> Option<&TreeVertex> {
        self.vertices.iter().find(|v| v.id == id)
    }

    /// The vertex carrying the whole group.
    pub fn main_vertex(&self) -> &TreeVertex {
        self.vertices
            .iter()
            .find(|v| v.stabilizer == self.group)
            .unwrap_or(&self.vertices[0])
    }

    fn single(group: GroupSymbol, ctx: FieldContext, cusps: &[GroupSymbol], fold: bool) -> Self {
        ElementaryTree {
            group,
            ctx,
            vertices: vec![TreeVertex {
                id: "v0".into(),
                stabilizer: group,
            }],
            internal_edges: Vec::new(),
            cusps: cusps
                .iter()
                .enumerate()
                .map(|(i, g)| CuspSite {
                    id: format!("c{i}"),
                    base_vertex: "v0".into(),
                    stabilizer: *g,
                    marked_point: None,
                    fold_on_attach: fold,
                })
                .collect(),
        }
    }

    fn with_marked(mut self, cusp: usize, stabilizer: GroupSymbol) -> Self {
        self.cusps[cusp].marked_point = Some(MarkedPoint { stabilizer });
        self
    }

    /// Structural invariants every catalog entry must satisfy.
    fn check(&self) -> Result<(), String> {
        if self.vertices.is_empty() {
            return Err("tree has no vertices".into());
        }
        let ids: BTreeSet<&str> = self.vertices.iter().map(|v| v.id.as_str()).collect();
        if ids.len() != self.vertices.len() {
            return Err("duplicate vertex id".into());
        }
        let cusp_ids: BTreeSet<&str> = self.cusps.iter().map(|c| c.id.as_str()).collect();
        if cusp_ids.len() != self.cusps.len() {
            return Err("duplicate cusp id".into());
        }
        if !self.vertices.iter().any(|v| v.stabilizer == self.group) {
            return Err(format!("no vertex carries the group {}", self.group));
        }
        // a finite tree: connected with |E| = |V| - 1
        if self.internal_edges.len() + 1 != self.vertices.len() {
            return Err("internal edges do not form a tree".into());
        }
        let index: BTreeMap<&str, usize> = self
            .vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.id.as_str(), i))
            .collect();
        let mut uf = crate::graph::UnionFind::new(self.vertices.len());
        for e in &self.internal_edges {
            let (Some(&a), Some(&b)) = (index.get(e.from.as_str()), index.get(e.to.as_str()))
            else {
                return Err(format!("edge {} has an unknown endpoint", e.id));
            };
            if !uf.union(a, b) {
                return Err("internal edges contain a cycle".into());
            }
        }
        let order = |g: &GroupSymbol| g.raw_order(&self.ctx).unwrap_or(0);
        let whole = order(&self.group);
        for c in &self.cusps {
            if !index.contains_key(c.base_vertex.as_str()) {
                return Err(format!("cusp {} has unknown base {}", c.id, c.base_vertex));
            }
            if c.stabilizer.is_trivial() {
                return Err(format!("cusp {} has trivial stabilizer", c.id));
            }
            if validate_in_context(&c.stabilizer, &self.ctx).is_err() && !self.ctx.is_char_zero() {
                return Err(format!("cusp {} stabilizer is not admissible", c.id));
            }
            if whole == 0 || whole % order(&c.stabilizer).max(1) != 0 {
                return Err(format!(
                    "cusp {} stabilizer order does not divide |G|",
                    c.id
                ));
            }
            if let Some(mp) = &c.marked_point {
                if !is_subgroup(&c.stabilizer, &mp.stabilizer, &self.ctx) {
                    return Err(format!(
                        "marked point on {} does not contain the cusp stabilizer",
                        c.id
                    ));
                }
            }
        }
        if self.ctx.is_char_zero() && !self.group.is_trivial() {
            let expected = if self.group.is_cyclic() { 2 } else { 3 };
            if self.cusps.len() != expected {
                return Err(format!(
                    "characteristic zero tree for {} must have {expected} cusps",
                    self.group
                ));
            }
        }
        Ok(())
    }
}

/// A location on an elementary tree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Location {
    Vertex(String),
    MarkedPoint(String),
    Cusp(String),
    CuspInterior(String),
}

impl Location {
    /// Cusp referenced by this location, if any.
    pub fn cusp_id(&self) -> Option<&str> {
        match self {
            Location::Vertex(_) => None,
            Location::MarkedPoint(c) | Location::Cusp(c) | Location::CuspInterior(c) => Some(c),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceKind {
    Injective,
    Fold,
    Iso,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Correspondence {
    pub from: Location,
    pub to: Location,
}

/// How the tree of an edge group maps into the tree of a vertex group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttachmentTrace {
    pub edge_group: GroupSymbol,
    pub vertex_group: GroupSymbol,
    /// The cusp of the vertex tree that the gluing consumes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub site: Option<String>,
    pub kind: TraceKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fold_at: Option<Location>,
    pub correspondences: Vec<Correspondence>,
}

impl AttachmentTrace {
    /// Cusps of the vertex tree this trace occupies.
    pub fn occupied_sites(&self) -> BTreeSet<String> {
        match &self.site {
            Some(s) => [s.clone()].into_iter().collect(),
            None => self
                .correspondences
                .iter()
                .filter_map(|c| c.to.cusp_id().map(str::to_owned))
                .collect(),
        }
    }

    pub fn target_of(&self, from: &Location) -> Option<&Location> {
        self.correspondences
            .iter()
            .find(|c| &c.from == from)
            .map(|c| &c.to)
    }

    fn check(&self, edge: &ElementaryTree, vertex: &ElementaryTree) -> Result<(), String> {
        for c in &self.correspondences {
            if !location_exists(edge, &c.from) {
                return Err(format!("source location {:?} not on the edge tree", c.from));
            }
            if !location_exists(vertex, &c.to) {
                return Err(format!("target location {:?} not on the vertex tree", c.to));
            }
        }
        if let Some(site) = &self.site {
            if vertex.cusp(site).is_none() {
                return Err(format!("site {site} is not a cusp of the vertex tree"));
            }
        }
        match self.kind {
            TraceKind::Fold if self.fold_at.is_none() => {
                return Err("fold trace without a fold location".into())
            }
            TraceKind::Iso => {
                let targets: BTreeSet<_> = edge
                    .cusps
                    .iter()
                    .filter_map(|c| match self.target_of(&Location::Cusp(c.id.clone())) {
                        Some(Location::Cusp(t)) => Some(t.clone()),
                        _ => None,
                    })
                    .collect();
                if targets.len() != edge.cusps.len() || targets.len() != vertex.cusps.len() {
                    return Err("iso trace is not a bijection on cusps".into());
                }
            }
            _ => {}
        }
        if let Some(fold) = &self.fold_at {
            if !location_exists(vertex, fold) {
                return Err(format!("fold location {fold:?} not on the vertex tree"));
            }
        }
        Ok(())
    }
}

fn location_exists(tree: &ElementaryTree, loc: &Location) -> bool {
    match loc {
        Location::Vertex(v) => tree.vertex(v).is_some(),
        Location::Cusp(c) | Location::CuspInterior(c) => tree.cusp(c).is_some(),
        Location::MarkedPoint(c) => tree.cusp(c).is_some_and(|c| c.marked_point.is_some()),
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CatalogError {
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("catalog entry required for {group} ({ctx})")]
    EntryRequired {
        group: GroupSymbol,
        ctx: FieldContext,
    },
    #[error("extension file: {0}")]
    Extension(String),
    #[error("invalid catalog entry for {group}: {reason}")]
    InvalidEntry { group: GroupSymbol, reason: String },
}

/// Extension file layout: additional characteristic-zero trees and traces.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtensionFile {
    #[serde(default)]
    pub trees: Vec<ExtensionTree>,
    #[serde(default)]
    pub traces: Vec<ExtensionTrace>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtensionTree {
    pub field: FieldContext,
    pub group: GroupSymbol,
    pub vertices: Vec<TreeVertex>,
    #[serde(default)]
    pub internal_edges: Vec<TreeEdge>,
    pub cusps: Vec<CuspSite>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExtensionTrace {
    pub field: FieldContext,
    #[serde(flatten)]
    pub trace: AttachmentTrace,
}

type TreeKey = (u64, GroupSymbol);
type TraceKey = (u64, GroupSymbol, GroupSymbol);

/// Elementary trees and attachment traces: the built-in tables plus any
/// loaded extension entries. Read-only once built.
#[derive(Clone, Debug, Default)]
pub struct Catalog {
    trees: BTreeMap<TreeKey, ElementaryTree>,
    traces: BTreeMap<TraceKey, Vec<AttachmentTrace>>,
}

/// The catalog with built-in entries only.
pub fn builtin() -> &'static Catalog {
    static CATALOG: OnceLock<Catalog> = OnceLock::new();
    CATALOG.get_or_init(Catalog::default)
}

pub fn elementary_tree(
    g: &GroupSymbol,
    ctx: &FieldContext,
) -> Result<ElementaryTree, CatalogError> {
    builtin().elementary_tree(g, ctx)
}

pub fn boundary_count(g: &GroupSymbol, ctx: &FieldContext) -> Result<usize, CatalogError> {
    builtin().boundary_count(g, ctx)
}

pub fn attachment_traces(
    edge_group: &GroupSymbol,
    vertex_group: &GroupSymbol,
    ctx: &FieldContext,
) -> Result<Vec<AttachmentTrace>, CatalogError> {
    builtin().attachment_traces(edge_group, vertex_group, ctx)
}

fn g(kind: GroupKind) -> GroupSymbol {
    crate::group::canonicalize(kind).expect("catalog parameters are canonical")
}

fn cyc(n: u64) -> GroupSymbol {
    g(GroupKind::Cyclic { n })
}

/// Whether the characteristic-zero tree of `group` needs a printed or loaded entry.
fn needs_special_entry(group: &GroupSymbol, ctx: &FieldContext) -> bool {
    ctx.is_char_zero()
        && ctx.p() <= 5
        && !group.is_cyclic()
        && group.raw_order(ctx).is_some_and(|o| o % ctx.p() == 0)
}

fn printed_tree(group: &GroupSymbol, ctx: &FieldContext) -> Option<ElementaryTree> {
    if ctx.p() != 5 {
        return None;
    }
    let c2 = cyc(2);
    match group.kind() {
        GroupKind::Dihedral { n } if n == 5 || n % 10 == 0 => {
            Some(ElementaryTree::single(*group, *ctx, &[c2, c2, cyc(n)], true).with_marked(0, c2))
        }
        GroupKind::Icosahedral => {
            let d5 = g(GroupKind::Dihedral { n: 5 });
            let cusp = |i: usize, base: &str, s: GroupSymbol| CuspSite {
                id: format!("c{i}"),
                base_vertex: base.into(),
                stabilizer: s,
                marked_point: None,
                fold_on_attach: true,
            };
            Some(ElementaryTree {
                group: *group,
                ctx: *ctx,
                vertices: vec![
                    TreeVertex {
                        id: "v0".into(),
                        stabilizer: *group,
                    },
                    TreeVertex {
                        id: "v1".into(),
                        stabilizer: d5,
                    },
                ],
                internal_edges: vec![TreeEdge {
                    id: "e0".into(),
                    from: "v0".into(),
                    to: "v1".into(),
                    stabilizer: d5,
                }],
                cusps: vec![
                    cusp(0, "v0", cyc(3)),
                    cusp(1, "v1", c2),
                    cusp(2, "v1", cyc(5)),
                ],
            })
        }
        _ => None,
    }
}

fn corr(pairs: &[(Location, Location)]) -> Vec<Correspondence> {
    pairs
        .iter()
        .map(|(a, b)| Correspondence {
            from: a.clone(),
            to: b.clone(),
        })
        .collect()
}

fn v(s: &str) -> Location {
    Location::Vertex(s.into())
}

fn c(s: &str) -> Location {
    Location::Cusp(s.into())
}

fn mp(s: &str) -> Location {
    Location::MarkedPoint(s.into())
}

/// The two gluing maps of the residue-characteristic-5 triangle example:
/// the D5 tree folds into the A5 tree at its A5 vertex and into the D10m
/// tree at its vertex.
fn printed_traces(
    edge: &GroupSymbol,
    vertex: &GroupSymbol,
    ctx: &FieldContext,
) -> Option<Vec<AttachmentTrace>> {
    if ctx.p() != 5 || edge.kind() != (GroupKind::Dihedral { n: 5 }) {
        return None;
    }
    match vertex.kind() {
        GroupKind::Icosahedral => Some(vec![AttachmentTrace {
            edge_group: *edge,
            vertex_group: *vertex,
            site: None,
            kind: TraceKind::Fold,
            fold_at: Some(v("v0")),
            correspondences: corr(&[
                (v("v0"), v("v1")),
                (mp("c0"), v("v0")),
                (c("c0"), v("v0")),
                (c("c1"), c("c1")),
                (c("c2"), c("c2")),
            ]),
        }]),
        GroupKind::Dihedral { n } if n % 10 == 0 => Some(vec![AttachmentTrace {
            edge_group: *edge,
            vertex_group: *vertex,
            site: None,
            kind: TraceKind::Fold,
            fold_at: Some(v("v0")),
            correspondences: corr(&[
                (v("v0"), v("v0")),
                (mp("c0"), mp("c0")),
                (c("c0"), c("c0")),
                (c("c1"), c("c1")),
                (c("c2"), c("c2")),
            ]),
        }]),
        _ => None,
    }
}

impl Catalog {
    /// Built-in catalog extended by the entries of a JSON extension file.
    pub fn with_extension_file(path: &Path) -> Result<Self, CatalogError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CatalogError::Extension(format!("{}: {e}", path.display())))?;
        let mut cat = Catalog::default();
        cat.extend_from_str(&text)?;
        Ok(cat)
    }

    pub fn extend_from_str(&mut self, json: &str) -> Result<(), CatalogError> {
        let file: ExtensionFile = serde_json::from_str(json).map_err(|e| {
            CatalogError::Extension(format!("line {} column {}: {e}", e.line(), e.column()))
        })?;
        self.extend(file)
    }

    pub fn extend(&mut self, file: ExtensionFile) -> Result<(), CatalogError> {
        for entry in file.trees {
            let ctx = entry.field;
            let invalid = |reason: String| CatalogError::InvalidEntry {
                group: entry.group,
                reason,
            };
            if !needs_special_entry(&entry.group, &ctx) {
                return Err(invalid(
                    "extension trees are only accepted for characteristic 0 groups of order divisible by p <= 5"
                        .into(),
                ));
            }
            if printed_tree(&entry.group, &ctx).is_some()
                || self.trees.contains_key(&(ctx.p(), entry.group))
            {
                return Err(invalid("entry already present".into()));
            }
            let tree = ElementaryTree {
                group: entry.group,
                ctx,
                vertices: entry.vertices,
                internal_edges: entry.internal_edges,
                cusps: entry.cusps,
            };
            tree.check().map_err(invalid)?;
            self.trees.insert((ctx.p(), entry.group), tree);
        }
        for entry in file.traces {
            let ctx = entry.field;
            let t = entry.trace;
            let invalid = |reason: String| CatalogError::InvalidEntry {
                group: t.edge_group,
                reason,
            };
            if !ctx.is_char_zero() {
                return Err(invalid(
                    "extension traces are only accepted in characteristic 0".into(),
                ));
            }
            let edge = self.elementary_tree(&t.edge_group, &ctx)?;
            let vertex = self.elementary_tree(&t.vertex_group, &ctx)?;
            t.check(&edge, &vertex).map_err(invalid)?;
            self.traces
                .entry((ctx.p(), t.edge_group, t.vertex_group))
                .or_default()
                .push(t);
        }
        Ok(())
    }

    pub fn elementary_tree(
        &self,
        group: &GroupSymbol,
        ctx: &FieldContext,
    ) -> Result<ElementaryTree, CatalogError> {
        if let Err(violations) = validate_in_context(group, ctx) {
            return Err(GroupError::Inadmissible {
                group: *group,
                ctx: *ctx,
                violations,
            }
            .into());
        }
        if group.is_trivial() {
            return Ok(ElementaryTree::single(*group, *ctx, &[], false));
        }
        if ctx.is_char_zero() {
            return self.char_zero_tree(group, ctx);
        }
        Ok(self.char_p_tree(group, ctx)?)
    }

    fn char_zero_tree(
        &self,
        group: &GroupSymbol,
        ctx: &FieldContext,
    ) -> Result<ElementaryTree, CatalogError> {
        if needs_special_entry(group, ctx) {
            return printed_tree(group, ctx)
                .or_else(|| self.trees.get(&(ctx.p(), *group)).cloned())
                .ok_or(CatalogError::EntryRequired {
                    group: *group,
                    ctx: *ctx,
                });
        }
        let cusps = match group.kind() {
            GroupKind::Cyclic { n } => vec![cyc(n), cyc(n)],
            GroupKind::Dihedral { n } => vec![cyc(2), cyc(2), cyc(n)],
            GroupKind::Tetrahedral => vec![cyc(2), cyc(3), cyc(3)],
            GroupKind::Octahedral => vec![cyc(2), cyc(3), cyc(4)],
            GroupKind::Icosahedral => vec![cyc(2), cyc(3), cyc(5)],
            GroupKind::Borel { .. } | GroupKind::ProjLinear { .. } => {
                unreachable!("rejected by admissibility")
            }
        };
        Ok(ElementaryTree::single(*group, *ctx, &cusps, true))
    }

    fn char_p_tree(
        &self,
        group: &GroupSymbol,
        ctx: &FieldContext,
    ) -> Result<ElementaryTree, GroupError> {
        let p = ctx.p();
        let tree = match group.kind() {
            GroupKind::Cyclic { n } => {
                ElementaryTree::single(*group, *ctx, &[cyc(n), cyc(n)], false)
            }
            GroupKind::Dihedral { n } if p == 2 => {
                ElementaryTree::single(*group, *ctx, &[cyc(2), cyc(n)], true)
            }
            GroupKind::Dihedral { n } => {
                ElementaryTree::single(*group, *ctx, &[cyc(2), cyc(2), cyc(n)], true)
            }
            GroupKind::Borel { n: 1, .. } => ElementaryTree::single(*group, *ctx, &[*group], false),
            GroupKind::Borel { n, .. } => {
                ElementaryTree::single(*group, *ctx, &[cyc(n), *group], false)
            }
            GroupKind::ProjLinear { t, .. } => {
                let inv = pl_invariants(group, ctx)?;
                let borel = g(GroupKind::Borel { t, n: inv.n_minus });
                ElementaryTree::single(*group, *ctx, &[cyc(inv.n_plus), borel], true)
                    .with_marked(1, borel)
            }
            GroupKind::Tetrahedral => {
                ElementaryTree::single(*group, *ctx, &[cyc(2), cyc(3), cyc(3)], true)
            }
            GroupKind::Octahedral => {
                ElementaryTree::single(*group, *ctx, &[cyc(2), cyc(3), cyc(4)], true)
            }
            GroupKind::Icosahedral if p == 3 => ElementaryTree::single(
                *group,
                *ctx,
                &[cyc(5), g(GroupKind::Borel { t: 1, n: 2 })],
                true,
            ),
            GroupKind::Icosahedral => {
                ElementaryTree::single(*group, *ctx, &[cyc(2), cyc(3), cyc(5)], true)
            }
        };
        Ok(tree)
    }

    pub fn boundary_count(
        &self,
        group: &GroupSymbol,
        ctx: &FieldContext,
    ) -> Result<usize, CatalogError> {
        Ok(self.elementary_tree(group, ctx)?.boundary_count())
    }

    /// Whether `group` can stabilize a non-trivial edge in `ctx`.
    pub fn is_edge_capable(&self, group: &GroupSymbol, ctx: &FieldContext) -> bool {
        if group.is_trivial() {
            return true;
        }
        if ctx.is_char_zero() {
            group.is_cyclic()
                || printed_traces(group, &GroupSymbol::ICOSAHEDRAL, ctx).is_some()
                || self
                    .traces
                    .keys()
                    .any(|(p, e, _)| *p == ctx.p() && e == group)
        } else {
            group.is_borel_form()
        }
    }

    /// All ways the tree of `edge_group` attaches to the tree of `vertex_group`.
    /// An empty list means the gluing is inadmissible.
    pub fn attachment_traces(
        &self,
        edge_group: &GroupSymbol,
        vertex_group: &GroupSymbol,
        ctx: &FieldContext,
    ) -> Result<Vec<AttachmentTrace>, CatalogError> {
        if ctx.is_char_zero() {
            if let Some(ts) = printed_traces(edge_group, vertex_group, ctx) {
                return Ok(ts);
            }
            if let Some(ts) = self.traces.get(&(ctx.p(), *edge_group, *vertex_group)) {
                return Ok(ts.clone());
            }
        }
        let edge = self.elementary_tree(edge_group, ctx)?;
        let vertex = self.elementary_tree(vertex_group, ctx)?;
        if edge.vertices.len() != 1 || edge_group.is_trivial() {
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        match edge.boundary_count() {
            1 => {
                let ec = &edge.cusps[0];
                for site in &vertex.cusps {
                    if site.stabilizer == ec.stabilizer
                        || borel_extends(&ec.stabilizer, &site.stabilizer)
                    {
                        out.push(AttachmentTrace {
                            edge_group: *edge_group,
                            vertex_group: *vertex_group,
                            site: Some(site.id.clone()),
                            kind: TraceKind::Injective,
                            fold_at: None,
                            correspondences: corr(&[
                                (v("v0"), Location::CuspInterior(site.id.clone())),
                                (c(&ec.id), c(&site.id)),
                            ]),
                        });
                    }
                }
            }
            2 => {
                let iso = !ctx.is_char_zero()
                    && vertex_group.is_borel_form()
                    && borel_extends(edge_group, vertex_group);
                if iso {
                    // the prime-to-p end of the edge line lands on the vertex tree's C_n cusp
                    let (_, n) = edge_group.borel_form().expect("Borel form");
                    let near = cyc(n);
                    for site in vertex.cusps.iter().filter(|s| s.stabilizer == near) {
                        let far = vertex
                            .cusps
                            .iter()
                            .find(|o| o.id != site.id)
                            .expect("two cusps");
                        let (e_near, e_far) = if edge.cusps[0].stabilizer == near {
                            (&edge.cusps[0], &edge.cusps[1])
                        } else {
                            (&edge.cusps[1], &edge.cusps[0])
                        };
                        out.push(AttachmentTrace {
                            edge_group: *edge_group,
                            vertex_group: *vertex_group,
                            site: Some(site.id.clone()),
                            kind: TraceKind::Iso,
                            fold_at: None,
                            correspondences: corr(&[
                                (v("v0"), v(&site.base_vertex)),
                                (c(&e_near.id), c(&site.id)),
                                (c(&e_far.id), c(&far.id)),
                            ]),
                        });
                    }
                } else {
                    let edge_stabs: BTreeSet<GroupSymbol> =
                        edge.cusps.iter().map(|c| c.stabilizer).collect();
                    for site in vertex
                        .cusps
                        .iter()
                        .filter(|s| s.fold_on_attach && edge_stabs.contains(&s.stabilizer))
                    {
                        let fold_at = if site.marked_point.is_some() {
                            mp(&site.id)
                        } else {
                            v(&site.base_vertex)
                        };
                        out.push(AttachmentTrace {
                            edge_group: *edge_group,
                            vertex_group: *vertex_group,
                            site: Some(site.id.clone()),
                            kind: TraceKind::Fold,
                            fold_at: Some(fold_at.clone()),
                            correspondences: corr(&[
                                (v("v0"), fold_at),
                                (c(&edge.cusps[0].id), c(&site.id)),
                                (c(&edge.cusps[1].id), c(&site.id)),
                            ]),
                        });
                    }
                }
            }
            _ => {}
        }
        Ok(out)
    }

    /// Incident-stabilizer patterns known to generate `group`, read off the
    /// catalog: the incidences at each vertex of the elementary tree that
    /// carries the whole group.
    pub fn generation_whitelist(
        &self,
        group: &GroupSymbol,
        ctx: &FieldContext,
    ) -> Result<Vec<Vec<GroupSymbol>>, CatalogError> {
        let tree = self.elementary_tree(group, ctx)?;
        let mut out = Vec::new();
        for vtx in tree.vertices.iter().filter(|v| v.stabilizer == *group) {
            let mut pattern: Vec<GroupSymbol> = tree
                .cusps
                .iter()
                .filter(|c| c.base_vertex == vtx.id)
                .map(|c| c.stabilizer)
                .collect();
            pattern.extend(
                tree.internal_edges
                    .iter()
                    .filter(|e| e.from == vtx.id || e.to == vtx.id)
                    .map(|e| e.stabilizer),
            );
            pattern.sort();
            out.push(pattern);
        }
        Ok(out)
    }
}
