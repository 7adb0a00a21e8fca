//! Cusp-count formulas, branch points, ordinarity, contraction to the
//! quotient skeleton, structural checks and separation plans.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use num_integer::Integer;
use serde::Serialize;
use thiserror::Error;

use crate::catalog::Catalog;
use crate::graph::{boundary_sum, CheckedInput, FiniteEdge, GenusLoop, GraphVertex, KatoGraph};
use crate::group::{is_subgroup, FieldContext, GroupSymbol};

/// Counts of cyclic and non-cyclic stabilizers over vertices and finite
/// edges. Trivial groups are not counted.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct FormulaCensus {
    pub cyclic_vertices: usize,
    pub cyclic_edges: usize,
    pub noncyclic_vertices: usize,
    pub noncyclic_edges: usize,
}

impl fmt::Display for FormulaCensus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "C={} c={} D={} d={}",
            self.cyclic_vertices, self.cyclic_edges, self.noncyclic_vertices, self.noncyclic_edges
        )
    }
}

pub fn census(g: &KatoGraph) -> FormulaCensus {
    let mut cs = FormulaCensus::default();
    for v in g.vertices.iter().filter(|v| !v.stabilizer.is_trivial()) {
        if v.stabilizer.is_cyclic() {
            cs.cyclic_vertices += 1;
        } else {
            cs.noncyclic_vertices += 1;
        }
    }
    for e in g.finite_edges.iter().filter(|e| !e.stabilizer.is_trivial()) {
        if e.stabilizer.is_cyclic() {
            cs.cyclic_edges += 1;
        } else {
            cs.noncyclic_edges += 1;
        }
    }
    cs
}

/// 3(D − d) + 2(C − c).
pub fn cusp_count_char0(cs: FormulaCensus) -> i64 {
    let d = cs.noncyclic_vertices as i64 - cs.noncyclic_edges as i64;
    let c = cs.cyclic_vertices as i64 - cs.cyclic_edges as i64;
    3 * d + 2 * c
}

/// Σ_v #∂T(G_v) − Σ_e #∂T(G_e) over the validated input.
pub fn cusp_count_general(checked: &CheckedInput) -> i64 {
    boundary_sum(checked)
}

pub fn count_cusps_direct(g: &KatoGraph) -> usize {
    g.cusps.len()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BranchPoint {
    pub id: String,
    pub group: GroupSymbol,
    pub anchor: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BranchSignature {
    pub points: Vec<BranchPoint>,
}

impl BranchSignature {
    pub fn groups(&self) -> Vec<GroupSymbol> {
        let mut g: Vec<_> = self.points.iter().map(|p| p.group).collect();
        g.sort();
        g
    }
}

pub fn branch_points(g: &KatoGraph) -> BranchSignature {
    BranchSignature {
        points: g
            .cusps
            .iter()
            .map(|c| BranchPoint {
                id: c.id.clone(),
                group: c.stabilizer,
                anchor: c.base.clone(),
            })
            .collect(),
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AnalysisError {
    #[error("ordinarity is only defined in positive characteristic")]
    CharZero,
}

pub fn is_ordinary(sig: &BranchSignature, ctx: &FieldContext) -> Result<bool, AnalysisError> {
    if ctx.is_char_zero() {
        return Err(AnalysisError::CharZero);
    }
    let p = ctx.p();
    // a cyclic group of order p is unipotent, i.e. E_1
    let form = |g: &GroupSymbol| match g.borel_form() {
        Some((0, n)) if n == p => Some((1, 1)),
        f => f,
    };
    Ok(sig.points.iter().all(|bp| match form(&bp.group) {
        Some((t, n)) => {
            n.gcd(&p) == 1 && (t == 0 || ctx.power(t).is_some_and(|q| (q - 1) % n == 0))
        }
        None => false,
    }))
}

/// The contracted graph: no cusps, and no edge left that the contraction
/// rule would collapse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuotientSkeleton {
    pub ctx: FieldContext,
    pub vertices: Vec<GraphVertex>,
    pub edges: Vec<FiniteEdge>,
    pub genus_loops: Vec<GenusLoop>,
    pub genus: usize,
    pub warnings: Vec<String>,
}

impl QuotientSkeleton {
    /// The skeleton as a cusp-free Kato graph, e.g. to contract it again.
    pub fn to_graph(&self) -> KatoGraph {
        KatoGraph {
            ctx: self.ctx,
            vertices: self.vertices.clone(),
            finite_edges: self.edges.clone(),
            cusps: Vec::new(),
            genus_loops: self.genus_loops.clone(),
            notes: Vec::new(),
        }
    }
}

fn valency(g: &KatoGraph, v: &str) -> usize {
    let ends = g
        .finite_edges
        .iter()
        .map(|e| (&e.from, &e.to))
        .chain(g.genus_loops.iter().map(|l| (&l.from, &l.to)));
    ends.map(|(a, b)| usize::from(a == v) + usize::from(b == v))
        .sum()
}

pub fn contract(g: &KatoGraph) -> QuotientSkeleton {
    let ctx = g.ctx;
    let mut work = g.clone();
    work.cusps.clear();
    work.sort();
    let mut warnings: Vec<String> = Vec::new();
    let warn = |w: String, warnings: &mut Vec<String>| {
        if !warnings.contains(&w) {
            warnings.push(w);
        }
    };
    let stab = |g: &KatoGraph, id: &str| {
        g.vertex(id)
            .map(|v| v.stabilizer)
            .expect("edge endpoint exists")
    };
    loop {
        let mut collapse = None;
        for (i, e) in work.finite_edges.iter().enumerate() {
            let (su, sv) = (stab(&work, &e.from), stab(&work, &e.to));
            if e.stabilizer != su && e.stabilizer != sv {
                continue;
            }
            let (survivor, absorbed) = if su == sv {
                (&e.from, &e.to)
            } else {
                let (ou, ov) = (su.raw_order(&ctx), sv.raw_order(&ctx));
                match ou.cmp(&ov) {
                    std::cmp::Ordering::Greater => (&e.from, &e.to),
                    std::cmp::Ordering::Less => (&e.to, &e.from),
                    std::cmp::Ordering::Equal => {
                        warn(
                            format!(
                                "contraction: edge {} not collapsed, endpoints {} and {} have groups of equal order",
                                e.id,
                                su.label(&ctx),
                                sv.label(&ctx)
                            ),
                            &mut warnings,
                        );
                        continue;
                    }
                }
            };
            let literal = valency(&work, survivor) < 3;
            let other = valency(&work, absorbed) < 3;
            if literal != other {
                warn(
                    format!(
                        "contraction: edge {} {} under the surviving-vertex valency reading but would {} under the absorbed-vertex reading",
                        e.id,
                        if literal { "collapsed" } else { "kept" },
                        if other { "collapse" } else { "be kept" }
                    ),
                    &mut warnings,
                );
            }
            if literal {
                collapse = Some((i, survivor.clone(), absorbed.clone()));
                break;
            }
        }
        let Some((i, survivor, absorbed)) = collapse else {
            break;
        };
        work.finite_edges.remove(i);
        work.vertices.retain(|v| v.id != absorbed);
        for e in &mut work.finite_edges {
            for end in [&mut e.from, &mut e.to] {
                if *end == absorbed {
                    *end = survivor.clone();
                }
            }
        }
        for l in &mut work.genus_loops {
            for end in [&mut l.from, &mut l.to] {
                if *end == absorbed {
                    *end = survivor.clone();
                }
            }
        }
    }
    QuotientSkeleton {
        ctx,
        genus: crate::graph::genus(&work),
        vertices: work.vertices,
        edges: work.finite_edges,
        genus_loops: work.genus_loops,
        warnings,
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum StructuralViolation {
    TooManyIncidences {
        vertex: String,
        count: usize,
    },
    OrderNotDividing {
        vertex: String,
        lcm: u64,
        order: u64,
    },
    NotGenerated {
        vertex: String,
        pattern: Vec<GroupSymbol>,
    },
    NoCatalogEntry {
        vertex: String,
        reason: String,
    },
}

impl fmt::Display for StructuralViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StructuralViolation::TooManyIncidences { vertex, count } => {
                write!(
                    f,
                    "vertex {vertex}: {count} incident cusps and non-trivial edges (at most 3)"
                )
            }
            StructuralViolation::OrderNotDividing { vertex, lcm, order } => {
                write!(
                    f,
                    "vertex {vertex}: lcm {lcm} of incident orders does not divide {order}"
                )
            }
            StructuralViolation::NotGenerated { vertex, pattern } => write!(
                f,
                "vertex {vertex}: incident pattern {{{}}} does not generate the vertex group",
                pattern
                    .iter()
                    .map(|g| g.to_string())
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
            StructuralViolation::NoCatalogEntry { vertex, reason } => {
                write!(f, "vertex {vertex}: {reason}")
            }
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct StructuralReport {
    pub violations: Vec<StructuralViolation>,
}

impl StructuralReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Whether every group of `w` can be matched to a distinct group of `p`
/// containing it.
fn dominates(w: &[GroupSymbol], p: &[GroupSymbol], ctx: &FieldContext) -> bool {
    fn go(w: &[GroupSymbol], p: &[GroupSymbol], used: &mut Vec<bool>, ctx: &FieldContext) -> bool {
        let Some((first, rest)) = w.split_first() else {
            return true;
        };
        for j in 0..p.len() {
            if !used[j] && is_subgroup(first, &p[j], ctx) {
                used[j] = true;
                if go(rest, p, used, ctx) {
                    return true;
                }
                used[j] = false;
            }
        }
        false
    }
    w.len() <= p.len() && go(w, p, &mut vec![false; p.len()], ctx)
}

pub fn structural_check(g: &KatoGraph, catalog: &Catalog) -> StructuralReport {
    let ctx = g.ctx;
    let mut report = StructuralReport::default();
    for v in &g.vertices {
        let mut pattern: Vec<GroupSymbol> = g
            .cusps
            .iter()
            .filter(|c| c.base == v.id)
            .map(|c| c.stabilizer)
            .collect();
        pattern.extend(
            g.finite_edges
                .iter()
                .filter(|e| !e.stabilizer.is_trivial())
                .filter(|e| e.from == v.id || e.to == v.id)
                .map(|e| e.stabilizer),
        );
        pattern.sort();
        if pattern.len() > 3 {
            report
                .violations
                .push(StructuralViolation::TooManyIncidences {
                    vertex: v.id.clone(),
                    count: pattern.len(),
                });
        }
        let order = v.stabilizer.raw_order(&ctx).unwrap_or(0);
        let lcm = pattern
            .iter()
            .map(|h| h.raw_order(&ctx).unwrap_or(0))
            .fold(1u64, |acc, o| acc.lcm(&o));
        if order == 0 || lcm == 0 || order % lcm != 0 {
            report
                .violations
                .push(StructuralViolation::OrderNotDividing {
                    vertex: v.id.clone(),
                    lcm,
                    order,
                });
        }
        if pattern.contains(&v.stabilizer) {
            continue;
        }
        match catalog.generation_whitelist(&v.stabilizer, &ctx) {
            Ok(list) => {
                if !list.iter().any(|w| dominates(w, &pattern, &ctx)) {
                    report.violations.push(StructuralViolation::NotGenerated {
                        vertex: v.id.clone(),
                        pattern,
                    });
                }
            }
            Err(e) => report.violations.push(StructuralViolation::NoCatalogEntry {
                vertex: v.id.clone(),
                reason: e.to_string(),
            }),
        }
    }
    report
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Cluster {
    pub anchor: String,
    pub members: Vec<String>,
    pub size: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SeparationPlan {
    pub clusters: Vec<Cluster>,
    /// Path lengths between anchors, keyed by the pair of anchor ids in
    /// ascending order.
    pub distances: BTreeMap<(String, String), usize>,
}

impl SeparationPlan {
    pub fn distance(&self, a: &str, b: &str) -> Option<usize> {
        let key = if a <= b {
            (a.to_owned(), b.to_owned())
        } else {
            (b.to_owned(), a.to_owned())
        };
        self.distances.get(&key).copied()
    }
}

fn bfs(adj: &BTreeMap<&str, Vec<&str>>, from: &str) -> BTreeMap<String, usize> {
    let mut dist = BTreeMap::new();
    let mut queue = VecDeque::new();
    dist.insert(from.to_owned(), 0);
    queue.push_back(from.to_owned());
    while let Some(u) = queue.pop_front() {
        let d = dist[&u];
        for &w in adj.get(u.as_str()).into_iter().flatten() {
            if !dist.contains_key(w) {
                dist.insert(w.to_owned(), d + 1);
                queue.push_back(w.to_owned());
            }
        }
    }
    dist
}

pub fn separation_plan(g: &KatoGraph) -> SeparationPlan {
    let mut by_anchor: BTreeMap<String, Vec<String>> = BTreeMap::new();
    for c in &g.cusps {
        by_anchor
            .entry(c.base.clone())
            .or_default()
            .push(c.id.clone());
    }
    let clusters: Vec<Cluster> = by_anchor
        .into_iter()
        .map(|(anchor, members)| Cluster {
            size: members.len(),
            anchor,
            members,
        })
        .collect();
    let mut tree_adj: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for e in &g.finite_edges {
        tree_adj.entry(&e.from).or_default().push(&e.to);
        tree_adj.entry(&e.to).or_default().push(&e.from);
    }
    let mut full_adj = tree_adj.clone();
    for l in &g.genus_loops {
        full_adj.entry(&l.from).or_default().push(&l.to);
        full_adj.entry(&l.to).or_default().push(&l.from);
    }
    let anchors: BTreeSet<&str> = clusters.iter().map(|c| c.anchor.as_str()).collect();
    let mut distances = BTreeMap::new();
    for &a in &anchors {
        let near = bfs(&tree_adj, a);
        let far = bfs(&full_adj, a);
        for &b in
            anchors.range::<&str, _>((std::ops::Bound::Excluded(a), std::ops::Bound::Unbounded))
        {
            if let Some(&d) = near.get(b).or_else(|| far.get(b)) {
                distances.insert((a.to_owned(), b.to_owned()), d);
            }
        }
    }
    SeparationPlan {
        clusters,
        distances,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::builtin;
    use crate::graph::{realize, validate_input, Cusp, InputGraphOfGroups};
    use crate::group::PlVariant;

    fn triangle(m: u32) -> InputGraphOfGroups {
        serde_json::from_value(serde_json::json!({
            "field": {"char_K": 0, "p": 5, "m": m},
            "vertices": [
                {"id": "A", "group": {"kind": "icosahedral"}},
                {"id": "B", "group": {"kind": "dihedral", "n": 10 * m}}
            ],
            "edges": [{"id": "e", "from": "A", "to": "B", "group": {"kind": "dihedral", "n": 5}}]
        }))
        .unwrap()
    }

    fn realized(input: &InputGraphOfGroups) -> (CheckedInput, KatoGraph) {
        let checked = validate_input(input, builtin()).unwrap();
        let g = realize(&checked).unwrap();
        (checked, g)
    }

    #[test]
    fn triangle_counts() {
        let (checked, g) = realized(&triangle(1));
        let cs = census(&g);
        assert_eq!(
            (
                cs.cyclic_vertices,
                cs.cyclic_edges,
                cs.noncyclic_vertices,
                cs.noncyclic_edges
            ),
            (0, 0, 2, 1)
        );
        assert_eq!(cusp_count_char0(cs), 3);
        assert_eq!(cusp_count_general(&checked), 3);
        assert_eq!(count_cusps_direct(&g), 3);
    }

    #[test]
    fn char0_formula_examples() {
        let cs = FormulaCensus {
            cyclic_vertices: 0,
            cyclic_edges: 1,
            noncyclic_vertices: 2,
            noncyclic_edges: 0,
        };
        assert_eq!(cusp_count_char0(cs), 4);
        assert_eq!(cusp_count_char0(FormulaCensus::default()), 0);
    }

    #[test]
    fn triangle_plan_and_contraction() {
        let (_, g) = realized(&triangle(2));
        let plan = separation_plan(&g);
        let mut sizes: Vec<_> = plan.clusters.iter().map(|c| c.size).collect();
        sizes.sort();
        assert_eq!(sizes, vec![1, 2]);
        assert_eq!(
            plan.distance(&plan.clusters[0].anchor, &plan.clusters[1].anchor),
            Some(1)
        );
        let sk = contract(&g);
        assert_eq!(sk.vertices.len(), 2);
        assert_eq!(sk.edges.len(), 1);
        assert!(structural_check(&g, builtin()).is_ok());
    }

    #[test]
    fn borel_example_contracts_to_one_vertex() {
        let ctx = FieldContext::char_p(2, 2).unwrap();
        let input: InputGraphOfGroups = serde_json::from_value(serde_json::json!({
            "field": {"char_K": 2, "p": 2, "m": 2},
            "vertices": [
                {"id": "a", "group": {"kind": "proj_linear", "variant": "PGL", "t": 2}},
                {"id": "v0", "group": {"kind": "borel", "t": 2, "n": 3}}
            ],
            "edges": [{"id": "e", "from": "a", "to": "v0", "derive": true}]
        }))
        .unwrap();
        let (_, g) = realized(&input);
        let sig = branch_points(&g);
        assert_eq!(
            sig.groups(),
            vec![
                GroupSymbol::cyclic(5).unwrap(),
                GroupSymbol::borel(2, 3).unwrap()
            ]
        );
        assert_eq!(is_ordinary(&sig, &ctx), Ok(true));
        let sk = contract(&g);
        assert_eq!(sk.vertices.len(), 1);
        assert_eq!(
            sk.vertices[0].stabilizer,
            GroupSymbol::proj_linear(PlVariant::Pgl, 2).unwrap()
        );
        assert_eq!(contract(&sk.to_graph()), sk);
    }

    #[test]
    fn ordinarity() {
        let ctx = FieldContext::char_p(3, 1).unwrap();
        let sig = |gs: &[GroupSymbol]| BranchSignature {
            points: gs
                .iter()
                .map(|g| BranchPoint {
                    id: "x".into(),
                    group: *g,
                    anchor: "v".into(),
                })
                .collect(),
        };
        assert_eq!(
            is_ordinary(
                &sig(&[
                    GroupSymbol::cyclic(5).unwrap(),
                    GroupSymbol::borel(1, 2).unwrap()
                ]),
                &ctx
            ),
            Ok(true)
        );
        assert_eq!(
            is_ordinary(&sig(&[GroupSymbol::TETRAHEDRAL]), &ctx),
            Ok(false)
        );
        assert_eq!(
            is_ordinary(&sig(&[]), &FieldContext::char_zero(7, 1).unwrap()),
            Err(AnalysisError::CharZero)
        );
    }

    #[test]
    fn four_cusps_flagged() {
        let ctx = FieldContext::char_zero(7, 1).unwrap();
        let mut g = KatoGraph::empty(ctx);
        g.vertices.push(GraphVertex {
            id: "v".into(),
            stabilizer: GroupSymbol::dihedral(3).unwrap(),
        });
        for i in 0..4 {
            g.cusps.push(Cusp {
                id: format!("c{i}"),
                base: "v".into(),
                stabilizer: GroupSymbol::cyclic(2).unwrap(),
            });
        }
        let r = structural_check(&g, builtin());
        assert!(r
            .violations
            .iter()
            .any(|v| matches!(v, StructuralViolation::TooManyIncidences { count: 4, .. })));
    }
}
