//! Test-side reference values, computed without the engine's catalog.

pub mod models;

use kato_core::{FieldContext, GroupKind, GroupSymbol, KatoGraph, PlVariant};

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Admissibility in positive characteristic from the classification's
/// side conditions.
pub fn admissible_char_p(g: &GroupSymbol, p: u64, m: u32) -> bool {
    let q = p.pow(m);
    match g.kind() {
        GroupKind::Cyclic { n } => gcd(n, p) == 1,
        GroupKind::Dihedral { n } if p == 2 => n % 2 == 1,
        GroupKind::Dihedral { n } => (q - 1) % n == 0 || (q + 1) % n == 0,
        GroupKind::Borel { t, n } => t <= m && (p.pow(t) - 1) % n == 0 && (q - 1) % n == 0,
        GroupKind::ProjLinear { variant, t } => t <= m && !(p == 2 && variant == PlVariant::Psl),
        GroupKind::Tetrahedral | GroupKind::Octahedral => p != 2 && p != 3,
        GroupKind::Icosahedral => p != 2 && p != 5 && (q * q - 1) % 5 == 0,
    }
}

/// Number of cusps of the elementary tree, from the classification table.
pub fn boundary(g: &GroupSymbol, ctx: &FieldContext) -> usize {
    if g.is_trivial() {
        return 0;
    }
    if ctx.is_char_zero() {
        return if g.is_cyclic() { 2 } else { 3 };
    }
    let p = ctx.p();
    match g.kind() {
        GroupKind::Cyclic { .. } => 2,
        GroupKind::Dihedral { .. } if p == 2 => 2,
        GroupKind::Dihedral { .. } => 3,
        GroupKind::Borel { n: 1, .. } => 1,
        GroupKind::Borel { .. } => 2,
        GroupKind::ProjLinear { .. } => 2,
        GroupKind::Tetrahedral | GroupKind::Octahedral => 3,
        GroupKind::Icosahedral if p == 3 => 2,
        GroupKind::Icosahedral => 3,
    }
}

/// (C, c, D, d): cyclic and non-cyclic non-trivial vertices and edges.
pub fn census(g: &KatoGraph) -> (i64, i64, i64, i64) {
    let cyc = |s: &GroupSymbol| matches!(s.kind(), GroupKind::Cyclic { n } if n > 1);
    let non = |s: &GroupSymbol| !s.is_trivial() && !cyc(s);
    let count = |it: &mut dyn Iterator<Item = GroupSymbol>, f: &dyn Fn(&GroupSymbol) -> bool| {
        it.filter(|s| f(s)).count() as i64
    };
    (
        count(&mut g.vertices.iter().map(|v| v.stabilizer), &cyc),
        count(&mut g.finite_edges.iter().map(|e| e.stabilizer), &cyc),
        count(&mut g.vertices.iter().map(|v| v.stabilizer), &non),
        count(&mut g.finite_edges.iter().map(|e| e.stabilizer), &non),
    )
}

pub fn char0_formula(g: &KatoGraph) -> i64 {
    let (c_v, c_e, d_v, d_e) = census(g);
    3 * (d_v - d_e) + 2 * (c_v - c_e)
}

/// Cusps plus non-trivial finite edges at each vertex.
pub fn max_incidence(g: &KatoGraph) -> usize {
    g.vertices
        .iter()
        .map(|v| {
            let cusps = g.cusps.iter().filter(|c| c.base == v.id).count();
            let edges = g
                .finite_edges
                .iter()
                .filter(|e| !e.stabilizer.is_trivial())
                .map(|e| usize::from(e.from == v.id) + usize::from(e.to == v.id))
                .sum::<usize>();
            cusps + edges
        })
        .max()
        .unwrap_or(0)
}

/// Borel type B(t,n), with cyclic groups of order prime to p as t = 0 and a
/// cyclic group of order p as the unipotent E_1.
pub fn is_borel_type(g: &GroupSymbol, p: u64) -> bool {
    match g.kind() {
        GroupKind::Cyclic { n } => n == p || gcd(n, p) == 1,
        GroupKind::Borel { t, n } => (p.pow(t) - 1) % n == 0,
        _ => false,
    }
}

fn order(g: &GroupSymbol, p: u64) -> u64 {
    match g.kind() {
        GroupKind::Cyclic { n } => n,
        GroupKind::Dihedral { n } => 2 * n,
        GroupKind::Borel { t, n } => p.pow(t) * n,
        GroupKind::ProjLinear { variant, t } => {
            let q = p.pow(t);
            let pgl = q * (q * q - 1);
            if variant == PlVariant::Psl {
                pgl / gcd(2, q - 1)
            } else {
                pgl
            }
        }
        GroupKind::Tetrahedral => 12,
        GroupKind::Octahedral => 24,
        GroupKind::Icosahedral => 60,
    }
}

/// Replays the contraction rule and reports whether any examined edge had
/// different verdicts under the two valency readings.
pub fn contraction_is_ambiguous(g: &KatoGraph) -> bool {
    let p = g.ctx.p();
    let mut verts: Vec<(String, GroupSymbol)> = g
        .vertices
        .iter()
        .map(|v| (v.id.clone(), v.stabilizer))
        .collect();
    let mut edges: Vec<(String, String, GroupSymbol)> = g
        .finite_edges
        .iter()
        .map(|e| (e.from.clone(), e.to.clone(), e.stabilizer))
        .collect();
    let mut loops: Vec<(String, String)> = g
        .genus_loops
        .iter()
        .map(|l| (l.from.clone(), l.to.clone()))
        .collect();
    let mut ambiguous = false;
    loop {
        let stab =
            |id: &str, verts: &[(String, GroupSymbol)]| verts.iter().find(|v| v.0 == id).unwrap().1;
        let val =
            |id: &str, edges: &[(String, String, GroupSymbol)], loops: &[(String, String)]| {
                edges
                    .iter()
                    .map(|e| (&e.0, &e.1))
                    .chain(loops.iter().map(|l| (&l.0, &l.1)))
                    .map(|(a, b)| usize::from(a == id) + usize::from(b == id))
                    .sum::<usize>()
            };
        let mut step = None;
        for (i, (a, b, s)) in edges.iter().enumerate() {
            let (sa, sb) = (stab(a, &verts), stab(b, &verts));
            if *s != sa && *s != sb {
                continue;
            }
            let (keep, gone) = if sa == sb {
                (a, b)
            } else if order(&sa, p) > order(&sb, p) {
                (a, b)
            } else if order(&sa, p) < order(&sb, p) {
                (b, a)
            } else {
                continue;
            };
            let literal = val(keep, &edges, &loops) < 3;
            let alt = val(gone, &edges, &loops) < 3;
            ambiguous |= literal != alt;
            if literal {
                step = Some((i, keep.clone(), gone.clone()));
                break;
            }
        }
        let Some((i, keep, gone)) = step else { break };
        edges.remove(i);
        verts.retain(|v| v.0 != gone);
        for (a, b, _) in &mut edges {
            for end in [a, b] {
                if *end == gone {
                    *end = keep.clone();
                }
            }
        }
        for (a, b) in &mut loops {
            for end in [a, b] {
                if *end == gone {
                    *end = keep.clone();
                }
            }
        }
    }
    ambiguous
}
