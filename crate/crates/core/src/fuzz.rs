//! Random admissible graphs of groups, grown one vertex at a time so that
//! every non-trivial edge lands on a free attachment site.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::catalog::{AttachmentTrace, Catalog};
use crate::graph::{
    validate_input, EdgeGroupSpec, GenusEdge, InputEdge, InputGraphOfGroups, InputVertex, SiteHints,
};
use crate::group::{
    derive_edge_group, is_subgroup, validate_in_context, FieldContext, GroupSymbol, PlVariant,
};

pub const MAX_VERTICES: usize = 8;
pub const MAX_GENUS: usize = 3;

fn random_ctx(rng: &mut impl Rng) -> FieldContext {
    match rng.gen_range(0..10) {
        0..=5 => {
            let p = *[2u64, 3, 5, 7].choose(rng).expect("non-empty");
            FieldContext::char_p(p, rng.gen_range(1..=4)).expect("valid context")
        }
        6..=8 => {
            let p = *[7u64, 11, 13].choose(rng).expect("non-empty");
            FieldContext::char_zero(p, rng.gen_range(1..=3)).expect("valid context")
        }
        _ => FieldContext::char_zero(5, rng.gen_range(1..=3)).expect("valid context"),
    }
}

/// Every group with a catalog tree in `ctx` among small candidates.
pub fn group_pool(ctx: &FieldContext, catalog: &Catalog) -> Vec<GroupSymbol> {
    let mut cands = vec![
        GroupSymbol::TRIVIAL,
        GroupSymbol::TETRAHEDRAL,
        GroupSymbol::OCTAHEDRAL,
        GroupSymbol::ICOSAHEDRAL,
    ];
    cands.extend((2..=24).filter_map(|n| GroupSymbol::cyclic(n).ok()));
    cands.extend((2..=30).filter_map(|n| GroupSymbol::dihedral(n).ok()));
    if !ctx.is_char_zero() {
        for t in 1..=ctx.m() {
            let q = ctx.power(t).expect("small power");
            for n in (1..q).filter(|n| (q - 1) % n == 0) {
                cands.extend(GroupSymbol::borel(t, n).ok());
            }
            for variant in [PlVariant::Pgl, PlVariant::Psl] {
                cands.extend(GroupSymbol::proj_linear(variant, t).ok());
            }
        }
    }
    cands.sort();
    cands.dedup();
    cands
        .into_iter()
        .filter(|g| validate_in_context(g, ctx).is_ok() && catalog.elementary_tree(g, ctx).is_ok())
        .collect()
}

struct Growth {
    input: InputGraphOfGroups,
    used: BTreeSet<(usize, String)>,
}

fn free_traces(
    traces: Vec<AttachmentTrace>,
    used: &BTreeSet<(usize, String)>,
    v: usize,
) -> Vec<AttachmentTrace> {
    traces
        .into_iter()
        .filter(|t| {
            t.occupied_sites()
                .iter()
                .all(|s| !used.contains(&(v, s.clone())))
        })
        .collect()
}

fn hint_for(all: usize, t: &AttachmentTrace) -> Option<String> {
    if all > 1 {
        t.site.clone()
    } else {
        None
    }
}

fn claim(used: &mut BTreeSet<(usize, String)>, v: usize, t: &AttachmentTrace) {
    for s in t.occupied_sites() {
        used.insert((v, s));
    }
}

/// Try to hang a new vertex off `u` by a non-trivial edge.
fn grow_nontrivial(
    rng: &mut impl Rng,
    g: &mut Growth,
    u: usize,
    pool: &[GroupSymbol],
    catalog: &Catalog,
) -> bool {
    let ctx = g.input.ctx;
    let gu = g.input.vertices[u].group;
    let mut options = Vec::new();
    for h in pool
        .iter()
        .filter(|h| !h.is_trivial() && catalog.is_edge_capable(h, &ctx))
    {
        if !is_subgroup(h, &gu, &ctx) {
            continue;
        }
        let Ok(tu_all) = catalog.attachment_traces(h, &gu, &ctx) else {
            continue;
        };
        let n_u = tu_all.len();
        let tu = free_traces(tu_all, &g.used, u);
        if tu.is_empty() {
            continue;
        }
        // one-cusped edge groups only join copies of themselves
        let one_cusped = h.borel_form().is_some_and(|(t, n)| t > 0 && n == 1);
        if one_cusped && gu != *h {
            continue;
        }
        for gw in pool
            .iter()
            .filter(|gw| is_subgroup(h, gw, &ctx) && (!one_cusped || *gw == h))
        {
            let Ok(tw) = catalog.attachment_traces(h, gw, &ctx) else {
                continue;
            };
            if tw.is_empty() {
                continue;
            }
            options.push((*h, *gw, n_u, tu.clone(), tw));
        }
    }
    // non-cyclic edge groups with explicit gluings are rare among the options
    let rare: Vec<_> = options
        .iter()
        .filter(|o| !o.0.is_borel_form())
        .cloned()
        .collect();
    let pick = if !rare.is_empty() && rng.gen_bool(0.5) {
        rare.choose(rng).cloned()
    } else {
        options.choose(rng).cloned()
    };
    let Some((h, gw, n_u, tu, tw)) = pick else {
        return false;
    };
    let a = tu.choose(rng).expect("non-empty").clone();
    let b = tw.choose(rng).expect("non-empty").clone();
    let w = g.input.vertices.len();
    g.input.vertices.push(InputVertex {
        id: format!("v{w}"),
        group: gw,
    });
    let group = if rng.gen_bool(0.3) && derive_edge_group(&gu, &gw, &ctx).ok() == Some(h) {
        EdgeGroupSpec::Derive
    } else {
        EdgeGroupSpec::Given(h)
    };
    claim(&mut g.used, u, &a);
    claim(&mut g.used, w, &b);
    let k = g.input.edges.len();
    g.input.edges.push(InputEdge {
        id: format!("e{k}"),
        from: format!("v{u}"),
        to: format!("v{w}"),
        group,
        site_hints: SiteHints {
            from: hint_for(n_u, &a),
            to: hint_for(tw.len(), &b),
        },
    });
    true
}

fn grow_trivial(rng: &mut impl Rng, g: &mut Growth, u: usize, pool: &[GroupSymbol]) {
    let w = g.input.vertices.len();
    g.input.vertices.push(InputVertex {
        id: format!("v{w}"),
        group: *pool.choose(rng).expect("non-empty pool"),
    });
    let k = g.input.edges.len();
    g.input.edges.push(InputEdge {
        id: format!("e{k}"),
        from: format!("v{u}"),
        to: format!("v{w}"),
        group: EdgeGroupSpec::Given(GroupSymbol::TRIVIAL),
        site_hints: SiteHints::default(),
    });
}

fn attempt(rng: &mut impl Rng, catalog: &Catalog) -> InputGraphOfGroups {
    let ctx = random_ctx(rng);
    let pool = group_pool(&ctx, catalog);
    // seed from the groups carrying explicit non-cyclic edge gluings
    let printed: Vec<GroupSymbol> = pool
        .iter()
        .copied()
        .filter(|g| {
            !g.is_cyclic()
                && catalog.elementary_tree(g, &ctx).is_ok_and(|t| {
                    t.vertices.len() > 1 || t.cusps.iter().any(|c| c.marked_point.is_some())
                })
        })
        .collect();
    let first = if ctx.is_char_zero() && !printed.is_empty() && rng.gen_bool(0.5) {
        *printed.choose(rng).expect("non-empty")
    } else {
        *pool.choose(rng).expect("non-empty pool")
    };
    let mut g = Growth {
        input: InputGraphOfGroups {
            ctx,
            vertices: vec![InputVertex {
                id: "v0".into(),
                group: first,
            }],
            edges: Vec::new(),
            genus_edges: Vec::new(),
        },
        used: BTreeSet::new(),
    };
    let target = rng.gen_range(1..=MAX_VERTICES);
    while g.input.vertices.len() < target {
        let u = rng.gen_range(0..g.input.vertices.len());
        if !rng.gen_bool(0.2) {
            let (input, used) = (g.input.clone(), g.used.clone());
            if grow_nontrivial(rng, &mut g, u, &pool, catalog) {
                if validate_input(&g.input, catalog).is_ok() {
                    continue;
                }
                g.input = input;
                g.used = used;
            }
        }
        grow_trivial(rng, &mut g, u, &pool);
    }
    let n = g.input.vertices.len();
    for k in 0..rng.gen_range(0..=MAX_GENUS) {
        g.input.genus_edges.push(GenusEdge {
            id: format!("g{k}"),
            from: format!("v{}", rng.gen_range(0..n)),
            to: format!("v{}", rng.gen_range(0..n)),
            group: None,
        });
    }
    g.input
}

/// One random admissible input. Candidates that fail validation are
/// discarded and redrawn.
pub fn random_input(rng: &mut impl Rng, catalog: &Catalog) -> InputGraphOfGroups {
    loop {
        let input = attempt(rng, catalog);
        if validate_input(&input, catalog).is_ok() {
            return input;
        }
    }
}

/// A reproducible corpus of `count` admissible inputs.
pub fn corpus(seed: u64, count: usize, catalog: &Catalog) -> Vec<InputGraphOfGroups> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| random_input(&mut rng, catalog))
        .collect()
}
