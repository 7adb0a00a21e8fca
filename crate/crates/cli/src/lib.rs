//! Batch driver: parse a graph-of-groups file, realize its Kato graph, run
//! every analysis and render a text report plus DOT diagrams.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use kato_core::analysis::{
    branch_points, census, contract, count_cusps_direct, cusp_count_char0, cusp_count_general,
    is_ordinary, separation_plan, structural_check, QuotientSkeleton,
};
use kato_core::catalog::Catalog;
use kato_core::graph::{GenusEdge, InputEdge, InputVertex};
use kato_core::{realize_unchecked, validate_input, FieldContext, InputGraphOfGroups, KatoGraph};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Exit statuses of a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok = 0,
    Failure = 1,
    Invalid = 2,
}

impl Status {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{path}: line {line} column {column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{0}")]
    Catalog(#[from] kato_core::CatalogError),
}

/// The input file as written: a graph of groups plus an optional catalog
/// extension path, relative to the file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub field: FieldContext,
    pub vertices: Vec<InputVertex>,
    #[serde(default)]
    pub edges: Vec<InputEdge>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub genus_edges: Vec<GenusEdge>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub catalog_extension: Option<String>,
}

impl SpecFile {
    pub fn graph(&self) -> InputGraphOfGroups {
        InputGraphOfGroups {
            ctx: self.field,
            vertices: self.vertices.clone(),
            edges: self.edges.clone(),
            genus_edges: self.genus_edges.clone(),
        }
    }
}

pub fn parse_spec_str(text: &str, path: &str) -> Result<SpecFile, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Parse {
        path: path.to_owned(),
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })
}

pub fn parse_spec(path: &Path) -> Result<SpecFile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_spec_str(&text, &path.display().to_string())
}

/// Built-in catalog, extended by the input file's catalog extension if it names one.
pub fn load_catalog(spec: &SpecFile, spec_path: &Path) -> Result<Catalog, CliError> {
    match &spec.catalog_extension {
        None => Ok(Catalog::default()),
        Some(rel) => {
            let base = spec_path.parent().unwrap_or_else(|| Path::new("."));
            Ok(Catalog::with_extension_file(&base.join(rel))?)
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Options {
    pub out: Option<PathBuf>,
    pub dot: bool,
    pub contract: bool,
    pub strict: bool,
}

/// Everything a run produces. DOT texts are present when requested.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub status: Status,
    pub report: String,
    pub graph_dot: Option<String>,
    pub skeleton_dot: Option<String>,
}

fn section(out: &mut String, title: &str) {
    let _ = writeln!(out, "== {title} ==");
}

fn render_graph(out: &mut String, g: &KatoGraph) {
    let ctx = g.ctx;
    let _ = writeln!(out, "vertices:");
    for v in &g.vertices {
        let _ = writeln!(out, "  {} {}", v.id, v.stabilizer.label(&ctx));
    }
    let _ = writeln!(out, "finite edges:");
    for e in &g.finite_edges {
        let _ = writeln!(
            out,
            "  {} {} -- {} [{}]",
            e.id,
            e.from,
            e.to,
            e.stabilizer.label(&ctx)
        );
    }
    let _ = writeln!(out, "cusps:");
    for c in &g.cusps {
        let _ = writeln!(
            out,
            "  {} at {} [{}]",
            c.id,
            c.base,
            c.stabilizer.label(&ctx)
        );
    }
    let _ = writeln!(out, "genus loops:");
    for l in &g.genus_loops {
        let _ = writeln!(out, "  {} {} -- {}", l.id, l.from, l.to);
    }
}

fn render_skeleton(out: &mut String, sk: &QuotientSkeleton) {
    let ctx = sk.ctx;
    let _ = writeln!(out, "vertices:");
    for v in &sk.vertices {
        let _ = writeln!(out, "  {} {}", v.id, v.stabilizer.label(&ctx));
    }
    let _ = writeln!(out, "edges:");
    for e in &sk.edges {
        let _ = writeln!(
            out,
            "  {} {} -- {} [{}]",
            e.id,
            e.from,
            e.to,
            e.stabilizer.label(&ctx)
        );
    }
    for l in &sk.genus_loops {
        let _ = writeln!(out, "  {} {} -- {} (genus)", l.id, l.from, l.to);
    }
    let _ = writeln!(out, "genus: {}", sk.genus);
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// DOT rendering of a Kato graph. Elements appear in ascending id order.
pub fn graph_dot(g: &KatoGraph) -> String {
    let ctx = g.ctx;
    let mut out = String::from("digraph kato {\n");
    for v in &g.vertices {
        let _ = writeln!(
            out,
            "  {} [shape=ellipse, label={}];",
            quote(&v.id),
            quote(&v.stabilizer.label(&ctx))
        );
    }
    for e in &g.finite_edges {
        let _ = writeln!(
            out,
            "  {} -> {} [dir=none, style=solid, label={}];",
            quote(&e.from),
            quote(&e.to),
            quote(&e.stabilizer.label(&ctx))
        );
    }
    for c in &g.cusps {
        let sink = format!("cusp:{}", c.id);
        let label = quote(&c.stabilizer.label(&ctx));
        let _ = writeln!(out, "  {} [shape=point, label={label}];", quote(&sink));
        let _ = writeln!(
            out,
            "  {} -> {} [label={label}];",
            quote(&c.base),
            quote(&sink)
        );
    }
    for l in &g.genus_loops {
        let _ = writeln!(
            out,
            "  {} -> {} [dir=none, style=dashed];",
            quote(&l.from),
            quote(&l.to)
        );
    }
    out.push_str("}\n");
    out
}

pub fn skeleton_dot(sk: &QuotientSkeleton) -> String {
    graph_dot(&sk.to_graph())
}

fn invalid(report: &mut String, lines: &[String]) -> RunOutput {
    section(report, "errors");
    for l in lines {
        let _ = writeln!(report, "error: {l}");
    }
    RunOutput {
        status: Status::Invalid,
        report: std::mem::take(report),
        graph_dot: None,
        skeleton_dot: None,
    }
}

/// Validate, realize and analyse a parsed input file.
pub fn run_spec(spec: &SpecFile, catalog: &Catalog, opts: &Options) -> RunOutput {
    let mut r = String::new();
    section(&mut r, "input");
    let _ = writeln!(
        r,
        "{}",
        serde_json::to_string_pretty(spec).expect("serializable")
    );
    let input = spec.graph();
    let ctx = input.ctx;
    let checked = match validate_input(&input, catalog) {
        Ok(c) => c,
        Err(vs) => {
            return invalid(
                &mut r,
                &vs.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            )
        }
    };
    let mut failures: Vec<String> = Vec::new();
    let mut warnings: Vec<String> = Vec::new();
    let graph = match realize_unchecked(&checked) {
        Ok(g) => g,
        Err(e) => {
            section(&mut r, "errors");
            let _ = writeln!(r, "error: realization failed: {e}");
            return RunOutput {
                status: Status::Failure,
                report: r,
                graph_dot: None,
                skeleton_dot: None,
            };
        }
    };
    section(&mut r, "realized graph");
    render_graph(&mut r, &graph);
    warnings.extend(graph.notes.iter().cloned());

    section(&mut r, "cusp counts");
    let direct = count_cusps_direct(&graph) as i64;
    let general = cusp_count_general(&checked);
    let cs = census(&graph);
    let rel = |a: i64, b: i64| if a == b { "=" } else { "!=" };
    if ctx.is_char_zero() {
        let c0 = cusp_count_char0(cs);
        let _ = writeln!(
            r,
            "cusps: direct {direct} {} general {general} {} char0 {c0}",
            rel(direct, general),
            rel(general, c0)
        );
        if c0 != direct {
            failures.push(format!(
                "char0 formula gives {c0}, direct count is {direct}"
            ));
        }
    } else {
        let _ = writeln!(
            r,
            "cusps: direct {direct} {} general {general}",
            rel(direct, general)
        );
    }
    let _ = writeln!(r, "census: {cs}");
    if direct != general {
        failures.push(format!(
            "general formula gives {general}, direct count is {direct}"
        ));
    }

    section(&mut r, "branch signature");
    let sig = branch_points(&graph);
    for bp in &sig.points {
        let _ = writeln!(r, "  {} [{}] @ {}", bp.id, bp.group.label(&ctx), bp.anchor);
    }
    section(&mut r, "ordinarity");
    match is_ordinary(&sig, &ctx) {
        Ok(v) => {
            let _ = writeln!(r, "ordinary: {v}");
        }
        Err(_) => {
            let _ = writeln!(r, "ordinary: not applicable (characteristic 0)");
        }
    }

    section(&mut r, "contraction");
    let sk = contract(&graph);
    render_skeleton(&mut r, &sk);
    warnings.extend(sk.warnings.iter().cloned());

    section(&mut r, "structural check");
    let sc = structural_check(&graph, catalog);
    if sc.is_ok() {
        let _ = writeln!(r, "ok");
    }
    for v in &sc.violations {
        let _ = writeln!(r, "violation: {v}");
        failures.push(v.to_string());
    }

    section(&mut r, "separation plan");
    let plan = separation_plan(&graph);
    for c in &plan.clusters {
        let kind = match c.size {
            1 => "singlet",
            2 => "pair",
            3 => "triplet",
            _ => "oversized",
        };
        let _ = writeln!(
            r,
            "  cluster @ {}: {} ({kind})",
            c.anchor,
            c.members.join(", ")
        );
    }
    for ((a, b), d) in &plan.distances {
        let _ = writeln!(r, "  distance {a} {b}: {d}");
    }

    section(&mut r, "warnings");
    for w in &warnings {
        let _ = writeln!(r, "warning: {w}");
    }
    if opts.strict && !warnings.is_empty() {
        failures.push(format!("{} warnings with --strict", warnings.len()));
    }
    section(&mut r, "result");
    for f in &failures {
        let _ = writeln!(r, "error: {f}");
    }
    let status = if failures.is_empty() {
        Status::Ok
    } else {
        Status::Failure
    };
    let _ = writeln!(r, "{}", if status == Status::Ok { "ok" } else { "failed" });
    RunOutput {
        status,
        report: r,
        graph_dot: opts.dot.then(|| graph_dot(&graph)),
        skeleton_dot: opts.contract.then(|| skeleton_dot(&sk)),
    }
}

/// Parse and run an input file. Parse and catalog errors map to `Status::Invalid`.
pub fn run_file(path: &Path, opts: &Options) -> RunOutput {
    let loaded = parse_spec(path).and_then(|spec| {
        let cat = load_catalog(&spec, path)?;
        Ok((spec, cat))
    });
    match loaded {
        Ok((spec, cat)) => run_spec(&spec, &cat, opts),
        Err(e) => invalid(&mut String::new(), &[e.to_string()]),
    }
}

/// The JSON between the `== input ==` header and the next section.
pub fn input_echo(report: &str) -> Option<&str> {
    let start = report.find("== input ==\n")? + "== input ==\n".len();
    let rest = &report[start..];
    let end = rest.find("\n== ").map_or(rest.len(), |i| i + 1);
    Some(&rest[..end])
}

/// Formula and structure check over a random corpus.
pub fn run_fuzz(seed: u64, count: usize) -> RunOutput {
    let cat = Catalog::default();
    let mut r = String::new();
    section(&mut r, "fuzz");
    let _ = writeln!(r, "seed {seed}, {count} inputs");
    let mut bad = 0usize;
    for (i, input) in kato_core::fuzz::corpus(seed, count, &cat)
        .iter()
        .enumerate()
    {
        let checked = validate_input(input, &cat).expect("corpus inputs validate");
        let problem = match realize_unchecked(&checked) {
            Err(e) => Some(e.to_string()),
            Ok(g) => {
                let direct = count_cusps_direct(&g) as i64;
                let general = cusp_count_general(&checked);
                if direct != general {
                    Some(format!("direct {direct} != general {general}"))
                } else if input.ctx.is_char_zero() && cusp_count_char0(census(&g)) != direct {
                    Some(format!(
                        "direct {direct} != char0 {}",
                        cusp_count_char0(census(&g))
                    ))
                } else if !structural_check(&g, &cat).is_ok() {
                    Some("structural violation".into())
                } else {
                    None
                }
            }
        };
        if let Some(p) = problem {
            bad += 1;
            let _ = writeln!(r, "input {i}: {p}");
            let _ = writeln!(
                r,
                "  {}",
                serde_json::to_string(input).expect("serializable")
            );
        }
    }
    let _ = writeln!(r, "{} of {count} inputs agree", count - bad);
    RunOutput {
        status: if bad == 0 {
            Status::Ok
        } else {
            Status::Failure
        },
        report: r,
        graph_dot: None,
        skeleton_dot: None,
    }
}

/// Write the report and diagrams into `dir`.
pub fn write_outputs(dir: &Path, out: &RunOutput) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("report.txt"), &out.report)?;
    if let Some(d) = &out.graph_dot {
        std::fs::write(dir.join("graph.dot"), d)?;
    }
    if let Some(d) = &out.skeleton_dot {
        std::fs::write(dir.join("skeleton.dot"), d)?;
    }
    Ok(())
}
