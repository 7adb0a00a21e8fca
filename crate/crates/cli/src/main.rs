use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use kato_cli::{run_file, run_fuzz, write_outputs, Options, Status};

/// Realize and analyse the Kato graph of a graph of groups.
#[derive(Parser, Debug)]
#[command(name = "kato", version)]
struct Args {
    /// Graph-of-groups file (JSON).
    spec: Option<PathBuf>,
    /// Write report.txt and diagrams into this directory instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Emit a DOT diagram of the realized graph.
    #[arg(long)]
    dot: bool,
    /// Emit a DOT diagram of the contracted skeleton.
    #[arg(long)]
    contract: bool,
    /// Seed for --fuzz.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Check the cusp formulas on this many random inputs.
    #[arg(long)]
    fuzz: Option<usize>,
    /// Treat warnings as failures.
    #[arg(long)]
    strict: bool,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let opts = Options {
        out: args.out.clone(),
        dot: args.dot,
        contract: args.contract,
        strict: args.strict,
    };
    let out = match (&args.spec, args.fuzz) {
        (_, Some(k)) => run_fuzz(args.seed, k),
        (Some(path), None) => run_file(path, &opts),
        (None, None) => {
            eprintln!("kato: give an input file or --fuzz K");
            return ExitCode::from(Status::Invalid.code() as u8);
        }
    };
    match &opts.out {
        Some(dir) => {
            if let Err(e) = write_outputs(dir, &out) {
                eprintln!("kato: {}: {e}", dir.display());
                return ExitCode::from(Status::Invalid.code() as u8);
            }
        }
        None => {
            print!("{}", out.report);
            for dot in [&out.graph_dot, &out.skeleton_dot].into_iter().flatten() {
                print!("{dot}");
            }
        }
    }
    ExitCode::from(out.status.code() as u8)
}
