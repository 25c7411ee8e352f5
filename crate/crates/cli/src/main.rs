use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use gedmine::deps::{ApproxMode, Threshold};
use gedmine::matcher::DEFAULT_MATCH_CAP;
use gedmine::miner::DEFAULT_MAX_EDGES;
use gedmine::pipeline::{run, RunConfig};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    /// Test the error bound only where the cover search gets stuck.
    Leaf,
    /// Test it at every search node; yields minimal approximate rules.
    Eager,
}

/// Mine approximate graph entity dependencies from a property graph.
#[derive(Debug, Parser)]
#[command(name = "gedmine", version)]
struct Args {
    /// Node file: `id<TAB>label[<TAB>attr=value;...]` per line.
    #[arg(long)]
    nodes: PathBuf,
    /// Edge file: `src<TAB>label<TAB>dst` per line.
    #[arg(long)]
    edges: PathBuf,
    /// Minimum MNI support of a pattern.
    #[arg(long, default_value_t = 2)]
    tau: usize,
    /// Error bound in [0, 1], as a decimal.
    #[arg(long, default_value = "0")]
    epsilon: Threshold,
    /// Largest mined pattern, in edges.
    #[arg(long, default_value_t = DEFAULT_MAX_EDGES)]
    max_edges: usize,
    /// Largest rule LHS; 0 for no limit.
    #[arg(long, default_value_t = 0)]
    max_lhs_size: usize,
    #[arg(long, value_enum, default_value_t = Mode::Leaf)]
    approx_mode: Mode,
    /// Matches a constant must occur in to become a literal.
    #[arg(long, default_value_t = 2)]
    min_const_support: usize,
    /// Also relate attributes of differently labeled variables.
    #[arg(long)]
    cross_kind: bool,
    /// Enumerate one match per orbit of interchangeable variables.
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    symmetry_breaking: bool,
    /// Abort when a pattern has more matches than this.
    #[arg(long, default_value_t = DEFAULT_MATCH_CAP)]
    match_cap: usize,
    /// Use the patterns in this file instead of mining them.
    #[arg(long)]
    patterns: Option<PathBuf>,
    /// Only use the k attributes present on the most nodes.
    #[arg(long)]
    attr_limit: Option<usize>,
    /// Rule output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Re-check every emitted rule by direct evaluation.
    #[arg(long)]
    verify: bool,
    /// Print phase timings and counts to stderr.
    #[arg(long)]
    report_timing: bool,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    workers: Option<usize>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("AGED_LOG", "warn")).init();
    let args = match Args::try_parse() {
        Ok(args) => args,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let mut config = RunConfig::new(args.nodes, args.edges);
    config.patterns = args.patterns;
    config.tau = args.tau;
    config.epsilon = args.epsilon;
    config.max_edges = args.max_edges;
    config.max_lhs_size = args.max_lhs_size;
    config.approx_mode = match args.approx_mode {
        Mode::Leaf => ApproxMode::Leaf,
        Mode::Eager => ApproxMode::Eager,
    };
    config.min_const_support = args.min_const_support;
    config.cross_kind = args.cross_kind;
    config.symmetry_breaking = args.symmetry_breaking;
    config.match_cap = args.match_cap;
    config.attr_limit = args.attr_limit;
    config.out = args.out;
    config.verify = args.verify;
    if let Some(w) = args.workers {
        config.workers = w;
    }

    match run(&config) {
        Ok(report) => {
            if args.report_timing {
                eprintln!("{report}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("gedmine: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
