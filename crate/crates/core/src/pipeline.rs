//! End-to-end run: load, find persistent patterns, match, mine rules per
//! pattern, reduce across patterns, emit.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use thiserror::Error;

use crate::deps::{
    format_decimal, is_trivial, mine_dependencies, reduce_rules, sort_rules, ApproxMode, DepConfig, DepError,
    DiscoveredRule, ErrorReport, Item, ItemConfig, SearchParams, Threshold,
};
use crate::matcher::{compute_mni, find_homomorphisms, MatchError, MatchOptions, MatchSet, DEFAULT_MATCH_CAP};
use crate::miner::{mine_frequent_patterns, reduce_patterns, MinedPattern, PatternSet, DEFAULT_MAX_EDGES};
use crate::model::io::{load_graph, load_patterns, LoadError};
use crate::model::PropertyGraph;
use crate::oracle::literal_holds;

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub nodes: PathBuf,
    pub edges: PathBuf,
    /// Use these patterns (filtered by support) instead of mining.
    pub patterns: Option<PathBuf>,
    pub tau: usize,
    pub epsilon: Threshold,
    pub max_edges: usize,
    /// 0 means unbounded.
    pub max_lhs_size: usize,
    pub approx_mode: ApproxMode,
    pub min_const_support: usize,
    pub cross_kind: bool,
    pub symmetry_breaking: bool,
    pub match_cap: usize,
    /// Keep only the k attributes carried by the most nodes.
    pub attr_limit: Option<usize>,
    /// Rules go to stdout when unset.
    pub out: Option<PathBuf>,
    pub verify: bool,
    pub workers: usize,
}

impl RunConfig {
    pub fn new(nodes: impl Into<PathBuf>, edges: impl Into<PathBuf>) -> Self {
        Self {
            nodes: nodes.into(),
            edges: edges.into(),
            patterns: None,
            tau: 2,
            epsilon: Threshold::ZERO,
            max_edges: DEFAULT_MAX_EDGES,
            max_lhs_size: 0,
            approx_mode: ApproxMode::Leaf,
            min_const_support: 2,
            cross_kind: false,
            symmetry_breaking: true,
            match_cap: DEFAULT_MATCH_CAP,
            attr_limit: None,
            out: None,
            verify: false,
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config: {0}")]
    Config(String),
    #[error("load: {0}")]
    Input(#[from] LoadError),
    #[error("match: {0}")]
    Resource(#[from] MatchError),
    #[error("dependencies: {0}")]
    Dependencies(#[from] DepError),
    #[error("emit: {path}: {source}")]
    Output { path: String, source: io::Error },
    #[error("verify: {0}")]
    Verify(String),
}

impl PipelineError {
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Config(_) => 2,
            PipelineError::Input(_) => 3,
            PipelineError::Resource(_) => 4,
            PipelineError::Dependencies(_) | PipelineError::Output { .. } | PipelineError::Verify(_) => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternStats {
    pub name: String,
    pub serialized: String,
    pub mni: usize,
    pub matches: usize,
    pub rules: usize,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub phases: Vec<(&'static str, Duration)>,
    pub patterns_found: usize,
    pub patterns_kept: usize,
    pub patterns: Vec<PatternStats>,
    pub exact_rules: usize,
    pub approximate_rules: usize,
    pub epsilon: Threshold,
    /// Rules re-checked, when verification ran.
    pub verified: Option<usize>,
}

impl RunReport {
    pub fn total_rules(&self) -> usize {
        self.exact_rules + self.approximate_rules
    }

    pub fn total_time(&self) -> Duration {
        self.phases.iter().map(|(_, d)| *d).sum()
    }
}

impl fmt::Display for RunReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (phase, d) in &self.phases {
            writeln!(f, "phase {phase:<13} {:>10.3} ms", d.as_secs_f64() * 1e3)?;
        }
        writeln!(f, "total               {:>10.3} ms", self.total_time().as_secs_f64() * 1e3)?;
        writeln!(f, "patterns: {} persistent, {} after reduction", self.patterns_found, self.patterns_kept)?;
        for p in &self.patterns {
            writeln!(f, "  {} [{}] mni={} matches={} rules={}", p.name, p.serialized, p.mni, p.matches, p.rules)?;
        }
        write!(
            f,
            "rules at epsilon {}: {} exact, {} approximate",
            self.epsilon, self.exact_rules, self.approximate_rules
        )?;
        if let Some(n) = self.verified {
            write!(f, "\nverified: {n} rules")?;
        }
        Ok(())
    }
}

struct Clock {
    phases: Vec<(&'static str, Duration)>,
    last: Instant,
}

impl Clock {
    fn start() -> Self {
        Self { phases: Vec::new(), last: Instant::now() }
    }

    fn lap(&mut self, phase: &'static str) {
        let now = Instant::now();
        self.phases.push((phase, now - self.last));
        log::info!("{phase} finished in {:.3?}", now - self.last);
        self.last = now;
    }
}

/// The `k` attribute names carried by the most nodes, ties by name.
pub fn most_frequent_attributes(graph: &PropertyGraph, k: usize) -> BTreeSet<String> {
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for ix in 0..graph.node_count() as u32 {
        for &(a, _) in graph.attr_syms(ix) {
            *counts.entry(graph.resolve(a)).or_default() += 1;
        }
    }
    let mut ranked: Vec<(&str, usize)> = counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
    ranked.into_iter().take(k).map(|(a, _)| a.to_string()).collect()
}

fn validate(config: &RunConfig) -> Result<(), PipelineError> {
    let bad = |m: &str| Err(PipelineError::Config(m.to_string()));
    if config.tau == 0 {
        return bad("tau must be at least 1");
    }
    if config.max_edges == 0 {
        return bad("max-edges must be at least 1");
    }
    if config.workers == 0 {
        return bad("workers must be at least 1");
    }
    if config.match_cap == 0 {
        return bad("match-cap must be at least 1");
    }
    Ok(())
}

fn persistent_patterns(config: &RunConfig, graph: &PropertyGraph) -> Result<PatternSet, PipelineError> {
    let Some(path) = &config.patterns else {
        return Ok(mine_frequent_patterns(graph, config.tau, config.max_edges));
    };
    let given = load_patterns(path)?;
    let mut names = BTreeSet::new();
    for p in &given {
        if !names.insert(p.name().to_string()) {
            return Err(PipelineError::Config(format!("duplicate pattern name `{}`", p.name())));
        }
    }
    let patterns = given
        .into_par_iter()
        .map(|pattern| {
            let support = compute_mni(&pattern, graph);
            MinedPattern { pattern, support }
        })
        .filter(|m| m.support.mni >= config.tau)
        .collect();
    Ok(PatternSet { patterns })
}

pub fn run(config: &RunConfig) -> Result<RunReport, PipelineError> {
    validate(config)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(|e| PipelineError::Config(e.to_string()))?;
    pool.install(|| run_in_pool(config))
}

fn run_in_pool(config: &RunConfig) -> Result<RunReport, PipelineError> {
    let mut clock = Clock::start();
    let graph = load_graph(&config.nodes, &config.edges)?;
    clock.lap("load");

    let found = persistent_patterns(config, &graph)?;
    let patterns_found = found.len();
    let kept = reduce_patterns(found);
    log::info!("{patterns_found} persistent patterns, {} after reduction", kept.len());
    clock.lap("patterns");

    let options = MatchOptions {
        symmetry_breaking: config.symmetry_breaking,
        cap: config.match_cap,
    };
    let matched: Vec<MatchSet> = kept
        .patterns
        .par_iter()
        .map(|m| find_homomorphisms(&m.pattern, &graph, options))
        .collect::<Result<_, _>>()?;
    clock.lap("match");

    let dep_config = DepConfig {
        items: ItemConfig {
            min_const_support: config.min_const_support,
            cross_kind: config.cross_kind,
            attributes: config.attr_limit.map(|k| most_frequent_attributes(&graph, k)),
        },
        search: SearchParams {
            epsilon: config.epsilon,
            mode: config.approx_mode,
            max_lhs_size: (config.max_lhs_size > 0).then_some(config.max_lhs_size),
        },
    };
    let per_pattern: Vec<Vec<DiscoveredRule>> = kept
        .patterns
        .par_iter()
        .zip(matched.par_iter())
        .map(|(mined, matches)| {
            if matches.is_empty() {
                return Ok(Vec::new());
            }
            let mut rules = mine_dependencies(&mined.pattern, matches, &graph, &dep_config)?;
            for r in &mut rules {
                r.support = mined.support.mni;
            }
            Ok(rules)
        })
        .collect::<Result<_, DepError>>()?;
    clock.lap("dependencies");

    let mut rules = reduce_rules(per_pattern.into_iter().flatten().collect());
    sort_rules(&mut rules);
    clock.lap("reduce_rules");

    match &config.out {
        Some(path) => emit_rules(&rules, path).map_err(|source| PipelineError::Output {
            path: path.display().to_string(),
            source,
        })?,
        None => write_rules(&rules, &mut io::stdout().lock()).map_err(|source| PipelineError::Output {
            path: "<stdout>".into(),
            source,
        })?,
    }
    clock.lap("emit");

    let verified = if config.verify {
        verify_rules(&rules, &matched, &graph, config)?;
        clock.lap("verify");
        Some(rules.len())
    } else {
        None
    };

    let patterns = kept
        .patterns
        .iter()
        .zip(&matched)
        .map(|(m, h)| PatternStats {
            name: m.pattern.name().to_string(),
            serialized: m.pattern.serialize(),
            mni: m.support.mni,
            matches: h.len(),
            rules: rules.iter().filter(|r| r.pattern.name() == m.pattern.name()).count(),
        })
        .collect();
    let exact_rules = rules.iter().filter(|r| r.exact).count();
    Ok(RunReport {
        phases: clock.phases,
        patterns_found,
        patterns_kept: kept.len(),
        patterns,
        exact_rules,
        approximate_rules: rules.len() - exact_rules,
        epsilon: config.epsilon,
        verified,
    })
}

fn json_str(s: &str) -> String {
    serde_json::to_string(s).expect("strings always serialize")
}

/// One JSON object; keys in a fixed order.
pub fn format_rule(rule: &DiscoveredRule) -> String {
    let lhs: Vec<String> = rule.lhs.iter().map(|i| json_str(&i.to_string())).collect();
    let e = &rule.error;
    format!(
        "{{\"pattern\":{},\"pattern_name\":{},\"lhs\":[{}],\"rhs\":{},\"e3\":{},\"E3\":{},\"matches\":{},\"adom\":{},\"mni\":{},\"exact\":{}}}",
        json_str(&rule.pattern.serialize()),
        json_str(rule.pattern.name()),
        lhs.join(","),
        json_str(&rule.rhs.to_string()),
        format_decimal(e.e3),
        e.violations,
        e.match_count,
        e.adom,
        rule.support,
        rule.exact
    )
}

pub fn write_rules(rules: &[DiscoveredRule], out: &mut impl Write) -> io::Result<()> {
    for rule in rules {
        writeln!(out, "{}", format_rule(rule))?;
    }
    out.flush()
}

pub fn emit_rules(rules: &[DiscoveredRule], path: &Path) -> io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_rules(rules, &mut out)
}

fn recheck(lhs: &[&Item], rhs: &Item, matches: &MatchSet, graph: &PropertyGraph) -> ErrorReport {
    let pattern = matches.pattern();
    let violations = matches
        .iter()
        .filter(|m| lhs.iter().all(|i| literal_holds(i, pattern, m, graph)) && !literal_holds(rhs, pattern, m, graph))
        .count() as u64;
    let adom = lhs.iter().map(|i| i.adom()).max().unwrap_or(0);
    ErrorReport::new(violations, matches.len() as u64, adom)
}

/// Re-evaluates each rule's error literal by literal and checks that no
/// proper subset of its LHS would have been reported instead.
fn verify_rules(
    rules: &[DiscoveredRule],
    matched: &[MatchSet],
    graph: &PropertyGraph,
    config: &RunConfig,
) -> Result<(), PipelineError> {
    let fail = |rule: &DiscoveredRule, what: String| {
        Err(PipelineError::Verify(format!("{}: {what}", format_rule(rule))))
    };
    for rule in rules {
        let Some(matches) = matched.iter().find(|m| m.pattern().name() == rule.pattern.name()) else {
            return fail(rule, "pattern has no match set".into());
        };
        let lhs: Vec<&Item> = rule.lhs.iter().collect();
        let report = recheck(&lhs, &rule.rhs, matches, graph);
        if report != rule.error {
            return fail(rule, format!("recomputed error {report:?} differs"));
        }
        if !config.epsilon.admits(&report) {
            return fail(rule, "error exceeds epsilon".into());
        }
        if is_trivial(lhs.iter().copied(), &rule.rhs) {
            return fail(rule, "rule is trivial".into());
        }
        // violations only shrink as the LHS grows, so in leaf mode the
        // one-smaller subsets decide exact minimality
        let n = lhs.len();
        let subsets: Vec<Vec<&Item>> = match config.approx_mode {
            ApproxMode::Leaf => (0..n)
                .map(|skip| (0..n).filter(|&i| i != skip).map(|i| lhs[i]).collect())
                .collect(),
            ApproxMode::Eager => (0..(1u64 << n) - 1)
                .map(|mask| (0..n).filter(|&i| mask & (1 << i) != 0).map(|i| lhs[i]).collect())
                .collect(),
        };
        for sub in subsets {
            let r = recheck(&sub, &rule.rhs, matches, graph);
            let shadows = match config.approx_mode {
                ApproxMode::Leaf => r.violations == 0,
                ApproxMode::Eager => config.epsilon.admits(&r),
            };
            if shadows && !is_trivial(sub.iter().copied(), &rule.rhs) {
                return fail(rule, format!("proper subset of size {} also qualifies", sub.len()));
            }
        }
    }
    Ok(())
}
