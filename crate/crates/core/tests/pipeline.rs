use std::fs;
use std::path::PathBuf;

use gedmine::deps::*;
use gedmine::matcher::{find_homomorphisms, MatchOptions};
use gedmine::model::io::write_graph;
use gedmine::model::{GraphBuilder, GraphPattern, Label, PropertyGraph};
use gedmine::oracle::literal_holds;
use gedmine::pipeline::{emit_rules, format_rule, run, RunConfig};
use proptest::prelude::*;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn h3_config(out: PathBuf) -> RunConfig {
    let dir = fixtures().join("fig1_h3");
    let mut c = RunConfig::new(dir.join("nodes.tsv"), dir.join("edges.tsv"));
    c.patterns = Some(fixtures().join("q3.pat"));
    c.out = Some(out);
    c.workers = 2;
    c
}

#[test]
fn exact_run_contains_the_id_rule() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("rules.jsonl");
    let mut config = h3_config(out.clone());
    config.verify = true;
    let report = run(&config).unwrap();
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), report.total_rules());
    assert_eq!(report.approximate_rules, 0);
    assert!(text.lines().any(|l| l.contains(r#""pattern_name":"q3","lhs":["y.id=y'.id"],"rhs":"y.name=y'.name","e3":0,"E3":0,"matches":4,"adom":2,"mni":2,"exact":true"#)));
    assert_eq!(report.verified, Some(report.total_rules()));
}

#[test]
fn half_epsilon_adds_the_approximate_rule() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("rules.jsonl");
    let mut config = h3_config(out.clone());
    config.epsilon = "0.5".parse().unwrap();
    config.verify = true;
    run(&config).unwrap();
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.lines().any(|l| l.contains(r#""lhs":["y.year=y'.released"],"rhs":"y.name=y'.name","e3":0.5,"E3":1"#)));
}

#[test]
fn eager_mode_verifies() {
    let tmp = tempfile::tempdir().unwrap();
    let mut config = h3_config(tmp.path().join("rules.jsonl"));
    config.epsilon = "0.5".parse().unwrap();
    config.approx_mode = ApproxMode::Eager;
    config.verify = true;
    run(&config).unwrap();
}

#[test]
fn unreachable_tau_gives_an_empty_file() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("rules.jsonl");
    let dir = fixtures().join("fig1_h3");
    let mut config = RunConfig::new(dir.join("nodes.tsv"), dir.join("edges.tsv"));
    config.tau = 1000;
    config.out = Some(out.clone());
    let report = run(&config).unwrap();
    assert_eq!(report.patterns_found, 0);
    assert_eq!(fs::read_to_string(&out).unwrap(), "");
}

#[test]
fn mined_patterns_run_end_to_end() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("rules.jsonl");
    let dir = fixtures().join("fig1");
    let mut config = RunConfig::new(dir.join("nodes.tsv"), dir.join("edges.tsv"));
    config.out = Some(out);
    let report = run(&config).unwrap();
    let names: Vec<&str> = report.patterns.iter().map(|p| p.serialized.as_str()).collect();
    assert_eq!(names, vec!["v0:company,v1:product|v0-[create]->v1"]);
    assert_eq!(report.patterns[0].matches, 8);
    assert_eq!(report.patterns[0].mni, 4);
}

#[test]
fn error_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let mut bad_tau = h3_config(tmp.path().join("r"));
    bad_tau.tau = 0;
    assert_eq!(run(&bad_tau).unwrap_err().exit_code(), 2);

    let mut missing = h3_config(tmp.path().join("r"));
    missing.nodes = tmp.path().join("absent.tsv");
    assert_eq!(run(&missing).unwrap_err().exit_code(), 3);

    let mut capped = h3_config(tmp.path().join("r"));
    capped.match_cap = 2;
    assert_eq!(run(&capped).unwrap_err().exit_code(), 4);
}

#[test]
fn empty_rule_list_writes_an_empty_file() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("none.jsonl");
    emit_rules(&[], &out).unwrap();
    assert_eq!(fs::read(&out).unwrap(), b"");
}

#[test]
fn json_escaping() {
    let p = GraphPattern::new("p", vec![("x".into(), Label::new("a").unwrap())], vec![]).unwrap();
    let rule = DiscoveredRule {
        pattern: p.into(),
        lhs: vec![],
        rhs: Item::constant("x", "q", "say \"hi\""),
        error: ErrorReport::new(0, 3, 0),
        exact: true,
        support: 3,
    };
    let line = format_rule(&rule);
    let parsed: serde_json::Value = serde_json::from_str(&line).unwrap();
    assert_eq!(parsed["rhs"], "x.q=say \"hi\"");
    assert_eq!(parsed["e3"], 0);
}

#[test]
fn identical_output_across_worker_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = fixtures().join("fig1_h3");
    let outputs: Vec<String> = [1, 8]
        .iter()
        .map(|&w| {
            let out = tmp.path().join(format!("w{w}.jsonl"));
            let mut c = RunConfig::new(dir.join("nodes.tsv"), dir.join("edges.tsv"));
            c.tau = 1;
            c.epsilon = "0.3".parse().unwrap();
            c.min_const_support = 1;
            c.workers = w;
            c.out = Some(out.clone());
            run(&c).unwrap();
            fs::read_to_string(out).unwrap()
        })
        .collect();
    assert!(!outputs[0].is_empty());
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn graph_files_round_trip() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = fixtures().join("fig1_h3");
    let g = gedmine::model::io::load_graph(&dir.join("nodes.tsv"), &dir.join("edges.tsv")).unwrap();
    let (n, e) = (tmp.path().join("n.tsv"), tmp.path().join("e.tsv"));
    write_graph(&g, &n, &e).unwrap();
    let back = gedmine::model::io::load_graph(&n, &e).unwrap();
    assert_eq!(g.nodes().collect::<Vec<_>>(), back.nodes().collect::<Vec<_>>());
    assert_eq!(g.edges().collect::<Vec<_>>(), back.edges().collect::<Vec<_>>());
}

/// `n` nodes labeled p or q with attributes drawn from tiny value domains,
/// so that literals agree often.
fn attributed_graph() -> impl Strategy<Value = PropertyGraph> {
    (2usize..9).prop_flat_map(|n| {
        (
            prop::collection::vec((any::<bool>(), prop::collection::vec(prop::option::of(0u8..3), 3)), n),
            prop::collection::vec((0..n, 0..n), 1..14),
        )
            .prop_map(|(nodes, edges)| {
                let mut b = GraphBuilder::new();
                for (i, (is_p, attrs)) in nodes.iter().enumerate() {
                    let attrs: Vec<(String, String)> = attrs
                        .iter()
                        .enumerate()
                        .filter_map(|(k, v)| v.map(|v| (format!("k{k}"), format!("{v}"))))
                        .collect();
                    b.add_node(i as u64, if *is_p { "p" } else { "q" }, attrs).unwrap();
                }
                for (s, d) in edges {
                    b.add_edge(s as u64, "r", d as u64).unwrap();
                }
                b.build()
            })
    })
}

fn fork() -> GraphPattern {
    let l = |s: &str| Label::new(s).unwrap();
    GraphPattern::new(
        "fork",
        vec![("x".into(), l("*")), ("y".into(), l("*")), ("z".into(), l("*"))],
        vec![("x".into(), l("r"), "y".into()), ("x".into(), l("r"), "z".into())],
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn relation_bits_agree_with_literals(g in attributed_graph(), cross in any::<bool>()) {
        let p = fork();
        let h = find_homomorphisms(&p, &g, MatchOptions::default()).unwrap();
        prop_assume!(!h.is_empty());
        let config = ItemConfig { min_const_support: 1, cross_kind: cross, attributes: None };
        let universe = build_items(&p, &h, &g, &config).unwrap();
        let relation = build_binary_relation(universe, &h, &g);
        let d = compute_disagree_and_necessary(&relation);
        for (i, m) in h.iter().enumerate() {
            for (a, item) in relation.universe().items().iter().enumerate() {
                let holds = literal_holds(item, &p, m, &g);
                prop_assert_eq!(relation.bit(i, a), holds);
                prop_assert_eq!(d.of_match(i).contains(a), !holds);
            }
        }
    }

    #[test]
    fn mined_rules_are_sound(g in attributed_graph(), eager in any::<bool>(), eps in prop_oneof![Just("0"), Just("0.34")]) {
        let p = fork();
        let h = find_homomorphisms(&p, &g, MatchOptions::default()).unwrap();
        prop_assume!(!h.is_empty());
        let epsilon: Threshold = eps.parse().unwrap();
        let config = DepConfig {
            items: ItemConfig { min_const_support: 1, cross_kind: true, attributes: None },
            search: SearchParams {
                epsilon,
                mode: if eager { ApproxMode::Eager } else { ApproxMode::Leaf },
                max_lhs_size: None,
            },
        };
        let rules = mine_dependencies(&p, &h, &g, &config).unwrap();
        for r in &rules {
            prop_assert!(!is_trivial(&r.lhs, &r.rhs));
            prop_assert!(!r.lhs.contains(&r.rhs));
            let violations = h
                .iter()
                .filter(|m| r.lhs.iter().all(|i| literal_holds(i, &p, m, &g)) && !literal_holds(&r.rhs, &p, m, &g))
                .count() as u64;
            prop_assert_eq!(violations, r.error.violations);
            prop_assert!(epsilon.admits(&r.error));
            prop_assert_eq!(r.exact, violations == 0);
            for other in &rules {
                if other != r && other.rhs == r.rhs {
                    prop_assert!(!other.lhs.iter().all(|i| r.lhs.contains(i)));
                }
            }
        }
        let reduced = reduce_rules(rules.clone());
        prop_assert_eq!(reduced, rules);
    }
}
