use rfmeasure::estimators::log_mass;
use rfmeasure::miner::THRESHOLD_SLACK;
use rfmeasure::reactive::CompiledRf;
use rfmeasure::{
    discover, p_rf_log, p_spec_log, parse_sweep, threshold_sweep, Execution, MinerConfig, SpecDoc,
    SpecMode, Template,
};
use rfmeasure_testkit::{log_from, random_log, rng, running_log, SKEWED_LOG, WHOLE_VS_PARTS_LOG};

fn all_templates(threshold: f64) -> MinerConfig {
    MinerConfig::new(Template::ALL.to_vec(), threshold).unwrap()
}

#[test]
fn every_kept_rule_passes_on_recheck() {
    let log = running_log();
    for th in [0.0, 0.3, 0.6, 0.8, 1.0] {
        let r = discover(&log, &all_templates(th), Execution::Parallel).unwrap();
        for rule in &r.rules {
            for rf in &rule.rfs {
                let m = log_mass(
                    &CompiledRf::new(&rf.activator, &rf.target),
                    &log,
                    Execution::Sequential,
                );
                assert!(m.mx > 0.0);
                assert!(
                    p_rf_log(rf, &log) >= th - THRESHOLD_SLACK,
                    "{} at {th}",
                    rule.label
                );
            }
        }
    }
}

#[test]
fn discovery_is_deterministic_across_execution_modes() {
    let mut r = rng(21);
    let log = random_log(&mut r, 30, 12, 4, &["a", "b", "c", "d", "e"]);
    let seq = discover(&log, &all_templates(0.4), Execution::Sequential).unwrap();
    let par = discover(&log, &all_templates(0.4), Execution::Parallel).unwrap();
    assert_eq!(seq, par);
}

#[test]
fn skewed_activations_sweep_row() {
    let log = log_from(SKEWED_LOG);
    let cfg = MinerConfig::new(vec![Template::Response], 0.5).unwrap();
    let r = discover(&log, &cfg, Execution::Sequential).unwrap();
    let labels: Vec<&str> = r.rules.iter().map(|x| x.label.as_str()).collect();
    assert_eq!(labels, ["Response(a,b)", "Response(c,d)"]);
    let rows = threshold_sweep(&log, &cfg, &[0.5], Execution::Sequential).unwrap();
    assert_eq!(rows[0].rule_count, 2);
    assert_eq!(rows[0].spec_confidence, 101.0 / 102.0);
    assert_eq!(rows[0].mean_rule_confidence, 0.75);
}

#[test]
fn whole_specification_can_fall_below_the_threshold() {
    let log = log_from(WHOLE_VS_PARTS_LOG);
    let cfg = MinerConfig::new(vec![Template::Response], 0.9).unwrap();
    let r = discover(&log, &cfg, Execution::Sequential).unwrap();
    let labels: Vec<&str> = r.rules.iter().map(|x| x.label.as_str()).collect();
    assert_eq!(labels, ["Response(a,b)", "Response(a,c)"]);
    assert!(r
        .rules
        .iter()
        .all(|x| x.confidence >= 0.9 - THRESHOLD_SLACK));
    let s = r.specification("mined").unwrap();
    let whole = p_spec_log(&s, &log, SpecMode::Table);
    assert!(whole < 0.9, "{whole}");
    assert!((whole - 0.8).abs() < 1e-12);
}

#[test]
fn mined_spec_file_round_trips() {
    let log = running_log();
    let r = discover(&log, &all_templates(0.8), Execution::Parallel).unwrap();
    let doc = SpecDoc::from_discovery("mined", &r);
    let again = SpecDoc::parse(&doc.to_json()).unwrap();
    assert_eq!(again, doc);
    assert_eq!(
        again.to_specification("x").unwrap(),
        r.specification("mined").unwrap()
    );
}

#[test]
fn empty_result_serializes_explicitly() {
    let mut r = rng(8);
    let log = random_log(&mut r, 40, 15, 3, &["a", "b", "c", "d", "e", "f"]);
    let cfg = MinerConfig::new(vec![Template::Response, Template::ChainResponse], 1.0).unwrap();
    let res = discover(&log, &cfg, Execution::Parallel).unwrap();
    assert!(res.is_empty());
    let json = SpecDoc::from_discovery("mined", &res).to_json();
    assert!(json.contains("\"rules\": []"), "{json}");
}

#[test]
fn sweep_has_one_row_per_threshold() {
    let rows = threshold_sweep(
        &running_log(),
        &all_templates(0.0),
        &parse_sweep("0:1:0.05").unwrap(),
        Execution::Parallel,
    )
    .unwrap();
    assert_eq!(rows.len(), 21);
    assert!(rows.windows(2).all(|w| w[0].rule_count >= w[1].rule_count));
}
