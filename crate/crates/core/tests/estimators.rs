use proptest::prelude::*;
use rfmeasure::estimators::{log_mass, JointCounts};
use rfmeasure::reactive::CompiledRf;
use rfmeasure::{
    label_formula, p_cond_log, p_cond_trace, p_joint_log, p_joint_trace, p_log, p_trace, EventLog,
    Formula, Trace,
};
use rfmeasure_testkit::{formula_strategy, log_strategy, trace_strategy};

const TOL: f64 = 1e-12;

fn close(a: f64, b: f64) -> bool {
    (a.is_nan() && b.is_nan()) || (a - b).abs() <= TOL
}

fn stuttered(t: &Trace, k: usize) -> Trace {
    Trace::from_activities(t.activities().flat_map(|a| std::iter::repeat_n(a, k))).unwrap()
}

fn propositional() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        Just(Formula::atom("a")),
        Just(Formula::atom("b")),
        Just(Formula::True)
    ];
    leaf.prop_recursive(3, 16, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(f, g)| Formula::and(f, g)),
            (inner.clone(), inner).prop_map(|(f, g)| Formula::or(f, g)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn total_probability(f in formula_strategy(4, &["a", "b"]), log in log_strategy(6, 12, 9, &["a", "b", "c"])) {
        let card = log.cardinality() as f64;
        let weighted: f64 = log.entries().iter().map(|e| e.multiplicity as f64 / card * p_trace(&f, &e.trace)).sum();
        prop_assert!(close(p_log(&f, &log), weighted));
    }

    #[test]
    fn conditional_is_joint_over_marginal(
        f in formula_strategy(3, &["a", "b"]),
        g in formula_strategy(3, &["a", "b"]),
        log in log_strategy(6, 12, 9, &["a", "b", "c"]),
    ) {
        let m = p_log(&g, &log);
        let c = p_cond_log(&f, &g, &log);
        if m > 0.0 {
            prop_assert!(close(c, p_joint_log(&f, &g, &log) / m));
        } else {
            prop_assert!(c.is_nan());
        }
    }

    #[test]
    fn complement(f in formula_strategy(4, &["a", "b"]), log in log_strategy(6, 12, 9, &["a", "b", "c"])) {
        let nf = Formula::not(f.clone());
        prop_assert!(close(p_log(&nf, &log), 1.0 - p_log(&f, &log)));
        for e in log.entries() {
            prop_assert!(close(p_trace(&nf, &e.trace), 1.0 - p_trace(&f, &e.trace)));
        }
    }

    #[test]
    fn joint_table_sums_to_one(f in formula_strategy(3, &["a", "b"]), g in formula_strategy(3, &["a", "b"]), t in trace_strategy(30, &["a", "b", "c"])) {
        let c = JointCounts::from_labels(&label_formula(&f, &t), &label_formula(&g, &t));
        prop_assert_eq!(c.n11 + c.n10 + c.n01 + c.n00, t.len() as u64);
        prop_assert!(close(c.fractions().iter().sum::<f64>(), 1.0));
        prop_assert!(close(p_joint_trace(&f, &g, &t), c.n11 as f64 / t.len() as f64));
        let cond = p_cond_trace(&f, &g, &t);
        prop_assert!(cond.is_nan() || (0.0..=1.0).contains(&cond));
    }

    #[test]
    fn explosion_invariance(f in formula_strategy(3, &["a", "b"]), g in formula_strategy(3, &["a", "b"]), log in log_strategy(5, 10, 6, &["a", "b", "c"])) {
        let ex = log.exploded();
        prop_assert!(close(p_log(&f, &ex), p_log(&f, &log)));
        prop_assert!(close(p_joint_log(&f, &g, &ex), p_joint_log(&f, &g, &log)));
        prop_assert!(close(p_cond_log(&f, &g, &ex), p_cond_log(&f, &g, &log)));
    }

    #[test]
    fn length_invariance(f in propositional(), log in log_strategy(5, 10, 6, &["a", "b", "c"]), pick in 0usize..5) {
        let k = pick % log.entries().len();
        let stretched = EventLog::from_weighted(log.entries().iter().enumerate().map(|(i, e)| {
            let t = if i == k { stuttered(&e.trace, 10) } else { e.trace.clone() };
            (t, e.multiplicity)
        })).unwrap();
        prop_assert!(close(p_log(&f, &stretched), p_log(&f, &log)));
    }
}

#[test]
fn worked_values_on_running_example() {
    let log = rfmeasure_testkit::running_log();
    let c = Formula::atom("c");
    let oa = Formula::once(Formula::atom("a"));
    let t4 = &log.entries()[3].trace;
    assert_eq!(p_trace(&c, t4), 2.0 / 6.0);
    assert_eq!(p_joint_trace(&c, &oa, t4), 1.0 / 6.0);
    assert_eq!(p_cond_trace(&oa, &c, t4), 0.5);
    assert!((p_log(&c, &log) - 0.274).abs() < 0.001);
    assert!((p_joint_log(&c, &oa, &log) - 0.219).abs() < 0.001);
    // 17·3/9 + 6·1/9 + 5·4/10 + 12·2/6 over 45, and the joint likewise
    let marginal = (17.0 * 3.0 / 9.0 + 6.0 / 9.0 + 5.0 * 4.0 / 10.0 + 12.0 * 2.0 / 6.0) / 45.0;
    let joint = (17.0 * 3.0 / 9.0 + 6.0 / 9.0 + 5.0 * 3.0 / 10.0 + 12.0 / 6.0) / 45.0;
    assert!(close(p_log(&c, &log), marginal));
    assert!(close(p_cond_log(&oa, &c, &log), joint / marginal));
    assert!(close(joint / marginal, 59.0 / 74.0));
}

#[test]
fn sequential_and_parallel_reductions_agree_bitwise() {
    let log = rfmeasure_testkit::running_log();
    let pair = CompiledRf::new(
        &Formula::atom("d"),
        &Formula::eventually(Formula::atom("e")),
    );
    let s = log_mass(&pair, &log, rfmeasure::Execution::Sequential);
    let p = log_mass(&pair, &log, rfmeasure::Execution::Parallel);
    assert_eq!(s, p);
    assert_eq!(s.p_y_given_x().to_bits(), p.p_y_given_x().to_bits());
}
