//! Probabilistic measures for temporal rules over event logs.
//!
//! Formulas are LTLf with past operators, labeled over every instant of a
//! trace at once. Rules are reactive forms `activator |> target`; estimators
//! turn their labelings into probabilities and the measure catalog turns those
//! into interestingness scores, per trace, per log or per window.
//!
//! ```
//! use rfmeasure::{instantiate_template, read_text, p_rf_log};
//!
//! let log = read_text("3;a,b\n1;a,c\n".as_bytes()).unwrap();
//! let rf = instantiate_template("Response", &["a".into(), "b".into()]).unwrap().remove(0);
//! assert_eq!(p_rf_log(&rf, &log), 0.75);
//! ```

pub mod drift;
pub mod error;
pub mod estimators;
pub mod evaluator;
pub mod formula;
pub mod logmodel;
pub mod measures;
pub mod miner;
pub mod parallel;
pub mod reactive;
pub mod report;
pub mod specfile;
pub mod specification;

pub use drift::{measure_series, series_stats, slice_log, SeriesStats, Window, WindowSeries};
pub use error::{Error, Result};
pub use estimators::{
    p_cond_log, p_cond_trace, p_joint_log, p_joint_trace, p_log, p_rf_log, p_rf_trace, p_spec_log,
    p_spec_trace, p_trace, JointCounts, JointMass,
};
pub use evaluator::{eval_at, label_formula, CompiledFormula, LabelSequence};
pub use formula::{parse_formula, Formula};
pub use logmodel::{
    load_csv, load_text, load_xes, log_summary, parse_trace_string, read_text, CsvColumns, Event,
    EventLog, Trace,
};
pub use measures::{compute_measure, normalize, Measure, ProbabilityBundle, Range, Scope};
pub use miner::{discover, parse_sweep, threshold_sweep, DiscoveryResult, MinerConfig, SweepRow};
pub use parallel::Execution;
pub use reactive::{instantiate_template, label_rf, ReactiveForm, Template, TriLabel};
pub use report::{build_report, MeasureReport};
pub use specfile::{load_spec, SpecDoc};
pub use specification::{label_spec, SpecMode, Specification};
