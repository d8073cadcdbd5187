//! Report assembly and serialization.
//!
//! JSON keeps full precision and writes non-finite numbers as the string
//! `"NaN"`. CSV uses 6 decimals and the bare token `NaN`.

use serde::Serialize;
use serde_json::{json, Value};

use crate::drift::{SeriesStats, WindowSeries};
use crate::estimators::{log_counts, JointMass};
use crate::logmodel::EventLog;
use crate::measures::{compute_all, Measure, MeasureValue, ProbabilityBundle, Scope};
use crate::miner::SweepRow;
use crate::parallel::Execution;
use crate::reactive::CompiledRf;
use crate::specification::{CompiledSpec, SpecMode, Specification};

pub const TOOL: &str = "rfmeasure";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RowKind {
    Rule,
    Specification,
}

impl RowKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RowKind::Rule => "rule",
            RowKind::Specification => "specification",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub subject: String,
    pub kind: RowKind,
    /// `log`, or `t1`, `t2`, ... for unique traces in log order.
    pub scope: String,
    pub bundle: ProbabilityBundle,
    pub values: Vec<MeasureValue>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureReport {
    pub specification: String,
    pub mode: SpecMode,
    pub measures: Vec<Measure>,
    pub rows: Vec<ReportRow>,
}

/// Trace id used in reports for the `k`-th unique trace (0-based).
pub fn trace_id(k: usize) -> String {
    format!("t{}", k + 1)
}

fn rows_for(
    subject: &str,
    kind: RowKind,
    pair: &CompiledRf,
    log: &EventLog,
    measures: &[Measure],
    per_trace: bool,
    exec: Execution,
) -> (Vec<ReportRow>, ReportRow) {
    let counts = log_counts(pair, log, exec);
    let row = |scope: String, mass: &JointMass, s: Scope| {
        let bundle = ProbabilityBundle::from_mass(mass, s);
        ReportRow {
            subject: subject.to_string(),
            kind,
            scope,
            values: compute_all(measures, &bundle),
            bundle,
        }
    };
    let traces = if per_trace {
        counts
            .iter()
            .enumerate()
            .map(|(k, c)| row(trace_id(k), &JointMass::trace(c), Scope::Trace))
            .collect()
    } else {
        Vec::new()
    };
    let mass = JointMass::log(
        counts
            .iter()
            .zip(log.entries().iter().map(|e| e.multiplicity)),
    );
    (traces, row("log".into(), &mass, Scope::Log))
}

/// Rows for every rule, then the whole specification. With `per_trace`, trace
/// rows (rules then specification, per trace) precede the log rows.
pub fn build_report(
    s: &Specification,
    log: &EventLog,
    measures: &[Measure],
    mode: SpecMode,
    per_trace: bool,
    exec: Execution,
) -> MeasureReport {
    let mut subjects: Vec<(String, RowKind, CompiledRf)> = s
        .rfs()
        .iter()
        .map(|rf| {
            (
                rf.name.clone(),
                RowKind::Rule,
                CompiledRf::new(&rf.activator, &rf.target),
            )
        })
        .collect();
    subjects.push((
        s.name().to_string(),
        RowKind::Specification,
        CompiledSpec::new(s, mode).pair().clone(),
    ));
    let mut trace_rows: Vec<Vec<ReportRow>> = Vec::new();
    let mut log_rows = Vec::new();
    for (name, kind, pair) in &subjects {
        let (t, l) = rows_for(name, *kind, pair, log, measures, per_trace, exec);
        trace_rows.push(t);
        log_rows.push(l);
    }
    let mut rows = Vec::new();
    for k in 0..log.entries().len() * usize::from(per_trace) {
        for t in &trace_rows {
            rows.push(t[k].clone());
        }
    }
    rows.extend(log_rows);
    MeasureReport {
        specification: s.name().to_string(),
        mode,
        measures: measures.to_vec(),
        rows,
    }
}

/// JSON number, or `"NaN"` for non-finite values.
pub fn json_number(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or_else(|| Value::String("NaN".into()), Value::Number)
}

/// Six decimals, `NaN` for non-finite values, no negative zero.
pub fn fixed6(x: f64) -> String {
    if !x.is_finite() {
        "NaN".into()
    } else if x == 0.0 {
        "0.000000".into()
    } else {
        let s = format!("{x:.6}");
        if s == "-0.000000" {
            "0.000000".into()
        } else {
            s
        }
    }
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

fn csv_string(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}

fn bundle_json(b: &ProbabilityBundle) -> Value {
    json!({
        "p_activator": json_number(b.p_a),
        "p_target": json_number(b.p_t),
        "p_activator_target": json_number(b.p_at),
        "p_activator_not_target": json_number(b.p_a_not_t),
        "p_not_activator_target": json_number(b.p_not_a_t),
        "p_not_activator_not_target": json_number(b.p_not_a_not_t),
        "p_target_given_activator": json_number(b.p_t_given_a),
        "p_activator_given_target": json_number(b.p_a_given_t),
    })
}

impl MeasureReport {
    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                json!({
                    "subject": r.subject,
                    "kind": r.kind.as_str(),
                    "scope": r.scope,
                    "probabilities": bundle_json(&r.bundle),
                    "values": r.values.iter().map(|v| json!({
                        "measure": v.measure.key(),
                        "raw": json_number(v.raw),
                        "normalized": json_number(v.normalized),
                    })).collect::<Vec<_>>(),
                })
            })
            .collect();
        pretty(&json!({
            "tool": TOOL,
            "version": VERSION,
            "specification": self.specification,
            "mode": self.mode.as_str(),
            "measures": self.measures.iter().map(|m| m.key()).collect::<Vec<_>>(),
            "rows": rows,
        }))
    }

    /// Long format: one line per row and measure.
    pub fn to_csv(&self) -> String {
        csv_string(
            &["subject", "kind", "scope", "measure", "raw", "normalized"],
            self.rows.iter().flat_map(|r| {
                r.values.iter().map(move |v| {
                    vec![
                        r.subject.clone(),
                        r.kind.as_str().to_string(),
                        r.scope.clone(),
                        v.measure.key().to_string(),
                        fixed6(v.raw),
                        fixed6(v.normalized),
                    ]
                })
            }),
        )
    }

    /// Value of `measure` on the row with this subject and scope.
    pub fn value(&self, subject: &str, scope: &str, measure: Measure) -> Option<MeasureValue> {
        self.rows
            .iter()
            .find(|r| r.subject == subject && r.scope == scope)?
            .values
            .iter()
            .find(|v| v.measure == measure)
            .copied()
    }
}

fn window_start_text(series: &WindowSeries, w: usize) -> String {
    let s = &series.starts[w];
    s.timestamp
        .map_or_else(|| s.first_case.clone(), |t| t.to_rfc3339())
}

/// `window_index,window_start,measure,value`. The start is the first case's
/// timestamp, or its case id when the log has no timestamps.
pub fn series_csv(series: &WindowSeries) -> String {
    let mut rows = Vec::new();
    for w in 0..series.starts.len() {
        for (m, vals) in series.measures.iter().zip(&series.values) {
            rows.push(vec![
                series.starts[w].index.to_string(),
                window_start_text(series, w),
                m.key().to_string(),
                fixed6(vals[w]),
            ]);
        }
    }
    csv_string(&["window_index", "window_start", "measure", "value"], rows)
}

pub fn stats_csv(stats: &[SeriesStats]) -> String {
    csv_string(
        &["measure", "mean", "std_dev", "cv", "count", "excluded"],
        stats.iter().map(|s| {
            vec![
                s.measure.key().to_string(),
                fixed6(s.mean),
                fixed6(s.std_dev),
                fixed6(s.cv),
                s.count.to_string(),
                s.excluded.to_string(),
            ]
        }),
    )
}

fn stats_json(stats: &[SeriesStats]) -> Vec<Value> {
    stats
        .iter()
        .map(|s| {
            json!({
                "measure": s.measure.key(),
                "mean": json_number(s.mean),
                "std_dev": json_number(s.std_dev),
                "cv": json_number(s.cv),
                "count": s.count,
                "excluded": s.excluded,
            })
        })
        .collect()
}

pub fn series_json(series: &WindowSeries, stats: &[SeriesStats], dropped: usize) -> String {
    let windows: Vec<Value> = series
        .starts
        .iter()
        .map(|s| {
            json!({
                "index": s.index,
                "offset": s.offset,
                "first_case": s.first_case,
                "timestamp": s.timestamp.map(|t| t.to_rfc3339()),
            })
        })
        .collect();
    let values: Vec<Value> = series
        .measures
        .iter()
        .zip(&series.values)
        .map(|(m, v)| {
            json!({
                "measure": m.key(),
                "values": v.iter().map(|&x| json_number(x)).collect::<Vec<_>>(),
            })
        })
        .collect();
    pretty(&json!({
        "tool": TOOL,
        "version": VERSION,
        "normalized": series.normalized,
        "dropped_cases": dropped,
        "windows": windows,
        "series": values,
        "stats": stats_json(stats),
    }))
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    csv_string(
        &[
            "threshold",
            "rule_count",
            "spec_confidence",
            "mean_rule_confidence",
        ],
        rows.iter().map(|r| {
            vec![
                fixed6(r.threshold),
                r.rule_count.to_string(),
                fixed6(r.spec_confidence),
                fixed6(r.mean_rule_confidence),
            ]
        }),
    )
}
