//! Interestingness measures over activator/target probability bundles.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimators::{div, log_mass, trace_counts, JointMass};
use crate::logmodel::{EventLog, Trace};
use crate::parallel::Execution;
use crate::reactive::{CompiledRf, ReactiveForm};
use crate::specification::{CompiledSpec, SpecMode, Specification};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Scope {
    Trace,
    Log,
}

/// Base probabilities of an activator `a` and target `t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbabilityBundle {
    pub scope: Scope,
    pub p_a: f64,
    pub p_t: f64,
    pub p_at: f64,
    pub p_a_not_t: f64,
    pub p_not_a_t: f64,
    pub p_not_a_not_t: f64,
    pub p_not_a: f64,
    pub p_not_t: f64,
    /// P(t | a)
    pub p_t_given_a: f64,
    /// P(a | t)
    pub p_a_given_t: f64,
    /// P(!t | a)
    pub p_not_t_given_a: f64,
    /// P(!t | !a)
    pub p_not_t_given_not_a: f64,
}

impl ProbabilityBundle {
    /// Conditionals are ratios of masses, so at log scope they are ratios of
    /// weighted sums and coincide bit for bit with the estimators.
    pub fn from_mass(m: &JointMass, scope: Scope) -> Self {
        let p = |x: f64| div(x, m.total);
        ProbabilityBundle {
            scope,
            p_a: p(m.mx),
            p_t: p(m.my),
            p_at: p(m.m11),
            p_a_not_t: p(m.m10),
            p_not_a_t: p(m.m01),
            p_not_a_not_t: p(m.m00),
            p_not_a: p(m.m_not_x),
            p_not_t: p(m.m_not_y),
            p_t_given_a: div(m.m11, m.mx),
            p_a_given_t: div(m.m11, m.my),
            p_not_t_given_a: div(m.m10, m.mx),
            p_not_t_given_not_a: div(m.m00, m.m_not_x),
        }
    }
}

pub fn bundle_pair_trace(pair: &CompiledRf, t: &Trace) -> ProbabilityBundle {
    ProbabilityBundle::from_mass(&JointMass::trace(&trace_counts(pair, t)), Scope::Trace)
}

pub fn bundle_pair_log(pair: &CompiledRf, log: &EventLog, exec: Execution) -> ProbabilityBundle {
    ProbabilityBundle::from_mass(&log_mass(pair, log, exec), Scope::Log)
}

pub fn bundle_rf_trace(rf: &ReactiveForm, t: &Trace) -> ProbabilityBundle {
    bundle_pair_trace(&CompiledRf::new(&rf.activator, &rf.target), t)
}

pub fn bundle_rf_log(rf: &ReactiveForm, log: &EventLog) -> ProbabilityBundle {
    bundle_pair_log(
        &CompiledRf::new(&rf.activator, &rf.target),
        log,
        Execution::default(),
    )
}

pub fn bundle_spec_trace(s: &Specification, t: &Trace, mode: SpecMode) -> ProbabilityBundle {
    bundle_pair_trace(CompiledSpec::new(s, mode).pair(), t)
}

pub fn bundle_spec_log(s: &Specification, log: &EventLog, mode: SpecMode) -> ProbabilityBundle {
    bundle_pair_log(CompiledSpec::new(s, mode).pair(), log, Execution::default())
}

/// Declared value range of a measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Range {
    /// [0, 1]
    Unit,
    /// [-1, 1]
    Symmetric,
    /// [0, +inf)
    NonNegative,
    /// (-inf, 1]
    UpToOne,
    /// (-inf, +inf)
    Real,
}

impl Range {
    pub fn contains(self, x: f64) -> bool {
        match self {
            Range::Unit => (0.0..=1.0).contains(&x),
            Range::Symmetric => (-1.0..=1.0).contains(&x),
            Range::NonNegative => x >= 0.0,
            Range::UpToOne => x <= 1.0,
            Range::Real => x.is_finite(),
        }
    }

    pub fn notation(self) -> &'static str {
        match self {
            Range::Unit => "[0,1]",
            Range::Symmetric => "[-1,1]",
            Range::NonNegative => "[0,+inf)",
            Range::UpToOne => "(-inf,1]",
            Range::Real => "(-inf,+inf)",
        }
    }
}

/// Maps a value of `range` monotonically onto [0, 1]. `NaN` stays `NaN`.
pub fn normalize(x: f64, range: Range) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    match range {
        Range::Unit => x,
        Range::Symmetric => (x + 1.0) / 2.0,
        Range::NonNegative => x / (1.0 + x),
        Range::UpToOne => 1.0 / (2.0 - x),
        Range::Real => (1.0 + x / (1.0 + x.abs())) / 2.0,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Measure {
    Support,
    Confidence,
    Recall,
    Specificity,
    Accuracy,
    Lift,
    Leverage,
    AddedValue,
    Jaccard,
    CertaintyFactor,
    Klosgen,
    Conviction,
    JMeasure,
    OneWaySupport,
    TwoWaySupport,
    PiatetskyShapiro,
    Cosine,
    Loevinger,
    InformationGain,
    SebagSchoenauer,
    LeastContradiction,
    OddMultiplier,
    ExampleCounterexampleRate,
    Zhang,
}

impl Measure {
    pub const ALL: [Measure; 24] = [
        Measure::Support,
        Measure::Confidence,
        Measure::Recall,
        Measure::Specificity,
        Measure::Accuracy,
        Measure::Lift,
        Measure::Leverage,
        Measure::AddedValue,
        Measure::Jaccard,
        Measure::CertaintyFactor,
        Measure::Klosgen,
        Measure::Conviction,
        Measure::JMeasure,
        Measure::OneWaySupport,
        Measure::TwoWaySupport,
        Measure::PiatetskyShapiro,
        Measure::Cosine,
        Measure::Loevinger,
        Measure::InformationGain,
        Measure::SebagSchoenauer,
        Measure::LeastContradiction,
        Measure::OddMultiplier,
        Measure::ExampleCounterexampleRate,
        Measure::Zhang,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Support => "Support",
            Measure::Confidence => "Confidence",
            Measure::Recall => "Recall",
            Measure::Specificity => "Specificity",
            Measure::Accuracy => "Accuracy",
            Measure::Lift => "Lift",
            Measure::Leverage => "Leverage",
            Measure::AddedValue => "Added Value",
            Measure::Jaccard => "Jaccard",
            Measure::CertaintyFactor => "Certainty Factor",
            Measure::Klosgen => "Klosgen",
            Measure::Conviction => "Conviction",
            Measure::JMeasure => "J-Measure",
            Measure::OneWaySupport => "One-Way Support",
            Measure::TwoWaySupport => "Two-Way Support",
            Measure::PiatetskyShapiro => "Piatetsky-Shapiro",
            Measure::Cosine => "Cosine",
            Measure::Loevinger => "Loevinger",
            Measure::InformationGain => "Information Gain",
            Measure::SebagSchoenauer => "Sebag-Schoenauer",
            Measure::LeastContradiction => "Least Contradiction",
            Measure::OddMultiplier => "Odd Multiplier",
            Measure::ExampleCounterexampleRate => "Example and Counterexample Rate",
            Measure::Zhang => "Zhang",
        }
    }

    /// Lower-case identifier used in reports and on the command line.
    pub fn key(self) -> &'static str {
        match self {
            Measure::Support => "support",
            Measure::Confidence => "confidence",
            Measure::Recall => "recall",
            Measure::Specificity => "specificity",
            Measure::Accuracy => "accuracy",
            Measure::Lift => "lift",
            Measure::Leverage => "leverage",
            Measure::AddedValue => "added_value",
            Measure::Jaccard => "jaccard",
            Measure::CertaintyFactor => "certainty_factor",
            Measure::Klosgen => "klosgen",
            Measure::Conviction => "conviction",
            Measure::JMeasure => "j_measure",
            Measure::OneWaySupport => "one_way_support",
            Measure::TwoWaySupport => "two_way_support",
            Measure::PiatetskyShapiro => "piatetsky_shapiro",
            Measure::Cosine => "cosine",
            Measure::Loevinger => "loevinger",
            Measure::InformationGain => "information_gain",
            Measure::SebagSchoenauer => "sebag_schoenauer",
            Measure::LeastContradiction => "least_contradiction",
            Measure::OddMultiplier => "odd_multiplier",
            Measure::ExampleCounterexampleRate => "example_counterexample_rate",
            Measure::Zhang => "zhang",
        }
    }

    fn aliases(self) -> &'static [&'static str] {
        match self {
            Measure::Confidence => &["precision"],
            Measure::Lift => &["interest"],
            Measure::Loevinger => &["lovinger"],
            Measure::ExampleCounterexampleRate => &["exampleandcounterexamplerate", "ecr"],
            Measure::PiatetskyShapiro => &["ps"],
            _ => &[],
        }
    }

    pub fn range(self) -> Range {
        use Measure::*;
        match self {
            Support | Confidence | Recall | Specificity | Accuracy | Jaccard | Cosine => {
                Range::Unit
            }
            Leverage | AddedValue | Klosgen | PiatetskyShapiro => Range::Symmetric,
            Lift | Conviction | SebagSchoenauer | OddMultiplier => Range::NonNegative,
            CertaintyFactor | Loevinger | ExampleCounterexampleRate => Range::UpToOne,
            JMeasure | OneWaySupport | TwoWaySupport | InformationGain | LeastContradiction
            | Zhang => Range::Real,
        }
    }

    /// Case-insensitive; spaces, `-` and `_` are ignored.
    pub fn lookup(name: &str) -> Result<Measure> {
        let squash = |s: &str| -> String {
            s.chars()
                .filter(|c| c.is_alphanumeric())
                .flat_map(char::to_lowercase)
                .collect()
        };
        let key = squash(name);
        Measure::ALL
            .into_iter()
            .find(|m| squash(m.key()) == key || m.aliases().iter().any(|a| squash(a) == key))
            .ok_or_else(|| Error::UnknownMeasure(name.to_string()))
    }

    /// Parses a comma-separated list; `all` selects the whole catalog.
    pub fn parse_list(list: &str) -> Result<Vec<Measure>> {
        if list.trim().eq_ignore_ascii_case("all") {
            return Ok(Measure::ALL.to_vec());
        }
        let mut out = Vec::new();
        for part in list.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let m = Measure::lookup(part)?;
            if !out.contains(&m) {
                out.push(m);
            }
        }
        if out.is_empty() {
            return Err(Error::InvalidArgument("no measure selected".into()));
        }
        Ok(out)
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Measure::lookup(s)
    }
}

/// `x * ln(y)` with `0 * ln(anything) = 0`.
fn xlogy(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * y.ln()
    }
}

/// `NaN` for non-finite values; otherwise clipped to the closed bounds of
/// `range`, which only ever removes last-bit rounding from sums of masses.
fn fit(x: f64, range: Range) -> f64 {
    if !x.is_finite() {
        return f64::NAN;
    }
    match range {
        Range::Unit => x.clamp(0.0, 1.0),
        Range::Symmetric => x.clamp(-1.0, 1.0),
        Range::NonNegative => x.max(0.0),
        Range::UpToOne => x.min(1.0),
        Range::Real => x,
    }
}

/// Value of `m` on `b`. Undefined or infinite values are `NaN`.
pub fn compute_measure(m: Measure, b: &ProbabilityBundle) -> f64 {
    let (a, t, at, ant) = (b.p_a, b.p_t, b.p_at, b.p_a_not_t);
    let nt = b.p_not_t;
    let conf = b.p_t_given_a;
    let rec = b.p_a_given_t;
    let lift = div(at, a * t);
    let v = match m {
        Measure::Support => at,
        Measure::Confidence => conf,
        Measure::Recall => rec,
        Measure::Specificity => b.p_not_t_given_not_a,
        Measure::Accuracy => at + b.p_not_a_not_t,
        Measure::Lift => lift,
        Measure::Leverage => conf - a * t,
        Measure::AddedValue => conf - t,
        Measure::Jaccard => div(at, a + t - at),
        Measure::CertaintyFactor => div(conf - t, 1.0 - t),
        Measure::Klosgen => at.sqrt() * (conf - t).max(rec - a),
        Measure::Conviction => div(a * nt, ant),
        Measure::JMeasure => xlogy(at, div(conf, t)) + xlogy(ant, div(b.p_not_t_given_a, nt)),
        Measure::OneWaySupport => conf * lift.log2(),
        Measure::TwoWaySupport => at * lift.log2(),
        Measure::PiatetskyShapiro => at - a * t,
        Measure::Cosine => div(at, (a * t).sqrt()),
        Measure::Loevinger => 1.0 - div(a * nt, ant),
        Measure::InformationGain => lift.ln(),
        Measure::SebagSchoenauer => div(at, ant),
        Measure::LeastContradiction => div(at - ant, t),
        Measure::OddMultiplier => div(at * nt, t * ant),
        Measure::ExampleCounterexampleRate => 1.0 - div(ant, at),
        Measure::Zhang => div(at - a * t, (at * nt).max(t * ant)),
    };
    fit(v, m.range())
}

/// Raw and normalized value of one measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeasureValue {
    pub measure: Measure,
    pub raw: f64,
    pub normalized: f64,
}

pub fn compute_all(measures: &[Measure], b: &ProbabilityBundle) -> Vec<MeasureValue> {
    measures
        .iter()
        .map(|&m| {
            let raw = compute_measure(m, b);
            MeasureValue {
                measure: m,
                raw,
                normalized: normalize(raw, m.range()),
            }
        })
        .collect()
}
