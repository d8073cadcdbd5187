//! Maximum-likelihood estimators of satisfaction probabilities.
//!
//! At trace scope a probability is a fraction of instants. At log scope every
//! unique trace contributes its per-instant fraction weighted by its
//! multiplicity, and conditionals are ratios of those weighted sums (not means
//! of per-trace conditionals). Sums run sequentially in entry order, so results
//! do not depend on how labeling was scheduled.
//!
//! Undefined conditionals (zero denominator) are `NaN`.

use crate::evaluator::LabelSequence;
use crate::formula::Formula;
use crate::logmodel::{EventLog, Trace};
use crate::parallel::Execution;
use crate::reactive::{CompiledRf, ReactiveForm};
use crate::specification::{CompiledSpec, SpecMode, Specification};

/// `a / b`, or `NaN` when `b` is zero.
#[inline]
pub fn div(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        f64::NAN
    } else {
        a / b
    }
}

/// Tallies of the four outcomes of two labelings `(x, y)` over one trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct JointCounts {
    pub n11: u64,
    pub n10: u64,
    pub n01: u64,
    pub n00: u64,
}

impl JointCounts {
    pub fn from_labels(x: &LabelSequence, y: &LabelSequence) -> Self {
        let n = x.len() as u64;
        let nx = x.count_ones();
        let ny = y.count_ones();
        let n11 = x.count_and(y);
        JointCounts {
            n11,
            n10: nx - n11,
            n01: ny - n11,
            n00: n + n11 - nx - ny,
        }
    }

    /// Trace length.
    pub fn n(&self) -> u64 {
        self.n11 + self.n10 + self.n01 + self.n00
    }

    pub fn nx(&self) -> u64 {
        self.n11 + self.n10
    }

    pub fn ny(&self) -> u64 {
        self.n11 + self.n01
    }

    /// `[p00, p01, p10, p11]` for this trace.
    pub fn fractions(&self) -> [f64; 4] {
        let n = self.n() as f64;
        [
            self.n00 as f64 / n,
            self.n01 as f64 / n,
            self.n10 as f64 / n,
            self.n11 as f64 / n,
        ]
    }
}

/// Probability masses of the joint outcomes of `(x, y)` together with the
/// normalizing total.
///
/// Trace scope: raw counts and `total = n`. Log scope: sums of
/// `multiplicity * count / n` and `total = |L|`. Marginals and complements are
/// accumulated from exact per-trace tallies rather than added afterwards.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct JointMass {
    pub m11: f64,
    pub m10: f64,
    pub m01: f64,
    pub m00: f64,
    pub mx: f64,
    pub my: f64,
    pub m_not_x: f64,
    pub m_not_y: f64,
    pub total: f64,
}

impl JointMass {
    pub fn trace(c: &JointCounts) -> Self {
        let n = c.n();
        JointMass {
            m11: c.n11 as f64,
            m10: c.n10 as f64,
            m01: c.n01 as f64,
            m00: c.n00 as f64,
            mx: c.nx() as f64,
            my: c.ny() as f64,
            m_not_x: (n - c.nx()) as f64,
            m_not_y: (n - c.ny()) as f64,
            total: n as f64,
        }
    }

    /// Weighted sums over `(counts, multiplicity)` pairs, added in iteration order.
    pub fn log<'a>(parts: impl IntoIterator<Item = (&'a JointCounts, u64)>) -> Self {
        let mut m = JointMass::default();
        let mut card = 0u64;
        for (c, j) in parts {
            let n = c.n();
            let w = j as f64;
            let frac = |k: u64| w * (k as f64 / n as f64);
            m.m11 += frac(c.n11);
            m.m10 += frac(c.n10);
            m.m01 += frac(c.n01);
            m.m00 += frac(c.n00);
            m.mx += frac(c.nx());
            m.my += frac(c.ny());
            m.m_not_x += frac(n - c.nx());
            m.m_not_y += frac(n - c.ny());
            card += j;
        }
        m.total = card as f64;
        m
    }

    pub fn p_x(&self) -> f64 {
        div(self.mx, self.total)
    }

    pub fn p_y(&self) -> f64 {
        div(self.my, self.total)
    }

    pub fn p_xy(&self) -> f64 {
        div(self.m11, self.total)
    }

    /// P(y | x).
    pub fn p_y_given_x(&self) -> f64 {
        div(self.m11, self.mx)
    }

    /// P(x | y).
    pub fn p_x_given_y(&self) -> f64 {
        div(self.m11, self.my)
    }
}

/// Joint counts of a compiled pair for every unique trace of `log`, in entry order.
pub fn log_counts(pair: &CompiledRf, log: &EventLog, exec: Execution) -> Vec<JointCounts> {
    exec.map(log.entries(), |e| {
        let l = pair.label(&e.trace);
        JointCounts::from_labels(&l.activator, &l.target)
    })
}

/// Log-scope mass of a compiled pair.
pub fn log_mass(pair: &CompiledRf, log: &EventLog, exec: Execution) -> JointMass {
    let counts = log_counts(pair, log, exec);
    JointMass::log(
        counts
            .iter()
            .zip(log.entries().iter().map(|e| e.multiplicity)),
    )
}

pub fn trace_counts(pair: &CompiledRf, t: &Trace) -> JointCounts {
    let l = pair.label(t);
    JointCounts::from_labels(&l.activator, &l.target)
}

fn pair(x: &Formula, y: &Formula) -> CompiledRf {
    CompiledRf::new(x, y)
}

/// Fraction of instants of `t` satisfying `f`.
pub fn p_trace(f: &Formula, t: &Trace) -> f64 {
    JointMass::trace(&trace_counts(&pair(f, &Formula::True), t)).p_x()
}

/// Fraction of instants satisfying both formulas.
pub fn p_joint_trace(f1: &Formula, f2: &Formula, t: &Trace) -> f64 {
    JointMass::trace(&trace_counts(&pair(f1, f2), t)).p_xy()
}

/// P(f1 | f2) over the instants of `t`.
pub fn p_cond_trace(f1: &Formula, given: &Formula, t: &Trace) -> f64 {
    JointMass::trace(&trace_counts(&pair(given, f1), t)).p_y_given_x()
}

pub fn p_log(f: &Formula, log: &EventLog) -> f64 {
    log_mass(&pair(f, &Formula::True), log, Execution::default()).p_x()
}

pub fn p_joint_log(f1: &Formula, f2: &Formula, log: &EventLog) -> f64 {
    log_mass(&pair(f1, f2), log, Execution::default()).p_xy()
}

/// Ratio of weighted sums: joint over marginal of `given`.
pub fn p_cond_log(f1: &Formula, given: &Formula, log: &EventLog) -> f64 {
    log_mass(&pair(given, f1), log, Execution::default()).p_y_given_x()
}

/// P(target | activator) on one trace; `NaN` when never activated.
pub fn p_rf_trace(rf: &ReactiveForm, t: &Trace) -> f64 {
    JointMass::trace(&trace_counts(&pair(&rf.activator, &rf.target), t)).p_y_given_x()
}

pub fn p_rf_log(rf: &ReactiveForm, log: &EventLog) -> f64 {
    log_mass(&pair(&rf.activator, &rf.target), log, Execution::default()).p_y_given_x()
}

pub fn p_spec_trace(s: &Specification, t: &Trace, mode: SpecMode) -> f64 {
    JointMass::trace(&trace_counts(CompiledSpec::new(s, mode).pair(), t)).p_y_given_x()
}

/// Traces without activations add zero to both sums; `NaN` when nothing in the
/// log activates the specification.
pub fn p_spec_log(s: &Specification, log: &EventLog, mode: SpecMode) -> f64 {
    log_mass(CompiledSpec::new(s, mode).pair(), log, Execution::default()).p_y_given_x()
}
