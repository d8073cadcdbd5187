//! Specifications: non-empty rule sets read as a single reactive form.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::logmodel::Trace;
use crate::reactive::{label_rf, CompiledRf, ReactiveForm, TriLabel, TriLabelSequence};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Specification {
    name: String,
    rfs: Vec<ReactiveForm>,
}

impl Specification {
    pub fn new(name: impl Into<String>, rfs: Vec<ReactiveForm>) -> Result<Self> {
        if rfs.is_empty() {
            return Err(Error::EmptySpecification);
        }
        Ok(Specification {
            name: name.into(),
            rfs,
        })
    }

    pub fn single(rf: ReactiveForm) -> Self {
        Specification {
            name: rf.name.clone(),
            rfs: vec![rf],
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rfs(&self) -> &[ReactiveForm] {
        &self.rfs
    }

    pub fn len(&self) -> usize {
        self.rfs.len()
    }

    /// Always false: specifications hold at least one rule.
    pub fn is_empty(&self) -> bool {
        false
    }

    /// The specification seen as one reactive form.
    pub fn as_rf(&self, mode: SpecMode) -> ReactiveForm {
        ReactiveForm::named(
            self.name.clone(),
            spec_activator(self),
            spec_target(self, mode),
        )
    }
}

/// How the combined target reads at instants where no rule is activated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpecMode {
    /// Conjunction of `!activator | target` over all rules; true wherever no rule fires.
    Formal,
    /// As `Formal` at activated instants, the conjunction of the raw targets elsewhere.
    #[default]
    Table,
}

impl SpecMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SpecMode::Formal => "formal",
            SpecMode::Table => "table",
        }
    }
}

impl fmt::Display for SpecMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SpecMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "formal" => Ok(SpecMode::Formal),
            "table" => Ok(SpecMode::Table),
            other => Err(Error::InvalidArgument(format!(
                "unknown mode `{other}` (expected formal or table)"
            ))),
        }
    }
}

fn fold(items: impl Iterator<Item = Formula>, join: fn(Formula, Formula) -> Formula) -> Formula {
    items.reduce(join).expect("specifications are non-empty")
}

/// Disjunction of all activators, left-folded in rule order.
pub fn spec_activator(s: &Specification) -> Formula {
    fold(s.rfs.iter().map(|r| r.activator.clone()), Formula::or)
}

pub fn spec_target(s: &Specification, mode: SpecMode) -> Formula {
    let guarded = fold(
        s.rfs
            .iter()
            .map(|r| Formula::or(Formula::not(r.activator.clone()), r.target.clone())),
        Formula::and,
    );
    match mode {
        SpecMode::Formal => guarded,
        SpecMode::Table => {
            let act = spec_activator(s);
            let raw = fold(s.rfs.iter().map(|r| r.target.clone()), Formula::and);
            Formula::or(
                Formula::and(act.clone(), guarded),
                Formula::and(Formula::not(act), raw),
            )
        }
    }
}

/// Compiled activator/target pair of a specification, reusable across traces.
#[derive(Debug, Clone)]
pub struct CompiledSpec {
    inner: CompiledRf,
}

impl CompiledSpec {
    pub fn new(s: &Specification, mode: SpecMode) -> Self {
        CompiledSpec {
            inner: CompiledRf::new(&spec_activator(s), &spec_target(s, mode)),
        }
    }

    pub fn label(&self, t: &Trace) -> TriLabelSequence {
        self.inner.label(t)
    }

    pub fn pair(&self) -> &CompiledRf {
        &self.inner
    }
}

pub fn label_spec(s: &Specification, t: &Trace, mode: SpecMode) -> TriLabelSequence {
    CompiledSpec::new(s, mode).label(t)
}

/// Combines per-rule labels: violated if any rule is violated, satisfied if
/// none is violated and one is satisfied, unaffected otherwise.
pub fn compose_labels(per_rule: &[TriLabelSequence]) -> Vec<TriLabel> {
    let n = per_rule.first().map_or(0, TriLabelSequence::len);
    (0..n)
        .map(|i| {
            let mut any_sat = false;
            for l in per_rule {
                match l.get(i) {
                    TriLabel::Violated => return TriLabel::Violated,
                    TriLabel::Satisfied => any_sat = true,
                    TriLabel::Unaffected => {}
                }
            }
            if any_sat {
                TriLabel::Satisfied
            } else {
                TriLabel::Unaffected
            }
        })
        .collect()
}

/// [`compose_labels`] over freshly labeled rules.
pub fn label_spec_by_rules(s: &Specification, t: &Trace) -> Vec<TriLabel> {
    let per_rule: Vec<_> = s.rfs.iter().map(|r| label_rf(r, t)).collect();
    compose_labels(&per_rule)
}
