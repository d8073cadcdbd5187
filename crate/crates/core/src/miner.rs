//! Confidence-threshold template miner.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimators::log_mass;
use crate::logmodel::EventLog;
use crate::parallel::Execution;
use crate::reactive::{instantiate_template, template_label, CompiledRf, ReactiveForm, Template};
use crate::specification::{CompiledSpec, SpecMode, Specification};

#[derive(Debug, Clone, PartialEq)]
pub struct MinerConfig {
    pub templates: Vec<Template>,
    /// Minimum log-scope Confidence, in [0, 1].
    pub threshold: f64,
}

impl MinerConfig {
    pub fn new(templates: Vec<Template>, threshold: f64) -> Result<Self> {
        let cfg = MinerConfig {
            templates,
            threshold,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        if self.templates.is_empty() {
            return Err(Error::InvalidArgument("no template selected".into()));
        }
        check_threshold(self.threshold)
    }
}

/// Absolute slack when comparing a Confidence with a threshold. Log-scope
/// masses are sums of `j/n` terms, so a rule at exactly 0.9 in exact
/// arithmetic can come out as 0.8999999999999999.
pub const THRESHOLD_SLACK: f64 = 1e-9;

fn check_threshold(x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "threshold {x} outside [0, 1]"
        )))
    }
}

/// One instantiated template that passed the threshold.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscoveredRule {
    pub template: Template,
    pub args: Vec<String>,
    pub label: String,
    /// Smallest Confidence among the template's forms.
    pub confidence: f64,
    #[serde(skip)]
    pub rfs: Vec<ReactiveForm>,
}

/// Outcome of [`discover`]. An empty rule list is a valid outcome, but it is
/// not a [`Specification`].
#[derive(Debug, Clone, PartialEq)]
pub struct DiscoveryResult {
    pub threshold: f64,
    pub candidates: usize,
    pub rules: Vec<DiscoveredRule>,
}

impl DiscoveryResult {
    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    /// The rules as a specification, or `None` when nothing passed.
    pub fn specification(&self, name: &str) -> Option<Specification> {
        let rfs: Vec<ReactiveForm> = self
            .rules
            .iter()
            .flat_map(|r| r.rfs.iter().cloned())
            .collect();
        Specification::new(name, rfs).ok()
    }
}

/// A candidate with its per-form Confidence; `None` marks a form never activated.
#[derive(Debug, Clone)]
struct Scored {
    template: Template,
    args: Vec<String>,
    label: String,
    rfs: Vec<ReactiveForm>,
    confidences: Vec<Option<f64>>,
}

impl Scored {
    fn passes(&self, threshold: f64) -> bool {
        self.confidences
            .iter()
            .all(|c| c.is_some_and(|c| c >= threshold - THRESHOLD_SLACK))
    }

    fn min_confidence(&self) -> f64 {
        self.confidences
            .iter()
            .map(|c| c.unwrap_or(f64::NAN))
            .fold(f64::INFINITY, f64::min)
    }
}

fn candidates(log: &EventLog, templates: &[Template]) -> Vec<(Template, Vec<String>)> {
    let alphabet = log.alphabet();
    let mut out = Vec::new();
    for &t in templates {
        if t.arity() == 1 {
            for a in &alphabet {
                out.push((t, vec![a.clone()]));
            }
        } else {
            for a in &alphabet {
                for b in &alphabet {
                    if a != b {
                        out.push((t, vec![a.clone(), b.clone()]));
                    }
                }
            }
        }
    }
    out
}

fn score(log: &EventLog, templates: &[Template], exec: Execution) -> Vec<Scored> {
    let cands = candidates(log, templates);
    exec.map(&cands, |(t, args)| {
        let rfs = instantiate_template(t.name(), args).expect("catalog candidates are well-formed");
        let confidences = rfs
            .iter()
            .map(|rf| {
                let m = log_mass(
                    &CompiledRf::new(&rf.activator, &rf.target),
                    log,
                    Execution::Sequential,
                );
                (m.mx > 0.0).then(|| m.p_y_given_x())
            })
            .collect();
        Scored {
            template: *t,
            label: template_label(*t, args),
            args: args.clone(),
            rfs,
            confidences,
        }
    })
}

fn select(scored: &[Scored], threshold: f64) -> Vec<DiscoveredRule> {
    let mut rules: Vec<DiscoveredRule> = scored
        .iter()
        .filter(|s| s.passes(threshold))
        .map(|s| DiscoveredRule {
            template: s.template,
            args: s.args.clone(),
            label: s.label.clone(),
            confidence: s.min_confidence(),
            rfs: s.rfs.clone(),
        })
        .collect();
    rules.sort_by(|x, y| {
        y.confidence
            .total_cmp(&x.confidence)
            .then_with(|| x.label.cmp(&y.label))
    });
    rules
}

/// Instantiates every selected template over the log alphabet (ordered
/// distinct pairs for binary templates) and keeps those whose forms are all
/// activated somewhere and reach the threshold. Rules come out by descending
/// Confidence, then label.
pub fn discover(log: &EventLog, cfg: &MinerConfig, exec: Execution) -> Result<DiscoveryResult> {
    cfg.validate()?;
    let scored = score(log, &cfg.templates, exec);
    Ok(DiscoveryResult {
        threshold: cfg.threshold,
        candidates: scored.len(),
        rules: select(&scored, cfg.threshold),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub threshold: f64,
    pub rule_count: usize,
    /// Log Confidence of the whole discovered specification; `NaN` when empty.
    pub spec_confidence: f64,
    /// Plain mean of the kept rules' Confidence; `NaN` when empty.
    pub mean_rule_confidence: f64,
}

/// Mines at every threshold and measures the resulting specification as a whole.
/// Candidates are scored once; `cfg.threshold` is ignored.
pub fn threshold_sweep(
    log: &EventLog,
    cfg: &MinerConfig,
    thresholds: &[f64],
    exec: Execution,
) -> Result<Vec<SweepRow>> {
    if cfg.templates.is_empty() {
        return Err(Error::InvalidArgument("no template selected".into()));
    }
    for &t in thresholds {
        check_threshold(t)?;
    }
    let scored = score(log, &cfg.templates, exec);
    let mut rows = Vec::with_capacity(thresholds.len());
    for &th in thresholds {
        let rules = select(&scored, th);
        let result = DiscoveryResult {
            threshold: th,
            candidates: scored.len(),
            rules,
        };
        let spec_confidence = match result.specification("sweep") {
            Some(s) => {
                let m = log_mass(CompiledSpec::new(&s, SpecMode::Table).pair(), log, exec);
                m.p_y_given_x()
            }
            None => f64::NAN,
        };
        let n = result.rules.len();
        let mean_rule_confidence = if n == 0 {
            f64::NAN
        } else {
            result.rules.iter().map(|r| r.confidence).sum::<f64>() / n as f64
        };
        rows.push(SweepRow {
            threshold: th,
            rule_count: n,
            spec_confidence,
            mean_rule_confidence,
        });
    }
    Ok(rows)
}

/// Parses `start:end:step` into an inclusive list of thresholds.
pub fn parse_sweep(text: &str) -> Result<Vec<f64>> {
    let bad = || Error::InvalidArgument(format!("sweep `{text}` is not start:end:step"));
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(bad());
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| p.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    let (start, end, step) = (nums[0], nums[1], nums[2]);
    if step.is_nan() || step <= 0.0 || end < start {
        return Err(bad());
    }
    let steps = ((end - start) / step + 1e-9).floor() as usize;
    let out: Vec<f64> = (0..=steps)
        .map(|k| {
            let x = start + k as f64 * step;
            (x * 1e10).round() / 1e10
        })
        .collect();
    for &x in &out {
        check_threshold(x)?;
    }
    Ok(out)
}
