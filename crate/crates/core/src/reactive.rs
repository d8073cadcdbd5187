//! Reactive forms `activator |> target` and the Declare-style template catalog.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::evaluator::{CompiledFormula, LabelSequence};
use crate::formula::{write_atom, Formula};
use crate::logmodel::Trace;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ReactiveForm {
    pub name: String,
    pub activator: Formula,
    pub target: Formula,
}

impl ReactiveForm {
    /// A form named after its own `activator |> target` text.
    pub fn new(activator: Formula, target: Formula) -> Self {
        let name = format!("{activator} |> {target}");
        ReactiveForm {
            name,
            activator,
            target,
        }
    }

    pub fn named(name: impl Into<String>, activator: Formula, target: Formula) -> Self {
        ReactiveForm {
            name: name.into(),
            activator,
            target,
        }
    }
}

impl fmt::Display for ReactiveForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} |> {}", self.activator, self.target)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum TriLabel {
    Violated,
    Satisfied,
    Unaffected,
}

impl TriLabel {
    pub fn symbol(self) -> char {
        match self {
            TriLabel::Violated => '0',
            TriLabel::Satisfied => '1',
            TriLabel::Unaffected => 'x',
        }
    }

    /// Parses `0`, `1` or `x`.
    pub fn from_symbol(c: char) -> Option<Self> {
        match c {
            '0' => Some(TriLabel::Violated),
            '1' => Some(TriLabel::Satisfied),
            'x' | 'X' => Some(TriLabel::Unaffected),
            _ => None,
        }
    }
}

/// Tri-valued labels of an activator/target pair over one trace.
#[derive(Clone, PartialEq, Eq)]
pub struct TriLabelSequence {
    pub activator: LabelSequence,
    pub target: LabelSequence,
}

impl TriLabelSequence {
    pub fn new(activator: LabelSequence, target: LabelSequence) -> Self {
        assert_eq!(activator.len(), target.len());
        TriLabelSequence { activator, target }
    }

    pub fn len(&self) -> usize {
        self.activator.len()
    }

    pub fn is_empty(&self) -> bool {
        self.activator.is_empty()
    }

    pub fn get(&self, i: usize) -> TriLabel {
        match (self.activator.get(i), self.target.get(i)) {
            (false, _) => TriLabel::Unaffected,
            (true, true) => TriLabel::Satisfied,
            (true, false) => TriLabel::Violated,
        }
    }

    pub fn labels(&self) -> Vec<TriLabel> {
        (0..self.len()).map(|i| self.get(i)).collect()
    }

    pub fn activations(&self) -> u64 {
        self.activator.count_ones()
    }

    pub fn satisfactions(&self) -> u64 {
        self.activator.count_and(&self.target)
    }

    pub fn violations(&self) -> u64 {
        self.activations() - self.satisfactions()
    }
}

impl fmt::Display for TriLabelSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("<")?;
        for i in 0..self.len() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", self.get(i).symbol())?;
        }
        f.write_str(">")
    }
}

impl fmt::Debug for TriLabelSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Activator and target compiled together.
#[derive(Debug, Clone)]
pub struct CompiledRf {
    program: CompiledFormula,
}

impl CompiledRf {
    pub fn new(activator: &Formula, target: &Formula) -> Self {
        CompiledRf {
            program: CompiledFormula::many(&[activator.clone(), target.clone()]),
        }
    }

    pub fn label(&self, t: &Trace) -> TriLabelSequence {
        let mut v = self.program.label_all(t);
        let target = v.pop().expect("two roots");
        let activator = v.pop().expect("two roots");
        TriLabelSequence::new(activator, target)
    }
}

pub fn label_rf(rf: &ReactiveForm, t: &Trace) -> TriLabelSequence {
    CompiledRf::new(&rf.activator, &rf.target).label(t)
}

/// Whether some instant of `t` satisfies the activator.
pub fn is_activated(rf: &ReactiveForm, t: &Trace) -> bool {
    CompiledFormula::new(&rf.activator).label(t).any()
}

/// Catalog entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Template {
    Participation,
    AtMostOne,
    Init,
    End,
    RespondedExistence,
    Response,
    AlternateResponse,
    ChainResponse,
    Precedence,
    AlternatePrecedence,
    ChainPrecedence,
    CoExistence,
    NotResponse,
    NotChainResponse,
    NotPrecedence,
}

impl Template {
    pub const ALL: [Template; 15] = [
        Template::Participation,
        Template::AtMostOne,
        Template::Init,
        Template::End,
        Template::RespondedExistence,
        Template::Response,
        Template::AlternateResponse,
        Template::ChainResponse,
        Template::Precedence,
        Template::AlternatePrecedence,
        Template::ChainPrecedence,
        Template::CoExistence,
        Template::NotResponse,
        Template::NotChainResponse,
        Template::NotPrecedence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Template::Participation => "Participation",
            Template::AtMostOne => "AtMostOne",
            Template::Init => "Init",
            Template::End => "End",
            Template::RespondedExistence => "RespondedExistence",
            Template::Response => "Response",
            Template::AlternateResponse => "AlternateResponse",
            Template::ChainResponse => "ChainResponse",
            Template::Precedence => "Precedence",
            Template::AlternatePrecedence => "AlternatePrecedence",
            Template::ChainPrecedence => "ChainPrecedence",
            Template::CoExistence => "CoExistence",
            Template::NotResponse => "NotResponse",
            Template::NotChainResponse => "NotChainResponse",
            Template::NotPrecedence => "NotPrecedence",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Template::Participation | Template::AtMostOne | Template::Init | Template::End => 1,
            _ => 2,
        }
    }

    /// Case-insensitive lookup; `-` and `_` are ignored.
    pub fn lookup(name: &str) -> Result<Template> {
        let key: String = name
            .chars()
            .filter(|c| *c != '_' && *c != '-' && !c.is_whitespace())
            .flat_map(char::to_lowercase)
            .collect();
        Template::ALL
            .into_iter()
            .find(|t| t.name().to_lowercase() == key)
            .ok_or_else(|| Error::UnknownTemplate(name.to_string()))
    }

    /// Human-readable `activator |> target` pattern over `a` and `b`.
    pub fn pattern(self) -> String {
        let args: &[&str] = if self.arity() == 1 {
            &["a"]
        } else {
            &["a", "b"]
        };
        let rfs = self.build(args);
        let parts: Vec<String> = rfs
            .iter()
            .map(|(act, tgt)| format!("{act} |> {tgt}"))
            .collect();
        parts.join(" ; ")
    }

    fn build(self, args: &[&str]) -> Vec<(Formula, Formula)> {
        use Formula as F;
        let a = || F::atom(args[0]);
        let b = || F::atom(args[1]);
        let one = |act, tgt| vec![(act, tgt)];
        match self {
            Template::Participation => one(F::Start, F::eventually(a())),
            Template::AtMostOne => one(a(), F::Not(Box::new(F::next(F::eventually(a()))))),
            Template::Init => one(F::Start, a()),
            Template::End => one(F::Start, F::eventually(F::and(a(), F::End))),
            Template::RespondedExistence => one(a(), F::or(F::once(b()), F::eventually(b()))),
            Template::Response => one(a(), F::eventually(b())),
            Template::AlternateResponse => one(a(), F::next(F::until(F::Not(Box::new(a())), b()))),
            Template::ChainResponse => one(a(), F::next(b())),
            Template::Precedence => one(a(), F::once(b())),
            Template::AlternatePrecedence => {
                one(a(), F::yesterday(F::since(F::Not(Box::new(a())), b())))
            }
            Template::ChainPrecedence => one(a(), F::yesterday(b())),
            Template::CoExistence => vec![
                (a(), F::or(F::once(b()), F::eventually(b()))),
                (b(), F::or(F::once(a()), F::eventually(a()))),
            ],
            Template::NotResponse => one(a(), F::Not(Box::new(F::eventually(b())))),
            Template::NotChainResponse => one(a(), F::Not(Box::new(F::next(b())))),
            Template::NotPrecedence => one(a(), F::Not(Box::new(F::once(b())))),
        }
    }
}

impl fmt::Display for Template {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `Template(a,b)` with atoms quoted where needed.
pub fn template_label(t: Template, args: &[String]) -> String {
    let mut s = format!("{}(", t.name());
    for (k, a) in args.iter().enumerate() {
        if k > 0 {
            s.push(',');
        }
        write_atom(&mut s, a).expect("writing to a String");
    }
    s.push(')');
    s
}

/// Instantiates a catalog template. The first argument is always the
/// activating activity: `Response(a,b)` is `a |> F b` and `Precedence(a,b)` is
/// `a |> O b` (every `a` preceded by some `b`). CoExistence yields two forms,
/// one per direction; every other template yields one.
pub fn instantiate_template(template: &str, args: &[String]) -> Result<Vec<ReactiveForm>> {
    let t = Template::lookup(template)?;
    if args.len() != t.arity() {
        return Err(Error::TemplateArity {
            template: t.name().into(),
            expected: t.arity(),
            got: args.len(),
        });
    }
    if let Some(empty) = args.iter().find(|a| a.is_empty()) {
        return Err(Error::InvalidArgument(format!(
            "{}: empty activity name {empty:?}",
            t.name()
        )));
    }
    if t.arity() == 2 && args[0] == args[1] {
        return Err(Error::DuplicateArgument {
            template: t.name().into(),
            activity: args[0].clone(),
        });
    }
    let strs: Vec<&str> = args.iter().map(String::as_str).collect();
    let built = t.build(&strs);
    let base = template_label(t, args);
    let count = built.len();
    Ok(built
        .into_iter()
        .enumerate()
        .map(|(k, (act, tgt))| {
            let name = if count == 1 {
                base.clone()
            } else {
                format!("{base}#{}", k + 1)
            };
            ReactiveForm::named(name, act, tgt)
        })
        .collect())
}
