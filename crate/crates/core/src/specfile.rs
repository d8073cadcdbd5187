//! Specification files.
//!
//! JSON:
//!
//! ```json
//! {"name": "S", "rules": [
//!   {"template": "Response", "args": ["d", "e"]},
//!   {"activator": "c", "target": "O a"}
//! ]}
//! ```
//!
//! Text, one rule per line, `#` starts a comment:
//!
//! ```text
//! Response(d,e)
//! c |> O a
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::formula::parse_formula;
use crate::miner::DiscoveryResult;
use crate::reactive::{instantiate_template, ReactiveForm};
use crate::specification::Specification;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RuleDoc {
    Template {
        template: String,
        args: Vec<String>,
    },
    Raw {
        activator: String,
        target: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub rules: Vec<RuleDoc>,
}

impl RuleDoc {
    fn forms(&self, position: usize) -> Result<Vec<ReactiveForm>> {
        let ctx = |e: Error| Error::SpecFile(format!("rule {position}: {e}"));
        match self {
            RuleDoc::Template { template, args } => {
                instantiate_template(template, args).map_err(ctx)
            }
            RuleDoc::Raw {
                activator,
                target,
                name,
            } => {
                let act = parse_formula(activator).map_err(ctx)?;
                let tgt = parse_formula(target).map_err(ctx)?;
                Ok(vec![match name {
                    Some(n) => ReactiveForm::named(n.clone(), act, tgt),
                    None => ReactiveForm::new(act, tgt),
                }])
            }
        }
    }
}

impl SpecDoc {
    /// Fails with [`Error::EmptySpecification`] when there are no rules.
    pub fn to_specification(&self, default_name: &str) -> Result<Specification> {
        let mut rfs = Vec::new();
        for (k, r) in self.rules.iter().enumerate() {
            rfs.extend(r.forms(k + 1)?);
        }
        let name = self
            .name
            .clone()
            .unwrap_or_else(|| default_name.to_string());
        Specification::new(name, rfs)
    }

    pub fn from_specification(s: &Specification) -> Self {
        SpecDoc {
            name: Some(s.name().to_string()),
            rules: s
                .rfs()
                .iter()
                .map(|rf| RuleDoc::Raw {
                    activator: rf.activator.to_string(),
                    target: rf.target.to_string(),
                    name: Some(rf.name.clone()),
                })
                .collect(),
        }
    }

    /// Template rules of a mining run, in discovery order. May be empty.
    pub fn from_discovery(name: &str, r: &DiscoveryResult) -> Self {
        SpecDoc {
            name: Some(name.to_string()),
            rules: r
                .rules
                .iter()
                .map(|d| RuleDoc::Template {
                    template: d.template.name().to_string(),
                    args: d.args.clone(),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("spec documents serialize");
        s.push('\n');
        s
    }

    /// JSON when the text starts with `{`, the line format otherwise.
    pub fn parse(text: &str) -> Result<SpecDoc> {
        if text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| Error::SpecFile(e.to_string()))
        } else {
            parse_text(text)
        }
    }
}

/// Splits on `sep` outside double quotes.
fn split_unquoted<'a>(s: &'a str, sep: &str) -> Vec<&'a str> {
    let mut parts = Vec::new();
    let mut in_quotes = false;
    let mut escaped = false;
    let mut start = 0;
    let bytes = s.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if escaped {
            escaped = false;
        } else if c == b'\\' && in_quotes {
            escaped = true;
        } else if c == b'"' {
            in_quotes = !in_quotes;
        } else if !in_quotes && s[i..].starts_with(sep) {
            parts.push(&s[start..i]);
            i += sep.len();
            start = i;
            continue;
        }
        i += 1;
    }
    parts.push(&s[start..]);
    parts
}

fn unquote(arg: &str) -> Result<String> {
    let a = arg.trim();
    if let Some(inner) = a.strip_prefix('"').and_then(|x| x.strip_suffix('"')) {
        let mut out = String::new();
        let mut chars = inner.chars();
        while let Some(c) = chars.next() {
            if c == '\\' {
                match chars.next() {
                    Some(e) => out.push(e),
                    None => return Err(Error::SpecFile(format!("dangling escape in {a}"))),
                }
            } else {
                out.push(c);
            }
        }
        Ok(out)
    } else {
        Ok(a.to_string())
    }
}

fn parse_text(text: &str) -> Result<SpecDoc> {
    let mut rules = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let lineno = k + 1;
        let arrow = split_unquoted(line, "|>");
        match arrow.len() {
            2 => rules.push(RuleDoc::Raw {
                activator: arrow[0].trim().to_string(),
                target: arrow[1].trim().to_string(),
                name: None,
            }),
            1 => {
                let (name, rest) = line.split_once('(').ok_or_else(|| {
                    Error::SpecFile(format!(
                        "line {lineno}: expected `Template(args)` or `activator |> target`"
                    ))
                })?;
                let inner = rest
                    .trim_end()
                    .strip_suffix(')')
                    .ok_or_else(|| Error::SpecFile(format!("line {lineno}: missing `)`")))?;
                let args = split_unquoted(inner, ",")
                    .into_iter()
                    .map(unquote)
                    .collect::<Result<Vec<_>>>()?;
                rules.push(RuleDoc::Template {
                    template: name.trim().to_string(),
                    args,
                });
            }
            _ => {
                return Err(Error::SpecFile(format!(
                    "line {lineno}: more than one `|>`"
                )))
            }
        }
    }
    Ok(SpecDoc { name: None, rules })
}

pub fn load_spec(path: impl AsRef<Path>) -> Result<Specification> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let stem = path.file_stem().map_or_else(
        || "specification".to_string(),
        |s| s.to_string_lossy().into_owned(),
    );
    SpecDoc::parse(&text)?.to_specification(&stem)
}
