//! LTLf formulas with past modalities.
//!
//! Surface syntax, from loosest to tightest binding:
//!
//! | level   | operators                          | associativity |
//! |---------|------------------------------------|---------------|
//! | implies | `->`                               | right         |
//! | or      | `\|`                               | right         |
//! | and     | `&`                                | right         |
//! | until   | `U` (until), `S` (since)           | right         |
//! | unary   | `!` `X` `Y` `F` `O` `G` `H`        | prefix        |
//!
//! Constants are `true`, `false`, `Start` and `End`. Atoms are identifiers
//! `[a-zA-Z_][a-zA-Z0-9_]*`, or any text between double quotes (with `\"` and
//! `\\` escapes) for activity labels containing spaces, punctuation or a keyword.
//!
//! [`Formula`]'s `Display` output is fully parenthesized and parses back to the
//! same tree.

use std::fmt;

use crate::error::{Error, Position, Result};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    True,
    False,
    /// First instant of a trace.
    Start,
    /// Last instant of a trace.
    End,
    Atom(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Next(Box<Formula>),
    Yesterday(Box<Formula>),
    Until(Box<Formula>, Box<Formula>),
    Since(Box<Formula>, Box<Formula>),
    Eventually(Box<Formula>),
    Once(Box<Formula>),
    Always(Box<Formula>),
    Historically(Box<Formula>),
}

impl Formula {
    pub fn atom(name: impl Into<String>) -> Self {
        Formula::Atom(name.into())
    }

    /// Negation that cancels an existing outer negation.
    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        match f {
            Formula::Not(inner) => *inner,
            other => Formula::Not(Box::new(other)),
        }
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn next(f: Formula) -> Self {
        Formula::Next(Box::new(f))
    }

    pub fn yesterday(f: Formula) -> Self {
        Formula::Yesterday(Box::new(f))
    }

    pub fn until(a: Formula, b: Formula) -> Self {
        Formula::Until(Box::new(a), Box::new(b))
    }

    pub fn since(a: Formula, b: Formula) -> Self {
        Formula::Since(Box::new(a), Box::new(b))
    }

    pub fn eventually(f: Formula) -> Self {
        Formula::Eventually(Box::new(f))
    }

    pub fn once(f: Formula) -> Self {
        Formula::Once(Box::new(f))
    }

    pub fn always(f: Formula) -> Self {
        Formula::Always(Box::new(f))
    }

    pub fn historically(f: Formula) -> Self {
        Formula::Historically(Box::new(f))
    }

    /// Number of atoms, constants and connectives (parentheses excluded).
    pub fn size(&self) -> usize {
        use Formula::*;
        match self {
            True | False | Start | End | Atom(_) => 1,
            Not(f) | Next(f) | Yesterday(f) | Eventually(f) | Once(f) | Always(f)
            | Historically(f) => 1 + f.size(),
            And(a, b) | Or(a, b) | Implies(a, b) | Until(a, b) | Since(a, b) => {
                1 + a.size() + b.size()
            }
        }
    }

    /// Height of the syntax tree; leaves have depth 0.
    pub fn depth(&self) -> usize {
        use Formula::*;
        match self {
            True | False | Start | End | Atom(_) => 0,
            Not(f) | Next(f) | Yesterday(f) | Eventually(f) | Once(f) | Always(f)
            | Historically(f) => 1 + f.depth(),
            And(a, b) | Or(a, b) | Implies(a, b) | Until(a, b) | Since(a, b) => {
                1 + a.depth().max(b.depth())
            }
        }
    }

    /// Rewrites derived operators into the core set
    /// {atoms, constants, `!`, `&`, `X`, `Y`, `U`, `S`}.
    ///
    /// `Start` and `End` become `!(Y true)` and `!(X true)`. Double negations
    /// produced along the way are removed.
    pub fn expand_derived(&self) -> Formula {
        use Formula as F;
        match self {
            F::True | F::False | F::Atom(_) => self.clone(),
            F::Start => F::not(F::yesterday(F::True)),
            F::End => F::not(F::next(F::True)),
            F::Not(f) => F::not(f.expand_derived()),
            F::And(a, b) => F::and(a.expand_derived(), b.expand_derived()),
            F::Or(a, b) => F::not(F::and(
                F::not(a.expand_derived()),
                F::not(b.expand_derived()),
            )),
            F::Implies(a, b) => F::not(F::and(a.expand_derived(), F::not(b.expand_derived()))),
            F::Next(f) => F::next(f.expand_derived()),
            F::Yesterday(f) => F::yesterday(f.expand_derived()),
            F::Until(a, b) => F::until(a.expand_derived(), b.expand_derived()),
            F::Since(a, b) => F::since(a.expand_derived(), b.expand_derived()),
            F::Eventually(f) => F::until(F::True, f.expand_derived()),
            F::Once(f) => F::since(F::True, f.expand_derived()),
            F::Always(f) => F::not(F::until(F::True, F::not(f.expand_derived()))),
            F::Historically(f) => F::not(F::since(F::True, F::not(f.expand_derived()))),
        }
    }

    /// Swaps every future operator with its past counterpart.
    ///
    /// Labeling `f.mirror()` on a reversed trace yields the reversed labels of `f`.
    pub fn mirror(&self) -> Formula {
        use Formula as F;
        match self {
            F::True | F::False | F::Atom(_) => self.clone(),
            F::Start => F::End,
            F::End => F::Start,
            F::Not(f) => F::Not(Box::new(f.mirror())),
            F::And(a, b) => F::and(a.mirror(), b.mirror()),
            F::Or(a, b) => F::or(a.mirror(), b.mirror()),
            F::Implies(a, b) => F::implies(a.mirror(), b.mirror()),
            F::Next(f) => F::yesterday(f.mirror()),
            F::Yesterday(f) => F::next(f.mirror()),
            F::Until(a, b) => F::since(a.mirror(), b.mirror()),
            F::Since(a, b) => F::until(a.mirror(), b.mirror()),
            F::Eventually(f) => F::once(f.mirror()),
            F::Once(f) => F::eventually(f.mirror()),
            F::Always(f) => F::historically(f.mirror()),
            F::Historically(f) => F::always(f.mirror()),
        }
    }

    /// True when only atoms, constants, `!`, `&`, `X`, `Y`, `U` and `S` occur.
    pub fn is_core(&self) -> bool {
        use Formula::*;
        match self {
            True | False | Atom(_) => true,
            Start | End | Or(..) | Implies(..) | Eventually(_) | Once(_) | Always(_)
            | Historically(_) => false,
            Not(f) | Next(f) | Yesterday(f) => f.is_core(),
            And(a, b) | Until(a, b) | Since(a, b) => a.is_core() && b.is_core(),
        }
    }

    /// Distinct atom names, sorted.
    pub fn atoms(&self) -> Vec<&str> {
        fn walk<'a>(f: &'a Formula, out: &mut Vec<&'a str>) {
            use Formula::*;
            match f {
                True | False | Start | End => {}
                Atom(a) => out.push(a),
                Not(f) | Next(f) | Yesterday(f) | Eventually(f) | Once(f) | Always(f)
                | Historically(f) => walk(f, out),
                And(a, b) | Or(a, b) | Implies(a, b) | Until(a, b) | Since(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out.sort_unstable();
        out.dedup();
        out
    }
}

impl std::str::FromStr for Formula {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_formula(s)
    }
}

const KEYWORDS: &[&str] = &[
    "true", "false", "Start", "End", "X", "Y", "F", "O", "G", "H", "U", "S",
];

pub(crate) fn is_plain_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || c == '_') && !KEYWORDS.contains(&s)
}

/// Writes an atom name, quoting it when it would not lex as a bare identifier.
pub(crate) fn write_atom(f: &mut impl fmt::Write, name: &str) -> fmt::Result {
    if is_plain_identifier(name) {
        return f.write_str(name);
    }
    f.write_char('"')?;
    for c in name.chars() {
        if c == '"' || c == '\\' {
            f.write_char('\\')?;
        }
        f.write_char(c)?;
    }
    f.write_char('"')
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Formula::*;
        match self {
            True => f.write_str("true"),
            False => f.write_str("false"),
            Start => f.write_str("Start"),
            End => f.write_str("End"),
            Atom(a) => write_atom(f, a),
            Not(x) => write!(f, "(!{x})"),
            Next(x) => write!(f, "(X {x})"),
            Yesterday(x) => write!(f, "(Y {x})"),
            Eventually(x) => write!(f, "(F {x})"),
            Once(x) => write!(f, "(O {x})"),
            Always(x) => write!(f, "(G {x})"),
            Historically(x) => write!(f, "(H {x})"),
            And(a, b) => write!(f, "({a} & {b})"),
            Or(a, b) => write!(f, "({a} | {b})"),
            Implies(a, b) => write!(f, "({a} -> {b})"),
            Until(a, b) => write!(f, "({a} U {b})"),
            Since(a, b) => write!(f, "({a} S {b})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    LParen,
    RParen,
    Bang,
    Amp,
    Pipe,
    Arrow,
    Word(String),
    Quoted(String),
}

fn tokenize(text: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            b' ' | b'\t' | b'\r' | b'\n' => i += 1,
            b'(' => {
                out.push((Tok::LParen, i));
                i += 1;
            }
            b')' => {
                out.push((Tok::RParen, i));
                i += 1;
            }
            b'!' => {
                out.push((Tok::Bang, i));
                i += 1;
            }
            b'&' => {
                out.push((Tok::Amp, i));
                i += 1;
            }
            b'|' => {
                out.push((Tok::Pipe, i));
                i += 1;
            }
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                out.push((Tok::Arrow, i));
                i += 2;
            }
            b'"' => {
                let start = i;
                i += 1;
                let mut name = String::new();
                let mut closed = false;
                let mut chars = text[i..].char_indices();
                while let Some((off, ch)) = chars.next() {
                    match ch {
                        '"' => {
                            i += off + 1;
                            closed = true;
                            break;
                        }
                        '\\' => match chars.next() {
                            Some((_, esc @ ('"' | '\\'))) => name.push(esc),
                            Some((o, other)) => {
                                return Err(Error::Syntax {
                                    position: Position::Offset(i + o),
                                    message: format!("invalid escape `\\{other}`"),
                                })
                            }
                            None => break,
                        },
                        other => name.push(other),
                    }
                }
                if !closed {
                    return Err(Error::Syntax {
                        position: Position::EndOfInput,
                        message: format!("unterminated quoted atom starting at offset {start}"),
                    });
                }
                if name.is_empty() {
                    return Err(Error::Syntax {
                        position: Position::Offset(start),
                        message: "empty quoted atom".into(),
                    });
                }
                out.push((Tok::Quoted(name), start));
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Word(text[start..i].to_string()), start));
            }
            _ => {
                let ch = text[i..].chars().next().unwrap_or('?');
                let mut token = ch.to_string();
                // keep common multi-character operators from other syntaxes together
                if let Some(next) = text[i + ch.len_utf8()..].chars().next() {
                    if matches!(next, '>' | '=' | '|' | '&' | ']') && !next.is_alphanumeric() {
                        token.push(next);
                    }
                }
                return Err(Error::UnknownOperator {
                    token,
                    position: Position::Offset(i),
                });
            }
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn position(&self) -> Position {
        self.toks
            .get(self.pos)
            .map_or(Position::EndOfInput, |&(_, o)| Position::Offset(o))
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn error(&self, message: impl Into<String>) -> Error {
        Error::Syntax {
            position: self.position(),
            message: message.into(),
        }
    }

    fn implication(&mut self) -> Result<Formula> {
        let lhs = self.disjunction()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.bump();
            let rhs = self.implication()?;
            return Ok(Formula::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let lhs = self.conjunction()?;
        if self.peek() == Some(&Tok::Pipe) {
            self.bump();
            let rhs = self.disjunction()?;
            return Ok(Formula::or(lhs, rhs));
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let lhs = self.temporal()?;
        if self.peek() == Some(&Tok::Amp) {
            self.bump();
            let rhs = self.conjunction()?;
            return Ok(Formula::and(lhs, rhs));
        }
        Ok(lhs)
    }

    fn temporal(&mut self) -> Result<Formula> {
        let lhs = self.unary()?;
        match self.peek() {
            Some(Tok::Word(w)) if w == "U" => {
                self.bump();
                Ok(Formula::until(lhs, self.temporal()?))
            }
            Some(Tok::Word(w)) if w == "S" => {
                self.bump();
                Ok(Formula::since(lhs, self.temporal()?))
            }
            _ => Ok(lhs),
        }
    }

    fn unary(&mut self) -> Result<Formula> {
        let wrap: fn(Formula) -> Formula = match self.peek() {
            Some(Tok::Bang) => |f| Formula::Not(Box::new(f)),
            Some(Tok::Word(w)) => match w.as_str() {
                "X" => Formula::next,
                "Y" => Formula::yesterday,
                "F" => Formula::eventually,
                "O" => Formula::once,
                "G" => Formula::always,
                "H" => Formula::historically,
                _ => return self.primary(),
            },
            _ => return self.primary(),
        };
        self.bump();
        Ok(wrap(self.unary()?))
    }

    fn primary(&mut self) -> Result<Formula> {
        let position = self.position();
        match self.bump() {
            None => Err(Error::Syntax {
                position,
                message: "expected a formula".into(),
            }),
            Some(Tok::LParen) => {
                let inner = self.implication()?;
                match self.bump() {
                    Some(Tok::RParen) => Ok(inner),
                    _ => {
                        self.pos -= 1;
                        Err(self.error("expected `)`"))
                    }
                }
            }
            Some(Tok::Quoted(name)) => Ok(Formula::Atom(name)),
            Some(Tok::Word(w)) => match w.as_str() {
                "true" => Ok(Formula::True),
                "false" => Ok(Formula::False),
                "Start" => Ok(Formula::Start),
                "End" => Ok(Formula::End),
                "U" | "S" => Err(Error::Syntax {
                    position,
                    message: format!("binary operator `{w}` is missing its left operand"),
                }),
                _ => Ok(Formula::Atom(w)),
            },
            Some(tok) => Err(Error::Syntax {
                position,
                message: format!("unexpected {}", describe(&tok)),
            }),
        }
    }
}

fn describe(tok: &Tok) -> String {
    match tok {
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Bang => "`!`".into(),
        Tok::Amp => "`&`".into(),
        Tok::Pipe => "`|`".into(),
        Tok::Arrow => "`->`".into(),
        Tok::Word(w) => format!("`{w}`"),
        Tok::Quoted(q) => format!("\"{q}\""),
    }
}

/// Parses the surface syntax described in the module docs.
pub fn parse_formula(text: &str) -> Result<Formula> {
    let toks = tokenize(text)?;
    if toks.is_empty() {
        return Err(Error::Syntax {
            position: Position::EndOfInput,
            message: "empty formula".into(),
        });
    }
    let mut p = Parser { toks, pos: 0 };
    let f = p.implication()?;
    if let Some(tok) = p.peek() {
        let msg = format!("unexpected {} after complete formula", describe(tok));
        return Err(p.error(msg));
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use Formula as F;

    fn a(s: &str) -> Formula {
        F::atom(s)
    }

    #[test]
    fn parses_next_not_until() {
        let f = parse_formula("(X !e) U d").unwrap();
        assert_eq!(f, F::until(F::next(F::Not(Box::new(a("e")))), a("d")));
    }

    #[test]
    fn parses_constants() {
        assert_eq!(parse_formula("true").unwrap(), F::True);
        assert_eq!(parse_formula("false").unwrap(), F::False);
        assert_eq!(parse_formula("Start").unwrap(), F::Start);
        assert_eq!(parse_formula("End").unwrap(), F::End);
    }

    #[test]
    fn unbalanced_paren_fails_at_end_of_input() {
        match parse_formula("(a U") {
            Err(Error::Syntax { position, .. }) => assert_eq!(position, Position::EndOfInput),
            other => panic!("expected syntax error, got {other:?}"),
        }
        assert!(matches!(
            parse_formula("(a & b"),
            Err(Error::Syntax {
                position: Position::EndOfInput,
                ..
            })
        ));
    }

    #[test]
    fn unknown_operator_is_reported() {
        match parse_formula("a <> b") {
            Err(Error::UnknownOperator { token, position }) => {
                assert_eq!(token, "<>");
                assert_eq!(position, Position::Offset(2));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_formula("a ~ b"),
            Err(Error::UnknownOperator { .. })
        ));
    }

    #[test]
    fn trailing_tokens_are_rejected() {
        assert!(matches!(parse_formula("a b"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_formula("a )"), Err(Error::Syntax { .. })));
        assert!(matches!(parse_formula(""), Err(Error::Syntax { .. })));
        assert!(matches!(parse_formula("U a"), Err(Error::Syntax { .. })));
    }

    #[test]
    fn precedence_and_associativity() {
        // unary > U/S > & > | > ->
        assert_eq!(
            parse_formula("a & b | c -> d").unwrap(),
            F::implies(F::or(F::and(a("a"), a("b")), a("c")), a("d"))
        );
        assert_eq!(
            parse_formula("a U b & c").unwrap(),
            F::and(F::until(a("a"), a("b")), a("c"))
        );
        assert_eq!(
            parse_formula("a -> b -> c").unwrap(),
            F::implies(a("a"), F::implies(a("b"), a("c")))
        );
        assert_eq!(
            parse_formula("a U b S c").unwrap(),
            F::until(a("a"), F::since(a("b"), a("c")))
        );
        assert_eq!(
            parse_formula("! F a & G b").unwrap(),
            F::and(F::Not(Box::new(F::eventually(a("a")))), F::always(a("b")))
        );
    }

    #[test]
    fn quoted_atoms() {
        let f = parse_formula(r#""ER Registration" -> F "Leucocytes, \"x\"""#).unwrap();
        assert_eq!(
            f,
            F::implies(a("ER Registration"), F::eventually(a(r#"Leucocytes, "x""#)))
        );
        // keywords must be quoted to be atoms
        assert_eq!(parse_formula("\"X\"").unwrap(), a("X"));
        assert!(parse_formula("\"\"").is_err());
        assert!(parse_formula("\"abc").is_err());
    }

    #[test]
    fn display_is_fully_parenthesized() {
        let f = parse_formula("(X !e) U d").unwrap();
        assert_eq!(f.to_string(), "((X (!e)) U d)");
        assert_eq!(parse_formula(&f.to_string()).unwrap(), f);
        assert_eq!(a("X").to_string(), "\"X\"");
        assert_eq!(a("a b").to_string(), "\"a b\"");
    }

    #[test]
    fn size_counts_symbols_and_connectives() {
        assert_eq!(parse_formula("(X !e) U d").unwrap().size(), 5);
        assert_eq!(parse_formula("d & F e").unwrap().size(), 4);
        assert_eq!(a("a").size(), 1);
    }

    #[test]
    fn expansion_examples() {
        assert_eq!(
            parse_formula("F e").unwrap().expand_derived(),
            F::until(F::True, a("e"))
        );
        assert_eq!(a("a").expand_derived(), a("a"));
        assert_eq!(
            parse_formula("G !c").unwrap().expand_derived(),
            F::Not(Box::new(F::until(F::True, a("c"))))
        );
        let e = parse_formula("Start | End -> O a | H b")
            .unwrap()
            .expand_derived();
        assert!(e.is_core());
    }

    #[test]
    fn mirror_swaps_past_and_future() {
        let f = parse_formula("(X !e) U d").unwrap();
        assert_eq!(f.mirror(), parse_formula("(Y !e) S d").unwrap());
        assert_eq!(f.mirror().mirror(), f);
        assert_eq!(
            parse_formula("G F Start").unwrap().mirror(),
            parse_formula("H O End").unwrap()
        );
    }

    #[test]
    fn atoms_are_sorted_and_unique() {
        let f = parse_formula("b U (a & F b)").unwrap();
        assert_eq!(f.atoms(), vec!["a", "b"]);
    }
}
