//! Per-instant labeling of formulas over traces.
//!
//! [`CompiledFormula`] hash-conses a set of formulas into a DAG and labels a
//! trace with one sweep per node: pointwise for boolean connectives, backward
//! for future operators and forward for past ones. [`eval_at`] is a direct
//! transcription of the semantics and is only meant as a test oracle.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::formula::Formula;
use crate::logmodel::Trace;

/// Packed per-instant truth values; bit `i` is instant `i + 1`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LabelSequence {
    words: Vec<u64>,
    len: usize,
}

impl LabelSequence {
    pub fn zeros(len: usize) -> Self {
        LabelSequence {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn ones(len: usize) -> Self {
        let mut s = LabelSequence {
            words: vec![!0; len.div_ceil(64)],
            len,
        };
        s.clear_padding();
        s
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut s = LabelSequence::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            s.set(i, b);
        }
        s
    }

    /// Builds `len` labels from a predicate on 0-based positions.
    pub fn from_fn(len: usize, mut f: impl FnMut(usize) -> bool) -> Self {
        let mut s = LabelSequence::zeros(len);
        for i in 0..len {
            if f(i) {
                s.words[i / 64] |= 1 << (i % 64);
            }
        }
        s
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Label at 0-based position `i`.
    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn any(&self) -> bool {
        self.words.iter().any(|&w| w != 0)
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    pub fn to_bools(&self) -> Vec<bool> {
        self.iter().collect()
    }

    pub fn not(&self) -> Self {
        let mut s = LabelSequence {
            words: self.words.iter().map(|w| !w).collect(),
            len: self.len,
        };
        s.clear_padding();
        s
    }

    pub fn and(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a & b)
    }

    pub fn or(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a | b)
    }

    /// `!self | other`.
    pub fn implies(&self, other: &Self) -> Self {
        let mut s = self.zip(other, |a, b| !a | b);
        s.clear_padding();
        s
    }

    /// Number of positions where both sequences hold.
    pub fn count_and(&self, other: &Self) -> u64 {
        assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as u64)
            .sum()
    }

    pub fn reversed(&self) -> Self {
        let n = self.len;
        LabelSequence::from_fn(n, |i| self.get(n - 1 - i))
    }

    fn zip(&self, other: &Self, f: impl Fn(u64, u64) -> u64) -> Self {
        assert_eq!(self.len, other.len, "label sequences of different length");
        LabelSequence {
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(&a, &b)| f(a, b))
                .collect(),
            len: self.len,
        }
    }

    fn clear_padding(&mut self) {
        let r = self.len % 64;
        if r != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << r) - 1;
            }
        }
    }

    /// Bit `i` of the result is bit `i + 1` of `self`; the last instant is 0.
    fn shift_next(&self) -> Self {
        let w = &self.words;
        let words = (0..w.len())
            .map(|k| (w[k] >> 1) | w.get(k + 1).map_or(0, |n| n << 63))
            .collect();
        LabelSequence {
            words,
            len: self.len,
        }
    }

    /// Bit `i` of the result is bit `i - 1` of `self`; the first instant is 0.
    fn shift_yesterday(&self) -> Self {
        let w = &self.words;
        let words = (0..w.len())
            .map(|k| (w[k] << 1) | if k == 0 { 0 } else { w[k - 1] >> 63 })
            .collect();
        let mut s = LabelSequence {
            words,
            len: self.len,
        };
        s.clear_padding();
        s
    }
}

impl std::fmt::Debug for LabelSequence {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "<")?;
        for (i, b) in self.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", b as u8)?;
        }
        write!(f, ">")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Node {
    True,
    False,
    Start,
    End,
    Atom(usize),
    Not(usize),
    And(usize, usize),
    Or(usize, usize),
    Implies(usize, usize),
    Next(usize),
    Yesterday(usize),
    Until(usize, usize),
    Since(usize, usize),
    Eventually(usize),
    Once(usize),
    Always(usize),
    Historically(usize),
}

/// One or more formulas compiled to a shared DAG of subformulas.
///
/// Nodes are stored children-first, so a single left-to-right pass labels
/// every subformula.
#[derive(Debug, Clone)]
pub struct CompiledFormula {
    nodes: Vec<Node>,
    atoms: Vec<String>,
    roots: Vec<usize>,
}

struct Builder {
    nodes: Vec<Node>,
    index: HashMap<Node, usize>,
    atoms: Vec<String>,
    atom_index: HashMap<String, usize>,
}

impl Builder {
    fn intern(&mut self, node: Node) -> usize {
        if let Some(&id) = self.index.get(&node) {
            return id;
        }
        let id = self.nodes.len();
        self.nodes.push(node);
        self.index.insert(node, id);
        id
    }

    fn add(&mut self, f: &Formula) -> usize {
        use Formula as F;
        let node = match f {
            F::True => Node::True,
            F::False => Node::False,
            F::Start => Node::Start,
            F::End => Node::End,
            F::Atom(name) => {
                let next = self.atoms.len();
                let id = *self.atom_index.entry(name.clone()).or_insert(next);
                if id == next {
                    self.atoms.push(name.clone());
                }
                Node::Atom(id)
            }
            F::Not(x) => Node::Not(self.add(x)),
            F::Next(x) => Node::Next(self.add(x)),
            F::Yesterday(x) => Node::Yesterday(self.add(x)),
            F::Eventually(x) => Node::Eventually(self.add(x)),
            F::Once(x) => Node::Once(self.add(x)),
            F::Always(x) => Node::Always(self.add(x)),
            F::Historically(x) => Node::Historically(self.add(x)),
            F::And(a, b) => Node::And(self.add(a), self.add(b)),
            F::Or(a, b) => Node::Or(self.add(a), self.add(b)),
            F::Implies(a, b) => Node::Implies(self.add(a), self.add(b)),
            F::Until(a, b) => Node::Until(self.add(a), self.add(b)),
            F::Since(a, b) => Node::Since(self.add(a), self.add(b)),
        };
        self.intern(node)
    }
}

impl CompiledFormula {
    pub fn new(f: &Formula) -> Self {
        Self::many(std::slice::from_ref(f))
    }

    /// Compiles several formulas into one DAG; [`label_all`](Self::label_all)
    /// returns their labels in the given order.
    pub fn many(formulas: &[Formula]) -> Self {
        let mut b = Builder {
            nodes: Vec::new(),
            index: HashMap::new(),
            atoms: Vec::new(),
            atom_index: HashMap::new(),
        };
        let roots = formulas.iter().map(|f| b.add(f)).collect();
        CompiledFormula {
            nodes: b.nodes,
            atoms: b.atoms,
            roots,
        }
    }

    /// Distinct subformulas after sharing.
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Labels of the first root.
    pub fn label(&self, t: &Trace) -> LabelSequence {
        self.label_all(t).swap_remove(0)
    }

    pub fn label_all(&self, t: &Trace) -> Vec<LabelSequence> {
        let n = t.len();
        self.label_with(n, |name| {
            LabelSequence::from_fn(n, |i| t.activity(i) == name)
        })
    }

    /// Labels every root over `n` instants, taking atom labels from `atom`.
    /// Lets callers supply valuations outside the one-activity-per-event model.
    pub fn label_with(
        &self,
        n: usize,
        mut atom: impl FnMut(&str) -> LabelSequence,
    ) -> Vec<LabelSequence> {
        let atoms: Vec<LabelSequence> = self.atoms.iter().map(|a| atom(a)).collect();
        let mut vals: Vec<LabelSequence> = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let v = match *node {
                Node::True => LabelSequence::ones(n),
                Node::False => LabelSequence::zeros(n),
                Node::Start => LabelSequence::from_fn(n, |i| i == 0),
                Node::End => LabelSequence::from_fn(n, |i| i + 1 == n),
                Node::Atom(k) => {
                    let a = atoms[k].clone();
                    assert_eq!(a.len(), n, "atom labels of wrong length");
                    a
                }
                Node::Not(x) => vals[x].not(),
                Node::And(a, b) => vals[a].and(&vals[b]),
                Node::Or(a, b) => vals[a].or(&vals[b]),
                Node::Implies(a, b) => vals[a].implies(&vals[b]),
                Node::Next(x) => vals[x].shift_next(),
                Node::Yesterday(x) => vals[x].shift_yesterday(),
                Node::Until(a, b) => until(&vals[a], &vals[b]),
                Node::Since(a, b) => since(&vals[a], &vals[b]),
                Node::Eventually(x) => {
                    let f = &vals[x];
                    let mut out = LabelSequence::zeros(n);
                    let mut acc = false;
                    for i in (0..n).rev() {
                        acc |= f.get(i);
                        out.set(i, acc);
                    }
                    out
                }
                Node::Once(x) => {
                    let f = &vals[x];
                    let mut out = LabelSequence::zeros(n);
                    let mut acc = false;
                    for i in 0..n {
                        acc |= f.get(i);
                        out.set(i, acc);
                    }
                    out
                }
                Node::Always(x) => {
                    let f = &vals[x];
                    let mut out = LabelSequence::zeros(n);
                    let mut acc = true;
                    for i in (0..n).rev() {
                        acc &= f.get(i);
                        out.set(i, acc);
                    }
                    out
                }
                Node::Historically(x) => {
                    let f = &vals[x];
                    let mut out = LabelSequence::zeros(n);
                    let mut acc = true;
                    for i in 0..n {
                        acc &= f.get(i);
                        out.set(i, acc);
                    }
                    out
                }
            };
            vals.push(v);
        }
        self.roots.iter().map(|&r| vals[r].clone()).collect()
    }
}

/// u[i] = f2[i] | (f1[i] & u[i+1]), u[n] = false.
fn until(f1: &LabelSequence, f2: &LabelSequence) -> LabelSequence {
    let n = f1.len();
    let mut out = LabelSequence::zeros(n);
    let mut next = false;
    for i in (0..n).rev() {
        next = f2.get(i) || (f1.get(i) && next);
        out.set(i, next);
    }
    out
}

/// s[i] = f2[i] | (f1[i] & s[i-1]), s[-1] = false.
fn since(f1: &LabelSequence, f2: &LabelSequence) -> LabelSequence {
    let n = f1.len();
    let mut out = LabelSequence::zeros(n);
    let mut prev = false;
    for i in 0..n {
        prev = f2.get(i) || (f1.get(i) && prev);
        out.set(i, prev);
    }
    out
}

/// Labels every instant of `t` with the truth of `f`.
pub fn label_formula(f: &Formula, t: &Trace) -> LabelSequence {
    CompiledFormula::new(f).label(t)
}

/// Truth of `f` at 1-based instant `i` of `t`, by direct recursion on the
/// semantics. Quadratic or worse; use [`label_formula`] for real work.
pub fn eval_at(f: &Formula, t: &Trace, i: usize) -> Result<bool> {
    let n = t.len();
    if i == 0 || i > n {
        return Err(Error::InstantOutOfRange { instant: i, len: n });
    }
    Ok(eval_valuation(
        f,
        n,
        &|a: &str, k: usize| t.activity(k - 1) == a,
        i,
    ))
}

/// [`eval_at`] over an arbitrary valuation `atom(name, instant)` with 1-based instants.
pub fn eval_valuation(f: &Formula, n: usize, atom: &dyn Fn(&str, usize) -> bool, i: usize) -> bool {
    use Formula as F;
    let ev = |g: &Formula, k: usize| eval_valuation(g, n, atom, k);
    match f {
        F::True => true,
        F::False => false,
        F::Start => i == 1,
        F::End => i == n,
        F::Atom(a) => atom(a, i),
        F::Not(g) => !ev(g, i),
        F::And(a, b) => ev(a, i) && ev(b, i),
        F::Or(a, b) => ev(a, i) || ev(b, i),
        F::Implies(a, b) => !ev(a, i) || ev(b, i),
        F::Next(g) => i < n && ev(g, i + 1),
        F::Yesterday(g) => i > 1 && ev(g, i - 1),
        F::Until(a, b) => (i..=n).any(|k| ev(b, k) && (i..k).all(|j| ev(a, j))),
        F::Since(a, b) => (1..=i).any(|k| ev(b, k) && (k + 1..=i).all(|j| ev(a, j))),
        F::Eventually(g) => (i..=n).any(|k| ev(g, k)),
        F::Once(g) => (1..=i).any(|k| ev(g, k)),
        F::Always(g) => (i..=n).all(|k| ev(g, k)),
        F::Historically(g) => (1..=i).all(|k| ev(g, k)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formula::parse_formula;
    use crate::logmodel::parse_trace_string;

    fn bits(s: &LabelSequence) -> Vec<u8> {
        s.iter().map(u8::from).collect()
    }

    fn lab(f: &str, t: &str) -> Vec<u8> {
        bits(&label_formula(
            &parse_formula(f).unwrap(),
            &parse_trace_string(t).unwrap(),
        ))
    }

    const T1: &str = "a,b,c,d,b,c,e,c,b";
    const T2: &str = "b,d,a,b,b,d,e,d,c";
    const T4: &str = "b,c,a,c,e,a";

    #[test]
    fn worked_labelings() {
        assert_eq!(lab("d & F e", T2), [0, 1, 0, 0, 0, 1, 0, 0, 0]);
        assert_eq!(lab("O a", T4), [0, 0, 1, 1, 1, 1]);
        assert_eq!(lab("true", T4), [1; 6]);
    }

    #[test]
    fn worked_instants() {
        let f = parse_formula("(X !e) U d").unwrap();
        let t1 = parse_trace_string(T1).unwrap();
        let t2 = parse_trace_string(T2).unwrap();
        assert!(eval_at(&f, &t1, 1).unwrap());
        // non-strict until: d at instant 6 satisfies it on the spot
        assert!(eval_at(&f, &t2, 6).unwrap());
        assert!(!eval_at(&f, &t2, 9).unwrap());
        assert!(eval_at(&parse_formula("d & F e").unwrap(), &t2, 6).unwrap());
        assert!(matches!(
            eval_at(&f, &t1, 0),
            Err(Error::InstantOutOfRange { .. })
        ));
        assert!(matches!(
            eval_at(&f, &t1, 10),
            Err(Error::InstantOutOfRange { .. })
        ));
    }

    #[test]
    fn next_and_yesterday_boundaries() {
        assert_eq!(lab("X true", "a,b,c"), [1, 1, 0]);
        assert_eq!(lab("Y true", "a,b,c"), [0, 1, 1]);
        assert_eq!(lab("Start", "a,b,c"), [1, 0, 0]);
        assert_eq!(lab("End", "a,b,c"), [0, 0, 1]);
    }

    #[test]
    fn mirrored_worked_pair() {
        // the past formula on the reversed trace gives the reversed labels
        let fut = lab("(X !e) U d", T4);
        let mut past = lab("(Y !e) S d", "a,e,c,a,c,b");
        past.reverse();
        assert_eq!(fut, past);
    }

    #[test]
    fn shifts_cross_word_boundaries() {
        let n = 130;
        let s = LabelSequence::from_fn(n, |i| i % 3 == 0 || i == 63 || i == 64);
        let nx = s.shift_next();
        let yd = s.shift_yesterday();
        for i in 0..n {
            assert_eq!(nx.get(i), i + 1 < n && s.get(i + 1), "next at {i}");
            assert_eq!(yd.get(i), i > 0 && s.get(i - 1), "yesterday at {i}");
        }
        assert_eq!(s.not().not(), s);
        assert_eq!(LabelSequence::ones(n).count_ones(), n as u64);
        assert_eq!(s.not().count_ones() + s.count_ones(), n as u64);
    }

    #[test]
    fn shared_subformulas_are_compiled_once() {
        let f = parse_formula("(F a & F a) | F a").unwrap();
        let c = CompiledFormula::new(&f);
        assert_eq!(c.node_count(), 4);
    }

    #[test]
    fn dp_matches_oracle_on_long_trace() {
        let t = parse_trace_string(&"a,b,c,a,a,b,c,c,b,a".repeat(9)).unwrap();
        for src in [
            "a U b",
            "!a S (b & Y c)",
            "G (a -> F b)",
            "H (c -> O a)",
            "X X End",
            "F (a & X b)",
        ] {
            let f = parse_formula(src).unwrap();
            let l = label_formula(&f, &t);
            for i in 0..t.len() {
                assert_eq!(
                    l.get(i),
                    eval_at(&f, &t, i + 1).unwrap(),
                    "{src} at {}",
                    i + 1
                );
            }
        }
    }
}
