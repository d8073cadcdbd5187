//! Shared test support: a definitional reference evaluator, seeded generators
//! and the small logs used across suites.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rfmeasure::{read_text, EventLog, Formula, ReactiveForm, Specification, Trace};

pub type TestRng = ChaCha8Rng;

pub fn rng(seed: u64) -> TestRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Truth of `f` at every instant (0-based) of a length-`n` valuation,
/// straight from the quantifier definitions. Quadratic per node.
pub fn oracle(f: &Formula, n: usize, atom: &dyn Fn(&str, usize) -> bool) -> Vec<bool> {
    use Formula::*;
    let un = |g: &Formula| oracle(g, n, atom);
    match f {
        True => vec![true; n],
        False => vec![false; n],
        Start => (0..n).map(|i| i == 0).collect(),
        End => (0..n).map(|i| i + 1 == n).collect(),
        Atom(a) => (0..n).map(|i| atom(a, i)).collect(),
        Not(g) => un(g).into_iter().map(|x| !x).collect(),
        And(g, h) => zip(&un(g), &un(h), |x, y| x && y),
        Or(g, h) => zip(&un(g), &un(h), |x, y| x || y),
        Implies(g, h) => zip(&un(g), &un(h), |x, y| !x || y),
        Next(g) => {
            let v = un(g);
            (0..n).map(|i| i + 1 < n && v[i + 1]).collect()
        }
        Yesterday(g) => {
            let v = un(g);
            (0..n).map(|i| i > 0 && v[i - 1]).collect()
        }
        Until(g, h) => {
            let (a, b) = (un(g), un(h));
            (0..n)
                .map(|i| (i..n).any(|j| b[j] && (i..j).all(|k| a[k])))
                .collect()
        }
        Since(g, h) => {
            let (a, b) = (un(g), un(h));
            (0..n)
                .map(|i| (0..=i).any(|j| b[j] && (j + 1..=i).all(|k| a[k])))
                .collect()
        }
        Eventually(g) => {
            let v = un(g);
            (0..n).map(|i| (i..n).any(|j| v[j])).collect()
        }
        Once(g) => {
            let v = un(g);
            (0..n).map(|i| (0..=i).any(|j| v[j])).collect()
        }
        Always(g) => {
            let v = un(g);
            (0..n).map(|i| (i..n).all(|j| v[j])).collect()
        }
        Historically(g) => {
            let v = un(g);
            (0..n).map(|i| (0..=i).all(|j| v[j])).collect()
        }
    }
}

fn zip(a: &[bool], b: &[bool], op: impl Fn(bool, bool) -> bool) -> Vec<bool> {
    a.iter().zip(b).map(|(&x, &y)| op(x, y)).collect()
}

pub fn oracle_trace(f: &Formula, t: &Trace) -> Vec<bool> {
    oracle(f, t.len(), &|a, i| t.activity(i) == a)
}

/// Unary operators, as constructors that never simplify.
pub const UNARY: [fn(Formula) -> Formula; 7] = [
    |f| Formula::Not(Box::new(f)),
    |f| Formula::Next(Box::new(f)),
    |f| Formula::Yesterday(Box::new(f)),
    |f| Formula::Eventually(Box::new(f)),
    |f| Formula::Once(Box::new(f)),
    |f| Formula::Always(Box::new(f)),
    |f| Formula::Historically(Box::new(f)),
];

pub const BINARY: [fn(Formula, Formula) -> Formula; 5] = [
    |f, g| Formula::And(Box::new(f), Box::new(g)),
    |f, g| Formula::Or(Box::new(f), Box::new(g)),
    |f, g| Formula::Implies(Box::new(f), Box::new(g)),
    |f, g| Formula::Until(Box::new(f), Box::new(g)),
    |f, g| Formula::Since(Box::new(f), Box::new(g)),
];

pub fn leaves(atoms: &[&str]) -> Vec<Formula> {
    let mut out = vec![Formula::True, Formula::False, Formula::Start, Formula::End];
    out.extend(atoms.iter().map(|a| Formula::atom(*a)));
    out
}

/// Random formula of depth at most `depth` over the full operator set.
pub fn random_formula(rng: &mut TestRng, depth: usize, atoms: &[&str]) -> Formula {
    if depth == 0 || rng.gen_bool(0.2) {
        return leaves(atoms).choose(rng).expect("non-empty").clone();
    }
    if rng.gen_bool(0.5) {
        let op = UNARY[rng.gen_range(0..UNARY.len())];
        op(random_formula(rng, depth - 1, atoms))
    } else {
        let op = BINARY[rng.gen_range(0..BINARY.len())];
        let l = random_formula(rng, depth - 1, atoms);
        op(l, random_formula(rng, depth - 1, atoms))
    }
}

pub fn random_trace(rng: &mut TestRng, min_len: usize, max_len: usize, alphabet: &[&str]) -> Trace {
    let n = rng.gen_range(min_len.max(1)..=max_len);
    Trace::from_activities((0..n).map(|_| *alphabet.choose(rng).expect("non-empty")))
        .expect("n >= 1")
}

/// Up to `max_unique` distinct-by-construction entries with multiplicities in 1..=`max_mult`.
pub fn random_log(
    rng: &mut TestRng,
    max_unique: usize,
    max_len: usize,
    max_mult: u64,
    alphabet: &[&str],
) -> EventLog {
    let k = rng.gen_range(1..=max_unique);
    EventLog::from_weighted((0..k).map(|_| {
        let t = random_trace(rng, 1, max_len, alphabet);
        (t, rng.gen_range(1..=max_mult))
    }))
    .expect("non-empty")
}

/// Every trace of length `1..=max_len` over `alphabet`.
pub fn all_traces(max_len: usize, alphabet: &[&str]) -> Vec<Trace> {
    let mut out = Vec::new();
    let mut layer: Vec<Vec<&str>> = vec![vec![]];
    for _ in 0..max_len {
        layer = layer
            .iter()
            .flat_map(|p| {
                alphabet.iter().map(move |a| {
                    let mut q = p.clone();
                    q.push(*a);
                    q
                })
            })
            .collect();
        out.extend(
            layer
                .iter()
                .map(|p| Trace::from_activities(p.iter().copied()).expect("non-empty")),
        );
    }
    out
}

pub fn log_from(text: &str) -> EventLog {
    read_text(text.as_bytes()).expect("fixture parses")
}

/// Running-example log: five traces, multiplicities 17, 6, 5, 12, 5.
pub const RUNNING_LOG: &str = "\
17;a,b,c,d,b,c,e,c,b
6;b,d,a,b,b,d,e,d,c
5;c,d,a,b,c,e,b,c,b,c
12;b,c,a,c,e,a
5;b,b,b
";

pub fn running_log() -> EventLog {
    log_from(RUNNING_LOG)
}

/// `c |> O a` and `d |> F e`.
pub fn running_rules() -> Vec<ReactiveForm> {
    vec![
        ReactiveForm::named(
            "Psi1",
            Formula::atom("c"),
            Formula::once(Formula::atom("a")),
        ),
        ReactiveForm::named(
            "Psi2",
            Formula::atom("d"),
            Formula::eventually(Formula::atom("e")),
        ),
    ]
}

pub fn running_spec() -> Specification {
    Specification::new("S", running_rules()).expect("non-empty")
}

/// Six `true |> !z` rules over two traces with multiplicities 5 and 10.
pub const JOINT_LOG: &str = "5;a,b,c,d,e,f\n10;a,y,y,y,e,f\n";

pub fn joint_log() -> EventLog {
    log_from(JOINT_LOG)
}

pub fn joint_rules() -> Vec<ReactiveForm> {
    ["a", "b", "c", "d", "e", "f"]
        .iter()
        .enumerate()
        .map(|(k, z)| {
            ReactiveForm::named(
                format!("Psi{}", k + 1),
                Formula::True,
                Formula::not(Formula::atom(*z)),
            )
        })
        .collect()
}

pub fn joint_spec() -> Specification {
    Specification::new("S", joint_rules()).expect("non-empty")
}

/// `a` occurs 100 times and is always answered by `b`; `c` occurs twice and
/// is answered by `d` once. Every trace has length 2, so event weights agree.
pub const SKEWED_LOG: &str = "100;a,b\n1;c,d\n1;b,c\n";

/// Two rules at Confidence 0.9 on one activator whose violations fall on
/// different traces, so the pair is jointly at 0.8.
pub const WHOLE_VS_PARTS_LOG: &str = "8;a,b,c\n1;a,b,b\n1;a,c,c\n";

/// Proptest strategy over formulas of depth at most `depth`, with shrinking.
pub fn formula_strategy(
    depth: u32,
    atoms: &'static [&'static str],
) -> proptest::strategy::BoxedStrategy<Formula> {
    use proptest::prelude::*;
    let leaf = proptest::sample::select(leaves(atoms));
    leaf.prop_recursive(depth, 64, 2, |inner| {
        prop_oneof![
            (0..UNARY.len(), inner.clone()).prop_map(|(k, f)| UNARY[k](f)),
            (0..BINARY.len(), inner.clone(), inner).prop_map(|(k, f, g)| BINARY[k](f, g)),
        ]
    })
    .boxed()
}

pub fn trace_strategy(
    max_len: usize,
    alphabet: &'static [&'static str],
) -> proptest::strategy::BoxedStrategy<Trace> {
    use proptest::prelude::*;
    proptest::collection::vec(proptest::sample::select(alphabet), 1..=max_len)
        .prop_map(|v| Trace::from_activities(v).expect("non-empty"))
        .boxed()
}

pub fn log_strategy(
    max_unique: usize,
    max_len: usize,
    max_mult: u64,
    alphabet: &'static [&'static str],
) -> proptest::strategy::BoxedStrategy<EventLog> {
    use proptest::prelude::*;
    proptest::collection::vec(
        (trace_strategy(max_len, alphabet), 1..=max_mult),
        1..=max_unique,
    )
    .prop_map(|v| EventLog::from_weighted(v).expect("non-empty"))
    .boxed()
}
