//! Sequential against data-parallel execution on the same inputs. Without the
//! `parallel` feature both arms run sequentially.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use rfmeasure::estimators::log_mass;
use rfmeasure::specification::CompiledSpec;
use rfmeasure::{
    build_report, discover, measure_series, parse_formula, slice_log, EventLog, Execution, Measure,
    MinerConfig, SpecMode, Specification, Template,
};
use rfmeasure_testkit::{random_log, rng};

const ALPHABET: [&str; 8] = ["a", "b", "c", "d", "e", "f", "g", "h"];
const MODES: [(&str, Execution); 2] = [
    ("sequential", Execution::Sequential),
    ("parallel", Execution::Parallel),
];

fn spec() -> Specification {
    let rules = [
        "Response(a,b)",
        "Precedence(c,d)",
        "AlternateResponse(e,f)",
        "ChainResponse(g,h)",
        "NotResponse(h,a)",
    ];
    let mut rfs = Vec::new();
    for r in rules {
        rfs.extend(
            rfmeasure::specfile::SpecDoc::parse(r)
                .unwrap()
                .to_specification("S")
                .unwrap()
                .rfs()
                .to_vec(),
        );
    }
    rfs.push(rfmeasure::ReactiveForm::new(
        parse_formula("b & !Start").unwrap(),
        parse_formula("(!c U d) | G !c").unwrap(),
    ));
    Specification::new("bench", rfs).unwrap()
}

fn log(unique: usize, max_len: usize) -> EventLog {
    random_log(&mut rng(42), unique, max_len, 50, &ALPHABET)
}

fn labeling(c: &mut Criterion) {
    let s = spec();
    let pair = CompiledSpec::new(&s, SpecMode::Table);
    let mut g = c.benchmark_group("log_mass");
    for (unique, max_len) in [(500, 40), (4000, 120)] {
        let l = log(unique, max_len);
        let events: u64 = l.entries().iter().map(|e| e.trace.len() as u64).sum();
        g.throughput(Throughput::Elements(events));
        for (name, exec) in MODES {
            g.bench_with_input(BenchmarkId::new(name, unique), &l, |b, l| {
                b.iter(|| black_box(log_mass(pair.pair(), l, exec)))
            });
        }
    }
    g.finish();
}

fn report(c: &mut Criterion) {
    let s = spec();
    let l = log(2000, 80);
    let mut g = c.benchmark_group("report_per_trace");
    g.sample_size(20);
    for (name, exec) in MODES {
        g.bench_function(name, |b| {
            b.iter(|| {
                black_box(build_report(
                    &s,
                    &l,
                    &Measure::ALL,
                    SpecMode::Table,
                    true,
                    exec,
                ))
            })
        });
    }
    g.finish();
}

fn windows(c: &mut Criterion) {
    let s = spec();
    let l = log(2000, 60);
    let (wins, _) = slice_log(&l, 50, 25).unwrap();
    let mut g = c.benchmark_group("windows");
    for (name, exec) in MODES {
        g.bench_function(name, |b| {
            b.iter(|| {
                black_box(measure_series(
                    &s,
                    &wins,
                    &Measure::ALL,
                    SpecMode::Table,
                    false,
                    exec,
                ))
            })
        });
    }
    g.finish();
}

fn mining(c: &mut Criterion) {
    let l = log(800, 40);
    let cfg = MinerConfig::new(Template::ALL.to_vec(), 0.8).unwrap();
    let mut g = c.benchmark_group("discover");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(name, |b| {
            b.iter(|| black_box(discover(&l, &cfg, exec).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, labeling, report, windows, mining);
criterion_main!(benches);
