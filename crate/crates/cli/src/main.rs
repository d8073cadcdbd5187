use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rfmeasure::report::{series_csv, series_json, stats_csv, sweep_csv};
use rfmeasure::specfile::SpecDoc;
use rfmeasure::{
    build_report, discover, load_csv, load_spec, load_text, load_xes, log_summary, measure_series,
    parse_sweep, series_stats, slice_log, threshold_sweep, CsvColumns, EventLog, Execution,
    Measure, MinerConfig, SpecMode, Template,
};

#[derive(Parser)]
#[command(
    name = "rfmeasure",
    version,
    about = "Measure temporal rules and specifications on event logs"
)]
struct Cli {
    /// Worker threads for trace labeling; 0 picks one per core.
    #[arg(long, global = true, env = "RFMEASURE_THREADS", default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rule and specification measures at log scope, optionally per trace.
    Measure(MeasureArgs),
    /// Specification measures over consecutive windows of cases.
    Windows(WindowsArgs),
    /// Discover template rules that reach a Confidence threshold.
    Mine(MineArgs),
    /// List the template catalog.
    Templates,
}

#[derive(Args)]
struct LogArgs {
    #[arg(long)]
    log: PathBuf,
    /// Inferred from the extension when omitted.
    #[arg(long, value_enum)]
    log_format: Option<LogFormat>,
    #[arg(long, default_value = "case_id")]
    case_column: String,
    #[arg(long, default_value = "activity")]
    activity_column: String,
    /// Events keep file order when the column is absent.
    #[arg(long, default_value = "timestamp")]
    timestamp_column: String,
}

#[derive(Args)]
struct MeasureArgs {
    #[command(flatten)]
    log: LogArgs,
    #[arg(long)]
    spec: PathBuf,
    /// Comma-separated measure names, or `all`.
    #[arg(long, default_value = "all")]
    measures: String,
    #[arg(long, value_enum, default_value_t = ModeArg::Table)]
    mode: ModeArg,
    #[arg(long, value_enum, default_value_t = ScopeArg::Log)]
    scope: ScopeArg,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct WindowsArgs {
    #[command(flatten)]
    log: LogArgs,
    #[arg(long)]
    spec: PathBuf,
    #[arg(long, default_value = "all")]
    measures: String,
    #[arg(long, value_enum, default_value_t = ModeArg::Table)]
    mode: ModeArg,
    /// Cases per window.
    #[arg(long)]
    size: usize,
    /// Cases between window starts; equal to `--size` for tumbling windows.
    #[arg(long)]
    slide: usize,
    /// Rescale every measure to [0, 1].
    #[arg(long)]
    normalized: bool,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Series output; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Statistics table (CSV format only); standard error when omitted.
    #[arg(long)]
    stats: Option<PathBuf>,
}

#[derive(Args)]
struct MineArgs {
    #[command(flatten)]
    log: LogArgs,
    /// Comma-separated template names, or `all`.
    #[arg(long, default_value = "all")]
    templates: String,
    #[arg(long, default_value_t = 0.8)]
    confidence: f64,
    /// Specification name written into the output.
    #[arg(long, default_value = "mined")]
    name: String,
    /// Specification file; standard output when omitted and no sweep is requested.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Threshold range `start:end:step`.
    #[arg(long)]
    sweep: Option<String>,
    /// Sweep table; standard output when omitted.
    #[arg(long)]
    sweep_out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum LogFormat {
    Xes,
    Csv,
    Txt,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Formal,
    Table,
}

impl From<ModeArg> for SpecMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Formal => SpecMode::Formal,
            ModeArg::Table => SpecMode::Table,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ScopeArg {
    Log,
    Trace,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

/// Failure with its exit code: 2 for unusable input, 1 for anything else.
struct Failure {
    code: u8,
    message: String,
}

impl From<rfmeasure::Error> for Failure {
    fn from(e: rfmeasure::Error) -> Self {
        Failure {
            code: 2,
            message: e.to_string(),
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> Failure {
    Failure {
        code: 2,
        message: format!("{}: {e}", path.display()),
    }
}

type Outcome = Result<(), Failure>;

fn load_log(args: &LogArgs) -> Result<EventLog, Failure> {
    let path = &args.log;
    let ext = path
        .extension()
        .map(|e| e.to_string_lossy().to_lowercase())
        .unwrap_or_default();
    let format = match (args.log_format, ext.as_str()) {
        (Some(f), _) => f,
        (None, "xes") => LogFormat::Xes,
        (None, "csv") => LogFormat::Csv,
        (None, "gz") => {
            return Err(Failure {
                code: 2,
                message: format!(
                    "{}: compressed logs are not supported, decompress first",
                    path.display()
                ),
            })
        }
        (None, _) => LogFormat::Txt,
    };
    let log = match format {
        LogFormat::Xes => load_xes(path)?,
        LogFormat::Txt => load_text(path)?,
        LogFormat::Csv => load_csv(
            path,
            &CsvColumns {
                case_id: args.case_column.clone(),
                activity: args.activity_column.clone(),
                timestamp: Some(args.timestamp_column.clone()),
            },
        )?,
    };
    let s = log_summary(&log);
    log::info!("{}: {:?}", path.display(), s);
    Ok(log)
}

fn emit(out: Option<&Path>, text: &str) -> Outcome {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| io_failure(p, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn measure(a: MeasureArgs, exec: Execution) -> Outcome {
    let measures = Measure::parse_list(&a.measures)?;
    let spec = load_spec(&a.spec)?;
    let log = load_log(&a.log)?;
    let report = build_report(
        &spec,
        &log,
        &measures,
        a.mode.into(),
        a.scope == ScopeArg::Trace,
        exec,
    );
    let text = match a.format {
        Format::Json => report.to_json(),
        Format::Csv => report.to_csv(),
    };
    emit(a.out.as_deref(), &text)
}

fn windows(a: WindowsArgs, exec: Execution) -> Outcome {
    let measures = Measure::parse_list(&a.measures)?;
    let spec = load_spec(&a.spec)?;
    let log = load_log(&a.log)?;
    let (wins, dropped) = slice_log(&log, a.size, a.slide)?;
    if dropped > 0 {
        log::warn!("{dropped} trailing case(s) do not fill a window and are left out");
    }
    let series = measure_series(&spec, &wins, &measures, a.mode.into(), a.normalized, exec);
    let stats = series_stats(&series);
    match a.format {
        Format::Json => emit(a.out.as_deref(), &series_json(&series, &stats, dropped)),
        Format::Csv => {
            emit(a.out.as_deref(), &series_csv(&series))?;
            let table = stats_csv(&stats);
            match &a.stats {
                Some(p) => std::fs::write(p, table).map_err(|e| io_failure(p, e)),
                None => {
                    eprint!("{table}");
                    Ok(())
                }
            }
        }
    }
}

fn parse_templates(list: &str) -> Result<Vec<Template>, Failure> {
    if list.trim().eq_ignore_ascii_case("all") {
        return Ok(Template::ALL.to_vec());
    }
    let mut out = Vec::new();
    for part in list.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let t = Template::lookup(part)?;
        if !out.contains(&t) {
            out.push(t);
        }
    }
    Ok(out)
}

fn mine(a: MineArgs, exec: Execution) -> Outcome {
    let cfg = MinerConfig::new(parse_templates(&a.templates)?, a.confidence)?;
    let thresholds = a.sweep.as_deref().map(parse_sweep).transpose()?;
    let log = load_log(&a.log)?;
    let result = discover(&log, &cfg, exec)?;
    if result.is_empty() {
        log::warn!(
            "no rule reaches Confidence {} among {} candidates",
            cfg.threshold,
            result.candidates
        );
    }
    let doc = SpecDoc::from_discovery(&a.name, &result).to_json();
    match thresholds {
        None => emit(a.out.as_deref(), &doc),
        Some(ts) => {
            if let Some(p) = &a.out {
                emit(Some(p), &doc)?;
            }
            let rows = threshold_sweep(&log, &cfg, &ts, exec)?;
            emit(a.sweep_out.as_deref(), &sweep_csv(&rows))
        }
    }
}

fn templates() -> Outcome {
    let mut text = String::new();
    for t in Template::ALL {
        text.push_str(&format!("{:<20} {}\n", t.name(), t.pattern()));
    }
    emit(None, &text)
}

#[cfg(feature = "parallel")]
fn run_with_threads(threads: usize, f: impl FnOnce(Execution) -> Outcome + Send) -> Outcome {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Failure {
            code: 1,
            message: format!("thread pool: {e}"),
        })?;
    pool.install(|| f(Execution::Parallel))
}

#[cfg(not(feature = "parallel"))]
fn run_with_threads(threads: usize, f: impl FnOnce(Execution) -> Outcome + Send) -> Outcome {
    if threads > 1 {
        log::warn!("built without the `parallel` feature, running on one thread");
    }
    f(Execution::Sequential)
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Measure(a) => run_with_threads(cli.threads, |e| measure(a, e)),
        Command::Windows(a) => run_with_threads(cli.threads, |e| windows(a, e)),
        Command::Mine(a) => run_with_threads(cli.threads, |e| mine(a, e)),
        Command::Templates => templates(),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| run(cli))) {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(f)) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
        Err(_) => ExitCode::from(1),
    }
}
