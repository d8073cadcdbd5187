//! Events, traces and multiset event logs, plus CSV, XES and text loaders.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use chrono::{DateTime, FixedOffset, NaiveDate, NaiveDateTime};
use quick_xml::events::{BytesStart, Event as XmlEvent};
use quick_xml::Reader;
use serde::Serialize;

use crate::error::{Error, Result};

pub type Timestamp = DateTime<FixedOffset>;

/// One instant of a trace. Exactly one activity holds per event.
#[derive(Debug, Clone, PartialEq)]
pub struct Event {
    pub activity: String,
    pub timestamp: Option<Timestamp>,
    pub attributes: BTreeMap<String, String>,
}

impl Event {
    pub fn new(activity: impl Into<String>) -> Self {
        Event {
            activity: activity.into(),
            timestamp: None,
            attributes: BTreeMap::new(),
        }
    }
}

/// Non-empty sequence of events.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    events: Vec<Event>,
}

impl Trace {
    pub fn new(events: Vec<Event>) -> Result<Self> {
        if events.is_empty() {
            return Err(Error::InvalidTrace(
                "a trace needs at least one event".into(),
            ));
        }
        Ok(Trace { events })
    }

    /// Builds a trace from activity names.
    pub fn from_activities<I, S>(activities: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Trace::new(activities.into_iter().map(|a| Event::new(a)).collect())
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    /// Always false; kept for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn activity(&self, i: usize) -> &str {
        &self.events[i].activity
    }

    pub fn activities(&self) -> impl ExactSizeIterator<Item = &str> + '_ {
        self.events.iter().map(|e| e.activity.as_str())
    }

    pub fn reversed(&self) -> Trace {
        let mut events = self.events.clone();
        events.reverse();
        Trace { events }
    }

    fn key(&self) -> Vec<String> {
        self.events.iter().map(|e| e.activity.clone()).collect()
    }

    fn first_timestamp(&self) -> Option<Timestamp> {
        self.events.first().and_then(|e| e.timestamp)
    }
}

impl std::fmt::Display for Trace {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("<")?;
        for (i, a) in self.activities().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str(a)?;
        }
        f.write_str(">")
    }
}

/// Parses `a,b,c` into a trace. Tokens are trimmed.
pub fn parse_trace_string(text: &str) -> Result<Trace> {
    if text.trim().is_empty() {
        return Err(Error::InvalidTrace("empty trace string".into()));
    }
    let mut events = Vec::new();
    for (k, token) in text.split(',').enumerate() {
        let token = token.trim();
        if token.is_empty() {
            return Err(Error::InvalidTrace(format!(
                "empty activity at position {}",
                k + 1
            )));
        }
        events.push(Event::new(token));
    }
    Trace::new(events)
}

/// A unique trace with the number of cases that follow it.
#[derive(Debug, Clone, PartialEq)]
pub struct LogEntry {
    pub trace: Trace,
    pub multiplicity: u64,
}

/// One case of the original log, in ingestion order.
#[derive(Debug, Clone, PartialEq)]
pub struct CaseRecord {
    pub case_id: String,
    /// Index into [`EventLog::entries`].
    pub entry: usize,
    pub first_timestamp: Option<Timestamp>,
}

/// Multiset of traces. Entries are deduplicated on activity sequences; the
/// case view keeps the original order for windowing.
#[derive(Debug, Clone, PartialEq)]
pub struct EventLog {
    entries: Vec<LogEntry>,
    cases: Vec<CaseRecord>,
    skipped_empty: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LogSummary {
    pub unique_traces: usize,
    pub cardinality: u64,
    pub alphabet_size: usize,
    pub event_count: u64,
    pub skipped_empty: usize,
}

impl EventLog {
    /// Builds a log from `(trace, multiplicity)` pairs. Equal traces are merged.
    pub fn from_weighted<I>(traces: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Trace, u64)>,
    {
        let mut b = LogBuilder::default();
        for (k, (trace, mult)) in traces.into_iter().enumerate() {
            if mult == 0 {
                return Err(Error::InvalidArgument(format!(
                    "entry {} has multiplicity 0",
                    k + 1
                )));
            }
            for c in 0..mult {
                b.push_case(format!("{}.{}", k + 1, c + 1), trace.clone());
            }
        }
        b.finish()
    }

    /// Builds a log where every trace is one case.
    pub fn from_traces<I: IntoIterator<Item = Trace>>(traces: I) -> Result<Self> {
        EventLog::from_weighted(traces.into_iter().map(|t| (t, 1)))
    }

    pub fn entries(&self) -> &[LogEntry] {
        &self.entries
    }

    pub fn cases(&self) -> &[CaseRecord] {
        &self.cases
    }

    /// |L|: total number of cases.
    pub fn cardinality(&self) -> u64 {
        self.cases.len() as u64
    }

    pub fn skipped_empty(&self) -> usize {
        self.skipped_empty
    }

    /// Sorted distinct activity names.
    pub fn alphabet(&self) -> Vec<String> {
        let set: BTreeSet<&str> = self
            .entries
            .iter()
            .flat_map(|e| e.trace.activities())
            .collect();
        set.into_iter().map(str::to_owned).collect()
    }

    /// Sub-log made of the cases `range` of the ordered view.
    pub fn sub_log(&self, range: std::ops::Range<usize>) -> Result<EventLog> {
        let mut b = LogBuilder::default();
        for rec in &self.cases[range] {
            let mut trace = self.entries[rec.entry].trace.clone();
            // keep the case's own first timestamp for window labels
            if let Some(first) = trace.events.first_mut() {
                first.timestamp = rec.first_timestamp;
            }
            b.push_case(rec.case_id.clone(), trace);
        }
        b.finish()
    }

    /// Expands every entry into `multiplicity` separate entries of weight 1,
    /// bypassing deduplication.
    pub fn exploded(&self) -> EventLog {
        let mut entries = Vec::new();
        let mut cases = Vec::new();
        for rec in &self.cases {
            cases.push(CaseRecord {
                case_id: rec.case_id.clone(),
                entry: entries.len(),
                first_timestamp: rec.first_timestamp,
            });
            entries.push(LogEntry {
                trace: self.entries[rec.entry].trace.clone(),
                multiplicity: 1,
            });
        }
        EventLog {
            entries,
            cases,
            skipped_empty: self.skipped_empty,
        }
    }
}

pub fn log_summary(log: &EventLog) -> LogSummary {
    LogSummary {
        unique_traces: log.entries.len(),
        cardinality: log.cardinality(),
        alphabet_size: log.alphabet().len(),
        event_count: log
            .entries
            .iter()
            .map(|e| e.multiplicity * e.trace.len() as u64)
            .sum(),
        skipped_empty: log.skipped_empty,
    }
}

/// Accumulates cases and merges equal activity sequences.
#[derive(Debug, Default)]
pub struct LogBuilder {
    index: HashMap<Vec<String>, usize>,
    entries: Vec<LogEntry>,
    cases: Vec<CaseRecord>,
    skipped_empty: usize,
}

impl LogBuilder {
    pub fn push_case(&mut self, case_id: String, trace: Trace) {
        let first_timestamp = trace.first_timestamp();
        let next = self.entries.len();
        let entry = *self.index.entry(trace.key()).or_insert(next);
        if entry == next {
            self.entries.push(LogEntry {
                trace,
                multiplicity: 1,
            });
        } else {
            self.entries[entry].multiplicity += 1;
        }
        self.cases.push(CaseRecord {
            case_id,
            entry,
            first_timestamp,
        });
    }

    /// Records a case with no events; it is dropped with a warning.
    pub fn skip_empty(&mut self, case_id: &str) {
        log::warn!("skipping empty case `{case_id}`");
        self.skipped_empty += 1;
    }

    pub fn finish(self) -> Result<EventLog> {
        if self.cases.is_empty() {
            return Err(Error::EmptyLog);
        }
        if self.skipped_empty > 0 {
            log::warn!("{} empty case(s) skipped", self.skipped_empty);
        }
        Ok(EventLog {
            entries: self.entries,
            cases: self.cases,
            skipped_empty: self.skipped_empty,
        })
    }
}

/// Column names used by [`load_csv`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsvColumns {
    pub case_id: String,
    pub activity: String,
    /// When absent from the header, events keep file order.
    pub timestamp: Option<String>,
}

impl Default for CsvColumns {
    fn default() -> Self {
        CsvColumns {
            case_id: "case_id".into(),
            activity: "activity".into(),
            timestamp: Some("timestamp".into()),
        }
    }
}

/// Accepts RFC 3339, `YYYY-MM-DD HH:MM:SS[.f][±hh:mm]` and bare dates. Values
/// without an offset are read as UTC.
pub fn parse_timestamp(value: &str) -> Option<Timestamp> {
    let v = value.trim();
    if let Ok(t) = DateTime::parse_from_rfc3339(v) {
        return Some(t);
    }
    for fmt in ["%Y-%m-%d %H:%M:%S%.f%:z", "%Y-%m-%d %H:%M:%S%.f%z"] {
        if let Ok(t) = DateTime::parse_from_str(v, fmt) {
            return Some(t);
        }
    }
    for fmt in [
        "%Y-%m-%d %H:%M:%S%.f",
        "%Y-%m-%dT%H:%M:%S%.f",
        "%Y/%m/%d %H:%M:%S%.f",
        "%d-%m-%Y %H:%M:%S%.f",
    ] {
        if let Ok(t) = NaiveDateTime::parse_from_str(v, fmt) {
            return Some(t.and_utc().fixed_offset());
        }
    }
    NaiveDate::parse_from_str(v, "%Y-%m-%d")
        .ok()
        .and_then(|d| d.and_hms_opt(0, 0, 0))
        .map(|t| t.and_utc().fixed_offset())
}

pub fn load_csv(path: impl AsRef<Path>, columns: &CsvColumns) -> Result<EventLog> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, columns)
}

/// [`load_csv`] over any reader.
pub fn read_csv(input: impl std::io::Read, columns: &CsvColumns) -> Result<EventLog> {
    let mut rdr = csv::ReaderBuilder::new().flexible(false).from_reader(input);
    let headers = rdr.headers()?.clone();
    let find = |name: &str| headers.iter().position(|h| h.trim() == name);
    let case_col =
        find(&columns.case_id).ok_or_else(|| Error::MissingColumn(columns.case_id.clone()))?;
    let act_col =
        find(&columns.activity).ok_or_else(|| Error::MissingColumn(columns.activity.clone()))?;
    let ts_col = columns.timestamp.as_deref().and_then(find);
    if ts_col.is_none() {
        log::debug!("no timestamp column; keeping file order within cases");
    }

    let mut order: Vec<String> = Vec::new();
    let mut cases: HashMap<String, Vec<Event>> = HashMap::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let case_id = record.get(case_col).unwrap_or_default().to_string();
        let activity = record.get(act_col).unwrap_or_default().trim().to_string();
        let mut event = Event::new(activity);
        if let Some(c) = ts_col {
            let raw = record.get(c).unwrap_or_default();
            event.timestamp = Some(parse_timestamp(raw).ok_or_else(|| Error::Timestamp {
                value: raw.to_string(),
                line,
            })?);
        }
        for (k, (h, v)) in headers.iter().zip(record.iter()).enumerate() {
            if k != case_col && k != act_col && Some(k) != ts_col {
                event.attributes.insert(h.to_string(), v.to_string());
            }
        }
        match cases.get_mut(&case_id) {
            Some(events) => events.push(event),
            None => {
                order.push(case_id.clone());
                cases.insert(case_id, vec![event]);
            }
        }
    }

    let mut b = LogBuilder::default();
    for case_id in order {
        let mut events = cases.remove(&case_id).unwrap_or_default();
        events.retain(|e| !e.activity.is_empty());
        if events.is_empty() {
            b.skip_empty(&case_id);
            continue;
        }
        if ts_col.is_some() {
            events.sort_by_key(|e| e.timestamp);
        }
        b.push_case(case_id, Trace { events });
    }
    b.finish()
}

pub fn load_xes(path: impl AsRef<Path>) -> Result<EventLog> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_xes(BufReader::new(file))
}

#[derive(Default)]
struct XesTrace {
    case_id: Option<String>,
    events: Vec<Event>,
}

#[derive(Default)]
struct XesEvent {
    activity: Option<String>,
    timestamp: Option<Timestamp>,
    attributes: BTreeMap<String, String>,
}

fn attr(e: &BytesStart<'_>, name: &[u8]) -> Result<Option<String>> {
    for a in e.attributes() {
        let a = a.map_err(|err| Error::Xes(err.to_string()))?;
        if a.key.as_ref() == name {
            let v = a
                .unescape_value()
                .map_err(|err| Error::Xes(err.to_string()))?;
            return Ok(Some(v.into_owned()));
        }
    }
    Ok(None)
}

/// [`load_xes`] over any buffered reader.
pub fn read_xes(input: impl BufRead) -> Result<EventLog> {
    let mut reader = Reader::from_reader(input);
    let mut buf = Vec::new();
    // element stack depth relative to the current trace/event
    let mut depth: usize = 0;
    let mut trace: Option<(XesTrace, usize)> = None;
    let mut event: Option<(XesEvent, usize)> = None;
    let mut trace_index = 0usize;
    let mut b = LogBuilder::default();
    let mut saw_log = false;

    loop {
        let ev = reader
            .read_event_into(&mut buf)
            .map_err(|e| Error::Xes(format!("at byte {}: {e}", reader.error_position())))?;
        match ev {
            XmlEvent::Start(ref e) | XmlEvent::Empty(ref e) => {
                let is_empty = matches!(ev, XmlEvent::Empty(_));
                let name = e.local_name();
                let name = name.as_ref();
                if !is_empty {
                    depth += 1;
                }
                let level = if is_empty { depth + 1 } else { depth };
                match name {
                    b"log" => saw_log = true,
                    b"trace" if trace.is_none() && !is_empty => {
                        trace = Some((XesTrace::default(), level));
                    }
                    b"trace" if is_empty => {
                        b.skip_empty(&format!("trace {trace_index}"));
                        trace_index += 1;
                    }
                    b"event" if trace.is_some() && event.is_none() => {
                        if is_empty {
                            return Err(Error::MissingActivity {
                                trace: trace_index,
                                event: trace.as_ref().map_or(0, |t| t.0.events.len()),
                            });
                        }
                        event = Some((XesEvent::default(), level));
                    }
                    _ => {
                        let key = attr(e, b"key")?;
                        let Some(key) = key else { continue };
                        if let Some((ev, ev_level)) = event.as_mut() {
                            if level != *ev_level + 1 {
                                continue;
                            }
                            let value = attr(e, b"value")?.unwrap_or_default();
                            match (name, key.as_str()) {
                                (_, "concept:name") => ev.activity = Some(value),
                                (b"date", "time:timestamp") => {
                                    ev.timestamp =
                                        Some(parse_timestamp(&value).ok_or_else(|| {
                                            Error::Xes(format!("invalid time:timestamp `{value}`"))
                                        })?);
                                }
                                _ => {
                                    ev.attributes.insert(key, value);
                                }
                            }
                        } else if let Some((tr, tr_level)) = trace.as_mut() {
                            if level == *tr_level + 1 && key == "concept:name" {
                                tr.case_id = attr(e, b"value")?;
                            }
                        }
                    }
                }
            }
            XmlEvent::End(ref e) => {
                let name = e.local_name();
                match name.as_ref() {
                    b"event" if event.as_ref().is_some_and(|(_, l)| *l == depth) => {
                        let (ev, _) = event.take().expect("checked");
                        let (tr, _) = trace.as_mut().expect("event inside trace");
                        let activity = ev.activity.ok_or(Error::MissingActivity {
                            trace: trace_index,
                            event: tr.events.len(),
                        })?;
                        tr.events.push(Event {
                            activity,
                            timestamp: ev.timestamp,
                            attributes: ev.attributes,
                        });
                    }
                    b"trace" if trace.as_ref().is_some_and(|(_, l)| *l == depth) => {
                        let (tr, _) = trace.take().expect("checked");
                        let case_id = tr.case_id.unwrap_or_else(|| trace_index.to_string());
                        if tr.events.is_empty() {
                            b.skip_empty(&case_id);
                        } else {
                            b.push_case(case_id, Trace { events: tr.events });
                        }
                        trace_index += 1;
                    }
                    _ => {}
                }
                depth = depth.saturating_sub(1);
            }
            XmlEvent::Eof => break,
            _ => {}
        }
        buf.clear();
    }
    if !saw_log {
        return Err(Error::Xes("no <log> element".into()));
    }
    if trace.is_some() || depth != 0 {
        return Err(Error::Xes("unexpected end of document".into()));
    }
    b.finish()
}

/// Loads the compact text format: one trace per line as `multiplicity;a,b,c`
/// or `a,b,c`. Blank lines and lines starting with `#` are ignored.
pub fn load_text(path: impl AsRef<Path>) -> Result<EventLog> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_text(BufReader::new(file))
}

pub fn read_text(input: impl BufRead) -> Result<EventLog> {
    let mut b = LogBuilder::default();
    for (k, line) in input.lines().enumerate() {
        let line = line.map_err(|e| Error::io("<text log>", e))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let lineno = k + 1;
        let (mult, body) = match line.split_once(';') {
            Some((m, body)) => {
                let m: u64 = m.trim().parse().map_err(|_| {
                    Error::InvalidTrace(format!("line {lineno}: bad multiplicity `{}`", m.trim()))
                })?;
                if m == 0 {
                    return Err(Error::InvalidTrace(format!(
                        "line {lineno}: multiplicity 0"
                    )));
                }
                (m, body)
            }
            None => (1, line),
        };
        if body.trim().is_empty() {
            b.skip_empty(&format!("line {lineno}"));
            continue;
        }
        let trace = parse_trace_string(body)
            .map_err(|e| Error::InvalidTrace(format!("line {lineno}: {e}")))?;
        for c in 0..mult {
            b.push_case(format!("{lineno}.{}", c + 1), trace.clone());
        }
    }
    b.finish()
}

/// Writes a log in the compact text format, one line per unique trace.
pub fn write_text(log: &EventLog) -> String {
    let mut out = String::new();
    for e in &log.entries {
        out.push_str(&e.multiplicity.to_string());
        out.push(';');
        let acts: Vec<&str> = e.trace.activities().collect();
        out.push_str(&acts.join(","));
        out.push('\n');
    }
    out
}
