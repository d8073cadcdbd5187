//! Windowed measure series over the case order of a log.

use std::cmp::Ordering;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimators::log_mass;
use crate::logmodel::{EventLog, Timestamp};
use crate::measures::{compute_measure, normalize, Measure, ProbabilityBundle, Scope};
use crate::parallel::Execution;
use crate::specification::{CompiledSpec, SpecMode, Specification};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowStart {
    pub index: usize,
    /// Offset of the first case in the ordered view.
    pub offset: usize,
    pub first_case: String,
    pub timestamp: Option<Timestamp>,
}

#[derive(Debug, Clone)]
pub struct Window {
    pub start: WindowStart,
    pub log: EventLog,
}

/// Full windows of `size` consecutive cases starting every `slide` cases.
/// Returns the windows and the number of trailing cases left out.
pub fn slice_log(log: &EventLog, size: usize, slide: usize) -> Result<(Vec<Window>, usize)> {
    if size == 0 || slide == 0 {
        return Err(Error::InvalidArgument(
            "window size and slide must be positive".into(),
        ));
    }
    let n = log.cases().len();
    if size > n {
        return Err(Error::WindowTooLarge { size, traces: n });
    }
    let mut windows = Vec::new();
    let mut offset = 0;
    while offset + size <= n {
        let first = &log.cases()[offset];
        windows.push(Window {
            start: WindowStart {
                index: windows.len(),
                offset,
                first_case: first.case_id.clone(),
                timestamp: first.first_timestamp,
            },
            log: log.sub_log(offset..offset + size)?,
        });
        offset += slide;
    }
    let covered = offset - slide + size;
    Ok((windows, n - covered))
}

/// Per-window values, one row per measure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WindowSeries {
    pub starts: Vec<WindowStart>,
    pub measures: Vec<Measure>,
    pub normalized: bool,
    /// `values[m][w]`: measure `m` on window `w`.
    pub values: Vec<Vec<f64>>,
}

pub fn measure_series(
    s: &Specification,
    windows: &[Window],
    measures: &[Measure],
    mode: SpecMode,
    normalized: bool,
    exec: Execution,
) -> WindowSeries {
    let spec = CompiledSpec::new(s, mode);
    let per_window: Vec<Vec<f64>> = exec.map(windows, |w| {
        let mass = log_mass(spec.pair(), &w.log, Execution::Sequential);
        let b = ProbabilityBundle::from_mass(&mass, Scope::Log);
        measures
            .iter()
            .map(|&m| {
                let v = compute_measure(m, &b);
                if normalized {
                    normalize(v, m.range())
                } else {
                    v
                }
            })
            .collect()
    });
    let values = (0..measures.len())
        .map(|k| per_window.iter().map(|row| row[k]).collect())
        .collect();
    WindowSeries {
        starts: windows.iter().map(|w| w.start.clone()).collect(),
        measures: measures.to_vec(),
        normalized,
        values,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesStats {
    pub measure: Measure,
    pub mean: f64,
    /// Population standard deviation.
    pub std_dev: f64,
    /// `std_dev / mean`; `NaN` when the mean is zero.
    pub cv: f64,
    /// Windows that entered the statistics.
    pub count: usize,
    /// Windows skipped because their value was `NaN`.
    pub excluded: usize,
}

/// Mean, population standard deviation and coefficient of variation of the
/// non-`NaN` values.
pub fn stats_of(measure: Measure, values: &[f64]) -> SeriesStats {
    let kept: Vec<f64> = values.iter().copied().filter(|v| !v.is_nan()).collect();
    let count = kept.len();
    let excluded = values.len() - count;
    if count == 0 {
        return SeriesStats {
            measure,
            mean: f64::NAN,
            std_dev: f64::NAN,
            cv: f64::NAN,
            count,
            excluded,
        };
    }
    let mean = kept.iter().sum::<f64>() / count as f64;
    let var = kept.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / count as f64;
    let std_dev = var.sqrt();
    let cv = if mean == 0.0 {
        f64::NAN
    } else {
        std_dev / mean
    };
    SeriesStats {
        measure,
        mean,
        std_dev,
        cv,
        count,
        excluded,
    }
}

/// Statistics per measure, sorted by [`rank_stats`].
pub fn series_stats(series: &WindowSeries) -> Vec<SeriesStats> {
    let mut rows: Vec<SeriesStats> = series
        .measures
        .iter()
        .zip(&series.values)
        .map(|(&m, v)| stats_of(m, v))
        .collect();
    rank_stats(&mut rows);
    rows
}

/// Descending, `NaN` after every number.
fn desc_nan_last(a: f64, b: f64) -> Ordering {
    match (a.is_nan(), b.is_nan()) {
        (true, true) => Ordering::Equal,
        (true, false) => Ordering::Greater,
        (false, true) => Ordering::Less,
        (false, false) => b.partial_cmp(&a).expect("not NaN"),
    }
}

/// Sorts by descending cv, then std, then mean, `NaN` last; ties keep catalog order.
pub fn rank_stats(rows: &mut [SeriesStats]) {
    rows.sort_by(|x, y| {
        desc_nan_last(x.cv, y.cv)
            .then_with(|| desc_nan_last(x.std_dev, y.std_dev))
            .then_with(|| desc_nan_last(x.mean, y.mean))
            .then_with(|| x.measure.cmp(&y.measure))
    });
}
