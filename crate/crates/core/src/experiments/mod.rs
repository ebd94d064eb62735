//! Reproducible experiment runs producing CSV/JSON reports and SVG plots.
//!
//! Each run fans its grid cells out over the rayon pool. A cell's random
//! streams derive from `(seed, experiment name, cell index)`, and results are
//! reduced in cell order, so the report files other than `*.timing.json` are
//! identical for any thread count.

mod report;
mod runs;
mod svg;

pub use report::{
    fmt_num, read_report_csv, table_csv, ExperimentReport, PlotSpec, Record, Table, Timing,
};
pub use runs::*;
pub use svg::line_plot;

use std::time::{Instant, SystemTime, UNIX_EPOCH};

use rayon::prelude::*;

pub const EXPERIMENT_NAMES: [&str; 7] = [
    "nonlinearity_grid",
    "noise_monotonicity",
    "mixture_accumulation",
    "power_suite",
    "threshold_comparison",
    "robustness",
    "timing",
];

/// Runs `f` on every cell index in parallel, returning outputs in index
/// order together with per-cell milliseconds.
pub(crate) fn run_cells<T, F>(count: usize, f: F) -> (Vec<T>, Timing)
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let started_unix_ms = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis())
        .unwrap_or(0);
    let t0 = Instant::now();
    let out: Vec<(T, f64)> = (0..count)
        .into_par_iter()
        .map(|i| {
            let c0 = Instant::now();
            let v = f(i);
            (v, c0.elapsed().as_secs_f64() * 1e3)
        })
        .collect();
    let (values, cell_ms): (Vec<T>, Vec<f64>) = out.into_iter().unzip();
    let timing = Timing {
        started_unix_ms,
        total_ms: t0.elapsed().as_secs_f64() * 1e3,
        cell_ms,
    };
    (values, timing)
}
