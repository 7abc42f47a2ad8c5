//! The `(t1, t2)` window grid and the parallel fitting scan over it.

use chrono::{Datelike, Duration, NaiveDate};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{fit_window, FitConfig, FitResult, Window};
use crate::market_data::{AssetMeta, PriceSeries};
use crate::model::QualificationFilter;
use crate::seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum T2Anchor {
    /// The latest window end is the last observation date.
    MostRecent,
}

/// Window grid in calendar days. Window starts are stepped back from each
/// window end (anchored per `t2`, not on a global lattice).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanGrid {
    pub dt1: u32,
    pub dt2: u32,
    pub min_len: u32,
    pub max_len: u32,
    pub t2_anchor: T2Anchor,
}

impl Default for ScanGrid {
    fn default() -> Self {
        Self { dt1: 7, dt2: 7, min_len: 91, max_len: 1092, t2_anchor: T2Anchor::MostRecent }
    }
}

impl ScanGrid {
    pub fn validate(&self) -> Result<()> {
        if self.dt1 == 0 || self.dt2 == 0 {
            return Err(Error::InvalidConfig("grid steps dt1/dt2 must be at least 1 day".into()));
        }
        if self.min_len == 0 || self.min_len > self.max_len {
            return Err(Error::InvalidConfig(format!(
                "grid lengths must satisfy 0 < min_len <= max_len, got {}..{}",
                self.min_len, self.max_len
            )));
        }
        Ok(())
    }
}

impl std::fmt::Display for ScanGrid {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "dt1={};dt2={};min_len={};max_len={};t2_anchor=most_recent;t1_anchor=per_t2",
            self.dt1, self.dt2, self.min_len, self.max_len
        )
    }
}

/// All grid windows, ordered by `t2` descending then length ascending.
pub fn enumerate_windows(series: &PriceSeries, grid: &ScanGrid) -> Result<Vec<Window>> {
    grid.validate()?;
    let (first, last) = (series.first_date(), series.last_date());
    let span = series.span_days();
    if span < i64::from(grid.min_len) {
        return Err(Error::SeriesTooShort { span_days: span, min_len: i64::from(grid.min_len) });
    }
    let mut windows = Vec::new();
    let mut t2 = last;
    while t2 - Duration::days(i64::from(grid.min_len)) >= first {
        let mut len = i64::from(grid.min_len);
        while len <= i64::from(grid.max_len) && t2 - Duration::days(len) >= first {
            windows.push(Window::new(t2 - Duration::days(len), t2));
            len += i64::from(grid.dt1);
        }
        t2 -= Duration::days(i64::from(grid.dt2));
    }
    Ok(windows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ScanCounts {
    pub windows_enumerated: usize,
    pub fits_converged: usize,
    pub fits_qualified: usize,
}

/// A window that produced no fit, with the reason.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowFailure {
    pub window: Window,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub tool_version: String,
    pub asset: AssetMeta,
    /// Day zero of every `tc` in the report.
    pub origin: NaiveDate,
    pub last_date: NaiveDate,
    pub grid: ScanGrid,
    pub grid_echo: String,
    pub filter: QualificationFilter,
    pub filter_echo: String,
    pub fit_config: FitConfig,
    pub fit_echo: String,
    pub counts: ScanCounts,
    pub fits: Vec<FitResult>,
    pub failures: Vec<WindowFailure>,
}

impl ScanReport {
    /// Latest window end in the grid.
    pub fn latest_t2(&self) -> NaiveDate {
        self.last_date
    }

    pub fn fits_ending_at(&self, t2: NaiveDate) -> impl Iterator<Item = &FitResult> {
        self.fits.iter().filter(move |f| f.window.t2 == t2)
    }

    pub fn windows_ending_at(&self, t2: NaiveDate) -> usize {
        self.fits_ending_at(t2).count() + self.failures.iter().filter(|f| f.window.t2 == t2).count()
    }

    pub fn qualified_fraction(&self) -> f64 {
        if self.counts.fits_converged == 0 {
            0.0
        } else {
            self.counts.fits_qualified as f64 / self.counts.fits_converged as f64
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scan report serializes")
    }
}

/// Seed for one window, independent of scheduling.
pub fn window_seed(base: u64, window: &Window) -> u64 {
    seed::derive(base, &[i64::from(window.t1.num_days_from_ce()), i64::from(window.t2.num_days_from_ce())])
}

/// Fits every grid window in parallel on the current rayon pool. The report
/// lists fits in enumeration order whatever the pool size.
pub fn scan(
    series: &PriceSeries,
    grid: &ScanGrid,
    fit_config: &FitConfig,
    filter: &QualificationFilter,
) -> Result<ScanReport> {
    fit_config.validate()?;
    filter.validate()?;
    let windows = enumerate_windows(series, grid)?;
    let log = series.to_log();

    let outcomes: Vec<Result<FitResult>> = windows
        .par_iter()
        .map(|w| fit_window(&log, *w, &fit_config.with_seed(window_seed(fit_config.seed, w)), filter))
        .collect();

    let mut fits = Vec::new();
    let mut failures = Vec::new();
    for (window, outcome) in windows.iter().zip(outcomes) {
        match outcome {
            Ok(fit) => fits.push(fit),
            Err(e) => failures.push(WindowFailure { window: *window, reason: e.to_string() }),
        }
    }
    let counts = ScanCounts {
        windows_enumerated: windows.len(),
        fits_converged: fits.iter().filter(|f| f.converged).count(),
        fits_qualified: fits.iter().filter(|f| f.qualified).count(),
    };
    Ok(ScanReport {
        tool_version: crate::TOOL_VERSION.to_string(),
        asset: series.meta().clone(),
        origin: series.first_date(),
        last_date: series.last_date(),
        grid: *grid,
        grid_echo: grid.to_string(),
        filter: *filter,
        filter_echo: filter.to_string(),
        fit_config: *fit_config,
        fit_echo: fit_config.to_string(),
        counts,
        fits,
        failures,
    })
}
