//! Daily price series: CSV ingestion, validation, slicing, log transform and
//! close-to-close return signs.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Identifying metadata carried alongside a series.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct AssetMeta {
    pub name: String,
    pub ticker: String,
    /// Data vendor tag, e.g. `Y` (Yahoo Finance) or `B` (Bloomberg).
    pub source: String,
}

impl AssetMeta {
    pub fn new(name: impl Into<String>, ticker: impl Into<String>, source: impl Into<String>) -> Self {
        Self { name: name.into(), ticker: ticker.into(), source: source.into() }
    }
}

/// Dated, strictly positive daily closes for one asset.
///
/// Dates are strictly increasing and there are always at least two
/// observations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PriceSeries {
    meta: AssetMeta,
    dates: Vec<NaiveDate>,
    closes: Vec<f64>,
}

impl PriceSeries {
    /// Builds a series from observations already in date order.
    pub fn new(meta: AssetMeta, observations: Vec<(NaiveDate, f64)>) -> Result<Self> {
        if observations.len() < 2 {
            return Err(Error::TooFewObservations(observations.len()));
        }
        let mut dates = Vec::with_capacity(observations.len());
        let mut closes = Vec::with_capacity(observations.len());
        for (i, (date, close)) in observations.into_iter().enumerate() {
            if !(close > 0.0) || !close.is_finite() {
                return Err(Error::NonPositivePrice { line: i + 1, value: close });
            }
            if let Some(prev) = dates.last() {
                if date == *prev {
                    return Err(Error::DuplicateDate { line: i + 1, date });
                }
                if date < *prev {
                    return Err(Error::Parse { line: i + 1, message: format!("date {date} out of order") });
                }
            }
            dates.push(date);
            closes.push(close);
        }
        Ok(Self { meta, dates, closes })
    }

    pub fn meta(&self) -> &AssetMeta {
        &self.meta
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn closes(&self) -> &[f64] {
        &self.closes
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    pub fn first_date(&self) -> NaiveDate {
        self.dates[0]
    }

    pub fn last_date(&self) -> NaiveDate {
        self.dates[self.dates.len() - 1]
    }

    /// Calendar days between the first and last observation.
    pub fn span_days(&self) -> i64 {
        (self.last_date() - self.first_date()).num_days()
    }

    pub fn iter(&self) -> impl Iterator<Item = (NaiveDate, f64)> + '_ {
        self.dates.iter().copied().zip(self.closes.iter().copied())
    }

    /// Observations with `t1 <= date <= t2`, metadata preserved.
    pub fn slice(&self, t1: NaiveDate, t2: NaiveDate) -> Result<PriceSeries> {
        if t1 > t2 {
            return Err(Error::InvalidConfig(format!("slice start {t1} is after end {t2}")));
        }
        let lo = self.dates.partition_point(|d| *d < t1);
        let hi = self.dates.partition_point(|d| *d <= t2);
        if hi - lo < 2 {
            return Err(Error::WindowTooSparse { from: t1, to: t2, found: hi - lo, needed: 2 });
        }
        Ok(PriceSeries {
            meta: self.meta.clone(),
            dates: self.dates[lo..hi].to_vec(),
            closes: self.closes[lo..hi].to_vec(),
        })
    }

    /// `ln(close)` with a day-count time axis starting at the first date.
    pub fn to_log(&self) -> LogSeries {
        let origin = self.first_date();
        LogSeries {
            origin,
            dates: self.dates.clone(),
            tau: self.dates.iter().map(|d| (*d - origin).num_days() as f64).collect(),
            values: self.closes.iter().map(|c| c.ln()).collect(),
        }
    }

    /// Canonical CSV: `date,close` header, rows in date order, closes in
    /// shortest round-trip decimal form.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("date,close\n");
        for (date, close) in self.iter() {
            out.push_str(&format!("{date},{close}\n"));
        }
        out
    }

    /// Close-to-close return signs; see [`return_signs`].
    pub fn daily_return_signs(&self) -> Vec<ReturnSign> {
        return_signs(&self.closes).expect("series invariant guarantees two closes")
    }
}

/// Parses `date,close` CSV (UTF-8, ISO-8601 dates). Lines starting with `#`
/// are comments. Rows may arrive in any order; the result is date sorted.
/// Error line numbers count the header as line 1.
pub fn ingest_csv(bytes: &[u8], meta: AssetMeta) -> Result<PriceSeries> {
    let text = std::str::from_utf8(bytes)
        .map_err(|e| Error::Parse { line: 0, message: format!("input is not UTF-8: {e}") })?;

    let mut rows: Vec<(NaiveDate, f64, usize)> = Vec::new();
    let mut header_seen = false;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let row = raw.trim_end_matches('\r').trim();
        if row.is_empty() || row.starts_with('#') {
            continue;
        }
        if !header_seen {
            let fields: Vec<&str> = row.split(',').map(str::trim).collect();
            if fields != ["date", "close"] {
                return Err(Error::Parse { line, message: format!("expected header `date,close`, got `{row}`") });
            }
            header_seen = true;
            continue;
        }
        let mut fields = row.split(',');
        let (Some(date), Some(close), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(Error::Parse { line, message: format!("expected 2 fields, got `{row}`") });
        };
        let date = NaiveDate::parse_from_str(date.trim(), "%Y-%m-%d")
            .map_err(|e| Error::Parse { line, message: format!("bad date `{}`: {e}", date.trim()) })?;
        let close: f64 = close
            .trim()
            .parse()
            .map_err(|e| Error::Parse { line, message: format!("bad close `{}`: {e}", close.trim()) })?;
        if !(close > 0.0) || !close.is_finite() {
            return Err(Error::NonPositivePrice { line, value: close });
        }
        rows.push((date, close, line));
    }
    if !header_seen {
        return Err(Error::Parse { line: 1, message: "missing `date,close` header".into() });
    }

    rows.sort_by_key(|(date, _, line)| (*date, *line));
    if let Some(w) = rows.windows(2).find(|w| w[0].0 == w[1].0) {
        return Err(Error::DuplicateDate { line: w[1].2, date: w[1].0 });
    }
    PriceSeries::new(meta, rows.into_iter().map(|(d, c, _)| (d, c)).collect())
}

/// Log prices on a real-valued day axis.
///
/// `tau` is measured in calendar days from `origin`. Slices keep the origin of
/// the series they were cut from, so critical times stay comparable across
/// windows.
#[derive(Debug, Clone, PartialEq)]
pub struct LogSeries {
    origin: NaiveDate,
    dates: Vec<NaiveDate>,
    tau: Vec<f64>,
    values: Vec<f64>,
}

impl LogSeries {
    /// Replaces the log values, keeping the time axis. Used for bootstrap
    /// replicas.
    pub fn with_values(&self, values: Vec<f64>) -> LogSeries {
        assert_eq!(values.len(), self.values.len(), "value count must match time axis");
        LogSeries { origin: self.origin, dates: self.dates.clone(), tau: self.tau.clone(), values }
    }

    pub fn origin(&self) -> NaiveDate {
        self.origin
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn tau(&self) -> &[f64] {
        &self.tau
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Day coordinate of an arbitrary calendar date.
    pub fn tau_of(&self, date: NaiveDate) -> f64 {
        (date - self.origin).num_days() as f64
    }

    /// Calendar date containing the day coordinate `tau` (floored).
    pub fn date_of(&self, tau: f64) -> NaiveDate {
        self.origin + chrono::Duration::days(tau.floor() as i64)
    }

    /// Observations with `t1 <= date <= t2`; may be empty.
    pub fn window(&self, t1: NaiveDate, t2: NaiveDate) -> LogSeries {
        let lo = self.dates.partition_point(|d| *d < t1);
        let hi = self.dates.partition_point(|d| *d <= t2).max(lo);
        LogSeries {
            origin: self.origin,
            dates: self.dates[lo..hi].to_vec(),
            tau: self.tau[lo..hi].to_vec(),
            values: self.values[lo..hi].to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ReturnSign {
    Up,
    /// Zero or negative close-to-close return.
    NonUp,
}

/// Element `i` is `Up` iff `closes[i + 1] > closes[i]`.
pub fn return_signs(closes: &[f64]) -> Result<Vec<ReturnSign>> {
    if closes.len() < 2 {
        return Err(Error::TooFewObservations(closes.len()));
    }
    Ok(closes.windows(2).map(|w| if w[1] > w[0] { ReturnSign::Up } else { ReturnSign::NonUp }).collect())
}
