//! Forecast records: nearest-rank quantile windows of the ensemble critical
//! times, and the canonical text document they are published in.
//!
//! # Document format
//!
//! UTF-8, LF line endings, one tab-separated key/value pair per line, in this
//! order:
//!
//! ```text
//! bubblescope-forecast-document<TAB>1
//! tool_version<TAB><text>
//! created_on<TAB><YYYY-MM-DD>
//! methodology_note<TAB><text>
//! records<TAB><count>
//! Category<TAB>Asset<TAB>Ticker<TAB>t_c 20% - 80%<TAB>t_c 5% - 95%<TAB>t2<TAB>n_fits
//! <one row per record, same columns>
//! config<TAB><row number><TAB>filter<TAB><echo>
//! config<TAB><row number><TAB>grid<TAB><echo>
//! config<TAB><row number><TAB>fit<TAB><echo>
//! config<TAB><row number><TAB>bootstrap<TAB><echo>
//! end
//! ```
//!
//! Rows are sorted by category (Index, Equity, Commodity, Forex), then asset,
//! ticker, source and `t2`. The ticker column is `<ticker> (<source>)`; a date
//! window is written `<from> - <to>`. Text fields escape backslash, tab and
//! newline as `\\`, `\t` and `\n`.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::bootstrap::{build_ensemble, TcEnsemble};
use crate::error::{Error, Result};
use crate::fit::FitConfig;
use crate::market_data::{AssetMeta, PriceSeries};
use crate::model::QualificationFilter;
use crate::scan::{scan, ScanGrid, ScanReport};

pub const DOCUMENT_MAGIC: &str = "bubblescope-forecast-document";
pub const DOCUMENT_FORMAT: u32 = 1;
pub const TABLE_HEADER: &str = "Category\tAsset\tTicker\tt_c 20% - 80%\tt_c 5% - 95%\tt2\tn_fits";

/// Quantile levels of the two published windows.
pub const LEVELS: [f64; 4] = [0.05, 0.20, 0.80, 0.95];

pub const METHODOLOGY_NOTE: &str = "LPPL fits on a sliding (t1,t2) grid; qualified fits pooled over all windows \
with i.i.d. residual-bootstrap refits; t_c windows are nearest-rank (ceiling) empirical quantiles without \
interpolation, floored to calendar days; only converged fits are counted";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Category {
    Index,
    Equity,
    Commodity,
    Forex,
}

impl std::fmt::Display for Category {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Category::Index => "Index",
            Category::Equity => "Equity",
            Category::Commodity => "Commodity",
            Category::Forex => "Forex",
        })
    }
}

impl std::str::FromStr for Category {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "index" => Ok(Category::Index),
            "equity" => Ok(Category::Equity),
            "commodity" => Ok(Category::Commodity),
            "forex" => Ok(Category::Forex),
            _ => Err(Error::InvalidConfig(format!("unknown category `{s}`"))),
        }
    }
}

/// Inclusive calendar window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DateWindow {
    pub from: NaiveDate,
    pub to: NaiveDate,
}

impl DateWindow {
    pub fn contains(&self, other: &DateWindow) -> bool {
        self.from <= other.from && other.to <= self.to
    }

    pub fn contains_date(&self, d: NaiveDate) -> bool {
        self.from <= d && d <= self.to
    }
}

impl std::fmt::Display for DateWindow {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} - {}", self.from, self.to)
    }
}

impl std::str::FromStr for DateWindow {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s.split_once(" - ").ok_or_else(|| Error::InvalidDocument(format!("bad date window `{s}`")))?;
        let window = DateWindow { from: parse_date(a)?, to: parse_date(b)? };
        if window.from > window.to {
            return Err(Error::InvalidDocument(format!("reversed date window `{s}`")));
        }
        Ok(window)
    }
}

/// Configuration snapshot attached to every record.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub filter: String,
    pub grid: String,
    pub fit: String,
    pub bootstrap: String,
}

impl ConfigEcho {
    pub fn new(filter: &QualificationFilter, grid: &ScanGrid, fit: &FitConfig, n_boot: usize, seed: u64) -> Self {
        Self {
            filter: filter.to_string(),
            grid: grid.to_string(),
            fit: fit.to_string(),
            bootstrap: format!("n_boot={n_boot};resampling=iid_residual;seed={seed}"),
        }
    }
}

/// One published forecast row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForecastRecord {
    pub category: Category,
    pub asset: String,
    pub ticker: String,
    pub source: String,
    /// Last observation used.
    pub t2: NaiveDate,
    pub n_fits: usize,
    pub window_20_80: DateWindow,
    pub window_5_95: DateWindow,
    pub config: ConfigEcho,
}

impl ForecastRecord {
    fn sort_key(&self) -> (Category, &str, &str, &str, NaiveDate) {
        (self.category, &self.asset, &self.ticker, &self.source, self.t2)
    }

    /// `<ticker> (<source>)`, or `(<source>)` when there is no ticker.
    pub fn ticker_column(&self) -> String {
        match (self.ticker.is_empty(), self.source.is_empty()) {
            (_, true) => self.ticker.clone(),
            (true, false) => format!("({})", self.source),
            (false, false) => format!("{} ({})", self.ticker, self.source),
        }
    }

    /// The record's table row in document form (escaped, tab separated).
    pub fn table_row(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.category,
            escape(&self.asset),
            escape(&self.ticker_column()),
            self.window_20_80,
            self.window_5_95,
            self.t2,
            self.n_fits
        )
    }

    /// The ticker column must split back into ticker and source: a source
    /// tag has no parentheses or whitespace, and a ticker without a source
    /// does not end in `)`.
    pub fn check_labels(&self) -> Result<()> {
        if self.source.chars().any(|c| c == '(' || c == ')' || c.is_whitespace()) {
            return Err(Error::InvalidRecord(format!(
                "source tag `{}` may not contain parentheses or whitespace",
                self.source
            )));
        }
        if self.source.is_empty() && self.ticker.ends_with(')') {
            return Err(Error::InvalidRecord(format!("ticker `{}` without a source may not end in `)`", self.ticker)));
        }
        Ok(())
    }

    /// Label, nesting and horizon checks: the 5/95 window holds the 20/80
    /// window and both lie in `(t2, t2 + horizon]`.
    pub fn check(&self, tc_horizon_days: u32) -> Result<()> {
        self.check_labels()?;
        if !self.window_5_95.contains(&self.window_20_80) {
            return Err(Error::InvalidDocument(format!(
                "{}: 5-95 window {} does not contain 20-80 window {}",
                self.asset, self.window_5_95, self.window_20_80
            )));
        }
        let limit = self.t2 + chrono::Duration::days(i64::from(tc_horizon_days));
        if self.window_5_95.from <= self.t2 || self.window_5_95.to > limit {
            return Err(Error::InvalidDocument(format!(
                "{}: window {} outside ({}, {}]",
                self.asset, self.window_5_95, self.t2, limit
            )));
        }
        Ok(())
    }
}

/// Nearest-rank empirical quantiles of the member critical times: for level
/// `p` the `ceil(p n)`-th smallest value (1-based, at least 1).
pub fn tc_quantiles(ensemble: &TcEnsemble, levels: &[f64]) -> Result<Vec<f64>> {
    quantiles(&ensemble.tc_values(), levels)
}

/// Nearest-rank quantiles of raw values; see [`tc_quantiles`].
pub fn quantiles(values: &[f64], levels: &[f64]) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::NoBubbleSignal);
    }
    if levels.iter().any(|p| !(*p > 0.0 && *p < 1.0)) || levels.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidConfig(format!("quantile levels must be ascending in (0,1): {levels:?}")));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    Ok(levels.iter().map(|p| sorted[nearest_rank(*p, n) - 1]).collect())
}

/// `ceil(p n)` clamped to `1..=n`; products within 1e-9 of an integer count
/// as that integer so that e.g. `0.7 * 10` is rank 7.
fn nearest_rank(p: f64, n: usize) -> usize {
    let x = p * n as f64;
    let rounded = x.round();
    let rank = if (x - rounded).abs() <= 1e-9 * n as f64 { rounded } else { x.ceil() };
    (rank as usize).clamp(1, n)
}

/// The published forecast for one asset.
pub fn make_forecast(
    category: Category,
    meta: &AssetMeta,
    ensemble: &TcEnsemble,
    config: ConfigEcho,
) -> Result<ForecastRecord> {
    let q = tc_quantiles(ensemble, &LEVELS)?;
    let date = |tau: f64| ensemble.origin + chrono::Duration::days(tau.floor() as i64);
    let record = ForecastRecord {
        category,
        asset: meta.name.clone(),
        ticker: meta.ticker.clone(),
        source: meta.source.clone(),
        t2: ensemble.t2,
        n_fits: ensemble.len(),
        window_20_80: DateWindow { from: date(q[1]), to: date(q[2]) },
        window_5_95: DateWindow { from: date(q[0]), to: date(q[3]) },
        config,
    };
    record.check_labels()?;
    Ok(record)
}

/// Everything one forecast run produces.
#[derive(Debug, Clone, PartialEq)]
pub struct ForecastRun {
    pub scan: ScanReport,
    pub ensemble: TcEnsemble,
    pub record: ForecastRecord,
}

/// Scan, bootstrap and summarise one series. `fit.seed` seeds the scan and
/// `bootstrap_seed` the resampling.
pub fn run_forecast(
    series: &PriceSeries,
    category: Category,
    grid: &ScanGrid,
    fit: &FitConfig,
    filter: &QualificationFilter,
    n_boot: usize,
    bootstrap_seed: u64,
) -> Result<ForecastRun> {
    let report = scan(series, grid, fit, filter)?;
    let ensemble = build_ensemble(&report, &series.to_log(), fit, filter, n_boot, bootstrap_seed)?;
    let echo = ConfigEcho::new(filter, grid, fit, n_boot, bootstrap_seed);
    let record = make_forecast(category, series.meta(), &ensemble, echo)?;
    record.check(filter.tc_horizon_days)?;
    Ok(ForecastRun { scan: report, ensemble, record })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForecastDocument {
    pub tool_version: String,
    pub created_on: NaiveDate,
    pub methodology_note: String,
    pub records: Vec<ForecastRecord>,
}

impl ForecastDocument {
    pub fn new(created_on: NaiveDate, records: Vec<ForecastRecord>) -> Self {
        let mut doc = Self {
            tool_version: crate::TOOL_VERSION.to_string(),
            created_on,
            methodology_note: METHODOLOGY_NOTE.to_string(),
            records,
        };
        doc.canonicalize();
        doc
    }

    /// Sorts records into document order.
    pub fn canonicalize(&mut self) {
        self.records.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()).then_with(|| a.table_row().cmp(&b.table_row())));
    }

    pub fn to_json(&self) -> String {
        let mut doc = self.clone();
        doc.canonicalize();
        serde_json::to_string_pretty(&doc).expect("document serializes")
    }
}

/// Canonical bytes of `doc`; equal documents (up to record order) render
/// identically. Records are expected to pass
/// [`ForecastRecord::check_labels`], otherwise the ticker column does not
/// parse back.
pub fn render_document(doc: &ForecastDocument) -> Vec<u8> {
    let mut doc = doc.clone();
    doc.canonicalize();
    let mut out = String::new();
    let mut line = |s: String| {
        out.push_str(&s);
        out.push('\n');
    };
    line(format!("{DOCUMENT_MAGIC}\t{DOCUMENT_FORMAT}"));
    line(format!("tool_version\t{}", escape(&doc.tool_version)));
    line(format!("created_on\t{}", doc.created_on));
    line(format!("methodology_note\t{}", escape(&doc.methodology_note)));
    line(format!("records\t{}", doc.records.len()));
    line(TABLE_HEADER.to_string());
    for r in &doc.records {
        line(r.table_row());
    }
    for (i, r) in doc.records.iter().enumerate() {
        for (key, value) in [
            ("filter", &r.config.filter),
            ("grid", &r.config.grid),
            ("fit", &r.config.fit),
            ("bootstrap", &r.config.bootstrap),
        ] {
            line(format!("config\t{}\t{key}\t{}", i + 1, escape(value)));
        }
    }
    line("end".to_string());
    out.into_bytes()
}

/// Inverse of [`render_document`].
pub fn parse_document(bytes: &[u8]) -> Result<ForecastDocument> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::InvalidDocument(e.to_string()))?;
    let body = text.strip_suffix('\n').ok_or_else(|| Error::InvalidDocument("missing final newline".into()))?;
    let mut lines = body.split('\n');
    let mut next = |what: &str| lines.next().ok_or_else(|| Error::InvalidDocument(format!("truncated before {what}")));
    let field = |line: &str, key: &str| -> Result<String> {
        line.strip_prefix(key)
            .and_then(|rest| rest.strip_prefix('\t'))
            .map(str::to_string)
            .ok_or_else(|| Error::InvalidDocument(format!("expected `{key}` line, got `{line}`")))
    };

    let magic = field(next("header")?, DOCUMENT_MAGIC)?;
    if magic != DOCUMENT_FORMAT.to_string() {
        return Err(Error::InvalidDocument(format!("unsupported format version {magic}")));
    }
    let tool_version = unescape(&field(next("tool_version")?, "tool_version")?)?;
    let created_on = parse_date(&field(next("created_on")?, "created_on")?)?;
    let methodology_note = unescape(&field(next("methodology_note")?, "methodology_note")?)?;
    let count: usize = field(next("records")?, "records")?
        .parse()
        .map_err(|e| Error::InvalidDocument(format!("bad record count: {e}")))?;
    if next("table header")? != TABLE_HEADER {
        return Err(Error::InvalidDocument("bad table header".into()));
    }

    let mut records = Vec::with_capacity(count);
    for _ in 0..count {
        records.push(parse_row(next("record row")?)?);
    }
    for (i, record) in records.iter_mut().enumerate() {
        for key in ["filter", "grid", "fit", "bootstrap"] {
            let prefix = format!("config\t{}\t{key}", i + 1);
            let value = unescape(&field(next("config line")?, &prefix)?)?;
            match key {
                "filter" => record.config.filter = value,
                "grid" => record.config.grid = value,
                "fit" => record.config.fit = value,
                _ => record.config.bootstrap = value,
            }
        }
    }
    if next("end")? != "end" {
        return Err(Error::InvalidDocument("missing `end` line".into()));
    }
    if lines.next().is_some() {
        return Err(Error::InvalidDocument("trailing content after `end`".into()));
    }
    Ok(ForecastDocument { tool_version, created_on, methodology_note, records })
}

fn parse_row(line: &str) -> Result<ForecastRecord> {
    let cols: Vec<&str> = line.split('\t').collect();
    let [category, asset, ticker, w2080, w595, t2, n_fits] = cols[..] else {
        return Err(Error::InvalidDocument(format!("expected 7 columns, got `{line}`")));
    };
    let (ticker, source) = split_ticker(&unescape(ticker)?);
    Ok(ForecastRecord {
        category: category.parse().map_err(|_| Error::InvalidDocument(format!("bad category `{category}`")))?,
        asset: unescape(asset)?,
        ticker,
        source,
        t2: parse_date(t2)?,
        n_fits: n_fits.parse().map_err(|e| Error::InvalidDocument(format!("bad n_fits `{n_fits}`: {e}")))?,
        window_20_80: w2080.parse()?,
        window_5_95: w595.parse()?,
        config: ConfigEcho::default(),
    })
}

fn split_ticker(column: &str) -> (String, String) {
    if let Some(inner) = column.strip_suffix(')') {
        if let Some((ticker, source)) = inner.rsplit_once(" (") {
            return (ticker.to_string(), source.to_string());
        }
        if let Some(source) = inner.strip_prefix('(') {
            return (String::new(), source.to_string());
        }
    }
    (column.to_string(), String::new())
}

fn parse_date(s: &str) -> Result<NaiveDate> {
    NaiveDate::parse_from_str(s, "%Y-%m-%d").map_err(|e| Error::InvalidDocument(format!("bad date `{s}`: {e}")))
}

fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    for ch in s.chars() {
        match ch {
            '\\' => out.push_str("\\\\"),
            '\t' => out.push_str("\\t"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            c => out.push(c),
        }
    }
    out
}

fn unescape(s: &str) -> Result<String> {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(ch) = chars.next() {
        if ch != '\\' {
            out.push(ch);
            continue;
        }
        match chars.next() {
            Some('\\') => out.push('\\'),
            Some('t') => out.push('\t'),
            Some('n') => out.push('\n'),
            Some('r') => out.push('\r'),
            other => return Err(Error::InvalidDocument(format!("bad escape `\\{}`", other.unwrap_or(' ')))),
        }
    }
    Ok(out)
}
