#![allow(dead_code)]

pub mod sha2_ref;

use bubblescope::forecast::{ConfigEcho, DateWindow};
use bubblescope::{
    generate_synthetic, AssetMeta, Category, ForecastDocument, ForecastRecord, LpplParams, PriceSeries,
    QualificationFilter, ScanGrid, Window,
};
use chrono::{Datelike, Duration, NaiveDate, Weekday};
use rand::Rng;

pub fn start_date() -> NaiveDate {
    NaiveDate::from_ymd_opt(2008, 1, 7).expect("valid date")
}

/// Weekday dates covering `span` calendar days from `start_date()`.
pub fn business_days(span: i64) -> Vec<NaiveDate> {
    (0..=span)
        .map(|i| start_date() + Duration::days(i))
        .filter(|d| !matches!(d.weekday(), Weekday::Sat | Weekday::Sun))
        .collect()
}

/// Random admissible bubble parameters for observations at `dates`: the
/// log price rises by 0.3..1.0 over the span and t_c lies 10..120 days past
/// the last date.
pub fn random_bubble(rng: &mut impl Rng, dates: &[NaiveDate]) -> LpplParams {
    let last = (dates[dates.len() - 1] - dates[0]).num_days() as f64;
    let alpha = rng.gen_range(0.2..0.8);
    let omega = rng.gen_range(5.0..15.0);
    let tc = last + rng.gen_range(10.0..120.0);
    let rise = rng.gen_range(0.3..1.0);
    let b = -rise / (tc.powf(alpha) - (tc - last).powf(alpha));
    let c = b.abs() * rng.gen_range(0.05..0.5);
    LpplParams { a: rng.gen_range(1.0..5.0), b, c, alpha, omega, phi: rng.gen_range(0.0..std::f64::consts::TAU), tc }
}

pub fn synthetic(params: &LpplParams, dates: &[NaiveDate], noise: f64, seed: u64) -> PriceSeries {
    generate_synthetic(params, dates, noise, seed, AssetMeta::new("Synthetic", "SYN", "Y")).expect("valid synthetic")
}

/// Series with only two observations `span` days apart.
pub fn span_series(span: i64) -> PriceSeries {
    let s = start_date();
    PriceSeries::new(AssetMeta::default(), vec![(s, 1.0), (s + Duration::days(span), 2.0)]).expect("valid series")
}

/// Every (t1, t2) day pair tested against the grid rules directly.
pub fn brute_force_windows(first: NaiveDate, span: i64, grid: &ScanGrid) -> Vec<Window> {
    let (dt1, dt2) = (i64::from(grid.dt1), i64::from(grid.dt2));
    let (min, max) = (i64::from(grid.min_len), i64::from(grid.max_len));
    let mut out = Vec::new();
    for t2 in 0..=span {
        if (span - t2) % dt2 != 0 {
            continue;
        }
        for t1 in 0..=t2 {
            let len = t2 - t1;
            if len >= min && len <= max && (len - min) % dt1 == 0 {
                out.push(Window::new(first + Duration::days(t1), first + Duration::days(t2)));
            }
        }
    }
    out
}

/// Nearest-rank quantile by sorting and indexing.
pub fn nearest_rank(values: &[f64], level: f64) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    let mut rank = 1;
    while (rank as f64) < level * n as f64 - 1e-9 {
        rank += 1;
    }
    v[rank.min(n) - 1]
}

/// Largest `1 - trough / peak` over all ordered pairs.
pub fn brute_force_drawdown(closes: &[f64]) -> (usize, usize, f64) {
    let mut best = (0, 0, f64::NEG_INFINITY);
    for i in 0..closes.len() {
        for j in i..closes.len() {
            let d = 1.0 - closes[j] / closes[i];
            if d > best.2 {
                best = (i, j, d);
            }
        }
    }
    best
}

fn date(s: &str) -> NaiveDate {
    s.parse().expect("valid date")
}

/// One commodity row laid out like a published table entry.
pub fn commodity_exemplar() -> ForecastDocument {
    let record = ForecastRecord {
        category: Category::Commodity,
        asset: "Cotton future (USD)".into(),
        ticker: "CT1 COMB Comdty".into(),
        source: "B".into(),
        t2: date("2010-11-10"),
        n_fits: 1320,
        window_20_80: DateWindow { from: date("2010-11-12"), to: date("2010-11-13") },
        window_5_95: DateWindow { from: date("2010-11-08"), to: date("2010-11-15") },
        config: ConfigEcho {
            filter: QualificationFilter::default().to_string(),
            grid: ScanGrid::default().to_string(),
            fit: "n_starts=20;seed=0".into(),
            bootstrap: "n_boot=10;resampling=iid_residual;seed=0".into(),
        },
    };
    ForecastDocument::new(date("2010-11-11"), vec![record])
}
