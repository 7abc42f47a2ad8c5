//! Shared fixtures for the benchmarks.

use bubblescope::{generate_synthetic, AssetMeta, LpplParams, PriceSeries};
use chrono::{Datelike, NaiveDate, Weekday};

/// Weekday calendar dates covering `span_days` calendar days.
pub fn business_days(start: NaiveDate, span_days: i64) -> Vec<NaiveDate> {
    (0..=span_days)
        .map(|i| start + chrono::Duration::days(i))
        .filter(|d| !matches!(d.weekday(), Weekday::Sat | Weekday::Sun))
        .collect()
}

/// A noisy bubble whose critical time lies 45 days past the last date.
pub fn bubble_series(span_days: i64, noise: f64, seed: u64) -> (PriceSeries, LpplParams) {
    let start = NaiveDate::from_ymd_opt(2009, 1, 5).expect("valid date");
    let dates = business_days(start, span_days);
    let params =
        LpplParams { a: 4.0, b: -0.06, c: 0.008, alpha: 0.45, omega: 7.5, phi: 0.8, tc: span_days as f64 + 45.0 };
    let series = generate_synthetic(&params, &dates, noise, seed, AssetMeta::new("bench", "BNCH", "Y"))
        .expect("valid synthetic parameters");
    (series, params)
}
