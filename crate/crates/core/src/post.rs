//! Evaluation measures applied to prices after the forecast date.

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::market_data::{return_signs, PriceSeries, ReturnSign};
use crate::scan::ScanReport;

/// Up-day fraction windows plotted by default, in return observations.
pub const UP_FRACTION_WINDOWS: [usize; 3] = [30, 60, 90];

/// Savitzky-Golay derivative windows plotted by default, in calendar days.
pub const SG_WINDOWS: [u32; 2] = [120, 180];

/// Local polynomial degree of the derivative estimate.
pub const SG_DEGREE: usize = 3;

/// A centered window needs this many observations or its point is a gap.
pub const SG_MIN_OBS: usize = 8;

/// Identifies the bubble index definition in output metadata.
pub const BUBBLE_INDEX_VERSION: &str = "provisional-1 (qualified / converged fits at latest t2)";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DrawdownReport {
    pub peak_date: NaiveDate,
    pub trough_date: NaiveDate,
    pub peak: f64,
    pub trough: f64,
    /// `(peak - trough) / peak`.
    pub depth_fraction: f64,
    pub absolute_drop: f64,
    pub from: NaiveDate,
    pub to: NaiveDate,
}

/// Largest peak-to-trough drop, as a fraction of the peak, among
/// observations dated on or after `from`. Ties go to the earliest peak, then
/// the earliest trough.
pub fn max_drawdown(series: &PriceSeries, from: NaiveDate) -> Result<DrawdownReport> {
    let start = series.dates().partition_point(|d| *d < from);
    let closes = &series.closes()[start..];
    let dates = &series.dates()[start..];
    if closes.len() < 2 {
        return Err(Error::WindowTooSparse { from, to: series.last_date(), found: closes.len(), needed: 2 });
    }
    let depth = |peak: f64, trough: f64| 1.0 - trough / peak;

    let mut suffix_min = closes.to_vec();
    for i in (0..closes.len() - 1).rev() {
        suffix_min[i] = suffix_min[i].min(suffix_min[i + 1]);
    }
    // For a fixed peak the deepest trough is the smallest later close, and
    // `depth` is monotone in the trough, so this scan finds the global
    // maximum and its earliest peak.
    let (mut peak, mut best) = (0, f64::NEG_INFINITY);
    for i in 0..closes.len() {
        let d = depth(closes[i], suffix_min[i]);
        if d > best {
            best = d;
            peak = i;
        }
    }
    let trough =
        (peak..closes.len()).find(|&j| depth(closes[peak], closes[j]) == best).expect("suffix minimum is attained");

    Ok(DrawdownReport {
        peak_date: dates[peak],
        trough_date: dates[trough],
        peak: closes[peak],
        trough: closes[trough],
        depth_fraction: best,
        absolute_drop: closes[peak] - closes[trough],
        from,
        to: dates[dates.len() - 1],
    })
}

/// Running share of up days over the trailing `window` return observations,
/// dated at the last return of each window. Zero returns count as non-up.
pub fn up_day_fraction(series: &PriceSeries, window: usize) -> Result<Vec<(NaiveDate, f64)>> {
    if window == 0 || series.len() <= window {
        return Err(Error::WindowTooSparse {
            from: series.first_date(),
            to: series.last_date(),
            found: series.len(),
            needed: window + 1,
        });
    }
    let signs = return_signs(series.closes())?;
    let mut ups = signs[..window].iter().filter(|s| **s == ReturnSign::Up).count();
    let mut out = Vec::with_capacity(signs.len() + 1 - window);
    out.push((series.dates()[window], ups as f64 / window as f64));
    for i in window..signs.len() {
        ups += usize::from(signs[i] == ReturnSign::Up);
        ups -= usize::from(signs[i - window] == ReturnSign::Up);
        out.push((series.dates()[i + 1], ups as f64 / window as f64));
    }
    Ok(out)
}

/// Local-regression first derivative on irregularly spaced observations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SgDerivative {
    pub window_days: u32,
    /// Price units per calendar day.
    pub points: Vec<(NaiveDate, f64)>,
    /// Centers skipped for having fewer than [`SG_MIN_OBS`] observations.
    pub gaps: Vec<NaiveDate>,
}

/// Savitzky-Golay style first derivative: at every observation whose
/// centered `window_days` window lies inside the data, a cubic is fit by
/// least squares to the observations in that window and differentiated at
/// the center.
pub fn sg_derivative(series: &PriceSeries, window_days: u32) -> Result<SgDerivative> {
    if window_days == 0 {
        return Err(Error::InvalidConfig("derivative window must be positive".into()));
    }
    let log = series.to_log();
    let tau = log.tau();
    let closes = series.closes();
    let half = f64::from(window_days) / 2.0;
    let (first, last) = (tau[0], tau[tau.len() - 1]);
    if last - first < f64::from(window_days) {
        return Err(Error::WindowTooSparse {
            from: series.first_date(),
            to: series.last_date(),
            found: series.len(),
            needed: SG_MIN_OBS,
        });
    }

    let mut points = Vec::new();
    let mut gaps = Vec::new();
    for (i, &center) in tau.iter().enumerate() {
        if center - half < first || center + half > last {
            continue;
        }
        let lo = tau.partition_point(|t| *t < center - half);
        let hi = tau.partition_point(|t| *t <= center + half);
        if hi - lo < SG_MIN_OBS {
            gaps.push(series.dates()[i]);
            continue;
        }
        let u: Vec<f64> = tau[lo..hi].iter().map(|t| (t - center) / half).collect();
        let coef = polyfit(&u, &closes[lo..hi], SG_DEGREE)?;
        points.push((series.dates()[i], coef[1] / half));
    }
    Ok(SgDerivative { window_days, points, gaps })
}

/// Monomial least-squares coefficients (constant first) via Householder QR.
fn polyfit(x: &[f64], y: &[f64], degree: usize) -> Result<Vec<f64>> {
    let m = degree + 1;
    let n = x.len();
    let mut cols: Vec<Vec<f64>> = (0..m).map(|k| x.iter().map(|v| v.powi(k as i32)).collect()).collect();
    let mut rhs = y.to_vec();
    let mut r = vec![vec![0.0; m]; m];
    for k in 0..m {
        let (head, tail) = cols.split_at_mut(k + 1);
        let v = &mut head[k];
        let norm = v[k..].iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::IllConditioned { condition: f64::INFINITY });
        }
        let diag = if v[k] > 0.0 { -norm } else { norm };
        let x0 = v[k];
        v[k] -= diag;
        let vnorm2 = 2.0 * norm * (norm + x0.abs());
        for other in tail.iter_mut().chain(std::iter::once(&mut rhs)) {
            let dot: f64 = v[k..n].iter().zip(&other[k..n]).map(|(a, b)| a * b).sum();
            let s = 2.0 * dot / vnorm2;
            other[k..n].iter_mut().zip(&v[k..n]).for_each(|(o, vi)| *o -= s * vi);
        }
        r[k][k] = diag;
        for (j, other) in tail.iter().enumerate() {
            r[k][k + 1 + j] = other[k];
        }
    }
    let mut coef = vec![0.0; m];
    for k in (0..m).rev() {
        let acc = rhs[k] - (k + 1..m).map(|j| r[k][j] * coef[j]).sum::<f64>();
        coef[k] = acc / r[k][k];
    }
    Ok(coef)
}

/// Provisional bubble index: the share of converged fits on windows ending
/// at the latest `t2` that qualify. See [`BUBBLE_INDEX_VERSION`].
pub fn bubble_index(scan: &ScanReport) -> Result<f64> {
    let latest = scan.latest_t2();
    let (converged, qualified) = scan
        .fits_ending_at(latest)
        .filter(|f| f.converged)
        .fold((0usize, 0usize), |(c, q), f| (c + 1, q + usize::from(f.qualified)));
    if converged == 0 {
        return Err(Error::IndexUndefined);
    }
    Ok(qualified as f64 / converged as f64)
}

/// `date,value` CSV, preceded by `# ` comment lines.
pub fn dated_csv(comments: &[String], rows: &[(NaiveDate, f64)]) -> String {
    let mut out = String::new();
    for c in comments {
        out.push_str("# ");
        out.push_str(c);
        out.push('\n');
    }
    out.push_str("date,value\n");
    for (d, v) in rows {
        out.push_str(&format!("{d},{v}\n"));
    }
    out
}
