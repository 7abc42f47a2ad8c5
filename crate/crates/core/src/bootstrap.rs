//! Residual-bootstrap ensembles of critical times.
//!
//! Each qualified fit's residuals are resampled i.i.d. with replacement and
//! added back onto its fitted curve; the replicas are refit on the same
//! window. Originals and qualified replicas together form the ensemble.

use std::collections::BTreeMap;

use chrono::{Datelike, NaiveDate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{fit_window_traced, FitConfig, FitResult, Provenance};
use crate::market_data::LogSeries;
use crate::model::{evaluate, QualificationFilter};
use crate::scan::ScanReport;
use crate::seed;

/// Replicas per original fit unless configured otherwise.
pub const DEFAULT_BOOTSTRAPS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TcEnsemble {
    pub members: Vec<FitResult>,
    /// Latest window end; every member's `tc` lies within the horizon after it.
    pub t2: NaiveDate,
    pub origin: NaiveDate,
    pub n_bootstrap_per_fit: usize,
    /// Number of qualified original fits the ensemble was built from.
    pub base_fit_count: usize,
    pub tc_horizon_days: u32,
}

impl TcEnsemble {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn tc_values(&self) -> Vec<f64> {
        self.members.iter().map(|m| m.params.tc).collect()
    }

    /// Member count per window end date.
    pub fn per_t2(&self) -> BTreeMap<NaiveDate, usize> {
        let mut out = BTreeMap::new();
        for m in &self.members {
            *out.entry(m.window.t2).or_insert(0) += 1;
        }
        out
    }
}

/// `n` replicas of `base`'s window: fitted curve plus residuals drawn with
/// replacement. Dates and day coordinates are those of the window.
pub fn resample_residuals(base: &FitResult, series: &LogSeries, n: usize, seed: u64) -> Result<Vec<LogSeries>> {
    let data = series.window(base.window.t1, base.window.t2);
    let curve: Vec<f64> = data.tau().iter().map(|t| evaluate(&base.params, *t)).collect::<Result<_>>()?;
    let resid: Vec<f64> = data.values().iter().zip(&curve).map(|(v, c)| v - c).collect();
    if resid.is_empty() {
        return Ok(vec![data; n]);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n)
        .map(|_| {
            let values = curve.iter().map(|c| c + resid[rng.gen_range(0..resid.len())]).collect();
            data.with_values(values)
        })
        .collect())
}

fn fit_seed(base: u64, fit: &FitResult, replica: usize) -> u64 {
    seed::derive(
        base,
        &[i64::from(fit.window.t1.num_days_from_ce()), i64::from(fit.window.t2.num_days_from_ce()), replica as i64],
    )
}

/// Refits `n_boot` replicas of every qualified fit in `scan` and pools the
/// qualified results whose critical time falls in the forecast horizon after
/// the latest window end.
pub fn build_ensemble(
    scan: &ScanReport,
    series: &LogSeries,
    fit_config: &FitConfig,
    filter: &QualificationFilter,
    n_boot: usize,
    seed: u64,
) -> Result<TcEnsemble> {
    let originals: Vec<&FitResult> = scan.fits.iter().filter(|f| f.qualified && f.converged).collect();
    if originals.is_empty() {
        return Err(Error::NoBubbleSignal);
    }
    let t2 = scan.latest_t2();
    let end_tau = series.tau_of(t2);
    let horizon = f64::from(filter.tc_horizon_days);
    // Members must land on a calendar day strictly after t2 once floored.
    let in_horizon = |fit: &FitResult| fit.params.tc >= end_tau + 1.0 && fit.params.tc <= end_tau + horizon;

    let groups: Vec<Result<Vec<FitResult>>> = originals
        .par_iter()
        .map(|orig| {
            let replicas = resample_residuals(orig, series, n_boot, fit_seed(seed, orig, 0))?;
            let warm = [orig.params.tc, orig.params.alpha, orig.params.omega];
            let mut group = Vec::with_capacity(n_boot + 1);
            if in_horizon(orig) {
                group.push((*orig).clone());
            }
            for (j, replica) in replicas.iter().enumerate() {
                let config = fit_config.with_seed(fit_seed(seed, orig, j + 1));
                let refit = fit_window_traced(
                    replica,
                    orig.window,
                    &config,
                    filter,
                    Some(warm),
                    Provenance::Bootstrap(j as u32 + 1),
                );
                match refit {
                    Ok((fit, _)) if fit.qualified && fit.converged && in_horizon(&fit) => group.push(fit),
                    Ok(_) | Err(Error::FitFailed { .. }) | Err(Error::IllConditioned { .. }) => {}
                    Err(e) => return Err(e),
                }
            }
            Ok(group)
        })
        .collect();

    let mut members = Vec::new();
    for g in groups {
        members.extend(g?);
    }
    Ok(TcEnsemble {
        members,
        t2,
        origin: series.origin(),
        n_bootstrap_per_fit: n_boot,
        base_fit_count: originals.len(),
        tc_horizon_days: filter.tc_horizon_days,
    })
}
