//! The first-order log-periodic power law (LPPL):
//!
//! ```text
//! ln P(t) = A + B |t - tc|^alpha + C |t - tc|^alpha cos(omega ln|t - tc| + phi)
//! ```
//!
//! Time is measured in calendar days (`tau`) from the first observation of
//! the series being modelled.

use std::f64::consts::{PI, TAU};

use chrono::NaiveDate;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::market_data::{AssetMeta, LogSeries, PriceSeries};

/// The seven LPPL parameters in canonical form (`c >= 0`, `phi` in `[0, 2pi)`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LpplParams {
    /// Log-price level at the critical time.
    pub a: f64,
    /// Power-law amplitude; negative for a growing bubble.
    pub b: f64,
    /// Log-periodic oscillation amplitude.
    pub c: f64,
    /// Power-law exponent.
    pub alpha: f64,
    /// Angular log-frequency.
    pub omega: f64,
    /// Oscillation phase.
    pub phi: f64,
    /// Critical time in day coordinates.
    pub tc: f64,
}

impl LpplParams {
    /// Folds a negative amplitude into the phase and wraps the phase into
    /// `[0, 2pi)`. The model value is unchanged.
    pub fn canonical(mut self) -> Self {
        if self.c < 0.0 {
            self.c = -self.c;
            self.phi += PI;
        }
        self.phi = self.phi.rem_euclid(TAU);
        // rem_euclid can round up to exactly 2pi for tiny negative inputs.
        if self.phi >= TAU {
            self.phi = 0.0;
        }
        self
    }

    /// Linear-form coefficients `(c1, c2)` with
    /// `c cos(x + phi) = c1 cos x + c2 sin x`.
    pub fn linear_coefficients(&self) -> (f64, f64) {
        (self.c * self.phi.cos(), -self.c * self.phi.sin())
    }

    pub fn is_canonical(&self) -> bool {
        self.c >= 0.0 && (0.0..TAU).contains(&self.phi)
    }
}

/// Evaluates the model at `tau`.
pub fn evaluate(params: &LpplParams, tau: f64) -> Result<f64> {
    let dt = (tau - params.tc).abs();
    if dt == 0.0 {
        if params.c != 0.0 {
            return Err(Error::SingularTime { tau });
        }
        return Ok(params.a);
    }
    let power = dt.powf(params.alpha);
    Ok(params.a + params.b * power + params.c * power * (params.omega * dt.ln() + params.phi).cos())
}

/// `value[i] - evaluate(params, tau[i])` for every observation.
pub fn residuals(params: &LpplParams, series: &LogSeries) -> Result<Vec<f64>> {
    series.tau().iter().zip(series.values()).map(|(tau, value)| Ok(value - evaluate(params, *tau)?)).collect()
}

/// Closed real interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::InvalidConfig(format!("empty interval [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Widens the interval by `fraction` of its width, split evenly on both
    /// sides.
    pub fn widened(&self, fraction: f64) -> Interval {
        let pad = 0.5 * fraction * self.width();
        Interval { lo: self.lo - pad, hi: self.hi + pad }
    }
}

impl std::fmt::Display for Interval {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{},{}]", self.lo, self.hi)
    }
}

/// Parameter ranges a fit must satisfy to count as a bubble signature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QualificationFilter {
    pub alpha_range: Interval,
    pub omega_range: Interval,
    pub require_negative_b: bool,
    /// Largest admissible `tc - t2` in days.
    pub tc_horizon_days: u32,
}

impl Default for QualificationFilter {
    fn default() -> Self {
        Self {
            alpha_range: Interval { lo: 0.1, hi: 0.9 },
            omega_range: Interval { lo: 4.0, hi: 25.0 },
            require_negative_b: true,
            tc_horizon_days: 183,
        }
    }
}

impl QualificationFilter {
    pub fn validate(&self) -> Result<()> {
        Interval::new(self.alpha_range.lo, self.alpha_range.hi)?;
        Interval::new(self.omega_range.lo, self.omega_range.hi)?;
        if self.tc_horizon_days == 0 {
            return Err(Error::InvalidConfig("tc_horizon_days must be positive".into()));
        }
        Ok(())
    }

    /// Whether `params`, fit on a window ending at `window_end_tau`, qualify.
    pub fn qualifies(&self, params: &LpplParams, window_end_tau: f64) -> bool {
        self.alpha_range.contains(params.alpha)
            && self.omega_range.contains(params.omega)
            && (!self.require_negative_b || params.b < 0.0)
            && window_end_tau < params.tc
            && params.tc <= window_end_tau + f64::from(self.tc_horizon_days)
    }
}

impl std::fmt::Display for QualificationFilter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "alpha={};omega={};require_negative_b={};tc_horizon_days={}",
            self.alpha_range, self.omega_range, self.require_negative_b, self.tc_horizon_days
        )
    }
}

pub fn qualifies(params: &LpplParams, window_end_tau: f64, filter: &QualificationFilter) -> bool {
    filter.qualifies(params, window_end_tau)
}

/// Samples the model on `dates` (day 0 = `dates[0]`) and adds seeded i.i.d.
/// Gaussian noise to the log prices. `noise_sigma = 0` yields the exact curve.
pub fn generate_synthetic(
    params: &LpplParams,
    dates: &[NaiveDate],
    noise_sigma: f64,
    seed: u64,
    meta: AssetMeta,
) -> Result<PriceSeries> {
    if !(noise_sigma >= 0.0) || !noise_sigma.is_finite() {
        return Err(Error::InvalidConfig(format!("noise sigma must be >= 0, got {noise_sigma}")));
    }
    let Some(origin) = dates.first().copied() else {
        return Err(Error::TooFewObservations(0));
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, noise_sigma).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let mut observations = Vec::with_capacity(dates.len());
    for date in dates {
        let tau = (*date - origin).num_days() as f64;
        if tau >= params.tc {
            return Err(Error::SingularTime { tau });
        }
        let mut log_price = evaluate(params, tau)?;
        if noise_sigma > 0.0 {
            log_price += noise.sample(&mut rng);
        }
        observations.push((*date, log_price.exp()));
    }
    PriceSeries::new(meta, observations)
}
