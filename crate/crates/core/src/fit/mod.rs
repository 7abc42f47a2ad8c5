//! Fitting the LPPL model to one window of log prices.
//!
//! The four linear coefficients are profiled out ([`linear`]), leaving a
//! three-dimensional search over `(tc, alpha, omega)`. That search runs a
//! bounded Nelder-Mead ([`simplex`]) from several seeded low-discrepancy
//! start points ([`starts`]) and keeps the lowest converged objective.

pub mod linear;
pub mod simplex;
pub mod starts;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::market_data::LogSeries;
use crate::model::{residuals, Interval, LpplParams, QualificationFilter};

pub use linear::{solve_linear, to_phase_form, LinearSolution};

/// Fewest observations a window must hold to be fit.
pub const MIN_WINDOW_OBS: usize = 30;

/// Fraction by which the default alpha/omega search box exceeds the filter
/// ranges.
pub const SEARCH_WIDENING: f64 = 0.2;

/// Inclusive calendar window `[t1, t2]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Window {
    pub t1: NaiveDate,
    pub t2: NaiveDate,
}

impl Window {
    pub fn new(t1: NaiveDate, t2: NaiveDate) -> Self {
        Self { t1, t2 }
    }

    pub fn len_days(&self) -> i64 {
        (self.t2 - self.t1).num_days()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    pub n_starts: usize,
    /// Nelder-Mead iteration budget per start (shared across restarts).
    pub max_iterations: usize,
    /// Objective spread at which a simplex counts as converged.
    pub convergence_tol: f64,
    /// Critical-time search box, in days past the window end.
    pub tc_search_range: Interval,
    pub alpha_search_range: Interval,
    pub omega_search_range: Interval,
    pub seed: u64,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self::for_filter(&QualificationFilter::default())
    }
}

impl FitConfig {
    /// Search box derived from a filter: alpha and omega ranges widened by
    /// [`SEARCH_WIDENING`], critical time up to the filter horizon.
    pub fn for_filter(filter: &QualificationFilter) -> Self {
        let mut alpha = filter.alpha_range.widened(SEARCH_WIDENING);
        alpha.lo = alpha.lo.max(1e-3);
        alpha.hi = alpha.hi.min(1.0 - 1e-3);
        let mut omega = filter.omega_range.widened(SEARCH_WIDENING);
        omega.lo = omega.lo.max(1e-3);
        Self {
            n_starts: 20,
            max_iterations: 2000,
            convergence_tol: 1e-10,
            tc_search_range: Interval { lo: 1.0, hi: f64::from(filter.tc_horizon_days) },
            alpha_search_range: alpha,
            omega_search_range: omega,
            seed: 0,
        }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_starts == 0 {
            return Err(Error::InvalidConfig("n_starts must be at least 1".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidConfig("max_iterations must be at least 1".into()));
        }
        if !(self.convergence_tol > 0.0) {
            return Err(Error::InvalidConfig("convergence_tol must be positive".into()));
        }
        for (name, r) in [
            ("tc_search_range", self.tc_search_range),
            ("alpha_search_range", self.alpha_search_range),
            ("omega_search_range", self.omega_search_range),
        ] {
            Interval::new(r.lo, r.hi).map_err(|_| Error::InvalidConfig(format!("{name} {r} is empty")))?;
        }
        if self.tc_search_range.lo <= 0.0 {
            return Err(Error::InvalidConfig("tc search must start after the window end".into()));
        }
        if self.alpha_search_range.lo <= 0.0 || self.omega_search_range.lo <= 0.0 {
            return Err(Error::InvalidConfig("alpha and omega search ranges must be positive".into()));
        }
        Ok(())
    }
}

impl std::fmt::Display for FitConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "n_starts={};max_iterations={};convergence_tol={};tc_search={};alpha_search={};omega_search={};seed={}",
            self.n_starts,
            self.max_iterations,
            self.convergence_tol,
            self.tc_search_range,
            self.alpha_search_range,
            self.omega_search_range,
            self.seed
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Original,
    Bootstrap(u32),
}

/// One fitted window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub window: Window,
    pub params: LpplParams,
    pub sse: f64,
    pub rmse: f64,
    pub n_obs: usize,
    pub converged: bool,
    pub qualified: bool,
    pub provenance: Provenance,
    /// How many of the local searches converged.
    pub starts_converged: usize,
    pub starts: usize,
}

/// Outcome of one local search, in start order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StartOutcome {
    pub tc: f64,
    pub alpha: f64,
    pub omega: f64,
    pub sse: f64,
    pub converged: bool,
}

/// Fits the window `[window.t1, window.t2]` of `series`.
pub fn fit_window(
    series: &LogSeries,
    window: Window,
    config: &FitConfig,
    filter: &QualificationFilter,
) -> Result<FitResult> {
    fit_window_traced(series, window, config, filter, None, Provenance::Original).map(|(fit, _)| fit)
}

/// Like [`fit_window`], optionally seeding the first local search at a known
/// `(tc, alpha, omega)`, and returning every start's outcome.
pub fn fit_window_traced(
    series: &LogSeries,
    window: Window,
    config: &FitConfig,
    filter: &QualificationFilter,
    warm_start: Option<[f64; 3]>,
    provenance: Provenance,
) -> Result<(FitResult, Vec<StartOutcome>)> {
    let data = series.window(window.t1, window.t2);
    if data.len() < MIN_WINDOW_OBS {
        return Err(Error::WindowTooSparse {
            from: window.t1,
            to: window.t2,
            found: data.len(),
            needed: MIN_WINDOW_OBS,
        });
    }
    let end_tau = series.tau_of(window.t2);
    let search = SearchBox::new(config, end_tau);

    let mut points = starts::shifted_halton::<3>(config.n_starts, config.seed);
    if let Some(warm) = warm_start {
        points.pop();
        points.insert(0, search.to_unit(warm));
    }

    let options = simplex::SimplexOptions {
        initial_step: 0.1,
        max_iterations: config.max_iterations,
        tolerance: config.convergence_tol,
    };
    let mut ws = linear::LinearWorkspace::new(data.len());
    let (tau, values) = (data.tau(), data.values());
    let outcomes: Vec<StartOutcome> = points
        .into_iter()
        .map(|start| {
            let r = simplex::minimize(
                |u: &[f64; 3]| {
                    let [tc, alpha, omega] = search.from_unit(u);
                    ws.sse(tc, alpha, omega, tau, values).unwrap_or(f64::INFINITY)
                },
                start,
                &options,
            );
            let [tc, alpha, omega] = search.from_unit(&r.x);
            StartOutcome { tc, alpha, omega, sse: r.f, converged: r.converged && r.f.is_finite() }
        })
        .collect();

    let best = outcomes
        .iter()
        .filter(|o| o.converged)
        .min_by(|a, b| a.sse.total_cmp(&b.sse))
        .ok_or(Error::FitFailed { t1: window.t1, t2: window.t2 })?;

    let sol = ws.solve(best.tc, best.alpha, best.omega, tau, values)?;
    let (c, phi) = to_phase_form(sol.c1, sol.c2);
    let params = LpplParams { a: sol.a, b: sol.b, c, alpha: best.alpha, omega: best.omega, phi, tc: best.tc };
    let sse: f64 = residuals(&params, &data)?.iter().map(|r| r * r).sum();
    let fit = FitResult {
        window,
        params,
        sse,
        rmse: (sse / data.len() as f64).sqrt(),
        n_obs: data.len(),
        converged: true,
        qualified: filter.qualifies(&params, end_tau),
        provenance,
        starts_converged: outcomes.iter().filter(|o| o.converged).count(),
        starts: outcomes.len(),
    };
    Ok((fit, outcomes))
}

/// Affine map between the unit cube and the `(tc, alpha, omega)` box.
#[derive(Debug, Clone, Copy)]
struct SearchBox {
    lo: [f64; 3],
    width: [f64; 3],
}

impl SearchBox {
    fn new(config: &FitConfig, end_tau: f64) -> Self {
        let ranges = [
            Interval { lo: end_tau + config.tc_search_range.lo, hi: end_tau + config.tc_search_range.hi },
            config.alpha_search_range,
            config.omega_search_range,
        ];
        Self { lo: ranges.map(|r| r.lo), width: ranges.map(|r| r.width()) }
    }

    fn from_unit(&self, u: &[f64; 3]) -> [f64; 3] {
        std::array::from_fn(|k| self.lo[k] + u[k] * self.width[k])
    }

    fn to_unit(&self, x: [f64; 3]) -> [f64; 3] {
        std::array::from_fn(|k| {
            if self.width[k] > 0.0 {
                ((x[k] - self.lo[k]) / self.width[k]).clamp(0.0, 1.0)
            } else {
                0.0
            }
        })
    }
}
