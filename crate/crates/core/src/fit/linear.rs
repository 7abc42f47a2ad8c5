//! Profiling of the four linear LPPL coefficients.
//!
//! For fixed `(tc, alpha, omega)` the model
//! `A + B f + C1 f cos g + C2 f sin g` with `f = |tau - tc|^alpha` and
//! `g = omega ln|tau - tc|` is linear in `(A, B, C1, C2)`; the least-squares
//! solution comes from a Householder QR of the column-scaled design.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::market_data::LogSeries;

/// Fewest observations for which the linear solve is attempted.
pub const MIN_LINEAR_OBS: usize = 8;

/// Designs whose scaled condition estimate exceeds this are rejected.
pub const MAX_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinearSolution {
    pub a: f64,
    pub b: f64,
    pub c1: f64,
    pub c2: f64,
    /// Attained minimum of the sum of squared residuals.
    pub sse: f64,
}

/// `(C, phi)` with `C >= 0`, `phi` in `[0, 2pi)` and
/// `C cos(x + phi) = c1 cos x + c2 sin x`.
pub fn to_phase_form(c1: f64, c2: f64) -> (f64, f64) {
    let c = c1.hypot(c2);
    if c == 0.0 {
        return (0.0, 0.0);
    }
    let mut phi = (-c2).atan2(c1).rem_euclid(TAU);
    if phi >= TAU {
        phi = 0.0;
    }
    (c, phi)
}

/// Least-squares `(A, B, C1, C2)` for fixed nonlinear parameters.
pub fn solve_linear(tc: f64, alpha: f64, omega: f64, series: &LogSeries) -> Result<LinearSolution> {
    if series.len() < MIN_LINEAR_OBS {
        let (from, to) = match (series.dates().first(), series.dates().last()) {
            (Some(a), Some(b)) => (*a, *b),
            _ => (series.origin(), series.origin()),
        };
        return Err(Error::WindowTooSparse { from, to, found: series.len(), needed: MIN_LINEAR_OBS });
    }
    if let Some(&last) = series.tau().last() {
        if tc <= last {
            return Err(Error::SingularTime { tau: tc });
        }
    }
    let mut ws = LinearWorkspace::new(series.len());
    ws.solve(tc, alpha, omega, series.tau(), series.values())
}

/// Reusable buffers for repeated solves over one window.
#[derive(Debug, Clone)]
pub(crate) struct LinearWorkspace {
    cols: [Vec<f64>; 4],
    rhs: Vec<f64>,
}

impl LinearWorkspace {
    pub(crate) fn new(n: usize) -> Self {
        Self { cols: std::array::from_fn(|_| vec![0.0; n]), rhs: vec![0.0; n] }
    }

    /// Profiled objective only: the minimal SSE, or `None` when the design
    /// is degenerate.
    pub(crate) fn sse(&mut self, tc: f64, alpha: f64, omega: f64, tau: &[f64], values: &[f64]) -> Option<f64> {
        self.factor(tc, alpha, omega, tau, values).ok().map(|f| f.sse)
    }

    pub(crate) fn solve(
        &mut self,
        tc: f64,
        alpha: f64,
        omega: f64,
        tau: &[f64],
        values: &[f64],
    ) -> Result<LinearSolution> {
        let f = self.factor(tc, alpha, omega, tau, values)?;
        // Back substitution on R beta = (Q^T y)[..4], then undo column scaling.
        let mut beta = [0.0; 4];
        for k in (0..4).rev() {
            let mut acc = f.qty[k];
            for j in k + 1..4 {
                acc -= f.r[k][j] * beta[j];
            }
            beta[k] = acc / f.r[k][k];
        }
        for k in 0..4 {
            beta[k] /= f.scale[k];
        }
        Ok(LinearSolution { a: beta[0] + f.offset, b: beta[1], c1: beta[2], c2: beta[3], sse: f.sse })
    }

    fn factor(&mut self, tc: f64, alpha: f64, omega: f64, tau: &[f64], values: &[f64]) -> Result<Factored> {
        let n = tau.len();
        debug_assert_eq!(n, values.len());
        if n < MIN_LINEAR_OBS {
            return Err(Error::IllConditioned { condition: f64::INFINITY });
        }
        if self.rhs.len() != n {
            *self = Self::new(n);
        }
        // Shift by the first value so an exactly constant window gives an
        // exactly zero right-hand side.
        let offset = values[0];
        {
            let [c0, c1, c2, c3] = &mut self.cols;
            for i in 0..n {
                let dt = tc - tau[i];
                if !(dt > 0.0) {
                    return Err(Error::SingularTime { tau: tau[i] });
                }
                let log_dt = dt.ln();
                let power = (alpha * log_dt).exp();
                let (sin, cos) = (omega * log_dt).sin_cos();
                c0[i] = 1.0;
                c1[i] = power;
                c2[i] = power * cos;
                c3[i] = power * sin;
                self.rhs[i] = values[i] - offset;
            }
        }

        let mut scale = [0.0; 4];
        for (k, col) in self.cols.iter_mut().enumerate() {
            let norm = col.iter().map(|x| x * x).sum::<f64>().sqrt();
            if !(norm > 0.0) || !norm.is_finite() {
                return Err(Error::IllConditioned { condition: f64::INFINITY });
            }
            col.iter_mut().for_each(|x| *x /= norm);
            scale[k] = norm;
        }

        let mut r = [[0.0; 4]; 4];
        for k in 0..4 {
            let (head, tail) = self.cols.split_at_mut(k + 1);
            let col = &mut head[k];
            let norm = col[k..].iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                return Err(Error::IllConditioned { condition: f64::INFINITY });
            }
            let diag = if col[k] > 0.0 { -norm } else { norm };
            // v = x - diag e_1, stored in place; |v|^2 = 2 norm (norm + |x_0|).
            col[k] -= diag;
            let vnorm2 = 2.0 * norm * (norm + (col[k] + diag).abs());
            let v = &col[k..];
            for other in tail.iter_mut() {
                let dot: f64 = v.iter().zip(&other[k..]).map(|(a, b)| a * b).sum();
                let s = 2.0 * dot / vnorm2;
                other[k..].iter_mut().zip(v).for_each(|(o, vi)| *o -= s * vi);
            }
            let dot: f64 = v.iter().zip(&self.rhs[k..]).map(|(a, b)| a * b).sum();
            let s = 2.0 * dot / vnorm2;
            self.rhs[k..].iter_mut().zip(v).for_each(|(o, vi)| *o -= s * vi);
            r[k][k] = diag;
            for (j, other) in tail.iter().enumerate() {
                r[k][k + 1 + j] = other[k];
            }
        }

        let diag_abs = [r[0][0].abs(), r[1][1].abs(), r[2][2].abs(), r[3][3].abs()];
        let max = diag_abs.iter().cloned().fold(0.0, f64::max);
        let min = diag_abs.iter().cloned().fold(f64::INFINITY, f64::min);
        let condition = max / min;
        if !(condition <= MAX_CONDITION) {
            return Err(Error::IllConditioned { condition });
        }

        let sse = self.rhs[4..].iter().map(|x| x * x).sum();
        Ok(Factored { r, qty: [self.rhs[0], self.rhs[1], self.rhs[2], self.rhs[3]], scale, offset, sse })
    }
}

struct Factored {
    r: [[f64; 4]; 4],
    qty: [f64; 4],
    scale: [f64; 4],
    offset: f64,
    sse: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market_data::{AssetMeta, PriceSeries};
    use chrono::NaiveDate;

    fn log_series(values: impl Fn(f64) -> f64, n: usize) -> LogSeries {
        let start = NaiveDate::from_ymd_opt(2010, 1, 1).unwrap();
        PriceSeries::new(
            AssetMeta::default(),
            (0..n).map(|i| (start + chrono::Duration::days(i as i64), values(i as f64).exp())).collect(),
        )
        .unwrap()
        .to_log()
    }

    fn lppl_linear(tc: f64, alpha: f64, omega: f64, coef: [f64; 4]) -> impl Fn(f64) -> f64 {
        move |t| {
            let dt = tc - t;
            let f = dt.powf(alpha);
            let g = omega * dt.ln();
            coef[0] + coef[1] * f + coef[2] * f * g.cos() + coef[3] * f * g.sin()
        }
    }

    #[test]
    fn recovers_noiseless_coefficients() {
        let coef = [2.0, -0.03, 0.004, -0.002];
        let (tc, alpha, omega) = (330.0, 0.45, 7.5);
        let s = log_series(lppl_linear(tc, alpha, omega, coef), 300);
        let sol = solve_linear(tc, alpha, omega, &s).unwrap();
        for (got, want) in [sol.a, sol.b, sol.c1, sol.c2].iter().zip(coef) {
            assert!((got - want).abs() < 1e-8, "{got} vs {want}");
        }
        assert!(sol.sse < 1e-16 * 300.0, "{}", sol.sse);
    }

    #[test]
    fn pure_power_law_has_no_oscillation() {
        let s = log_series(lppl_linear(250.0, 0.6, 9.0, [1.0, -0.05, 0.0, 0.0]), 200);
        let sol = solve_linear(250.0, 0.6, 9.0, &s).unwrap();
        assert!(sol.c1.hypot(sol.c2) < 1e-8);
    }

    #[test]
    fn never_worse_than_constant_model() {
        let s = log_series(|t| (t * 0.37).sin() * 0.1 + t * 1e-3, 120);
        let mean = s.values().iter().sum::<f64>() / s.len() as f64;
        let tss: f64 = s.values().iter().map(|v| (v - mean).powi(2)).sum();
        for (tc, alpha, omega) in [(130.0, 0.3, 5.0), (200.0, 0.8, 12.0), (121.0, 0.1, 20.0)] {
            let sol = solve_linear(tc, alpha, omega, &s).unwrap();
            assert!(sol.sse >= 0.0 && sol.sse <= tss * (1.0 + 1e-12));
        }
    }

    #[test]
    fn constant_window_gives_exact_zeros() {
        let s = log_series(|_| 5f64.ln(), 50);
        let sol = solve_linear(80.0, 0.5, 8.0, &s).unwrap();
        assert_eq!((sol.b, sol.c1, sol.c2, sol.sse), (0.0, 0.0, 0.0, 0.0));
        assert_eq!(sol.a, 5f64.ln());
    }

    #[test]
    fn rejects_sparse_and_singular() {
        let s = log_series(|t| t, 5);
        assert!(matches!(solve_linear(10.0, 0.5, 8.0, &s), Err(Error::WindowTooSparse { .. })));
        let s = log_series(|t| t, 20);
        assert!(matches!(solve_linear(19.0, 0.5, 8.0, &s), Err(Error::SingularTime { .. })));
    }

    #[test]
    fn near_collinear_design_is_reported() {
        // alpha -> 0 makes the power column indistinguishable from the constant.
        let s = log_series(|t| t * 1e-3, 40);
        let err = solve_linear(1e9, 1e-9, 1e-9, &s).unwrap_err();
        assert!(matches!(err, Error::IllConditioned { .. }), "{err:?}");
    }

    #[test]
    fn phase_form_examples() {
        assert_eq!(to_phase_form(1.0, 0.0), (1.0, 0.0));
        let (c, phi) = to_phase_form(0.0, -1.0);
        assert!((c - 1.0).abs() < 1e-15 && (phi - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert_eq!(to_phase_form(0.0, 0.0), (0.0, 0.0));
        let (c, phi) = to_phase_form(3.0, 4.0);
        assert!((c - 5.0).abs() < 1e-15);
        for x in [0.0, 1.0, 2.0] {
            let lhs: f64 = c * (x + phi).cos();
            let rhs = 3.0 * x.cos() + 4.0 * x.sin();
            assert!((lhs - rhs).abs() < 1e-12);
        }
    }
}
