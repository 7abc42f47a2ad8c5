//! Diagnostics for faster-than-exponential ("bubble") price regimes.
//!
//! The pipeline ingests a daily price series ([`market_data`]), fits the
//! log-periodic power law ([`model`], [`fit`]) on a grid of windows
//! ([`scan`]), refits residual-bootstrap replicas ([`bootstrap`]) and turns
//! the pooled critical times into dated quantile windows ([`forecast`]).
//! [`post`] holds the after-the-fact evaluation measures and [`commitment`]
//! seals forecast documents with SHA-256/SHA-512 fingerprints.

pub mod bootstrap;
pub mod commitment;
pub mod error;
pub mod fit;
pub mod forecast;
pub mod market_data;
pub mod model;
pub mod post;
pub mod scan;
pub mod seed;

pub use bootstrap::{build_ensemble, resample_residuals, TcEnsemble};
pub use error::{Error, Result};
pub use fit::{fit_window, FitConfig, FitResult, Provenance, Window};
pub use forecast::{
    make_forecast, parse_document, render_document, run_forecast, tc_quantiles, Category, ConfigEcho, ForecastDocument,
    ForecastRecord, ForecastRun,
};
pub use market_data::{ingest_csv, AssetMeta, LogSeries, PriceSeries, ReturnSign};
pub use model::{evaluate, generate_synthetic, qualifies, residuals, Interval, LpplParams, QualificationFilter};
pub use scan::{enumerate_windows, scan, ScanGrid, ScanReport};

/// Version string embedded in every output artifact.
pub const TOOL_VERSION: &str = concat!("bubblescope ", env!("CARGO_PKG_VERSION"));
