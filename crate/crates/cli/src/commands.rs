use std::fs;
use std::path::{Path, PathBuf};

use bubblescope::commitment::{self, CommitmentRecord, DigestKind, MasterLedger, Verification};
use bubblescope::forecast::ConfigEcho;
use bubblescope::post::{self, BUBBLE_INDEX_VERSION};
use bubblescope::{
    generate_synthetic, ingest_csv, render_document, run_forecast, scan, AssetMeta, Category, Error, FitConfig,
    ForecastDocument, Interval, LpplParams, PriceSeries, QualificationFilter, ScanGrid, ScanReport, TOOL_VERSION,
};
use chrono::{Datelike, Duration, NaiveDate, Weekday};
use serde_json::json;

use crate::exit::{self, Failure};
use crate::{
    AssetArgs, Command, CommitArgs, ForecastArgs, IngestArgs, LedgerArgs, PipelineArgs, PostArgs, SynthArgs, VerifyArgs,
};

type Outcome = Result<i32, Failure>;

pub fn run(command: Command) -> Outcome {
    match command {
        Command::Ingest(args) => ingest(args),
        Command::Scan(args) => with_threads(args.threads, || scan_cmd(&args)),
        Command::Forecast(args) => with_threads(args.pipeline.threads, || forecast_cmd(&args)),
        Command::Post(args) => with_threads(args.threads, || post_cmd(&args)),
        Command::Commit(args) => commit_cmd(args),
        Command::Verify(args) => verify_cmd(args),
        Command::Ledger(args) => ledger_cmd(args),
        Command::Synth(args) => synth_cmd(args),
    }
}

fn with_threads(threads: usize, job: impl FnOnce() -> Outcome + Send) -> Outcome {
    if threads == 0 {
        return Err(Failure::new(exit::USAGE, "--threads must be at least 1"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Failure::new(exit::IO, e.to_string()))?;
    pool.install(job)
}

fn meta(args: &AssetArgs) -> AssetMeta {
    AssetMeta::new(&args.asset, &args.ticker, &args.source)
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| Failure::new(exit::IO, format!("{}: {e}", path.display())))
}

fn write(dir: &Path, name: &str, bytes: impl AsRef<[u8]>) -> Result<PathBuf, Failure> {
    fs::create_dir_all(dir).map_err(|e| Failure::new(exit::IO, format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    fs::write(&path, bytes).map_err(|e| Failure::new(exit::IO, format!("{}: {e}", path.display())))?;
    Ok(path)
}

fn load_series(path: &Path, asset: &AssetArgs) -> Result<PriceSeries, Failure> {
    Ok(ingest_csv(&read(path)?, meta(asset))?)
}

fn pretty(value: &serde_json::Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("json values serialize");
    text.push('\n');
    text
}

fn range(flag: &str, text: &str) -> Result<Interval, Failure> {
    let usage = || Failure::new(exit::USAGE, format!("{flag} expects `lo,hi`, got `{text}`"));
    let (lo, hi) = text.split_once(',').ok_or_else(usage)?;
    let lo: f64 = lo.trim().parse().map_err(|_| usage())?;
    let hi: f64 = hi.trim().parse().map_err(|_| usage())?;
    Interval::new(lo, hi).map_err(|e| Failure::new(exit::USAGE, format!("{flag}: {e}")))
}

struct Settings {
    grid: ScanGrid,
    filter: QualificationFilter,
    fit: FitConfig,
}

fn settings(args: &PipelineArgs) -> Result<Settings, Failure> {
    let grid =
        ScanGrid { dt1: args.dt1, dt2: args.dt2, min_len: args.min_len, max_len: args.max_len, ..ScanGrid::default() };
    let filter = QualificationFilter {
        alpha_range: range("--filter.alpha", &args.alpha)?,
        omega_range: range("--filter.omega", &args.omega)?,
        require_negative_b: !args.allow_positive_b,
        tc_horizon_days: args.tc_horizon,
    };
    let fit = FitConfig {
        n_starts: args.n_starts,
        max_iterations: args.max_iterations,
        convergence_tol: args.convergence_tol,
        seed: args.seed,
        ..FitConfig::for_filter(&filter)
    };
    grid.validate()?;
    filter.validate()?;
    fit.validate()?;
    Ok(Settings { grid, filter, fit })
}

fn ingest(args: IngestArgs) -> Outcome {
    let series = load_series(&args.input, &args.asset)?;
    let summary = json!({
        "tool_version": TOOL_VERSION,
        "asset": series.meta(),
        "observations": series.len(),
        "first_date": series.first_date(),
        "last_date": series.last_date(),
        "span_days": series.span_days(),
    });
    if let Some(dir) = &args.output_dir {
        let text = format!("# {TOOL_VERSION}\n{}", series.to_csv());
        write(dir, "series.csv", text)?;
    }
    print!("{}", pretty(&summary));
    Ok(exit::OK)
}

fn scan_summary(report: &ScanReport) -> String {
    format!(
        "windows={} converged={} qualified={} failed={} latest_t2={}",
        report.counts.windows_enumerated,
        report.counts.fits_converged,
        report.counts.fits_qualified,
        report.failures.len(),
        report.latest_t2()
    )
}

fn scan_cmd(args: &PipelineArgs) -> Outcome {
    let series = load_series(&args.input, &args.asset)?;
    let s = settings(args)?;
    let report = scan(&series, &s.grid, &s.fit, &s.filter)?;
    write(&args.output_dir, "scan.json", report.to_json() + "\n")?;
    println!("{}", scan_summary(&report));
    Ok(exit::OK)
}

fn forecast_cmd(args: &ForecastArgs) -> Outcome {
    let p = &args.pipeline;
    let category: Category = args.category.parse().map_err(|e: Error| Failure::new(exit::USAGE, e.to_string()))?;
    let series = load_series(&p.input, &p.asset)?;
    let s = settings(p)?;
    let run = match run_forecast(&series, category, &s.grid, &s.fit, &s.filter, args.n_boot, p.seed) {
        Ok(run) => run,
        Err(Error::NoBubbleSignal) => {
            let report = scan(&series, &s.grid, &s.fit, &s.filter)?;
            write(&p.output_dir, "scan.json", report.to_json() + "\n")?;
            return Err(Failure::new(
                exit::NO_SIGNAL,
                format!("no qualified fit, no forecast issued ({})", scan_summary(&report)),
            ));
        }
        Err(e) => return Err(e.into()),
    };
    let created_on = args.created_on.unwrap_or(series.last_date());
    let document = ForecastDocument::new(created_on, vec![run.record.clone()]);
    let text = render_document(&document);

    let summary = json!({
        "tool_version": TOOL_VERSION,
        "config": ConfigEcho::new(&s.filter, &s.grid, &s.fit, args.n_boot, p.seed),
        "record": run.record,
        "ensemble": {
            "members": run.ensemble.len(),
            "base_fits": run.ensemble.base_fit_count,
            "per_t2": run.ensemble.per_t2(),
        },
        "scan": run.scan.counts,
        "document_sha256": commitment::sha256_hex(&text),
    });
    write(&p.output_dir, "scan.json", run.scan.to_json() + "\n")?;
    write(&p.output_dir, "forecast.json", pretty(&summary))?;
    write(&p.output_dir, "forecast.txt", &text)?;
    println!(
        "t2={} n_fits={} t_c 20%-80%={} t_c 5%-95%={}",
        run.record.t2, run.record.n_fits, run.record.window_20_80, run.record.window_5_95
    );
    Ok(exit::OK)
}

fn post_cmd(args: &PostArgs) -> Outcome {
    let series = load_series(&args.input, &args.asset)?;
    let header = |what: String| vec![TOOL_VERSION.to_string(), format!("input={}", args.input.display()), what];

    let drawdown = post::max_drawdown(&series, args.t2)?;
    let dd = json!({
        "tool_version": TOOL_VERSION,
        "input": args.input.display().to_string(),
        "t2": args.t2,
        "drawdown": drawdown,
    });
    write(&args.output_dir, "drawdown.json", pretty(&dd))?;

    for &w in &args.window_days {
        let rows = post::up_day_fraction(&series, w)?;
        let text = post::dated_csv(&header(format!("up_day_fraction window={w} returns")), &rows);
        write(&args.output_dir, &format!("up_fraction_{w}.csv"), text)?;
    }
    for &w in &args.sg_window_days {
        let d = post::sg_derivative(&series, w)?;
        let mut comments = header(format!(
            "log_price_derivative window={w} days degree={} min_obs={}",
            post::SG_DEGREE,
            post::SG_MIN_OBS
        ));
        if !d.gaps.is_empty() {
            comments.push(format!("gaps={}", d.gaps.len()));
        }
        write(&args.output_dir, &format!("sg_derivative_{w}.csv"), post::dated_csv(&comments, &d.points))?;
    }

    let report = match &args.scan {
        Some(path) => serde_json::from_slice::<ScanReport>(&read(path)?)
            .map_err(|e| Failure::new(exit::BAD_INPUT, format!("{}: {e}", path.display())))?,
        None => {
            let upto = series.slice(series.first_date(), args.t2)?;
            let filter = QualificationFilter::default();
            let fit = FitConfig { n_starts: args.n_starts, seed: args.seed, ..FitConfig::for_filter(&filter) };
            scan(&upto, &ScanGrid::default(), &fit, &filter)?
        }
    };
    let index = match post::bubble_index(&report) {
        Ok(v) => Some(v),
        Err(Error::IndexUndefined) => {
            eprintln!("warning: bubble index undefined, no converged fit at t2={}", report.latest_t2());
            None
        }
        Err(e) => return Err(e.into()),
    };
    let bi = json!({
        "tool_version": TOOL_VERSION,
        "definition": BUBBLE_INDEX_VERSION,
        "t2": report.latest_t2(),
        "value": index,
        "windows_at_t2": report.windows_ending_at(report.latest_t2()),
        "scan_config": {
            "grid": report.grid_echo,
            "filter": report.filter_echo,
            "fit": report.fit_echo,
        },
    });
    write(&args.output_dir, "bubble_index.json", pretty(&bi))?;
    println!(
        "drawdown={:.6} peak={} trough={} bubble_index={}",
        drawdown.depth_fraction,
        drawdown.peak_date,
        drawdown.trough_date,
        index.map_or("undefined".to_string(), |v| format!("{v:.6}"))
    );
    Ok(exit::OK)
}

fn commit_cmd(args: CommitArgs) -> Outcome {
    let bytes = read(&args.input)?;
    let name = match args.name {
        Some(n) => n,
        None => args
            .input
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .ok_or_else(|| Failure::new(exit::USAGE, "cannot derive a document name; pass --name"))?,
    };
    let record = commitment::commit(&bytes, &name, args.committed_on, args.reveal_on)?;
    let line = record.to_line();
    if let Some(dir) = &args.output_dir {
        write(dir, &format!("{name}.commit"), format!("{line}\n"))?;
    }
    if let Some(path) = &args.ledger {
        let ledger = MasterLedger::append_to_file(path, &[record], args.committed_on)?;
        eprintln!("ledger version {} written", ledger.versions().len());
    }
    println!("{line}");
    Ok(exit::OK)
}

fn read_records(path: &Path) -> Result<Vec<CommitmentRecord>, Failure> {
    let text = String::from_utf8(read(path)?)
        .map_err(|_| Failure::new(exit::BAD_INPUT, format!("{}: not UTF-8", path.display())))?;
    let records = text
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
        .map(CommitmentRecord::from_line)
        .collect::<Result<Vec<_>, _>>()?;
    if records.is_empty() {
        return Err(Failure::new(exit::BAD_INPUT, format!("{}: no record", path.display())));
    }
    Ok(records)
}

fn verify_cmd(args: VerifyArgs) -> Outcome {
    let bytes = read(&args.input)?;
    let records = read_records(&args.record)?;
    if records.len() != 1 {
        return Err(Failure::new(exit::BAD_INPUT, "record file must hold exactly one record"));
    }
    match commitment::verify(&bytes, &records[0])? {
        Verification::Match => {
            println!("MATCH {}", records[0].document_name);
            Ok(exit::OK)
        }
        Verification::Mismatch(kind) => {
            let which = match kind {
                DigestKind::Sha256 => "sha256",
                DigestKind::Sha512 => "sha512",
                DigestKind::Both => "sha256,sha512",
            };
            println!("MISMATCH {} {which}", records[0].document_name);
            Ok(exit::MISMATCH)
        }
    }
}

fn ledger_cmd(args: LedgerArgs) -> Outcome {
    let ledger = if args.append.is_empty() {
        let ledger = MasterLedger::load(&args.ledger)?;
        ledger.validate()?;
        ledger
    } else {
        let date = args.date.ok_or_else(|| Failure::new(exit::USAGE, "--append requires --date"))?;
        let mut records = Vec::new();
        for path in &args.append {
            records.extend(read_records(path)?);
        }
        MasterLedger::append_to_file(&args.ledger, &records, date)?
    };
    match ledger.latest() {
        Some(v) => println!(
            "versions={} latest={} date={} records={}",
            ledger.versions().len(),
            v.number,
            v.date,
            v.records.len()
        ),
        None => println!("versions=0"),
    }
    Ok(exit::OK)
}

fn synth_cmd(args: SynthArgs) -> Outcome {
    if args.days < 1 {
        return Err(Failure::new(exit::USAGE, "--days must be positive"));
    }
    let params = LpplParams {
        a: args.a,
        b: args.b,
        c: args.c,
        alpha: args.alpha,
        omega: args.omega,
        phi: args.phi,
        tc: args.tc,
    };
    let dates: Vec<NaiveDate> = (0..=args.days)
        .map(|i| args.start + Duration::days(i))
        .filter(|d| !args.business_days || !matches!(d.weekday(), Weekday::Sat | Weekday::Sun))
        .collect();
    let series = generate_synthetic(&params, &dates, args.noise, args.seed, meta(&args.asset))?;
    let truth = json!({
        "tool_version": TOOL_VERSION,
        "params": params,
        "origin": args.start,
        "tc_date": args.start + Duration::days(args.tc.floor() as i64),
        "noise_sigma": args.noise,
        "seed": args.seed,
        "business_days": args.business_days,
    });
    let header = format!(
        "# {TOOL_VERSION}\n# synthetic {}\n",
        serde_json::to_string(&truth["params"]).expect("json values serialize")
    );
    write(&args.output_dir, "series.csv", header + &series.to_csv())?;
    write(&args.output_dir, "truth.json", pretty(&truth))?;
    println!(
        "observations={} last_date={} tc_date={}",
        series.len(),
        series.last_date(),
        truth["tc_date"].as_str().unwrap_or("")
    );
    Ok(exit::OK)
}
