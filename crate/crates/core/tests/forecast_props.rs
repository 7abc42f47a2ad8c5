mod common;

use bubblescope::commitment::sha256_hex;
use bubblescope::forecast::{quantiles, ConfigEcho, DateWindow, LEVELS};
use bubblescope::{parse_document, render_document, Category, ForecastDocument, ForecastRecord};
use chrono::{Duration, NaiveDate};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn quantiles_match_sort_and_index_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(51);
    for _ in 0..1000 {
        let n = rng.gen_range(1..=60);
        let values: Vec<f64> = (0..n).map(|_| f64::from(rng.gen_range(0..80u32)) + rng.gen_range(0.0..1.0)).collect();
        let levels = [0.05, 0.1, 0.2, 0.25, 0.5, 0.8, 0.9, 0.95];
        let q = quantiles(&values, &levels).unwrap();
        for (l, v) in levels.iter().zip(&q) {
            assert_eq!(*v, common::nearest_rank(&values, *l), "n={n} level={l}");
        }
        assert!(q.windows(2).all(|w| w[0] <= w[1]));
    }
}

fn d(s: &str) -> NaiveDate {
    s.parse().unwrap()
}

fn text() -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(vec!['a', 'Z', ' ', '\t', '\n', '\r', '\\', '(', 'é', '-', '0']), 0..12)
        .prop_map(|v| v.into_iter().collect())
}

fn record_strategy() -> impl Strategy<Value = ForecastRecord> {
    (
        prop::sample::select(vec![Category::Index, Category::Equity, Category::Commodity, Category::Forex]),
        text(),
        text(),
        text(),
        0i64..3000,
        (1i64..50, 0i64..50, 0i64..50, 0i64..50),
        0usize..100_000,
        (text(), text(), text(), text()),
    )
        .prop_map(|(category, asset, ticker, source, t2, (a, b, c, e), n_fits, (f, g, h, i))| {
            let t2 = d("2000-01-01") + Duration::days(t2);
            let from5 = t2 + Duration::days(a);
            let from20 = from5 + Duration::days(b);
            let to20 = from20 + Duration::days(c);
            ForecastRecord {
                category,
                asset,
                ticker,
                source,
                t2,
                n_fits,
                window_20_80: DateWindow { from: from20, to: to20 },
                window_5_95: DateWindow { from: from5, to: to20 + Duration::days(e) },
                config: ConfigEcho { filter: f, grid: g, fit: h, bootstrap: i },
            }
        })
        .prop_filter("labels must split back", |r| r.check_labels().is_ok())
}

proptest! {
    #[test]
    fn render_parse_round_trip(records in prop::collection::vec(record_strategy(), 0..6), note in text()) {
        let mut doc = ForecastDocument::new(d("2010-11-11"), records);
        doc.methodology_note = note;
        let bytes = render_document(&doc);
        prop_assert_eq!(parse_document(&bytes).unwrap(), doc.clone());
        prop_assert_eq!(render_document(&parse_document(&bytes).unwrap()), bytes);
    }

    #[test]
    fn record_order_does_not_change_bytes(records in prop::collection::vec(record_strategy(), 1..6), seed in any::<u64>()) {
        let a = render_document(&ForecastDocument::new(d("2010-11-11"), records.clone()));
        let mut shuffled = records;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in (1..shuffled.len()).rev() {
            shuffled.swap(i, rng.gen_range(0..=i));
        }
        let doc = ForecastDocument { records: shuffled, ..ForecastDocument::new(d("2010-11-11"), vec![]) };
        prop_assert_eq!(render_document(&doc), a);
    }

    #[test]
    fn one_day_change_changes_digest(record in record_strategy(), which in 0usize..5) {
        let doc = ForecastDocument::new(d("2010-11-11"), vec![record.clone()]);
        let mut changed = record;
        match which {
            0 => changed.t2 += Duration::days(1),
            1 => changed.window_20_80.from -= Duration::days(1),
            2 => changed.window_20_80.to += Duration::days(1),
            3 => changed.window_5_95.from -= Duration::days(1),
            _ => changed.window_5_95.to += Duration::days(1),
        }
        let other = ForecastDocument::new(d("2010-11-11"), vec![changed]);
        prop_assert_ne!(sha256_hex(&render_document(&doc)), sha256_hex(&render_document(&other)));
    }
}

#[test]
fn ambiguous_labels_are_rejected() {
    let mut r = common::commodity_exemplar().records[0].clone();
    r.source = "B (x".into();
    assert!(r.check_labels().is_err());
    r.source = String::new();
    r.ticker = "CT1 (B)".into();
    assert!(r.check_labels().is_err());
    r.ticker = "C 1 COMB Comdty".into();
    assert!(r.check_labels().is_ok());
}

#[test]
fn levels_are_the_published_pairs() {
    assert_eq!(LEVELS, [0.05, 0.20, 0.80, 0.95]);
}

#[test]
fn golden_commodity_row() {
    let golden = include_bytes!("golden/commodity_row.txt");
    let doc = common::commodity_exemplar();
    assert_eq!(String::from_utf8(render_document(&doc)).unwrap(), String::from_utf8(golden.to_vec()).unwrap());
    assert_eq!(parse_document(golden).unwrap(), doc);
    let row = &doc.records[0];
    assert_eq!(
        row.table_row(),
        "Commodity\tCotton future (USD)\tCT1 COMB Comdty (B)\t2010-11-12 - 2010-11-13\t2010-11-08 - 2010-11-15\t2010-11-10\t1320"
    );
    // The exemplar's 5/95 window opens before t2, which this tool never emits.
    assert!(row.check(183).is_err());
}
