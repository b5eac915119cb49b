mod common;

use chrono::NaiveDate;
use common::fixture;
use gpr_core::kv::KvDoc;
use gpr_core::pipeline::{
    build_tail_dataset, parse_ohlc, prepare_split, read_dataset, write_dataset, CsvSchema, DateFormat,
    FrameOptions, MarketFrame, Standardization, Standardizer, TailOptions,
};
use gpr_core::simulation::median;
use gpr_core::volatility::{garman_klass, OhlcSeries};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Geometric Brownian motion bars built from `steps` intraday moves each.
fn gbm_bars(days: usize, annual_vol: f64, steps: usize, seed: u64) -> OhlcSeries {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let step_sd = annual_vol / (250.0 * steps as f64).sqrt();
    let start = NaiveDate::from_ymd_opt(2010, 1, 1).unwrap();
    let mut price: f64 = 100.0;
    let (mut d, mut o, mut h, mut l, mut c) = (vec![], vec![], vec![], vec![], vec![]);
    for i in 0..days {
        let open = price;
        let (mut hi, mut lo) = (price, price);
        for _ in 0..steps {
            let z: f64 = rng.sample(StandardNormal);
            price *= (step_sd * z - 0.5 * step_sd * step_sd).exp();
            hi = hi.max(price);
            lo = lo.min(price);
        }
        d.push(start + chrono::Days::new(i as u64));
        o.push(open);
        h.push(hi);
        l.push(lo);
        c.push(price);
    }
    OhlcSeries::new(d, o, h, l, c).unwrap()
}

#[test]
fn estimators_recover_simulated_volatility() {
    let bars = gbm_bars(2000, 0.2, 400, 1);
    let ewma: Vec<f64> = bars.ewma(0.9, 21).unwrap().values.into_iter().flatten().collect();
    let gk: Vec<f64> = garman_klass(&bars).values.into_iter().flatten().collect();
    let (me, mg) = (median(&ewma), median(&gk));
    assert!((me - 0.2).abs() < 0.15 * 0.2, "ewma median {me}");
    let rms_gk = (gk.iter().map(|v| v * v).sum::<f64>() / gk.len() as f64).sqrt();
    assert!((rms_gk - 0.2).abs() < 0.15 * 0.2, "gk rms {rms_gk}");
    assert!((mg - 0.2).abs() < 0.15 * 0.2, "gk median {mg}");
}

#[test]
fn estimators_are_scale_invariant() {
    let bars = gbm_bars(120, 0.3, 20, 2);
    let scaled = bars.rescaled(37.5).unwrap();
    let (a, b) = (bars.ewma(0.9, 21).unwrap(), scaled.ewma(0.9, 21).unwrap());
    for (x, y) in a.values.iter().zip(&b.values) {
        assert_eq!(x.is_some(), y.is_some());
        if let (Some(x), Some(y)) = (x, y) {
            assert!((x - y).abs() < 1e-12);
        }
    }
    let (a, b) = (garman_klass(&bars), garman_klass(&scaled));
    for (x, y) in a.values.iter().zip(&b.values) {
        assert!((x.unwrap() - y.unwrap()).abs() < 1e-12);
    }
}

fn csv_of(bars: &OhlcSeries, fmt: &str) -> String {
    let mut s = String::from("Date,Open,High,Low,Close\n");
    for i in 0..bars.len() {
        s += &format!(
            "{},{},{},{},{}\n",
            bars.dates()[i].format(fmt),
            bars.open()[i],
            bars.high()[i],
            bars.low()[i],
            bars.close()[i]
        );
    }
    s
}

#[test]
fn loader_handles_day_first_descending_and_missing() {
    let bars = gbm_bars(30, 0.2, 10, 3);
    let text = csv_of(&bars, "%d/%m/%Y");
    let mut lines: Vec<&str> = text.lines().collect();
    lines[1..].reverse();
    let mut text = lines.join("\n");
    text += "\n01/03/2011,n/a,1,1,1\n";
    let schema = CsvSchema { date_format: DateFormat::DayFirst, ..CsvSchema::default() };
    let loaded = parse_ohlc(text.as_bytes(), "mem", &schema).unwrap();
    assert_eq!(loaded.dropped_missing, 1);
    assert_eq!(loaded.series.dates(), bars.dates());
    assert_eq!(loaded.series.close(), bars.close());
    assert!(parse_ohlc(text.as_bytes(), "mem", &CsvSchema::default()).is_err());
}

#[test]
fn loader_reports_bad_numbers_with_line() {
    let text = "date,open,high,low,close\n2020-01-01,1,1,1,1\n2020-01-02,1,x,1,1\n";
    let err = parse_ohlc(text.as_bytes(), "prices.csv", &CsvSchema::default()).unwrap_err().to_string();
    assert!(err.contains("prices.csv:3"), "{err}");
}

fn frame(seed: u64) -> MarketFrame {
    let a = gbm_bars(900, 0.25, 20, seed);
    let b = gbm_bars(880, 0.15, 20, seed + 1);
    let c = gbm_bars(900, 0.10, 20, seed + 2);
    MarketFrame::build(&[("idx", &a), ("glob", &b), ("gold", &c)], &FrameOptions::default()).unwrap()
}

#[test]
fn alignment_does_not_depend_on_asset_order() {
    let a = gbm_bars(300, 0.25, 10, 9);
    let b = gbm_bars(280, 0.15, 10, 10);
    let f1 = MarketFrame::build(&[("a", &a), ("b", &b)], &FrameOptions::default()).unwrap();
    let f2 = MarketFrame::build(&[("b", &b), ("a", &a)], &FrameOptions::default()).unwrap();
    assert_eq!(f1.dates, f2.dates);
    assert_eq!(f1.column("a_gk").unwrap(), f2.column("a_gk").unwrap());
    assert_eq!(f1.dropped_unaligned, f2.dropped_unaligned);
    assert!(f1.dates.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn higher_threshold_keeps_a_subset() {
    let f = frame(20);
    let covs = vec!["idx_ewma".to_string(), "gold_gk".to_string()];
    let mut prev: Option<Vec<String>> = None;
    for th in [0.5, 1.0, 1.5, 2.0] {
        let t = build_tail_dataset(&f, &TailOptions { threshold_pct: th, ..TailOptions::new("idx", covs.clone()) }).unwrap();
        assert!(t.data.y().iter().all(|y| *y > th));
        let labels = t.data.labels().to_vec();
        if let Some(p) = prev {
            assert!(labels.iter().all(|l| p.contains(l)) && labels.len() <= p.len());
        }
        prev = Some(labels);
    }
}

#[test]
fn train_only_standardisation_ignores_test_rows() {
    let f = frame(30);
    let covs = vec!["idx_ewma".to_string(), "glob_ewma".to_string(), "gold_ewma".to_string()];
    let t = build_tail_dataset(&f, &TailOptions { threshold_pct: 1.0, ..TailOptions::new("idx", covs) }).unwrap();
    let split = prepare_split(&t.data, 0.8, 4, Standardization::TrainOnly).unwrap();
    let s = split.standardizer.unwrap();
    // moments must reproduce from the raw training rows alone
    let raw_train = s.inverse_transform(&split.train).unwrap();
    assert_eq!(Standardizer::fit(&raw_train).unwrap().mean.len(), 3);
    for (a, b) in Standardizer::fit(&raw_train).unwrap().mean.iter().zip(&s.mean) {
        assert!((a - b).abs() < 1e-12);
    }
    let z = split.train.column(1);
    assert!((z.iter().sum::<f64>() / z.len() as f64).abs() < 1e-12);
    let full = prepare_split(&t.data, 0.8, 4, Standardization::FullSample).unwrap();
    assert_ne!(full.standardizer.unwrap().mean, s.mean);
}

#[test]
fn dataset_dump_round_trips() {
    let f = frame(40);
    let covs = vec!["idx_ewma".to_string(), "gold_gk".to_string()];
    let t = build_tail_dataset(&f, &TailOptions { threshold_pct: 1.0, ..TailOptions::new("idx", covs) }).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tail.csv");
    let mut extra = KvDoc::new();
    extra.push("target", "idx");
    write_dataset(&t.data, &path, &extra).unwrap();
    let back = read_dataset(&path).unwrap();
    assert_eq!(back.data, t.data);
    assert_eq!(back.meta.get("target"), Some("idx"));
}

#[test]
fn fixture_file_loads() {
    let loaded = gpr_core::pipeline::load_ohlc_csv(&fixture("ohlc_random.csv"), &CsvSchema::default()).unwrap();
    assert_eq!(loaded.series.len(), 100);
    assert_eq!(loaded.dropped_missing, 0);
}
