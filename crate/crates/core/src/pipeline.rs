//! From OHLC files to an exceedance dataset: CSV loading, per-asset returns
//! and volatilities, date alignment, tail extraction, standardisation,
//! train/test splitting and the dataset dump format.

use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{GprError, Result};
use crate::kv::KvDoc;
use crate::model::ExceedanceDataset;
use crate::volatility::{garman_klass, OhlcSeries};

/// Cell values treated as missing.
const MISSING: [&str; 6] = ["", "na", "n/a", "nan", "null", "-"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DateFormat {
    /// `2024-03-15`
    Iso,
    /// `15-03-2024`, `15/03/2024`, `15.03.2024` or `15-Mar-2024`
    DayFirst,
    /// A chrono format string.
    Custom(String),
}

impl DateFormat {
    fn patterns(&self) -> Vec<&str> {
        match self {
            DateFormat::Iso => vec!["%Y-%m-%d"],
            DateFormat::DayFirst => vec!["%d-%m-%Y", "%d/%m/%Y", "%d.%m.%Y", "%d-%b-%Y", "%d %b %Y"],
            DateFormat::Custom(f) => vec![f.as_str()],
        }
    }

    pub fn parse(&self, raw: &str) -> Option<NaiveDate> {
        let raw = raw.trim();
        self.patterns().into_iter().find_map(|f| NaiveDate::parse_from_str(raw, f).ok())
    }
}

impl std::str::FromStr for DateFormat {
    type Err = GprError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "iso" => Ok(DateFormat::Iso),
            "dayfirst" | "day-first" => Ok(DateFormat::DayFirst),
            f if f.contains('%') => Ok(DateFormat::Custom(f.to_string())),
            other => Err(GprError::invalid(format!(
                "unknown date format `{other}` (use iso, dayfirst or a %-pattern)"
            ))),
        }
    }
}

/// Column names (matched case-insensitively) and date format of an OHLC file.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvSchema {
    pub date: String,
    pub open: String,
    pub high: String,
    pub low: String,
    pub close: String,
    pub date_format: DateFormat,
    pub delimiter: u8,
}

impl Default for CsvSchema {
    fn default() -> Self {
        Self {
            date: "date".into(),
            open: "open".into(),
            high: "high".into(),
            low: "low".into(),
            close: "close".into(),
            date_format: DateFormat::Iso,
            delimiter: b',',
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadedOhlc {
    pub series: OhlcSeries,
    /// Rows dropped because a price was missing.
    pub dropped_missing: usize,
}

fn parse_price(raw: &str) -> Option<std::result::Result<f64, ()>> {
    let t = raw.trim();
    if MISSING.contains(&t.to_ascii_lowercase().as_str()) {
        return None;
    }
    Some(t.replace(',', "").parse::<f64>().map_err(|_| ()))
}

/// Reads OHLC bars from delimited text with a header row. Files in
/// descending date order are reversed.
pub fn parse_ohlc<R: Read>(reader: R, origin: &str, schema: &CsvSchema) -> Result<LoadedOhlc> {
    let mut rdr = csv::ReaderBuilder::new()
        .delimiter(schema.delimiter)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h.trim_start_matches('\u{feff}').eq_ignore_ascii_case(name))
            .ok_or_else(|| GprError::Parse { path: origin.to_string(), line: 1, message: format!("no `{name}` column") })
    };
    let cols = [find(&schema.date)?, find(&schema.open)?, find(&schema.high)?, find(&schema.low)?, find(&schema.close)?];

    let mut rows: Vec<(NaiveDate, [f64; 4])> = Vec::new();
    let mut dropped = 0;
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = rec.position().map_or(i + 2, |p| p.line() as usize);
        let err = |message: String| GprError::Parse { path: origin.to_string(), line, message };
        if rec.iter().all(|f| f.trim().is_empty()) {
            continue;
        }
        let raw_date = rec.get(cols[0]).unwrap_or("");
        let date = schema.date_format.parse(raw_date).ok_or_else(|| err(format!("unparseable date `{raw_date}`")))?;
        let mut prices = [0.0; 4];
        let mut missing = false;
        for (k, &c) in cols[1..].iter().enumerate() {
            let raw = rec.get(c).unwrap_or("");
            match parse_price(raw) {
                None => missing = true,
                Some(Ok(v)) => prices[k] = v,
                Some(Err(())) => return Err(err(format!("unparseable number `{raw}`"))),
            }
        }
        if missing {
            dropped += 1;
        } else {
            rows.push((date, prices));
        }
    }
    if rows.is_empty() {
        return Err(GprError::invalid(format!("{origin}: no complete price rows")));
    }
    if rows.len() > 1 && rows[0].0 > rows[rows.len() - 1].0 {
        rows.reverse();
    }
    if let Some(w) = rows.windows(2).find(|w| w[0].0 >= w[1].0) {
        return Err(GprError::invalid(format!("{origin}: dates out of order or repeated at {}", w[1].0)));
    }
    let dates = rows.iter().map(|r| r.0).collect();
    let col = |k: usize| rows.iter().map(|r| r.1[k]).collect();
    let series = OhlcSeries::new(dates, col(0), col(1), col(2), col(3))
        .map_err(|e| GprError::invalid(format!("{origin}: {e}")))?;
    if dropped > 0 {
        log::info!("{origin}: dropped {dropped} rows with missing prices");
    }
    Ok(LoadedOhlc { series, dropped_missing: dropped })
}

pub fn load_ohlc_csv(path: &Path, schema: &CsvSchema) -> Result<LoadedOhlc> {
    let file = std::fs::File::open(path).map_err(|e| GprError::io(path, e))?;
    parse_ohlc(file, &path.display().to_string(), schema)
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameOptions {
    pub alpha: f64,
    pub window: usize,
    /// Use the previous trading day's volatilities as covariates.
    pub lag_covariates: bool,
}

impl Default for FrameOptions {
    fn default() -> Self {
        Self { alpha: 0.9, window: 21, lag_covariates: false }
    }
}

/// Per-asset returns and volatilities on the dates all assets share.
/// Columns are `{asset}_ret`, `{asset}_ewma` and `{asset}_gk`, fractional units.
#[derive(Debug, Clone, PartialEq)]
pub struct MarketFrame {
    pub dates: Vec<NaiveDate>,
    pub names: Vec<String>,
    /// Column-major values, one vector per name.
    pub columns: Vec<Vec<f64>>,
    /// Dates with complete data for some asset but not for all of them.
    pub dropped_unaligned: usize,
}

impl MarketFrame {
    pub fn build(assets: &[(&str, &OhlcSeries)], opts: &FrameOptions) -> Result<Self> {
        if assets.is_empty() {
            return Err(GprError::invalid("no assets given"));
        }
        let mut per_asset: Vec<BTreeMap<NaiveDate, [f64; 3]>> = Vec::with_capacity(assets.len());
        let mut names = Vec::new();
        for (name, series) in assets {
            if name.is_empty() || name.contains(',') {
                return Err(GprError::invalid(format!("bad asset name `{name}`")));
            }
            names.extend([format!("{name}_ret"), format!("{name}_ewma"), format!("{name}_gk")]);
            let (ret_dates, ret) = series.returns();
            let ewma = series.ewma(opts.alpha, opts.window)?.values;
            let gk = garman_klass(series).values;
            let mut map = BTreeMap::new();
            for (t, d) in ret_dates.iter().enumerate() {
                // return t belongs to bar t + 1
                let (e, g) = if opts.lag_covariates {
                    (t.checked_sub(1).and_then(|s| ewma[s]), gk[t])
                } else {
                    (ewma[t], gk[t + 1])
                };
                if let (Some(e), Some(g)) = (e, g) {
                    if ret[t].is_finite() && e.is_finite() && g.is_finite() {
                        map.insert(*d, [ret[t], e, g]);
                    }
                }
            }
            per_asset.push(map);
        }
        let union: BTreeSet<NaiveDate> = per_asset.iter().flat_map(|m| m.keys().copied()).collect();
        let dates: Vec<NaiveDate> =
            union.iter().copied().filter(|d| per_asset.iter().all(|m| m.contains_key(d))).collect();
        let dropped_unaligned = union.len() - dates.len();
        if dropped_unaligned > 0 {
            log::info!("alignment dropped {dropped_unaligned} dates not shared by all assets");
        }
        let mut columns = vec![Vec::with_capacity(dates.len()); names.len()];
        for d in &dates {
            for (a, m) in per_asset.iter().enumerate() {
                for (k, v) in m[d].iter().enumerate() {
                    columns[3 * a + k].push(*v);
                }
            }
        }
        Ok(Self { dates, names, columns, dropped_unaligned })
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    pub fn column(&self, name: &str) -> Result<&[f64]> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|i| self.columns[i].as_slice())
            .ok_or_else(|| GprError::invalid(format!("no column `{name}` (have {})", self.names.join(", "))))
    }
}

/// Per-column mean and population standard deviation.
#[derive(Debug, Clone, PartialEq)]
pub struct Standardizer {
    pub names: Vec<String>,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl Standardizer {
    /// Fits every non-intercept column of `data`.
    pub fn fit(data: &ExceedanceDataset) -> Result<Self> {
        let first = usize::from(data.has_intercept());
        let n = data.n() as f64;
        let (mut names, mut mean, mut std) = (Vec::new(), Vec::new(), Vec::new());
        for j in first..data.p() {
            let col = data.column(j);
            let m = col.iter().sum::<f64>() / n;
            let s = (col.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / n).sqrt();
            let name = &data.feature_names()[j];
            if !(s > 0.0 && s.is_finite()) {
                return Err(GprError::invalid(format!("column `{name}` is constant and cannot be standardised")));
            }
            names.push(name.clone());
            mean.push(m);
            std.push(s);
        }
        Ok(Self { names, mean, std })
    }

    fn index(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn apply_value(&self, name: &str, v: f64) -> Option<f64> {
        self.index(name).map(|i| (v - self.mean[i]) / self.std[i])
    }

    pub fn invert_value(&self, name: &str, z: f64) -> Option<f64> {
        self.index(name).map(|i| z * self.std[i] + self.mean[i])
    }

    /// Standardises every column of `data` this standardizer knows by name.
    pub fn transform(&self, data: &ExceedanceDataset) -> Result<ExceedanceDataset> {
        self.map(data, |s, name, v| s.apply_value(name, v))
    }

    pub fn inverse_transform(&self, data: &ExceedanceDataset) -> Result<ExceedanceDataset> {
        self.map(data, |s, name, v| s.invert_value(name, v))
    }

    fn map(&self, data: &ExceedanceDataset, f: impl Fn(&Self, &str, f64) -> Option<f64>) -> Result<ExceedanceDataset> {
        let names = data.feature_names();
        let p = data.p();
        let x: Vec<f64> = data
            .x_flat()
            .iter()
            .enumerate()
            .map(|(k, &v)| f(self, &names[k % p], v).unwrap_or(v))
            .collect();
        data.with_design(x, names.to_vec(), data.has_intercept())
    }

    pub fn write_kv(&self, doc: &mut KvDoc) {
        for (i, name) in self.names.iter().enumerate() {
            doc.push(format!("standardizer.mean.{name}"), self.mean[i]);
            doc.push(format!("standardizer.std.{name}"), self.std[i]);
        }
    }

    /// `None` when the document holds no standardizer.
    pub fn from_kv(doc: &KvDoc) -> Result<Option<Self>> {
        let (mut names, mut mean, mut std) = (Vec::new(), Vec::new(), Vec::new());
        for (name, v) in doc.with_prefix("standardizer.mean.") {
            names.push(name.to_string());
            mean.push(v.parse::<f64>().map_err(|_| GprError::invalid(format!("bad standardizer mean `{v}`")))?);
            std.push(doc.parse_value::<f64>(&format!("standardizer.std.{name}"))?);
        }
        Ok((!names.is_empty()).then_some(Self { names, mean, std }))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TailOptions {
    /// Asset whose losses are modelled; its `{target}_ret` column is used.
    pub target: String,
    /// Loss threshold in percent.
    pub threshold_pct: f64,
    /// Frame columns used as covariates, in order.
    pub covariates: Vec<String>,
    /// Natural log of each covariate before anything else.
    pub log_covariates: bool,
    pub standardize: bool,
}

impl TailOptions {
    pub fn new(target: &str, covariates: Vec<String>) -> Self {
        Self { target: target.into(), threshold_pct: 2.0, covariates, log_covariates: false, standardize: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TailDataset {
    pub data: ExceedanceDataset,
    pub standardizer: Option<Standardizer>,
    /// Rows of the frame that were scanned.
    pub n_scanned: usize,
}

/// Keeps the days on which the target lost more than `threshold_pct` percent.
/// `y` is the loss in percent and `mu` the threshold; the design is an
/// intercept followed by the selected covariates.
pub fn build_tail_dataset(frame: &MarketFrame, opts: &TailOptions) -> Result<TailDataset> {
    if !(opts.threshold_pct > 0.0 && opts.threshold_pct.is_finite()) {
        return Err(GprError::invalid(format!("threshold must be positive, got {}", opts.threshold_pct)));
    }
    let ret = frame.column(&format!("{}_ret", opts.target))?;
    let covs = opts.covariates.iter().map(|c| frame.column(c)).collect::<Result<Vec<_>>>()?;
    let p = covs.len() + 1;
    let mut x = Vec::new();
    let mut y = Vec::new();
    let mut labels = Vec::new();
    for (t, r) in ret.iter().enumerate() {
        let pct = r * 100.0;
        if pct >= -opts.threshold_pct {
            continue;
        }
        let mut row = vec![1.0];
        for c in &covs {
            let v = c[t];
            row.push(if opts.log_covariates { v.ln() } else { v });
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(GprError::invalid(format!(
                "non-finite covariate on {} (log of a zero volatility?)",
                frame.dates[t]
            )));
        }
        x.extend(row);
        y.push(-pct);
        labels.push(frame.dates[t].format("%Y-%m-%d").to_string());
    }
    if y.len() < p + 2 {
        return Err(GprError::InsufficientTailData { needed: p + 2, found: y.len() });
    }
    let mut names = vec!["intercept".to_string()];
    names.extend(opts.covariates.iter().cloned());
    let data = ExceedanceDataset::from_flat(x, y, opts.threshold_pct, names, true)?.with_labels(labels)?;
    let (data, standardizer) = if opts.standardize {
        let s = Standardizer::fit(&data)?;
        (s.transform(&data)?, Some(s))
    } else {
        (data, None)
    };
    Ok(TailDataset { data, standardizer, n_scanned: ret.len() })
}

/// Seeded shuffle; the first `round(n * train_frac)` rows train.
pub fn split_train_test(
    data: &ExceedanceDataset,
    train_frac: f64,
    seed: u64,
) -> Result<(ExceedanceDataset, ExceedanceDataset)> {
    if !(train_frac > 0.0 && train_frac < 1.0) {
        return Err(GprError::config(format!("train fraction must lie in (0, 1), got {train_frac}")));
    }
    let n = data.n();
    let n_train = (n as f64 * train_frac).round() as usize;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let (a, b) = order.split_at(n_train);
    Ok((data.subset(a)?, data.subset(b)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Standardization {
    None,
    /// Moments from the training rows, applied to both parts.
    TrainOnly,
    /// Moments from all rows before splitting.
    FullSample,
}

impl std::str::FromStr for Standardization {
    type Err = GprError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Self::None),
            "train" => Ok(Self::TrainOnly),
            "full" => Ok(Self::FullSample),
            other => Err(GprError::invalid(format!("unknown standardization `{other}` (none, train, full)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PreparedSplit {
    pub train: ExceedanceDataset,
    pub test: ExceedanceDataset,
    pub standardizer: Option<Standardizer>,
}

pub fn prepare_split(data: &ExceedanceDataset, train_frac: f64, seed: u64, mode: Standardization) -> Result<PreparedSplit> {
    match mode {
        Standardization::None => {
            let (train, test) = split_train_test(data, train_frac, seed)?;
            Ok(PreparedSplit { train, test, standardizer: None })
        }
        Standardization::FullSample => {
            let s = Standardizer::fit(data)?;
            let (train, test) = split_train_test(&s.transform(data)?, train_frac, seed)?;
            Ok(PreparedSplit { train, test, standardizer: Some(s) })
        }
        Standardization::TrainOnly => {
            let (train, test) = split_train_test(data, train_frac, seed)?;
            let s = Standardizer::fit(&train)?;
            Ok(PreparedSplit { train: s.transform(&train)?, test: s.transform(&test)?, standardizer: Some(s) })
        }
    }
}

pub fn meta_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".meta");
    PathBuf::from(s)
}

/// Writes `date,y,<covariates>` (intercept column omitted) and a `.meta`
/// sidecar with the threshold, intercept flag and `extra` entries.
pub fn write_dataset(data: &ExceedanceDataset, path: &Path, extra: &KvDoc) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| GprError::io(path, e))?;
    write_dataset_csv(data, file)?;
    let mut meta = KvDoc::new();
    meta.push("format", DATASET_FORMAT);
    meta.push("mu", data.mu());
    meta.push("intercept", data.has_intercept());
    meta.push("n_rows", data.n());
    meta.push("covariates", covariate_names(data).join(","));
    for (k, v) in extra.entries() {
        meta.push(k.clone(), v);
    }
    meta.write(&meta_path(path))
}

const DATASET_FORMAT: &str = "gpr-dataset/1";

fn covariate_names(data: &ExceedanceDataset) -> Vec<String> {
    data.feature_names()[usize::from(data.has_intercept())..].to_vec()
}

pub fn write_dataset_csv<W: Write>(data: &ExceedanceDataset, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let covs = covariate_names(data);
    let mut header = vec!["date".to_string(), "y".to_string()];
    header.extend(covs.iter().cloned());
    w.write_record(&header)?;
    let first = usize::from(data.has_intercept());
    for i in 0..data.n() {
        let label = data.labels().get(i).cloned().unwrap_or_else(|| i.to_string());
        let mut rec = vec![label, data.y()[i].to_string()];
        rec.extend(data.row(i)[first..].iter().map(|v| v.to_string()));
        w.write_record(&rec)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct LoadedDataset {
    pub data: ExceedanceDataset,
    pub meta: KvDoc,
}

/// Reads a dataset dump and its sidecar.
pub fn read_dataset(path: &Path) -> Result<LoadedDataset> {
    let mpath = meta_path(path);
    if !path.exists() {
        return Err(GprError::io(path, std::io::Error::new(std::io::ErrorKind::NotFound, "dataset file not found")));
    }
    let meta = KvDoc::read(&mpath)?;
    let mu: f64 = meta.parse_value("mu")?;
    let intercept: bool = meta.parse_value("intercept")?;
    let file = std::fs::File::open(path).map_err(|e| GprError::io(path, e))?;
    let origin = path.display().to_string();
    let mut rdr = csv::Reader::from_reader(file);
    let headers = rdr.headers()?.clone();
    if headers.len() < 2 || &headers[0] != "date" || &headers[1] != "y" {
        return Err(GprError::Parse { path: origin, line: 1, message: "expected header `date,y,...`".into() });
    }
    let covs: Vec<String> = headers.iter().skip(2).map(str::to_string).collect();
    let (mut x, mut y, mut labels) = (Vec::new(), Vec::new(), Vec::new());
    for rec in rdr.records() {
        let rec = rec?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        let num = |raw: &str| {
            raw.parse::<f64>().map_err(|_| GprError::Parse {
                path: origin.clone(),
                line,
                message: format!("unparseable number `{raw}`"),
            })
        };
        labels.push(rec[0].to_string());
        y.push(num(&rec[1])?);
        if intercept {
            x.push(1.0);
        }
        for k in 0..covs.len() {
            x.push(num(rec.get(k + 2).unwrap_or(""))?);
        }
    }
    let mut names = if intercept { vec!["intercept".to_string()] } else { Vec::new() };
    names.extend(covs);
    let data = ExceedanceDataset::from_flat(x, y, mu, names, intercept)?.with_labels(labels)?;
    Ok(LoadedDataset { data, meta })
}
