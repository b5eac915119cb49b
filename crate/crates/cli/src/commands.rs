use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{bail, ensure, Context, Result};
use gpr_core::compare::{compare_priors, render_comparison, tune_and_fit, write_comparison_csv, TuneOptions};
use gpr_core::fit::{evaluate, fit_map, FitOptions, FitResult};
use gpr_core::kv::KvDoc;
use gpr_core::model::{exceedance_prob, ExceedanceDataset};
use gpr_core::pipeline::{
    build_tail_dataset, load_ohlc_csv, prepare_split, read_dataset, write_dataset, FrameOptions, MarketFrame,
    PreparedSplit, Standardization, Standardizer, TailOptions,
};
use gpr_core::report::{crash_curve, fitted_vs_observed, quantile, CurveOptions};
use gpr_core::simulation::{render_table, run_study, write_raw_csv, write_summary_csv, SimConfig};
use gpr_core::volatility::{garman_klass, OhlcSeries};
use gpr_core::PriorSpec;

use crate::{BuildArgs, CompareArgs, FitArgs, ReportArgs, SimulateArgs, SplitArgs, VolMethod, VolatilityArgs};

pub fn init_threads(threads: Option<usize>) -> Result<()> {
    if let Some(n) = threads {
        ensure!(n > 0, "--threads must be positive");
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("starting worker pool")?;
    }
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

pub fn simulate(a: SimulateArgs) -> Result<()> {
    let cfg = SimConfig {
        n_reps: a.reps,
        n_obs: a.n,
        p: a.p,
        mu: a.mu,
        xi_range: (a.xi_min, a.xi_max),
        train_frac: a.train_frac,
        seed: a.seed,
        priors: a.priors,
        n_folds: a.cv_folds,
    };
    let report = run_study(&cfg)?;
    fs::create_dir_all(&a.out_dir).with_context(|| format!("creating {}", a.out_dir.display()))?;
    write_summary_csv(&report.summary, create(&a.out_dir.join("summary.csv"))?)?;
    write_raw_csv(&report.raw, create(&a.out_dir.join("raw.csv"))?)?;
    print!("{}", render_table(&report.summary));
    let failed: usize = report.summary.iter().map(|r| r.n_failed).sum();
    if failed > 0 {
        eprintln!("warning: {failed} fits failed; see raw.csv");
    }
    Ok(())
}

pub fn volatility(a: VolatilityArgs) -> Result<()> {
    let bars = load_ohlc_csv(&a.input, &a.schema.schema()?)?.series;
    let series = match a.method {
        VolMethod::Ewma => bars.ewma(a.alpha, a.window)?,
        VolMethod::Gk => garman_klass(&bars),
    };
    match &a.out {
        Some(path) => series.write_csv(create(path)?)?,
        None => series.write_csv(io::stdout().lock())?,
    }
    Ok(())
}

pub fn build_dataset(a: BuildArgs) -> Result<()> {
    let schema = a.schema.schema()?;
    let mut loaded: Vec<(String, OhlcSeries)> = Vec::new();
    for spec in &a.assets {
        let Some((name, path)) = spec.split_once('=') else {
            bail!("--asset expects name=path, got `{spec}`");
        };
        let l = load_ohlc_csv(Path::new(path), &schema)?;
        if l.dropped_missing > 0 {
            eprintln!("{name}: dropped {} rows with missing prices", l.dropped_missing);
        }
        loaded.push((name.to_string(), l.series));
    }
    let opts = FrameOptions { alpha: a.alpha, window: a.window, lag_covariates: a.lag };
    let refs: Vec<(&str, &OhlcSeries)> = loaded.iter().map(|(n, s)| (n.as_str(), s)).collect();
    let frame = MarketFrame::build(&refs, &opts)?;
    let target = a.target.clone().unwrap_or_else(|| loaded[0].0.clone());
    let covariates = if a.covariates.is_empty() {
        loaded.iter().map(|(n, _)| format!("{n}_ewma")).collect()
    } else {
        a.covariates.clone()
    };
    let tail = build_tail_dataset(
        &frame,
        &TailOptions {
            threshold_pct: a.threshold,
            log_covariates: a.log_covariates,
            ..TailOptions::new(&target, covariates)
        },
    )?;
    let mut extra = KvDoc::new();
    extra.push("target", &target);
    extra.push("threshold_pct", a.threshold);
    extra.push("alpha", a.alpha);
    extra.push("window", a.window);
    extra.push("lag_covariates", a.lag);
    extra.push("log_covariates", a.log_covariates);
    extra.push("aligned_days", frame.len());
    extra.push("dropped_unaligned", frame.dropped_unaligned);
    write_dataset(&tail.data, &a.out, &extra)?;
    println!(
        "{} loss days out of {} aligned days written to {}",
        tail.data.n(),
        tail.n_scanned,
        a.out.display()
    );
    Ok(())
}

/// Keeps rows with `y > threshold` and moves the threshold there.
fn raise_threshold(data: &ExceedanceDataset, threshold: f64) -> Result<ExceedanceDataset> {
    ensure!(
        threshold >= data.mu(),
        "--threshold {threshold} is below the dataset threshold {}",
        data.mu()
    );
    let keep: Vec<usize> = (0..data.n()).filter(|&i| data.y()[i] > threshold).collect();
    let sub = data.subset(&keep)?;
    let rows = sub.rows().map(<[f64]>::to_vec).collect();
    let out = ExceedanceDataset::new(rows, sub.y().to_vec(), threshold, sub.feature_names().to_vec(), sub.has_intercept())?;
    Ok(out.with_labels(sub.labels().to_vec())?)
}

fn load_split(s: &SplitArgs) -> Result<PreparedSplit> {
    let mut data = read_dataset(&s.data)?.data;
    if let Some(t) = s.threshold {
        data = raise_threshold(&data, t)?;
    }
    Ok(prepare_split(&data, s.train_frac, s.seed, s.standardize)?)
}

fn tune_options(s: &SplitArgs) -> TuneOptions {
    TuneOptions { n_folds: s.cv_folds, shrink_intercept: s.shrink_intercept, ..TuneOptions::default() }.with_seed(s.seed)
}

fn standardization_name(s: Standardization) -> &'static str {
    match s {
        Standardization::None => "none",
        Standardization::TrainOnly => "train",
        Standardization::FullSample => "full",
    }
}

pub fn fit(a: FitArgs) -> Result<()> {
    let split = load_split(&a.split)?;
    let opts = tune_options(&a.split);
    let (fit, cv) = match a.hyper {
        Some(h) => {
            let spec = PriorSpec::from_family(a.prior, Some(h))?.with_shrink_intercept(a.split.shrink_intercept);
            (fit_map(&split.train, &spec, &FitOptions::default().with_seed(a.split.seed))?, None)
        }
        None => {
            let t = tune_and_fit(&split.train, a.prior, &opts)?;
            (t.fit, t.cv)
        }
    };
    let m = evaluate(&fit, &split.test)?;

    println!("prior = {}", fit.family().name());
    if let (Some(name), Some(v)) = (fit.family().hyper_name(), fit.prior.hyperparameter()) {
        let how = if cv.is_some() { "selected by cross-validation" } else { "fixed" };
        println!("{name} = {v} ({how})");
    }
    for (name, b) in fit.feature_names.iter().zip(&fit.params.beta) {
        println!("beta.{name} = {b}");
    }
    println!("xi = {}", fit.params.xi);
    println!("df = {}", fit.df);
    println!("rmse = {}", m.rmse);
    println!("aic = {}", m.aic);
    println!("bic = {}", m.bic);
    println!("converged = {}", fit.converged);

    let mut doc = fit.to_kv();
    doc.push("data", a.split.data.display());
    doc.push("seed", a.split.seed);
    doc.push("train_frac", a.split.train_frac);
    doc.push("n_train", split.train.n());
    doc.push("n_test", split.test.n());
    doc.push("test_rmse", m.rmse);
    doc.push("standardization", standardization_name(a.split.standardize));
    if let Some(s) = &split.standardizer {
        s.write_kv(&mut doc);
    }
    if let Some(c) = a.crash_level {
        let pinned: Vec<f64> = (0..split.train.p()).map(|j| quantile(&split.train.column(j), 0.5)).collect();
        let prob = exceedance_prob(&pinned, &fit.params, fit.mu, c)?;
        println!("crash_prob = {prob} (loss > {c} at median covariates)");
        doc.push("crash_level", c);
        doc.push("crash_prob", prob);
    }
    if let Some(path) = &a.out {
        create(path)?.write_all(doc.to_string().as_bytes())?;
    }
    Ok(())
}

pub fn compare(a: CompareArgs) -> Result<()> {
    let split = load_split(&a.split)?;
    let rows = compare_priors(&split.train, &split.test, &a.priors, &tune_options(&a.split))?;
    print!("{}", render_comparison(&rows));
    if let Some(path) = &a.out {
        write_comparison_csv(&rows, create(path)?)?;
    }
    Ok(())
}

pub fn report(a: ReportArgs) -> Result<()> {
    let doc = KvDoc::read(&a.fit)?;
    let fit = FitResult::from_kv(&doc)?;
    let standardizer = Standardizer::from_kv(&doc)?;
    let mut data = read_dataset(&a.data)?.data;
    if fit.mu > data.mu() {
        data = raise_threshold(&data, fit.mu)?;
    }
    ensure!(
        data.feature_names() == fit.feature_names.as_slice(),
        "dataset covariates [{}] do not match the fit's [{}]",
        data.feature_names().join(", "),
        fit.feature_names.join(", ")
    );
    if let Some(s) = &standardizer {
        data = s.transform(&data)?;
    }
    let opts = CurveOptions { pin_quantile: a.pin_quantile, ..CurveOptions::new(&a.sweep, a.y0) };
    let curve = crash_curve(&fit, &data, &opts)?;
    fs::create_dir_all(&a.out_dir).with_context(|| format!("creating {}", a.out_dir.display()))?;
    curve.write_csv(standardizer.as_ref(), create(&a.out_dir.join("crash_curve.csv"))?)?;
    fitted_vs_observed(&fit, &data)?.write_csv(create(&a.out_dir.join("fitted.csv"))?)?;
    let (first, last) = (curve.points.first(), curve.points.last());
    if let (Some(f), Some(l)) = (first, last) {
        println!(
            "P(loss > {}) from {:.4} to {:.4}; expected loss from {:.4} to {:.4} across {}",
            a.y0, f.prob, l.prob, f.expected_loss, l.expected_loss, a.sweep
        );
    }
    Ok(())
}
