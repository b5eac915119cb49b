//! Daily volatility estimators on OHLC bars: an EWMA blend of rolling sample
//! variance with the current squared return, and the Garman-Klass range
//! estimator. Outputs are annualised with `sqrt(250)` and kept as fractions.

use std::io::Write;

use chrono::NaiveDate;

use crate::error::{GprError, Result};

pub const TRADING_DAYS: f64 = 250.0;

/// Price bars in strictly increasing date order.
#[derive(Debug, Clone, PartialEq)]
pub struct OhlcSeries {
    dates: Vec<NaiveDate>,
    open: Vec<f64>,
    high: Vec<f64>,
    low: Vec<f64>,
    close: Vec<f64>,
}

impl OhlcSeries {
    pub fn new(dates: Vec<NaiveDate>, open: Vec<f64>, high: Vec<f64>, low: Vec<f64>, close: Vec<f64>) -> Result<Self> {
        let n = dates.len();
        if [open.len(), high.len(), low.len(), close.len()].iter().any(|&l| l != n) {
            return Err(GprError::invalid("OHLC columns differ in length"));
        }
        for i in 0..n {
            let d = dates[i];
            if i > 0 && dates[i - 1] >= d {
                return Err(GprError::invalid(format!("dates not strictly increasing at {d}")));
            }
            let (o, h, l, c) = (open[i], high[i], low[i], close[i]);
            if ![o, h, l, c].iter().all(|v| v.is_finite() && *v > 0.0) {
                return Err(GprError::invalid(format!("bar {d}: prices must be positive and finite")));
            }
            if l > o.min(c) || h < o.max(c) {
                return Err(GprError::invalid(format!(
                    "bar {d}: need low <= min(open, close) and high >= max(open, close), got O={o} H={h} L={l} C={c}"
                )));
            }
        }
        Ok(Self { dates, open, high, low, close })
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn open(&self) -> &[f64] {
        &self.open
    }

    pub fn high(&self) -> &[f64] {
        &self.high
    }

    pub fn low(&self) -> &[f64] {
        &self.low
    }

    pub fn close(&self) -> &[f64] {
        &self.close
    }

    /// Every price multiplied by `k`.
    pub fn rescaled(&self, k: f64) -> Result<Self> {
        let s = |v: &[f64]| v.iter().map(|x| x * k).collect();
        Self::new(self.dates.clone(), s(&self.open), s(&self.high), s(&self.low), s(&self.close))
    }

    /// Close-to-close log returns, dated by the later bar.
    pub fn returns(&self) -> (Vec<NaiveDate>, Vec<f64>) {
        (self.dates.iter().skip(1).copied().collect(), log_returns(&self.close))
    }

    /// EWMA volatility of [`OhlcSeries::returns`].
    pub fn ewma(&self, alpha: f64, window: usize) -> Result<VolSeries> {
        let (dates, r) = self.returns();
        let values = ewma_volatility(&r, alpha, window)?;
        let clamped = vec![false; values.len()];
        Ok(VolSeries { dates, values, clamped })
    }
}

/// Annualised volatilities; `None` marks warm-up entries.
#[derive(Debug, Clone, PartialEq)]
pub struct VolSeries {
    pub dates: Vec<NaiveDate>,
    pub values: Vec<Option<f64>>,
    /// Bars whose raw variance was negative and was clamped to zero.
    pub clamped: Vec<bool>,
}

impl VolSeries {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Number of leading missing values.
    pub fn warmup(&self) -> usize {
        self.values.iter().take_while(|v| v.is_none()).count()
    }

    /// `date,value,flag` where `flag` is 1 on clamped bars; missing values are empty.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["date", "value", "flag"])?;
        for ((d, v), c) in self.dates.iter().zip(&self.values).zip(&self.clamped) {
            w.write_record([
                d.format("%Y-%m-%d").to_string(),
                v.map_or_else(String::new, |x| x.to_string()),
                u8::from(*c).to_string(),
            ])?;
        }
        w.flush().map_err(csv::Error::from)?;
        Ok(())
    }
}

/// `r_t = ln(C_t / C_{t-1})`, one shorter than `close`.
pub fn log_returns(close: &[f64]) -> Vec<f64> {
    close.windows(2).map(|w| (w[1] / w[0]).ln()).collect()
}

/// `sigma_t = sqrt(alpha s^2 + (1 - alpha) r_t^2) sqrt(250)` where `s^2` is the
/// unbiased sample variance of the `window - 1` returns before day `t`.
/// The first `window - 1` entries are `None`.
pub fn ewma_volatility(returns: &[f64], alpha: f64, window: usize) -> Result<Vec<Option<f64>>> {
    if window < 3 {
        // s^2 needs at least two previous returns
        return Err(GprError::config(format!("EWMA window must be at least 3, got {window}")));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(GprError::config(format!("EWMA alpha must lie in (0, 1), got {alpha}")));
    }
    let k = window - 1;
    if returns.len() < window {
        log::warn!("{} returns is shorter than the EWMA window {window}; all values missing", returns.len());
    }
    let annual = TRADING_DAYS.sqrt();
    Ok((0..returns.len())
        .map(|t| {
            if t < k {
                return None;
            }
            let prev = &returns[t - k..t];
            let mean = prev.iter().sum::<f64>() / k as f64;
            let s2 = prev.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / (k - 1) as f64;
            let r = returns[t];
            Some((alpha * s2 + (1.0 - alpha) * r * r).sqrt() * annual)
        })
        .collect())
}

/// Raw per-bar Garman-Klass variance `0.5 ln(H/L)^2 - (2 ln 2 - 1) ln(C/O)^2`.
pub fn garman_klass_variance(open: f64, high: f64, low: f64, close: f64) -> f64 {
    let hl = (high / low).ln();
    let co = (close / open).ln();
    0.5 * hl * hl - (2.0 * std::f64::consts::LN_2 - 1.0) * co * co
}

/// Annualised volatility of one bar and whether its raw variance was negative
/// (and so clamped to zero). Bars obeying the OHLC ordering never clamp; bars
/// that break it, such as `H = L` with `C != O`, can.
pub fn garman_klass_bar(open: f64, high: f64, low: f64, close: f64) -> (f64, bool) {
    let v = garman_klass_variance(open, high, low, close);
    (v.max(0.0).sqrt() * TRADING_DAYS.sqrt(), v < 0.0)
}

/// Annualised Garman-Klass volatility per bar.
pub fn garman_klass(bars: &OhlcSeries) -> VolSeries {
    let mut values = Vec::with_capacity(bars.len());
    let mut clamped = Vec::with_capacity(bars.len());
    for i in 0..bars.len() {
        let (v, c) = garman_klass_bar(bars.open[i], bars.high[i], bars.low[i], bars.close[i]);
        values.push(Some(v));
        clamped.push(c);
    }
    VolSeries { dates: bars.dates.clone(), values, clamped }
}

#[cfg(test)]
mod tests {
    use approx::assert_relative_eq;

    use super::*;

    fn day(i: usize) -> NaiveDate {
        NaiveDate::from_ymd_opt(2020, 1, 1).unwrap() + chrono::Days::new(i as u64)
    }

    fn flat_bars(n: usize, price: f64) -> OhlcSeries {
        let v = vec![price; n];
        OhlcSeries::new((0..n).map(day).collect(), v.clone(), v.clone(), v.clone(), v).unwrap()
    }

    #[test]
    fn log_return_examples() {
        assert_eq!(log_returns(&[5.0, 5.0, 5.0]), vec![0.0, 0.0]);
        let r = log_returns(&[100.0, 100.0 * 0.01f64.exp()]);
        assert_relative_eq!(r[0], 0.01, epsilon = 1e-15);
    }

    #[test]
    fn cumulative_returns_rebuild_prices() {
        let close = [100.0, 101.3, 99.2, 104.0, 103.1, 97.5];
        let r = log_returns(&close);
        let mut acc = 0.0;
        for (t, rt) in r.iter().enumerate() {
            acc += rt;
            assert!((acc.exp() - close[t + 1] / close[0]).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_returns_leave_only_current_term() {
        let c = -0.013;
        let v = ewma_volatility(&[c; 40], 0.9, 21).unwrap();
        assert_eq!(v.iter().filter(|x| x.is_none()).count(), 20);
        for x in v.iter().flatten() {
            assert_relative_eq!(*x, (0.1 * c * c).sqrt() * 250f64.sqrt(), epsilon = 1e-15);
        }
    }

    #[test]
    fn zero_returns_zero_volatility() {
        let v = ewma_volatility(&[0.0; 30], 0.9, 21).unwrap();
        assert!(v[20..].iter().all(|x| *x == Some(0.0)));
    }

    #[test]
    fn short_series_all_missing() {
        assert!(ewma_volatility(&[0.01; 10], 0.9, 21).unwrap().iter().all(Option::is_none));
    }

    #[test]
    fn ewma_parameter_validation() {
        assert!(ewma_volatility(&[0.0; 30], 1.0, 21).is_err());
        assert!(ewma_volatility(&[0.0; 30], 0.5, 2).is_err());
    }

    #[test]
    fn gk_examples() {
        assert_eq!(garman_klass_variance(10.0, 10.0, 10.0, 10.0), 0.0);
        let v = garman_klass_variance(100.0, 100.0 * 0.02f64.exp(), 100.0, 100.0);
        assert_relative_eq!(v, 2e-4, epsilon = 1e-16);
        let g = garman_klass(&flat_bars(5, 42.0));
        assert!(g.values.iter().all(|v| *v == Some(0.0)));
        assert_eq!(g.warmup(), 0);
    }

    #[test]
    fn gk_negative_variance_clamped_and_flagged() {
        // flat range with an open-to-close move
        assert!(garman_klass_variance(100.0, 100.0, 100.0, 101.0) < 0.0);
        assert_eq!(garman_klass_bar(100.0, 100.0, 100.0, 101.0), (0.0, true));
        assert!(!garman_klass_bar(100.0, 101.0, 100.0, 101.0).1);
    }

    #[test]
    fn ohlc_ordering_violation_names_bar() {
        let err = OhlcSeries::new(vec![day(3)], vec![10.0], vec![9.0], vec![8.0], vec![9.5]).unwrap_err();
        assert!(err.to_string().contains("2020-01-04"), "{err}");
        assert!(OhlcSeries::new(vec![day(1), day(0)], vec![1.0; 2], vec![1.0; 2], vec![1.0; 2], vec![1.0; 2]).is_err());
    }

    #[test]
    fn csv_output_marks_warmup_and_flags() {
        let bars = flat_bars(25, 3.0);
        let mut buf = Vec::new();
        bars.ewma(0.9, 21).unwrap().write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "date,value,flag");
        assert_eq!(lines[1], "2020-01-02,,0");
        assert_eq!(lines[21], "2020-01-22,0,0");
    }
}
