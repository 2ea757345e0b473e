//! Run-length (gap) statistics of return signs.
//!
//! A gap in negative returns is a maximal run of consecutive positive returns
//! following a negative one, and vice versa. For window counts with negligible
//! correlations the zero-count probability is `p_0 = G(-1) ~ exp(-<n>)`, so the
//! gap-length distribution falls exponentially, `P(g) ~ exp(-rho g)`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::ingest::{resample, to_signs, PriceSeries, SignSeries};
use crate::numeric::{self, delta_std_err, line_fit};
use crate::Sign;

/// Minimum bin count entering the log-linear fit.
pub const MIN_FIT_COUNT: u64 = 5;

/// All maximal same-sign runs of a sign series.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RunScan {
    /// Complete positive runs, in order of appearance.
    pub pos: Vec<usize>,
    /// Complete negative runs, in order of appearance.
    pub neg: Vec<usize>,
    /// Ticks in runs touching the first or last return (censored).
    pub boundary_ticks: usize,
    /// Zero-return ticks; they end runs of either sign.
    pub zero_ticks: usize,
}

impl RunScan {
    pub fn runs(&self, sign: Sign) -> &[usize] {
        match sign {
            Sign::Pos => &self.pos,
            Sign::Neg => &self.neg,
        }
    }
}

/// Single pass over the series collecting runs of both signs.
pub fn scan_runs(signs: &SignSeries) -> Result<RunScan> {
    let s = signs.signs();
    if s.is_empty() {
        return Err(Error::EmptySeries);
    }
    let mut out = RunScan::default();
    let mut i = 0;
    while i < s.len() {
        if s[i] == 0 {
            out.zero_ticks += 1;
            i += 1;
            continue;
        }
        let start = i;
        while i < s.len() && s[i] == s[start] {
            i += 1;
        }
        let len = i - start;
        if start == 0 || i == s.len() {
            out.boundary_ticks += len;
        } else if s[start] > 0 {
            out.pos.push(len);
        } else {
            out.neg.push(len);
        }
    }
    Ok(out)
}

/// Complete runs of `sign`; runs touching either end of the series are dropped.
pub fn extract_runs(signs: &SignSeries, sign: Sign) -> Result<Vec<usize>> {
    let scan = scan_runs(signs)?;
    Ok(match sign {
        Sign::Pos => scan.pos,
        Sign::Neg => scan.neg,
    })
}

/// Occurrence counts of gap lengths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapHistogram {
    pub sign: Sign,
    pub counts: BTreeMap<usize, u64>,
    pub total_runs: u64,
}

impl GapHistogram {
    pub fn probability(&self, gap: usize) -> f64 {
        self.counts.get(&gap).map_or(0.0, |&c| c as f64 / self.total_runs as f64)
    }

    /// `(gap, count, probability)` rows in increasing gap order.
    pub fn rows(&self) -> impl Iterator<Item = (usize, u64, f64)> + '_ {
        self.counts.iter().map(|(&g, &c)| (g, c, c as f64 / self.total_runs as f64))
    }

    pub fn mean_gap(&self) -> f64 {
        numeric::sum(self.counts.iter().map(|(&g, &c)| g as f64 * c as f64)) / self.total_runs as f64
    }
}

pub fn gap_histogram(runs: &[usize], sign: Sign) -> Result<GapHistogram> {
    if runs.is_empty() {
        return Err(Error::InsufficientSupport("no complete runs".into()));
    }
    let mut counts = BTreeMap::new();
    for &r in runs {
        *counts.entry(r).or_insert(0) += 1;
    }
    Ok(GapHistogram { sign, counts, total_runs: runs.len() as u64 })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum FitMethod {
    /// Least squares on `ln(count)` with Poisson weights `count`.
    #[default]
    LogLinearWls,
    /// Geometric maximum likelihood, `rho = -ln(1 - 1/mean_gap)`.
    GeometricMle,
}

impl fmt::Display for FitMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FitMethod::LogLinearWls => "wls",
            FitMethod::GeometricMle => "mle",
        })
    }
}

impl FromStr for FitMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "wls" | "log-linear-wls" => Ok(FitMethod::LogLinearWls),
            "mle" | "geometric-mle" => Ok(FitMethod::GeometricMle),
            other => Err(Error::InvalidParameter(format!("unknown fit method `{other}`"))),
        }
    }
}

/// `count(g) ~ amplitude * exp(-rho g)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentialFit {
    pub rho: f64,
    pub amplitude: f64,
    pub rho_stderr: f64,
    pub method: FitMethod,
    /// Histogram bins that entered the fit.
    pub n_bins_used: usize,
    pub total_runs: u64,
}

pub fn fit_exponential(hist: &GapHistogram, method: FitMethod) -> Result<ExponentialFit> {
    if hist.counts.len() < 2 {
        return Err(Error::InsufficientSupport(format!(
            "{} distinct gap length(s); need at least 2",
            hist.counts.len()
        )));
    }
    match method {
        FitMethod::LogLinearWls => {
            let used: Vec<(usize, u64)> =
                hist.counts.iter().filter(|(_, &c)| c >= MIN_FIT_COUNT).map(|(&g, &c)| (g, c)).collect();
            if used.len() < 2 {
                return Err(Error::InsufficientSupport(format!(
                    "{} gap length(s) with count >= {MIN_FIT_COUNT}; need at least 2",
                    used.len()
                )));
            }
            let x: Vec<f64> = used.iter().map(|&(g, _)| g as f64).collect();
            let y: Vec<f64> = used.iter().map(|&(_, c)| (c as f64).ln()).collect();
            let w: Vec<f64> = used.iter().map(|&(_, c)| c as f64).collect();
            let fit = line_fit(&x, &y, Some(&w))?;
            Ok(ExponentialFit {
                rho: -fit.slope,
                amplitude: fit.intercept.exp(),
                rho_stderr: fit.slope_stderr,
                method,
                n_bins_used: used.len(),
                total_runs: hist.total_runs,
            })
        }
        FitMethod::GeometricMle => {
            let n = hist.total_runs as f64;
            let s = 1.0 / hist.mean_gap();
            let rho = -(1.0 - s).ln();
            if !rho.is_finite() {
                return Err(Error::InsufficientSupport("mean gap is 1".into()));
            }
            Ok(ExponentialFit {
                rho,
                amplitude: n * s / (1.0 - s),
                rho_stderr: s / (n * (1.0 - s)).sqrt(),
                method,
                n_bins_used: hist.counts.len(),
                total_runs: hist.total_runs,
            })
        }
    }
}

/// `p_0 = exp(-rho delta)`.
pub fn predicted_p0(rho: f64, delta: f64) -> Result<f64> {
    if delta.is_nan() || delta < 0.0 {
        return Err(Error::InvalidParameter(format!("window length must be non-negative, got {delta}")));
    }
    Ok((-rho * delta).exp())
}

/// Gap fit at one resampling factor.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingFit {
    pub factor: usize,
    pub unit: i64,
    pub histogram: GapHistogram,
    pub fit: ExponentialFit,
}

/// Gap slopes at two samplings of the same series, each per its own time unit.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplingReport {
    pub a: SamplingFit,
    pub b: SamplingFit,
    pub ratio: f64,
    pub ratio_stderr: f64,
    /// `|rho_a - rho_b|` in combined standard errors.
    pub z_score: f64,
}

/// Resample, take signs, extract runs of `sign`, fit.
pub fn gap_fit_at(series: &PriceSeries, factor: usize, sign: Sign, method: FitMethod) -> Result<SamplingFit> {
    let sampled = resample(series, factor)?;
    let signs = to_signs(&sampled)?;
    let runs = extract_runs(&signs, sign)?;
    let histogram = gap_histogram(&runs, sign)?;
    let fit = fit_exponential(&histogram, method)?;
    Ok(SamplingFit { factor, unit: sampled.unit(), histogram, fit })
}

/// Compares gap slopes at resampling factors `factor_a` and `factor_b`,
/// where `factor_b` must be a multiple of `factor_a`.
pub fn sampling_consistency(
    series: &PriceSeries,
    factor_a: usize,
    factor_b: usize,
    sign: Sign,
    method: FitMethod,
) -> Result<SamplingReport> {
    if factor_a == 0 || factor_b == 0 || !factor_b.is_multiple_of(factor_a) {
        return Err(Error::InvalidParameter(format!(
            "resample factor {factor_b} must be a positive multiple of {factor_a}"
        )));
    }
    let a = gap_fit_at(series, factor_a, sign, method)?;
    let b = gap_fit_at(series, factor_b, sign, method)?;
    Ok(compare_fits(a, b))
}

/// Ratio and z-score of two gap fits.
pub fn compare_fits(a: SamplingFit, b: SamplingFit) -> SamplingReport {
    let (ra, rb, sa, sb) = (a.fit.rho, b.fit.rho, a.fit.rho_stderr, b.fit.rho_stderr);
    let ratio = ra / rb;
    let ratio_stderr = ratio.abs() * ((sa / ra).powi(2) + (sb / rb).powi(2)).sqrt();
    let combined = (sa * sa + sb * sb).sqrt();
    let z_score = if combined > 0.0 { (ra - rb).abs() / combined } else { 0.0 };
    SamplingReport { a, b, ratio, ratio_stderr, z_score }
}

/// Empirical zero-count probability against `exp(-<n>)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroCountCheck {
    pub observed_p0: f64,
    pub predicted_p0: f64,
    pub mean_count: f64,
    /// Delta-method error of `observed_p0 - predicted_p0`.
    pub std_err: f64,
}

impl ZeroCountCheck {
    pub fn deviation_sigmas(&self) -> f64 {
        (self.observed_p0 - self.predicted_p0).abs() / self.std_err
    }
}

pub fn zero_count_check(counts: &[u64]) -> Result<ZeroCountCheck> {
    if counts.is_empty() {
        return Err(Error::NoEvents);
    }
    let zero: Vec<f64> = counts.iter().map(|&c| if c == 0 { 1.0 } else { 0.0 }).collect();
    let n: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    let observed_p0 = numeric::mean(&zero);
    let mean_count = numeric::mean(&n);
    let predicted = (-mean_count).exp();
    let std_err = delta_std_err(&[&zero, &n], &[1.0, predicted]);
    Ok(ZeroCountCheck { observed_p0, predicted_p0: predicted, mean_count, std_err })
}
