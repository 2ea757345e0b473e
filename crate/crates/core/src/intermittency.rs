//! Scans of factorial moments against the bin count and the power-law
//! scaling fit `F_q ~ M^phi_q`, with `phi_q = (q-1)(1 - D_q/d)`.
//!
//! The bin count `M` is the inverse resolution: a window of length `Delta`
//! cut into `M` bins resolves `Delta / M`, so a moment that grows as the
//! resolution shrinks has `phi_q > 0`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::moments::{fq_binned_estimate, like_sign_ratio, like_sign_terms, EventWindow};
use crate::numeric::{self, line_fit};
use crate::rng::stream_rng;
use crate::Sign;

/// `F_q` at one segmentation level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingPoint {
    pub n_bins: usize,
    pub f_q: f64,
    /// Delta-method error from the event-to-event spread.
    pub std_err: f64,
    /// Bootstrap error over resampled events, when requested.
    pub bootstrap_err: Option<f64>,
}

/// Event-resampling settings for the bootstrap cross-check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bootstrap {
    pub resamples: usize,
    pub seed: u64,
}

impl Default for Bootstrap {
    fn default() -> Self {
        Self { resamples: 200, seed: crate::synth::DEFAULT_SEED }
    }
}

/// One point per segmentation level. Levels must be ordered by strictly
/// increasing `M`, and every window in a level must have `M` bins.
pub fn scan_bins(levels: &[(usize, Vec<EventWindow>)], sign: Sign, q: usize) -> Result<Vec<ScalingPoint>> {
    scan(levels, sign, q, None)
}

/// [`scan_bins`] with bootstrap errors; level `i` resamples on substream `i`.
pub fn scan_bins_with_bootstrap(
    levels: &[(usize, Vec<EventWindow>)],
    sign: Sign,
    q: usize,
    bootstrap: Bootstrap,
) -> Result<Vec<ScalingPoint>> {
    scan(levels, sign, q, Some(bootstrap))
}

fn scan(
    levels: &[(usize, Vec<EventWindow>)],
    sign: Sign,
    q: usize,
    bootstrap: Option<Bootstrap>,
) -> Result<Vec<ScalingPoint>> {
    if levels.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(Error::InvalidParameter("bin counts must be strictly increasing".into()));
    }
    levels
        .iter()
        .enumerate()
        .map(|(i, (m, windows))| {
            if let Some(w) = windows.iter().find(|w| w.n_bins() != *m) {
                return Err(Error::MixedBins { expected: *m, found: w.n_bins() });
            }
            let est = fq_binned_estimate(windows, sign, q)?;
            let bootstrap_err = match bootstrap {
                Some(b) => Some(bootstrap_std_err(windows, sign, q, b.resamples, b.seed, i as u64)?),
                None => None,
            };
            Ok(ScalingPoint { n_bins: *m, f_q: est.value, std_err: est.std_err, bootstrap_err })
        })
        .collect()
}

/// Standard deviation of `F_q` over `resamples` event-level bootstrap draws.
pub fn bootstrap_std_err(
    windows: &[EventWindow],
    sign: Sign,
    q: usize,
    resamples: usize,
    seed: u64,
    stream: u64,
) -> Result<f64> {
    let (a, b) = like_sign_terms(windows, sign, q)?;
    if resamples < 2 {
        return Err(Error::InvalidParameter("bootstrap needs at least 2 resamples".into()));
    }
    let n = a.len();
    let mut rng = stream_rng(seed, stream);
    let mut ra = vec![0.0; n];
    let mut rb = vec![0.0; n];
    let mut stats = Vec::with_capacity(resamples);
    for _ in 0..resamples {
        for j in 0..n {
            let k = rng.random_range(0..n);
            ra[j] = a[k];
            rb[j] = b[k];
        }
        // A resample with no counts at all has no defined moment; skip it.
        if let Ok(f) = like_sign_ratio(&ra, &rb, q) {
            stats.push(f);
        }
    }
    if stats.len() < 2 {
        return Err(Error::ZeroMean);
    }
    let m = numeric::mean(&stats);
    let var = numeric::sum(stats.iter().map(|s| (s - m) * (s - m))) / (stats.len() - 1) as f64;
    Ok(var.sqrt())
}

/// Result of a log-log fit of `F_q` against `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingFit {
    pub q: usize,
    /// Phase-space dimension.
    pub d: f64,
    pub slope_phi: f64,
    pub slope_stderr: f64,
    pub intercept: f64,
    pub dq: f64,
    pub residual_rms: f64,
    pub n_points: usize,
    /// Whether inverse-variance weights were used.
    pub weighted: bool,
    /// Bin counts dropped because `F_q <= 0`.
    pub excluded: Vec<usize>,
}

impl ScalingFit {
    pub fn has_exclusions(&self) -> bool {
        !self.excluded.is_empty()
    }
}

/// Weighted least squares of `ln F_q` on `ln M` with weights `(F_q/err)^2`.
///
/// Falls back to an unweighted fit unless every usable point has a positive
/// error. `D_q = d (1 - phi_q / (q-1))`.
pub fn fit_scaling(points: &[ScalingPoint], q: usize, d: f64) -> Result<ScalingFit> {
    if q < 2 {
        return Err(Error::InvalidOrder(q));
    }
    if !(d.is_finite() && d > 0.0) {
        return Err(Error::InvalidParameter(format!("dimension must be positive, got {d}")));
    }
    let (usable, dropped): (Vec<&ScalingPoint>, Vec<&ScalingPoint>) =
        points.iter().partition(|p| p.f_q > 0.0 && p.f_q.is_finite() && p.n_bins > 0);
    let mut distinct: Vec<usize> = usable.iter().map(|p| p.n_bins).collect();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(Error::InsufficientPoints(distinct.len()));
    }
    let x: Vec<f64> = usable.iter().map(|p| (p.n_bins as f64).ln()).collect();
    let y: Vec<f64> = usable.iter().map(|p| p.f_q.ln()).collect();
    let weighted = usable.iter().all(|p| p.std_err > 0.0);
    let weights: Option<Vec<f64>> =
        weighted.then(|| usable.iter().map(|p| (p.f_q / p.std_err).powi(2)).collect());
    let fit = line_fit(&x, &y, weights.as_deref())?;
    Ok(ScalingFit {
        q,
        d,
        slope_phi: fit.slope,
        slope_stderr: fit.slope_stderr,
        intercept: fit.intercept,
        dq: dimension_from_slope(fit.slope, q, d),
        residual_rms: fit.residual_rms,
        n_points: usable.len(),
        weighted,
        excluded: dropped.iter().map(|p| p.n_bins).collect(),
    })
}

/// `D_q = d (1 - phi / (q-1))`.
pub fn dimension_from_slope(phi: f64, q: usize, d: f64) -> f64 {
    d * (1.0 - phi / (q as f64 - 1.0))
}

/// Constant strong coupling and gluon colour factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingParams {
    alpha_s: f64,
    c_a: f64,
}

impl CouplingParams {
    pub fn new(alpha_s: f64, c_a: f64) -> Result<Self> {
        if !(alpha_s.is_finite() && alpha_s > 0.0) {
            return Err(Error::InvalidParameter(format!("alpha_s must be positive, got {alpha_s}")));
        }
        if !(c_a.is_finite() && c_a > 0.0) {
            return Err(Error::InvalidParameter(format!("C_A must be positive, got {c_a}")));
        }
        Ok(Self { alpha_s, c_a })
    }

    pub fn alpha_s(&self) -> f64 {
        self.alpha_s
    }

    pub fn c_a(&self) -> f64 {
        self.c_a
    }

    /// `gamma_0 = sqrt(4 C_A alpha_s / (2 pi))`.
    pub fn gamma0(&self) -> f64 {
        (4.0 * self.c_a * self.alpha_s / (2.0 * std::f64::consts::PI)).sqrt()
    }
}

/// Fixed-coupling multifractal dimension `D_q = gamma_0 (q+1) / q`.
pub fn dq_prediction(params: &CouplingParams, q: u32) -> Result<f64> {
    if q == 0 {
        return Err(Error::InvalidOrder(0));
    }
    Ok(params.gamma0() * (q as f64 + 1.0) / q as f64)
}
