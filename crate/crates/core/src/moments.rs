//! Multiplicity distributions, generating function, factorial moments and
//! cumulants, plus the binned like-sign and unlike-sign estimators.
//!
//! With `G(z) = sum_n P_n (1+z)^n` the normalized series
//!
//! ```text
//! G(z)    = sum_{q>=0} (<n> z)^q / q! * F_q     (F_0 = F_1 = 1)
//! ln G(z) = sum_{q>=1} (<n> z)^q / q! * K_q     (K_1 = 1)
//! ```
//!
//! are an ordinary moment / cumulant pair in the variable `u = <n> z`, so
//! `F_q` and `K_q` are related by the usual recursion
//! `K_q = F_q - sum_{m=1}^{q-1} C(q-1, m-1) K_m F_{q-m}`.

use crate::error::{Error, Result};
use crate::numeric::{self, binomial_table, delta_std_err, falling_factorial, CompensatedSum, Estimate};
use crate::Sign;

const NORMALIZATION_TOL: f64 = 1e-12;
const POISSON_TAIL: f64 = 1e-15;

/// A finite probability mass function over counts `n = 0..=support_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplicityDistribution {
    probs: Vec<f64>,
}

impl MultiplicityDistribution {
    /// Builds a distribution from dense probabilities indexed by `n`.
    pub fn from_probs(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("empty support".into()));
        }
        if let Some((n, p)) = probs.iter().enumerate().find(|(_, p)| !p.is_finite() || **p < 0.0) {
            return Err(Error::InvalidDistribution(format!("P_{n} = {p}")));
        }
        let total = numeric::sum(probs.iter().copied());
        if (total - 1.0).abs() >= NORMALIZATION_TOL {
            return Err(Error::InvalidDistribution(format!("probabilities sum to {total}")));
        }
        Ok(Self::trimmed(probs))
    }

    fn trimmed(mut probs: Vec<f64>) -> Self {
        while probs.len() > 1 && probs.last() == Some(&0.0) {
            probs.pop();
        }
        Self { probs }
    }

    /// Empirical distribution of the observed counts.
    pub fn from_counts(counts: &[u64]) -> Result<Self> {
        if counts.is_empty() {
            return Err(Error::NoEvents);
        }
        let max = *counts.iter().max().expect("non-empty") as usize;
        let mut occurrences = vec![0u64; max + 1];
        for &c in counts {
            occurrences[c as usize] += 1;
        }
        let total = counts.len() as f64;
        Ok(Self::trimmed(occurrences.into_iter().map(|k| k as f64 / total).collect()))
    }

    /// Poisson(`lambda`) truncated once the remaining tail mass drops below
    /// 1e-15, then renormalized.
    pub fn poisson(lambda: f64) -> Result<Self> {
        check_lambda(lambda)?;
        let mut log_p = -lambda;
        let mut probs = vec![log_p.exp()];
        let mut n = 0usize;
        loop {
            n += 1;
            log_p += lambda.ln() - (n as f64).ln();
            let p = log_p.exp();
            probs.push(p);
            // For n + 1 > lambda the tail beyond n is bounded by a geometric series.
            let ratio = lambda / (n + 1) as f64;
            if ratio < 1.0 && p * ratio / (1.0 - ratio) < POISSON_TAIL {
                break;
            }
        }
        Ok(Self::renormalized(probs))
    }

    /// Poisson(`lambda`) restricted to `0..=n_max` and renormalized.
    pub fn poisson_truncated(lambda: f64, n_max: usize) -> Result<Self> {
        check_lambda(lambda)?;
        let mut log_p = -lambda;
        let mut probs = Vec::with_capacity(n_max + 1);
        probs.push(log_p.exp());
        for n in 1..=n_max {
            log_p += lambda.ln() - (n as f64).ln();
            probs.push(log_p.exp());
        }
        Ok(Self::renormalized(probs))
    }

    fn renormalized(probs: Vec<f64>) -> Self {
        let total = numeric::sum(probs.iter().copied());
        Self::trimmed(probs.into_iter().map(|p| p / total).collect())
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, n: usize) -> f64 {
        self.probs.get(n).copied().unwrap_or(0.0)
    }

    pub fn support_max(&self) -> usize {
        self.probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
    }

    pub fn mean(&self) -> f64 {
        numeric::sum(self.probs.iter().enumerate().map(|(n, p)| n as f64 * p))
    }

    /// Normalized factorial moment `<n(n-1)...(n-q+1)> / <n>^q`.
    pub fn factorial_moment(&self, q: usize) -> Result<f64> {
        if q < 1 {
            return Err(Error::InvalidOrder(q));
        }
        let mean = self.mean();
        if mean <= 0.0 {
            return Err(Error::ZeroMean);
        }
        if q == 1 {
            return Ok(1.0);
        }
        let raw = numeric::sum(
            self.probs
                .iter()
                .enumerate()
                .map(|(n, p)| p * falling_factorial(n as u64, q)),
        );
        Ok(raw / mean.powi(q as i32))
    }

    /// `G(z) = sum_n P_n (1+z)^n`, evaluated by Horner's rule.
    pub fn generating_function(&self, z: f64) -> f64 {
        let x = 1.0 + z;
        self.probs.iter().rev().fold(0.0, |acc, p| acc * x + p)
    }

    /// `p_0 = G(-1)`.
    pub fn zero_count_probability(&self) -> f64 {
        self.probs[0]
    }

    /// `F_2..=F_q_max` together with `<n>`.
    pub fn moment_set(&self, q_max: usize) -> Result<MomentSet> {
        if q_max < 1 {
            return Err(Error::InvalidOrder(q_max));
        }
        let mean_count = self.mean();
        if mean_count <= 0.0 {
            return Err(Error::ZeroMean);
        }
        let values = (2..=q_max)
            .map(|q| self.factorial_moment(q))
            .collect::<Result<Vec<_>>>()?;
        Ok(MomentSet { mean_count, q_max, values })
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("lambda must be positive, got {lambda}")))
    }
}

/// Empirical distribution of the observed counts.
pub fn multiplicity_from_counts(counts: &[u64]) -> Result<MultiplicityDistribution> {
    MultiplicityDistribution::from_counts(counts)
}

/// Sample estimate of `F_q` with a delta-method standard error.
pub fn sample_factorial_moment(counts: &[u64], q: usize) -> Result<Estimate> {
    if q < 1 {
        return Err(Error::InvalidOrder(q));
    }
    if counts.is_empty() {
        return Err(Error::NoEvents);
    }
    let ff: Vec<f64> = counts.iter().map(|&n| falling_factorial(n, q)).collect();
    let nn: Vec<f64> = counts.iter().map(|&n| n as f64).collect();
    let mean_ff = numeric::mean(&ff);
    let mean_n = numeric::mean(&nn);
    if mean_n <= 0.0 {
        return Err(Error::ZeroMean);
    }
    if q == 1 {
        return Ok(Estimate { value: 1.0, std_err: 0.0 });
    }
    let qf = q as f64;
    let value = mean_ff / mean_n.powi(q as i32);
    let grad = [1.0 / mean_n.powi(q as i32), -qf * mean_ff / mean_n.powi(q as i32 + 1)];
    let std_err = delta_std_err(&[&ff, &nn], &grad);
    Ok(Estimate { value, std_err })
}

/// Normalized factorial moments `F_2..=F_q_max`; `F_0 = F_1 = 1` implicitly.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSet {
    pub mean_count: f64,
    pub q_max: usize,
    values: Vec<f64>,
}

impl MomentSet {
    /// `values[i]` is `F_{i+2}`.
    pub fn new(mean_count: f64, values: Vec<f64>) -> Result<Self> {
        if !(mean_count.is_finite() && mean_count > 0.0) {
            return Err(Error::ZeroMean);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite factorial moment".into()));
        }
        Ok(Self { mean_count, q_max: values.len() + 1, values })
    }

    pub fn get(&self, q: usize) -> Option<f64> {
        match q {
            0 | 1 => Some(1.0),
            q => self.values.get(q - 2).copied(),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Normalized cumulants `K_2..=K_q_max`; `K_1 = 1` implicitly.
#[derive(Debug, Clone, PartialEq)]
pub struct CumulantSet {
    pub mean_count: f64,
    pub q_max: usize,
    values: Vec<f64>,
}

impl CumulantSet {
    pub fn get(&self, q: usize) -> Option<f64> {
        match q {
            0 => None,
            1 => Some(1.0),
            q => self.values.get(q - 2).copied(),
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Cumulants up to `order` from the factorial moments.
pub fn cumulants_from_moments(moments: &MomentSet, order: usize) -> Result<CumulantSet> {
    if order < 1 {
        return Err(Error::InvalidOrder(order));
    }
    if order > moments.q_max {
        return Err(Error::OrderExceeded { requested: order, available: moments.q_max });
    }
    let binom = binomial_table(order);
    let f = |q: usize| moments.get(q).expect("order checked");
    // k[q] holds K_q; k[0] is unused.
    let mut k = vec![0.0, 1.0];
    for q in 2..=order {
        let mut acc = CompensatedSum::new();
        acc.add(f(q));
        for m in 1..q {
            acc.add(-binom[q - 1][m - 1] * k[m] * f(q - m));
        }
        k.push(acc.value());
    }
    Ok(CumulantSet { mean_count: moments.mean_count, q_max: order, values: k.split_off(2) })
}

/// Inverse of [`cumulants_from_moments`].
pub fn moments_from_cumulants(cumulants: &CumulantSet) -> Result<MomentSet> {
    let order = cumulants.q_max;
    let binom = binomial_table(order);
    let mut f = vec![1.0, 1.0];
    for q in 2..=order {
        let mut acc = CompensatedSum::new();
        for m in 1..=q {
            let km = cumulants.get(m).expect("within order");
            acc.add(binom[q - 1][m - 1] * km * f[q - m]);
        }
        f.push(acc.value());
    }
    MomentSet::new(cumulants.mean_count, f.split_off(2))
}

/// One window of `n_bins` bins with per-bin positive and negative counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventWindow {
    pos: Vec<u32>,
    neg: Vec<u32>,
}

impl EventWindow {
    pub fn new(pos: Vec<u32>, neg: Vec<u32>) -> Result<Self> {
        if pos.is_empty() {
            return Err(Error::InvalidParameter("a window needs at least one bin".into()));
        }
        if pos.len() != neg.len() {
            return Err(Error::InvalidParameter(format!(
                "positive and negative bin lists differ in length ({} vs {})",
                pos.len(),
                neg.len()
            )));
        }
        Ok(Self { pos, neg })
    }

    /// A window with only a positive channel (plain multiplicities).
    pub fn from_counts(counts: Vec<u32>) -> Result<Self> {
        let neg = vec![0; counts.len()];
        Self::new(counts, neg)
    }

    pub fn n_bins(&self) -> usize {
        self.pos.len()
    }

    pub fn counts(&self, sign: Sign) -> &[u32] {
        match sign {
            Sign::Pos => &self.pos,
            Sign::Neg => &self.neg,
        }
    }

    pub fn total(&self, sign: Sign) -> u64 {
        self.counts(sign).iter().map(|&c| c as u64).sum()
    }
}

/// A binned moment with its delta-method standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinnedMoment {
    pub value: f64,
    pub std_err: f64,
    pub n_events: usize,
}

fn common_bins(windows: &[EventWindow]) -> Result<usize> {
    let first = windows.first().ok_or(Error::NoEvents)?.n_bins();
    for w in windows {
        if w.n_bins() != first {
            return Err(Error::MixedBins { expected: first, found: w.n_bins() });
        }
    }
    Ok(first)
}

/// Per-event terms of the like-sign estimator: the bin-averaged falling
/// factorial `a_e = sum_k n_k(n_k-1)...(n_k-q+1) / M` and the bin occupancy
/// `b_e = n_e / M`.
pub(crate) fn like_sign_terms(windows: &[EventWindow], sign: Sign, q: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if q < 2 {
        return Err(Error::InvalidOrder(q));
    }
    let m = common_bins(windows)? as f64;
    let mut a = Vec::with_capacity(windows.len());
    let mut b = Vec::with_capacity(windows.len());
    for w in windows {
        let counts = w.counts(sign);
        let num = numeric::sum(counts.iter().map(|&n| falling_factorial(n as u64, q)));
        a.push(num / m);
        b.push(w.total(sign) as f64 / m);
    }
    Ok((a, b))
}

/// `A / B^q` from event-averaged terms.
pub(crate) fn like_sign_ratio(a: &[f64], b: &[f64], q: usize) -> Result<f64> {
    let occupancy = numeric::mean(b);
    if occupancy <= 0.0 {
        return Err(Error::ZeroMean);
    }
    Ok(numeric::mean(a) / occupancy.powi(q as i32))
}

/// Horizontally averaged `F_q` of one sign channel over binned windows.
///
/// The normalization `<n>` is the window total averaged over all events.
pub fn fq_binned(windows: &[EventWindow], sign: Sign, q: usize) -> Result<f64> {
    let (a, b) = like_sign_terms(windows, sign, q)?;
    like_sign_ratio(&a, &b, q)
}

/// [`fq_binned`] with a delta-method standard error.
pub fn fq_binned_estimate(windows: &[EventWindow], sign: Sign, q: usize) -> Result<BinnedMoment> {
    let (a, b) = like_sign_terms(windows, sign, q)?;
    let value = like_sign_ratio(&a, &b, q)?;
    let mean_a = numeric::mean(&a);
    let mean_b = numeric::mean(&b);
    let grad = [1.0 / mean_b.powi(q as i32), -(q as f64) * mean_a / mean_b.powi(q as i32 + 1)];
    let std_err = delta_std_err(&[&a, &b], &grad);
    Ok(BinnedMoment { value, std_err, n_events: windows.len() })
}

/// Second-order like-sign moment `F_2^{++}` (or `F_2^{--}`).
pub fn f2_like_sign(windows: &[EventWindow], sign: Sign) -> Result<f64> {
    fq_binned(windows, sign, 2)
}

fn unlike_sign_terms(windows: &[EventWindow]) -> Result<[Vec<f64>; 3]> {
    let m = common_bins(windows)? as f64;
    let mut cross = Vec::with_capacity(windows.len());
    let mut pos = Vec::with_capacity(windows.len());
    let mut neg = Vec::with_capacity(windows.len());
    for w in windows {
        let num = numeric::sum(w.pos.iter().zip(&w.neg).map(|(&p, &n)| p as f64 * n as f64));
        cross.push(num / m);
        pos.push(w.total(Sign::Pos) as f64 / m);
        neg.push(w.total(Sign::Neg) as f64 / m);
    }
    Ok([cross, pos, neg])
}

/// Second-order unlike-sign moment `F_2^{+-}`.
pub fn f2_unlike_sign(windows: &[EventWindow]) -> Result<f64> {
    Ok(f2_unlike_sign_estimate(windows)?.value)
}

/// [`f2_unlike_sign`] with a delta-method standard error.
pub fn f2_unlike_sign_estimate(windows: &[EventWindow]) -> Result<BinnedMoment> {
    let [cross, pos, neg] = unlike_sign_terms(windows)?;
    let (a, bp, bn) = (numeric::mean(&cross), numeric::mean(&pos), numeric::mean(&neg));
    if bp <= 0.0 || bn <= 0.0 {
        return Err(Error::ZeroMean);
    }
    let value = a / (bp * bn);
    let grad = [1.0 / (bp * bn), -a / (bp * bp * bn), -a / (bp * bn * bn)];
    let std_err = delta_std_err(&[&cross, &pos, &neg], &grad);
    Ok(BinnedMoment { value, std_err, n_events: windows.len() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(probs: &[f64]) -> MultiplicityDistribution {
        MultiplicityDistribution::from_probs(probs.to_vec()).unwrap()
    }

    fn window(pos: &[u32], neg: &[u32]) -> EventWindow {
        EventWindow::new(pos.to_vec(), neg.to_vec()).unwrap()
    }

    #[test]
    fn counts_to_distribution() {
        assert_eq!(multiplicity_from_counts(&[2, 2, 2, 2]).unwrap().probs(), &[0.0, 0.0, 1.0]);
        assert_eq!(multiplicity_from_counts(&[0, 1, 0, 1]).unwrap().probs(), &[0.5, 0.5]);
        assert_eq!(multiplicity_from_counts(&[0, 0, 1, 2]).unwrap().probs(), &[0.5, 0.25, 0.25]);
        assert_eq!(multiplicity_from_counts(&[]), Err(Error::NoEvents));
    }

    #[test]
    fn distribution_validation() {
        assert!(MultiplicityDistribution::from_probs(vec![0.5, 0.4]).is_err());
        assert!(MultiplicityDistribution::from_probs(vec![1.5, -0.5]).is_err());
        assert!(MultiplicityDistribution::from_probs(vec![]).is_err());
        assert_eq!(dist(&[0.0, 1.0, 0.0, 0.0]).support_max(), 1);
    }

    #[test]
    fn factorial_moment_examples() {
        assert_eq!(dist(&[0.0, 0.0, 1.0]).factorial_moment(2).unwrap(), 0.5);
        assert_eq!(dist(&[0.0, 1.0]).factorial_moment(2).unwrap(), 0.0);
        assert_eq!(dist(&[0.2, 0.3, 0.5]).factorial_moment(1).unwrap(), 1.0);
        assert_eq!(dist(&[1.0]).factorial_moment(2), Err(Error::ZeroMean));
        assert_eq!(dist(&[0.0, 1.0]).factorial_moment(0), Err(Error::InvalidOrder(0)));
    }

    #[test]
    fn poisson_moments_are_one() {
        let p = MultiplicityDistribution::poisson_truncated(3.0, 60).unwrap();
        for q in 2..=5 {
            let f = p.factorial_moment(q).unwrap();
            assert!((f - 1.0).abs() < 1e-9, "F_{q} = {f}");
        }
    }

    #[test]
    fn poisson_tail_truncation() {
        let p = MultiplicityDistribution::poisson(8.0).unwrap();
        assert!((numeric::sum(p.probs().iter().copied()) - 1.0).abs() < 1e-12);
        assert!((p.mean() - 8.0).abs() < 1e-12);
        assert!(MultiplicityDistribution::poisson(0.0).is_err());
    }

    #[test]
    fn generating_function_examples() {
        let d = dist(&[0.1, 0.2, 0.3, 0.4]);
        assert!((d.generating_function(0.0) - 1.0).abs() < 1e-15);
        assert_eq!(dist(&[0.5, 0.5]).generating_function(-1.0), 0.5);
        assert!((dist(&[0.0, 1.0]).generating_function(0.7) - 1.7).abs() < 1e-15);
    }

    #[test]
    fn zero_count_probability_examples() {
        assert_eq!(dist(&[0.5, 0.5]).zero_count_probability(), 0.5);
        assert_eq!(dist(&[0.0, 1.0]).zero_count_probability(), 0.0);
        let p = MultiplicityDistribution::poisson_truncated(2.0, 40).unwrap();
        assert!((p.zero_count_probability() - (-2.0f64).exp()).abs() < 1e-6);
        assert_eq!(p.zero_count_probability(), p.generating_function(-1.0));
    }

    #[test]
    fn cumulant_examples() {
        let poisson = MomentSet::new(3.0, vec![1.0; 6]).unwrap();
        let k = cumulants_from_moments(&poisson, 7).unwrap();
        assert!(k.values().iter().all(|v| v.abs() < 1e-15));
        assert_eq!(k.get(1), Some(1.0));

        let m = MomentSet::new(2.0, vec![1.5]).unwrap();
        let k = cumulants_from_moments(&m, 2).unwrap();
        assert_eq!(k.get(2), Some(0.5));
        assert_eq!(k.get(1), Some(1.0));

        let m = MomentSet::new(2.0, vec![1.5, 2.5]).unwrap();
        let k = cumulants_from_moments(&m, 3).unwrap();
        assert!((k.get(3).unwrap() - (2.5 - 3.0 * 1.5 + 2.0)).abs() < 1e-15);

        assert_eq!(
            cumulants_from_moments(&m, 4),
            Err(Error::OrderExceeded { requested: 4, available: 3 })
        );
    }

    #[test]
    fn like_sign_examples() {
        assert_eq!(f2_like_sign(&[window(&[1, 1], &[0, 0])], Sign::Pos).unwrap(), 0.0);
        assert_eq!(f2_like_sign(&[window(&[2], &[0])], Sign::Pos).unwrap(), 0.5);
        let f3 = fq_binned(&[window(&[3], &[0])], Sign::Pos, 3).unwrap();
        assert!((f3 - 6.0 / 27.0).abs() < 1e-15);
    }

    #[test]
    fn like_sign_errors() {
        assert_eq!(f2_like_sign(&[], Sign::Pos), Err(Error::NoEvents));
        let mixed = [window(&[1], &[0]), window(&[1, 1], &[0, 0])];
        assert_eq!(f2_like_sign(&mixed, Sign::Pos), Err(Error::MixedBins { expected: 1, found: 2 }));
        assert_eq!(f2_like_sign(&[window(&[1, 2], &[0, 0])], Sign::Neg), Err(Error::ZeroMean));
        assert_eq!(fq_binned(&[window(&[1], &[0])], Sign::Pos, 1), Err(Error::InvalidOrder(1)));
    }

    #[test]
    fn unlike_sign_examples() {
        assert_eq!(f2_unlike_sign(&[window(&[1], &[1])]).unwrap(), 1.0);
        assert_eq!(f2_unlike_sign(&[window(&[1, 0], &[0, 1])]).unwrap(), 0.0);
        assert_eq!(f2_unlike_sign(&[window(&[1, 0], &[0, 0])]), Err(Error::ZeroMean));
    }

    #[test]
    fn global_mean_normalization() {
        // Event 1 has no positive counts; the global mean keeps it finite.
        let ws = [window(&[2, 0], &[0, 0]), window(&[0, 0], &[1, 1])];
        // A = (2/2 + 0)/2 = 0.5, B = (1 + 0)/2 = 0.5 -> F = 2.
        assert_eq!(f2_like_sign(&ws, Sign::Pos).unwrap(), 2.0);
    }

    #[test]
    fn estimate_error_shrinks_with_events() {
        let small: Vec<_> = (0..10).map(|i| window(&[i % 3, 1], &[0, 0])).collect();
        let large: Vec<_> = (0..1000).map(|i| window(&[i % 3, 1], &[0, 0])).collect();
        let a = fq_binned_estimate(&small, Sign::Pos, 2).unwrap();
        let b = fq_binned_estimate(&large, Sign::Pos, 2).unwrap();
        assert!(b.std_err < a.std_err);
        assert_eq!(b.n_events, 1000);
    }
}
