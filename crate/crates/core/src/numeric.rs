//! Small numeric helpers shared by the estimators.

use crate::error::{Error, Result};

/// Neumaier compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl Extend<f64> for CompensatedSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.add(x);
        }
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::new();
        s.extend(iter);
        s
    }
}

pub fn sum(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().collect::<CompensatedSum>().value()
}

pub fn mean(xs: &[f64]) -> f64 {
    sum(xs.iter().copied()) / xs.len() as f64
}

/// A point estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_err: f64,
}

/// Delta-method standard error of `f(mean(col_0), ..., mean(col_k))`.
///
/// `columns` holds one per-event observation vector per argument of `f`, all of
/// the same length `n`; `grad` is the gradient of `f` at the column means. The
/// sample covariance uses the `n - 1` denominator; with one observation the
/// error is reported as zero.
pub fn delta_std_err(columns: &[&[f64]], grad: &[f64]) -> f64 {
    debug_assert_eq!(columns.len(), grad.len());
    let n = columns.first().map_or(0, |c| c.len());
    if n < 2 {
        return 0.0;
    }
    let means: Vec<f64> = columns.iter().map(|c| mean(c)).collect();
    let mut var = CompensatedSum::new();
    for i in 0..n {
        let proj: f64 = columns
            .iter()
            .zip(&means)
            .zip(grad)
            .map(|((c, m), g)| g * (c[i] - m))
            .sum();
        var.add(proj * proj);
    }
    let var = var.value() / (n - 1) as f64 / n as f64;
    var.max(0.0).sqrt()
}

/// Straight-line fit `y = intercept + slope * x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub residual_rms: f64,
}

/// Least squares line through `(x, y)`.
///
/// With `weights`, the weights are treated as known inverse variances and the
/// slope error is `1/sqrt(Sxx_w)`. Without, the slope error comes from the
/// residual variance on `n - 2` degrees of freedom (zero for two points).
pub fn line_fit(x: &[f64], y: &[f64], weights: Option<&[f64]>) -> Result<LineFit> {
    let n = x.len();
    if n != y.len() || weights.is_some_and(|w| w.len() != n) {
        return Err(Error::InvalidParameter("line fit inputs differ in length".into()));
    }
    if n < 2 {
        return Err(Error::InsufficientPoints(n));
    }
    let w: Vec<f64> = match weights {
        Some(w) => w.to_vec(),
        None => vec![1.0; n],
    };
    let sw = sum(w.iter().copied());
    let xm = sum(x.iter().zip(&w).map(|(a, b)| a * b)) / sw;
    let ym = sum(y.iter().zip(&w).map(|(a, b)| a * b)) / sw;
    let sxx = sum(x.iter().zip(&w).map(|(a, b)| b * (a - xm) * (a - xm)));
    if sxx <= 0.0 {
        return Err(Error::InsufficientPoints(1));
    }
    let sxy = sum(x.iter().zip(y).zip(&w).map(|((a, c), b)| b * (a - xm) * (c - ym)));
    let slope = sxy / sxx;
    let intercept = ym - slope * xm;
    let resid: Vec<f64> = x.iter().zip(y).map(|(a, c)| c - intercept - slope * a).collect();
    let rss = sum(resid.iter().map(|r| r * r));
    let residual_rms = (rss / n as f64).sqrt();
    let slope_stderr = if weights.is_some() {
        (1.0 / sxx).sqrt()
    } else if n > 2 {
        (rss / (n - 2) as f64 / sxx).sqrt()
    } else {
        0.0
    };
    Ok(LineFit { slope, intercept, slope_stderr, residual_rms })
}

/// Falling factorial `n (n-1) ... (n-q+1)` as a float.
pub fn falling_factorial(n: u64, q: usize) -> f64 {
    if (q as u64) > n {
        return 0.0;
    }
    (0..q as u64).map(|i| (n - i) as f64).product()
}

/// Binomial coefficients `C(k, j)` for `k, j <= max` as a lower-triangular table.
pub fn binomial_table(max: usize) -> Vec<Vec<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(max + 1);
    for k in 0..=max {
        let mut row = vec![1.0; k + 1];
        for j in 1..k {
            row[j] = rows[k - 1][j - 1] + rows[k - 1][j];
        }
        rows.push(row);
    }
    rows
}
