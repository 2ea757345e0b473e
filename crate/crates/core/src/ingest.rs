//! Price series loading, decimation, return signs and window segmentation.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::moments::EventWindow;

/// A return spanning more than this many sampling units starts a new session.
pub const SESSION_GAP_UNITS: i64 = 3;

/// Sampled prices with strictly increasing integer timestamps (epoch seconds).
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    timestamps: Vec<i64>,
    prices: Vec<f64>,
    unit: i64,
}

impl PriceSeries {
    pub fn new(timestamps: Vec<i64>, prices: Vec<f64>, unit: i64) -> Result<Self> {
        if timestamps.len() != prices.len() {
            return Err(Error::InvalidParameter(format!(
                "{} timestamps but {} prices",
                timestamps.len(),
                prices.len()
            )));
        }
        if unit <= 0 {
            return Err(Error::InvalidParameter(format!("sampling unit must be positive, got {unit}")));
        }
        for (i, pair) in timestamps.windows(2).enumerate() {
            if pair[1] <= pair[0] {
                return Err(Error::NonIncreasingTimestamp { row: i as u64 + 2, ts: pair[1], prev: pair[0] });
            }
        }
        if let Some((i, p)) = prices.iter().enumerate().find(|(_, p)| !(p.is_finite() && **p > 0.0)) {
            return Err(Error::Parse { row: i as u64 + 1, msg: format!("price must be positive, got {p}") });
        }
        Ok(Self { timestamps, prices, unit })
    }

    /// Builds a series whose unit is the median timestamp spacing.
    pub fn with_inferred_unit(timestamps: Vec<i64>, prices: Vec<f64>) -> Result<Self> {
        if timestamps.len() < 2 {
            return Err(Error::TooFewRows(timestamps.len()));
        }
        let mut steps: Vec<i64> = timestamps.windows(2).map(|w| w[1] - w[0]).collect();
        steps.sort_unstable();
        let unit = steps[(steps.len() - 1) / 2].max(1);
        Self::new(timestamps, prices, unit)
    }

    pub fn len(&self) -> usize {
        self.prices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prices.is_empty()
    }

    pub fn timestamps(&self) -> &[i64] {
        &self.timestamps
    }

    pub fn prices(&self) -> &[f64] {
        &self.prices
    }

    pub fn unit(&self) -> i64 {
        self.unit
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HeaderMode {
    /// Skip the first row when its first field is not numeric.
    #[default]
    Auto,
    Present,
    Absent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CsvConfig {
    pub delimiter: u8,
    pub header: HeaderMode,
}

impl Default for CsvConfig {
    fn default() -> Self {
        Self { delimiter: b',', header: HeaderMode::Auto }
    }
}

/// Loads a `timestamp,price` file.
pub fn load_price_csv(path: impl AsRef<Path>, cfg: &CsvConfig) -> Result<PriceSeries> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::Io { path: path.display().to_string(), msg: e.to_string() })?;
    read_price_csv(file, cfg)
}

/// Parses `timestamp,price` rows. Row numbers in errors are 1-based file lines.
pub fn read_price_csv<R: Read>(reader: R, cfg: &CsvConfig) -> Result<PriceSeries> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .delimiter(cfg.delimiter)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    let mut timestamps = Vec::new();
    let mut prices = Vec::new();
    let mut first = true;
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let row = e.position().map_or(0, |p| p.line());
            Error::Parse { row, msg: e.to_string() }
        })?;
        let row = record.position().map_or(0, |p| p.line());
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        if first {
            first = false;
            let skip = match cfg.header {
                HeaderMode::Present => true,
                HeaderMode::Absent => false,
                HeaderMode::Auto => record.get(0).is_some_and(|f| f.parse::<f64>().is_err()),
            };
            if skip {
                continue;
            }
        }
        if record.len() < 2 {
            return Err(Error::Parse { row, msg: format!("expected 2 fields, found {}", record.len()) });
        }
        let ts: i64 = record[0]
            .parse()
            .map_err(|_| Error::Parse { row, msg: format!("invalid timestamp `{}`", &record[0]) })?;
        let price: f64 = record[1]
            .parse()
            .map_err(|_| Error::Parse { row, msg: format!("invalid price `{}`", &record[1]) })?;
        if !(price.is_finite() && price > 0.0) {
            return Err(Error::Parse { row, msg: format!("price must be positive, got {price}") });
        }
        if let Some(&prev) = timestamps.last() {
            if ts <= prev {
                return Err(Error::NonIncreasingTimestamp { row, ts, prev });
            }
        }
        timestamps.push(ts);
        prices.push(price);
    }
    if timestamps.len() < 2 {
        return Err(Error::TooFewRows(timestamps.len()));
    }
    PriceSeries::with_inferred_unit(timestamps, prices)
}

/// Writes the series in the schema [`read_price_csv`] accepts.
pub fn write_price_csv<W: Write>(series: &PriceSeries, mut out: W) -> std::io::Result<()> {
    writeln!(out, "timestamp,price")?;
    for (t, p) in series.timestamps.iter().zip(&series.prices) {
        writeln!(out, "{t},{p}")?;
    }
    Ok(())
}

/// Keeps every `k`-th price starting at index 0.
pub fn resample(series: &PriceSeries, k: usize) -> Result<PriceSeries> {
    if k < 1 {
        return Err(Error::InvalidParameter("resample factor must be at least 1".into()));
    }
    let timestamps = series.timestamps.iter().step_by(k).copied().collect();
    let prices = series.prices.iter().step_by(k).copied().collect();
    Ok(PriceSeries { timestamps, prices, unit: series.unit * k as i64 })
}

/// Return signs `+1`, `-1`, `0`, one per consecutive price pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignSeries {
    signs: Vec<i8>,
    unit: i64,
    breaks: Vec<usize>,
}

impl SignSeries {
    /// A sign sequence without session information.
    pub fn new(signs: Vec<i8>, unit: i64) -> Result<Self> {
        if let Some(s) = signs.iter().find(|s| !matches!(s, -1..=1)) {
            return Err(Error::InvalidParameter(format!("sign must be -1, 0 or 1, got {s}")));
        }
        Ok(Self { signs, unit, breaks: Vec::new() })
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    pub fn unit(&self) -> i64 {
        self.unit
    }

    /// Indices of returns that open a new session (their timestamp step
    /// exceeded the session gap guard).
    pub fn session_breaks(&self) -> &[usize] {
        &self.breaks
    }

    fn sessions(&self) -> impl Iterator<Item = &[i8]> {
        let mut bounds = Vec::with_capacity(self.breaks.len() + 2);
        bounds.push(0);
        bounds.extend(self.breaks.iter().copied());
        bounds.push(self.signs.len());
        let signs = &self.signs;
        (0..bounds.len() - 1).map(move |i| &signs[bounds[i]..bounds[i + 1]])
    }
}

pub fn to_signs(series: &PriceSeries) -> Result<SignSeries> {
    if series.len() < 2 {
        return Err(Error::TooFewRows(series.len()));
    }
    let signs = series
        .prices
        .windows(2)
        .map(|p| match p[1].partial_cmp(&p[0]) {
            Some(std::cmp::Ordering::Greater) => 1,
            Some(std::cmp::Ordering::Less) => -1,
            _ => 0,
        })
        .collect();
    let max_step = SESSION_GAP_UNITS * series.unit;
    let breaks = series
        .timestamps
        .windows(2)
        .enumerate()
        .filter(|(i, t)| *i > 0 && t[1] - t[0] > max_step)
        .map(|(i, _)| i)
        .collect();
    Ok(SignSeries { signs, unit: series.unit, breaks })
}

/// Integrates a sign sequence into a unit-step price path starting at
/// `len + 1`, so every price stays positive.
pub fn integrate_signs(signs: &SignSeries) -> PriceSeries {
    let mut price = signs.len() as f64 + 1.0;
    let mut prices = Vec::with_capacity(signs.len() + 1);
    prices.push(price);
    for &s in &signs.signs {
        price += s as f64;
        prices.push(price);
    }
    let timestamps = (0..prices.len() as i64).map(|i| i * signs.unit).collect();
    PriceSeries { timestamps, prices, unit: signs.unit }
}

/// Window length in ticks and the number of bins per window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SegmentationConfig {
    window_len: usize,
    n_bins: usize,
}

impl SegmentationConfig {
    pub fn new(window_len: usize, n_bins: usize) -> Result<Self> {
        if window_len == 0 || n_bins == 0 {
            return Err(Error::InvalidParameter("window_len and n_bins must be positive".into()));
        }
        if !window_len.is_multiple_of(n_bins) {
            return Err(Error::Divisibility { window_len, n_bins });
        }
        Ok(Self { window_len, n_bins })
    }

    pub fn window_len(&self) -> usize {
        self.window_len
    }

    pub fn n_bins(&self) -> usize {
        self.n_bins
    }

    pub fn bin_len(&self) -> usize {
        self.window_len / self.n_bins
    }
}

/// Cuts the sign sequence into consecutive non-overlapping windows.
///
/// Windows never straddle a session break; each session's trailing partial
/// window is dropped. Zero signs are counted in neither channel.
pub fn segment(signs: &SignSeries, cfg: SegmentationConfig) -> Result<Vec<EventWindow>> {
    if cfg.window_len > signs.len() {
        return Err(Error::WindowTooLong { window_len: cfg.window_len, len: signs.len() });
    }
    let bin_len = cfg.bin_len();
    let mut out = Vec::new();
    for session in signs.sessions() {
        for chunk in session.chunks_exact(cfg.window_len) {
            let mut pos = Vec::with_capacity(cfg.n_bins);
            let mut neg = Vec::with_capacity(cfg.n_bins);
            for bin in chunk.chunks_exact(bin_len) {
                pos.push(bin.iter().filter(|&&s| s > 0).count() as u32);
                neg.push(bin.iter().filter(|&&s| s < 0).count() as u32);
            }
            out.push(EventWindow::new(pos, neg)?);
        }
    }
    Ok(out)
}

/// Cuts a per-tick count sequence into windows; counts go to the positive channel.
pub fn segment_counts(counts: &[u32], cfg: SegmentationConfig) -> Result<Vec<EventWindow>> {
    if cfg.window_len > counts.len() {
        return Err(Error::WindowTooLong { window_len: cfg.window_len, len: counts.len() });
    }
    counts
        .chunks_exact(cfg.window_len)
        .map(|chunk| EventWindow::from_counts(chunk.chunks_exact(cfg.bin_len()).map(|b| b.iter().sum()).collect()))
        .collect()
}
