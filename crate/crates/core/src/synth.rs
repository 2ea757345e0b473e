//! Seeded generators for the null and intermittent reference processes.
//!
//! Every generator is a pure function of its parameters and seed; see
//! [`crate::rng`] for the pinned random source.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};

use crate::error::{Error, Result};
use crate::ingest::{PriceSeries, SignSeries};
use crate::rng::stream_rng;

/// Default sampling unit (seconds) of synthetic price series.
pub const DEFAULT_UNIT: i64 = 60;

/// Cumulative sum of iid standard normal increments, shifted so the minimum
/// price is 1. `length` is the number of prices.
pub fn gen_iid_gaussian(length: usize, unit: i64, seed: u64) -> Result<PriceSeries> {
    if length < 2 {
        return Err(Error::InvalidParameter(format!("need at least 2 prices, got {length}")));
    }
    let mut rng = stream_rng(seed, 0);
    let mut level = 0.0f64;
    let mut path = Vec::with_capacity(length);
    path.push(level);
    for _ in 1..length {
        let step: f64 = rng.sample(StandardNormal);
        level += step;
        path.push(level);
    }
    let min = path.iter().copied().fold(f64::INFINITY, f64::min);
    let prices = path.into_iter().map(|x| x - min + 1.0).collect();
    let timestamps = (0..length as i64).map(|i| i * unit).collect();
    PriceSeries::new(timestamps, prices, unit)
}

/// `n_events` Poisson(`lambda`) draws.
pub fn gen_poisson_counts(lambda: f64, n_events: usize, seed: u64) -> Result<Vec<u64>> {
    let dist = poisson(lambda)?;
    let mut rng = stream_rng(seed, 0);
    Ok((0..n_events).map(|_| dist.sample(&mut rng) as u64).collect())
}

fn poisson(lambda: f64) -> Result<Poisson<f64>> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(Error::InvalidParameter(format!("lambda must be positive, got {lambda}")));
    }
    Poisson::new(lambda).map_err(|e| Error::InvalidParameter(e.to_string()))
}

/// Two-state sign chain that keeps its current sign with probability
/// `persistence`, started from the stationary (fair) distribution.
pub fn gen_markov_signs(persistence: f64, length: usize, seed: u64) -> Result<SignSeries> {
    if !(persistence > 0.0 && persistence < 1.0) {
        return Err(Error::InvalidParameter(format!("persistence must be in (0, 1), got {persistence}")));
    }
    let mut rng = stream_rng(seed, 0);
    let mut signs = Vec::with_capacity(length);
    let mut current: i8 = if rng.random_bool(0.5) { 1 } else { -1 };
    for i in 0..length {
        if i > 0 && !rng.random_bool(persistence) {
            current = -current;
        }
        signs.push(current);
    }
    SignSeries::new(signs, 1)
}

/// One p-model cascade realization: cell intensities and Poisson counts.
#[derive(Debug, Clone, PartialEq)]
pub struct Cascade {
    pub intensity: Vec<f64>,
    pub counts: Vec<u32>,
}

fn check_cascade(levels: u32, weight: f64, mean_count: f64) -> Result<()> {
    if !(1..=30).contains(&levels) {
        return Err(Error::InvalidParameter(format!("cascade levels must be in 1..=30, got {levels}")));
    }
    if !(0.5..1.0).contains(&weight) {
        return Err(Error::InvalidParameter(format!("cascade weight must be in [0.5, 1), got {weight}")));
    }
    if !(mean_count.is_finite() && mean_count > 0.0) {
        return Err(Error::InvalidParameter(format!("mean count must be positive, got {mean_count}")));
    }
    Ok(())
}

/// p-model cascade over `2^levels` cells.
///
/// Starting from total mass `mean_count * 2^levels`, every cell is split in
/// two halves multiplied by `2w` and `2(1-w)`, the assignment of the two
/// factors chosen by a fair coin. Counts are Poisson with the final cell
/// intensity. Realization `stream` draws from substream `stream` of `seed`.
pub fn gen_cascade(levels: u32, weight: f64, mean_count: f64, seed: u64, stream: u64) -> Result<Cascade> {
    check_cascade(levels, weight, mean_count)?;
    let mut rng = stream_rng(seed, stream);
    let cells = 1usize << levels;
    let mut intensity = vec![mean_count * cells as f64];
    for _ in 0..levels {
        let mut next = Vec::with_capacity(intensity.len() * 2);
        for &parent in &intensity {
            let (left, right) = if rng.random_bool(0.5) { (weight, 1.0 - weight) } else { (1.0 - weight, weight) };
            next.push(parent * left);
            next.push(parent * right);
        }
        intensity = next;
    }
    let counts = intensity
        .iter()
        .map(|&lambda| if lambda > 0.0 { poisson(lambda).map(|d| d.sample(&mut rng) as u32) } else { Ok(0) })
        .collect::<Result<Vec<_>>>()?;
    Ok(Cascade { intensity, counts })
}

/// `realizations` independent cascades, realization `r` on substream `r`.
pub fn gen_cascade_ensemble(
    levels: u32,
    weight: f64,
    mean_count: f64,
    realizations: usize,
    seed: u64,
) -> Result<Vec<Cascade>> {
    check_cascade(levels, weight, mean_count)?;
    (0..realizations as u64)
        .map(|r| gen_cascade(levels, weight, mean_count, seed, r))
        .collect()
}

/// Generator family with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorKind {
    /// Gaussian random-walk prices; `length` prices.
    IidGaussian,
    /// Poisson counts per tick; `length` ticks.
    PoissonCounts { lambda: f64 },
    /// Markov sign chain; `length` signs.
    MarkovSigns { persistence: f64 },
    /// p-model cascades; `length` realizations of `2^levels` cells.
    Cascade { levels: u32, weight: f64, mean_count: f64 },
}

/// A complete, seeded generator description.
///
/// Text form: `kind[:key=value,...]`, e.g. `iid:n=100000`,
/// `poisson:lambda=2,n=100000`, `markov:p=0.7,n=1000000`,
/// `cascade:levels=14,w=0.7,lambda=1,n=200`. `n` is the length, `unit` the
/// sampling unit in seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub length: usize,
    pub unit: i64,
    pub seed: u64,
}

pub const DEFAULT_SEED: u64 = 42;

impl GeneratorSpec {
    pub fn validate(&self) -> Result<()> {
        if self.length == 0 {
            return Err(Error::InvalidParameter("generator length must be positive".into()));
        }
        if self.unit <= 0 {
            return Err(Error::InvalidParameter("generator unit must be positive".into()));
        }
        match self.kind {
            GeneratorKind::IidGaussian if self.length < 2 => {
                Err(Error::InvalidParameter("iid generator needs n >= 2 prices".into()))
            }
            GeneratorKind::PoissonCounts { lambda } => poisson(lambda).map(|_| ()),
            GeneratorKind::MarkovSigns { persistence } if !(persistence > 0.0 && persistence < 1.0) => Err(
                Error::InvalidParameter(format!("persistence must be in (0, 1), got {persistence}")),
            ),
            GeneratorKind::Cascade { levels, weight, mean_count } => check_cascade(levels, weight, mean_count),
            _ => Ok(()),
        }
    }

    /// The kind name used in the text form.
    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            GeneratorKind::IidGaussian => "iid",
            GeneratorKind::PoissonCounts { .. } => "poisson",
            GeneratorKind::MarkovSigns { .. } => "markov",
            GeneratorKind::Cascade { .. } => "cascade",
        }
    }
}

impl fmt::Display for GeneratorSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            GeneratorKind::IidGaussian => write!(f, "iid:n={},unit={}", self.length, self.unit),
            GeneratorKind::PoissonCounts { lambda } => write!(f, "poisson:lambda={lambda},n={}", self.length),
            GeneratorKind::MarkovSigns { persistence } => {
                write!(f, "markov:p={persistence},n={},unit={}", self.length, self.unit)
            }
            GeneratorKind::Cascade { levels, weight, mean_count } => {
                write!(f, "cascade:levels={levels},w={weight},lambda={mean_count},n={}", self.length)
            }
        }
    }
}

impl FromStr for GeneratorSpec {
    type Err = Error;

    /// Parses the text form; the seed is set to [`DEFAULT_SEED`] and is
    /// usually overridden by the caller.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut params: Vec<(&str, &str)> = Vec::new();
        for item in rest.split(',').filter(|p| !p.trim().is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::InvalidParameter(format!("expected key=value, got `{item}`")))?;
            params.push((k.trim(), v.trim()));
        }
        let allowed: &[&str] = match kind.trim() {
            "iid" => &["n", "unit"],
            "poisson" => &["lambda", "n"],
            "markov" => &["p", "n", "unit"],
            "cascade" => &["levels", "w", "lambda", "n"],
            other => return Err(Error::InvalidParameter(format!("unknown generator kind `{other}`"))),
        };
        if let Some((k, _)) = params.iter().find(|(k, _)| !allowed.contains(k)) {
            return Err(Error::InvalidParameter(format!("unknown parameter `{k}` for `{}`", kind.trim())));
        }
        let get = |key: &str| params.iter().rev().find(|(k, _)| *k == key).map(|(_, v)| *v);
        let num = |key: &str, default: f64| -> Result<f64> {
            get(key).map_or(Ok(default), |v| {
                v.parse().map_err(|_| Error::InvalidParameter(format!("invalid value `{v}` for `{key}`")))
            })
        };
        let int = |key: &str, default: u64| -> Result<u64> {
            get(key).map_or(Ok(default), |v| {
                v.parse().map_err(|_| Error::InvalidParameter(format!("invalid value `{v}` for `{key}`")))
            })
        };
        let unit = int("unit", DEFAULT_UNIT as u64)? as i64;
        let spec = match kind.trim() {
            "iid" => GeneratorSpec {
                kind: GeneratorKind::IidGaussian,
                length: int("n", 100_001)? as usize,
                unit,
                seed: DEFAULT_SEED,
            },
            "poisson" => GeneratorSpec {
                kind: GeneratorKind::PoissonCounts { lambda: num("lambda", 1.0)? },
                length: int("n", 100_000)? as usize,
                unit,
                seed: DEFAULT_SEED,
            },
            "markov" => GeneratorSpec {
                kind: GeneratorKind::MarkovSigns { persistence: num("p", 0.7)? },
                length: int("n", 100_000)? as usize,
                unit,
                seed: DEFAULT_SEED,
            },
            _ => GeneratorSpec {
                kind: GeneratorKind::Cascade {
                    levels: int("levels", 10)? as u32,
                    weight: num("w", 0.7)?,
                    mean_count: num("lambda", 1.0)?,
                },
                length: int("n", 1)? as usize,
                unit,
                seed: DEFAULT_SEED,
            },
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Output of [`generate`].
#[derive(Debug, Clone, PartialEq)]
pub enum Generated {
    Prices(PriceSeries),
    Signs(SignSeries),
    Counts(Vec<u64>),
    Cascades(Vec<Cascade>),
}

pub fn generate(spec: &GeneratorSpec) -> Result<Generated> {
    spec.validate()?;
    Ok(match spec.kind {
        GeneratorKind::IidGaussian => Generated::Prices(gen_iid_gaussian(spec.length, spec.unit, spec.seed)?),
        GeneratorKind::PoissonCounts { lambda } => {
            Generated::Counts(gen_poisson_counts(lambda, spec.length, spec.seed)?)
        }
        GeneratorKind::MarkovSigns { persistence } => {
            let signs = gen_markov_signs(persistence, spec.length, spec.seed)?;
            Generated::Signs(SignSeries::new(signs.signs().to_vec(), spec.unit)?)
        }
        GeneratorKind::Cascade { levels, weight, mean_count } => {
            Generated::Cascades(gen_cascade_ensemble(levels, weight, mean_count, spec.length, spec.seed)?)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::to_signs;
    use crate::moments::MultiplicityDistribution;

    #[test]
    fn iid_is_deterministic() {
        let a = gen_iid_gaussian(1000, 60, 7).unwrap();
        let b = gen_iid_gaussian(1000, 60, 7).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, gen_iid_gaussian(1000, 60, 8).unwrap());
        assert!(a.prices().iter().all(|&p| p >= 1.0));
    }

    #[test]
    fn iid_minimal_length() {
        let s = gen_iid_gaussian(2, 60, 1).unwrap();
        assert_eq!(to_signs(&s).unwrap().len(), 1);
        assert!(gen_iid_gaussian(1, 60, 1).is_err());
    }

    #[test]
    fn iid_sign_balance() {
        let s = gen_iid_gaussian(1_000_001, 60, 42).unwrap();
        let signs = to_signs(&s).unwrap();
        let frac = signs.signs().iter().filter(|&&x| x > 0).count() as f64 / signs.len() as f64;
        // Binomial 3-sigma band for 10^6 fair draws.
        assert!((0.4985..=0.5015).contains(&frac), "{frac}");
    }

    #[test]
    fn poisson_draws() {
        let c = gen_poisson_counts(2.0, 100_000, 42).unwrap();
        assert_eq!(c, gen_poisson_counts(2.0, 100_000, 42).unwrap());
        let mean = c.iter().sum::<u64>() as f64 / c.len() as f64;
        assert!((mean - 2.0).abs() < 0.014, "{mean}");
        let f2 = MultiplicityDistribution::from_counts(&c).unwrap().factorial_moment(2).unwrap();
        assert!((f2 - 1.0).abs() < 0.02, "{f2}");
        assert!(gen_poisson_counts(0.0, 10, 1).is_err());
        assert!(gen_poisson_counts(-1.0, 10, 1).is_err());
    }

    #[test]
    fn markov_validation_and_determinism() {
        assert!(gen_markov_signs(0.0, 10, 1).is_err());
        assert!(gen_markov_signs(1.0, 10, 1).is_err());
        assert_eq!(gen_markov_signs(0.7, 500, 3).unwrap(), gen_markov_signs(0.7, 500, 3).unwrap());
    }

    #[test]
    fn markov_persistence_frequency() {
        let s = gen_markov_signs(0.7, 200_000, 11).unwrap();
        let stays = s.signs().windows(2).filter(|w| w[0] == w[1]).count() as f64;
        let frac = stays / (s.len() - 1) as f64;
        assert!((frac - 0.7).abs() < 0.005, "{frac}");
    }

    #[test]
    fn cascade_shape_and_mass() {
        let c = gen_cascade(10, 0.7, 2.0, 5, 0).unwrap();
        assert_eq!(c.intensity.len(), 1024);
        assert_eq!(c.counts.len(), 1024);
        let total: f64 = c.intensity.iter().sum();
        assert!((total - 2048.0).abs() < 1e-9);
        assert_eq!(c, gen_cascade(10, 0.7, 2.0, 5, 0).unwrap());
        assert_ne!(c, gen_cascade(10, 0.7, 2.0, 5, 1).unwrap());
    }

    #[test]
    fn degenerate_cascade_is_uniform() {
        let c = gen_cascade(8, 0.5, 3.0, 1, 0).unwrap();
        assert!(c.intensity.iter().all(|&x| (x - 3.0).abs() < 1e-12));
    }

    #[test]
    fn cascade_validation() {
        assert!(gen_cascade(0, 0.7, 1.0, 1, 0).is_err());
        assert!(gen_cascade(4, 0.4, 1.0, 1, 0).is_err());
        assert!(gen_cascade(4, 1.0, 1.0, 1, 0).is_err());
        assert!(gen_cascade(4, 0.7, 0.0, 1, 0).is_err());
    }

    #[test]
    fn spec_parsing() {
        let s: GeneratorSpec = "markov:p=0.6,n=500".parse().unwrap();
        assert_eq!(s.kind, GeneratorKind::MarkovSigns { persistence: 0.6 });
        assert_eq!(s.length, 500);
        let s: GeneratorSpec = "cascade:levels=10,w=0.7".parse().unwrap();
        assert_eq!(s.kind, GeneratorKind::Cascade { levels: 10, weight: 0.7, mean_count: 1.0 });
        assert_eq!(s.to_string().parse::<GeneratorSpec>().unwrap(), s);
        assert!("garch:n=10".parse::<GeneratorSpec>().is_err());
        assert!("iid:p=0.5".parse::<GeneratorSpec>().is_err());
        assert!("markov:p=1.5".parse::<GeneratorSpec>().is_err());
        assert!("iid:n=abc".parse::<GeneratorSpec>().is_err());
    }
}
